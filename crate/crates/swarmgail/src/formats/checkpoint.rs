//! Network checkpoints. Each network is a `net` line with its name and layer
//! sizes followed by one `layer` line per layer holding the row-major weights
//! and then the biases:
//!
//! ```text
//! swarmgail-checkpoint 1
//! env_steps 1530
//! net policy 33 64 64 2
//! layer 0 ...
//! layer 1 ...
//! layer 2 ...
//! log_std -0.5 -0.5
//! net value 33 64 64 1
//! ...
//! net discriminator 35 32 32 1
//! ...
//! ```
//!
//! The discriminator section is absent for policies trained on the mission
//! reward.

use super::{float, read_file, write_file, FormatError};
use std::fmt::Write;
use std::path::Path;
use swarmgail_core::gail::{Discriminator, Policy, Snapshot};
use swarmgail_core::neural::{GaussianPolicyHead, Mlp};

const MAGIC: &str = "swarmgail-checkpoint 1";

fn write_net(out: &mut String, name: &str, net: &Mlp) {
    let _ = write!(out, "net {name}");
    for s in net.sizes() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    for l in 0..net.n_layers() {
        let (w, b) = net.layer(l);
        let _ = write!(out, "layer {l}");
        for v in w.iter().chain(b) {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
}

pub fn write_checkpoint(snapshot: &Snapshot, env_steps: u64) -> String {
    let mut out = String::with_capacity(256 * 1024);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "env_steps {env_steps}");
    write_net(&mut out, "policy", &snapshot.policy.mean);
    let [a, b] = snapshot.policy.head.log_std;
    let _ = writeln!(out, "log_std {a} {b}");
    write_net(&mut out, "value", &snapshot.value);
    if let Some(d) = &snapshot.discriminator {
        write_net(&mut out, "discriminator", &d.net);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        loop {
            let (i, l) = self.inner.next()?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        match self.next() {
            Some((n, toks)) if toks[0] == key => Ok((n, toks)),
            Some((n, toks)) => Err(FormatError::parse(n, format!("expected `{key}`, found `{}`", toks[0]))),
            None => Err(FormatError::parse(0, format!("missing `{key}`"))),
        }
    }
}

fn read_net(lines: &mut Lines<'_>, name: &str) -> Result<Mlp, FormatError> {
    let (n, toks) = lines.expect("net")?;
    if toks.get(1) != Some(&name) {
        return Err(FormatError::parse(n, format!("expected network `{name}`")));
    }
    let sizes = toks[2..]
        .iter()
        .map(|s| s.parse().map_err(|_| FormatError::parse(n, format!("bad layer size `{s}`"))))
        .collect::<Result<Vec<usize>, _>>()?;
    if sizes.len() < 2 {
        return Err(FormatError::parse(n, "a network needs at least two layer sizes"));
    }
    let mut params = Vec::new();
    for l in 0..sizes.len() - 1 {
        let (n, toks) = lines.expect("layer")?;
        if toks.get(1) != Some(&l.to_string().as_str()) {
            return Err(FormatError::parse(n, format!("expected layer {l}")));
        }
        let want = sizes[l] * sizes[l + 1] + sizes[l + 1];
        if toks.len() - 2 != want {
            return Err(FormatError::parse(n, format!("layer {l} has {} values, expected {want}", toks.len() - 2)));
        }
        for t in &toks[2..] {
            params.push(float(t, n)?);
        }
    }
    Mlp::from_params(&sizes, params).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Parses a checkpoint; returns the snapshot and its environment-step count.
pub fn parse_checkpoint(text: &str) -> Result<(Snapshot, u64), FormatError> {
    let mut lines = Lines { inner: text.lines().enumerate().peekable() };
    let (n, magic) = lines.next().ok_or_else(|| FormatError::parse(1, "empty checkpoint"))?;
    if magic.join(" ") != MAGIC {
        return Err(FormatError::parse(n, "not a checkpoint file"));
    }
    let (n, toks) = lines.expect("env_steps")?;
    let env_steps = toks
        .get(1)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| FormatError::parse(n, "bad env_steps"))?;
    let mean = read_net(&mut lines, "policy")?;
    let (n, toks) = lines.expect("log_std")?;
    if toks.len() != 3 {
        return Err(FormatError::parse(n, "log_std needs two values"));
    }
    let head = GaussianPolicyHead { log_std: [float(toks[1], n)?, float(toks[2], n)?] };
    let policy = Policy::from_parts(mean, head).map_err(|e| FormatError::Invalid(format!("policy: {e}")))?;
    let value = read_net(&mut lines, "value")?;
    let discriminator = if lines.inner.peek().is_some() {
        match read_net(&mut lines, "discriminator") {
            Ok(net) => Some(Discriminator { net }),
            Err(FormatError::Parse { line: 0, .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    if let Some((n, _)) = lines.next() {
        return Err(FormatError::parse(n, "trailing content"));
    }
    Ok((Snapshot { policy, value, discriminator }, env_steps))
}

pub fn save_checkpoint(snapshot: &Snapshot, env_steps: u64, path: &Path) -> Result<(), FormatError> {
    write_file(path, &write_checkpoint(snapshot, env_steps))
}

pub fn load_checkpoint(path: &Path) -> Result<(Snapshot, u64), FormatError> {
    parse_checkpoint(&read_file(path)?)
}
