//! One operator command per line:
//!
//! ```text
//! assign 0,2 come 1.5 2
//! assign - stop
//! beacon 0.7 2 0.35 leave 3 3
//! remove-beacon 1
//! speed-cap 0.1
//! speed-cap none
//! ```
//!
//! `-` is the empty robot list. Behaviors are `stop`, `random`, `deploy`, `come X Y` and `leave X Y`.

use super::{float, FormatError};
use std::fmt::Write;
use swarmgail_core::behaviors::{Beacon, BehaviorKind, OperatorCommand};
use swarmgail_core::geometry::Circle;
use swarmgail_core::Point;

fn write_behavior(out: &mut String, b: &BehaviorKind) {
    match b {
        BehaviorKind::Come(p) | BehaviorKind::Leave(p) => {
            let _ = write!(out, "{} {} {}", b.label(), p.x, p.y);
        }
        _ => out.push_str(b.label()),
    }
}

pub fn write_command(cmd: &OperatorCommand) -> String {
    let mut out = String::new();
    match cmd {
        OperatorCommand::Assign { robots, behavior } => {
            let ids: Vec<String> = robots.iter().map(|r| r.to_string()).collect();
            let ids = if ids.is_empty() { "-".to_string() } else { ids.join(",") };
            let _ = write!(out, "assign {ids} ");
            write_behavior(&mut out, behavior);
        }
        OperatorCommand::PlaceBeacon(b) => {
            let _ = write!(out, "beacon {} {} {} ", b.zone.center.x, b.zone.center.y, b.zone.radius);
            write_behavior(&mut out, &b.behavior);
        }
        OperatorCommand::RemoveBeacon(i) => {
            let _ = write!(out, "remove-beacon {i}");
        }
        OperatorCommand::SetSpeedCap(Some(c)) => {
            let _ = write!(out, "speed-cap {c}");
        }
        OperatorCommand::SetSpeedCap(None) => out.push_str("speed-cap none"),
    }
    out
}

fn parse_behavior(toks: &[&str], line: usize) -> Result<BehaviorKind, FormatError> {
    let target = || -> Result<Point, FormatError> {
        match toks {
            [_, x, y] => Ok(Point::new(float(x, line)?, float(y, line)?)),
            _ => Err(FormatError::parse(line, "behavior target needs X and Y")),
        }
    };
    let simple = |k: BehaviorKind| {
        if toks.len() == 1 {
            Ok(k)
        } else {
            Err(FormatError::parse(line, "unexpected tokens after behavior"))
        }
    };
    match toks.first().copied() {
        Some("stop") => simple(BehaviorKind::Stop),
        Some("random") => simple(BehaviorKind::Random),
        Some("deploy") => simple(BehaviorKind::Deploy),
        Some("come") => Ok(BehaviorKind::Come(target()?)),
        Some("leave") => Ok(BehaviorKind::Leave(target()?)),
        Some(other) => Err(FormatError::parse(line, format!("unknown behavior `{other}`"))),
        None => Err(FormatError::parse(line, "missing behavior")),
    }
}

/// Parses the text produced by [`write_command`]. `line` is only used in
/// error messages.
pub fn parse_command(text: &str, line: usize) -> Result<OperatorCommand, FormatError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    match toks.as_slice() {
        ["assign", "-", rest @ ..] => Ok(OperatorCommand::Assign { robots: Vec::new(), behavior: parse_behavior(rest, line)? }),
        ["assign", ids, rest @ ..] => {
            let robots = ids
                .split(',')
                .map(|s| s.parse().map_err(|_| FormatError::parse(line, format!("bad robot id `{s}`"))))
                .collect::<Result<Vec<usize>, _>>()?;
            Ok(OperatorCommand::Assign { robots, behavior: parse_behavior(rest, line)? })
        }
        ["beacon", x, y, r, rest @ ..] => Ok(OperatorCommand::PlaceBeacon(Beacon {
            zone: Circle { center: Point::new(float(x, line)?, float(y, line)?), radius: float(r, line)? },
            behavior: parse_behavior(rest, line)?,
        })),
        ["remove-beacon", i] => Ok(OperatorCommand::RemoveBeacon(
            i.parse().map_err(|_| FormatError::parse(line, format!("bad beacon index `{i}`")))?,
        )),
        ["speed-cap", "none"] => Ok(OperatorCommand::SetSpeedCap(None)),
        ["speed-cap", c] => Ok(OperatorCommand::SetSpeedCap(Some(float(c, line)?))),
        _ => Err(FormatError::parse(line, format!("unknown command `{text}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_round_trip() {
        let cmds = [
            OperatorCommand::Assign { robots: vec![0, 2], behavior: BehaviorKind::Come(Point::new(1.5, 2.0)) },
            OperatorCommand::Assign { robots: vec![1], behavior: BehaviorKind::Deploy },
            OperatorCommand::PlaceBeacon(Beacon {
                zone: Circle { center: Point::new(0.7, 2.0), radius: 0.35 },
                behavior: BehaviorKind::Leave(Point::new(3.0, 3.0)),
            }),
            OperatorCommand::RemoveBeacon(3),
            OperatorCommand::SetSpeedCap(Some(0.1)),
            OperatorCommand::SetSpeedCap(None),
        ];
        for c in cmds {
            let text = write_command(&c);
            assert_eq!(parse_command(&text, 1).unwrap(), c, "{text}");
        }
        assert_eq!(write_command(&OperatorCommand::SetSpeedCap(Some(0.1))), "speed-cap 0.1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_command("assign x stop", 1).is_err());
        assert!(parse_command("assign 0 come 1", 1).is_err());
        assert!(parse_command("assign 0 stop now", 1).is_err());
        assert!(parse_command("fly 0", 1).is_err());
        assert!(parse_command("speed-cap inf", 1).is_err());
    }
}
