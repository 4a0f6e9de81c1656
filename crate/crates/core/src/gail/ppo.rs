use super::policy::Policy;
use super::rollout::TransitionRecord;
use crate::math::{exp, sqrt};
use crate::neural::{gaussian_log_prob, Adam, AdamConfig, Mlp};
use super::obs::network_input;
use crate::rng::SimRng;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PpoConfig {
    pub lr: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub clip: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub max_grad_norm: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            lr: 3e-4,
            gamma: 0.99,
            lambda: 0.95,
            clip: 0.2,
            epochs: 10,
            minibatch_size: 256,
            value_coef: 0.5,
            entropy_coef: 0.0,
            max_grad_norm: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PpoStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub entropy: f64,
}

/// Optimizer state for the policy mean, the log-std vector and the critic.
#[derive(Clone, Debug)]
pub struct PpoOptimizers {
    pub mean: Adam,
    pub log_std: Adam,
    pub value: Adam,
}

impl PpoOptimizers {
    pub fn new(policy: &Policy, value: &Mlp, cfg: &PpoConfig) -> Self {
        let c = AdamConfig::with_lr(cfg.lr);
        Self {
            mean: Adam::new(policy.mean.n_params(), c),
            log_std: Adam::new(2, c),
            value: Adam::new(value.n_params(), c),
        }
    }
}

/// Generalized advantage estimation over one time-ordered stream. A `done`
/// step does not bootstrap from the following value.
pub fn gae(rewards: &[f64], values: &[f64], dones: &[bool], gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let terminal = dones[t] || t + 1 == n;
        let next_value = if terminal { 0.0 } else { values[t + 1] };
        if terminal {
            running = 0.0;
        }
        let delta = rewards[t] + gamma * next_value - values[t];
        running = delta + gamma * lambda * running;
        adv[t] = running;
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, returns)
}

/// `min(r A, clip(r, 1-eps, 1+eps) A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, clip: f64) -> f64 {
    let unclipped = ratio * advantage;
    let clipped = ratio.clamp(1.0 - clip, 1.0 + clip) * advantage;
    unclipped.min(clipped)
}

fn clip_norm(grads: &mut [f64], max_norm: f64) {
    let norm = sqrt(grads.iter().map(|g| g * g).sum());
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        grads.iter_mut().for_each(|g| *g *= s);
    }
}

struct Sample<'a> {
    t: &'a TransitionRecord,
    advantage: f64,
    ret: f64,
}

/// Clipped-surrogate update of policy and critic on the `reward` field of
/// the given per-robot streams.
pub fn ppo_update(
    policy: &mut Policy,
    value: &mut Mlp,
    opt: &mut PpoOptimizers,
    streams: &[Vec<TransitionRecord>],
    cfg: &PpoConfig,
    rng: &mut SimRng,
) -> PpoStats {
    let mut samples: Vec<Sample<'_>> = Vec::new();
    for s in streams {
        let r: Vec<f64> = s.iter().map(|t| t.reward).collect();
        let v: Vec<f64> = s.iter().map(|t| t.value).collect();
        let d: Vec<bool> = s.iter().map(|t| t.done).collect();
        let (adv, ret) = gae(&r, &v, &d, cfg.gamma, cfg.lambda);
        samples.extend(s.iter().zip(adv).zip(ret).map(|((t, advantage), ret)| Sample { t, advantage, ret }));
    }
    let n = samples.len();
    if n == 0 {
        return PpoStats::default();
    }
    let mean = samples.iter().map(|s| s.advantage).sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s.advantage - mean) * (s.advantage - mean)).sum::<f64>() / n as f64;
    let std = sqrt(var).max(1e-8);
    samples.iter_mut().for_each(|s| s.advantage = (s.advantage - mean) / std);

    let mut order: Vec<usize> = (0..n).collect();
    let mut g_mean = vec![0.0; policy.mean.n_params()];
    let mut g_value = vec![0.0; value.n_params()];
    let mut stats = PpoStats::default();
    let mut batches = 0usize;
    let mut seen = 0usize;
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(cfg.minibatch_size.max(1)) {
            g_mean.fill(0.0);
            g_value.fill(0.0);
            let mut g_log_std = [0.0; 2];
            let b = chunk.len() as f64;
            let var = {
                let s = policy.head.std();
                [s[0] * s[0], s[1] * s[1]]
            };
            let mut policy_loss = 0.0;
            let mut value_loss = 0.0;
            for &k in chunk {
                let s = &samples[k];
                let input = Policy::input(&s.t.joint);
                let cache = policy.mean.forward_cached(&input).expect("policy input dim");
                let mu = cache.output();
                let a = &s.t.raw_action;
                let log_prob = gaussian_log_prob(&policy.head, mu, a);
                let ratio = exp(log_prob - s.t.log_prob);
                policy_loss -= clipped_surrogate(ratio, s.advantage, cfg.clip);
                stats.approx_kl += s.t.log_prob - log_prob;
                if (ratio - 1.0).abs() > cfg.clip {
                    stats.clip_fraction += 1.0;
                }
                // d(-surrogate)/d(log_prob); zero where the clipped branch is active.
                let unclipped = ratio * s.advantage;
                let clipped = ratio.clamp(1.0 - cfg.clip, 1.0 + cfg.clip) * s.advantage;
                let dlogp = if unclipped <= clipped { -unclipped / b } else { 0.0 };
                if dlogp != 0.0 {
                    let mut dmu = [0.0; 2];
                    for j in 0..2 {
                        let z = a[j] - mu[j];
                        dmu[j] = dlogp * z / var[j];
                        g_log_std[j] += dlogp * (z * z / var[j] - 1.0);
                    }
                    policy.mean.backward_into(&cache, &dmu, &mut g_mean).expect("policy output dim");
                }

                let vcache = value.forward_cached(&network_input(s.t.joint.as_array())).expect("value input dim");
                let err = vcache.output()[0] - s.ret;
                value_loss += err * err;
                value.backward_into(&vcache, &[cfg.value_coef * 2.0 * err / b], &mut g_value).expect("value output dim");
            }
            for g in &mut g_log_std {
                *g -= cfg.entropy_coef;
            }
            let mut g_policy: Vec<f64> = g_mean.iter().copied().chain(g_log_std).collect();
            clip_norm(&mut g_policy, cfg.max_grad_norm);
            clip_norm(&mut g_value, cfg.max_grad_norm);
            let (gm, gl) = g_policy.split_at(g_mean.len());
            opt.mean.step(policy.mean.params_mut(), gm);
            opt.log_std.step(&mut policy.head.log_std, gl);
            opt.value.step(value.params_mut(), &g_value);
            policy.head.clamp();

            stats.policy_loss += policy_loss / b;
            stats.value_loss += value_loss / b;
            batches += 1;
            seen += chunk.len();
        }
    }
    stats.policy_loss /= batches as f64;
    stats.value_loss /= batches as f64;
    stats.approx_kl /= seen as f64;
    stats.clip_fraction /= seen as f64;
    stats.entropy = policy.head.entropy();
    stats
}
