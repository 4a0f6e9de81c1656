use crate::features::{layout, FEATURE_DIM};
use crate::sim::{LOCAL_OBS_DIM, MAX_LINEAR_VEL};
use crate::EPISODE_STEPS;
use core::ops::Range;

pub const JOINT_OBS_DIM: usize = LOCAL_OBS_DIM + FEATURE_DIM;
pub const LOCAL_BLOCK: Range<usize> = 0..LOCAL_OBS_DIM;
pub const FEATURE_BLOCK: Range<usize> = LOCAL_OBS_DIM..JOINT_OBS_DIM;

/// Local observation (10) followed by the swarm features (23) with coverage
/// divided by the episode length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointObservation(pub [f64; JOINT_OBS_DIM]);

impl JointObservation {
    pub fn new(local: &[f64; LOCAL_OBS_DIM], features: &[f64; FEATURE_DIM]) -> Self {
        let mut v = [0.0; JOINT_OBS_DIM];
        v[LOCAL_BLOCK].copy_from_slice(local);
        v[FEATURE_BLOCK].copy_from_slice(features);
        let horizon = EPISODE_STEPS as f64;
        for c in &mut v[LOCAL_OBS_DIM + layout::COVERAGE..LOCAL_OBS_DIM + layout::COLOR_VISITS] {
            *c = (*c / horizon).clamp(0.0, 1.0);
        }
        Self(v)
    }

    pub fn as_array(&self) -> &[f64; JOINT_OBS_DIM] {
        &self.0
    }
}

/// Keeps the local block, zeroes the swarm features.
pub fn mask_for_policy(j: &[f64; JOINT_OBS_DIM]) -> [f64; JOINT_OBS_DIM] {
    let mut out = *j;
    out[FEATURE_BLOCK].fill(0.0);
    out
}

/// Keeps the swarm features, zeroes the focal robot's local block.
pub fn mask_for_discriminator(j: &[f64; JOINT_OBS_DIM]) -> [f64; JOINT_OBS_DIM] {
    let mut out = *j;
    out[LOCAL_BLOCK].fill(0.0);
    out
}

/// Per-dimension divisor bringing every input to roughly unit scale before
/// it enters a network. Zero stays zero, so masking is preserved.
pub const OBS_SCALE: [f64; JOINT_OBS_DIM] = {
    let mut s = [1.0; JOINT_OBS_DIM];
    s[0] = MAX_LINEAR_VEL;
    let mut k = 1;
    while k <= 5 {
        s[k] = 200.0;
        k += 1;
    }
    s[LOCAL_OBS_DIM + layout::AVG_SPEED] = MAX_LINEAR_VEL;
    s[LOCAL_OBS_DIM + layout::GROUPING] = 2.0;
    let mut k = LOCAL_OBS_DIM + layout::COLOR_VISITS;
    while k < LOCAL_OBS_DIM + layout::COLOR_TRAVEL_TIME {
        s[k] = 10.0;
        k += 1;
    }
    s[LOCAL_OBS_DIM + layout::COLOR_TRAVEL_TIME] = EPISODE_STEPS as f64;
    s
};

pub fn network_input(v: &[f64; JOINT_OBS_DIM]) -> [f64; JOINT_OBS_DIM] {
    let mut out = [0.0; JOINT_OBS_DIM];
    for k in 0..JOINT_OBS_DIM {
        out[k] = v[k] / OBS_SCALE[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_on_all_ones() {
        let ones = [1.0; JOINT_OBS_DIM];
        let p = mask_for_policy(&ones);
        assert!(p[..10].iter().all(|v| *v == 1.0) && p[10..].iter().all(|v| *v == 0.0));
        let d = mask_for_discriminator(&ones);
        assert!(d[..10].iter().all(|v| *v == 0.0) && d[10..].iter().all(|v| *v == 1.0));
    }

    #[test]
    fn masks_are_complementary_and_idempotent() {
        let mut j = [0.0; JOINT_OBS_DIM];
        for (k, v) in j.iter_mut().enumerate() {
            *v = k as f64 * 0.37 - 3.0;
        }
        let p = mask_for_policy(&j);
        let d = mask_for_discriminator(&j);
        for k in 0..JOINT_OBS_DIM {
            assert_eq!(p[k] + d[k], j[k]);
        }
        assert_eq!(mask_for_policy(&p), p);
        assert_eq!(mask_for_discriminator(&d), d);
        let z = [0.0; JOINT_OBS_DIM];
        assert_eq!(mask_for_policy(&z), z);
        assert_eq!(mask_for_discriminator(&z), z);
    }

    #[test]
    fn coverage_is_normalized() {
        let mut f = [0.0; FEATURE_DIM];
        f[layout::COVERAGE] = 51.0;
        f[layout::COVERAGE + 1] = 25.5;
        let j = JointObservation::new(&[0.0; LOCAL_OBS_DIM], &f);
        assert_eq!(j.0[LOCAL_OBS_DIM + layout::COVERAGE], 1.0);
        assert_eq!(j.0[LOCAL_OBS_DIM + layout::COVERAGE + 1], 0.5);
    }
}
