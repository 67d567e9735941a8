//! Gap profiles. Besides the raw per-step gap |mu_1(t) - mu_2(t)|, this
//! module computes the *detectable* gap profile: the largest gap size an
//! elimination test could certify at time `t` from the samples available so
//! far. A gap of size `lambda` needs a window of `w(lambda) =
//! ceil(C0 ln T / lambda^2)` steps, and `lambda` counts as detectable at `t`
//! if the mean gap over the trailing `w(lambda)` steps is at least `lambda`.
//!
//! The profile value is the supremum of all detectable `lambda` in (0, 1],
//! falling back to `sqrt(C0 ln T / t)` — the scale that `t` samples could
//! certify at best — when nothing is detectable. Early on (t < C0 ln T) the
//! fallback exceeds 1, meaning no gap is certifiable at all with so few
//! samples.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bounds::C0;
use crate::instance::RewardProfile;
use crate::num;
use crate::{Error, Result};

/// Grid resolution used by the scan-based reference implementation.
pub const DEFAULT_ORACLE_GRID: f64 = 1e-4;

/// Samples needed per arm to certify a gap of `lambda` at horizon `horizon`:
/// `ceil(C0 ln(horizon) / lambda^2)`.
pub fn window_for_gap(lambda: f64, horizon: usize) -> usize {
    assert!(lambda > 0.0, "gap size must be positive, got {lambda}");
    num::ceil(C0 * num::ln(horizon as f64) / (lambda * lambda)) as usize
}

/// Profile value when no gap is detectable at time `t`.
pub fn fallback_gap(t: usize, horizon: usize) -> f64 {
    num::sqrt(C0 * num::ln(horizon as f64) / t as f64)
}

/// Raw per-step gap |mu_1(t) - mu_2(t)|, indexed by t - 1.
pub fn gap_profile(profile: &RewardProfile) -> Vec<f64> {
    (1..=profile.horizon()).map(|t| profile.gap(t)).collect()
}

/// prefix[t] = sum of signed gaps over 1..=t, so trailing-window means cost
/// O(1) each.
fn signed_gap_prefix(profile: &RewardProfile) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(profile.horizon() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for t in 1..=profile.horizon() {
        acc += profile.signed_gap(t);
        prefix.push(acc);
    }
    prefix
}

/// Detectable gap profile, indexed by t - 1.
///
/// Grouping gap sizes by their common window length: sizes mapping to window
/// `w` form the interval [sqrt(C/w), sqrt(C/(w-1))) with C = C0 ln T, so the
/// supremum over window `w` is min(mean gap over the last w steps,
/// sqrt(C/(w-1)), 1) whenever the mean gap reaches the interval's lower end.
/// The profile takes the best such value over all windows that fit in `t`.
pub fn detectable_gap_profile(profile: &RewardProfile) -> Result<Vec<f64>> {
    let horizon = profile.horizon();
    if horizon < 2 {
        return Err(Error::InvalidArgument(String::from(
            "detectable gap profile needs horizon >= 2",
        )));
    }
    let big_c = C0 * num::ln(horizon as f64);
    let prefix = signed_gap_prefix(profile);
    // Windows shorter than C correspond to gaps above 1 and cannot occur.
    let w_first = num::ceil(big_c) as usize;
    let mut out = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut best: Option<f64> = None;
        for w in w_first..=t {
            let cap = num::sqrt(big_c / (w - 1) as f64).min(1.0);
            // Caps only shrink as w grows, so nothing later can win.
            if best.is_some_and(|b| b >= cap) {
                break;
            }
            let avg = num::abs(prefix[t] - prefix[t - w]) / w as f64;
            if avg >= num::sqrt(big_c / w as f64) {
                let cand = avg.min(cap);
                if best.is_none_or(|b| cand > b) {
                    best = Some(cand);
                }
            }
        }
        out.push(best.unwrap_or_else(|| num::sqrt(big_c / t as f64)));
    }
    Ok(out)
}

/// Reference implementation: for each `t`, scan gap sizes downward from 1 on
/// a uniform grid and return the first size whose defining predicate holds
/// (window fits and the trailing mean gap reaches it). Agrees with
/// [`detectable_gap_profile`] to within one grid step whenever the supremum
/// is approached from below, and uses no interval decomposition, so the two
/// routes only share the definition.
pub fn detectable_gap_oracle(profile: &RewardProfile, grid_step: f64) -> Result<Vec<f64>> {
    let horizon = profile.horizon();
    if horizon < 2 {
        return Err(Error::InvalidArgument(String::from(
            "detectable gap profile needs horizon >= 2",
        )));
    }
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(Error::InvalidArgument(String::from(
            "grid step must lie in (0, 1)",
        )));
    }
    let big_c = C0 * num::ln(horizon as f64);
    let mut prefix = Vec::with_capacity(horizon + 1);
    prefix.push(0.0f64);
    for t in 1..=horizon {
        let last = *prefix.last().unwrap();
        prefix.push(last + profile.signed_gap(t));
    }
    let mut out = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut found = None;
        let mut k = 0usize;
        loop {
            let lambda = 1.0 - k as f64 * grid_step;
            if lambda <= 0.0 {
                break;
            }
            let w = num::ceil(big_c / (lambda * lambda)) as usize;
            // Windows only grow as lambda shrinks, so nothing below fits.
            if w > t {
                break;
            }
            let avg = num::abs(prefix[t] - prefix[t - w]) / w as f64;
            if avg >= lambda {
                found = Some(lambda);
                break;
            }
            k += 1;
        }
        out.push(found.unwrap_or_else(|| num::sqrt(big_c / t as f64)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{GeneratorSpec, RewardModel};
    use alloc::vec;

    fn stationary_profile(mu1: f64, mu2: f64, horizon: usize) -> RewardProfile {
        GeneratorSpec::Stationary {
            mu: [mu1, mu2],
            delta: 0.0,
            noise: RewardModel::gaussian(),
        }
        .generate(horizon)
        .unwrap()
        .profile()
        .clone()
    }

    #[test]
    fn window_for_gap_pinned_values() {
        // 144 ln 6000 = 1252.7301..., so w(0.5) = ceil(5010.9204...) = 5011
        // and w(1) = 1253.
        assert_eq!(window_for_gap(0.5, 6000), 5011);
        assert_eq!(window_for_gap(1.0, 6000), 1253);
        assert!(window_for_gap(0.25, 6000) > window_for_gap(0.5, 6000));
    }

    #[test]
    fn stationary_half_gap_detects_exactly_at_window_boundary() {
        // Means 0.75 / 0.25 keep the gap an exact 0.5 in floating point.
        let profile = stationary_profile(0.75, 0.25, 6000);
        let lambda = detectable_gap_profile(&profile).unwrap();
        let w = window_for_gap(0.5, 6000);
        for t in 1..w {
            assert_eq!(lambda[t - 1], fallback_gap(t, 6000), "t = {t}");
        }
        for t in w..=6000 {
            assert_eq!(lambda[t - 1], 0.5, "t = {t}");
        }
    }

    #[test]
    fn identical_arms_fall_back_everywhere() {
        let profile = stationary_profile(0.4, 0.4, 200);
        let lambda = detectable_gap_profile(&profile).unwrap();
        let oracle = detectable_gap_oracle(&profile, DEFAULT_ORACLE_GRID).unwrap();
        for t in 1..=200 {
            assert_eq!(lambda[t - 1], fallback_gap(t, 200));
            assert_eq!(lambda[t - 1], oracle[t - 1]);
        }
    }

    #[test]
    fn fallback_exceeds_one_early_on() {
        let profile = stationary_profile(0.75, 0.25, 6000);
        let lambda = detectable_gap_profile(&profile).unwrap();
        assert!(lambda[0] > 1.0);
    }

    #[test]
    fn oracle_agrees_within_grid_step_on_detected_gap() {
        let profile = stationary_profile(0.95, 0.05, 1500);
        let lambda = detectable_gap_profile(&profile).unwrap();
        let oracle = detectable_gap_oracle(&profile, DEFAULT_ORACLE_GRID).unwrap();
        let w = window_for_gap(0.9, 1500);
        assert!(w <= 1500, "gap 0.9 must be detectable at this horizon");
        for t in 1..=1500 {
            let diff = (lambda[t - 1] - oracle[t - 1]).abs();
            assert!(
                diff <= DEFAULT_ORACLE_GRID + 1e-12,
                "t = {t}: {} vs {}",
                lambda[t - 1],
                oracle[t - 1]
            );
        }
        assert!((lambda[1499] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_horizon() {
        let profile = RewardProfile::new([vec![0.5], vec![0.5]]).unwrap();
        assert!(detectable_gap_profile(&profile).is_err());
        assert!(detectable_gap_oracle(&profile, 1e-4).is_err());
    }
}
