//! Two-armed reward profiles: construction, drift validation, generator
//! families and reward sampling. Timesteps are 1-based throughout; a profile
//! with horizon `T` defines means for `t` in `1..=T`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::num;
use crate::{Error, Result};

/// Absolute slack used when comparing per-step mean changes against the
/// drift limit, absorbing rounding in generator arithmetic.
pub const DRIFT_TOLERANCE: f64 = 1e-12;

/// One of the two arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::One, Arm::Two];

    /// Zero-based index for table lookups.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Arm::One => 0,
            Arm::Two => 1,
        }
    }

    /// One-based identifier, as used in CSV output and configs.
    #[inline]
    pub fn id(self) -> u8 {
        self.index() as u8 + 1
    }

    #[inline]
    pub fn other(self) -> Arm {
        match self {
            Arm::One => Arm::Two,
            Arm::Two => Arm::One,
        }
    }

    pub fn from_id(id: u8) -> Option<Arm> {
        match id {
            1 => Some(Arm::One),
            2 => Some(Arm::Two),
            _ => None,
        }
    }
}

/// Mean-reward sequences for both arms over a common horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardProfile {
    means: [Vec<f64>; 2],
}

impl RewardProfile {
    /// Validates that both sequences are nonempty, equally long, finite and
    /// within [0, 1].
    pub fn new(means: [Vec<f64>; 2]) -> Result<Self> {
        if means[0].is_empty() {
            return Err(Error::InvalidProfile(String::from("empty mean sequence")));
        }
        if means[0].len() != means[1].len() {
            return Err(Error::InvalidProfile(format!(
                "arm lengths differ: {} vs {}",
                means[0].len(),
                means[1].len()
            )));
        }
        for arm in Arm::BOTH {
            for (i, &mu) in means[arm.index()].iter().enumerate() {
                if !mu.is_finite() || !(0.0..=1.0).contains(&mu) {
                    return Err(Error::InvalidProfile(format!(
                        "arm {} mean at t = {} is {mu}, outside [0, 1]",
                        arm.id(),
                        i + 1
                    )));
                }
            }
        }
        Ok(RewardProfile { means })
    }

    #[inline]
    pub fn horizon(&self) -> usize {
        self.means[0].len()
    }

    #[inline]
    pub fn mean(&self, arm: Arm, t: usize) -> f64 {
        assert!(
            t >= 1 && t <= self.horizon(),
            "timestep {t} outside 1..={}",
            self.horizon()
        );
        self.means[arm.index()][t - 1]
    }

    #[inline]
    pub fn means(&self, arm: Arm) -> &[f64] {
        &self.means[arm.index()]
    }

    /// mu_1(t) - mu_2(t), the signed gap.
    #[inline]
    pub fn signed_gap(&self, t: usize) -> f64 {
        self.mean(Arm::One, t) - self.mean(Arm::Two, t)
    }

    #[inline]
    pub fn gap(&self, t: usize) -> f64 {
        num::abs(self.signed_gap(t))
    }

    #[inline]
    pub fn optimal_mean(&self, t: usize) -> f64 {
        let a = self.mean(Arm::One, t);
        let b = self.mean(Arm::Two, t);
        if a >= b {
            a
        } else {
            b
        }
    }

    /// Ties go to arm 1.
    #[inline]
    pub fn optimal_arm(&self, t: usize) -> Arm {
        if self.mean(Arm::One, t) >= self.mean(Arm::Two, t) {
            Arm::One
        } else {
            Arm::Two
        }
    }
}

/// A single step whose mean change exceeds the drift limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftViolation {
    pub arm: Arm,
    /// Change happens between `t` and `t + 1`.
    pub t: usize,
    pub change: f64,
}

/// Outcome of checking a profile against a drift limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub limit: f64,
    pub max_step: f64,
    pub violations: Vec<DriftViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks |mu_a(t+1) - mu_a(t)| <= limit + tolerance for every arm and step.
pub fn validate_drift(profile: &RewardProfile, limit: f64) -> ValidationReport {
    let mut violations = Vec::new();
    let mut max_step = 0.0f64;
    for arm in Arm::BOTH {
        let means = profile.means(arm);
        for t in 1..means.len() {
            let change = num::abs(means[t] - means[t - 1]);
            if change > max_step {
                max_step = change;
            }
            if change > limit + DRIFT_TOLERANCE {
                violations.push(DriftViolation { arm, t, change });
            }
        }
    }
    ValidationReport {
        limit,
        max_step,
        violations,
    }
}

/// Observation noise around the mean reward.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)
)]
pub enum RewardModel {
    /// Reward is 1 with probability mu, else 0.
    Bernoulli,
    /// Reward is mu plus centred Gaussian noise.
    Gaussian {
        #[cfg_attr(feature = "serde", serde(default = "default_variance"))]
        variance: f64,
    },
}

fn default_variance() -> f64 {
    0.25
}

impl RewardModel {
    /// Gaussian noise with the default variance 1/4.
    pub fn gaussian() -> RewardModel {
        RewardModel::Gaussian {
            variance: default_variance(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let RewardModel::Gaussian { variance } = self {
            if !variance.is_finite() || *variance < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "gaussian variance must be finite and >= 0, got {variance}"
                )));
            }
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match self {
            RewardModel::Bernoulli => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            RewardModel::Gaussian { variance } => {
                mean + num::sqrt(*variance) * standard_normal(rng)
            }
        }
    }
}

/// Box-Muller transform; one draw per call so the stream layout does not
/// depend on build features.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>(); // in (0, 1], keeps ln finite
    let u2: f64 = rng.gen();
    num::sqrt(-2.0 * num::ln(u1)) * num::cos(2.0 * PI * u2)
}

/// A reward profile together with its declared drift limit and noise model.
/// Construction validates membership in the slowly-varying class.
#[derive(Clone, Debug, PartialEq)]
pub struct BanditInstance {
    profile: RewardProfile,
    drift_limit: f64,
    noise: RewardModel,
}

impl BanditInstance {
    pub fn new(profile: RewardProfile, drift_limit: f64, noise: RewardModel) -> Result<Self> {
        if !drift_limit.is_finite() || drift_limit < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "drift limit must be finite and >= 0, got {drift_limit}"
            )));
        }
        noise.validate()?;
        let report = validate_drift(&profile, drift_limit);
        if let Some(first) = report.violations.first() {
            return Err(Error::DriftLimitExceeded {
                limit: drift_limit,
                violations: report.violations.len(),
                first_arm: first.arm.id(),
                first_t: first.t,
                first_step: first.change,
            });
        }
        Ok(BanditInstance {
            profile,
            drift_limit,
            noise,
        })
    }

    #[inline]
    pub fn profile(&self) -> &RewardProfile {
        &self.profile
    }

    #[inline]
    pub fn horizon(&self) -> usize {
        self.profile.horizon()
    }

    #[inline]
    pub fn drift_limit(&self) -> f64 {
        self.drift_limit
    }

    #[inline]
    pub fn noise(&self) -> RewardModel {
        self.noise
    }

    #[inline]
    pub fn mean(&self, arm: Arm, t: usize) -> f64 {
        self.profile.mean(arm, t)
    }

    /// Draws one reward for pulling `arm` at time `t`.
    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: Arm, t: usize, rng: &mut R) -> f64 {
        self.noise.sample(self.profile.mean(arm, t), rng)
    }
}

/// Parametric instance families. Each carries the drift limit the produced
/// instance declares (and is validated against).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum GeneratorSpec {
    /// Constant means.
    Stationary {
        mu: [f64; 2],
        #[cfg_attr(feature = "serde", serde(default))]
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Linear interpolation through per-arm (t, value) anchors; flat before
    /// the first and after the last anchor.
    PiecewiseLinear {
        anchors: [Vec<(usize, f64)>; 2],
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Two arms a constant gap apart, drifting in phase as a triangle wave of
    /// slope `delta`; the optimal arm never changes.
    WellSeparated {
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_gap"))]
        gap: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        amplitude: Option<f64>,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Arm 1 fixed at 1/2; arm 2 alternates plateaus at 1/2 +- half_gap with
    /// slope-`delta` ramps between them, toggling the optimal arm at every
    /// drift. Defaults scale with the drift limit like the worst-case tent
    /// construction: half_gap = delta^(1/3), plateaus half a ramp long.
    Oscillating {
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        half_gap: Option<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        stay: Option<usize>,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Family with drift/stationary periods of fixed lengths; the amount
    /// moved per drift period scales with `delta`.
    MultiDeltaCommonPeriods {
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_drift_len"))]
        drift_len: usize,
        #[cfg_attr(feature = "serde", serde(default = "default_drift_len"))]
        stay: usize,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Family with equal total cumulative drift and equal maximum gap across
    /// members: the lower arm makes fixed-size excursions at slope `delta`
    /// inside a fixed-length cycle, so drift periods shrink as `delta` grows.
    MultiDeltaEqualCumulative {
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_gap"))]
        gap: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_wiggle"))]
        wiggle: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_cycle"))]
        cycle: usize,
        #[cfg_attr(feature = "serde", serde(default = "RewardModel::gaussian"))]
        noise: RewardModel,
    },
    /// Worst-case tent construction used by the lower bound: arm 2 fixed at
    /// 1/2, arm 1 climbs from 1/2 in steps of epsilon/m to its peak at the
    /// block midpoint and back down, tiled over the horizon.
    LowerBoundNuPrime {
        m: usize,
        #[cfg_attr(feature = "serde", serde(default))]
        epsilon: Option<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        delta: Option<f64>,
        #[cfg_attr(feature = "serde", serde(default = "default_noise_bernoulli"))]
        noise: RewardModel,
    },
}

#[cfg(feature = "serde")]
fn default_gap() -> f64 {
    0.5
}

#[cfg(feature = "serde")]
fn default_wiggle() -> f64 {
    0.02
}

#[cfg(feature = "serde")]
fn default_cycle() -> usize {
    2500
}

#[cfg(feature = "serde")]
fn default_drift_len() -> usize {
    1000
}

#[cfg(feature = "serde")]
fn default_noise_bernoulli() -> RewardModel {
    RewardModel::Bernoulli
}

impl GeneratorSpec {
    /// The drift limit the generated instance will declare.
    pub fn delta(&self) -> f64 {
        match self {
            GeneratorSpec::Stationary { delta, .. }
            | GeneratorSpec::PiecewiseLinear { delta, .. }
            | GeneratorSpec::WellSeparated { delta, .. }
            | GeneratorSpec::Oscillating { delta, .. }
            | GeneratorSpec::MultiDeltaCommonPeriods { delta, .. }
            | GeneratorSpec::MultiDeltaEqualCumulative { delta, .. } => *delta,
            GeneratorSpec::LowerBoundNuPrime {
                m, epsilon, delta, ..
            } => delta.unwrap_or_else(|| nu_prime_epsilon(*m, *epsilon) / *m as f64),
        }
    }

    /// Builds the instance over `1..=horizon`.
    pub fn generate(&self, horizon: usize) -> Result<BanditInstance> {
        if horizon == 0 {
            return Err(Error::InvalidGenerator(String::from(
                "horizon must be >= 1",
            )));
        }
        match self {
            GeneratorSpec::Stationary { mu, delta, noise } => {
                let means = [alloc::vec![mu[0]; horizon], alloc::vec![mu[1]; horizon]];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::PiecewiseLinear {
                anchors,
                delta,
                noise,
            } => {
                let means = [
                    piecewise_linear(&anchors[0], horizon)?,
                    piecewise_linear(&anchors[1], horizon)?,
                ];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::WellSeparated {
                delta,
                gap,
                amplitude,
                noise,
            } => {
                if !(0.0..=1.0).contains(gap) {
                    return Err(Error::InvalidGenerator(format!(
                        "gap must lie in [0, 1], got {gap}"
                    )));
                }
                let hi = 0.5 + gap / 2.0;
                let lo = 0.5 - gap / 2.0;
                let headroom = 1.0 - hi;
                let amp = amplitude.unwrap_or_else(|| headroom.min(0.05));
                if amp < 0.0 || amp > headroom + 1e-15 {
                    return Err(Error::InvalidGenerator(format!(
                        "amplitude {amp} exceeds headroom {headroom} for gap {gap}"
                    )));
                }
                let wave = triangle_wave(amp, *delta, horizon);
                let means = [
                    wave.iter().map(|w| hi + w).collect(),
                    wave.iter().map(|w| lo + w).collect(),
                ];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::Oscillating {
                delta,
                half_gap,
                stay,
                noise,
            } => {
                if *delta <= 0.0 {
                    return Err(Error::InvalidGenerator(String::from(
                        "oscillating family needs delta > 0",
                    )));
                }
                let h = half_gap.unwrap_or_else(|| num::cbrt(*delta).min(0.45));
                if h <= 0.0 || h > 0.5 {
                    return Err(Error::InvalidGenerator(format!(
                        "half_gap must lie in (0, 0.5], got {h}"
                    )));
                }
                let ramp = num::ceil(2.0 * h / *delta) as usize;
                let stay = stay.unwrap_or(ramp / 2);
                let mut arm2 = Vec::with_capacity(horizon);
                // Plateau high, ramp down, plateau low, ramp up, repeat.
                'outer: loop {
                    for &(from, to) in &[(0.5 + h, 0.5 - h), (0.5 - h, 0.5 + h)] {
                        push_plateau(&mut arm2, from, stay, horizon);
                        push_ramp(&mut arm2, from, to, ramp, horizon);
                        if arm2.len() >= horizon {
                            break 'outer;
                        }
                    }
                }
                let means = [alloc::vec![0.5; horizon], arm2];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::MultiDeltaCommonPeriods {
                delta,
                drift_len,
                stay,
                noise,
            } => {
                if *drift_len == 0 {
                    return Err(Error::InvalidGenerator(String::from(
                        "drift_len must be >= 1",
                    )));
                }
                let amp = *delta * *drift_len as f64;
                if 0.5 + amp > 1.0 {
                    return Err(Error::InvalidGenerator(format!(
                        "excursion delta * drift_len = {amp} pushes means above 1"
                    )));
                }
                let mut arm2 = Vec::with_capacity(horizon);
                'outer: loop {
                    for &(from, to) in &[(0.5, 0.5 + amp), (0.5 + amp, 0.5)] {
                        push_ramp(&mut arm2, from, to, *drift_len, horizon);
                        push_plateau(&mut arm2, to, *stay, horizon);
                        if arm2.len() >= horizon {
                            break 'outer;
                        }
                    }
                }
                let means = [alloc::vec![0.5; horizon], arm2];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::MultiDeltaEqualCumulative {
                delta,
                gap,
                wiggle,
                cycle,
                noise,
            } => {
                let low = 0.3;
                if low + gap > 1.0 || *gap <= *wiggle {
                    return Err(Error::InvalidGenerator(format!(
                        "need wiggle < gap <= 0.7, got gap {gap}, wiggle {wiggle}"
                    )));
                }
                if *cycle == 0 {
                    return Err(Error::InvalidGenerator(String::from("cycle must be >= 1")));
                }
                let ramp = if *wiggle == 0.0 {
                    0
                } else {
                    if *delta <= 0.0 {
                        return Err(Error::InvalidGenerator(String::from(
                            "nonzero wiggle needs delta > 0",
                        )));
                    }
                    num::ceil(*wiggle / *delta) as usize
                };
                if 2 * ramp > *cycle {
                    return Err(Error::InvalidGenerator(format!(
                        "cycle {cycle} too short for two ramps of {ramp} steps at delta {delta}"
                    )));
                }
                let plateau_hi = (*cycle - 2 * ramp) / 2;
                let plateau_lo = *cycle - 2 * ramp - plateau_hi;
                let mut arm2 = Vec::with_capacity(horizon);
                while arm2.len() < horizon {
                    push_plateau(&mut arm2, low, plateau_lo, horizon);
                    push_ramp(&mut arm2, low, low + wiggle, ramp, horizon);
                    push_plateau(&mut arm2, low + wiggle, plateau_hi, horizon);
                    push_ramp(&mut arm2, low + wiggle, low, ramp, horizon);
                }
                let means = [alloc::vec![low + gap; horizon], arm2];
                BanditInstance::new(RewardProfile::new(means)?, *delta, *noise)
            }
            GeneratorSpec::LowerBoundNuPrime {
                m,
                epsilon,
                delta,
                noise,
            } => {
                if *m < 2 {
                    return Err(Error::InvalidGenerator(String::from("m must be >= 2")));
                }
                let eps = nu_prime_epsilon(*m, *epsilon);
                if !(0.0..=1.0).contains(&eps) || eps == 0.0 {
                    return Err(Error::InvalidGenerator(format!(
                        "epsilon must lie in (0, 1], got {eps}"
                    )));
                }
                let step = eps / *m as f64;
                let declared = delta.unwrap_or(step);
                if step > declared + DRIFT_TOLERANCE {
                    return Err(Error::InvalidGenerator(format!(
                        "epsilon/m = {step} exceeds declared delta {declared}"
                    )));
                }
                let block = nu_prime_block(*m, eps);
                let arm1 = block.iter().cycle().take(horizon).copied().collect();
                let means = [arm1, alloc::vec![0.5; horizon]];
                BanditInstance::new(RewardProfile::new(means)?, declared, *noise)
            }
        }
    }
}

fn nu_prime_epsilon(m: usize, epsilon: Option<f64>) -> f64 {
    epsilon.unwrap_or_else(|| num::sqrt(1.0 / (4.0 * m as f64)))
}

/// Arm-1 means of a single nu-prime block of length `m`.
pub fn nu_prime_block(m: usize, epsilon: f64) -> Vec<f64> {
    let half = m.div_ceil(2);
    (1..=m)
        .map(|tau| {
            let k = if tau <= half { tau - 1 } else { m - tau };
            0.5 + (k as f64 / m as f64) * epsilon
        })
        .collect()
}

/// Appends `len` copies of `value`, capped at `horizon` total entries.
fn push_plateau(out: &mut Vec<f64>, value: f64, len: usize, horizon: usize) {
    let take = len.min(horizon.saturating_sub(out.len()));
    out.extend(core::iter::repeat_n(value, take));
}

/// Appends a linear ramp from just after `from` to exactly `to` in `len`
/// steps (interpolated, so rounding cannot accumulate across cycles).
fn push_ramp(out: &mut Vec<f64>, from: f64, to: f64, len: usize, horizon: usize) {
    for k in 1..=len {
        if out.len() >= horizon {
            return;
        }
        out.push(from + (to - from) * k as f64 / len as f64);
    }
}

/// Symmetric triangle wave starting at 0 and rising, slope `delta` per step,
/// reflecting at +-amplitude.
fn triangle_wave(amplitude: f64, delta: f64, horizon: usize) -> Vec<f64> {
    let mut wave = Vec::with_capacity(horizon);
    let mut cur = 0.0f64;
    let mut up = true;
    for _ in 0..horizon {
        wave.push(cur);
        if amplitude == 0.0 || delta == 0.0 {
            continue;
        }
        let next = if up { cur + delta } else { cur - delta };
        if next > amplitude {
            cur = amplitude;
            up = false;
        } else if next < -amplitude {
            cur = -amplitude;
            up = true;
        } else {
            cur = next;
        }
    }
    wave
}

fn piecewise_linear(anchors: &[(usize, f64)], horizon: usize) -> Result<Vec<f64>> {
    if anchors.is_empty() {
        return Err(Error::InvalidGenerator(String::from(
            "anchors must be nonempty",
        )));
    }
    for pair in anchors.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::InvalidGenerator(format!(
                "anchor times must be strictly increasing, got {} then {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    if anchors[0].0 < 1 || anchors[anchors.len() - 1].0 > horizon {
        return Err(Error::InvalidGenerator(format!(
            "anchor times must lie in 1..={horizon}"
        )));
    }
    let mut out = Vec::with_capacity(horizon);
    let mut seg = 0;
    for t in 1..=horizon {
        while seg + 1 < anchors.len() && anchors[seg + 1].0 <= t {
            seg += 1;
        }
        let (t0, v0) = anchors[seg];
        let value = if t <= t0 || seg + 1 >= anchors.len() {
            v0
        } else {
            let (t1, v1) = anchors[seg + 1];
            v0 + (v1 - v0) * (t - t0) as f64 / (t1 - t0) as f64
        };
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn stationary(mu1: f64, mu2: f64, horizon: usize) -> BanditInstance {
        GeneratorSpec::Stationary {
            mu: [mu1, mu2],
            delta: 0.0,
            noise: RewardModel::gaussian(),
        }
        .generate(horizon)
        .unwrap()
    }

    #[test]
    fn profile_rejects_mismatched_lengths() {
        let err = RewardProfile::new([vec![0.5, 0.5], vec![0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidProfile(_)));
    }

    #[test]
    fn profile_rejects_out_of_range_means() {
        let err = RewardProfile::new([vec![0.5, 1.2], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidProfile(_)));
        let err = RewardProfile::new([vec![f64::NAN], vec![0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidProfile(_)));
    }

    #[test]
    fn drift_validation_reports_each_violation() {
        let profile =
            RewardProfile::new([vec![0.5, 0.5, 0.9, 0.9], vec![0.1, 0.3, 0.3, 0.3]]).unwrap();
        let report = validate_drift(&profile, 0.05);
        assert!(!report.is_valid());
        assert_eq!(
            report.violations,
            vec![
                DriftViolation {
                    arm: Arm::One,
                    t: 2,
                    change: 0.9 - 0.5
                },
                DriftViolation {
                    arm: Arm::Two,
                    t: 1,
                    change: 0.3 - 0.1
                },
            ]
        );
        assert!(validate_drift(&profile, 0.4).is_valid());
    }

    #[test]
    fn drift_validation_tolerates_rounding_noise() {
        let profile = RewardProfile::new([vec![0.5, 0.5 + 0.1 + 5e-13], vec![0.5, 0.5]]).unwrap();
        assert!(validate_drift(&profile, 0.1).is_valid());
    }

    #[test]
    fn instance_construction_enforces_drift_limit() {
        let profile = RewardProfile::new([vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap();
        let err = BanditInstance::new(profile, 0.1, RewardModel::Bernoulli).unwrap_err();
        match err {
            Error::DriftLimitExceeded {
                violations,
                first_arm,
                first_t,
                ..
            } => {
                assert_eq!((violations, first_arm, first_t), (1, 1, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    #[should_panic(expected = "timestep 11 outside 1..=10")]
    fn mean_rejects_out_of_range_timestep() {
        stationary(0.5, 0.5, 10).mean(Arm::One, 11);
    }

    #[test]
    fn degenerate_bernoulli_means_give_constant_rewards() {
        let inst = stationary(1.0, 0.0, 5);
        let inst =
            BanditInstance::new(inst.profile().clone(), 0.0, RewardModel::Bernoulli).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for t in 1..=5 {
            assert_eq!(inst.sample_reward(Arm::One, t, &mut rng), 1.0);
            assert_eq!(inst.sample_reward(Arm::Two, t, &mut rng), 0.0);
        }
    }

    #[test]
    fn gaussian_sampling_matches_mean_and_is_deterministic() {
        let inst = stationary(0.5, 0.5, 1);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += inst.sample_reward(Arm::One, 1, &mut rng);
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "MC mean {mean} too far from 0.5");

        let draw = |seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..4)
                .map(|_| inst.sample_reward(Arm::One, 1, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn piecewise_linear_interpolates_between_anchors() {
        let spec = GeneratorSpec::PiecewiseLinear {
            anchors: [vec![(1, 0.2), (5, 0.6)], vec![(1, 0.5), (3, 0.5), (5, 0.1)]],
            delta: 0.2,
            noise: RewardModel::gaussian(),
        };
        let inst = spec.generate(6).unwrap();
        let want1 = [0.2, 0.3, 0.4, 0.5, 0.6, 0.6];
        for (t, want) in (1..=6).zip(want1) {
            assert_abs_diff_eq!(inst.mean(Arm::One, t), want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(inst.mean(Arm::Two, 4), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(inst.mean(Arm::Two, 6), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn piecewise_linear_rejects_unsorted_anchors() {
        let spec = GeneratorSpec::PiecewiseLinear {
            anchors: [vec![(3, 0.2), (2, 0.6)], vec![(1, 0.5)]],
            delta: 1.0,
            noise: RewardModel::gaussian(),
        };
        assert!(matches!(spec.generate(5), Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn well_separated_keeps_constant_gap_and_valid_drift() {
        let spec = GeneratorSpec::WellSeparated {
            delta: 1e-3,
            gap: 0.5,
            amplitude: None,
            noise: RewardModel::gaussian(),
        };
        let inst = spec.generate(2000).unwrap();
        for t in 1..=2000 {
            assert_abs_diff_eq!(inst.profile().gap(t), 0.5, epsilon = 1e-12);
        }
        let report = validate_drift(inst.profile(), 1e-3);
        assert!(report.is_valid());
        assert!(report.max_step > 0.0, "wave should actually move");
    }

    #[test]
    fn oscillating_toggles_optimal_arm_and_respects_delta() {
        let spec = GeneratorSpec::Oscillating {
            delta: 0.01,
            half_gap: Some(0.2),
            stay: Some(10),
            noise: RewardModel::gaussian(),
        };
        let inst = spec.generate(500).unwrap();
        assert!(validate_drift(inst.profile(), 0.01).is_valid());
        let mut saw = [false, false];
        for t in 1..=500 {
            saw[inst.profile().optimal_arm(t).index()] = true;
        }
        assert_eq!(saw, [true, true], "optimal arm should toggle");
        // First plateau sits at 0.5 + half_gap.
        assert_abs_diff_eq!(inst.mean(Arm::Two, 1), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(inst.mean(Arm::Two, 10), 0.7, epsilon = 1e-12);
        // Ramp of ceil(0.4 / 0.01) = 40 steps reaches the low plateau.
        assert_abs_diff_eq!(inst.mean(Arm::Two, 50), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn common_periods_excursion_scales_with_delta() {
        for &delta in &[1e-4, 2e-4] {
            let spec = GeneratorSpec::MultiDeltaCommonPeriods {
                delta,
                drift_len: 100,
                stay: 50,
                noise: RewardModel::gaussian(),
            };
            let inst = spec.generate(300).unwrap();
            assert!(validate_drift(inst.profile(), delta).is_valid());
            // Peak of the first excursion, reached after the up-ramp.
            assert_abs_diff_eq!(
                inst.mean(Arm::Two, 100),
                0.5 + delta * 100.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                inst.mean(Arm::Two, 150),
                0.5 + delta * 100.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn equal_cumulative_drift_is_delta_independent() {
        let total = |delta: f64| {
            let spec = GeneratorSpec::MultiDeltaEqualCumulative {
                delta,
                gap: 0.5,
                wiggle: 0.02,
                cycle: 2500,
                noise: RewardModel::gaussian(),
            };
            let inst = spec.generate(10_000).unwrap();
            assert!(validate_drift(inst.profile(), delta).is_valid());
            let means = inst.profile().means(Arm::Two);
            let cum: f64 = means.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
            let max_gap = (1..=10_000)
                .map(|t| inst.profile().gap(t))
                .fold(0.0f64, f64::max);
            (cum, max_gap)
        };
        let (cum_a, gap_a) = total(2e-5);
        let (cum_b, gap_b) = total(8e-5);
        assert_abs_diff_eq!(cum_a, cum_b, epsilon = 1e-9);
        assert_abs_diff_eq!(gap_a, gap_b, epsilon = 1e-12);
        assert_abs_diff_eq!(cum_a, 4.0 * 2.0 * 0.02, epsilon = 1e-9);
    }

    #[test]
    fn nu_prime_endpoints_and_max_step() {
        let m = 8;
        let eps = num::sqrt(1.0 / 32.0);
        let spec = GeneratorSpec::LowerBoundNuPrime {
            m,
            epsilon: Some(eps),
            delta: None,
            noise: RewardModel::Bernoulli,
        };
        let inst = spec.generate(8).unwrap();
        assert_eq!(inst.mean(Arm::One, 1), 0.5);
        assert_eq!(inst.mean(Arm::One, 8), 0.5);
        for t in 1..=8 {
            assert_eq!(inst.mean(Arm::Two, t), 0.5);
        }
        let means = inst.profile().means(Arm::One);
        let max_step = means
            .windows(2)
            .map(|p| (p[1] - p[0]).abs())
            .fold(0.0f64, f64::max);
        assert_abs_diff_eq!(max_step, eps / m as f64, epsilon = 1e-15);
        assert_abs_diff_eq!(inst.drift_limit(), eps / m as f64, epsilon = 1e-15);
    }

    #[test]
    fn nu_prime_tiles_blocks_and_truncates() {
        let spec = GeneratorSpec::LowerBoundNuPrime {
            m: 8,
            epsilon: None,
            delta: None,
            noise: RewardModel::Bernoulli,
        };
        let inst = spec.generate(20).unwrap();
        for t in 1..=4 {
            assert_eq!(inst.mean(Arm::One, t), inst.mean(Arm::One, t + 8));
            assert_eq!(inst.mean(Arm::One, t), inst.mean(Arm::One, t + 16));
        }
        assert_eq!(inst.horizon(), 20);
    }

    #[test]
    fn nu_prime_rejects_delta_below_step() {
        let spec = GeneratorSpec::LowerBoundNuPrime {
            m: 8,
            epsilon: Some(0.2),
            delta: Some(0.2 / 8.0 / 2.0),
            noise: RewardModel::Bernoulli,
        };
        assert!(matches!(spec.generate(8), Err(Error::InvalidGenerator(_))));
    }

    #[test]
    fn nu_prime_odd_block_is_symmetric() {
        let block = nu_prime_block(9, 0.09);
        assert_eq!(block.len(), 9);
        assert_eq!(block[0], 0.5);
        assert_eq!(block[8], 0.5);
        for k in 0..4 {
            assert_abs_diff_eq!(block[k], block[8 - k], epsilon = 1e-15);
        }
        let peak = 0.5 + (4.0 / 9.0) * 0.09;
        assert_abs_diff_eq!(block[4], peak, epsilon = 1e-15);
    }
}
