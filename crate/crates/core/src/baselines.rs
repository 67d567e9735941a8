//! Baseline policies: restarting and drift-regularised exponential-weights
//! schemes, a sliding-window UCB, and the non-learning references (true-mean
//! oracle, fixed arm, round robin).
//!
//! The exponential-weights baselines clamp observed rewards into [0, 1]
//! before importance weighting, so Gaussian noise cannot blow up the weight
//! updates.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use rand::{Rng, RngCore};

use crate::instance::{Arm, BanditInstance};
use crate::num;
use crate::simulator::Policy;
use crate::{Error, Result};

/// Weights are divided by their maximum once it exceeds this, keeping the
/// exponential updates inside f64 range without changing the ratios
/// meaningfully.
const RENORM_LIMIT: f64 = 1e12;

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn renorm(weights: &mut [f64; 2]) {
    let max = weights[0].max(weights[1]);
    if max > RENORM_LIMIT {
        weights[0] /= max;
        weights[1] /= max;
    }
}

/// Probability of arm 1 under exponential weights mixed with uniform
/// exploration: `(1 - gamma) w_1 / (w_1 + w_2) + gamma / 2`.
fn mixed_prob(weights: &[f64; 2], gamma: f64) -> f64 {
    (1.0 - gamma) * weights[0] / (weights[0] + weights[1]) + gamma / 2.0
}

/// Exponential weights restarted on a fixed batch schedule. The batch
/// length balances learning speed against the drift budget `delta` per
/// step; with `delta = 0` the whole horizon is one batch.
pub struct Rexp3 {
    batch_len: usize,
    gamma: f64,
    weights: [f64; 2],
    batch_start: usize,
    probs: [f64; 2],
}

impl Rexp3 {
    pub fn new(horizon: usize, delta: f64) -> Result<Rexp3> {
        if horizon == 0 {
            return Err(Error::InvalidArgument(format!(
                "horizon must be >= 1, got {horizon}"
            )));
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "drift limit must be finite and >= 0, got {delta}"
            )));
        }
        // Delta_T = ceil((2 ln 2)^(1/3) delta^(-2/3)); zero drift degenerates
        // to a single batch spanning the horizon. The learning rate is tied
        // to Delta_T itself, which may exceed the horizon at tiny drift.
        let raw = if delta == 0.0 {
            horizon as f64
        } else {
            num::ceil(num::cbrt(2.0 * LN_2) * num::powf(delta, -2.0 / 3.0))
        };
        let gamma = num::sqrt(2.0 * LN_2 / ((E - 1.0) * raw)).min(1.0);
        Ok(Rexp3::with_params(raw as usize, gamma))
    }

    pub fn with_params(batch_len: usize, gamma: f64) -> Rexp3 {
        assert!(batch_len >= 1, "batch length must be >= 1");
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
        Rexp3 {
            batch_len,
            gamma,
            weights: [1.0, 1.0],
            batch_start: 1,
            probs: [0.5, 0.5],
        }
    }

    pub fn batch_len(&self) -> usize {
        self.batch_len
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> [f64; 2] {
        self.weights
    }
}

impl Policy for Rexp3 {
    fn act(&mut self, t: usize, rng: &mut dyn RngCore) -> Arm {
        if t - self.batch_start >= self.batch_len {
            self.batch_start = t;
            self.weights = [1.0, 1.0];
        }
        let p1 = mixed_prob(&self.weights, self.gamma);
        self.probs = [p1, 1.0 - p1];
        if rng.gen::<f64>() < p1 {
            Arm::One
        } else {
            Arm::Two
        }
    }

    fn observe(&mut self, _t: usize, arm: Arm, reward: f64) {
        let x = clamp01(reward) / self.probs[arm.index()];
        self.weights[arm.index()] *= num::exp(self.gamma * x / 2.0);
        renorm(&mut self.weights);
    }
}

/// Exponential weights with a per-step uniform-sharing term, so old arms
/// can recover after the means drift. The learning rate grows with the
/// drift budget but never falls below 1/sqrt(T), which keeps the policy
/// learning on stationary instances.
pub struct ExpS {
    alpha: f64,
    gamma: f64,
    weights: [f64; 2],
    probs: [f64; 2],
}

impl ExpS {
    pub fn new(horizon: usize, delta: f64) -> Result<ExpS> {
        if horizon == 0 {
            return Err(Error::InvalidArgument(format!(
                "horizon must be >= 1, got {horizon}"
            )));
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "drift limit must be finite and >= 0, got {delta}"
            )));
        }
        let t = horizon as f64;
        let raw = num::cbrt(2.0 * num::ln(2.0 * t) * delta / ((E - 1.0) * (E - 1.0)));
        let gamma = raw.clamp(1.0 / num::sqrt(t), 1.0);
        Ok(ExpS::with_params(1.0 / t, gamma))
    }

    pub fn with_params(alpha: f64, gamma: f64) -> ExpS {
        assert!(alpha >= 0.0, "sharing rate must be >= 0");
        assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
        ExpS {
            alpha,
            gamma,
            weights: [1.0, 1.0],
            probs: [0.5, 0.5],
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> [f64; 2] {
        self.weights
    }
}

impl Policy for ExpS {
    fn act(&mut self, _t: usize, rng: &mut dyn RngCore) -> Arm {
        let p1 = mixed_prob(&self.weights, self.gamma);
        self.probs = [p1, 1.0 - p1];
        if rng.gen::<f64>() < p1 {
            Arm::One
        } else {
            Arm::Two
        }
    }

    fn observe(&mut self, _t: usize, arm: Arm, reward: f64) {
        let x = clamp01(reward) / self.probs[arm.index()];
        let share = E * self.alpha / 2.0 * (self.weights[0] + self.weights[1]);
        self.weights[arm.index()] *= num::exp(self.gamma * x / 2.0);
        self.weights[0] += share;
        self.weights[1] += share;
        renorm(&mut self.weights);
    }
}

/// UCB over a sliding window that grows like `lambda_w * t^alpha`. Because
/// the window start `t - tau(t) + 1` need not be monotone in `t` for large
/// `lambda_w`, the policy keeps full per-arm pull histories and locates the
/// window boundary by binary search instead of discarding old pulls.
pub struct SwUcbSharp {
    alpha: f64,
    lambda_w: f64,
    /// Pull timestamps per arm, increasing.
    times: [Vec<usize>; 2],
    /// Reward prefix sums per arm; sums[a][k] totals the first k pulls.
    sums: [Vec<f64>; 2],
}

impl SwUcbSharp {
    pub const DEFAULT_ALPHA: f64 = 0.8;
    pub const DEFAULT_LAMBDA: f64 = 1.0;

    pub fn new(alpha: f64, lambda_w: f64) -> Result<SwUcbSharp> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "window exponent must lie in (0, 1], got {alpha}"
            )));
        }
        if !lambda_w.is_finite() || lambda_w <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "window scale must be finite and > 0, got {lambda_w}"
            )));
        }
        Ok(SwUcbSharp {
            alpha,
            lambda_w,
            times: [Vec::new(), Vec::new()],
            sums: [alloc::vec![0.0], alloc::vec![0.0]],
        })
    }

    /// Window length at time `t`: `min(t, ceil(lambda_w * t^alpha))`.
    pub fn window_len(&self, t: usize) -> usize {
        let raw = num::ceil(self.lambda_w * num::powf(t as f64, self.alpha)) as usize;
        raw.min(t)
    }

    /// Upper index of `arm` at time `t` over pulls inside the window
    /// `[start, t - 1]`; infinite when the window holds no pull.
    fn index(&self, arm: Arm, t: usize, start: usize) -> f64 {
        let times = &self.times[arm.index()];
        let first = times.partition_point(|&s| s < start);
        let n = times.len() - first;
        if n == 0 {
            return f64::INFINITY;
        }
        let sums = &self.sums[arm.index()];
        let mean = (sums[times.len()] - sums[first]) / n as f64;
        mean + num::sqrt((1.0 + self.alpha) * num::ln(t as f64) / n as f64)
    }
}

impl Policy for SwUcbSharp {
    fn act(&mut self, t: usize, _rng: &mut dyn RngCore) -> Arm {
        let start = t + 1 - self.window_len(t);
        let i1 = self.index(Arm::One, t, start);
        let i2 = self.index(Arm::Two, t, start);
        if i1 >= i2 {
            Arm::One
        } else {
            Arm::Two
        }
    }

    fn observe(&mut self, t: usize, arm: Arm, reward: f64) {
        let i = arm.index();
        self.times[i].push(t);
        let total = *self.sums[i].last().expect("prefix sums start at 0");
        self.sums[i].push(total + reward);
    }
}

/// Plays the arm with the larger true mean at every step (ties to arm 1).
pub struct Oracle {
    choices: Vec<Arm>,
}

impl Oracle {
    pub fn new(instance: &BanditInstance) -> Oracle {
        let choices = (1..=instance.horizon())
            .map(|t| instance.profile().optimal_arm(t))
            .collect();
        Oracle { choices }
    }
}

impl Policy for Oracle {
    fn act(&mut self, t: usize, _rng: &mut dyn RngCore) -> Arm {
        self.choices[t - 1]
    }

    fn observe(&mut self, _t: usize, _arm: Arm, _reward: f64) {}
}

/// Always plays the same arm.
pub struct FixedArm(pub Arm);

impl Policy for FixedArm {
    fn act(&mut self, _t: usize, _rng: &mut dyn RngCore) -> Arm {
        self.0
    }

    fn observe(&mut self, _t: usize, _arm: Arm, _reward: f64) {}
}

/// Arm 1 at odd steps, arm 2 at even steps.
pub struct RoundRobin;

impl Policy for RoundRobin {
    fn act(&mut self, t: usize, _rng: &mut dyn RngCore) -> Arm {
        if t % 2 == 1 {
            Arm::One
        } else {
            Arm::Two
        }
    }

    fn observe(&mut self, _t: usize, _arm: Arm, _reward: f64) {}
}
