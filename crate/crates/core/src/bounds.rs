//! Regret bounds, horizon partitions, divergence helpers and Monte-Carlo
//! checks of the concentration and change-of-measure arguments behind them.

use alloc::format;
use alloc::vec::Vec;

use crate::gap;
use crate::instance::{Arm, BanditInstance, GeneratorSpec, RewardModel};
use crate::num;
use crate::simulator::{run_indexed, run_rng, Policy};
use crate::snoozeit::radius;
use crate::{Error, Result};

/// Scale factor inside detection windows: certifying a gap of `lambda`
/// takes `ceil(C0 ln T / lambda^2)` samples.
pub const C0: f64 = 144.0;

/// Scale factor in the minimum statistical-test window, `ceil(C1 ln T)`.
pub const C1: f64 = 72.0;

/// Per-episode regret factor in the instance-dependent bound.
pub const C2: f64 = 144.0;

/// Block-length factor in the drift-based horizon partition: blocks are
/// `C3 * delta^(-2/3) (ln T)^(1/3)` steps long.
pub const C3: f64 = 1.5874010519681994; // 2^(2/3)

/// Episode-length factor: every episode runs at least `C4 ln T` steps.
pub const C4: f64 = 72.0;

/// Factor on the additive episode-count term.
pub const C5: f64 = 1.0;

/// Factor on the per-block log term in the instance-dependent bound.
pub const C6: f64 = 144.0;

/// Additive slack in the instance-dependent bound.
pub const C7: f64 = 2.0;

/// Factor on the block-count term in the instance-dependent bound.
pub const C8: f64 = 2.0;

/// All bound constants by name, for reporting.
pub fn named_constants() -> [(&'static str, f64); 9] {
    [
        ("c0", C0),
        ("c1", C1),
        ("c2", C2),
        ("c3", C3),
        ("c4", C4),
        ("c5", C5),
        ("c6", C6),
        ("c7", C7),
        ("c8", C8),
    ]
}

fn validate_horizon_delta(horizon: usize, delta: f64) -> Result<()> {
    if horizon < 2 {
        return Err(Error::InvalidArgument(format!(
            "horizon must be >= 2, got {horizon}"
        )));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "drift limit must be finite and >= 0, got {delta}"
        )));
    }
    Ok(())
}

/// Shortest episode the snoozing policy can produce on a drift-`delta`
/// instance: `C3 * delta^(-2/3) (ln T)^(1/3)`. Infinite when `delta = 0`.
pub fn min_episode_length(horizon: usize, delta: f64) -> f64 {
    C3 * num::powf(delta, -2.0 / 3.0) * num::cbrt(num::ln(horizon as f64))
}

/// Largest possible number of episodes over the horizon:
/// `T delta^(2/3) / (C3 (ln T)^(1/3))`. Zero when `delta = 0`.
pub fn max_episodes(horizon: usize, delta: f64) -> f64 {
    horizon as f64 * num::powf(delta, 2.0 / 3.0) / (C3 * num::cbrt(num::ln(horizon as f64)))
}

/// Worst-case regret rate over drift-`delta` instances, including the
/// logarithmic factor: `T delta^(1/3) (ln T)^(1/3)`.
pub fn minimax_rate_upper(horizon: usize, delta: f64) -> f64 {
    horizon as f64 * num::cbrt(delta) * num::cbrt(num::ln(horizon as f64))
}

/// Log-free worst-case rate `T delta^(1/3)`, matched by the lower bound.
pub fn minimax_rate_lower(horizon: usize, delta: f64) -> f64 {
    horizon as f64 * num::cbrt(delta)
}

/// Horizon split into blocks of `min(T, C3 delta^(-2/3) (ln T)^(1/3))`
/// steps. Block lengths are real-valued; block membership comes from
/// dividing the 0-based step index by the length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPartition {
    pub horizon: usize,
    pub block_len: f64,
    pub n_blocks: usize,
}

impl BlockPartition {
    pub fn new(horizon: usize, delta: f64) -> Result<BlockPartition> {
        validate_horizon_delta(horizon, delta)?;
        let block_len = min_episode_length(horizon, delta).min(horizon as f64);
        let n_blocks = num::ceil(horizon as f64 / block_len) as usize;
        Ok(BlockPartition {
            horizon,
            block_len,
            n_blocks,
        })
    }

    /// 0-based block index of timestep `t`.
    pub fn block_of(&self, t: usize) -> usize {
        assert!(
            t >= 1 && t <= self.horizon,
            "timestep {t} outside 1..={}",
            self.horizon
        );
        (((t - 1) as f64 / self.block_len) as usize).min(self.n_blocks - 1)
    }
}

/// Instance-dependent regret bound together with its ingredients.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceBound {
    pub n_blocks: usize,
    pub block_len: f64,
    /// Smallest detectable gap inside each block.
    pub lambda_min: Vec<f64>,
    pub value: f64,
}

/// Evaluates `C8 m + C6 ln T sum_j 1 / lambda_min(j) + C7` over the drift
/// partition of the instance, with `lambda_min(j)` the minimum of the
/// detectable gap profile on block `j`.
pub fn instance_dependent_bound(instance: &BanditInstance) -> Result<InstanceBound> {
    let horizon = instance.horizon();
    let partition = BlockPartition::new(horizon, instance.drift_limit())?;
    let lambda = gap::detectable_gap_profile(instance.profile())?;
    let mut lambda_min = alloc::vec![f64::INFINITY; partition.n_blocks];
    for t in 1..=horizon {
        let j = partition.block_of(t);
        if lambda[t - 1] < lambda_min[j] {
            lambda_min[j] = lambda[t - 1];
        }
    }
    let inv_sum: f64 = lambda_min.iter().map(|l| 1.0 / l).sum();
    let value = C8 * partition.n_blocks as f64 + C6 * num::ln(horizon as f64) * inv_sum + C7;
    Ok(InstanceBound {
        n_blocks: partition.n_blocks,
        block_len: partition.block_len,
        lambda_min,
        value,
    })
}

/// KL divergence between Bernoulli distributions with success
/// probabilities `p` and `q`, with the usual conventions: zero when
/// `p == q`, infinite when `q` is deterministic and `p` is not.
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q),
        "probabilities must lie in [0, 1], got {p} and {q}"
    );
    if p == q {
        return 0.0;
    }
    let side = |p: f64, q: f64| {
        if p == 0.0 {
            0.0
        } else if q == 0.0 {
            f64::INFINITY
        } else {
            p * num::ln(p / q)
        }
    };
    side(p, q) + side(1.0 - p, 1.0 - q)
}

/// Regret bounds for one block of the worst-case tent construction with
/// `m` steps and peak `epsilon = sqrt(1 / 4m)`: any policy loses at least
/// `(sqrt(m) - 8 / sqrt(m)) / 64` (clipped at zero) and at most
/// `sqrt(m) / 2` on the block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockRegretBounds {
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn lb_block_bounds(m: usize) -> BlockRegretBounds {
    assert!(m >= 1, "block length must be >= 1");
    let root = num::sqrt(m as f64);
    BlockRegretBounds {
        epsilon: num::sqrt(1.0 / (4.0 * m as f64)),
        lower: ((root - 8.0 / root) / 64.0).max(0.0),
        upper: root / 2.0,
    }
}

/// Outcome of the empirical change-of-measure check on one tent block.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeOfMeasureReport {
    pub m: usize,
    pub n_runs: usize,
    /// Mean over baseline runs of the trajectory KL cost
    /// `sum_t KL(base_arm(t), tent_arm(t))` of the pulled arms.
    pub lhs: f64,
    pub lhs_se: f64,
    /// Mean arm-1 pull fractions under the baseline and tent instances.
    pub z_base: f64,
    pub z_tent: f64,
    /// `kl(z_base, z_tent)`, the data-processing lower bound on the cost.
    pub rhs: f64,
    pub rhs_se: f64,
    /// Whether `lhs + 3 (lhs_se + rhs_se) >= rhs`.
    pub holds: bool,
}

/// Verifies, by simulation, the inequality behind the regret lower bound:
/// the KL cost a policy pays on a flat block bounds how differently it can
/// behave on the tent block. Runs `policy` `n_runs` times on the flat
/// instance (seeds `base_seed + 0..n`) and on the tent instance (seeds
/// offset by `n_runs`), then compares the trajectory KL cost against the
/// Bernoulli KL of the arm-1 pull fractions.
pub fn change_of_measure_check<P, F>(
    m: usize,
    n_runs: usize,
    base_seed: u64,
    mut make_policy: F,
) -> Result<ChangeOfMeasureReport>
where
    P: Policy,
    F: FnMut(usize) -> P,
{
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m must be >= 2, got {m}")));
    }
    if n_runs < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n_runs >= 2, got {n_runs}"
        )));
    }
    let tent = GeneratorSpec::LowerBoundNuPrime {
        m,
        epsilon: None,
        delta: None,
        noise: RewardModel::Bernoulli,
    }
    .generate(m)?;
    let base = GeneratorSpec::Stationary {
        mu: [0.5, 0.5],
        delta: tent.drift_limit(),
        noise: RewardModel::Bernoulli,
    }
    .generate(m)?;
    // Arm 2 agrees between the instances, so only arm-1 pulls cost KL.
    let kl_arm1: Vec<f64> = (1..=m)
        .map(|t| kl_bernoulli(0.5, tent.mean(Arm::One, t)))
        .collect();

    let mut costs = Vec::with_capacity(n_runs);
    let mut z_base_samples = Vec::with_capacity(n_runs);
    for r in 0..n_runs {
        let result = run_indexed(&base, &mut make_policy(r), base_seed, r);
        let cost: f64 = result
            .pulls
            .iter()
            .enumerate()
            .filter(|(_, &arm)| arm == Arm::One)
            .map(|(i, _)| kl_arm1[i])
            .sum();
        costs.push(cost);
        z_base_samples.push(result.pull_count(Arm::One) as f64 / m as f64);
    }
    let mut z_tent_samples = Vec::with_capacity(n_runs);
    for r in 0..n_runs {
        let result = run_indexed(&tent, &mut make_policy(n_runs + r), base_seed, n_runs + r);
        z_tent_samples.push(result.pull_count(Arm::One) as f64 / m as f64);
    }

    let mean_se = |xs: &[f64]| {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        (mean, num::sqrt(var / n))
    };
    let (lhs, lhs_se) = mean_se(&costs);
    let (z_base, z_base_se) = mean_se(&z_base_samples);
    let (z_tent, z_tent_se) = mean_se(&z_tent_samples);
    let rhs = kl_bernoulli(z_base, z_tent);
    let interior = |z: f64| z > 0.0 && z < 1.0;
    let rhs_se = if interior(z_base) && interior(z_tent) && z_base != z_tent {
        let d_p = num::ln(z_base / z_tent) - num::ln((1.0 - z_base) / (1.0 - z_tent));
        let d_q = (z_tent - z_base) / (z_tent * (1.0 - z_tent));
        num::sqrt(d_p * d_p * z_base_se * z_base_se + d_q * d_q * z_tent_se * z_tent_se)
    } else {
        0.0
    };
    Ok(ChangeOfMeasureReport {
        m,
        n_runs,
        lhs,
        lhs_se,
        z_base,
        z_tent,
        rhs,
        rhs_se,
        holds: lhs + 3.0 * (lhs_se + rhs_se) >= rhs,
    })
}

/// Prefix of the horizon scanned by default when estimating the good-event
/// probability; the scan is quadratic in this length.
pub const DEFAULT_GOOD_EVENT_CAP: usize = 2000;

/// Monte-Carlo estimate of how often windowed means escape their
/// confidence radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodEventEstimate {
    pub horizon: usize,
    /// Steps actually scanned (capped prefix of the horizon).
    pub scanned: usize,
    pub n_runs: usize,
    pub violations: usize,
    pub probability: f64,
    /// Union-bound target `2 / T`.
    pub bound: f64,
}

/// Estimates the probability that some windowed empirical mean deviates
/// from the matching windowed true mean by at least `r(w) =
/// sqrt(2 ln T / w)`. Samples are placed on the alternating-pull pattern:
/// the `w` samples of an arm ending at step `t` sit at `t, t-2, ...,
/// t-2(w-1)`, for every `t` up to the cap and every `w <= t/2`. Each run
/// draws a full reward table and counts at most one violation.
pub fn estimate_good_event_probability(
    instance: &BanditInstance,
    n_runs: usize,
    base_seed: u64,
    t_cap: Option<usize>,
) -> GoodEventEstimate {
    assert!(n_runs >= 1, "need at least one run");
    let horizon = instance.horizon();
    let scanned = t_cap.unwrap_or(DEFAULT_GOOD_EVENT_CAP).min(horizon);
    let ln_t = num::ln(horizon as f64);
    let radii: Vec<f64> = (0..=scanned / 2)
        .map(|w| {
            if w == 0 {
                f64::INFINITY
            } else {
                radius(w, ln_t)
            }
        })
        .collect();
    // Parity-chain prefix sums of the true means: entry t accumulates
    // mu_a(s) over s <= t with s = t (mod 2).
    let mut true_chain = [alloc::vec![0.0; scanned + 1], alloc::vec![0.0; scanned + 1]];
    for t in 1..=scanned {
        for arm in Arm::BOTH {
            let prev = if t >= 2 {
                true_chain[arm.index()][t - 2]
            } else {
                0.0
            };
            true_chain[arm.index()][t] = prev + instance.mean(arm, t);
        }
    }
    let mut violations = 0;
    for r in 0..n_runs {
        let mut rng = run_rng(base_seed, r);
        let mut emp_chain = [alloc::vec![0.0; scanned + 1], alloc::vec![0.0; scanned + 1]];
        for t in 1..=scanned {
            for arm in Arm::BOTH {
                let prev = if t >= 2 {
                    emp_chain[arm.index()][t - 2]
                } else {
                    0.0
                };
                emp_chain[arm.index()][t] = prev + instance.sample_reward(arm, t, &mut rng);
            }
        }
        'run: for t in 1..=scanned {
            for arm in Arm::BOTH {
                let emp = &emp_chain[arm.index()];
                let truth = &true_chain[arm.index()];
                #[allow(clippy::needless_range_loop)]
                for w in 1..=t / 2 {
                    let lo = t - 2 * w;
                    let emp_mean = (emp[t] - emp[lo]) / w as f64;
                    let true_mean = (truth[t] - truth[lo]) / w as f64;
                    if num::abs(emp_mean - true_mean) >= radii[w] {
                        violations += 1;
                        break 'run;
                    }
                }
            }
        }
    }
    GoodEventEstimate {
        horizon,
        scanned,
        n_runs,
        violations,
        probability: violations as f64 / n_runs as f64,
        bound: 2.0 / horizon as f64,
    }
}
