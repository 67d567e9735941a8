//! Running policies against instances and aggregating replications.
//!
//! A single run is driven by one ChaCha stream seeded from `base_seed +
//! run_index`, consumed by the policy's own randomness and the reward noise
//! in a fixed interleaving (act, sample, observe at each step). Replication
//! results are reduced in run-index order, so a parallel driver that maps
//! indices to runs independently produces bit-identical summaries to the
//! sequential one here.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::instance::{Arm, BanditInstance};

/// A sequential two-armed bandit policy. `act` may draw from the shared run
/// stream; `observe` reports the reward of the arm the simulator pulled.
pub trait Policy {
    fn act(&mut self, t: usize, rng: &mut dyn RngCore) -> Arm;
    fn observe(&mut self, t: usize, arm: Arm, reward: f64);
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn act(&mut self, t: usize, rng: &mut dyn RngCore) -> Arm {
        (**self).act(t, rng)
    }

    fn observe(&mut self, t: usize, arm: Arm, reward: f64) {
        (**self).observe(t, arm, reward)
    }
}

/// Full trajectory of one run, indexed by t - 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub pulls: Vec<Arm>,
    pub rewards: Vec<f64>,
    /// Cumulative dynamic regret: sum over s <= t of the optimal minus the
    /// pulled mean at s.
    pub regret: Vec<f64>,
}

impl RunResult {
    pub fn final_regret(&self) -> f64 {
        *self.regret.last().expect("runs cover at least one step")
    }

    pub fn pull_count(&self, arm: Arm) -> usize {
        self.pulls.iter().filter(|&&a| a == arm).count()
    }
}

/// Plays `policy` through the whole horizon with the given stream.
pub fn run<P, R>(instance: &BanditInstance, policy: &mut P, rng: &mut R) -> RunResult
where
    P: Policy + ?Sized,
    R: RngCore,
{
    let horizon = instance.horizon();
    let mut pulls = Vec::with_capacity(horizon);
    let mut rewards = Vec::with_capacity(horizon);
    let mut regret = Vec::with_capacity(horizon);
    let mut total = 0.0;
    for t in 1..=horizon {
        let arm = policy.act(t, rng);
        let reward = instance.sample_reward(arm, t, rng);
        policy.observe(t, arm, reward);
        total += instance.profile().optimal_mean(t) - instance.mean(arm, t);
        pulls.push(arm);
        rewards.push(reward);
        regret.push(total);
    }
    RunResult {
        pulls,
        rewards,
        regret,
    }
}

/// The stream for run `run_index` of a replication with this base seed.
pub fn run_rng(base_seed: u64, run_index: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(base_seed.wrapping_add(run_index as u64))
}

/// One run of a replication, fully determined by `(base_seed, run_index)`.
pub fn run_indexed<P: Policy>(
    instance: &BanditInstance,
    policy: &mut P,
    base_seed: u64,
    run_index: usize,
) -> RunResult {
    run(instance, policy, &mut run_rng(base_seed, run_index))
}

/// Aggregate statistics over a replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationSummary {
    pub n_runs: usize,
    pub horizon: usize,
    /// Per-run final cumulative regrets, in run-index order.
    pub final_regrets: Vec<f64>,
    pub mean_final_regret: f64,
    /// Population standard deviation of the final regrets.
    pub std_final_regret: f64,
    /// Mean cumulative regret at each step, indexed by t - 1.
    pub mean_regret: Vec<f64>,
    /// Population standard deviation of the cumulative regret at each step.
    pub std_regret: Vec<f64>,
}

impl ReplicationSummary {
    /// Standard error of the mean final regret.
    pub fn stderr_final_regret(&self) -> f64 {
        self.std_final_regret / crate::num::sqrt(self.n_runs as f64)
    }
}

/// Reduces runs in slice order; callers must pass them in run-index order.
pub fn aggregate(results: &[RunResult]) -> ReplicationSummary {
    assert!(!results.is_empty(), "need at least one run");
    let horizon = results[0].regret.len();
    let n = results.len();
    let mut mean_regret = alloc::vec![0.0f64; horizon];
    let mut final_regrets = Vec::with_capacity(n);
    for result in results {
        assert_eq!(result.regret.len(), horizon, "runs must share a horizon");
        for (acc, r) in mean_regret.iter_mut().zip(&result.regret) {
            *acc += r;
        }
        final_regrets.push(result.final_regret());
    }
    for acc in &mut mean_regret {
        *acc /= n as f64;
    }
    let mut std_regret = alloc::vec![0.0f64; horizon];
    for result in results {
        for (acc, (r, m)) in std_regret
            .iter_mut()
            .zip(result.regret.iter().zip(&mean_regret))
        {
            *acc += (r - m) * (r - m);
        }
    }
    for acc in &mut std_regret {
        *acc = crate::num::sqrt(*acc / n as f64);
    }
    let mean = final_regrets.iter().sum::<f64>() / n as f64;
    let var = final_regrets
        .iter()
        .map(|r| (r - mean) * (r - mean))
        .sum::<f64>()
        / n as f64;
    ReplicationSummary {
        n_runs: n,
        horizon,
        final_regrets,
        mean_final_regret: mean,
        std_final_regret: crate::num::sqrt(var),
        mean_regret,
        std_regret,
    }
}

/// Runs `n_runs` independent runs sequentially and aggregates them. A fresh
/// policy is built per run from `make_policy(run_index)`.
pub fn replicate<P, F>(
    instance: &BanditInstance,
    mut make_policy: F,
    n_runs: usize,
    base_seed: u64,
) -> ReplicationSummary
where
    P: Policy,
    F: FnMut(usize) -> P,
{
    assert!(n_runs >= 1, "need at least one run");
    let results: Vec<RunResult> = (0..n_runs)
        .map(|i| run_indexed(instance, &mut make_policy(i), base_seed, i))
        .collect();
    aggregate(&results)
}
