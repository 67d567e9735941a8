//! Subcommand implementations: replication (parallel over runs, results
//! reduced in run-index order so output bytes never depend on the thread
//! count), CSV emission, and the bound/lower-bound reports.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use slowvary_core::baselines::{Rexp3, RoundRobin};
use slowvary_core::bounds::{
    self, change_of_measure_check, instance_dependent_bound, lb_block_bounds, BlockPartition,
};
use slowvary_core::gap::detectable_gap_profile;
use slowvary_core::instance::{validate_drift, BanditInstance, GeneratorSpec, RewardProfile};
use slowvary_core::simulator::{aggregate, run_indexed, Policy, RunResult};
use slowvary_core::snoozeit::{SnoozeIt, Variant};

use crate::config::{with_delta, ExperimentConfig, InstanceSource, PolicySpec};
use crate::files::{
    write_episodes_csv, write_gap_profile_csv, write_runs_csv, write_summary_csv, write_table_csv,
    InstanceDoc,
};

/// Applies SLOWVARY_THREADS to the global rayon pool. Must run before any
/// parallel work; silently keeps the default when the pool already exists.
pub fn apply_thread_env() -> Result<()> {
    if let Ok(raw) = std::env::var("SLOWVARY_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("SLOWVARY_THREADS must be a positive integer, got {raw:?}"))?;
        if n == 0 {
            bail!("SLOWVARY_THREADS must be >= 1");
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Runs `n_runs` seeded replications in parallel and returns them in
/// run-index order.
pub fn par_runs<F>(
    instance: &BanditInstance,
    make_policy: F,
    n_runs: usize,
    base_seed: u64,
) -> Vec<RunResult>
where
    F: Fn(usize) -> Box<dyn Policy + Send> + Sync,
{
    (0..n_runs)
        .into_par_iter()
        .map(|r| {
            let mut policy = make_policy(r);
            run_indexed(instance, &mut policy, base_seed, r)
        })
        .collect()
}

/// Output file names per policy: the registry key, with `_2`, `_3`, …
/// suffixes when the same policy appears more than once.
fn output_names(policies: &[PolicySpec]) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    policies
        .iter()
        .map(|spec| {
            let count = seen.entry(spec.key()).or_insert(0);
            *count += 1;
            if *count == 1 {
                spec.key().to_string()
            } else {
                format!("{}_{}", spec.key(), count)
            }
        })
        .collect()
}

pub fn cmd_validate(path: &Path) -> Result<()> {
    let doc = InstanceDoc::load(path)?;
    let profile = RewardProfile::new(doc.means.clone())?;
    let report = validate_drift(&profile, doc.delta);
    println!(
        "instance {}: T = {}, delta = {}, max step = {}",
        path.display(),
        doc.horizon,
        doc.delta,
        report.max_step
    );
    if report.violations.is_empty() {
        doc.into_instance()?;
        println!("drift check passed");
        Ok(())
    } else {
        let first = &report.violations[0];
        bail!(
            "{} drift violations; first: arm {} changes by {} at t = {}",
            report.violations.len(),
            first.arm.id(),
            first.change,
            first.t
        );
    }
}

pub fn cmd_gen(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<()> {
    let instance = config.load_instance(base_dir)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("instance.json");
    InstanceDoc::from_instance(&instance).save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_gap_profile(instance_path: &Path, out_dir: Option<&Path>) -> Result<()> {
    let instance = InstanceDoc::load(instance_path)?.into_instance()?;
    let lambda = detectable_gap_profile(instance.profile())?;
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("gap_profile.csv");
            let file =
                fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_gap_profile_csv(std::io::BufWriter::new(file), &instance, &lambda)?;
            println!("wrote {}", path.display());
        }
        None => write_gap_profile_csv(std::io::stdout().lock(), &instance, &lambda)?,
    }
    Ok(())
}

/// Scalar bound rows for an instance, used by `run --bound-overlays` and
/// the `bounds` subcommand.
fn bound_rows(instance: &BanditInstance) -> Result<Vec<(String, String)>> {
    let horizon = instance.horizon();
    let delta = instance.drift_limit();
    let mut rows = scale_rows(horizon, delta)?;
    let bound = instance_dependent_bound(instance)?;
    for (j, lambda) in bound.lambda_min.iter().enumerate() {
        rows.push((format!("lambda_min_{j}"), lambda.to_string()));
    }
    rows.push(("instance_bound".into(), bound.value.to_string()));
    Ok(rows)
}

/// Bound rows that depend only on (T, delta).
fn scale_rows(horizon: usize, delta: f64) -> Result<Vec<(String, String)>> {
    let mut rows: Vec<(String, String)> = bounds::named_constants()
        .iter()
        .map(|(name, value)| (name.to_string(), value.to_string()))
        .collect();
    let partition = BlockPartition::new(horizon, delta)?;
    rows.push((
        "min_episode_length".into(),
        bounds::min_episode_length(horizon, delta).to_string(),
    ));
    rows.push((
        "max_episodes".into(),
        bounds::max_episodes(horizon, delta).to_string(),
    ));
    rows.push((
        "minimax_rate_upper".into(),
        bounds::minimax_rate_upper(horizon, delta).to_string(),
    ));
    rows.push((
        "minimax_rate_lower".into(),
        bounds::minimax_rate_lower(horizon, delta).to_string(),
    ));
    rows.push(("block_len".into(), partition.block_len.to_string()));
    rows.push(("n_blocks".into(), partition.n_blocks.to_string()));
    Ok(rows)
}

pub fn cmd_run(config: &ExperimentConfig, base_dir: &Path, out_dir: &Path) -> Result<()> {
    let instance = config.load_instance(base_dir)?;
    fs::create_dir_all(out_dir)?;
    run_policies(config, &instance, out_dir)?;
    if config.bound_overlays {
        let path = out_dir.join("bounds.csv");
        let file = fs::File::create(&path)?;
        write_table_csv(std::io::BufWriter::new(file), &bound_rows(&instance)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Replicates every configured policy on `instance` and writes its summary,
/// run traces, and (for snoozing policies) the run-0 episode log.
fn run_policies(
    config: &ExperimentConfig,
    instance: &BanditInstance,
    out_dir: &Path,
) -> Result<Vec<(String, f64, f64)>> {
    let names = output_names(&config.policies);
    let mut finals = Vec::new();
    for (spec, name) in config.policies.iter().zip(&names) {
        // Build once eagerly so parameter errors surface before any run.
        spec.build(instance)?;
        let runs = par_runs(
            instance,
            |_| spec.build(instance).expect("policy built once already"),
            config.n_runs,
            config.base_seed,
        );
        let summary = aggregate(&runs);
        write_summary_csv(
            &out_dir.join(format!("{name}.csv")),
            &summary,
            config.decimation,
        )?;
        write_runs_csv(
            &out_dir.join(format!("{name}_runs.csv")),
            &runs,
            config.decimation,
        )?;
        if spec.has_episodes() {
            let variant = if matches!(spec, PolicySpec::SnoozeitM) {
                Variant::Modified
            } else {
                Variant::Classic
            };
            let mut policy = SnoozeIt::new(instance.horizon(), instance.drift_limit(), variant)?;
            run_indexed(instance, &mut policy, config.base_seed, 0);
            write_episodes_csv(
                &out_dir.join(format!("{name}_episodes.csv")),
                policy.episodes(),
            )?;
        }
        println!(
            "{name}: mean final regret {} (std {}, n = {})",
            summary.mean_final_regret, summary.std_final_regret, summary.n_runs
        );
        finals.push((
            name.clone(),
            summary.mean_final_regret,
            summary.std_final_regret,
        ));
    }
    Ok(finals)
}

pub fn cmd_sweep(config: &ExperimentConfig, out_dir: &Path, deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        bail!("--deltas needs at least one value");
    }
    let spec = match &config.instance {
        InstanceSource::Inline(spec) => spec,
        InstanceSource::File(_) => bail!("sweep needs an inline generator spec, not a file"),
    };
    fs::create_dir_all(out_dir)?;
    let mut combined: Vec<(String, String)> = Vec::new();
    for &delta in deltas {
        let instance = with_delta(spec, delta).generate(config.horizon)?;
        let sub_dir = out_dir.join(format!("delta_{delta}"));
        fs::create_dir_all(&sub_dir)?;
        for (name, mean, std) in run_policies(config, &instance, &sub_dir)? {
            combined.push((format!("{delta},{name}"), format!("{mean},{std}")));
        }
    }
    let path = out_dir.join("final_regret.csv");
    let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
    writeln!(out, "delta,policy,mean_final_regret,std_final_regret")?;
    for (key, value) in &combined {
        writeln!(out, "{key},{value}")?;
    }
    out.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_bounds(
    instance_path: Option<&Path>,
    horizon: Option<usize>,
    delta: Option<f64>,
    out_dir: Option<&Path>,
) -> Result<()> {
    let rows = match instance_path {
        Some(path) => bound_rows(&InstanceDoc::load(path)?.into_instance()?)?,
        None => {
            let horizon = horizon.context("bounds needs --horizon when no instance is given")?;
            let delta = delta.context("bounds needs --delta when no instance is given")?;
            scale_rows(horizon, delta)?
        }
    };
    write_table_csv(std::io::stdout().lock(), &rows)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let path = dir.join("bounds.csv");
        let file = fs::File::create(&path)?;
        write_table_csv(std::io::BufWriter::new(file), &rows)?;
    }
    Ok(())
}

pub fn cmd_lb_verify(
    m: usize,
    n_runs: usize,
    base_seed: u64,
    out_dir: Option<&Path>,
) -> Result<()> {
    let block = lb_block_bounds(m);
    let mut rows = vec![
        ("epsilon".to_string(), block.epsilon.to_string()),
        ("block_regret_lower".to_string(), block.lower.to_string()),
        ("block_regret_upper".to_string(), block.upper.to_string()),
    ];
    let delta = GeneratorSpec::LowerBoundNuPrime {
        m,
        epsilon: None,
        delta: None,
        noise: slowvary_core::instance::RewardModel::Bernoulli,
    }
    .delta();
    type PolicyFactory = Box<dyn Fn() -> Box<dyn Policy + Send>>;
    let mut all_hold = true;
    let policies: [(&str, PolicyFactory); 3] = [
        ("round_robin", Box::new(|| Box::new(RoundRobin))),
        (
            "rexp3",
            Box::new(move || Box::new(Rexp3::new(m, delta).expect("valid horizon"))),
        ),
        (
            "snoozeit",
            Box::new(move || {
                Box::new(SnoozeIt::new(m, delta, Variant::Classic).expect("valid horizon"))
            }),
        ),
    ];
    for (name, make) in &policies {
        let report = change_of_measure_check(m, n_runs, base_seed, |_| make())?;
        all_hold &= report.holds;
        rows.push((format!("{name}_kl_cost"), report.lhs.to_string()));
        rows.push((format!("{name}_kl_bound"), report.rhs.to_string()));
        rows.push((format!("{name}_holds"), report.holds.to_string()));
    }
    write_table_csv(std::io::stdout().lock(), &rows)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let path = dir.join("lb_verify.csv");
        let file = fs::File::create(&path)?;
        write_table_csv(std::io::BufWriter::new(file), &rows)?;
    }
    if !all_hold {
        bail!("change-of-measure inequality violated; see report");
    }
    Ok(())
}

/// Resolved output directory: flag overrides config, config overrides the
/// default `out/` next to the current directory.
pub fn resolve_out_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}
