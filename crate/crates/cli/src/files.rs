//! On-disk formats: the instance JSON document and hand-rolled CSV writers
//! (all fields are numeric, so no quoting is ever needed).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use slowvary_core::instance::{Arm, BanditInstance, RewardModel, RewardProfile};
use slowvary_core::simulator::{ReplicationSummary, RunResult};
use slowvary_core::snoozeit::EpisodeRecord;

/// The instance file format: horizon, drift limit, noise model, and the
/// full per-arm mean tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub delta: f64,
    pub noise: RewardModel,
    pub means: [Vec<f64>; 2],
}

impl InstanceDoc {
    pub fn from_instance(instance: &BanditInstance) -> InstanceDoc {
        InstanceDoc {
            horizon: instance.horizon(),
            delta: instance.drift_limit(),
            noise: instance.noise(),
            means: [
                instance.profile().means(Arm::One).to_vec(),
                instance.profile().means(Arm::Two).to_vec(),
            ],
        }
    }

    pub fn into_instance(self) -> Result<BanditInstance> {
        Ok(BanditInstance::new(
            RewardProfile::new(self.means)?,
            self.delta,
            self.noise,
        )?)
    }

    pub fn load(path: &Path) -> Result<InstanceDoc> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading instance {}", path.display()))?;
        let doc: InstanceDoc = serde_json::from_str(&text)
            .with_context(|| format!("invalid instance file {}", path.display()))?;
        if doc.means[0].len() != doc.horizon {
            anyhow::bail!(
                "instance file {} declares T = {} but lists {} means",
                path.display(),
                doc.horizon,
                doc.means[0].len()
            );
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("instance doc serializes");
        fs::write(path, text + "\n").with_context(|| format!("writing instance {}", path.display()))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// Steps kept in decimated output: every multiple of `decimation` up to T.
fn decimated(horizon: usize, decimation: usize) -> impl Iterator<Item = usize> {
    (1..=horizon / decimation).map(move |k| k * decimation)
}

/// Columns: t, mean_regret, std_regret.
pub fn write_summary_csv(
    path: &Path,
    summary: &ReplicationSummary,
    decimation: usize,
) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "t,mean_regret,std_regret")?;
    for t in decimated(summary.horizon, decimation) {
        writeln!(
            out,
            "{t},{},{}",
            summary.mean_regret[t - 1],
            summary.std_regret[t - 1]
        )?;
    }
    Ok(out.flush()?)
}

/// Columns: run_id, t, arm, cum_regret.
pub fn write_runs_csv(path: &Path, runs: &[RunResult], decimation: usize) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "run_id,t,arm,cum_regret")?;
    for (run_id, run) in runs.iter().enumerate() {
        for t in decimated(run.regret.len(), decimation) {
            writeln!(
                out,
                "{run_id},{t},{},{}",
                run.pulls[t - 1].id(),
                run.regret[t - 1]
            )?;
        }
    }
    Ok(out.flush()?)
}

fn opt<T: std::fmt::Display>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Columns: i, t_i, g_i, tau_i, lambda_hat, w, buf, t_next — episode index,
/// start step, detection step, detection offset, estimated gap, window,
/// buffer length, and the next episode's start. Empty fields mean the
/// quantity never materialized (no detection, or no later episode).
pub fn write_episodes_csv(path: &Path, episodes: &[EpisodeRecord]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "i,t_i,g_i,tau_i,lambda_hat,w,buf,t_next")?;
    for (k, ep) in episodes.iter().enumerate() {
        let t_next = episodes.get(k + 1).map(|next| next.t_start);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            ep.index,
            ep.t_start,
            opt(ep.detected_at),
            opt(ep.detected_at.map(|d| d - ep.t_start)),
            opt(ep.lambda_hat),
            opt(ep.window),
            opt(ep.buffer),
            opt(t_next)
        )?;
    }
    Ok(out.flush()?)
}

/// Columns: t, gap, detectable_gap.
pub fn write_gap_profile_csv<W: Write>(
    mut out: W,
    instance: &BanditInstance,
    lambda: &[f64],
) -> Result<()> {
    writeln!(out, "t,gap,detectable_gap")?;
    for (i, l) in lambda.iter().enumerate() {
        let t = i + 1;
        writeln!(out, "{t},{},{l}", instance.profile().gap(t))?;
    }
    Ok(out.flush()?)
}

/// Two-column name/value table, also used for bound overlays.
pub fn write_table_csv<W: Write>(mut out: W, rows: &[(String, String)]) -> Result<()> {
    writeln!(out, "name,value")?;
    for (name, value) in rows {
        writeln!(out, "{name},{value}")?;
    }
    Ok(out.flush()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use slowvary_core::instance::GeneratorSpec;
    use tempfile::tempdir;

    fn small_instance() -> BanditInstance {
        GeneratorSpec::Stationary {
            mu: [0.75, 0.25],
            delta: 0.01,
            noise: RewardModel::Bernoulli,
        }
        .generate(6)
        .unwrap()
    }

    #[test]
    fn instance_doc_round_trips_through_disk() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let doc = InstanceDoc::from_instance(&small_instance());
        doc.save(&path).unwrap();
        let loaded = InstanceDoc::load(&path).unwrap();
        assert_eq!(doc, loaded);
        let inst = loaded.into_instance().unwrap();
        assert_eq!(inst.horizon(), 6);
        assert_eq!(inst.mean(Arm::One, 3), 0.75);
    }

    #[test]
    fn instance_doc_rejects_length_mismatch_and_unknown_keys() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"T": 3, "delta": 0.0, "noise": {"kind": "bernoulli"},
               "means": [[0.5], [0.5]]}"#,
        )
        .unwrap();
        assert!(InstanceDoc::load(&path)
            .unwrap_err()
            .to_string()
            .contains("T = 3"));
        fs::write(
            &path,
            r#"{"T": 1, "delta": 0.0, "noise": {"kind": "bernoulli"},
               "means": [[0.5], [0.5]], "extra": 1}"#,
        )
        .unwrap();
        let err = format!("{:#}", InstanceDoc::load(&path).unwrap_err());
        assert!(err.contains("extra"), "{err}");
    }

    #[test]
    fn summary_csv_has_header_and_decimated_rows() {
        let runs = vec![RunResult {
            pulls: vec![Arm::One; 10],
            rewards: vec![1.0; 10],
            regret: (1..=10).map(|t| t as f64).collect(),
        }];
        let summary = slowvary_core::simulator::aggregate(&runs);
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_summary_csv(&path, &summary, 3).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,mean_regret,std_regret");
        assert_eq!(lines.len(), 1 + 10 / 3);
        assert_eq!(lines[1], "3,3,0");
        assert_eq!(lines[3], "9,9,0");
    }

    #[test]
    fn runs_csv_lists_every_run_in_order() {
        let mk = |offset: f64| RunResult {
            pulls: vec![Arm::One, Arm::Two],
            rewards: vec![0.0; 2],
            regret: vec![offset, offset + 0.5],
        };
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_runs_csv(&path, &[mk(0.0), mk(1.0)], 1).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "run_id,t,arm,cum_regret\n0,1,1,0\n0,2,2,0.5\n1,1,1,1\n1,2,2,1.5\n"
        );
    }

    #[test]
    fn episode_csv_leaves_absent_fields_empty() {
        let open = EpisodeRecord {
            index: 2,
            t_start: 40,
            detected_at: None,
            window: None,
            lambda_hat: None,
            better: None,
            buffer: None,
            snooze_end: None,
            t_end: Some(100),
        };
        let detected = EpisodeRecord {
            index: 1,
            t_start: 1,
            detected_at: Some(21),
            window: Some(10),
            lambda_hat: Some(0.5),
            better: Some(Arm::One),
            buffer: Some(f64::INFINITY),
            snooze_end: None,
            t_end: Some(39),
        };
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_episodes_csv(&path, &[detected, open]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,t_i,g_i,tau_i,lambda_hat,w,buf,t_next");
        assert_eq!(lines[1], "1,1,21,20,0.5,10,inf,40");
        assert_eq!(lines[2], "2,40,,,,,,");
    }

    #[test]
    fn gap_profile_csv_pairs_true_and_detectable_gaps() {
        let inst = small_instance();
        let lambda = slowvary_core::gap::detectable_gap_profile(inst.profile()).unwrap();
        let mut buf = Vec::new();
        write_gap_profile_csv(&mut buf, &inst, &lambda).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,gap,detectable_gap");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("1,0.5,"));
    }
}
