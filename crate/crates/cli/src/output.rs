//! Result files: the per-episode CSV, the per-fleet-size aggregate CSV and
//! the run manifest. Floats are written with `f64`'s shortest round-trip
//! formatting, so rerunning the same seed produces byte-identical files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use orbitee_core::config::ScenarioConfig;
use orbitee_core::harness::ExperimentRow;

use crate::config_file;

pub const EPISODE_HEADER: &str = "fleet_size,episode,policy,seed,total_throughput_bits,\
total_energy_J,ee_bits_per_J,norm_ee,norm_throughput,norm_energy";

pub const AGGREGATE_HEADER: &str = "fleet_size,policy,seed,window_start,window_episodes,\
mean_norm_ee,mean_norm_throughput,mean_norm_energy,mean_ee_bits_per_J";

pub fn episode_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(EPISODE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.fleet_size,
            r.episode,
            r.policy,
            r.seed,
            r.total_throughput_bits,
            r.total_energy_j,
            r.ee_bits_per_j,
            r.norm_ee,
            r.norm_throughput,
            r.norm_energy,
        ));
    }
    out
}

/// Mean metrics per fleet size over the tail of the episode sequence. The
/// first fifth of the episodes is treated as warm-up and excluded, so for a
/// learning run the aggregate reflects mostly-trained behaviour.
pub fn aggregate_csv(rows: &[ExperimentRow], episodes: usize) -> String {
    let window_start = episodes / 5;
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    let mut fleet_sizes: Vec<usize> = rows.iter().map(|r| r.fleet_size).collect();
    fleet_sizes.dedup();
    for fleet_size in fleet_sizes {
        let window: Vec<&ExperimentRow> = rows
            .iter()
            .filter(|r| r.fleet_size == fleet_size && r.episode >= window_start)
            .collect();
        if window.is_empty() {
            continue;
        }
        let n = window.len() as f64;
        let mean = |get: fn(&ExperimentRow) -> f64| -> f64 {
            window.iter().map(|r| get(r)).sum::<f64>() / n
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fleet_size,
            window[0].policy,
            window[0].seed,
            window_start,
            window.len(),
            mean(|r| r.norm_ee),
            mean(|r| r.norm_throughput),
            mean(|r| r.norm_energy),
            mean(|r| r.ee_bits_per_j),
        ));
    }
    out
}

/// A human-readable record of what produced the files next to it. The
/// configuration block uses the scenario-file syntax so it can be passed
/// back via `--config`.
pub fn manifest(
    command: &str,
    policy: &str,
    seed: u64,
    fleet_sizes: &[usize],
    cfg: &ScenarioConfig,
) -> String {
    let sizes = fleet_sizes
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "# orbitee run manifest\n\
         # version: {}\n\
         # command: {command}\n\
         # policy: {policy}\n\
         # seed: {seed}\n\
         # fleet sizes: {sizes}\n\
         #\n\
         # resolved configuration:\n{}",
        env!("CARGO_PKG_VERSION"),
        config_file::render(cfg),
    )
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create directory {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(fleet_size: usize, episode: usize, norm_ee: f64) -> ExperimentRow {
        ExperimentRow {
            fleet_size,
            episode,
            policy: "min-radius",
            seed: 1,
            total_throughput_bits: 1e9,
            total_energy_j: 1e5,
            ee_bits_per_j: 1e4,
            norm_ee,
            norm_throughput: 1.0,
            norm_energy: 1.0,
        }
    }

    #[test]
    fn episode_csv_shape() {
        let text = episode_csv(&[row(3, 0, 1.0), row(3, 1, 1.5)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "fleet_size,episode,policy,seed,total_throughput_bits,total_energy_J,\
             ee_bits_per_J,norm_ee,norm_throughput,norm_energy"
        );
        assert_eq!(lines[1], "3,0,min-radius,1,1000000000,100000,10000,1,1,1");
        assert!(lines[2].contains(",1.5,"));
    }

    #[test]
    fn aggregate_drops_the_warmup_fifth() {
        // 10 episodes: warm-up is 0..2, window is 2..10.
        let rows: Vec<ExperimentRow> = (0..10)
            .map(|ep| row(3, ep, if ep < 2 { 100.0 } else { 2.0 }))
            .collect();
        let text = aggregate_csv(&rows, 10);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "3,min-radius,1,2,8,2,1,1,10000");
    }

    #[test]
    fn aggregate_keeps_fleet_sizes_separate() {
        let mut rows = Vec::new();
        for ep in 0..5 {
            rows.push(row(2, ep, 1.0));
        }
        for ep in 0..5 {
            rows.push(row(4, ep, 3.0));
        }
        let text = aggregate_csv(&rows, 5);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("2,"));
        assert!(lines[2].starts_with("4,"));
    }
}
