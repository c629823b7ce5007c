//! Minimal programmatic use of the simulator: train three UAVs for a few
//! episodes and print their normalized energy efficiency per episode.
//!
//! Run with `cargo run --release --example quickstart`.

use orbitee_core::config::ScenarioConfig;
use orbitee_core::harness::run_experiment;
use orbitee_core::policies::PolicyKind;

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.episodes = 10;
    let outcome = run_experiment(&cfg, PolicyKind::Learning, &[3], 42);
    println!("episode  norm_ee  ee (bits/J)");
    for row in &outcome.rows {
        println!("{:>7}  {:>7.4}  {:.3e}", row.episode, row.norm_ee, row.ee_bits_per_j);
    }
}
