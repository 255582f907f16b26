//! Replays a scenario file and writes its trees and metrics.

use std::path::PathBuf;

use ptfreeze::ipda::IpdaOptions;
use ptfreeze::scenario::{run_scenario, write_outcome, Scenario};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic20_advanced.json"));
    let s = Scenario::load(&path).expect("scenario");
    let out = run_scenario(&s, &IpdaOptions::default()).expect("run");
    let dir = std::env::temp_dir().join("ptfreeze-scenario");
    write_outcome(&out, &dir).expect("write");
    println!("{}", out.metrics_csv.trim_end());
    println!("final tree {}", out.summary.final_tree);
    println!("artifacts in {}", dir.display());
}
