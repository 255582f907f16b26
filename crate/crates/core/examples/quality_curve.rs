//! Quality curves of advanced freezing and the baseline on a synthetic log
//! of 20 variants: every interleaving of `→(x,y,z)` with one of a..e.
//! The block `→(x,y,z)` is frozen at every step.

use std::path::Path;

use ptfreeze::ipda::IpdaOptions;
use ptfreeze::scenario::{run_scenario, Scenario};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in ["synthetic20_baseline.json", "synthetic20_advanced.json"] {
        let s = Scenario::load(&fixtures.join(name)).expect("fixture loads");
        let out = run_scenario(&s, &IpdaOptions::default()).expect("scenario runs");
        println!("{name}\n{}final tree: {}\n", out.metrics_csv, out.summary.final_tree);
    }
}
