//! Compares the tree produced by advanced freezing on the running example
//! with the parallel composition of the baseline, on the same log.

use ptfreeze::eventlog::EventLog;
use ptfreeze::freezing::{baseline_compose, FrozenSet};
use ptfreeze::metrics::quality;
use ptfreeze::{parse_tree, NodeId, SearchOptions, Trace};

fn main() {
    let t0 = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))").unwrap();
    let frozen = FrozenSet::from_nodes(&t0, &[NodeId(10)]).unwrap();
    // what the discovery step returned in the baseline run
    let discovered = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,*(a,tau)))").unwrap();
    let baseline = baseline_compose(&discovered, &frozen);
    let advanced = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(+(e,a),*(tau,a)))").unwrap();

    for sigma in ["c,d,a,e,a,a", "c,d,a,e,a,a,e"] {
        let log = EventLog::from_traces([Trace::parse(sigma), Trace::parse("d,c,a,b,a,e"), Trace::parse("a,b,e,a")]);
        println!("log with σ = {sigma}");
        for (name, t) in [("baseline", &baseline), ("advanced", &advanced)] {
            let r = quality(&log, t, &SearchOptions::default()).unwrap();
            println!("  {name:8} {t}\n           fitness {:.6} precision {:.6} F {:.6}", r.fitness, r.precision, r.f_measure);
        }
    }
}
