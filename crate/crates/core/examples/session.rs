//! An interactive session driven from code: freeze, add variants, undo,
//! then round-trip the snapshot.

use ptfreeze::eventlog::EventLog;
use ptfreeze::ipda::IpdaOptions;
use ptfreeze::scenario::Algorithm;
use ptfreeze::session::FreezeSession;
use ptfreeze::{parse_tree, Trace};

fn main() {
    let log = EventLog::from_traces(["d,c,a,b,a,e", "a,b,e,a", "c,d,a,e,a,a"].map(Trace::parse));
    let t0 = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))").unwrap();
    let opts = IpdaOptions::default();
    let mut s = FreezeSession::new(log, Some(t0), "reference", opts.clone()).unwrap();
    s.seed_previous(Trace::parse("d,c,a,b,a,e")).unwrap();
    s.seed_previous(Trace::parse("a,b,e,a")).unwrap();
    s.set_frozen(&[vec![1]]).unwrap();
    println!("start    {}  frozen {:?}", s.tree(), s.frozen_paths());

    let r = s.apply_trace(Trace::parse("c,d,a,e,a,a"), Algorithm::Advanced).unwrap();
    println!("F {:.6} precision {:.6} fitness {:.6}", r.f_measure, r.precision, r.fitness);
    println!("advanced {}  frozen {:?}", s.tree(), s.frozen_paths());

    let json = serde_json::to_string(&s.snapshot()).unwrap();
    let restored = FreezeSession::from_snapshot(&serde_json::from_str(&json).unwrap(), opts).unwrap();
    println!("restored {}  (snapshot is {} bytes)", restored.tree(), json.len());

    s.undo().unwrap();
    println!("undone   {}", s.tree());
}
