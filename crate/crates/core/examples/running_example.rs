//! Walks the advanced freezing pipeline on the running example step by step.

use ptfreeze::freezing::{
    insertion_case, project_next, project_previous, reinsert_frozen, replace_frozen, FrozenSet,
};
use ptfreeze::{parse_tree, sta, Activity, NodeId, SearchOptions, Trace};

fn main() {
    let search = SearchOptions::default();
    let t0 = parse_tree("->(*(X(->(a,b),+(c,d)),tau),+(e,a))").unwrap();
    let t2 = NodeId(10);
    let frozen = FrozenSet::with_labels(&t0, vec![(t2, "openT2".into(), "closeT2".into())]).unwrap();
    println!("T0   {t0}\nfrozen {} at path {:?}", frozen.items()[0].tree, t0.path_of(t2));

    let replaced = replace_frozen(&t0, &frozen).unwrap();
    println!("T0'  {replaced}");

    let previous = [Trace::parse("d,c,a,b,a,e"), Trace::parse("a,b,e,a")];
    let mut records = project_previous(&t0, &frozen, &previous, &search).unwrap();
    for r in &records {
        println!("  {} -> {}", r.original(), r.projected());
    }
    let sigma = Trace::parse("c,d,a,e,a,a");
    let next = project_next(&frozen, &sigma, &search).unwrap();
    println!("  σ = {} -> {}", next.original(), next.projected());
    records.push(next);

    // stands in for whatever the discovery algorithm returns on the
    // projected traces
    let discovered = parse_tree("->(*(X(->(a,b),+(c,d)),tau),->(openT2,*(tau,a),closeT2))").unwrap();
    println!("T'   {discovered}");
    for l in ["openT2", "closeT2"] {
        let s = sta(&discovered, &Activity::new(l));
        println!("  sta({l}) = {s:?} -> {:?}", insertion_case(s));
    }
    let result = reinsert_frozen(&discovered, &frozen, &records, &search).unwrap();
    println!("T'''  {result}");
}
