//! Optimal alignment of a trace, printed as a move table.

use ptfreeze::alignment::validate;
use ptfreeze::{optimal_alignment, parse_tree, MoveKind, Trace};

fn main() {
    let mut args = std::env::args().skip(1);
    let tree = args.next().unwrap_or_else(|| "*(X(->(a,b),+(c,d)),tau)".into());
    let trace = Trace::parse(&args.next().unwrap_or_else(|| "a,b,c,f".into()));
    let t = parse_tree(&tree).expect("tree");
    let al = optimal_alignment(&t, &trace).expect("alignment");
    validate(&t, &trace, &al).expect("a valid alignment");
    println!("tree  {t}\ntrace {trace}\ncost  {}", al.cost);
    println!("{}", al.to_table());
    println!(
        "log moves {}, visible model moves {}, synchronous {}",
        al.count(MoveKind::LogMove),
        al.count(MoveKind::VisibleModelMove),
        al.count(MoveKind::Synchronous)
    );
    println!("model run {}", al.model_run());
}
