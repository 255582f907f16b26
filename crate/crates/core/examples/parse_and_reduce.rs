//! Parses a tree, prints its forms, reduces it and lists its bounded language.

use ptfreeze::semantics::language_bounded;
use ptfreeze::{parse_tree, reduce_tree};

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "->(->(a,tau),X(+(b),tau),*(c,tau))".into());
    let t = match parse_tree(&text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    println!("canonical  {t}");
    println!("pretty     {}", t.to_pretty_string());
    let r = reduce_tree(&t);
    println!("reduced    {r}  ({} -> {} nodes)", t.len(), r.len());
    for v in t.node_ids() {
        println!("  {:?} path {:?} {}", v, t.path_of(v), t.label(v));
    }
    match language_bounded(&r, 2) {
        Ok(lang) => {
            println!("language with at most two loop bodies:");
            for w in lang {
                println!("  {w}");
            }
        }
        Err(e) => println!("language too large: {e}"),
    }
}
