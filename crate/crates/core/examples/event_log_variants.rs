//! Imports a CSV or XES log and lists its variants by frequency.

use std::path::PathBuf;

use ptfreeze::eventlog::{import_path, parse_xes_lite};

const XES: &str = r#"<log>
  <trace><string key="concept:name" value="1"/>
    <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
    <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2024-01-01T11:00:00Z"/></event>
  </trace>
  <trace><string key="concept:name" value="2"/>
    <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2024-01-02T11:00:00Z"/></event>
    <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2024-01-02T10:00:00Z"/></event>
  </trace>
</log>"#;

fn main() {
    let log = match std::env::args().nth(1) {
        Some(path) => import_path(&PathBuf::from(path)).expect("log"),
        None => {
            let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic20.csv");
            let inline = parse_xes_lite(XES).expect("inline XES");
            println!("inline XES: {} cases, events ordered by timestamp", inline.len());
            for v in inline.variants().iter() {
                println!("  {:>3} × {}", v.frequency, v.trace);
            }
            import_path(&default).expect("fixture")
        }
    };
    let variants = log.variants();
    println!("{} cases, {} variants, alphabet {:?}", log.len(), variants.len(), log.alphabet());
    for (i, v) in variants.iter().enumerate() {
        println!("  #{i:<2} {:>3} × {}", v.frequency, v.trace);
    }
}
