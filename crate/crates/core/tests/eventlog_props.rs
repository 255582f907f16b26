use proptest::prelude::*;
use ptfreeze::eventlog::{import_csv_reader, parse_xes_lite, CsvOptions, EventLog};
use ptfreeze::Trace;

fn arb_log() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
    proptest::collection::vec(proptest::collection::vec(proptest::sample::select(&["a", "b", "c", "d"][..]), 1..6), 1..8)
}

/// One row per event, timestamps increasing within each case.
fn rows(cases: &[Vec<&str>]) -> Vec<String> {
    let mut out = Vec::new();
    for (c, trace) in cases.iter().enumerate() {
        for (i, a) in trace.iter().enumerate() {
            out.push(format!("case{c},{a},2024-01-{:02}T10:{:02}:00Z", c + 1, i));
        }
    }
    out
}

fn expected(cases: &[Vec<&str>]) -> EventLog {
    EventLog::from_traces(cases.iter().map(|t| Trace::from_names(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn csv_row_order_does_not_change_variants(cases in arb_log(), seed in any::<u64>()) {
        let mut shuffled = rows(&cases);
        // a cheap deterministic shuffle driven by the seed
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let text = format!("case_id,activity,timestamp\n{}\n", shuffled.join("\n"));
        let log = import_csv_reader(text.as_bytes(), &CsvOptions::default()).unwrap();
        prop_assert_eq!(log.variants(), expected(&cases).variants());
        prop_assert_eq!(log.len(), cases.len());
        prop_assert_eq!(log.variants().total(), cases.len());
    }

    #[test]
    fn xes_events_are_ordered_by_timestamp(cases in arb_log()) {
        let mut xml = String::from("<log>");
        for (c, trace) in cases.iter().enumerate() {
            xml.push_str(&format!("<trace><string key=\"concept:name\" value=\"case{c}\"/>"));
            // written newest first
            for (i, a) in trace.iter().enumerate().rev() {
                xml.push_str(&format!(
                    "<event><string key=\"concept:name\" value=\"{a}\"/><date key=\"time:timestamp\" value=\"2024-01-01T10:{i:02}:00Z\"/></event>"
                ));
            }
            xml.push_str("</trace>");
        }
        xml.push_str("</log>");
        let log = parse_xes_lite(&xml).unwrap();
        let traces: Vec<&Trace> = log.traces().collect();
        let want = expected(&cases);
        prop_assert_eq!(traces, want.traces().collect::<Vec<_>>());
    }

    #[test]
    fn jsonl_round_trips(cases in arb_log()) {
        let log = expected(&cases);
        prop_assert_eq!(EventLog::from_jsonl(&log.to_jsonl()).unwrap(), log);
    }

    #[test]
    fn variants_are_sorted(cases in arb_log()) {
        let vs = expected(&cases).variants();
        for w in vs.windows(2) {
            prop_assert!(w[0].frequency > w[1].frequency || (w[0].frequency == w[1].frequency && w[0].trace < w[1].trace));
        }
    }
}
