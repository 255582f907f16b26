//! Alignment-based fitness, escaping-edges precision and their harmonic
//! mean.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alignment::{min_visible_run_length, optimal_alignment_with, AlignmentError, MoveKind, SearchOptions};
use crate::eventlog::EventLog;
use crate::semantics::machine::{ExecState, TreeMachine};
use crate::tree::{Activity, ProcessTree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantCost {
    pub trace: Vec<String>,
    pub frequency: usize,
    pub cost: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub fitness: f64,
    pub precision: f64,
    pub f_measure: f64,
    pub variants: Vec<VariantCost>,
}

impl QualityReport {
    pub const CSV_HEADER: &'static str = "increment,fitness,precision,f_measure";

    pub fn csv_row(&self, increment: usize) -> String {
        format!("{increment},{:.6},{:.6},{:.6}", self.fitness, self.precision, self.f_measure)
    }
}

pub fn f_measure(precision: f64, fitness: f64) -> f64 {
    if precision + fitness > 0.0 {
        2.0 * precision * fitness / (precision + fitness)
    } else {
        0.0
    }
}

/// One optimal alignment per variant: its cost and the visible activities
/// of its model row.
struct Aligned {
    frequency: usize,
    trace_len: usize,
    cost: usize,
    model_trace: Vec<Activity>,
    trace: Vec<String>,
}

fn align_variants(log: &EventLog, t: &ProcessTree, search: &SearchOptions) -> Result<Vec<Aligned>, AlignmentError> {
    log.variants()
        .iter()
        .map(|v| {
            let al = optimal_alignment_with(t, &v.trace, search)?;
            let model_trace = al
                .moves
                .iter()
                .filter(|m| matches!(m.kind(), MoveKind::Synchronous | MoveKind::VisibleModelMove))
                .filter_map(|m| match &m.model.as_ref()?.event {
                    crate::semantics::Event::Activity(a) => Some(a.clone()),
                    _ => None,
                })
                .collect();
            Ok(Aligned {
                frequency: v.frequency,
                trace_len: v.trace.len(),
                cost: al.cost,
                model_trace,
                trace: v.trace.iter().map(|a| a.to_string()).collect(),
            })
        })
        .collect()
}

fn fitness_of(aligned: &[Aligned], min_run: usize) -> f64 {
    let (mut cost, mut worst) = (0usize, 0usize);
    for a in aligned {
        cost += a.frequency * a.cost;
        worst += a.frequency * (a.trace_len + min_run);
    }
    if worst == 0 {
        1.0
    } else {
        1.0 - cost as f64 / worst as f64
    }
}

/// `1 − Σ cost / Σ (|σ| + shortest run)`, weighted by variant frequency.
/// An empty log has fitness 1.
pub fn fitness(log: &EventLog, t: &ProcessTree, search: &SearchOptions) -> Result<f64, AlignmentError> {
    Ok(fitness_of(&align_variants(log, t, search)?, min_visible_run_length(t)))
}

fn precision_of(aligned: &[Aligned], t: &ProcessTree) -> f64 {
    // prefix of aligned model traces -> (weight, observed continuations)
    let mut prefixes: BTreeMap<Vec<Activity>, (usize, BTreeSet<Option<Activity>>)> = BTreeMap::new();
    for a in aligned {
        for i in 0..=a.model_trace.len() {
            let entry = prefixes.entry(a.model_trace[..i].to_vec()).or_default();
            entry.0 += a.frequency;
            // None marks that a trace ends here
            entry.1.insert(a.model_trace.get(i).cloned());
        }
    }
    let machine = TreeMachine::new(t);
    let mut states: BTreeMap<Vec<Activity>, BTreeSet<ExecState>> = BTreeMap::new();
    let (mut escaping, mut enabled_total) = (0usize, 0usize);
    // BTreeMap order visits every prefix after its parent
    for (prefix, (weight, observed)) in &prefixes {
        let here = match prefix.split_last() {
            None => machine.invisible_closure([machine.initial()]),
            Some((last, parent)) => machine.advance(&states[parent], last),
        };
        let mut enabled: BTreeSet<Option<Activity>> = machine.enabled_activities(&here).into_iter().map(Some).collect();
        if here.iter().any(|s| machine.is_final(s)) {
            enabled.insert(None);
        }
        escaping += weight * enabled.difference(observed).count();
        enabled_total += weight * enabled.len();
        states.insert(prefix.clone(), here);
    }
    if enabled_total == 0 {
        1.0
    } else {
        1.0 - escaping as f64 / enabled_total as f64
    }
}

/// Escaping edges over the prefix automaton of the aligned model traces:
/// at each prefix, activities the tree enables (plus ending) that no
/// trace in the log continues with.
pub fn precision(log: &EventLog, t: &ProcessTree, search: &SearchOptions) -> Result<f64, AlignmentError> {
    Ok(precision_of(&align_variants(log, t, search)?, t))
}

pub fn quality(log: &EventLog, t: &ProcessTree, search: &SearchOptions) -> Result<QualityReport, AlignmentError> {
    let aligned = align_variants(log, t, search)?;
    let fit = fitness_of(&aligned, min_visible_run_length(t));
    let prec = precision_of(&aligned, t);
    Ok(QualityReport {
        fitness: fit,
        precision: prec,
        f_measure: f_measure(prec, fit),
        variants: aligned
            .into_iter()
            .map(|a| VariantCost { trace: a.trace, frequency: a.frequency, cost: a.cost })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Trace;
    use crate::tree::parse_tree;

    fn log(traces: &[(&str, usize)]) -> EventLog {
        EventLog::from_variants(&traces.iter().map(|(t, n)| (Trace::parse(t), *n)).collect::<Vec<_>>())
    }

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn fitness_values() {
        let t1 = parse_tree("*(X(->(a,b),+(c,d)),tau)").unwrap();
        let f = fitness(&log(&[("a,b,c,f", 1)]), &t1, &opts()).unwrap();
        assert!((f - (1.0 - 2.0 / 6.0)).abs() < 1e-12);
        assert_eq!(fitness(&EventLog::new(), &t1, &opts()).unwrap(), 1.0);
        assert_eq!(fitness(&log(&[("a,b", 3), ("c,d,a,b", 1)]), &t1, &opts()).unwrap(), 1.0);
    }

    #[test]
    fn precision_values() {
        let l = log(&[("a,b,c", 1)]);
        assert_eq!(precision(&l, &parse_tree("->(a,b,c)").unwrap(), &opts()).unwrap(), 1.0);
        let flower = parse_tree("*(tau,X(a,b,c))").unwrap();
        let p = precision(&l, &flower, &opts()).unwrap();
        // four prefixes, each enabling {a,b,c,end} with one observed
        assert!((p - 0.25).abs() < 1e-12);
        let loose = parse_tree("+(a,b,c)").unwrap();
        let p = precision(&l, &loose, &opts()).unwrap();
        assert!((p - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn scaling_the_log_changes_nothing() {
        let t = parse_tree("->(X(a,b),*(c,tau))").unwrap();
        let once = quality(&log(&[("a,c", 2), ("b,c,c", 1), ("x", 1)]), &t, &opts()).unwrap();
        let twice = quality(&log(&[("a,c", 4), ("b,c,c", 2), ("x", 2)]), &t, &opts()).unwrap();
        assert!((once.fitness - twice.fitness).abs() < 1e-12);
        assert!((once.precision - twice.precision).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean() {
        assert_eq!(f_measure(1.0, 1.0), 1.0);
        assert_eq!(f_measure(0.0, 0.7), 0.0);
        assert!((f_measure(0.5, 1.0) - 2.0 / 3.0).abs() < 1e-12);
        let r = QualityReport { fitness: 1.0, precision: 0.5, f_measure: 2.0 / 3.0, variants: vec![] };
        assert_eq!(r.csv_row(3), "3,1.000000,0.500000,0.666667");
    }
}
