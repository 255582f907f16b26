//! Scripted replay of incremental discovery: an initial tree, a log and a
//! list of increments, each adding one trace with some subtrees frozen.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignmentError;
use crate::eventlog::{import_path, EventLog, EventLogError};
use crate::freezing::{freeze_advanced, freeze_baseline, FreezeError, FrozenSet};
use crate::ipda::{ipda_apply, ipda_by_name, Ipda, IpdaError, IpdaOptions, IpdaRequest};
use crate::metrics::{quality, QualityReport};
use crate::semantics::Trace;
use crate::tree::{parse_tree, ProcessTree, TreeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// the IPDA without freezing
    Plain,
    Baseline,
    #[default]
    Advanced,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Algorithm::Plain),
            "baseline" => Ok(Algorithm::Baseline),
            "advanced" => Ok(Algorithm::Advanced),
            other => Err(format!("unknown algorithm '{other}' (plain, baseline, advanced)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Plain => "plain",
            Algorithm::Baseline => "baseline",
            Algorithm::Advanced => "advanced",
        })
    }
}

/// Runs one increment with the chosen algorithm.
pub fn apply_algorithm(
    algorithm: Algorithm,
    imp: &dyn Ipda,
    req: &IpdaRequest,
    frozen: &FrozenSet,
    opts: &IpdaOptions,
) -> Result<ProcessTree, FreezeError> {
    match algorithm {
        Algorithm::Plain => Ok(ipda_apply(imp, req, opts)?),
        Algorithm::Baseline => freeze_baseline(imp, req, frozen, opts),
        Algorithm::Advanced => freeze_advanced(imp, req, frozen, opts),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioStep {
    /// Index into the frequency-sorted variant list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    /// Child-index paths, resolved against the tree before this step.
    #[serde(default)]
    pub frozen: Vec<Vec<usize>>,
    /// Frozen subtrees given as tree text; each picks its first occurrence
    /// in the current tree.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frozen_trees: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Defaults to the sequence of the most frequent variant.
    #[serde(default)]
    pub initial_tree: Option<String>,
    /// Log file (.csv, .xes, or JSON lines), relative to the scenario file.
    #[serde(default)]
    pub log: Option<PathBuf>,
    /// Inline cases, used when no log file is given.
    #[serde(default)]
    pub traces: Vec<Vec<String>>,
    #[serde(default)]
    pub previously_added: Vec<Vec<String>>,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default = "default_ipda")]
    pub ipda: String,
    #[serde(default)]
    pub steps: Vec<ScenarioStep>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_ipda() -> String {
    "reference".into()
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("initial tree: {0}")]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Log(#[from] EventLogError),
    #[error(transparent)]
    Ipda(#[from] IpdaError),
    #[error("step {step}: {message}")]
    Selector { step: usize, message: String },
    #[error("step {step}: {source}")]
    Step { step: usize, source: FreezeError },
    #[error("step {step} metrics: {source}")]
    Metrics { step: usize, source: AlignmentError },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub index: usize,
    pub algorithm: Option<Algorithm>,
    pub trace: Vec<String>,
    pub frozen: Vec<String>,
    pub tree: String,
    pub fitness: f64,
    pub precision: f64,
    pub f_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub ipda: String,
    pub final_tree: String,
    pub previously_added: usize,
    pub steps: Vec<StepSummary>,
}

pub struct ScenarioOutcome {
    pub trees: Vec<ProcessTree>,
    pub reports: Vec<QualityReport>,
    pub summary: ScenarioSummary,
    pub metrics_csv: String,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    /// Reads a scenario and makes its log path relative to the file.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Read { path: path.to_path_buf(), message: e.to_string() })?;
        let mut s = Scenario::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(log) = &s.log {
            if log.is_relative() {
                s.log = Some(base.join(log));
            }
        }
        if let Some(out) = &s.output_dir {
            if out.is_relative() {
                s.output_dir = Some(base.join(out));
            }
        }
        Ok(s)
    }

    pub fn event_log(&self) -> Result<EventLog, ScenarioError> {
        match &self.log {
            Some(p) => Ok(import_path(p)?),
            None => Ok(EventLog::from_traces(self.traces.iter().map(|t| Trace::from_names(t)))),
        }
    }
}

fn names(t: &Trace) -> Vec<String> {
    t.iter().map(|a| a.to_string()).collect()
}

/// Replays the scenario in memory. The quality of every tree is measured
/// on the scenario log, or on all traces seen if the log is empty.
pub fn run_scenario(s: &Scenario, opts: &IpdaOptions) -> Result<ScenarioOutcome, ScenarioError> {
    let imp = ipda_by_name(&s.ipda)?;
    let log = s.event_log()?;
    let variants = log.variants();
    let mut previous: BTreeSet<Trace> = s.previously_added.iter().map(|t| Trace::from_names(t)).collect();
    let mut tree = match &s.initial_tree {
        Some(text) => parse_tree(text)?,
        None => {
            let first = variants.first().ok_or_else(|| {
                ScenarioError::Invalid("no initial tree and no log to derive one from".into())
            })?;
            previous.insert(first.trace.clone());
            ProcessTree::of_trace(first.trace.iter())
        }
    };

    let mut steps: Vec<(Option<Algorithm>, Trace, FrozenSet)> = Vec::new();
    let mut trees = vec![tree.clone()];
    for (i, step) in s.steps.iter().enumerate() {
        let index = i + 1;
        let trace = match (&step.variant, &step.trace) {
            (Some(v), None) => variants
                .get(*v)
                .map(|v| v.trace.clone())
                .ok_or_else(|| ScenarioError::Selector { step: index, message: format!("no variant {v}") })?,
            (None, Some(t)) => Trace::from_names(t),
            _ => {
                return Err(ScenarioError::Selector {
                    step: index,
                    message: "give exactly one of 'variant' and 'trace'".into(),
                })
            }
        };
        let selector = |message: String| ScenarioError::Selector { step: index, message };
        let mut roots = step
            .frozen
            .iter()
            .map(|p| tree.resolve_path(p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| selector(e.to_string()))?;
        for text in &step.frozen_trees {
            let pattern = parse_tree(text).map_err(|e| selector(format!("frozen tree {text}: {e}")))?;
            roots.push(tree.find_subtree(&pattern).ok_or_else(|| selector(format!("{text} does not occur in {tree}")))?);
        }
        let frozen = FrozenSet::from_nodes(&tree, &roots).map_err(|e| selector(e.to_string()))?;
        frozen
            .check_alphabet(&log.alphabet())
            .map_err(|e| ScenarioError::Selector { step: index, message: e.to_string() })?;
        let algorithm = step.algorithm.unwrap_or(s.algorithm);
        let req = IpdaRequest { tree: tree.clone(), trace: trace.clone(), previous: previous.clone() };
        tree = apply_algorithm(algorithm, imp.as_ref(), &req, &frozen, opts)
            .map_err(|source| ScenarioError::Step { step: index, source })?;
        previous.insert(trace.clone());
        trees.push(tree.clone());
        steps.push((Some(algorithm), trace, frozen));
    }

    let measured = if log.is_empty() {
        let mut all = EventLog::from_traces(previous.iter().cloned());
        for (_, t, _) in &steps {
            all.push_case(format!("step{}", all.len() + 1), t.clone());
        }
        all
    } else {
        log
    };
    let mut reports = Vec::with_capacity(trees.len());
    let mut csv = String::from(QualityReport::CSV_HEADER);
    csv.push('\n');
    let mut summaries = Vec::with_capacity(trees.len());
    for (i, t) in trees.iter().enumerate() {
        let r = quality(&measured, t, &opts.search).map_err(|source| ScenarioError::Metrics { step: i, source })?;
        let _ = writeln!(csv, "{}", r.csv_row(i));
        let (algorithm, trace, frozen) = match i {
            0 => (None, Vec::new(), Vec::new()),
            _ => {
                let (a, t, f) = &steps[i - 1];
                (*a, names(t), f.trees().iter().map(|x| x.to_string()).collect())
            }
        };
        summaries.push(StepSummary {
            index: i,
            algorithm,
            trace,
            frozen,
            tree: t.to_string(),
            fitness: r.fitness,
            precision: r.precision,
            f_measure: r.f_measure,
        });
        reports.push(r);
    }
    let summary = ScenarioSummary {
        ipda: s.ipda.clone(),
        final_tree: tree.to_string(),
        previously_added: previous.len(),
        steps: summaries,
    };
    Ok(ScenarioOutcome { trees, reports, summary, metrics_csv: csv })
}

/// Writes `step_NNN.tree`, `metrics.csv` and `summary.json` into `dir`.
pub fn write_outcome(outcome: &ScenarioOutcome, dir: &Path) -> Result<(), ScenarioError> {
    let write = |name: String, body: &str| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|source| ScenarioError::Write { path, source })
    };
    std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Write { path: dir.to_path_buf(), source })?;
    for (i, t) in outcome.trees.iter().enumerate() {
        write(format!("step_{i:03}.tree"), &format!("{t}\n"))?;
    }
    write("metrics.csv".into(), &outcome.metrics_csv)?;
    let json = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    write("summary.json".into(), &format!("{json}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_steps_echo_the_initial_tree() {
        let s = Scenario::from_json(r#"{"initial_tree": "->(a,b)", "traces": [["a","b"]]}"#).unwrap();
        let out = run_scenario(&s, &IpdaOptions::default()).unwrap();
        assert_eq!(out.summary.final_tree, "->(a,b)");
        assert_eq!(out.metrics_csv, "increment,fitness,precision,f_measure\n0,1.000000,1.000000,1.000000\n");
    }

    #[test]
    fn default_initial_tree_and_steps() {
        let s = Scenario::from_json(
            r#"{"traces": [["a","b"],["a","b"],["a","c"]],
                "steps": [{"variant": 1, "frozen": [[0]]}, {"trace": ["a","b"], "algorithm": "baseline"}]}"#,
        )
        .unwrap();
        let out = run_scenario(&s, &IpdaOptions::default()).unwrap();
        assert_eq!(out.trees[0].to_string(), "->(a,b)");
        assert_eq!(out.trees.len(), 3);
        assert_eq!(out.reports[1].fitness, 1.0);
        assert_eq!(out.summary.steps[1].frozen, vec!["a"]);
        assert_eq!(out.summary.steps[1].algorithm, Some(Algorithm::Advanced));
        let by_text = Scenario::from_json(
            r#"{"traces": [["a","b"],["a","b"],["a","c"]], "steps": [{"variant": 1, "frozen_trees": ["a"]}]}"#,
        )
        .unwrap();
        assert_eq!(run_scenario(&by_text, &IpdaOptions::default()).unwrap().trees[1], out.trees[1]);
    }

    #[test]
    fn selector_errors_name_the_step() {
        let s = Scenario::from_json(r#"{"initial_tree": "a", "steps": [{"trace": ["a"]}, {"trace": ["a"], "frozen": [[3]]}]}"#)
            .unwrap();
        assert!(matches!(run_scenario(&s, &IpdaOptions::default()), Err(ScenarioError::Selector { step: 2, .. })));
        let s = Scenario::from_json(r#"{"initial_tree": "a", "steps": [{"trace": ["a"], "frozen_trees": ["b"]}]}"#).unwrap();
        assert!(matches!(run_scenario(&s, &IpdaOptions::default()), Err(ScenarioError::Selector { step: 1, .. })));
        let s = Scenario::from_json(r#"{"initial_tree": "a", "steps": [{"variant": 0, "trace": ["a"]}]}"#).unwrap();
        assert!(matches!(run_scenario(&s, &IpdaOptions::default()), Err(ScenarioError::Selector { step: 1, .. })));
        assert!(Scenario::from_json(r#"{"stepz": []}"#).is_err());
    }
}
