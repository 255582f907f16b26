//! Incremental process discovery: given a tree accepting the previously
//! added traces and one more trace, return a tree accepting all of them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::alignment::{fits, AlignmentError, SearchOptions};
use crate::semantics::Trace;
use crate::tree::{reduce_tree, ProcessTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpdaRequest {
    pub tree: ProcessTree,
    pub trace: Trace,
    pub previous: BTreeSet<Trace>,
}

impl IpdaRequest {
    pub fn new(tree: ProcessTree, trace: Trace, previous: impl IntoIterator<Item = Trace>) -> Self {
        IpdaRequest { tree, trace, previous: previous.into_iter().collect() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IpdaError {
    #[error("previously added trace {trace} is not accepted by the input tree")]
    Precondition { trace: String },
    #[error("ipda '{name}' returned a tree that rejects {trace}")]
    Postcondition { name: String, trace: String },
    #[error("unknown ipda '{0}'")]
    Unknown(String),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
}

/// A discovery algorithm. Implementations must be deterministic.
pub trait Ipda: Send + Sync {
    fn name(&self) -> &str;
    fn discover(&self, req: &IpdaRequest, search: &SearchOptions) -> Result<ProcessTree, IpdaError>;
}

/// Adds a non-fitting trace as a new alternative of the whole tree.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceIpda;

impl Ipda for ReferenceIpda {
    fn name(&self) -> &str {
        "reference"
    }

    fn discover(&self, req: &IpdaRequest, search: &SearchOptions) -> Result<ProcessTree, IpdaError> {
        if fits(&req.tree, &req.trace, search)? {
            return Ok(req.tree.clone());
        }
        let branch = ProcessTree::of_trace(req.trace.iter());
        Ok(reduce_tree(&ProcessTree::choice(vec![req.tree.clone(), branch])))
    }
}

/// Always answers with a fixed tree. Handy for replaying a known
/// discovery result; `ipda_apply` still checks it.
#[derive(Clone, Debug)]
pub struct StipulatedIpda(pub ProcessTree);

impl Ipda for StipulatedIpda {
    fn name(&self) -> &str {
        "stipulated"
    }

    fn discover(&self, _req: &IpdaRequest, _search: &SearchOptions) -> Result<ProcessTree, IpdaError> {
        Ok(self.0.clone())
    }
}

pub const IPDA_NAMES: &[&str] = &["reference"];

pub fn ipda_by_name(name: &str) -> Result<Box<dyn Ipda>, IpdaError> {
    match name {
        "reference" => Ok(Box::new(ReferenceIpda)),
        other => Err(IpdaError::Unknown(other.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpdaOptions {
    pub check_postcondition: bool,
    pub search: SearchOptions,
}

impl Default for IpdaOptions {
    fn default() -> Self {
        IpdaOptions { check_postcondition: true, search: SearchOptions::default() }
    }
}

/// Checks that `P ⊆ 𝓛(T)`, runs the implementation, and (unless turned
/// off) checks that the result accepts `{σ} ∪ P`.
pub fn ipda_apply(imp: &dyn Ipda, req: &IpdaRequest, opts: &IpdaOptions) -> Result<ProcessTree, IpdaError> {
    for p in &req.previous {
        if !fits(&req.tree, p, &opts.search)? {
            return Err(IpdaError::Precondition { trace: p.to_string() });
        }
    }
    let out = imp.discover(req, &opts.search)?;
    if opts.check_postcondition {
        for p in std::iter::once(&req.trace).chain(&req.previous) {
            if !fits(&out, p, &opts.search)? {
                return Err(IpdaError::Postcondition { name: imp.name().to_string(), trace: p.to_string() });
            }
        }
    }
    Ok(out)
}
