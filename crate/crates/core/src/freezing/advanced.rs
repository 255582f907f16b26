use super::{
    check_freezing_postcondition, check_previous, project_next, project_previous, reinsert_frozen, replace_frozen,
    FreezeError, FrozenSet, ProjectionRecord,
};
use crate::ipda::{ipda_apply, Ipda, IpdaOptions, IpdaRequest};
use crate::semantics::Trace;
use crate::tree::ProcessTree;

/// Every intermediate artifact of one advanced step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdvancedRun {
    pub replaced: ProcessTree,
    pub previous: Vec<ProjectionRecord>,
    pub next: ProjectionRecord,
    pub discovered: ProcessTree,
    pub result: ProcessTree,
}

pub fn freeze_advanced(
    imp: &dyn Ipda,
    req: &IpdaRequest,
    frozen: &FrozenSet,
    opts: &IpdaOptions,
) -> Result<ProcessTree, FreezeError> {
    freeze_advanced_traced(imp, req, frozen, opts).map(|r| r.result)
}

/// Replace, project, discover, reinsert. With nothing frozen this is the
/// plain IPDA.
pub fn freeze_advanced_traced(
    imp: &dyn Ipda,
    req: &IpdaRequest,
    frozen: &FrozenSet,
    opts: &IpdaOptions,
) -> Result<AdvancedRun, FreezeError> {
    frozen.check_host(&req.tree)?;
    check_previous(&req.tree, &req.previous, &opts.search)?;
    if frozen.is_empty() {
        let result = ipda_apply(imp, req, opts)?;
        return Ok(AdvancedRun {
            replaced: req.tree.clone(),
            previous: req.previous.iter().map(|p| ProjectionRecord { levels: vec![p.clone()] }).collect(),
            next: ProjectionRecord { levels: vec![req.trace.clone()] },
            discovered: result.clone(),
            result,
        });
    }

    let replaced = replace_frozen(&req.tree, frozen)?;
    let previous = project_previous(&req.tree, frozen, &req.previous, &opts.search)?;
    let next = project_next(frozen, &req.trace, &opts.search)?;
    let inner = IpdaRequest::new(
        replaced.clone(),
        next.projected().clone(),
        previous.iter().map(|r| r.projected().clone()),
    );
    let discovered = ipda_apply(imp, &inner, opts)?;
    let mut records = previous.clone();
    records.push(next.clone());
    let result = reinsert_frozen(&discovered, frozen, &records, &opts.search)?;
    if opts.check_postcondition {
        let traces: Vec<&Trace> = std::iter::once(&req.trace).chain(&req.previous).collect();
        check_freezing_postcondition(&result, frozen, &traces, &opts.search)?;
    }
    Ok(AdvancedRun { replaced, previous, next, discovered, result })
}
