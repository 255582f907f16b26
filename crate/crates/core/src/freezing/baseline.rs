use super::{check_freezing_postcondition, check_previous, FreezeError, FrozenSet};
use crate::ipda::{ipda_apply, Ipda, IpdaOptions, IpdaRequest};
use crate::semantics::Trace;
use crate::tree::{is_subtree, ProcessTree};

/// `∧(T', ×(τ,T_i), …)` over the frozen subtrees missing from `discovered`;
/// `discovered` itself when none is missing.
pub fn baseline_compose(discovered: &ProcessTree, frozen: &FrozenSet) -> ProcessTree {
    let missing: Vec<ProcessTree> = frozen
        .items()
        .iter()
        .filter(|f| !is_subtree(&f.tree, discovered))
        .map(|f| ProcessTree::choice(vec![ProcessTree::tau(), f.tree.clone()]))
        .collect();
    if missing.is_empty() {
        return discovered.clone();
    }
    let mut children = vec![discovered.clone()];
    children.extend(missing);
    ProcessTree::parallel(children)
}

/// Runs the IPDA unchanged, then puts lost frozen subtrees back as
/// optional parallel branches.
pub fn freeze_baseline(
    imp: &dyn Ipda,
    req: &IpdaRequest,
    frozen: &FrozenSet,
    opts: &IpdaOptions,
) -> Result<ProcessTree, FreezeError> {
    frozen.check_host(&req.tree)?;
    check_previous(&req.tree, &req.previous, &opts.search)?;
    let discovered = ipda_apply(imp, req, opts)?;
    let out = baseline_compose(&discovered, frozen);
    if opts.check_postcondition {
        let traces: Vec<&Trace> = std::iter::once(&req.trace).chain(&req.previous).collect();
        check_freezing_postcondition(&out, frozen, &traces, &opts.search)?;
    }
    Ok(out)
}
