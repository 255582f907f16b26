//! Process trees, alignments and incremental discovery with frozen
//! subtrees.

pub mod alignment;
pub mod eventlog;
pub mod freezing;
pub mod ipda;
pub mod metrics;
pub mod scenario;
pub mod semantics;
pub mod session;
pub mod tree;

pub use alignment::{optimal_alignment, Alignment, AlignmentError, Move, MoveKind, SearchOptions};
pub use semantics::{accepts, sta, CardinalitySet, RunningSequence, Trace};
pub use tree::{is_subtree, parse_tree, reduce_tree, serialize_tree, Activity, NodeId, Operator, ProcessTree};
