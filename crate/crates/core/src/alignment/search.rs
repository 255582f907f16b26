use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{AlignmentError, Move, SearchOptions};
use crate::semantics::machine::{ExecState, TreeMachine};
use crate::semantics::{Event, Trace};
use crate::tree::ProcessTree;

/// (deviations, deviation placement, invisible-move placement)
type Cost = (usize, usize, usize);

fn add(a: Cost, b: Cost) -> Cost {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

struct Entry {
    state: ExecState,
    pos: usize,
    g: Cost,
    parent: Option<(usize, Move)>,
    closed: bool,
}

/// Best-first search over (execution state, trace position). With
/// `deviations` off only synchronous and invisible moves are allowed, and
/// `None` means the trace does not fit.
pub(super) fn run(
    t: &ProcessTree,
    trace: &Trace,
    deviations: bool,
    opts: &SearchOptions,
) -> Result<Option<Vec<Move>>, AlignmentError> {
    let n = trace.len();
    let alphabet = t.activities();
    // foreign[j]: activities at positions >= j that can only be log moves
    let mut foreign = vec![0usize; n + 1];
    for j in (0..n).rev() {
        foreign[j] = foreign[j + 1] + usize::from(!alphabet.contains(&trace[j]));
    }
    if !deviations && foreign[0] > 0 {
        return Ok(None);
    }
    let h = |pos: usize| -> Cost { (foreign[pos], 0, 0) };

    let machine = TreeMachine::new(t);
    let mut entries: Vec<Entry> = Vec::new();
    let mut index: HashMap<(ExecState, usize), usize> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(Cost, Cost, usize, usize)>> = BinaryHeap::new();
    let mut seq = 0usize;

    let start = machine.initial();
    index.insert((start.clone(), 0), 0);
    entries.push(Entry { state: start, pos: 0, g: (0, 0, 0), parent: None, closed: false });
    heap.push(Reverse((h(0), (0, 0, 0), seq, 0)));

    let mut expansions = 0usize;
    while let Some(Reverse((_, g, _, idx))) = heap.pop() {
        if entries[idx].closed || entries[idx].g != g {
            continue;
        }
        entries[idx].closed = true;
        let (state, pos) = (entries[idx].state.clone(), entries[idx].pos);
        if pos == n && machine.is_final(&state) {
            return Ok(Some(reconstruct(&entries, idx)));
        }
        expansions += 1;
        if expansions > opts.max_expansions {
            return Err(AlignmentError::BudgetExceeded { budget: opts.max_expansions });
        }

        let mut succ: Vec<(ExecState, usize, Cost, Move)> = Vec::new();
        if deviations && pos < n {
            succ.push((state.clone(), pos + 1, (1, 2 * (n - pos), 0), Move { log: Some(trace[pos].clone()), model: None }));
        }
        for step in machine.enabled(&state) {
            let next = machine.fire(&state, &step);
            match &step.event {
                Event::Activity(a) => {
                    if pos < n && trace[pos] == *a {
                        succ.push((next.clone(), pos + 1, (0, 0, 0), Move { log: Some(a.clone()), model: Some(step.clone()) }));
                    }
                    if deviations {
                        succ.push((next, pos, (1, 2 * (n - pos) + 1, 0), Move { log: None, model: Some(step) }));
                    }
                }
                Event::Tau => succ.push((next, pos, (0, 0, 1), Move { log: None, model: Some(step) })),
                Event::Open => succ.push((next, pos, (0, 0, n - pos + 1), Move { log: None, model: Some(step) })),
                Event::Close => succ.push((next, pos, (0, 0, pos + 1), Move { log: None, model: Some(step) })),
            }
        }

        for (s, p, c, mv) in succ {
            let ng = add(g, c);
            let key = (s, p);
            let target = match index.get(&key) {
                Some(&j) => {
                    if entries[j].closed || entries[j].g <= ng {
                        continue;
                    }
                    entries[j].g = ng;
                    entries[j].parent = Some((idx, mv));
                    j
                }
                None => {
                    let j = entries.len();
                    entries.push(Entry { state: key.0.clone(), pos: p, g: ng, parent: Some((idx, mv)), closed: false });
                    index.insert(key, j);
                    j
                }
            };
            seq += 1;
            heap.push(Reverse((add(ng, h(p)), ng, seq, target)));
        }
    }
    Ok(None)
}

fn reconstruct(entries: &[Entry], mut idx: usize) -> Vec<Move> {
    let mut moves = Vec::new();
    while let Some((prev, mv)) = &entries[idx].parent {
        moves.push(mv.clone());
        idx = *prev;
    }
    moves.reverse();
    moves
}
