//! Small universes used throughout the tests, the CLI and the acceptance
//! suite.

use std::sync::Arc;

use crate::emulation::ComputerSet;
use crate::universe::{Output, StateId, Universe};

fn out(s: &str) -> Output {
    Output::defined(s).expect("fixture outputs are bit strings")
}

fn build(rows: &[(Output, usize, usize)]) -> Universe {
    let next = rows
        .iter()
        .map(|&(_, a, b)| [StateId(a), StateId(b)])
        .collect();
    let outs = rows.iter().map(|(o, _, _)| o.clone()).collect();
    Universe::new(next, outs).expect("fixture tables are well formed")
}

/// A ("0"): 0→A, 1→B. B ("1"): both bits → A.
pub fn two_state() -> Universe {
    build(&[(out("0"), 0, 1), (out("1"), 0, 0)])
}

/// A single state with both self-loops.
pub fn constant(o: Output) -> Universe {
    build(&[(o, 0, 0)])
}

/// A ("0") loops on 0 and falls into an absorbing Undefined state on 1.
pub fn reaches_absorbing() -> Universe {
    build(&[(out("0"), 0, 1), (Output::Undefined, 1, 1)])
}

/// Two disjoint self-loops printing "0" and "1".
pub fn two_loops() -> Universe {
    build(&[(out("0"), 0, 0), (out("1"), 1, 1)])
}

/// P ("0") and Q ("1"), every bit crossing over.
pub fn two_cycle() -> Universe {
    build(&[(out("0"), 1, 1), (out("1"), 0, 0)])
}

/// The worked Φ-tree example: root C = state 0, Φ = states 0..=5, state 6
/// is an Undefined sink outside Φ.
pub fn figure3() -> (Universe, StateId) {
    let z = 6;
    let u = build(&[
        (out("0"), 1, 2),  // C
        (out("1"), 3, 4),  // C0
        (out("00"), 5, z), // D = C1
        (out("01"), z, 0), // C00
        (out("10"), 0, z), // C01
        (out("11"), 0, 0), // E = C10
        (Output::Undefined, z, z),
    ]);
    (u, StateId(0))
}

pub fn figure3_members() -> Vec<StateId> {
    (0..6).map(StateId).collect()
}

/// States `(f, w)` for labelings `f ∈ {id, neg}` of the last bit `w`:
/// 0 = (id,0), 1 = (id,1), 2 = (neg,0), 3 = (neg,1). Bit 0 keeps the
/// labeling, bit 1 swaps it; the output is `f(w)`.
pub fn toggle() -> (Arc<Universe>, ComputerSet) {
    let u = Arc::new(build(&[
        (out("0"), 0, 3),
        (out("1"), 0, 3),
        (out("1"), 2, 1),
        (out("0"), 2, 1),
    ]));
    let phi = ComputerSet::all(Arc::clone(&u)).expect("toggle universe is minimized");
    (u, phi)
}
