//! Seeded random universes and program tables for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;
use crate::constructions::PrefixProgramTable;
use crate::emulation::ComputerSet;
use crate::markov::{classify, ChainClass};
use crate::universe::{Output, StateId, Universe};

/// Outputs drawn by the generators.
pub fn small_alphabet() -> Vec<Output> {
    ["", "0", "1", "01", "10"]
        .iter()
        .map(|s| Output::defined(s).expect("bit strings"))
        .chain([Output::Undefined])
        .collect()
}

fn random_output(rng: &mut impl Rng) -> Output {
    small_alphabet()
        .choose(rng)
        .cloned()
        .expect("alphabet is non-empty")
}

/// A random universe with `n` states, not necessarily minimized.
pub fn random_universe(rng: &mut impl Rng, n: usize) -> Universe {
    let next = (0..n)
        .map(|_| [StateId(rng.gen_range(0..n)), StateId(rng.gen_range(0..n))])
        .collect();
    let out = (0..n).map(|_| random_output(rng)).collect();
    Universe::new(next, out).expect("random tables are total")
}

/// A minimized strongly connected universe built from at most `max_states`
/// states: a random cycle through every state on one bit of each state,
/// random targets on the other.
pub fn random_strongly_connected(rng: &mut impl Rng, max_states: usize) -> Universe {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut next = vec![[StateId(0); 2]; n];
    for (k, &q) in order.iter().enumerate() {
        let succ = order[(k + 1) % n];
        let bit = rng.gen_range(0..2);
        next[q][bit] = StateId(succ);
        next[q][1 - bit] = StateId(rng.gen_range(0..n));
    }
    let out = (0..n).map(|_| random_output(rng)).collect();
    let u = Universe::new(next, out).expect("random tables are total");
    u.minimize().0
}

/// A strongly connected universe whose full set is PositiveRecurrentFinite.
pub fn random_positive_recurrent(rng: &mut impl Rng, max_states: usize) -> Arc<Universe> {
    loop {
        let u = Arc::new(random_strongly_connected(rng, max_states));
        let phi = ComputerSet::all(Arc::clone(&u)).expect("minimized");
        if classify(&phi).class == ChainClass::PositiveRecurrentFinite {
            return u;
        }
    }
}

/// A positive-recurrent universe closed under output complement: states
/// `(q, f)` of a random base print `out(q)` complemented when `f` is set,
/// and bits toggle `f` along random edges.
pub fn random_complement_symmetric(rng: &mut impl Rng, max_base: usize) -> Arc<Universe> {
    loop {
        let base = random_strongly_connected(rng, max_base);
        let n = base.len();
        let mut next = Vec::with_capacity(2 * n);
        let mut out = Vec::with_capacity(2 * n);
        for q in base.states() {
            let o = base.output(q);
            let flipped = match o {
                Output::Defined(b) => Output::Defined(b.complement()),
                Output::Undefined => Output::Undefined,
            };
            // (q, 0) goes to a random copy of each successor; the twin
            // (q, 1) goes to the other copy
            let row = [false, true].map(|bit| 2 * base.step(q, bit).0 + rng.gen_range(0..2));
            next.push(row.map(StateId));
            next.push(row.map(|t| StateId(t ^ 1)));
            out.push(o.clone());
            out.push(flipped);
        }
        let u = Universe::new(next, out).expect("doubled tables are total");
        let u = Arc::new(u.minimize().0);
        let phi = ComputerSet::all(Arc::clone(&u)).expect("minimized");
        if classify(&phi).class == ChainClass::PositiveRecurrentFinite {
            return u;
        }
    }
}

/// A random prefix-free table with programs of length at most `max_depth`.
pub fn random_prefix_table(
    rng: &mut impl Rng,
    max_depth: usize,
    max_programs: usize,
) -> PrefixProgramTable {
    let mut entries: Vec<(BitString, BitString)> = Vec::new();
    for _ in 0..rng.gen_range(0..=max_programs) {
        let len = rng.gen_range(1..=max_depth.max(1));
        let p = BitString::from_bits((0..len).map(|_| rng.gen_bool(0.5)));
        if entries
            .iter()
            .any(|(q, _)| q.is_prefix_of(&p) || p.is_prefix_of(q))
        {
            continue;
        }
        let s = BitString::from_bits((0..rng.gen_range(0..3)).map(|_| rng.gen_bool(0.5)));
        entries.push((p, s));
    }
    PrefixProgramTable::new(entries).expect("generated prefix-free")
}
