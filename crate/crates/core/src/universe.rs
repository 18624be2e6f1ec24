//! Finitely-presented computer universes.
//!
//! A universe is a total bit-transition system with one output label per
//! state. The computer denoted by state `q` is the map `x ↦ out(step*(q, x))`.
//! Non-halting is modelled by the [`Output::Undefined`] label, never by
//! divergence, so evaluation, emulation and every probability below are
//! exactly computable.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Longest output string a universe may carry.
pub const MAX_OUTPUT_LEN: usize = 64;

/// The result of running a computer on one input.
///
/// `Undefined` stands for the non-halting result ∞. It sorts after every
/// defined string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Defined(BitString),
    Undefined,
}

impl Output {
    pub fn defined(s: &str) -> Result<Self> {
        Ok(Output::Defined(s.parse()?))
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Output::Defined(_))
    }

    pub fn as_bits(&self) -> Option<&BitString> {
        match self {
            Output::Defined(b) => Some(b),
            Output::Undefined => None,
        }
    }

    /// Command-line token: the bits, `eps` for the empty string, `undef` for ∞.
    pub fn token(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Defined(b) if b.is_empty() => f.write_str("eps"),
            Output::Defined(b) => write!(f, "{b}"),
            Output::Undefined => f.write_str("undef"),
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "undef" => Ok(Output::Undefined),
            "eps" | "" => Ok(Output::Defined(BitString::empty())),
            bits => Ok(Output::Defined(bits.parse()?)),
        }
    }
}

impl From<BitString> for Output {
    fn from(b: BitString) -> Self {
        Output::Defined(b)
    }
}

/// Dense index of a state inside one universe; file order is canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for StateId {
    fn from(i: usize) -> Self {
        StateId(i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    next: Vec<[StateId; 2]>,
    out: Vec<Output>,
    minimized: bool,
}

impl Universe {
    /// Builds a universe from per-state `(t0, t1)` successors and outputs,
    /// reporting every violated constraint at once.
    pub fn new(next: Vec<[StateId; 2]>, out: Vec<Output>) -> Result<Self> {
        let mut problems = Vec::new();
        if next.len() != out.len() {
            problems.push(format!(
                "{} transition rows but {} outputs",
                next.len(),
                out.len()
            ));
        }
        if next.is_empty() {
            problems.push("universe has no states".to_string());
        }
        for (q, row) in next.iter().enumerate() {
            for (bit, t) in row.iter().enumerate() {
                if t.0 >= next.len() {
                    problems.push(format!("state {q}: t{bit} = {} is not a state", t.0));
                }
            }
        }
        for (q, o) in out.iter().enumerate() {
            if let Output::Defined(b) = o {
                if b.len() > MAX_OUTPUT_LEN {
                    problems.push(format!(
                        "state {q}: output has {} bits, limit is {MAX_OUTPUT_LEN}",
                        b.len()
                    ));
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let mut u = Self {
            next,
            out,
            minimized: false,
        };
        u.minimized = u.minimize().0.len() == u.len();
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    pub fn is_minimized(&self) -> bool {
        self.minimized
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.len()).map(StateId)
    }

    pub fn contains(&self, q: StateId) -> bool {
        q.0 < self.len()
    }

    pub fn check_state(&self, q: StateId) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "state {q} is not in a universe of {} states",
                self.len()
            )))
        }
    }

    #[inline]
    pub fn step(&self, q: StateId, bit: bool) -> StateId {
        self.next[q.0][bit as usize]
    }

    pub fn successors(&self, q: StateId) -> [StateId; 2] {
        self.next[q.0]
    }

    #[inline]
    pub fn output(&self, q: StateId) -> &Output {
        &self.out[q.0]
    }

    pub fn outputs(&self) -> &[Output] {
        &self.out
    }

    /// `step*(q, x)`.
    pub fn run(&self, q: StateId, x: &BitString) -> StateId {
        x.bits().iter().fold(q, |s, &b| self.step(s, b))
    }

    /// `C(x)` for the computer denoted by `c`.
    pub fn evaluate(&self, c: StateId, x: &BitString) -> Result<Output> {
        self.check_state(c)?;
        Ok(self.out[self.run(c, x).0].clone())
    }

    /// The distinct outputs occurring in the universe, sorted.
    pub fn output_alphabet(&self) -> Vec<Output> {
        let mut v: Vec<_> = self.out.to_vec();
        v.sort();
        v.dedup();
        v
    }

    /// States reachable from `from` in zero or more steps.
    pub fn reachable_from(&self, from: impl IntoIterator<Item = StateId>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<StateId> = from.into_iter().collect();
        for q in &stack {
            seen[q.0] = true;
        }
        while let Some(q) = stack.pop() {
            for t in self.next[q.0] {
                if !seen[t.0] {
                    seen[t.0] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Merges states denoting the same function `{0,1}* → Output`.
    ///
    /// Moore-style partition refinement: start from the partition induced
    /// by `out`, split by successor blocks until the block count is stable.
    /// Blocks are numbered by first occurrence in state order, so an already
    /// minimal universe comes back unchanged. Returns the quotient and the
    /// map from old to new states.
    pub fn minimize(&self) -> (Universe, Vec<StateId>) {
        let n = self.len();
        let mut block = number_by_first_occurrence(self.out.iter());
        let mut count = block.iter().max().map_or(0, |m| m + 1);
        loop {
            let sig: Vec<(usize, usize, usize)> = (0..n)
                .map(|q| {
                    let [t0, t1] = self.next[q];
                    (block[q], block[t0.0], block[t1.0])
                })
                .collect();
            let refined = number_by_first_occurrence(sig.iter());
            let refined_count = refined.iter().max().map_or(0, |m| m + 1);
            block = refined;
            if refined_count == count {
                break;
            }
            count = refined_count;
        }
        let mut rep = vec![usize::MAX; count];
        for q in 0..n {
            if rep[block[q]] == usize::MAX {
                rep[block[q]] = q;
            }
        }
        let next = rep
            .iter()
            .map(|&q| {
                let [t0, t1] = self.next[q];
                [StateId(block[t0.0]), StateId(block[t1.0])]
            })
            .collect();
        let out = rep.iter().map(|&q| self.out[q].clone()).collect();
        let min = Universe {
            next,
            out,
            minimized: true,
        };
        (min, block.into_iter().map(StateId).collect())
    }

    /// True iff every `x` with `|x| = k` sends `c` and `d` to the same state.
    ///
    /// On a minimized universe this is exactly `C(x) = D(x)` for all `|x| ≥ k`.
    pub fn k_equivalent(&self, c: StateId, d: StateId, k: usize) -> bool {
        let mut frontier: HashSet<(StateId, StateId)> = HashSet::new();
        if c != d {
            frontier.insert(ordered(c, d));
        }
        for _ in 0..k {
            if frontier.is_empty() {
                break;
            }
            let mut next = HashSet::with_capacity(frontier.len() * 2);
            for &(p, q) in &frontier {
                for bit in [false, true] {
                    let (a, b) = (self.step(p, bit), self.step(q, bit));
                    if a != b {
                        next.insert(ordered(a, b));
                    }
                }
            }
            frontier = next;
        }
        frontier.is_empty()
    }

    /// Pairs `(c, d)` that are k-equivalent for some finite `k`, as a
    /// symmetric boolean matrix. A pair qualifies iff every infinite walk of
    /// the pair automaton reaches the diagonal.
    pub fn eventually_equivalent(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut good = vec![vec![false; n]; n];
        for (q, row) in good.iter_mut().enumerate() {
            row[q] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for p in 0..n {
                for q in 0..n {
                    if good[p][q] {
                        continue;
                    }
                    let ok = [false, true].iter().all(|&b| {
                        let (a, c) = (self.step(StateId(p), b), self.step(StateId(q), b));
                        good[a.0][c.0]
                    });
                    if ok {
                        good[p][q] = true;
                        changed = true;
                    }
                }
            }
        }
        good
    }

    /// Places `other` after `self`; states of `other` are shifted by the
    /// returned offset. The result is not minimized.
    pub fn disjoint_union(&self, other: &Universe) -> (Universe, usize) {
        let offset = self.len();
        let mut next = self.next.clone();
        next.extend(
            other
                .next
                .iter()
                .map(|[a, b]| [StateId(a.0 + offset), StateId(b.0 + offset)]),
        );
        let mut out = self.out.clone();
        out.extend(other.out.iter().cloned());
        let mut u = Universe {
            next,
            out,
            minimized: false,
        };
        u.minimized = u.minimize().0.len() == u.len();
        (u, offset)
    }
}

fn ordered(a: StateId, b: StateId) -> (StateId, StateId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn number_by_first_occurrence<'a, T: Eq + std::hash::Hash + 'a>(
    items: impl Iterator<Item = &'a T>,
) -> Vec<usize> {
    let mut ids: HashMap<&T, usize> = HashMap::new();
    items
        .map(|it| {
            let fresh = ids.len();
            *ids.entry(it).or_insert(fresh)
        })
        .collect()
}

/// Shortest (then lexicographically least) input on which the computers
/// `a:ca` and `b:cb` disagree, or `None` when they denote the same function.
pub fn distinguishing_input(
    a: &Universe,
    ca: StateId,
    b: &Universe,
    cb: StateId,
) -> Option<BitString> {
    let mut parent: BTreeMap<(StateId, StateId), ((StateId, StateId), bool)> = BTreeMap::new();
    let mut queue = VecDeque::from([(ca, cb)]);
    let mut seen = HashSet::from([(ca, cb)]);
    while let Some((p, q)) = queue.pop_front() {
        if a.output(p) != b.output(q) {
            let mut bits = Vec::new();
            let mut cur = (p, q);
            while cur != (ca, cb) {
                let (prev, bit) = parent[&cur];
                bits.push(bit);
                cur = prev;
            }
            bits.reverse();
            return Some(BitString::from_bits(bits));
        }
        for bit in [false, true] {
            let nxt = (a.step(p, bit), b.step(q, bit));
            if seen.insert(nxt) {
                parent.insert(nxt, ((p, q), bit));
                queue.push_back(nxt);
            }
        }
    }
    None
}

/// Functional equality of two computers, possibly in different universes.
pub fn same_function(a: &Universe, ca: StateId, b: &Universe, cb: StateId) -> bool {
    distinguishing_input(a, ca, b, cb).is_none()
}

/// Incremental construction of universes for the builders in
/// [`crate::constructions`].
#[derive(Debug, Default, Clone)]
pub struct UniverseBuilder {
    next: Vec<[Option<StateId>; 2]>,
    out: Vec<Output>,
}

impl UniverseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from a copy of `u`; its states keep their ids.
    pub fn from_universe(u: &Universe) -> Self {
        Self {
            next: u.next.iter().map(|[a, b]| [Some(*a), Some(*b)]).collect(),
            out: u.out.clone(),
        }
    }

    pub fn add_state(&mut self, out: Output) -> StateId {
        self.next.push([None, None]);
        self.out.push(out);
        StateId(self.out.len() - 1)
    }

    pub fn set_edge(&mut self, from: StateId, bit: bool, to: StateId) {
        self.next[from.0][bit as usize] = Some(to);
    }

    pub fn set_edges(&mut self, from: StateId, t0: StateId, t1: StateId) {
        self.next[from.0] = [Some(t0), Some(t1)];
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn build(self) -> Result<Universe> {
        let mut missing = Vec::new();
        let next = self
            .next
            .iter()
            .enumerate()
            .map(|(q, [a, b])| {
                if a.is_none() {
                    missing.push(format!("state {q}: missing 0-edge"));
                }
                if b.is_none() {
                    missing.push(format!("state {q}: missing 1-edge"));
                }
                [a.unwrap_or(StateId(0)), b.unwrap_or(StateId(0))]
            })
            .collect();
        if !missing.is_empty() {
            return Err(Error::Validation(missing));
        }
        Universe::new(next, self.out)
    }
}
