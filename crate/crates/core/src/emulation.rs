//! Emulation, computer sets, Φ-trees and the two complexity measures.
//!
//! On a minimized universe `C →^x D` holds exactly when `step*(C, x) = D`,
//! so emulation reduces to reachability in the transition graph.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph;
use crate::universe::{Output, StateId, Universe};

/// Period of a computer in the Φ-restricted process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Finite(u64),
    /// The computer never returns to itself.
    Infinite,
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Finite(d) => write!(f, "{d}"),
            Period::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetFlags {
    pub branching: bool,
    pub connected: bool,
    pub irreducible: bool,
    /// Meaningful only when `irreducible`.
    pub period: Period,
    pub aperiodic: bool,
}

/// An explicit subset Φ of a minimized universe.
///
/// Member order is the row order of every matrix built from the set.
#[derive(Debug)]
pub struct ComputerSet {
    universe: Arc<Universe>,
    members: Vec<StateId>,
    position: Vec<Option<usize>>,
    flags: OnceLock<SetFlags>,
}

impl Clone for ComputerSet {
    fn clone(&self) -> Self {
        Self {
            universe: Arc::clone(&self.universe),
            members: self.members.clone(),
            position: self.position.clone(),
            flags: self.flags.clone(),
        }
    }
}

impl PartialEq for ComputerSet {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.members == other.members
    }
}

impl ComputerSet {
    pub fn new(universe: Arc<Universe>, members: Vec<StateId>) -> Result<Self> {
        if !universe.is_minimized() {
            return Err(Error::contract(
                "computer sets require a minimized universe (run `minimize` first)",
            ));
        }
        let mut position = vec![None; universe.len()];
        for (i, &m) in members.iter().enumerate() {
            universe.check_state(m)?;
            if position[m.0].replace(i).is_some() {
                return Err(Error::domain(format!("state {m} listed twice")));
            }
        }
        Ok(Self {
            universe,
            members,
            position,
            flags: OnceLock::new(),
        })
    }

    /// Every state of the universe, in universe order.
    pub fn all(universe: Arc<Universe>) -> Result<Self> {
        let members = universe.states().collect();
        Self::new(universe, members)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn universe_arc(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn members(&self) -> &[StateId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.position.get(q.0).is_some_and(Option::is_some)
    }

    /// Row index of `q` in matrices over this set.
    pub fn position(&self, q: StateId) -> Option<usize> {
        self.position.get(q.0).copied().flatten()
    }

    pub fn check_member(&self, q: StateId) -> Result<usize> {
        self.position(q)
            .ok_or_else(|| Error::domain(format!("state {q} is not a member of the set")))
    }

    fn subset(&self, members: Vec<StateId>) -> ComputerSet {
        ComputerSet::new(Arc::clone(&self.universe), members)
            .expect("subset of a valid set is valid")
    }

    /// Φ^U: members that emulate every member.
    pub fn universal_members(&self) -> ComputerSet {
        let u = &self.universe;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&c| {
                let reach = u.reachable_from([c]);
                self.members.iter().all(|d| reach[d.0])
            })
            .collect();
        self.subset(members)
    }

    /// `\overline{Φ^U}`: universe states that emulate every member of Φ and
    /// are emulated by some member. Returned in universe order.
    pub fn closure_universal(&self) -> ComputerSet {
        let u = &self.universe;
        let from_phi = u.reachable_from(self.members.iter().copied());
        let members = u
            .states()
            .filter(|&c| {
                from_phi[c.0] && {
                    let reach = u.reachable_from([c]);
                    self.members.iter().all(|d| reach[d.0])
                }
            })
            .collect();
        self.subset(members)
    }

    pub fn is_connected(&self) -> bool {
        !self.universal_members().is_empty()
    }

    /// Every member emulates every member.
    pub fn is_irreducible(&self) -> bool {
        !self.is_empty() && self.universal_members().len() == self.len()
    }

    /// (i) no member reaches a member through a non-member, and (ii) every
    /// member reaches some member in one or more steps.
    pub fn is_branching(&self) -> bool {
        let u = &self.universe;
        let exits: Vec<StateId> = self
            .members
            .iter()
            .flat_map(|&c| u.successors(c))
            .filter(|&t| !self.contains(t))
            .collect();
        let beyond = u.reachable_from(exits);
        if self.members.iter().any(|m| beyond[m.0]) {
            return false;
        }
        self.members.iter().all(|&c| {
            let after_one = u.reachable_from(u.successors(c));
            self.members.iter().any(|m| after_one[m.0])
        })
    }

    /// Adjacency of the Φ-restricted step graph, indexed by member position.
    pub fn restricted_adjacency(&self) -> Vec<Vec<usize>> {
        self.members
            .iter()
            .map(|&c| {
                let mut out: Vec<usize> = self
                    .universe
                    .successors(c)
                    .iter()
                    .filter_map(|&t| self.position(t))
                    .collect();
                out.dedup();
                out
            })
            .collect()
    }

    /// Period of `c` in the Φ-restricted process.
    pub fn period_of(&self, c: StateId) -> Result<Period> {
        let i = self.check_member(c)?;
        let adj = self.restricted_adjacency();
        let comp = graph::scc(&adj);
        Ok(match graph::period(&adj, &comp, i) {
            Some(d) => Period::Finite(d),
            None => Period::Infinite,
        })
    }

    /// Cached structural flags; recomputation always agrees.
    pub fn flags(&self) -> SetFlags {
        *self.flags.get_or_init(|| self.compute_flags())
    }

    pub fn compute_flags(&self) -> SetFlags {
        let branching = self.is_branching();
        let connected = self.is_connected();
        let adj = self.restricted_adjacency();
        let comp = graph::scc(&adj);
        let irreducible = !self.is_empty()
            && comp.iter().all(|&c| c == comp[0])
            && (self.len() > 1 || !adj[0].is_empty());
        let period = if irreducible {
            match graph::period(&adj, &comp, 0) {
                Some(d) => Period::Finite(d),
                None => Period::Infinite,
            }
        } else {
            Period::Infinite
        };
        SetFlags {
            branching,
            connected,
            irreducible,
            period,
            aperiodic: irreducible && period == Period::Finite(1),
        }
    }

    /// Requires the set to be branching.
    pub fn require_branching(&self) -> Result<()> {
        if self.flags().branching {
            Ok(())
        } else {
            Err(Error::contract("the computer set is not branching"))
        }
    }
}

/// `(C →^x)`, the computer `c` emulates via `x`.
pub fn emulate_via(u: &Universe, c: StateId, x: &BitString) -> StateId {
    u.run(c, x)
}

/// A shortest witness, or the reason there is none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Complexity {
    Finite {
        length: usize,
        witness: BitString,
    },
    /// No input reaches the target at all.
    Unreachable,
    /// No input of length at most `bound` produces the string.
    NotFound {
        bound: usize,
    },
}

impl Complexity {
    pub fn length(&self) -> Option<usize> {
        match self {
            Complexity::Finite { length, .. } => Some(*length),
            _ => None,
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complexity::Finite { length, witness } => {
                let w = if witness.is_empty() {
                    "eps".to_string()
                } else {
                    witness.to_string()
                };
                write!(f, "{length} (witness {w})")
            }
            Complexity::Unreachable => f.write_str("unreachable"),
            Complexity::NotFound { bound } => write!(f, "not found within {bound} bits"),
        }
    }
}

/// BFS from `c`, 0-edges before 1-edges, so the first target discovered has
/// the lexicographically least among shortest witnesses.
fn shortest_witness(
    u: &Universe,
    c: StateId,
    max_len: usize,
    is_target: impl Fn(StateId) -> bool,
) -> Option<BitString> {
    if is_target(c) {
        return Some(BitString::empty());
    }
    let mut parent: Vec<Option<(StateId, bool)>> = vec![None; u.len()];
    let mut depth = vec![usize::MAX; u.len()];
    depth[c.0] = 0;
    let mut queue = VecDeque::from([c]);
    while let Some(q) = queue.pop_front() {
        if depth[q.0] >= max_len {
            continue;
        }
        for bit in [false, true] {
            let t = u.step(q, bit);
            if depth[t.0] != usize::MAX {
                continue;
            }
            depth[t.0] = depth[q.0] + 1;
            parent[t.0] = Some((q, bit));
            if is_target(t) {
                let mut bits = Vec::new();
                let mut cur = t;
                while let Some((p, b)) = parent[cur.0] {
                    bits.push(b);
                    cur = p;
                }
                bits.reverse();
                return Some(BitString::from_bits(bits));
            }
            queue.push_back(t);
        }
    }
    None
}

/// `K_C(D)`: length of the shortest `x` with `C →^x D`.
pub fn emulation_complexity(u: &Universe, c: StateId, d: StateId) -> Result<Complexity> {
    u.check_state(c)?;
    u.check_state(d)?;
    Ok(match shortest_witness(u, c, usize::MAX, |q| q == d) {
        Some(w) => Complexity::Finite {
            length: w.len(),
            witness: w,
        },
        None => Complexity::Unreachable,
    })
}

/// `K_C(s)`: length of the shortest program of at most `max_len` bits on
/// which `c` outputs `s`.
pub fn kolmogorov_complexity(
    u: &Universe,
    c: StateId,
    s: &Output,
    max_len: usize,
) -> Result<Complexity> {
    u.check_state(c)?;
    Ok(
        match shortest_witness(u, c, max_len, |q| u.output(q) == s) {
            Some(w) => Complexity::Finite {
                length: w.len(),
                witness: w,
            },
            None => Complexity::NotFound { bound: max_len },
        },
    )
}

/// The Φ-tree of a computer, cut at a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTree {
    pub root: StateId,
    pub depth: usize,
    /// `levels[d]` holds the nodes of length `d` with the member they reach,
    /// in lexicographic order.
    pub levels: Vec<Vec<(BitString, StateId)>>,
}

impl PhiTree {
    pub fn nodes_at(&self, depth: usize) -> impl Iterator<Item = &BitString> {
        self.levels[depth].iter().map(|(x, _)| x)
    }

    pub fn contains(&self, x: &BitString) -> bool {
        x.len() <= self.depth && self.levels[x.len()].iter().any(|(y, _)| y == x)
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

/// All `x` with `|x| ≤ depth` and `(C →^x) ∈ Φ`.
pub fn phi_tree(c: StateId, phi: &ComputerSet, depth: usize) -> Result<PhiTree> {
    phi.require_branching()?;
    phi.check_member(c)?;
    let u = phi.universe();
    let mut levels = vec![vec![(BitString::empty(), c)]];
    for _ in 0..depth {
        let prev = levels.last().expect("non-empty");
        let mut next = Vec::with_capacity(prev.len() * 2);
        for (x, q) in prev {
            for bit in [false, true] {
                let t = u.step(*q, bit);
                if phi.contains(t) {
                    next.push((x.pushed(bit), t));
                }
            }
        }
        levels.push(next);
    }
    Ok(PhiTree {
        root: c,
        depth,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::fixtures;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(u: &Arc<Universe>, ids: &[usize]) -> ComputerSet {
        ComputerSet::new(Arc::clone(u), ids.iter().map(|&i| StateId(i)).collect()).unwrap()
    }

    #[test]
    fn emulate_via_table_walk() {
        let u = fixtures::two_state();
        let (a, b) = (StateId(0), StateId(1));
        assert_eq!(emulate_via(&u, a, &BitString::empty()), a);
        assert_eq!(emulate_via(&u, a, &bs("1")), b);
        assert_eq!(emulate_via(&u, b, &bs("1")), a);
    }

    #[test]
    fn universal_members_and_closure() {
        let u = Arc::new(fixtures::two_state());
        assert_eq!(
            set(&u, &[0, 1]).universal_members().members(),
            &[StateId(0), StateId(1)]
        );
        assert_eq!(
            set(&u, &[0]).closure_universal().members(),
            &[StateId(0), StateId(1)]
        );

        let single = Arc::new(fixtures::constant(Output::Undefined));
        assert_eq!(set(&single, &[0]).universal_members().len(), 1);

        // A (0) reaches absorbing z (1), z reaches only itself
        let a_z = Arc::new(fixtures::reaches_absorbing());
        let phi = set(&a_z, &[0, 1]);
        assert_eq!(phi.universal_members().members(), &[StateId(0)]);
        // z is excluded from the closure: it does not emulate A
        assert_eq!(phi.closure_universal().members(), &[StateId(0)]);
    }

    #[test]
    fn closure_excludes_states_unreachable_from_phi() {
        // two disjoint self-loops with distinct outputs: {0} closure never contains 1
        let u = Arc::new(fixtures::two_loops());
        assert_eq!(set(&u, &[0]).closure_universal().members(), &[StateId(0)]);
    }

    #[test]
    fn branching_examples() {
        let u = Arc::new(fixtures::two_state());
        assert!(set(&u, &[0, 1]).is_branching());
        assert!(!set(&u, &[0]).is_branching());
        let z = Arc::new(fixtures::constant(Output::Undefined));
        assert!(set(&z, &[0]).is_branching());
    }

    #[test]
    fn phi_tree_examples() {
        let u = Arc::new(fixtures::two_state());
        let phi = set(&u, &[0, 1]);
        let t = phi_tree(StateId(0), &phi, 0).unwrap();
        assert_eq!(t.node_count(), 1);
        let t = phi_tree(StateId(0), &phi, 3).unwrap();
        assert_eq!(t.levels[3].len(), 8);

        let (fig, c) = fixtures::figure3();
        let fig = Arc::new(fig);
        let phi = ComputerSet::new(Arc::clone(&fig), fixtures::figure3_members()).unwrap();
        let t = phi_tree(c, &phi, 3).unwrap();
        let d2: Vec<String> = t.nodes_at(2).map(|x| x.to_string()).collect();
        assert_eq!(d2, ["00", "01", "10"]);
        let d3: Vec<String> = t.nodes_at(3).map(|x| x.to_string()).collect();
        assert_eq!(d3, ["001", "010", "100", "101"]);

        assert!(matches!(
            phi_tree(StateId(0), &set(&u, &[0]), 2),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn complexities() {
        let u = fixtures::two_state();
        let (a, b) = (StateId(0), StateId(1));
        assert_eq!(emulation_complexity(&u, a, a).unwrap().length(), Some(0));
        assert_eq!(
            emulation_complexity(&u, a, b).unwrap(),
            Complexity::Finite {
                length: 1,
                witness: bs("1")
            }
        );
        let loops = fixtures::two_loops();
        assert_eq!(
            emulation_complexity(&loops, StateId(0), StateId(1)).unwrap(),
            Complexity::Unreachable
        );

        let one = Output::defined("1").unwrap();
        assert_eq!(
            kolmogorov_complexity(&u, a, u.output(a), 4)
                .unwrap()
                .length(),
            Some(0)
        );
        assert_eq!(
            kolmogorov_complexity(&u, a, &one, 4).unwrap().length(),
            Some(1)
        );
        assert_eq!(
            kolmogorov_complexity(&u, a, &Output::Undefined, 4).unwrap(),
            Complexity::NotFound { bound: 4 }
        );
    }

    #[test]
    fn witness_is_lexicographically_least() {
        // from (id,0): length-1 inputs both print "0"; "10" and "11" print "1"
        let (t, _) = fixtures::toggle();
        let one = Output::defined("1").unwrap();
        let k = kolmogorov_complexity(&t, StateId(0), &one, 5).unwrap();
        assert_eq!(
            k,
            Complexity::Finite {
                length: 2,
                witness: bs("10")
            }
        );
    }

    #[test]
    fn flags_are_cached_and_consistent() {
        let (_, phi) = fixtures::toggle();
        let f = phi.flags();
        assert_eq!(f, phi.compute_flags());
        assert!(f.branching && f.irreducible && f.aperiodic && f.connected);
        let u = Arc::new(fixtures::two_cycle());
        let phi = set(&u, &[0, 1]);
        assert_eq!(phi.flags().period, Period::Finite(2));
        assert!(!phi.flags().aperiodic);
    }

    #[test]
    fn requires_minimized_universe() {
        let zero = Output::defined("0").unwrap();
        let raw = Universe::new(
            vec![[StateId(0); 2], [StateId(1); 2]],
            vec![zero.clone(), zero],
        )
        .unwrap();
        assert!(matches!(
            ComputerSet::all(Arc::new(raw)),
            Err(Error::Contract(_))
        ));
    }
}
