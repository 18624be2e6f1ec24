//! The emulation Markov process of a branching computer set.
//!
//! A fair random walk on the Φ-tree of a computer turns left or right with
//! probability ½ at every bifurcation and is forced where only one child
//! stays in Φ. Its one-step kernel is the emulation matrix `E_Φ`; n-step
//! probabilities are rows of `E_Φ^n`. Everything here is exact.

mod stationary;
mod transience;
mod walk;

pub use stationary::{stationary_exact, stationary_power, PowerIteration, Stationary};
pub use transience::{exact_survival, never_return_estimate, NeverReturnEstimate};
pub use walk::{
    empirical_distribution, sample_walk, sample_walks, total_variation, walk_rng, WalkTrace,
};

use std::fmt;

use crate::bits::BitString;
use crate::emulation::{ComputerSet, Period};
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Rational};
use crate::universe::StateId;

/// Largest `n` for which 2^n-sized enumerations are attempted.
pub const ENUMERATION_CAP: usize = 20;

/// `μ_{C^{-1}(Φ)}(x)`: probability that the fair walk on the Φ-tree of `c`
/// passes through node `x`.
pub fn path_probability(c: StateId, phi: &ComputerSet, x: &BitString) -> Result<Dyadic> {
    phi.require_branching()?;
    phi.check_member(c)?;
    let u = phi.universe();
    let mut q = c;
    let mut p = Dyadic::one();
    for (i, &bit) in x.bits().iter().enumerate() {
        let t = u.step(q, bit);
        if !phi.contains(t) {
            return Err(Error::domain(format!(
                "{x} is not in the Φ-tree of {c}: prefix of length {} leaves the set",
                i + 1
            )));
        }
        if phi.contains(u.step(q, !bit)) {
            p = p.half();
        }
        q = t;
    }
    Ok(p)
}

/// One outgoing move of the walk, by member position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub bit: bool,
    pub target: usize,
    /// ½ when the sibling stays in Φ, otherwise 1.
    pub probability: Dyadic,
}

/// `E_Φ` with rows indexed by emulator and columns by emulated computer,
/// both in member order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmulationMatrix {
    members: Vec<StateId>,
    moves: Vec<Vec<Move>>,
}

impl EmulationMatrix {
    pub fn new(phi: &ComputerSet) -> Result<Self> {
        phi.require_branching()?;
        let u = phi.universe();
        let moves = phi
            .members()
            .iter()
            .map(|&c| {
                let kids: Vec<(bool, usize)> = [false, true]
                    .into_iter()
                    .filter_map(|bit| phi.position(u.step(c, bit)).map(|j| (bit, j)))
                    .collect();
                let p = if kids.len() == 2 {
                    Dyadic::pow2_neg(1)
                } else {
                    Dyadic::one()
                };
                kids.into_iter()
                    .map(|(bit, target)| Move {
                        bit,
                        target,
                        probability: p.clone(),
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            members: phi.members().to_vec(),
            moves,
        })
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

    pub fn moves(&self, row: usize) -> &[Move] {
        &self.moves[row]
    }

    pub fn entry(&self, i: usize, j: usize) -> Dyadic {
        self.moves[i]
            .iter()
            .filter(|m| m.target == j)
            .map(|m| m.probability.clone())
            .sum()
    }

    /// Dense exact entries.
    pub fn entries(&self) -> Vec<Vec<Rational>> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .map(|j| self.entry(i, j).to_rational())
                    .collect()
            })
            .collect()
    }

    /// `v · E_Φ` for a dyadic row vector.
    pub fn apply(&self, v: &[Dyadic]) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::zero(); self.len()];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for m in &self.moves[i] {
                out[m.target] += &(vi * &m.probability);
            }
        }
        out
    }

    /// `v · E_Φ` for a rational row vector.
    pub fn apply_rational(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::from_integer(0.into()); self.len()];
        for (i, vi) in v.iter().enumerate() {
            for m in &self.moves[i] {
                out[m.target] += vi * m.probability.to_rational();
            }
        }
        out
    }

    /// `δ_i · E_Φ^n`.
    pub fn row_power(&self, i: usize, n: usize) -> Vec<Dyadic> {
        let mut v = vec![Dyadic::zero(); self.len()];
        v[i] = Dyadic::one();
        for _ in 0..n {
            v = self.apply(&v);
        }
        v
    }
}

/// `μ_C^{(n)}(·|Φ)` as the row `δ_c · E_Φ^n`, in member order.
pub fn n_step_computer(c: StateId, phi: &ComputerSet, n: usize) -> Result<Vec<Dyadic>> {
    let i = phi.check_member(c)?;
    let e = EmulationMatrix::new(phi)?;
    Ok(e.row_power(i, n))
}

/// The same distribution by summing path probabilities over the depth-`n`
/// layer of the Φ-tree. Independent of [`EmulationMatrix`].
pub fn n_step_by_tree(c: StateId, phi: &ComputerSet, n: usize) -> Result<Vec<Dyadic>> {
    if n > ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "tree enumeration depth {n} exceeds cap {ENUMERATION_CAP}"
        )));
    }
    phi.require_branching()?;
    phi.check_member(c)?;
    let u = phi.universe();
    // (state, path probability) for every tree node of the current length
    let mut layer = vec![(c, Dyadic::one())];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for (q, p) in &layer {
            let kids: Vec<StateId> = [false, true]
                .into_iter()
                .map(|b| u.step(*q, b))
                .filter(|t| phi.contains(*t))
                .collect();
            let share = if kids.len() == 2 { p.half() } else { p.clone() };
            next.extend(kids.into_iter().map(|t| (t, share.clone())));
        }
        layer = next;
    }
    let mut dist = vec![Dyadic::zero(); phi.len()];
    for (q, p) in layer {
        let j = phi.position(q).expect("tree nodes stay in Φ");
        dist[j] += &p;
    }
    Ok(dist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainClass {
    PositiveRecurrentFinite,
    PeriodicFinite,
    Reducible,
}

impl fmt::Display for ChainClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainClass::PositiveRecurrentFinite => "PositiveRecurrentFinite",
            ChainClass::PeriodicFinite => "PeriodicFinite",
            ChainClass::Reducible => "Reducible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainReport {
    pub irreducible: bool,
    pub period: Period,
    pub aperiodic: bool,
    pub class: ChainClass,
}

/// Finite-chain classification of the Φ-restricted process.
pub fn classify(phi: &ComputerSet) -> ChainReport {
    let f = phi.flags();
    let class = match (f.irreducible, f.aperiodic) {
        (true, true) => ChainClass::PositiveRecurrentFinite,
        (true, false) => ChainClass::PeriodicFinite,
        (false, _) => ChainClass::Reducible,
    };
    ChainReport {
        irreducible: f.irreducible,
        period: f.period,
        aperiodic: f.aperiodic,
        class,
    }
}

/// `d(C)`: gcd of the return times of `c` in the Φ-restricted process.
pub fn period(c: StateId, phi: &ComputerSet) -> Result<Period> {
    phi.period_of(c)
}

/// Converts a dyadic distribution to rationals.
pub fn to_rationals(v: &[Dyadic]) -> Vec<Rational> {
    v.iter().map(Dyadic::to_rational).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructions::fixtures;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn path_probabilities_on_figure3() {
        let (fig, c) = fixtures::figure3();
        let phi = ComputerSet::new(Arc::new(fig), fixtures::figure3_members()).unwrap();
        let p = |x: &str| path_probability(c, &phi, &bs(x)).unwrap().to_rational();
        assert_eq!(p(""), q(1, 1));
        assert_eq!(p("0"), q(1, 2));
        assert_eq!(p("1"), q(1, 2));
        assert_eq!(p("00"), q(1, 4));
        assert_eq!(p("01"), q(1, 4));
        assert_eq!(p("10"), q(1, 2));
        for x in ["001", "010", "100", "101"] {
            assert_eq!(p(x), q(1, 4), "{x}");
        }
        assert!(matches!(
            path_probability(c, &phi, &bs("11")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn emulation_matrix_examples() {
        let z = Arc::new(fixtures::constant(crate::universe::Output::Undefined));
        let e = EmulationMatrix::new(&ComputerSet::all(z).unwrap()).unwrap();
        assert_eq!(e.entries(), vec![vec![q(1, 1)]]);

        let u = Arc::new(fixtures::two_state());
        let e = EmulationMatrix::new(&ComputerSet::all(u).unwrap()).unwrap();
        assert_eq!(
            e.entries(),
            vec![vec![q(1, 2), q(1, 2)], vec![q(1, 1), q(0, 1)]]
        );

        let (_, toggle) = fixtures::toggle();
        let rows = EmulationMatrix::new(&toggle).unwrap().entries();
        let mut distinct = rows.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 2);
        for r in &rows {
            assert_eq!(r.iter().filter(|x| **x == q(1, 2)).count(), 2);
        }
    }

    #[test]
    fn n_step_examples() {
        let u = Arc::new(fixtures::two_state());
        let phi = ComputerSet::all(u).unwrap();
        let (a, b) = (StateId(0), StateId(1));
        assert_eq!(
            to_rationals(&n_step_computer(a, &phi, 0).unwrap()),
            vec![q(1, 1), q(0, 1)]
        );
        assert_eq!(
            n_step_computer(a, &phi, 2).unwrap()[0].to_rational(),
            q(3, 4)
        );
        assert_eq!(
            n_step_computer(b, &phi, 1).unwrap()[0].to_rational(),
            q(1, 1)
        );
        for n in 0..8 {
            assert_eq!(
                n_step_computer(a, &phi, n).unwrap(),
                n_step_by_tree(a, &phi, n).unwrap()
            );
        }
        assert!(matches!(
            n_step_by_tree(a, &phi, 21),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn periods_and_classes() {
        let u = Arc::new(fixtures::two_state());
        let phi = ComputerSet::all(u).unwrap();
        assert_eq!(period(StateId(0), &phi).unwrap(), Period::Finite(1));
        let r = classify(&phi);
        assert_eq!(r.class, ChainClass::PositiveRecurrentFinite);
        assert_eq!(r.period, Period::Finite(1));

        let z = Arc::new(fixtures::constant(crate::universe::Output::Undefined));
        assert_eq!(
            period(StateId(0), &ComputerSet::all(z).unwrap()).unwrap(),
            Period::Finite(1)
        );

        let cyc = ComputerSet::all(Arc::new(fixtures::two_cycle())).unwrap();
        let r = classify(&cyc);
        assert_eq!(
            (r.class, r.period),
            (ChainClass::PeriodicFinite, Period::Finite(2))
        );

        let loops = ComputerSet::all(Arc::new(fixtures::two_loops())).unwrap();
        assert_eq!(classify(&loops).class, ChainClass::Reducible);
    }

    #[test]
    fn conservation_on_figure3() {
        let (fig, c) = fixtures::figure3();
        let phi = ComputerSet::new(Arc::new(fig), fixtures::figure3_members()).unwrap();
        for n in 0..=10 {
            let total: Dyadic = n_step_by_tree(c, &phi, n).unwrap().iter().sum();
            assert_eq!(total, Dyadic::one(), "n = {n}");
        }
    }
}
