use num_traits::Zero;

use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::markov::{EmulationMatrix, Stationary};
use crate::universe::StateId;

/// The partition of `Φ` into `k`-equivalence classes with the induced
/// class transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub k: usize,
    pub classes: Vec<Vec<StateId>>,
    pub matrix: Vec<Vec<Rational>>,
}

impl Quotient {
    pub fn class_of(&self, q: StateId) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&q))
    }

    /// Stationary mass of every class.
    pub fn class_probabilities(&self, pi: &Stationary) -> Vec<Rational> {
        self.classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&q| pi.value(q).cloned().unwrap_or_else(Rational::zero))
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    }
}

/// States of the universe outside `Φ` that are `k`-equivalent to a member.
pub fn completeness_violations(phi: &ComputerSet, k: usize) -> Vec<(StateId, StateId)> {
    let u = phi.universe();
    u.states()
        .filter(|q| !phi.contains(*q))
        .filter_map(|q| {
            phi.members()
                .iter()
                .find(|&&m| u.k_equivalent(q, m, k))
                .map(|&m| (q, m))
        })
        .collect()
}

pub fn quotient_k(phi: &ComputerSet, k: usize) -> Result<Quotient> {
    let e = EmulationMatrix::new(phi)?;
    if let Some((q, m)) = completeness_violations(phi, k).first() {
        return Err(Error::contract(format!(
            "Φ is not complete at k = {k}: state {q} is {k}-equivalent to member {m} but not in Φ"
        )));
    }
    let u = phi.universe();
    let mut classes: Vec<Vec<StateId>> = Vec::new();
    for &c in phi.members() {
        match classes.iter_mut().find(|cl| u.k_equivalent(cl[0], c, k)) {
            Some(cl) => cl.push(c),
            None => classes.push(vec![c]),
        }
    }
    let class_of = |q: StateId| {
        classes
            .iter()
            .position(|cl| cl.contains(&q))
            .expect("members are classified")
    };
    let row = |c: StateId| {
        let i = phi.position(c).expect("member");
        let mut r = vec![Rational::zero(); classes.len()];
        for m in e.moves(i) {
            r[class_of(e.members()[m.target])] += m.probability.to_rational();
        }
        r
    };
    let mut matrix = Vec::with_capacity(classes.len());
    for cl in &classes {
        let first = row(cl[0]);
        for &c in &cl[1..] {
            if row(c) != first {
                return Err(Error::contract(format!(
                    "class transition from [{}]_{k} depends on the representative ({} vs {c})",
                    cl[0], cl[0]
                )));
            }
        }
        matrix.push(first);
    }
    Ok(Quotient { k, classes, matrix })
}
