use std::fmt;
use std::sync::Arc;

use super::transforms::{
    fixes_computer, output_transform, transformed_k_equivalent, InputPermutationTable,
    OutputPermutation,
};
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::universe::{same_function, StateId, Universe};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    Output(OutputPermutation),
    /// Checked at the level of `k`-equivalence classes.
    Input {
        sigma: InputPermutationTable,
        k: usize,
    },
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Output(s) => write!(f, "output[{s}]"),
            Transform::Input { sigma, k } => write!(f, "input[{sigma}] at k={k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub transform: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub universe: Arc<Universe>,
    pub phi: ComputerSet,
    /// Members added beyond the images of the original ones.
    pub added: usize,
    pub checks: Vec<HypothesisCheck>,
}

impl Closure {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Whether `σ∘Φ ⊆ Φ` up to functional equality; names a witness otherwise.
pub fn output_closed(phi: &ComputerSet, sigma: &OutputPermutation) -> Result<Option<StateId>> {
    let u = phi.universe();
    let (su, _) = output_transform(u, sigma)?;
    Ok(phi
        .members()
        .iter()
        .copied()
        .find(|&c| !phi.members().iter().any(|&d| same_function(&su, c, u, d))))
}

/// Whether every `I_σ(C)` is `k`-equivalent to some member; names a
/// witness otherwise.
pub fn input_closed(phi: &ComputerSet, sigma: &InputPermutationTable, k: usize) -> Option<StateId> {
    let u = phi.universe();
    phi.members().iter().copied().find(|&c| {
        !phi.members()
            .iter()
            .any(|&d| transformed_k_equivalent(u, c, sigma, d, k))
    })
}

/// Adds `σ∘C` for every output transform until nothing new appears, then
/// checks every transform's closure hypothesis. Input transforms are only
/// checked: their images live in delay-line universes and are not added.
pub fn close_under(phi: &ComputerSet, transforms: &[Transform], cap: usize) -> Result<Closure> {
    let mut u = phi.universe().clone();
    let mut members: Vec<StateId> = phi.members().to_vec();
    let start = members.len();
    loop {
        let before = members.len();
        for t in transforms {
            let Transform::Output(sigma) = t else {
                continue;
            };
            let (su, _) = output_transform(&u, sigma)?;
            let (w, off) = u.disjoint_union(&su);
            let (m, map) = w.minimize();
            if m.len() > cap {
                return Err(Error::Resource(format!(
                    "closure under {t} exceeds the cap of {cap} states ({} needed)",
                    m.len()
                )));
            }
            let mut next: Vec<StateId> = members
                .iter()
                .flat_map(|c| [map[c.0], map[off + c.0]])
                .collect();
            next.sort();
            next.dedup();
            members = next;
            u = m;
        }
        if members.len() == before {
            break;
        }
    }
    members.sort();
    let universe = Arc::new(u);
    let closed = ComputerSet::new(Arc::clone(&universe), members)?;
    let mut checks = Vec::new();
    for t in transforms {
        let (holds, detail) = match t {
            Transform::Output(sigma) => {
                let fwd = output_closed(&closed, sigma)?;
                let back = output_closed(&closed, &sigma.inverse())?;
                match fwd.or(back) {
                    None => (true, "closed under σ and σ⁻¹".to_string()),
                    Some(c) => (false, format!("image of member {c} is outside Φ")),
                }
            }
            Transform::Input { sigma, k } if *k < sigma.order() => (
                false,
                format!("k = {k} is below the order {}", sigma.order()),
            ),
            Transform::Input { sigma, k } => match input_closed(&closed, sigma, *k) {
                None => (true, format!("every I_σ(C) is {k}-equivalent to a member")),
                Some(c) => (
                    false,
                    format!("I_σ({c}) is not {k}-equivalent to any member"),
                ),
            },
        };
        checks.push(HypothesisCheck {
            transform: t.to_string(),
            holds,
            detail,
        });
    }
    Ok(Closure {
        added: closed.len().saturating_sub(start),
        universe,
        phi: closed,
        checks,
    })
}

/// Every input permutation of order `1..=n` fixing the members of an
/// irreducible `Φ` as functions. Checked on the first member; irreducible
/// sets share their symmetry group.
pub fn input_symmetry_group(phi: &ComputerSet, n: usize) -> Result<Vec<InputPermutationTable>> {
    if !phi.is_irreducible() {
        return Err(Error::contract(
            "input_symmetry_group needs an irreducible set",
        ));
    }
    if n == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    let c = phi.members()[0];
    let mut group = Vec::new();
    for order in 1..=n {
        for sigma in InputPermutationTable::all(order)? {
            if fixes_computer(phi.universe(), c, &sigma) {
                group.push(sigma);
            }
        }
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::fixtures;
    use crate::universe::Output;

    fn out(s: &str) -> Output {
        s.parse().unwrap()
    }

    #[test]
    fn already_closed_is_unchanged() {
        let (t, phi) = fixtures::toggle();
        let c = close_under(
            &phi,
            &[Transform::Output(OutputPermutation::Complement)],
            10,
        )
        .unwrap();
        assert_eq!(c.universe.len(), t.len());
        assert_eq!(c.phi.len(), 4);
        assert_eq!(c.added, 0);
        assert!(c.all_hold());
    }

    #[test]
    fn two_state_under_complement() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let c = close_under(
            &phi,
            &[Transform::Output(OutputPermutation::Complement)],
            10,
        )
        .unwrap();
        assert_eq!(c.universe.len(), 4);
        assert_eq!(c.phi.len(), 4);
        assert!(c.all_hold());
    }

    #[test]
    fn orbit_growth_hits_the_cap() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let six: Vec<Output> = ["0", "1", "00", "01", "10", "11"]
            .iter()
            .map(|s| out(s))
            .collect();
        let sigma = OutputPermutation::cycle(&six).unwrap();
        match close_under(&phi, &[Transform::Output(sigma)], 10) {
            Err(Error::Resource(m)) => assert!(m.contains("output[")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn input_hypothesis_is_reported() {
        let (_, toggle) = fixtures::toggle();
        let flip = Transform::Input {
            sigma: InputPermutationTable::flip(),
            k: 1,
        };
        assert!(close_under(&toggle, std::slice::from_ref(&flip), 10)
            .unwrap()
            .all_hold());
        let two = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let c = close_under(&two, &[flip], 10).unwrap();
        assert!(!c.all_hold());
    }

    #[test]
    fn symmetry_groups() {
        let two = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let g = input_symmetry_group(&two, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_identity());

        let (_, toggle) = fixtures::toggle();
        assert_eq!(input_symmetry_group(&toggle, 1).unwrap().len(), 2);
        assert!(input_symmetry_group(&toggle, 4).is_err());
    }
}
