use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{classify, ChainClass, EmulationMatrix};
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::universe::StateId;

/// A stationary probability vector in member order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stationary {
    pub members: Vec<StateId>,
    pub values: Vec<Rational>,
    pub class: ChainClass,
}

impl Stationary {
    pub fn value(&self, q: StateId) -> Option<&Rational> {
        self.members
            .iter()
            .position(|&m| m == q)
            .map(|i| &self.values[i])
    }

    /// False for periodic chains: the vector is invariant but `μ^{(n)}`
    /// does not converge to it.
    pub fn is_limit(&self) -> bool {
        self.class == ChainClass::PositiveRecurrentFinite
    }
}

/// Solves `π E_Φ = π`, `Σπ = 1` exactly.
///
/// Irreducible periodic sets are accepted and return their invariant
/// measure; reducible sets are rejected.
pub fn stationary_exact(phi: &ComputerSet) -> Result<Stationary> {
    let e = EmulationMatrix::new(phi)?;
    let report = classify(phi);
    if report.class == ChainClass::Reducible {
        return Err(Error::contract(
            "stationary_exact needs an irreducible set (class is Reducible)",
        ));
    }
    let n = e.len();
    let entries = e.entries();
    // a[j][i] = E[i][j] - δ_ij
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let mut v = entries[i][j].clone();
                    if i == j {
                        v -= Rational::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let r = exact::rank(&a);
    if r + 1 != n {
        return Err(Error::Internal(format!(
            "rank of (Eᵀ - I) is {r}, expected {} for an irreducible set",
            n - 1
        )));
    }
    a[n - 1] = vec![Rational::one(); n];
    let mut b = vec![Rational::zero(); n];
    b[n - 1] = Rational::one();
    let values = exact::solve(&a, &b)?;
    if values.iter().any(|v| *v <= Rational::zero()) {
        return Err(Error::Internal(
            "stationary vector has a non-positive entry".into(),
        ));
    }
    Ok(Stationary {
        members: e.members().to_vec(),
        values,
        class: report.class,
    })
}

/// Result of [`stationary_power`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerIteration {
    pub values: Vec<Rational>,
    pub iterations: usize,
    /// Max-norm distance between the last two iterates.
    pub last_difference: Rational,
}

/// Iterates `v ← v E_Φ` from the point mass on the first member until two
/// successive iterates are closer than `tol` in max norm.
///
/// Iterates are dyadic, so they are kept exactly as integer numerators over
/// a shared power of two.
pub fn stationary_power(
    phi: &ComputerSet,
    tol: &Rational,
    max_iter: usize,
) -> Result<PowerIteration> {
    let e = EmulationMatrix::new(phi)?;
    if classify(phi).class == ChainClass::Reducible {
        return Err(Error::contract(
            "stationary_power needs an irreducible set (class is Reducible)",
        ));
    }
    if *tol <= Rational::zero() {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = e.len();
    // twice the one-step weight: 1 for a ½ move, 2 for a forced move
    let moves: Vec<Vec<(usize, u32)>> = (0..n)
        .map(|i| {
            e.moves(i)
                .iter()
                .map(|m| (m.target, if m.probability.exponent() == 1 { 1 } else { 2 }))
                .collect()
        })
        .collect();

    let mut nums = vec![BigUint::zero(); n];
    nums[0] = BigUint::one();
    let mut exponent: u64 = 0;
    let mut last = Rational::zero();
    for it in 1..=max_iter {
        let mut next = vec![BigUint::zero(); n];
        for (i, v) in nums.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for &(j, w) in &moves[i] {
                next[j] += v * w;
            }
        }
        exponent += 1;
        let diff = next
            .iter()
            .zip(&nums)
            .map(|(a, b)| {
                (BigInt::from(a.clone()) - BigInt::from(b << 1u32))
                    .magnitude()
                    .clone()
            })
            .max()
            .unwrap_or_default();
        // diff / 2^exponent < tol
        let scale = BigUint::one() << exponent;
        last = Rational::new(BigInt::from(diff.clone()), BigInt::from(scale.clone()));
        nums = next;
        let (tn, td) = (tol.numer().magnitude(), tol.denom().magnitude());
        if diff * td < tn * &scale {
            let denom = BigInt::from(scale);
            return Ok(PowerIteration {
                values: nums
                    .into_iter()
                    .map(|v| Rational::new(BigInt::from(v), denom.clone()))
                    .collect(),
                iterations: it,
                last_difference: last,
            });
        }
        let shift = nums
            .iter()
            .filter_map(|v| v.trailing_zeros())
            .min()
            .unwrap_or(0)
            .min(exponent);
        if shift > 0 {
            for v in &mut nums {
                *v >>= shift;
            }
            exponent -= shift;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last_difference: exact::render_decimal(&last, 15),
    })
}
