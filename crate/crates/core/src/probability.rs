//! Output frequencies, string probabilities and the weighted-average
//! identity.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::bits::BitString;
use crate::constructions::{completeness_violations, input_closed, InputPermutationTable};
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Rational};
use crate::markov::{
    classify, n_step_by_tree, n_step_computer, stationary_exact, ChainClass, Stationary,
    ENUMERATION_CAP,
};
use crate::universe::{Output, StateId, Universe};

/// A distribution over outputs. Undefined is always present so that the
/// total is exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringDistribution {
    entries: BTreeMap<Output, Rational>,
}

impl StringDistribution {
    fn from_weights(weights: impl IntoIterator<Item = (Output, Rational)>) -> Self {
        let mut entries = BTreeMap::from([(Output::Undefined, Rational::zero())]);
        for (o, w) in weights {
            *entries.entry(o).or_insert_with(Rational::zero) += w;
        }
        Self { entries }
    }

    pub fn get(&self, s: &Output) -> Rational {
        self.entries.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Output, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "n = {n} exceeds the enumeration cap {ENUMERATION_CAP}"
        )));
    }
    Ok(())
}

/// Number of length-`n` inputs leading from `c` to each state.
fn landing_counts(u: &Universe, c: StateId, n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; u.len()];
    counts[c.0] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; u.len()];
        for q in u.states() {
            if counts[q.0] > 0 {
                for t in u.successors(q) {
                    next[t.0] += counts[q.0];
                }
            }
        }
        counts = next;
    }
    counts
}

/// `μ_C^{(n)}(s) = #{x ∈ {0,1}^n : C(x) = s} / 2^n`.
pub fn output_frequency(u: &Universe, c: StateId, n: usize, s: &Output) -> Result<Dyadic> {
    check_cap(n)?;
    u.check_state(c)?;
    let counts = landing_counts(u, c, n);
    let hits: u64 = u
        .states()
        .filter(|q| u.output(*q) == s)
        .map(|q| counts[q.0])
        .sum();
    Ok(Dyadic::new(hits, n as u32))
}

/// `μ_C^{(n)}(·)` over every output.
pub fn output_frequencies(u: &Universe, c: StateId, n: usize) -> Result<StringDistribution> {
    check_cap(n)?;
    u.check_state(c)?;
    let counts = landing_counts(u, c, n);
    Ok(StringDistribution::from_weights(u.states().map(|q| {
        (
            u.output(q).clone(),
            Dyadic::new(counts[q.0], n as u32).to_rational(),
        )
    })))
}

/// `μ_C^{(n)}(s|Φ)` as a sum of path probabilities over the depth-`n`
/// layer of the Φ-tree.
pub fn string_probability_n(c: StateId, phi: &ComputerSet, n: usize, s: &Output) -> Result<Dyadic> {
    let d = n_step_by_tree(c, phi, n)?;
    let u = phi.universe();
    Ok(phi
        .members()
        .iter()
        .zip(&d)
        .filter(|(q, _)| u.output(**q) == s)
        .map(|(_, p)| p)
        .sum())
}

/// The same value as `Σ_{U: U(λ)=s} μ_C^{(n)}(U|Φ)` from the matrix power.
pub fn string_probability_n_by_matrix(
    c: StateId,
    phi: &ComputerSet,
    n: usize,
    s: &Output,
) -> Result<Dyadic> {
    let d = n_step_computer(c, phi, n)?;
    let u = phi.universe();
    Ok(phi
        .members()
        .iter()
        .zip(&d)
        .filter(|(q, _)| u.output(**q) == s)
        .map(|(_, p)| p)
        .sum())
}

pub fn string_distribution_n(
    c: StateId,
    phi: &ComputerSet,
    n: usize,
) -> Result<StringDistribution> {
    let d = n_step_computer(c, phi, n)?;
    let u = phi.universe();
    Ok(StringDistribution::from_weights(
        phi.members()
            .iter()
            .zip(&d)
            .map(|(q, p)| (u.output(*q).clone(), p.to_rational())),
    ))
}

fn require_positive_recurrent(phi: &ComputerSet) -> Result<()> {
    let class = classify(phi).class;
    if class != ChainClass::PositiveRecurrentFinite {
        return Err(Error::contract(format!(
            "needs a PositiveRecurrentFinite set, class is {class}"
        )));
    }
    Ok(())
}

/// `μ(·|Φ) = Σ_{U: U(λ)=·} μ(U|Φ)` from a solved stationary vector.
pub fn string_distribution_from(phi: &ComputerSet, pi: &Stationary) -> StringDistribution {
    let u = phi.universe();
    StringDistribution::from_weights(
        pi.members
            .iter()
            .zip(&pi.values)
            .map(|(q, p)| (u.output(*q).clone(), p.clone())),
    )
}

pub fn stationary_string_distribution(phi: &ComputerSet) -> Result<StringDistribution> {
    require_positive_recurrent(phi)?;
    let pi = stationary_exact(phi)?;
    Ok(string_distribution_from(phi, &pi))
}

/// `μ(s|Φ)`.
pub fn stationary_string_probability(phi: &ComputerSet, s: &Output) -> Result<Rational> {
    Ok(stationary_string_distribution(phi)?.get(s))
}

/// `Ω_C^{(n)} = 1 - μ_C^{(n)}(Undefined)`.
pub fn halting_probability(u: &Universe, c: StateId, n: usize) -> Result<Dyadic> {
    output_frequency(u, c, n, &Output::Undefined)?.complement()
}

/// One row of an identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityRow {
    pub output: Output,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl IdentityRow {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightedAverage {
    Applicable(Vec<IdentityRow>),
    Inapplicable { hypothesis: String, reason: String },
}

impl WeightedAverage {
    /// True only when the hypotheses pass and every row is an equality.
    pub fn holds(&self) -> bool {
        matches!(self, WeightedAverage::Applicable(rows) if rows.iter().all(IdentityRow::holds))
    }
}

/// `μ(s|Φ) = Σ_U μ(U|Φ) μ_U^{(n)}(s)` for every `s` in the alphabet and
/// Undefined, after checking positive recurrence, relative completeness
/// at `k = n` and closure under every input permutation of order `≤ n`
/// at the level of `n`-equivalence.
pub fn weighted_average_identity(phi: &ComputerSet, n: usize) -> Result<WeightedAverage> {
    check_cap(n)?;
    let inapplicable = |hypothesis: &str, reason: String| {
        Ok(WeightedAverage::Inapplicable {
            hypothesis: hypothesis.to_string(),
            reason,
        })
    };
    if !phi.is_branching() {
        return inapplicable("branching", "Φ is not branching".into());
    }
    let class = classify(phi).class;
    if class != ChainClass::PositiveRecurrentFinite {
        return inapplicable("positive-recurrence", format!("class is {class}"));
    }
    if let Some((q, m)) = completeness_violations(phi, n).first() {
        return inapplicable(
            "completeness",
            format!("state {q} is {n}-equivalent to member {m} but outside Φ"),
        );
    }
    if n > 3 {
        return inapplicable(
            "input-closure",
            format!("closure under all input permutations of order {n} cannot be enumerated"),
        );
    }
    for order in 1..=n {
        for sigma in InputPermutationTable::all(order)? {
            if let Some(c) = input_closed(phi, &sigma, n) {
                return inapplicable(
                    "input-closure",
                    format!("I_σ({c}) for σ = {sigma} is not {n}-equivalent to any member"),
                );
            }
        }
    }
    let pi = stationary_exact(phi)?;
    let lhs = string_distribution_from(phi, &pi);
    let u = phi.universe();
    let mut rhs: BTreeMap<Output, Rational> = BTreeMap::new();
    for (q, p) in pi.members.iter().zip(&pi.values) {
        for (o, f) in output_frequencies(u, *q, n)?.iter() {
            *rhs.entry(o.clone()).or_insert_with(Rational::zero) += p * f;
        }
    }
    let mut outputs = u.output_alphabet();
    if !outputs.contains(&Output::Undefined) {
        outputs.push(Output::Undefined);
    }
    outputs.sort();
    Ok(WeightedAverage::Applicable(
        outputs
            .into_iter()
            .map(|o| IdentityRow {
                lhs: lhs.get(&o),
                rhs: rhs.get(&o).cloned().unwrap_or_else(Rational::zero),
                output: o,
            })
            .collect(),
    ))
}

/// Result of the string Chapman–Kolmogorov check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkReport {
    pub rows: Vec<IdentityRow>,
    pub max_discrepancy: Rational,
}

/// `μ_C^{(m+n)}(s|Φ) = Σ_U μ_C^{(m)}(U|Φ) μ_U^{(n)}(s|Φ)` for every `s`.
pub fn string_ck_check(phi: &ComputerSet, c: StateId, m: usize, n: usize) -> Result<CkReport> {
    let u = phi.universe();
    let mut outputs = u.output_alphabet();
    if !outputs.contains(&Output::Undefined) {
        outputs.push(Output::Undefined);
    }
    outputs.sort();
    let lhs = string_distribution_n(c, phi, m + n)?;
    let first = n_step_computer(c, phi, m)?;
    let later: Vec<StringDistribution> = phi
        .members()
        .iter()
        .map(|&x| string_distribution_n(x, phi, n))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(outputs.len());
    let mut worst = Rational::zero();
    for o in outputs {
        let rhs = first
            .iter()
            .zip(&later)
            .fold(Rational::zero(), |acc, (p, d)| {
                acc + p.to_rational() * d.get(&o)
            });
        let row = IdentityRow {
            lhs: lhs.get(&o),
            rhs,
            output: o,
        };
        worst = worst.max(crate::exact::abs_diff(&row.lhs, &row.rhs));
        rows.push(row);
    }
    Ok(CkReport {
        rows,
        max_discrepancy: worst,
    })
}

/// `K_C(s)` measured inside the Φ-tree: the shortest input keeping the
/// walk in `Φ` that reaches a member printing `s`.
pub fn tree_kolmogorov(phi: &ComputerSet, c: StateId, s: &Output) -> Option<usize> {
    let u = phi.universe();
    let mut dist = vec![usize::MAX; u.len()];
    dist[c.0] = 0;
    let mut queue = std::collections::VecDeque::from([c]);
    while let Some(q) = queue.pop_front() {
        if u.output(q) == s {
            return Some(dist[q.0]);
        }
        for t in u.successors(q) {
            if phi.contains(t) && dist[t.0] == usize::MAX {
                dist[t.0] = dist[q.0] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

/// `K_C(D)` inside the Φ-tree.
pub fn tree_emulation_complexity(phi: &ComputerSet, c: StateId, d: StateId) -> Option<usize> {
    let u = phi.universe();
    let mut dist = vec![usize::MAX; u.len()];
    dist[c.0] = 0;
    let mut queue = std::collections::VecDeque::from([c]);
    while let Some(q) = queue.pop_front() {
        if q == d {
            return Some(dist[q.0]);
        }
        for t in u.successors(q) {
            if phi.contains(t) && dist[t.0] == usize::MAX {
                dist[t.0] = dist[q.0] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

/// Violations of `μ(s|Φ) ≥ μ(C|Φ) 2^{-K_C(s)}` as `(C, s)` pairs.
pub fn string_lemma_violations(phi: &ComputerSet, pi: &Stationary) -> Vec<(StateId, Output)> {
    let dist = string_distribution_from(phi, pi);
    let mut bad = Vec::new();
    for (&c, pc) in pi.members.iter().zip(&pi.values) {
        for (s, ps) in dist.iter() {
            if let Some(k) = tree_kolmogorov(phi, c, s) {
                if *ps < pc * crate::exact::pow2_neg(k as u32) {
                    bad.push((c, s.clone()));
                }
            }
        }
    }
    bad
}

/// Violations of `2^{-K_C(D)} ≤ π_D/π_C ≤ 2^{K_D(C)}` as `(C, D)` pairs.
pub fn ratio_bound_violations(phi: &ComputerSet, pi: &Stationary) -> Vec<(StateId, StateId)> {
    let mut bad = Vec::new();
    for (&c, pc) in pi.members.iter().zip(&pi.values) {
        for (&d, pd) in pi.members.iter().zip(&pi.values) {
            let ratio = pd / pc;
            let lower =
                tree_emulation_complexity(phi, c, d).map(|k| crate::exact::pow2_neg(k as u32));
            let upper = tree_emulation_complexity(phi, d, c).map(|k| crate::exact::pow2(k as u32));
            let ok = lower.is_none_or(|l| l <= ratio) && upper.is_none_or(|h| ratio <= h);
            if !ok {
                bad.push((c, d));
            }
        }
    }
    bad
}

/// Enumerates the prefix-constant identity `μ^{(n)}(s) = Σ_{|x| ≤ n, C(x) = s} 2^{-|x|}`
/// by brute force over all inputs of length `≤ n`, reading `C` as the
/// underlying prefix computer (defined only on whole programs).
pub fn prefix_weight_by_enumeration(
    u: &Universe,
    root: StateId,
    n: usize,
    s: &BitString,
) -> Result<Dyadic> {
    check_cap(n)?;
    let target = Output::Defined(s.clone());
    let mut total = Dyadic::zero();
    for len in 0..=n {
        for x in BitString::all_of_len(len) {
            let here = u.evaluate(root, &x)?;
            // x is a whole program when C_p(x) is defined but C_p(x minus last bit) is not
            let whole = here.is_defined()
                && (x.is_empty() || !u.evaluate(root, &x.slice(0..len - 1))?.is_defined());
            if whole && here == target {
                total += &Dyadic::pow2_neg(len as u32);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructions::{adjoin_bad, fixtures, prefix_constant, PrefixProgramTable};

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn out(s: &str) -> Output {
        s.parse().unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn example_table() -> PrefixProgramTable {
        PrefixProgramTable::new(vec![(bs("0"), bs("1")), (bs("10"), bs("00"))]).unwrap()
    }

    #[test]
    fn output_frequency_examples() {
        let u = fixtures::two_state();
        assert_eq!(
            output_frequency(&u, StateId(0), 0, &out("0")).unwrap(),
            Dyadic::one()
        );
        assert!(output_frequency(&u, StateId(0), 0, &out("1"))
            .unwrap()
            .is_zero());
        assert!(matches!(
            output_frequency(&u, StateId(0), 21, &out("1")),
            Err(Error::Resource(_))
        ));

        let (p, root) = prefix_constant(&example_table()).unwrap();
        let f = |s: &Output| output_frequency(&p, root, 2, s).unwrap().to_rational();
        assert_eq!(f(&out("1")), q(1, 2));
        assert_eq!(f(&out("00")), q(1, 4));
        assert_eq!(f(&Output::Undefined), q(1, 4));
        assert_eq!(output_frequencies(&p, root, 2).unwrap().total(), q(1, 1));

        let (w, b) = adjoin_bad(&u, StateId(0), &bs("111")).unwrap();
        assert!(output_frequency(&w, b, 1, &out("111")).unwrap() >= Dyadic::pow2_neg(1));
    }

    #[test]
    fn halting_probabilities() {
        let (p, root) = prefix_constant(&example_table()).unwrap();
        assert_eq!(
            halting_probability(&p, root, 2).unwrap().to_rational(),
            q(3, 4)
        );
        let (e, r) = prefix_constant(&PrefixProgramTable::new(vec![]).unwrap()).unwrap();
        let (t, s) =
            prefix_constant(&PrefixProgramTable::new(vec![(bs(""), bs("0"))]).unwrap()).unwrap();
        for n in 0..5 {
            assert!(halting_probability(&e, r, n).unwrap().is_zero());
            assert_eq!(halting_probability(&t, s, n).unwrap(), Dyadic::one());
        }
    }

    #[test]
    fn prefix_weights_match_the_table() {
        let t = example_table();
        let (p, root) = prefix_constant(&t).unwrap();
        for n in 0..6 {
            for s in ["1", "00"] {
                let by_table = t.classical_probability(n, &bs(s));
                assert_eq!(
                    prefix_weight_by_enumeration(&p, root, n, &bs(s)).unwrap(),
                    by_table
                );
                assert_eq!(output_frequency(&p, root, n, &out(s)).unwrap(), by_table);
            }
        }
    }

    #[test]
    fn string_probability_examples() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let a = StateId(0);
        assert_eq!(
            string_probability_n(a, &phi, 0, &out("0")).unwrap(),
            Dyadic::one()
        );
        assert_eq!(
            string_probability_n(a, &phi, 1, &out("0"))
                .unwrap()
                .to_rational(),
            q(1, 2)
        );
        for n in 0..6 {
            for s in [out("0"), out("1"), Output::Undefined] {
                assert_eq!(
                    string_probability_n(a, &phi, n, &s).unwrap(),
                    string_probability_n_by_matrix(a, &phi, n, &s).unwrap()
                );
            }
            assert_eq!(string_distribution_n(a, &phi, n).unwrap().total(), q(1, 1));
        }

        let (_, toggle) = fixtures::toggle();
        for &c in toggle.members() {
            let p = string_probability_n(c, &toggle, 1, &out("0")).unwrap();
            assert!(p.is_zero() || p == Dyadic::one());
        }
    }

    #[test]
    fn stationary_string_examples() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        assert_eq!(
            stationary_string_probability(&phi, &out("0")).unwrap(),
            q(2, 3)
        );
        let (_, toggle) = fixtures::toggle();
        assert_eq!(
            stationary_string_probability(&toggle, &out("0")).unwrap(),
            q(1, 2)
        );
        let z = ComputerSet::all(Arc::new(fixtures::constant(Output::Undefined))).unwrap();
        assert_eq!(
            stationary_string_probability(&z, &Output::Undefined).unwrap(),
            q(1, 1)
        );
        let cyc = ComputerSet::all(Arc::new(fixtures::two_cycle())).unwrap();
        assert!(matches!(
            stationary_string_probability(&cyc, &out("0")),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn weighted_average_on_toggle() {
        let (_, toggle) = fixtures::toggle();
        let WeightedAverage::Applicable(rows) = weighted_average_identity(&toggle, 1).unwrap()
        else {
            panic!("toggle satisfies the hypotheses")
        };
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.holds(), "{r:?}");
        }
        let zero = rows.iter().find(|r| r.output == out("0")).unwrap();
        assert_eq!(zero.lhs, q(1, 2));

        let two = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        assert!(matches!(
            weighted_average_identity(&two, 1).unwrap(),
            WeightedAverage::Inapplicable { ref hypothesis, .. } if hypothesis == "input-closure"
        ));
        assert!(weighted_average_identity(&two, 0).unwrap().holds());

        let z = ComputerSet::all(Arc::new(fixtures::constant(out("1")))).unwrap();
        for n in 0..3 {
            assert!(weighted_average_identity(&z, n).unwrap().holds());
        }
    }

    #[test]
    fn string_chapman_kolmogorov() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let r = string_ck_check(&phi, StateId(0), 1, 1).unwrap();
        let zero = r.rows.iter().find(|r| r.output == out("0")).unwrap();
        assert_eq!((zero.lhs.clone(), zero.rhs.clone()), (q(3, 4), q(3, 4)));
        assert!(r.max_discrepancy.is_zero());
        let (_, toggle) = fixtures::toggle();
        assert!(string_ck_check(&toggle, StateId(1), 2, 2)
            .unwrap()
            .max_discrepancy
            .is_zero());
    }

    #[test]
    fn lemma_and_ratio_bounds() {
        let phi = ComputerSet::all(Arc::new(fixtures::two_state())).unwrap();
        let pi = stationary_exact(&phi).unwrap();
        assert!(string_lemma_violations(&phi, &pi).is_empty());
        assert!(ratio_bound_violations(&phi, &pi).is_empty());
        // the lower bound is attained: π_B / π_A = 2^{-K_A(B)} = 1/2
        assert_eq!(&pi.values[1] / &pi.values[0], q(1, 2));
        assert_eq!(
            tree_emulation_complexity(&phi, StateId(0), StateId(1)),
            Some(1)
        );
    }
}
