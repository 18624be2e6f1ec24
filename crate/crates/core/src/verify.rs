//! Executable property checks. Every check is exact and stops at the first
//! violation, returning a description of it.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;

use crate::bits::BitString;
use crate::constructions::{
    fixtures, input_transform, k_equivalent_across, output_transform, prefix_constant, quotient_k,
    synchronizing_universe, transformed_k_equivalent, virus_machines, InputPermutationTable,
    OutputPermutation, PrefixProgramTable,
};
use crate::emulation::{emulate_via, emulation_complexity, kolmogorov_complexity, ComputerSet};
use crate::exact::{self, Dyadic, Rational};
use crate::format;
use crate::markov::{
    classify, n_step_by_tree, n_step_computer, stationary_exact, stationary_power, walk_rng,
    ChainClass, EmulationMatrix, Stationary,
};
use crate::probability::{
    output_frequency, prefix_weight_by_enumeration, ratio_bound_violations,
    string_distribution_from, string_distribution_n, string_lemma_violations, string_probability_n,
    string_probability_n_by_matrix,
};
use crate::random;
use crate::universe::{distinguishing_input, same_function, Output, StateId, Universe};

pub type Check<T = ()> = std::result::Result<T, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: crate::error::Result<T>) -> Check<T> {
    r.map_err(|e| e.to_string())
}

/// Every output of the universe plus Undefined, sorted.
fn outputs_with_undefined(u: &Universe) -> Vec<Output> {
    let mut o = u.output_alphabet();
    if !o.contains(&Output::Undefined) {
        o.push(Output::Undefined);
    }
    o.sort();
    o
}

/// `μ_C^{(m+n)}(D) = Σ_X μ_C^{(m)}(X) μ_X^{(n)}(D)` for all `C, D` and
/// `m, n ≤ max`.
pub fn check_chapman_kolmogorov(phi: &ComputerSet, max: usize) -> Check<usize> {
    let e = lift(EmulationMatrix::new(phi))?;
    let mut checks = 0;
    // rows[i][n] = δ_i E^n
    let rows: Vec<Vec<Vec<Dyadic>>> = (0..e.len())
        .map(|i| {
            let mut v = vec![Dyadic::zero(); e.len()];
            v[i] = Dyadic::one();
            let mut out = vec![v.clone()];
            for _ in 0..2 * max {
                v = e.apply(&v);
                out.push(v.clone());
            }
            out
        })
        .collect();
    for (i, ri) in rows.iter().enumerate() {
        for m in 0..=max {
            for n in 0..=max {
                for j in 0..e.len() {
                    let rhs: Dyadic = (0..e.len()).map(|x| &ri[m][x] * &rows[x][n][j]).sum();
                    ensure(ri[m + n][j] == rhs, || {
                        format!(
                            "Chapman-Kolmogorov fails for C={} D={} m={m} n={n}",
                            e.members()[i],
                            e.members()[j]
                        )
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(checks)
}

/// Path probabilities of every depth-`n` layer sum to 1, `n ≤ max`.
pub fn check_conservation(phi: &ComputerSet, c: StateId, max: usize) -> Check {
    for n in 0..=max {
        let total: Dyadic = lift(n_step_by_tree(c, phi, n))?.iter().sum();
        ensure(total == Dyadic::one(), || {
            format!("mass {total} at depth {n} from {c}")
        })?;
    }
    Ok(())
}

/// Tree enumeration and matrix power give the same n-step rows.
pub fn check_tree_matrix(phi: &ComputerSet, max: usize) -> Check {
    for &c in phi.members() {
        for n in 0..=max {
            ensure(
                lift(n_step_by_tree(c, phi, n))? == lift(n_step_computer(c, phi, n))?,
                || format!("tree and matrix disagree from {c} at n={n}"),
            )?;
        }
    }
    Ok(())
}

/// `π E = π` exactly, `Σπ = 1`, `π > 0` and rank `(Eᵀ - I) = N - 1`.
pub fn check_stationarity(phi: &ComputerSet) -> Check<Stationary> {
    let pi = lift(stationary_exact(phi))?;
    let e = lift(EmulationMatrix::new(phi))?;
    ensure(e.apply_rational(&pi.values) == pi.values, || {
        "π E ≠ π".into()
    })?;
    let total = pi.values.iter().fold(Rational::zero(), |a, b| a + b);
    ensure(total.is_one(), || format!("Σπ = {total}"))?;
    ensure(pi.values.iter().all(|v| *v > Rational::zero()), || {
        "π has a zero entry".into()
    })?;
    let n = e.len();
    let entries = e.entries();
    let m: Vec<Vec<Rational>> = (0..n)
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
    ensure(exact::rank(&m) + 1 == n, || {
        "rank of (Eᵀ - I) is not N - 1".into()
    })?;
    Ok(pi)
}

/// Power iteration stopped at `stop` lands within `tol` of the exact
/// vector; returns the iteration count.
pub fn check_power_match(
    phi: &ComputerSet,
    pi: &Stationary,
    stop: &Rational,
    tol: &Rational,
    max_iter: usize,
) -> Check<usize> {
    let p = lift(stationary_power(phi, stop, max_iter))?;
    for (a, b) in p.values.iter().zip(&pi.values) {
        ensure(exact::abs_diff(a, b) < *tol, || {
            format!(
                "power iterate is {} away",
                exact::render_decimal(&exact::abs_diff(a, b), 15)
            )
        })?;
    }
    Ok(p.iterations)
}

pub fn check_ratio_bounds(phi: &ComputerSet, pi: &Stationary) -> Check {
    match ratio_bound_violations(phi, pi).first() {
        None => Ok(()),
        Some((c, d)) => Err(format!("ratio bound fails for C={c} D={d}")),
    }
}

pub fn check_string_lemma(phi: &ComputerSet, pi: &Stationary) -> Check {
    match string_lemma_violations(phi, pi).first() {
        None => Ok(()),
        Some((c, s)) => Err(format!(
            "μ(s|Φ) ≥ μ(C|Φ)2^-K_C(s) fails for C={c} s={}",
            s.token()
        )),
    }
}

/// Output symmetry for a `Φ` closed under `σ`: `μ(C) = μ(σ∘C)`,
/// `μ(s) = μ(σ(s))`, orbit constancy with `μ(s) ≤ 1/|orbit|`, and
/// `μ(C|Φ) = μ(σ∘C|σ∘Φ)`, `μ(s|Φ) = μ(σ(s)|σ∘Φ)` in the relabeled
/// universe.
pub fn check_output_symmetry(phi: &ComputerSet, sigma: &OutputPermutation) -> Check<usize> {
    let u = phi.universe();
    let pi = lift(stationary_exact(phi))?;
    let (su, _) = lift(output_transform(u, sigma))?;
    let mut checks = 0;
    for (&c, pc) in pi.members.iter().zip(&pi.values) {
        let image = phi
            .members()
            .iter()
            .copied()
            .find(|&d| same_function(&su, c, u, d))
            .ok_or_else(|| format!("σ∘{c} is not in Φ"))?;
        ensure(pi.value(image) == Some(pc), || {
            format!("μ({c}) ≠ μ(σ∘{c}) = μ({image})")
        })?;
        checks += 1;
    }
    let dist = string_distribution_from(phi, &pi);
    for s in outputs_with_undefined(u) {
        let orbit = lift(sigma.orbit(&s))?;
        for t in &orbit {
            ensure(dist.get(t) == dist.get(&s), || {
                format!("μ(s|Φ) not constant on the orbit of {}", s.token())
            })?;
        }
        let bound = Rational::new(1.into(), (orbit.len() as i64).into());
        ensure(dist.get(&s) <= bound, || {
            format!("μ({}) exceeds 1/|orbit|", s.token())
        })?;
        checks += 1;
    }
    let sphi = lift(ComputerSet::new(Arc::new(su), phi.members().to_vec()))?;
    let spi = lift(stationary_exact(&sphi))?;
    ensure(spi.values == pi.values, || "μ(C|Φ) ≠ μ(σ∘C|σ∘Φ)".into())?;
    let sdist = string_distribution_from(&sphi, &spi);
    for s in outputs_with_undefined(u) {
        let image = lift(sigma.apply(&s))?;
        ensure(dist.get(&s) == sdist.get(&image), || {
            format!("μ({}|Φ) ≠ μ(σ(s)|σ∘Φ)", s.token())
        })?;
        checks += 1;
    }
    Ok(checks + 1)
}

/// The emulation matrix indexed through the relabeling equals the matrix
/// of the relabeled set.
pub fn check_output_transform_matrix(phi: &ComputerSet, sigma: &OutputPermutation) -> Check {
    let (su, map) = lift(output_transform(phi.universe(), sigma))?;
    let images: Vec<StateId> = phi.members().iter().map(|c| map[c.0]).collect();
    let sphi = lift(ComputerSet::new(Arc::new(su), images))?;
    let a = lift(EmulationMatrix::new(phi))?.entries();
    let b = lift(EmulationMatrix::new(&sphi))?.entries();
    ensure(a == b, || "relabeling changed the emulation matrix".into())
}

/// Class probabilities at level `k` are invariant under `I_σ`. The image
/// class of `[C]_k` is found by a direct check and confirmed on the
/// delay-line machine.
pub fn check_input_symmetry(
    phi: &ComputerSet,
    sigma: &InputPermutationTable,
    k: usize,
) -> Check<usize> {
    let u = phi.universe();
    let pi = lift(stationary_exact(phi))?;
    let q = lift(quotient_k(phi, k))?;
    let probs = q.class_probabilities(&pi);
    let (w, map) = lift(input_transform(u, sigma))?;
    let mut checks = 0;
    for &c in phi.members() {
        let d = phi
            .members()
            .iter()
            .copied()
            .find(|&d| transformed_k_equivalent(u, c, sigma, d, k))
            .ok_or_else(|| format!("I_σ({c}) has no {k}-equivalent member"))?;
        ensure(k_equivalent_across(&w, map[c.0], u, d, k), || {
            format!("delay line disagrees with the direct check for I_σ({c})")
        })?;
        let (a, b) = (
            q.class_of(c).expect("member"),
            q.class_of(d).expect("member"),
        );
        ensure(probs[a] == probs[b], || {
            format!(
                "μ([{c}]_{k}) = {} but μ([I_σ({c})]_{k}) = {}",
                exact::render(&probs[a]),
                exact::render(&probs[b])
            )
        })?;
        checks += 1;
    }
    Ok(checks)
}

/// `μ_{C_p}^{(n)}(s) = Σ_{|x| ≤ n, C(x) = s} 2^-|x|` for all `n ≤ max`
/// and every table output, and `Ω` reaches the Kraft sum.
pub fn check_prefix_equivalence(table: &PrefixProgramTable, max: usize) -> Check<usize> {
    let (u, root) = lift(prefix_constant(table))?;
    let mut outputs: Vec<BitString> = table.entries().iter().map(|(_, s)| s.clone()).collect();
    outputs.sort();
    outputs.dedup();
    let mut checks = 0;
    for n in 0..=max {
        for s in &outputs {
            let freq = lift(output_frequency(&u, root, n, &Output::Defined(s.clone())))?;
            let classical = table.classical_probability(n, s);
            ensure(freq == classical, || {
                format!("μ^({n})({s}) = {freq}, table gives {classical}")
            })?;
            if n <= 8 {
                let brute = lift(prefix_weight_by_enumeration(&u, root, n, s))?;
                ensure(brute == classical, || {
                    format!("enumeration gives {brute} for {s} at n={n}")
                })?;
            }
            checks += 1;
        }
    }
    let depth = table
        .entries()
        .iter()
        .map(|(p, _)| p.len())
        .max()
        .unwrap_or(0);
    let omega = lift(crate::probability::halting_probability(&u, root, depth))?;
    ensure(omega == table.kraft_sum(), || {
        format!("Ω = {omega}, Kraft sum {}", table.kraft_sum())
    })?;
    Ok(checks + 1)
}

/// Tree route and matrix route to `μ_C^{(n)}(s|Φ)` agree, and the string
/// distribution has total mass 1.
pub fn check_string_routes(phi: &ComputerSet, max: usize) -> Check {
    let outs = outputs_with_undefined(phi.universe());
    for &c in phi.members() {
        for n in 0..=max {
            for s in &outs {
                ensure(
                    lift(string_probability_n(c, phi, n, s))?
                        == lift(string_probability_n_by_matrix(c, phi, n, s))?,
                    || format!("string routes disagree for C={c} n={n} s={}", s.token()),
                )?;
            }
            ensure(
                lift(string_distribution_n(c, phi, n))?.total().is_one(),
                || format!("string mass ≠ 1 for C={c} n={n}"),
            )?;
        }
    }
    Ok(())
}

/// `μ_{M_i}^{(i)}(M_{i+1}) = 1 - 2^-i` for `i < max_index`.
pub fn check_virus_machines(max_index: usize) -> Check<Vec<Dyadic>> {
    let v = lift(virus_machines(
        max_index,
        &fixtures::two_state(),
        StateId(0),
    ))?;
    let u = Arc::new(v.universe.clone());
    let phi = lift(ComputerSet::all(Arc::clone(&u)))?;
    let mut probs = Vec::new();
    for i in 1..max_index {
        let d = lift(n_step_computer(v.machines[i - 1], &phi, i))?;
        let p = d[phi.position(v.machines[i]).expect("member")].clone();
        let want = lift(Dyadic::pow2_neg(i as u32).complement())?;
        ensure(p == want, || {
            format!("μ_M{i}^({i})(M{}) = {p}, expected {want}", i + 1)
        })?;
        probs.push(p);
    }
    for i in 1..max_index.min(5) {
        let ones = BitString::repeat(true, i);
        for s in BitString::all_of_len(i).filter(|s| s.count_ones() > 0) {
            for x in BitString::all_of_len(2) {
                let m = v.machines[i - 1];
                ensure(
                    lift(u.evaluate(m, &s.concat(&x)))? == lift(u.evaluate(m, &ones.concat(&x)))?,
                    || format!("M{i}({s}{x}) ≠ M{i}(1^{i}{x})"),
                )?;
            }
        }
    }
    Ok(probs)
}

/// The synchronizing set is positive recurrent and every member reaches
/// `V` with probability at least `2^-|u|` in `|u|` steps; returns `π(V)`.
pub fn check_synchronizing(word: &BitString, base: &Universe) -> Check<Rational> {
    let s = lift(synchronizing_universe(word, base))?;
    let class = classify(&s.phi).class;
    ensure(class == ChainClass::PositiveRecurrentFinite, || {
        format!("class is {class}")
    })?;
    let bound = Dyadic::pow2_neg(word.len() as u32);
    let j = s.phi.position(s.reference).expect("V is a member");
    for &c in s.phi.members() {
        let d = lift(n_step_computer(c, &s.phi, word.len()))?;
        ensure(d[j] >= bound, || {
            format!("μ_{c}^(ℓ)(V) = {} < {bound}", d[j])
        })?;
    }
    let pi = check_stationarity(&s.phi)?;
    let pv = pi.value(s.reference).expect("member").clone();
    ensure(pv >= bound.to_rational(), || {
        format!("π(V) = {} < {bound}", exact::render(&pv))
    })?;
    Ok(pv)
}

// -- suites --------------------------------------------------------------

pub const SUITES: &[&str] = &[
    "universe",
    "emulation",
    "markov",
    "constructions",
    "probability",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
}

pub fn run_suite(name: &str, seed: u64) -> crate::error::Result<Check<SuiteReport>> {
    let run = match name {
        "universe" => suite_universe,
        "emulation" => suite_emulation,
        "markov" => suite_markov,
        "constructions" => suite_constructions,
        "probability" => suite_probability,
        _ => {
            return Err(crate::error::Error::domain(format!(
                "unknown suite \"{name}\" (known: {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(run(seed).map(|checks| SuiteReport {
        name: name.to_string(),
        checks,
    }))
}

fn suite_universe(seed: u64) -> Check<usize> {
    let mut rng = walk_rng(seed, 1);
    let mut checks = 0;
    for _ in 0..30 {
        let n = rng.gen_range(1..=8);
        let u = random::random_universe(&mut rng, n);
        let (m, map) = u.minimize();
        ensure(m.is_minimized(), || "minimize did not set the flag".into())?;
        for c in m.states() {
            for d in m.states().filter(|&d| d != c) {
                let w = distinguishing_input(&m, c, &m, d);
                ensure(w.is_some_and(|w| w.len() <= m.len()), || {
                    format!("{c} and {d} not separated")
                })?;
            }
        }
        for c in u.states() {
            for x in (0..5).flat_map(BitString::all_of_len) {
                ensure(
                    lift(u.evaluate(c, &x))? == lift(m.evaluate(map[c.0], &x))?,
                    || format!("minimize changed {c} on {x}"),
                )?;
            }
        }
        for c in m.states() {
            for d in m.states() {
                for k in 0..3 {
                    if m.k_equivalent(c, d, k) {
                        ensure(m.k_equivalent(c, d, k + 1), || {
                            "k-equivalence not monotone".into()
                        })?;
                        ensure(m.k_equivalent(d, c, k), || {
                            "k-equivalence not symmetric".into()
                        })?;
                    }
                }
            }
            ensure(m.k_equivalent(c, c, 2), || {
                "k-equivalence not reflexive".into()
            })?;
        }
        let file = format::UniverseFile::new(m.clone());
        let text = format::serialize(&file);
        ensure(lift(format::load(&text))? == file, || {
            "serialization round trip failed".into()
        })?;
        checks += 1;
    }
    Ok(checks)
}

fn suite_emulation(seed: u64) -> Check<usize> {
    let mut rng = walk_rng(seed, 2);
    let mut checks = 0;
    for _ in 0..20 {
        let u = random::random_strongly_connected(&mut rng, 8);
        for c in u.states() {
            let x = BitString::from_bits((0..rng.gen_range(0..5)).map(|_| rng.gen_bool(0.5)));
            let y = BitString::from_bits((0..rng.gen_range(0..5)).map(|_| rng.gen_bool(0.5)));
            ensure(
                emulate_via(&u, c, &x.concat(&y)) == emulate_via(&u, emulate_via(&u, c, &x), &y),
                || "emulation is not transitive".into(),
            )?;
        }
        let k = |a: StateId, b: StateId| lift(emulation_complexity(&u, a, b)).map(|c| c.length());
        for a in u.states() {
            for v in u.states() {
                for d in u.states() {
                    if let (Some(ad), Some(av), Some(vd)) = (k(a, d)?, k(a, v)?, k(v, d)?) {
                        ensure(ad <= av + vd, || {
                            format!("K_{a}({d}) > K_{a}({v}) + K_{v}({d})")
                        })?;
                    }
                }
                for s in u.output_alphabet() {
                    let ks = |q: StateId| {
                        lift(kolmogorov_complexity(&u, q, &s, u.len())).map(|c| c.length())
                    };
                    if let (Some(as_), Some(av), Some(vs)) = (ks(a)?, k(a, v)?, ks(v)?) {
                        ensure(as_ <= av + vs, || {
                            format!("K_{a}(s) > K_{a}({v}) + K_{v}(s)")
                        })?;
                    }
                }
            }
        }
        checks += 1;
    }
    for _ in 0..40 {
        let n = rng.gen_range(1..=7);
        let u = Arc::new(random::random_universe(&mut rng, n).minimize().0);
        let members: Vec<StateId> = u.states().filter(|_| rng.gen_bool(0.5)).collect();
        if members.is_empty() {
            continue;
        }
        let phi = lift(ComputerSet::new(Arc::clone(&u), members))?;
        let uni = phi.universal_members();
        let clo = phi.closure_universal();
        if phi.is_connected() && clo.len() >= 2 {
            ensure(clo.is_branching(), || {
                "closure of a connected set is not branching".into()
            })?;
        }
        let irreducible = phi.is_irreducible();
        ensure(irreducible == (uni == phi), || {
            "irreducible ⇔ Φ = Φ^U fails".into()
        })?;
        let inside = phi.members().iter().all(|&c| clo.contains(c));
        ensure(irreducible == inside, || {
            "irreducible ⇔ Φ ⊆ closure fails".into()
        })?;
        checks += 1;
    }
    Ok(checks)
}

fn suite_markov(seed: u64) -> Check<usize> {
    let mut rng = walk_rng(seed, 3);
    let mut checks = 0;
    let stop = Rational::new(1.into(), BigIntPow::ten(13));
    let tol = Rational::new(1.into(), BigIntPow::ten(12));
    for _ in 0..20 {
        let u = random::random_positive_recurrent(&mut rng, 8);
        let phi = lift(ComputerSet::all(u))?;
        checks += check_chapman_kolmogorov(&phi, 4)?;
        check_conservation(&phi, phi.members()[0], 10)?;
        check_tree_matrix(&phi, 5)?;
        let pi = check_stationarity(&phi)?;
        check_power_match(&phi, &pi, &stop, &tol, 20_000)?;
        check_ratio_bounds(&phi, &pi)?;
        checks += 5;
    }
    let (fig, c) = fixtures::figure3();
    let phi = lift(ComputerSet::new(Arc::new(fig), fixtures::figure3_members()))?;
    check_conservation(&phi, c, 10)?;
    check_tree_matrix(&phi, 6)?;
    Ok(checks + 2)
}

fn suite_constructions(seed: u64) -> Check<usize> {
    let mut rng = walk_rng(seed, 4);
    let mut checks = 0;
    let (_, toggle) = fixtures::toggle();
    checks += check_output_symmetry(&toggle, &OutputPermutation::Complement)?;
    checks += check_input_symmetry(&toggle, &InputPermutationTable::flip(), 1)?;
    for _ in 0..10 {
        let u = random::random_complement_symmetric(&mut rng, 5);
        let phi = lift(ComputerSet::all(u))?;
        checks += check_output_symmetry(&phi, &OutputPermutation::Complement)?;
        check_output_transform_matrix(&phi, &OutputPermutation::Complement)?;
    }
    checks += check_virus_machines(6)?.len();
    for w in ["01", "11", "101"] {
        check_synchronizing(&w.parse().expect("bits"), &fixtures::two_state())?;
        checks += 1;
    }
    Ok(checks)
}

fn suite_probability(seed: u64) -> Check<usize> {
    let mut rng = walk_rng(seed, 5);
    let mut checks = 0;
    for _ in 0..10 {
        let t = random::random_prefix_table(&mut rng, 8, 6);
        checks += check_prefix_equivalence(&t, 10)?;
    }
    for _ in 0..10 {
        let u = random::random_positive_recurrent(&mut rng, 8);
        let phi = lift(ComputerSet::all(u))?;
        let pi = lift(stationary_exact(&phi))?;
        check_string_lemma(&phi, &pi)?;
        check_string_routes(&phi, 4)?;
        checks += 2;
    }
    Ok(checks)
}

struct BigIntPow;

impl BigIntPow {
    fn ten(k: u32) -> num_bigint::BigInt {
        num_bigint::BigInt::from(10u32).pow(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for name in SUITES {
            let r = run_suite(name, 1).unwrap();
            assert!(r.is_ok(), "{name}: {r:?}");
        }
        assert!(run_suite("nope", 1).is_err());
    }
}
