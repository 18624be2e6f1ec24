use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::universe::{Output, StateId};

/// The generator behind every sampled quantity: ChaCha8 keyed by `seed`,
/// on stream `stream`.
pub fn walk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub start: StateId,
    pub bits: BitString,
    pub visited: Vec<StateId>,
    pub outputs: Vec<Output>,
    pub seed: u64,
    pub stream: u64,
}

impl WalkTrace {
    pub fn end(&self) -> StateId {
        *self.visited.last().expect("a trace visits its start")
    }
}

/// `seed,bits,states,outputs` with `;` inside list fields.
impl fmt::Display for WalkTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = if self.bits.is_empty() {
            "eps".to_string()
        } else {
            self.bits.to_string()
        };
        let states: Vec<String> = self.visited.iter().map(|s| s.to_string()).collect();
        let outs: Vec<String> = self.outputs.iter().map(Output::token).collect();
        write!(
            f,
            "{},{},{},{}",
            self.seed,
            bits,
            states.join(";"),
            outs.join(";")
        )
    }
}

fn walk(c: StateId, phi: &ComputerSet, n: usize, seed: u64, stream: u64) -> WalkTrace {
    let u = phi.universe();
    let mut rng = walk_rng(seed, stream);
    let mut q = c;
    let mut bits = BitString::empty();
    let mut visited = Vec::with_capacity(n + 1);
    let mut outputs = Vec::with_capacity(n + 1);
    visited.push(q);
    outputs.push(u.output(q).clone());
    for _ in 0..n {
        let [t0, t1] = u.successors(q);
        let bit = match (phi.contains(t0), phi.contains(t1)) {
            (true, true) => rng.gen::<bool>(),
            (true, false) => false,
            (false, true) => true,
            (false, false) => unreachable!("branching sets have no dead ends"),
        };
        q = u.step(q, bit);
        bits.push(bit);
        visited.push(q);
        outputs.push(u.output(q).clone());
    }
    WalkTrace {
        start: c,
        bits,
        visited,
        outputs,
        seed,
        stream,
    }
}

/// One walk of `n` steps on stream 0.
pub fn sample_walk(c: StateId, phi: &ComputerSet, n: usize, seed: u64) -> Result<WalkTrace> {
    phi.require_branching()?;
    phi.check_member(c)?;
    Ok(walk(c, phi, n, seed, 0))
}

/// `count` walks; walk `i` uses stream `i`, so the result does not depend
/// on `workers`.
pub fn sample_walks(
    c: StateId,
    phi: &ComputerSet,
    n: usize,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<WalkTrace>> {
    phi.require_branching()?;
    phi.check_member(c)?;
    if workers == 0 {
        return Err(Error::domain("workers must be at least 1"));
    }
    let per = count.div_ceil(workers).max(1);
    let parts: Vec<Vec<WalkTrace>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..count)
            .step_by(per)
            .map(|lo| {
                let hi = (lo + per).min(count);
                s.spawn(move || {
                    (lo..hi)
                        .map(|i| walk(c, phi, n, seed, i as u64))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("walk worker panicked"))
            .collect()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Fraction of traces ending at each member.
pub fn empirical_distribution(phi: &ComputerSet, traces: &[WalkTrace]) -> Vec<Rational> {
    let mut counts = vec![0u64; phi.len()];
    for t in traces {
        if let Some(i) = phi.position(t.end()) {
            counts[i] += 1;
        }
    }
    let total = BigInt::from(traces.len().max(1));
    counts
        .into_iter()
        .map(|k| Rational::new(BigInt::from(k), total.clone()))
        .collect()
}

/// `½ Σ |a_i - b_i|`.
pub fn total_variation(a: &[Rational], b: &[Rational]) -> Rational {
    let sum = a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| {
        acc + crate::exact::abs_diff(x, y)
    });
    sum / Rational::from_integer(2.into())
}
