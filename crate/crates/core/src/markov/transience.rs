use rand::RngCore;

use super::walk::walk_rng;
use crate::constructions::VirusChain;
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Rational};

/// Samples per sub-seeded chunk. Fixed so that the split into chunks, and
/// hence every draw, is independent of the worker count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct NeverReturnEstimate {
    pub horizon: usize,
    pub samples: usize,
    pub survivors: usize,
    pub estimate: f64,
    /// 95% Wilson score interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: Rational,
}

/// `∏_{i=1}^{horizon-1} (1 - 2^-i)`.
pub fn exact_survival(horizon: usize) -> Dyadic {
    (1..horizon)
        .map(|i| Dyadic::pow2_neg(i as u32).complement().expect("2^-i ≤ 1"))
        .fold(Dyadic::one(), |acc, f| &acc * &f)
}

/// True when `i` fresh bits are all zero.
fn all_zero_block(rng: &mut impl RngCore, mut i: usize) -> bool {
    let mut zero = true;
    while i > 0 {
        let take = i.min(64);
        let word = rng.next_u64() >> (64 - take);
        zero &= word == 0;
        i -= take;
    }
    zero
}

fn survivors_in_chunk(seed: u64, chunk: usize, len: usize, horizon: usize) -> usize {
    let mut rng = walk_rng(seed, chunk as u64);
    (0..len)
        .filter(|_| (1..horizon).all(|i| !all_zero_block(&mut rng, i)))
        .count()
}

/// Monte-Carlo probability that a walk from `M_1` reaches `M_horizon`
/// without reading a block `0^i`.
pub fn never_return_estimate(
    chain: &VirusChain,
    horizon: usize,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<NeverReturnEstimate> {
    if horizon < 2 || horizon > chain.max_index() {
        return Err(Error::domain(format!(
            "horizon must lie in 2..={}, got {horizon}",
            chain.max_index()
        )));
    }
    if samples == 0 || workers == 0 {
        return Err(Error::domain("samples and workers must be positive"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let chunk_len = |c: usize| CHUNK.min(samples - c * CHUNK);
    let survivors: usize = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers.min(chunks))
            .map(|w| {
                s.spawn(move || {
                    (w..chunks)
                        .step_by(workers)
                        .map(|c| survivors_in_chunk(seed, c, chunk_len(c), horizon))
                        .sum::<usize>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .sum()
    });
    let n = samples as f64;
    let p = survivors as f64 / n;
    let z = 1.959_963_984_540_054_f64;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Ok(NeverReturnEstimate {
        horizon,
        samples,
        survivors,
        estimate: p,
        ci_low: (centre - half).max(0.0),
        ci_high: (centre + half).min(1.0),
        exact: exact_survival(horizon).to_rational(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::render_decimal;

    #[test]
    fn exact_products() {
        assert_eq!(exact_survival(2), Dyadic::pow2_neg(1));
        assert_eq!(
            render_decimal(&exact_survival(20).to_rational(), 6),
            "0.288789"
        );
    }

    #[test]
    fn horizon_two_is_a_coin() {
        let chain = VirusChain::new(20).unwrap();
        let e = never_return_estimate(&chain, 2, 40_000, 3, 2).unwrap();
        assert!((e.estimate - 0.5).abs() < 0.01, "{e:?}");
        assert!(e.ci_low < e.estimate && e.estimate < e.ci_high);
        assert!(e.ci_high - e.ci_low < 0.011);
    }

    #[test]
    fn workers_do_not_change_the_estimate() {
        let chain = VirusChain::new(10).unwrap();
        let a = never_return_estimate(&chain, 10, 10_000, 11, 1).unwrap();
        let b = never_return_estimate(&chain, 10, 10_000, 11, 5).unwrap();
        assert_eq!(a, b);
        assert!(never_return_estimate(&chain, 11, 10, 1, 1).is_err());
        assert!(never_return_estimate(&chain, 1, 10, 1, 1).is_err());
    }

    #[test]
    fn wide_blocks_draw_several_words() {
        let mut rng = walk_rng(0, 0);
        assert!(!all_zero_block(&mut rng, 130));
    }
}
