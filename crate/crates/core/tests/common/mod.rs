//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use diophant::approx::{BestApproxRecord, TargetVector};
use diophant::arith::rational::{self, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random target with `n` components given by `digits`-digit decimals.
pub fn random_target(seed: u64, n: usize, digits: u32) -> TargetVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<String> = (0..n)
        .map(|_| {
            let body: String = (0..digits).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
            format!("0.{body}")
        })
        .collect();
    TargetVector::from_strings(format!("random {seed}"), digits, &comps).unwrap()
}

/// Outcome of the naive scan: certified records and undecided denominators.
pub struct Naive {
    pub records: Vec<BestApproxRecord>,
    pub uncertain: Vec<u64>,
}

/// Evaluates every denominator `1..=q_max` with plain interval arithmetic and
/// compares against the running minima of all earlier enclosures.
pub fn naive_best_approx(theta: &TargetVector, q_max: u64) -> Naive {
    let mut min_lo: Option<Rational> = None;
    let mut min_hi: Option<Rational> = None;
    let mut out = Naive {
        records: Vec::new(),
        uncertain: Vec::new(),
    };
    for q in 1..=q_max {
        let qr = rational::from_bigint(BigInt::from(q));
        let zeta = theta
            .components()
            .iter()
            .map(|c| c.scale(&qr).dist_to_int())
            .reduce(|a, b| a.max(&b))
            .unwrap();
        let below_all = min_lo.as_ref().is_none_or(|m| zeta.hi() < m);
        let maybe_below = min_hi.as_ref().is_none_or(|m| zeta.lo() < m);
        if below_all {
            let a = theta
                .components()
                .iter()
                .map(|c| rational::nearest_int(&(c.midpoint() * &qr)).to_i64().unwrap())
                .collect();
            let exact = zeta.hi().is_zero();
            out.records.push(BestApproxRecord {
                q,
                a,
                zeta: zeta.clone(),
                certified: true,
            });
            if exact {
                break;
            }
        } else if maybe_below {
            out.uncertain.push(q);
        }
        if min_lo.as_ref().is_none_or(|m| zeta.lo() < m) {
            min_lo = Some(zeta.lo().clone());
        }
        if min_hi.as_ref().is_none_or(|m| zeta.hi() < m) {
            min_hi = Some(zeta.hi().clone());
        }
    }
    out
}

/// Exact best approximations of a rational point target by definition.
pub fn exact_records(theta: &[Rational], q_max: u64) -> Vec<(u64, Rational)> {
    let mut best: Option<Rational> = None;
    let mut out = Vec::new();
    for q in 1..=q_max {
        let qr = rational::from_bigint(BigInt::from(q));
        let z = theta
            .iter()
            .map(|t| rational::dist_to_int(&(t * &qr)))
            .max()
            .unwrap();
        if best.as_ref().is_none_or(|b| z < *b) {
            out.push((q, z.clone()));
            let done = z.is_zero();
            best = Some(z);
            if done {
                break;
            }
        }
    }
    out
}

pub fn fibonacci_upto(limit: u64) -> Vec<u64> {
    let (mut a, mut b) = (1u64, 2u64);
    let mut out = vec![1];
    while b <= limit {
        out.push(b);
        (a, b) = (b, a + b);
    }
    out
}

/// Random integer vectors in `Z^5`, where with probability `p_plane` the next
/// vector is an integer combination of the previous two, producing runs of
/// rank-deficient triples.
pub fn synthetic_sequence(seed: u64, len: usize, p_plane: f64) -> Vec<Vec<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq: Vec<Vec<i64>> = Vec::with_capacity(len);
    while seq.len() < len {
        let n = seq.len();
        let v: Vec<i64> = if n >= 2 && rng.gen_bool(p_plane) {
            let (s, t) = (rng.gen_range(1..=2i64), rng.gen_range(1..=2i64));
            seq[n - 1].iter().zip(&seq[n - 2]).map(|(x, y)| s * x + t * y).collect()
        } else {
            (0..5).map(|_| rng.gen_range(-9..=9i64)).collect()
        };
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        seq.push(v);
    }
    seq.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect()
}

/// Random sequence with a planted pattern of length `n`: `z_nu` to `z_k` lie
/// in a random three-dimensional subspace `T`, every second vector is a
/// combination of its two predecessors, and the vectors just outside the
/// block are generic.
pub fn planted_sequence(seed: u64, n: usize) -> (Vec<Vec<BigInt>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generic = |rng: &mut ChaCha8Rng| -> Vec<i64> { (0..5).map(|_| rng.gen_range(-9..=9i64)).collect() };
    let basis: Vec<Vec<i64>> = (0..3).map(|_| generic(&mut rng)).collect();
    let in_t = |rng: &mut ChaCha8Rng| -> Vec<i64> {
        let c: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3i64)).collect();
        (0..5).map(|j| (0..3).map(|i| c[i] * basis[i][j]).sum()).collect()
    };
    let mut seq: Vec<Vec<i64>> = (0..3).map(|_| generic(&mut rng)).collect();
    let nu = seq.len();
    seq.push(in_t(&mut rng));
    seq.push(in_t(&mut rng));
    for i in 0..=n {
        let (s, t) = (rng.gen_range(1..=2i64), rng.gen_range(1..=2i64));
        let m = seq.len();
        let comb = seq[m - 1].iter().zip(&seq[m - 2]).map(|(x, y)| s * x + t * y).collect();
        seq.push(comb);
        seq.push(if i == n { generic(&mut rng) } else { in_t(&mut rng) });
    }
    seq.push(generic(&mut rng));
    seq.push(generic(&mut rng));
    let seq = seq.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect();
    (seq, nu)
}
