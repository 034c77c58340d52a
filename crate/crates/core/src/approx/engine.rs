use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ApproxError, TargetVector};
use crate::arith::rational::{self, Rational};
use crate::arith::Interval;

const CHUNK: u64 = 1 << 15;

/// One best approximation `z = (q, a_1, ..., a_n)` with its error
/// `zeta = max_j |q theta_j - a_j|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestApproxRecord {
    pub q: u64,
    pub a: Vec<i64>,
    pub zeta: Interval,
    pub certified: bool,
}

impl BestApproxRecord {
    /// The integer vector `(q, a_1, ..., a_n)`.
    pub fn vector(&self) -> Vec<BigInt> {
        std::iter::once(BigInt::from(self.q))
            .chain(self.a.iter().map(|&x| BigInt::from(x)))
            .collect()
    }

    pub fn to_line(&self, nu: usize) -> RecordLine {
        RecordLine {
            nu,
            q: self.q,
            a: self.a.clone(),
            zeta_lo: self.zeta.lo().to_string(),
            zeta_hi: self.zeta.hi().to_string(),
            certified: self.certified,
        }
    }
}

/// JSON-lines form of a record; `zeta_lo` and `zeta_hi` are exact fractions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordLine {
    pub nu: usize,
    pub q: u64,
    pub a: Vec<i64>,
    pub zeta_lo: String,
    pub zeta_hi: String,
    pub certified: bool,
}

impl TryFrom<&RecordLine> for BestApproxRecord {
    type Error = ApproxError;
    fn try_from(line: &RecordLine) -> Result<Self, ApproxError> {
        Ok(Self {
            q: line.q,
            a: line.a.clone(),
            zeta: Interval::new(
                rational::parse_rational(&line.zeta_lo)?,
                rational::parse_rational(&line.zeta_hi)?,
            )?,
            certified: line.certified,
        })
    }
}

/// Output of a scan over `1..=q_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxRun {
    pub records: Vec<BestApproxRecord>,
    /// Denominators whose record status cannot be decided at this precision.
    pub uncertain: Vec<u64>,
    /// Set when a certified record has error exactly zero; the scan stops there.
    pub exact_hit: Option<u64>,
    pub q_max: u64,
}

impl ApproxRun {
    pub fn check_exact(&self) -> Result<(), ApproxError> {
        match self.exact_hit {
            Some(q) => Err(ApproxError::ExactHit(q)),
            None => Ok(()),
        }
    }
}

/// Errors are handled as integer numerators over `2D`, where `D` is the
/// common denominator of all component endpoints; `q theta_j` is tracked
/// through its residue mod `D`.
struct Scanner {
    d: BigInt,
    lo: Vec<BigInt>,
    width: Vec<BigInt>,
}

impl Scanner {
    fn new(theta: &TargetVector) -> Self {
        let comps = theta.components();
        let d = rational::common_denominator(comps.iter().flat_map(|c| [c.lo(), c.hi()]));
        let num = |x: &Rational| x.numer() * (&d / x.denom());
        let lo: Vec<BigInt> = comps.iter().map(|c| num(c.lo())).collect();
        let width = comps.iter().map(|c| num(c.hi()) - num(c.lo())).collect();
        Self { d, lo, width }
    }

    fn residues(&self, q: u64) -> Vec<BigInt> {
        self.lo.iter().map(|l| (l * q) % &self.d).collect()
    }

    fn advance(&self, res: &mut [BigInt]) {
        for (r, l) in res.iter_mut().zip(&self.lo) {
            *r += l;
            if *r >= self.d {
                *r -= &self.d;
            }
        }
    }

    /// `2D * dist(x / D)` for `0 <= x < 2D`.
    fn dist2(&self, x: &BigInt) -> BigInt {
        let y = if x >= &self.d { x - &self.d } else { x.clone() };
        let other = &self.d - &y;
        if y < other {
            y * 2
        } else {
            other * 2
        }
    }

    /// Numerators over `2D` of the enclosure of `max_j ||q theta_j||`.
    fn error(&self, q: u64, res: &[BigInt]) -> (BigInt, BigInt) {
        let mut best_lo = BigInt::zero();
        let mut best_hi = BigInt::zero();
        for (r, w) in res.iter().zip(&self.width) {
            let span = w * q;
            let (lo, hi) = if span >= self.d {
                (BigInt::zero(), self.d.clone())
            } else {
                let top = r + &span;
                let crosses_int = r.is_zero() || top >= self.d;
                let (r2, t2) = (r * 2, &top * 2);
                let three = &self.d * 3;
                let crosses_half = (r2 <= self.d && self.d <= t2) || (r2 <= three && three <= t2);
                let (a, b) = (self.dist2(r), self.dist2(&top));
                let lo = if crosses_int { BigInt::zero() } else { a.clone().min(b.clone()) };
                let hi = if crosses_half { self.d.clone() } else { a.max(b) };
                (lo, hi)
            };
            best_lo = best_lo.max(lo);
            best_hi = best_hi.max(hi);
        }
        (best_lo, best_hi)
    }

    fn to_interval(&self, lo: BigInt, hi: BigInt) -> Interval {
        let den: BigInt = &self.d * 2;
        Interval::new(Rational::new(lo, den.clone()), Rational::new(hi, den)).expect("lo <= hi")
    }

    /// Scans `start..=end`, keeping only the denominators that could be
    /// records given the chunk-local history. Dropped denominators never
    /// lower either running minimum, so the merge only needs the survivors.
    fn scan(&self, start: u64, end: u64) -> Vec<(u64, BigInt, BigInt)> {
        let mut res = self.residues(start);
        let mut min_hi: Option<BigInt> = None;
        let mut out = Vec::new();
        for q in start..=end {
            let (lo, hi) = self.error(q, &res);
            if min_hi.as_ref().is_none_or(|m: &BigInt| lo < *m) {
                if min_hi.as_ref().is_none_or(|m: &BigInt| hi < *m) {
                    min_hi = Some(hi.clone());
                }
                out.push((q, lo, hi));
            }
            if q < end {
                self.advance(&mut res);
            }
        }
        out
    }
}

fn nearest_vector(theta: &TargetVector, q: u64) -> Vec<i64> {
    theta
        .components()
        .iter()
        .map(|c| {
            rational::nearest_int(&(c.midpoint() * rational::from_bigint(BigInt::from(q))))
                .to_i64()
                .expect("nearest integer fits in i64")
        })
        .collect()
}

fn merge(theta: &TargetVector, scanner: &Scanner, q_max: u64, chunks: Vec<Vec<(u64, BigInt, BigInt)>>) -> ApproxRun {
    let mut run = ApproxRun {
        records: Vec::new(),
        uncertain: Vec::new(),
        exact_hit: None,
        q_max,
    };
    let mut mins: Option<(BigInt, BigInt)> = None;
    'outer: for (q, lo, hi) in chunks.into_iter().flatten() {
        let status = match &mins {
            None => Some(true),
            Some((min_lo, _)) if hi < *min_lo => Some(true),
            Some((_, min_hi)) if lo >= *min_hi => Some(false),
            Some(_) => None,
        };
        match status {
            Some(true) => {
                let exact = hi.is_zero();
                run.records.push(BestApproxRecord {
                    q,
                    a: nearest_vector(theta, q),
                    zeta: scanner.to_interval(lo.clone(), hi.clone()),
                    certified: true,
                });
                if exact {
                    run.exact_hit = Some(q);
                    break 'outer;
                }
            }
            None => run.uncertain.push(q),
            Some(false) => {}
        }
        mins = Some(match mins {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.min(hi)),
        });
    }
    run
}

/// Certified best approximations with denominators `q <= q_max`, scanned
/// sequentially.
pub fn best_approx_sequence(theta: &TargetVector, q_max: u64) -> Result<ApproxRun, ApproxError> {
    if q_max == 0 {
        return Err(ApproxError::ZeroBound);
    }
    let scanner = Scanner::new(theta);
    let chunk = scanner.scan(1, q_max);
    Ok(merge(theta, &scanner, q_max, vec![chunk]))
}

/// Same result as [`best_approx_sequence`], with the range split into
/// fixed-size chunks scanned on the current rayon pool.
pub fn best_approx_sequence_par(theta: &TargetVector, q_max: u64) -> Result<ApproxRun, ApproxError> {
    if q_max == 0 {
        return Err(ApproxError::ZeroBound);
    }
    let scanner = Scanner::new(theta);
    let starts: Vec<u64> = (0..q_max.div_ceil(CHUNK)).map(|i| 1 + i * CHUNK).collect();
    let chunks: Vec<_> = starts
        .par_iter()
        .map(|&s| scanner.scan(s, (s + CHUNK - 1).min(q_max)))
        .collect();
    Ok(merge(theta, &scanner, q_max, chunks))
}

/// Enclosure of `psi(t) = min_{1 <= q <= t} max_j ||q theta_j||`.
pub fn psi(theta: &TargetVector, t: u64) -> Result<Interval, ApproxError> {
    if t == 0 {
        return Err(ApproxError::ZeroBound);
    }
    let scanner = Scanner::new(theta);
    let mut res = scanner.residues(1);
    let mut best: Option<(BigInt, BigInt)> = None;
    for q in 1..=t {
        let (lo, hi) = scanner.error(q, &res);
        best = Some(match best {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.min(hi)),
        });
        scanner.advance(&mut res);
    }
    let (lo, hi) = best.expect("t >= 1");
    Ok(scanner.to_interval(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{parse_rational, rat};

    fn golden(d: u32) -> TargetVector {
        TargetVector::from_strings("phi", d, &["0.61803398874989484820458683436563811772".to_string()]).unwrap()
    }

    #[test]
    fn golden_ratio_records_are_fibonacci() {
        let run = best_approx_sequence(&golden(20), 100).unwrap();
        let qs: Vec<u64> = run.records.iter().map(|r| r.q).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(run.uncertain.is_empty());
        assert_eq!(run.records[4].a, vec![5]);
    }

    #[test]
    fn single_candidate_and_exact_hits() {
        let run = best_approx_sequence(&golden(10), 1).unwrap();
        assert_eq!(run.records.len(), 1);
        let half = TargetVector::from_strings("half", 5, &["1/2".to_string()]).unwrap();
        assert_eq!(psi(&half, 2).unwrap(), Interval::zero());
        assert_eq!(psi(&half, 1).unwrap(), Interval::point(rat(1, 2)));
        let run = best_approx_sequence(&half, 50).unwrap();
        assert_eq!(run.exact_hit, Some(2));
        assert!(run.check_exact().is_err());
    }

    #[test]
    fn psi_golden_small_t() {
        let iv = psi(&golden(10), 4).unwrap();
        // ||3 phi|| = 0.1458980337...
        assert!(iv.contains(&parse_rational("0.1458980338").unwrap()) || iv.contains(&parse_rational("0.1458980337").unwrap()));
        assert!(iv.width() <= rat(4, 10_000_000_000));
    }

    #[test]
    fn parallel_matches_serial() {
        let t = crate::approx::generate_power_basis(&rat(3, 1), 5, 4, 30).unwrap();
        let q = 3 * CHUNK + 17;
        assert_eq!(best_approx_sequence(&t, q).unwrap(), best_approx_sequence_par(&t, q).unwrap());
    }
}
