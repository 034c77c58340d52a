//! Detection of the degenerate index patterns `(nu, r_1, ..., r_n, k)` in a
//! sequence of best-approximation vectors in `Z^5`, and the finite-horizon
//! proxy for the index.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::BestApproxRecord;
use crate::arith::rational::Rational;
use crate::arith::{int_det, int_rank, ArithError, Interval};

pub const DIM: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector {index} has length {found}, expected {expected}")]
    WrongDimension { index: usize, expected: usize, found: usize },
    #[error("span(z_{j1}, z_{j1}+1) differs from span(z_{j2}-1, z_{j2})")]
    NotSameSubspace { j1: usize, j2: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

type Vector = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub nu: usize,
    pub r: Vec<usize>,
    pub k: usize,
    pub n: usize,
    /// The triple at `r_1`, spanning `T`.
    pub t_basis: Vec<Vector>,
    /// `(z_{r_i}, z_{r_i + 1})` for `i = 0..=n` (with `r_0 = nu`).
    pub l_spans: Vec<[Vector; 2]>,
    pub det_vi: BigInt,
    pub verified: bool,
}

impl Chain {
    /// `nu, r_1, ..., r_n, k`.
    pub fn indices(&self) -> Vec<usize> {
        std::iter::once(self.nu).chain(self.r.iter().copied()).chain([self.k]).collect()
    }
}

/// Outcome of re-checking each condition of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub independent_triples: bool,
    pub runs_in_planes: bool,
    pub common_three_space: bool,
    pub ends_outside: bool,
    pub five_independent: bool,
    pub det_vi: BigInt,
    pub first_failure: Option<String>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEstimate {
    /// `None` means no chain completed within the horizon.
    pub value: Option<usize>,
    pub witness_chains: Vec<Chain>,
    pub horizon: usize,
    pub note: String,
}

fn check_dims(seq: &[Vector]) -> Result<(), ChainError> {
    match seq.iter().position(|v| v.len() != DIM) {
        Some(index) => Err(ChainError::WrongDimension {
            index,
            expected: DIM,
            found: seq[index].len(),
        }),
        None => Ok(()),
    }
}

fn rank_of(seq: &[Vector], idx: &[usize]) -> usize {
    let vs: Vec<Vector> = idx.iter().map(|&i| seq[i].clone()).collect();
    int_rank(&vs).expect("non-empty, equal lengths")
}

fn triple_rank(seq: &[Vector], j: usize) -> usize {
    rank_of(seq, &[j - 1, j, j + 1])
}

fn in_range(seq: &[Vector], index: usize, lo: usize, hi: usize) -> Result<(), ChainError> {
    if index < lo || index > hi || hi >= seq.len() {
        return Err(ChainError::IndexOutOfRange { index, len: seq.len() });
    }
    Ok(())
}

/// `true` iff `z_{j-1}, z_j, z_{j+1}` are linearly independent.
pub fn triple_independent(seq: &[Vector], j: usize) -> Result<bool, ChainError> {
    if j < 1 || j + 1 >= seq.len() {
        return Err(ChainError::IndexOutOfRange { index: j, len: seq.len() });
    }
    Ok(triple_rank(seq, j) == 3)
}

fn vi_det(seq: &[Vector], nu: usize, r_n: usize, k: usize) -> BigInt {
    let rows: Vec<Vector> = [nu - 1, r_n - 1, k - 1, k, k + 1].iter().map(|&i| seq[i].clone()).collect();
    int_det(&rows).expect("square")
}

/// Tries `J[s..=s+n+1]` as `(nu, r_1, ..., r_n, k)`; `J` lists the centres of
/// independent triples, so the runs between consecutive entries consist of
/// rank-deficient triples only.
fn try_window(seq: &[Vector], jset: &[usize], s: usize, n: usize) -> Option<Chain> {
    let idx = &jset[s..=s + n + 1];
    let (nu, k) = (idx[0], idx[n + 1]);
    if nu < 1 || k + 1 >= seq.len() {
        return None;
    }
    for w in idx.windows(2) {
        if (w[0] + 1..w[1]).any(|j| triple_rank(seq, j) != 2) {
            return None;
        }
    }
    let r = idx[1..=n].to_vec();
    let t_idx: Vec<usize> = r.iter().flat_map(|&ri| [ri - 1, ri, ri + 1]).collect();
    if rank_of(seq, &t_idx) != 3 {
        return None;
    }
    let t_basis: Vec<Vector> = [r[0] - 1, r[0], r[0] + 1].iter().map(|&i| seq[i].clone()).collect();
    let outside = |j: usize| {
        let mut vs = t_basis.clone();
        vs.push(seq[j].clone());
        int_rank(&vs).expect("equal lengths") == 4
    };
    if !outside(nu - 1) || !outside(k + 1) {
        return None;
    }
    let det_vi = vi_det(seq, nu, r[n - 1], k);
    if det_vi.is_zero() {
        return None;
    }
    let l_spans = idx[..=n].iter().map(|&i| [seq[i].clone(), seq[i + 1].clone()]).collect();
    Some(Chain {
        nu,
        r,
        k,
        n,
        t_basis,
        l_spans,
        det_vi,
        verified: true,
    })
}

/// Every `(nu, n)` for which the pattern holds, ordered by `(nu, k)`.
pub fn detect_chains(seq: &[Vector]) -> Result<Vec<Chain>, ChainError> {
    check_dims(seq)?;
    if seq.len() < DIM {
        return Ok(Vec::new());
    }
    let jset: Vec<usize> = (1..seq.len() - 1).into_par_iter().filter(|&j| triple_rank(seq, j) == 3).collect();
    let mut chains: Vec<Chain> = (0..jset.len())
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut found = Vec::new();
            for n in 1..jset.len().saturating_sub(s + 1) {
                let t_idx: Vec<usize> = jset[s + 1..=s + n].iter().flat_map(|&ri| [ri - 1, ri, ri + 1]).collect();
                // T only grows with n
                if rank_of(seq, &t_idx) > 3 {
                    break;
                }
                found.extend(try_window(seq, &jset, s, n));
            }
            found
        })
        .collect();
    chains.sort_by_key(|c| (c.nu, c.k));
    Ok(chains)
}

fn same_plane(seq: &[Vector], base: [usize; 2], pair: [usize; 2]) -> bool {
    rank_of(seq, &[base[0], base[1], pair[0], pair[1]]) == 2
}

/// Re-checks each condition with span comparisons instead of the detector's
/// triple-rank shortcuts.
pub fn verify_chain(seq: &[Vector], c: &Chain) -> Result<ChainReport, ChainError> {
    check_dims(seq)?;
    let idx = c.indices();
    if c.r.len() != c.n || c.n == 0 || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ChainError::IndexOutOfRange { index: c.nu, len: seq.len() });
    }
    in_range(seq, c.nu, 1, seq.len() - 1)?;
    in_range(seq, c.k, 1, seq.len() - 2)?;

    let independent_triples = idx.iter().all(|&j| triple_rank(seq, j) == 3);
    let runs_in_planes = idx.windows(2).all(|w| {
        let base = [w[0], w[0] + 1];
        (w[0]..w[1]).all(|j| rank_of(seq, &base) == 2 && same_plane(seq, base, [j, j + 1]))
    });
    let t = [c.r[0] - 1, c.r[0], c.r[0] + 1];
    let with_t = |extra: &[usize]| {
        let mut all = t.to_vec();
        all.extend_from_slice(extra);
        rank_of(seq, &all)
    };
    let common_three_space = with_t(&[]) == 3 && c.r.iter().all(|&ri| with_t(&[ri - 1, ri, ri + 1]) == 3);
    let ends_outside = with_t(&[c.nu - 1]) == 4 && with_t(&[c.k + 1]) == 4;
    let det_vi = vi_det(seq, c.nu, c.r[c.n - 1], c.k);
    let five_independent = !det_vi.is_zero() && det_vi == c.det_vi;

    let checks = [
        ("independent triples", independent_triples),
        ("runs in two-dimensional spans", runs_in_planes),
        ("common three-dimensional span", common_three_space),
        ("end vectors outside T", ends_outside),
        ("five independent vectors", five_independent),
    ];
    Ok(ChainReport {
        independent_triples,
        runs_in_planes,
        common_three_space,
        ends_outside,
        five_independent,
        det_vi,
        first_failure: checks.iter().find(|(_, ok)| !ok).map(|(name, _)| name.to_string()),
    })
}

/// Smallest `n` among the verified chains. A finite run only exhibits
/// witnesses, so this is a proxy for the index, not its value.
pub fn estimate_index(chains: &[Chain], horizon: usize) -> IndexEstimate {
    let witness_chains: Vec<Chain> = chains.iter().filter(|c| c.verified).cloned().collect();
    IndexEstimate {
        value: witness_chains.iter().map(|c| c.n).min(),
        witness_chains,
        horizon,
        note: format!("finite-horizon proxy: minimum chain length observed for nu <= {horizon}"),
    }
}

/// `(zeta_{j1} q_{j1+1}) / (zeta_{j2-1} q_{j2})`, defined when
/// `span(z_{j1}, z_{j1+1}) = span(z_{j2-1}, z_{j2})`.
pub fn check_product_relation(seq: &[BestApproxRecord], j1: usize, j2: usize) -> Result<Interval, ChainError> {
    let len = seq.len();
    if j2 < 1 || j2 >= len || j1 + 1 >= len {
        return Err(ChainError::IndexOutOfRange { index: j1.max(j2), len });
    }
    let vs: Vec<Vector> = seq.iter().map(BestApproxRecord::vector).collect();
    let plane = int_rank(&[vs[j1].clone(), vs[j1 + 1].clone()])?;
    let joint = int_rank(&[vs[j1].clone(), vs[j1 + 1].clone(), vs[j2 - 1].clone(), vs[j2].clone()])?;
    if plane != 2 || joint != 2 {
        return Err(ChainError::NotSameSubspace { j1, j2 });
    }
    if j2 == j1 + 1 {
        return Ok(Interval::point(Rational::from_integer(1.into())));
    }
    let q = |j: usize| Rational::from_integer(BigInt::from(seq[j].q));
    let num = seq[j1].zeta.scale(&q(j1 + 1));
    let den = seq[j2 - 1].zeta.scale(&q(j2));
    Ok(num.checked_div(&den)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: [i64; 5]) -> Vector {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn unit(i: usize) -> Vector {
        let mut e = [0i64; 5];
        e[i] = 1;
        v(e)
    }

    #[test]
    fn triples() {
        let seq = vec![unit(0), unit(1), unit(2)];
        assert!(triple_independent(&seq, 1).unwrap());
        let seq = vec![unit(0), unit(1), v([1, 1, 0, 0, 0])];
        assert!(!triple_independent(&seq, 1).unwrap());
        assert!(triple_independent(&seq, 2).is_err());
    }

    #[test]
    fn generic_sequence_gives_length_one_chains() {
        // moment curve: any five distinct points are independent
        let seq: Vec<Vector> = (1..=12).map(|t: i64| v([1, t, t * t, t.pow(3), t.pow(4)])).collect();
        let chains = detect_chains(&seq).unwrap();
        assert!(!chains.is_empty());
        assert!(chains.iter().all(|c| c.n == 1 && c.k == c.nu + 2));
        for c in &chains {
            assert!(verify_chain(&seq, c).unwrap().passed());
        }
        assert_eq!(estimate_index(&chains, seq.len()).value, Some(1));
    }

    #[test]
    fn short_and_malformed_inputs() {
        assert!(detect_chains(&[unit(0), unit(1)]).unwrap().is_empty());
        assert!(matches!(
            detect_chains(&[vec![BigInt::from(1)]]),
            Err(ChainError::WrongDimension { .. })
        ));
        let est = estimate_index(&[], 10);
        assert_eq!(est.value, None);
    }
}
