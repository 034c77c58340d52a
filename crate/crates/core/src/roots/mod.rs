//! The polynomial families whose largest positive roots give the lower
//! bounds `G_1`, `G_2`, `G_3`, and certified root brackets.

mod poly;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::rational::{self, Rational};
use crate::arith::Interval;
pub use poly::{count_roots, sign_variations, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("{case:?} has no positive root at omega_hat = {omega_hat}")]
    NoSignChange { case: PolynomialCase, omega_hat: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolynomialCase {
    F1,
    F21,
    F22,
    F3,
    R2A,
    R2B,
}

impl PolynomialCase {
    pub const ALL: [PolynomialCase; 6] = [Self::F1, Self::F21, Self::F22, Self::F3, Self::R2A, Self::R2B];

    /// Closed-open or closed range of `omega_hat` where the root is defined.
    pub fn validity(self) -> (Rational, Rational, bool) {
        let q = rational::rat(1, 4);
        let h = rational::rat(1, 2);
        let one = Rational::one();
        match self {
            Self::F21 => (q, h, true),
            Self::F22 => (h, one, false),
            _ => (q, one, false),
        }
    }

    pub fn in_validity(self, w: &Rational) -> bool {
        let (lo, hi, closed) = self.validity();
        *w >= lo && (if closed { *w <= hi } else { *w < hi })
    }

    /// Coefficients in ascending degree, all exact, for `0 < w < 1`.
    pub fn poly(self, w: &Rational) -> Result<Poly, RootError> {
        if !w.is_positive() || *w >= Rational::one() {
            return Err(RootError::Domain(format!("omega_hat = {w} must lie in (0, 1)")));
        }
        let one = Rational::one();
        let m = &one - w;
        let a = w / &m;
        let b = w / (&m * &m);
        let c = &b / &m;
        let z = Rational::zero();
        let two = rational::int(2);
        let cs = match self {
            Self::F1 => vec![-&a, -&a, -&a, one],
            Self::F21 => vec![-&b, &a * &a, -&a, -&a, one],
            Self::F22 => vec![-&b, a.clone(), -&a, -&a, one],
            Self::F3 => vec![-&b, z, &a * &a, -&a, -&a, one],
            // x^5 - a x^4 - a x^3 - c (1 - w x)^2
            Self::R2A => vec![-&c, &c * w * &two, -(&c * w * w), -&a, -&a, one],
            // x^5 - a x^4 - a x^3 - b (1 - w x)(2 - x)
            Self::R2B => vec![-(&b * &two), &b * (&one + w * &two), -(&b * w), -&a, -&a, one],
        };
        Ok(Poly::new(cs))
    }
}

pub fn eval_poly(case: PolynomialCase, omega_hat: &Rational, x: &Rational) -> Result<Rational, RootError> {
    Ok(case.poly(omega_hat)?.eval(x))
}

/// Bracket `[lo, hi]` around the largest positive root, `hi - lo <= tol`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBracket {
    pub case: PolynomialCase,
    pub omega_hat: Rational,
    pub lo: Rational,
    pub hi: Rational,
    pub sign_lo: i32,
    pub sign_hi: i32,
    /// Distinct positive roots, counted with a Sturm chain on `(0, B]`.
    pub positive_roots: usize,
}

impl RootBracket {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone()).expect("lo <= hi")
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn certainly_below(&self, other: &RootBracket) -> bool {
        self.hi < other.lo
    }

    pub fn overlaps(&self, other: &RootBracket) -> bool {
        self.interval().overlaps(&other.interval())
    }
}

fn check_tol(tol: &Rational) -> Result<(), RootError> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(RootError::Domain(format!("tolerance {tol} must be positive")))
    }
}

/// Largest positive root of an arbitrary polynomial, isolated with Sturm
/// counts and narrowed by bisection.
pub fn largest_positive_root(p: &Poly, tol: &Rational) -> Option<(Rational, Rational, usize)> {
    let b = p.root_bound();
    let chain = p.sturm();
    let zero = Rational::zero();
    let total = count_roots(&chain, &zero, &b);
    if total == 0 {
        return None;
    }
    let two = rational::int(2);
    let (mut lo, mut hi) = (zero, b);
    // invariant: exactly the largest root lies in (lo, hi] once narrowed,
    // and at least that root lies there throughout
    while &hi - &lo > *tol || count_roots(&chain, &lo, &hi) > 1 {
        let mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() && count_roots(&chain, &mid, &hi) == 0 {
            return Some((mid.clone(), mid, total));
        }
        if count_roots(&chain, &mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if p.eval(&hi).is_zero() {
        lo = hi.clone();
    }
    Some((lo, hi, total))
}

pub fn positive_root(case: PolynomialCase, omega_hat: &Rational, tol: &Rational) -> Result<RootBracket, RootError> {
    check_tol(tol)?;
    if !case.in_validity(omega_hat) {
        let (lo, hi, _) = case.validity();
        return Err(RootError::Domain(format!("{case:?} requires omega_hat in [{lo}, {hi}], got {omega_hat}")));
    }
    let p = case.poly(omega_hat)?;
    let (lo, hi, total) = largest_positive_root(&p, tol).ok_or_else(|| RootError::NoSignChange {
        case,
        omega_hat: omega_hat.clone(),
    })?;
    Ok(RootBracket {
        case,
        omega_hat: omega_hat.clone(),
        sign_lo: rational::sign(&p.eval(&lo)),
        sign_hi: rational::sign(&p.eval(&hi)),
        lo,
        hi,
        positive_roots: total,
    })
}

/// Sign changes of `case` on the mesh `step, 2 step, ..., B`.
pub fn mesh_sign_changes(case: PolynomialCase, omega_hat: &Rational, step: &Rational) -> Result<usize, RootError> {
    check_tol(step)?;
    let p = case.poly(omega_hat)?;
    let b = p.root_bound();
    let mut x = step.clone();
    let mut last = rational::sign(&p.eval(&Rational::zero()));
    let mut changes = 0;
    while x <= b {
        let s = rational::sign(&p.eval(&x));
        if s != 0 && last != 0 && s != last {
            changes += 1;
        }
        if s != 0 {
            last = s;
        }
        x += step;
    }
    Ok(changes)
}

/// `G_1`, `G_2` (with the `F21`/`F22` split at 1/2) or `G_3`.
pub fn g(level: u8, omega_hat: &Rational, tol: &Rational) -> Result<RootBracket, RootError> {
    if *omega_hat < rational::rat(1, 4) || *omega_hat >= Rational::one() {
        return Err(RootError::Domain(format!("omega_hat = {omega_hat} outside [1/4, 1)")));
    }
    let case = match level {
        1 => PolynomialCase::F1,
        2 if *omega_hat <= rational::rat(1, 2) => PolynomialCase::F21,
        2 => PolynomialCase::F22,
        3 => PolynomialCase::F3,
        _ => return Err(RootError::Domain(format!("level {level} not in 1..=3"))),
    };
    positive_root(case, omega_hat, tol)
}

/// `omega_hat * G_index(omega_hat)` as an interval of width at most `tol`.
pub fn theorem1_bound(index: u8, omega_hat: &Rational, tol: &Rational) -> Result<Interval, RootError> {
    let br = g(index, omega_hat, tol)?;
    Ok(br.interval().scale(omega_hat))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Remark2Row {
    pub omega_hat: Rational,
    pub g3: Option<RootBracket>,
    pub g_r2a: Option<RootBracket>,
    pub g_r2b: Option<RootBracket>,
    /// Case with the largest root, when the brackets separate it.
    pub best: Option<PolynomialCase>,
    /// A variant root is certainly above the `F3` root.
    pub variant_exceeds_f3: bool,
    pub errors: Vec<String>,
}

pub fn remark2_compare(omega_hat: &Rational, tol: &Rational) -> Result<Remark2Row, RootError> {
    check_tol(tol)?;
    let mut errors = Vec::new();
    let mut get = |case| match positive_root(case, omega_hat, tol) {
        Ok(b) => Some(b),
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };
    let g3 = get(PolynomialCase::F3);
    let g_r2a = get(PolynomialCase::R2A);
    let g_r2b = get(PolynomialCase::R2B);
    let present: Vec<&RootBracket> = [&g3, &g_r2a, &g_r2b].into_iter().flatten().collect();
    let best = present
        .iter()
        .find(|b| present.iter().all(|o| o.case == b.case || o.certainly_below(b)))
        .map(|b| b.case);
    let variant_exceeds_f3 = match &g3 {
        Some(f3) => [&g_r2a, &g_r2b].into_iter().flatten().any(|v| f3.certainly_below(v)),
        None => false,
    };
    Ok(Remark2Row {
        omega_hat: omega_hat.clone(),
        g3,
        g_r2a,
        g_r2b,
        best,
        variant_exceeds_f3,
        errors,
    })
}

/// `steps + 1` equally spaced rationals from `lo` to `hi` (a single point
/// when `steps == 0`).
pub fn rational_grid(lo: &Rational, hi: &Rational, steps: usize) -> Vec<Rational> {
    if steps == 0 {
        return vec![lo.clone()];
    }
    let h = (hi - lo) / rational::int(steps as i64);
    (0..=steps).map(|i| lo + &h * rational::int(i as i64)).collect()
}

/// One row of the bound table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GRow {
    pub omega_hat: Rational,
    pub g: [RootBracket; 3],
    pub bounds: [Interval; 3],
    pub ss_bound_n4: Rational,
}

pub fn g_table(grid: &[Rational], tol: &Rational) -> Result<Vec<GRow>, RootError> {
    grid.par_iter()
        .map(|w| {
            let gs = [g(1, w, tol)?, g(2, w, tol)?, g(3, w, tol)?];
            let bounds = [
                gs[0].interval().scale(w),
                gs[1].interval().scale(w),
                gs[2].interval().scale(w),
            ];
            let ss = crate::exponents::schmidt_summerer_bound(w, 4).map_err(|e| RootError::Domain(e.to_string()))?;
            Ok(GRow {
                omega_hat: w.clone(),
                g: gs,
                bounds,
                ss_bound_n4: ss,
            })
        })
        .collect()
}
