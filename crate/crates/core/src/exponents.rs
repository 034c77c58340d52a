//! Finite-sample estimates of the ordinary and uniform exponents, plus the
//! classical lower bounds for the ordinary exponent in terms of the uniform one.
//!
//! `psi` is constant on `[q_nu, q_{nu+1})` with value `zeta_nu`, so the
//! limsup/liminf in the definitions reduce to the ratios
//! `-ln zeta_nu / ln q_nu` (ordinary) and `-ln zeta_nu / ln q_{nu+1}` (uniform).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::BestApproxRecord;
use crate::arith::elementary::{ln_enclosure, ln_interval, sqrt_enclosure};
use crate::arith::rational::{self, Rational};
use crate::arith::{ArithError, Interval};

const LOG_BITS: u32 = 96;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("need at least 3 certified records with usable ratios, got {0}")]
    TooShort(usize),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioRow {
    pub nu: usize,
    pub q: u64,
    pub zeta_mid: Rational,
    pub ratio_omega: Interval,
    /// Absent for the last record, which has no successor.
    pub ratio_omega_hat: Option<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub omega_est: Rational,
    pub omega_hat_est: Rational,
    pub omega_enclosure: Interval,
    pub omega_hat_enclosure: Interval,
    /// Inclusive range of `nu` used for the two estimates.
    pub tail_window: (usize, usize),
    pub per_nu_ratios: Vec<RatioRow>,
}

fn ln_q(q: u64) -> Result<Interval, ArithError> {
    ln_enclosure(&rational::from_bigint(BigInt::from(q)), LOG_BITS)
}

/// `-ln zeta / ln q` as an interval; both logs are certified enclosures.
fn ratio(neg_ln_zeta: &Interval, ln_den: &Interval) -> Result<Interval, ArithError> {
    neg_ln_zeta.checked_div(ln_den)
}

pub fn estimate_exponents(seq: &[BestApproxRecord], tail_fraction: &Rational) -> Result<ExponentEstimate, ExponentError> {
    if !tail_fraction.is_positive() || *tail_fraction > Rational::one() {
        return Err(ExponentError::Domain(format!("tail fraction {tail_fraction} not in (0, 1]")));
    }
    let certified: Vec<&BestApproxRecord> = seq.iter().filter(|r| r.certified).collect();
    if certified.len() < 3 {
        return Err(ExponentError::TooShort(certified.len()));
    }
    let mut rows = Vec::new();
    for (nu, rec) in certified.iter().enumerate() {
        // ratios need ln q > 0 and 0 < zeta < 1
        if rec.q < 2 || rec.zeta.lo().is_zero() || *rec.zeta.hi() >= Rational::one() {
            continue;
        }
        let neg_ln_zeta = -&ln_interval(&rec.zeta, LOG_BITS)?;
        let ratio_omega = ratio(&neg_ln_zeta, &ln_q(rec.q)?)?;
        let ratio_omega_hat = match certified.get(nu + 1) {
            Some(next) => Some(ratio(&neg_ln_zeta, &ln_q(next.q)?)?),
            None => None,
        };
        rows.push(RatioRow {
            nu,
            q: rec.q,
            zeta_mid: rec.zeta.midpoint(),
            ratio_omega,
            ratio_omega_hat,
        });
    }
    if rows.len() < 3 {
        return Err(ExponentError::TooShort(rows.len()));
    }
    let total = rows.len();
    let take = rational::ceil(&(tail_fraction * rational::int(total as i64)));
    let take = usize::try_from(take).unwrap_or(total).clamp(2, total);
    let window = &rows[total - take..];
    let omega = window
        .iter()
        .map(|r| r.ratio_omega.clone())
        .reduce(|a, b| a.max(&b))
        .expect("window is non-empty");
    let omega_hat = window
        .iter()
        .filter_map(|r| r.ratio_omega_hat.clone())
        .reduce(|a, b| a.min(&b))
        .expect("window holds at least one record with a successor");
    Ok(ExponentEstimate {
        omega_est: omega.midpoint(),
        omega_hat_est: omega_hat.midpoint(),
        omega_enclosure: omega,
        omega_hat_enclosure: omega_hat,
        tail_window: (window[0].nu, window[take - 1].nu),
        per_nu_ratios: rows,
    })
}

fn open_unit(omega_hat: &Rational) -> Result<(), ExponentError> {
    if !omega_hat.is_positive() || *omega_hat >= Rational::one() {
        return Err(ExponentError::Domain(format!("omega_hat = {omega_hat} must lie in (0, 1)")));
    }
    Ok(())
}

/// Jarnik's bound `w^2 / (1 - w)`.
pub fn jarnik_bound(omega_hat: &Rational) -> Result<Rational, ExponentError> {
    open_unit(omega_hat)?;
    Ok(omega_hat * omega_hat / (Rational::one() - omega_hat))
}

/// The optimal three-dimensional bound `(w/2)(a + sqrt(a^2 + 4a))` with
/// `a = w/(1-w)`, enclosed to width at most `tol`.
pub fn dim3_bound(omega_hat: &Rational, tol: &Rational) -> Result<Interval, ExponentError> {
    if *omega_hat < rational::rat(1, 3) {
        return Err(ExponentError::Domain(format!("omega_hat = {omega_hat} below 1/3")));
    }
    open_unit(omega_hat)?;
    if !tol.is_positive() {
        return Err(ExponentError::Domain("tolerance must be positive".into()));
    }
    let a = omega_hat / (Rational::one() - omega_hat);
    let root = sqrt_enclosure(&(&a * &a + &a * rational::int(4)), bits_for(tol))?;
    let half_w = omega_hat / rational::int(2);
    Ok((&Interval::point(a) + &root).scale(&half_w))
}

/// Smallest `b` with `2^-b <= tol`.
pub(crate) fn bits_for(tol: &Rational) -> u32 {
    let mut b = 0u32;
    let mut p = Rational::one();
    while p > *tol {
        p /= rational::int(2);
        b += 1;
    }
    b
}

/// The general bound `(w^2 + (n-2) w) / ((n-1)(1-w))`, valid for `1/n <= w < 1`.
pub fn schmidt_summerer_bound(omega_hat: &Rational, n: u32) -> Result<Rational, ExponentError> {
    if n < 2 {
        return Err(ExponentError::Domain(format!("dimension {n} below 2")));
    }
    open_unit(omega_hat)?;
    if *omega_hat < rational::rat(1, n as i64) {
        return Err(ExponentError::Domain(format!("omega_hat = {omega_hat} below 1/{n}")));
    }
    let n = rational::int(n as i64);
    let two = rational::int(2);
    Ok((omega_hat * omega_hat + (&n - &two) * omega_hat) / ((&n - Rational::one()) * (Rational::one() - omega_hat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, to_f64};

    fn synthetic(qs: &[u64], zeta: impl Fn(u64) -> Rational) -> Vec<BestApproxRecord> {
        qs.iter()
            .map(|&q| BestApproxRecord {
                q,
                a: vec![0],
                zeta: Interval::point(zeta(q)),
                certified: true,
            })
            .collect()
    }

    #[test]
    fn squared_denominators_give_two_and_one() {
        let qs = [2u64, 4, 16, 256, 65536];
        let seq = synthetic(&qs, |q| rat(1, (q * q) as i64));
        let est = estimate_exponents(&seq, &rat(1, 1)).unwrap();
        assert!((to_f64(&est.omega_est) - 2.0).abs() < 1e-20);
        assert!((to_f64(&est.omega_hat_est) - 1.0).abs() < 1e-20);
        assert!(est.omega_enclosure.contains(&rat(2, 1)));
        assert!(est.omega_hat_enclosure.contains(&rat(1, 1)));
        assert!(est.omega_enclosure.width() < rat(1, 1_000_000_000_000));
    }

    #[test]
    fn too_short_sequences() {
        let seq = synthetic(&[2, 4], |q| rat(1, q as i64));
        assert_eq!(estimate_exponents(&seq, &rat(1, 2)), Err(ExponentError::TooShort(2)));
    }

    #[test]
    fn closed_form_bounds() {
        assert_eq!(jarnik_bound(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(jarnik_bound(&rat(2, 3)).unwrap(), rat(4, 3));
        assert!(jarnik_bound(&rat(1, 1)).is_err());
        assert_eq!(schmidt_summerer_bound(&rat(1, 2), 4).unwrap(), rat(5, 6));
        assert_eq!(schmidt_summerer_bound(&rat(1, 4), 4).unwrap(), rat(1, 4));
        assert_eq!(schmidt_summerer_bound(&rat(1, 2), 2).unwrap(), rat(1, 2));
        assert_eq!(dim3_bound(&rat(1, 3), &rat(1, 1000)).unwrap(), Interval::point(rat(1, 3)));
        let d = dim3_bound(&rat(1, 2), &rat(1, 1_000_000_000_000)).unwrap();
        assert!((to_f64(&d.midpoint()) - 0.25 * (1.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!(d.width() <= rat(1, 1_000_000_000_000));
        assert!(dim3_bound(&rat(1, 1), &rat(1, 10)).is_err());
    }
}
