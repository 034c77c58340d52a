//! Rigorous rational enclosures of `ln` and `sqrt`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::rational::{self, Rational};
use super::ArithError;

/// Enclosure of `sqrt(x)` with width at most `2^-bits / denom(x)`; a point
/// interval when `x` is the square of a rational.
pub fn sqrt_enclosure(x: &Rational, bits: u32) -> Result<Interval, ArithError> {
    if x.is_negative() {
        return Err(ArithError::Domain(format!("sqrt of negative {x}")));
    }
    let (p, q) = (x.numer(), x.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        return Ok(Interval::point(Rational::new(sp, sq)));
    }
    // sqrt(p/q) = sqrt(p*q)/q
    let scale = BigInt::one() << bits;
    let n = p * q * &scale * &scale;
    let r = n.sqrt();
    let den = q * &scale;
    Interval::new(Rational::new(r.clone(), den.clone()), Rational::new(r + 1, den))
}

/// Enclosure of `ln(x)` for rational `x > 0`, width roughly `2^-bits`.
pub fn ln_enclosure(x: &Rational, bits: u32) -> Result<Interval, ArithError> {
    if !x.is_positive() {
        return Err(ArithError::Domain(format!("ln of non-positive {x}")));
    }
    if x.is_one() {
        return Ok(Interval::zero());
    }
    // x = 2^k * m with 1 <= m < 2
    let k = exponent2(x);
    let m = if k >= 0 {
        x / rational::from_bigint(BigInt::one() << k as u64)
    } else {
        x * rational::from_bigint(BigInt::one() << (-k) as u64)
    };
    let guard = bits + 16 + bit_len(k.unsigned_abs());
    let ln_m = two_atanh(&((&m - Rational::one()) / (&m + Rational::one())), guard);
    if k == 0 {
        return Ok(ln_m);
    }
    let ln2 = two_atanh(&rational::rat(1, 3), guard);
    Ok(&ln2.scale(&rational::int(k)) + &ln_m)
}

/// Monotone extension of [`ln_enclosure`] to a positive interval.
pub fn ln_interval(iv: &Interval, bits: u32) -> Result<Interval, ArithError> {
    let lo = ln_enclosure(iv.lo(), bits)?;
    let hi = ln_enclosure(iv.hi(), bits)?;
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Largest `k` with `2^k <= x`.
fn exponent2(x: &Rational) -> i64 {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let mut k = nb - db;
    let two_k = |k: i64| {
        if k >= 0 {
            rational::from_bigint(BigInt::one() << k as u64)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    while &two_k(k) > x {
        k -= 1;
    }
    while &two_k(k + 1) <= x {
        k += 1;
    }
    k
}

/// `2 atanh(t) = 2 * sum t^(2i+1)/(2i+1)` for `0 <= t <= 1/3`, evaluated in
/// fixed point with directed rounding plus a geometric tail bound.
fn two_atanh(t: &Rational, bits: u32) -> Interval {
    debug_assert!(!t.is_negative() && *t <= rational::rat(1, 3));
    if t.is_zero() {
        return Interval::zero();
    }
    let s = BigInt::one() << bits;
    let t2 = t * t;
    let floor_s = |x: &Rational| rational::floor(&(x * rational::from_bigint(s.clone())));
    let ceil_s = |x: &Rational| rational::ceil(&(x * rational::from_bigint(s.clone())));
    // power bounds p_lo <= t^(2i+1) * s <= p_hi
    let mut p_lo = floor_s(t);
    let mut p_hi = ceil_s(t);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut i: u64 = 0;
    loop {
        let d = BigInt::from(2 * i + 1);
        sum_lo += &p_lo / &d;
        sum_hi += (&p_hi + &d - 1) / &d;
        p_lo = rational::floor(&(&t2 * rational::from_bigint(p_lo)));
        p_hi = rational::ceil(&(&t2 * rational::from_bigint(p_hi)));
        i += 1;
        if p_hi <= BigInt::one() {
            break;
        }
    }
    // remaining terms: sum_{j>=i} t^(2j+1)/(2j+1) <= p_hi / (s (1 - t^2))
    let tail = Rational::new(p_hi + 1, s.clone()) / (Rational::one() - &t2);
    let lo = Rational::new(sum_lo * 2, s.clone());
    let hi = Rational::new(sum_hi * 2, s) + tail * rational::int(2);
    Interval::new(lo, hi).expect("directed rounding keeps lo <= hi")
}
