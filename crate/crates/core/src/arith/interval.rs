use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::ArithError;

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Every arithmetic operation returns an enclosure of the exact image, so a
/// value known to lie in the operands lies in the result.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, ArithError> {
        if lo > hi {
            return Err(ArithError::InvertedInterval);
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Every element of `self` is strictly less than every element of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: rational::min(&self.lo, &other.lo),
            hi: rational::max(&self.hi, &other.hi),
        }
    }

    /// Pointwise maximum `{max(a, b) : a in self, b in other}`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: rational::max(&self.lo, &other.lo),
            hi: rational::max(&self.hi, &other.hi),
        }
    }

    /// Pointwise minimum.
    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: rational::min(&self.lo, &other.lo),
            hi: rational::min(&self.hi, &other.hi),
        }
    }

    pub fn scale(&self, k: &Rational) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn recip(&self) -> Result<Interval, ArithError> {
        if self.contains_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn checked_div(&self, other: &Interval) -> Result<Interval, ArithError> {
        Ok(self * &other.recip()?)
    }

    /// Enclosure of `{||x|| : x in self}` where `||x||` is the distance to the
    /// nearest integer. An interval straddling a half-integer reaches the
    /// maximum 1/2; one straddling an integer reaches 0.
    pub fn dist_to_int(&self) -> Interval {
        let half = rational::rat(1, 2);
        if self.width() >= Rational::one() {
            return Interval {
                lo: Rational::zero(),
                hi: half,
            };
        }
        let at_lo = rational::dist_to_int(&self.lo);
        let at_hi = rational::dist_to_int(&self.hi);
        let base = rational::from_bigint(rational::floor(&self.lo));
        // width < 1, so [lo, hi] meets at most one integer and one half-integer
        let crosses_int = rational::floor(&self.hi) > rational::floor(&self.lo)
            || rational::floor(&self.lo) == rational::ceil(&self.lo);
        let mid = &base + &half;
        let crosses_half = self.contains(&mid) || self.contains(&(&mid + Rational::one()));
        let lo = if crosses_int {
            Rational::zero()
        } else {
            rational::min(&at_lo, &at_hi)
        };
        let hi = if crosses_half {
            half
        } else {
            rational::max(&at_lo, &at_hi)
        };
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::new(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    #[test]
    fn rejects_inverted_and_zero_division() {
        assert!(Interval::new(rat(1, 1), rat(0, 1)).is_err());
        let z = iv((-1, 2), (1, 2));
        assert_eq!(z.recip(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn nearest_integer_distance_piecewise() {
        // straddles 1/2
        assert_eq!(iv((2, 5), (3, 5)).dist_to_int(), iv((2, 5), (1, 2)));
        // straddles 1
        assert_eq!(iv((9, 10), (11, 10)).dist_to_int(), iv((0, 1), (1, 10)));
        // inside (1/2, 1)
        assert_eq!(iv((6, 10), (7, 10)).dist_to_int(), iv((3, 10), (4, 10)));
        // exact integer endpoint
        assert_eq!(iv((2, 1), (21, 10)).dist_to_int(), iv((0, 1), (1, 10)));
        assert_eq!(Interval::point(rat(3, 2)).dist_to_int(), Interval::point(rat(1, 2)));
        assert_eq!(iv((-1, 4), (4, 1)).dist_to_int(), iv((0, 1), (1, 2)));
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_encloses_pointwise(
            a in small_rat(), da in 0i64..5, ta in 0i64..=8,
            b in small_rat(), db in 0i64..5, tb in 0i64..=8,
        ) {
            let ia = Interval::new(a.clone(), &a + rat(da, 3)).unwrap();
            let ib = Interval::new(b.clone(), &b + rat(db, 3)).unwrap();
            let x = &a + rat(da * ta, 24);
            let y = &b + rat(db * tb, 24);
            prop_assert!((&ia + &ib).contains(&(&x + &y)));
            prop_assert!((&ia - &ib).contains(&(&x - &y)));
            prop_assert!((&ia * &ib).contains(&(&x * &y)));
            prop_assert!(ia.dist_to_int().contains(&rational::dist_to_int(&x)));
        }
    }
}
