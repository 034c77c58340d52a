use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};

/// Dense univariate polynomial over the rationals, coefficients in ascending
/// degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.coeffs.last().expect("non-zero polynomial")
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    /// Remainder of Euclidean division by a non-zero `d`.
    pub fn rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / d.lead();
            for (i, c) in d.coeffs.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Poly::new(r)
    }

    /// Cauchy bound: every root has absolute value below `1 + max |c_i / c_n|`
    /// and hence below `1 + sum |c_i / c_n|`.
    pub fn root_bound(&self) -> Rational {
        let lead = self.lead().abs();
        let n = self.coeffs.len() - 1;
        Rational::one() + self.coeffs[..n].iter().map(|c| c.abs() / &lead).fold(Rational::zero(), |a, b| a + b)
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() && chain.last().unwrap().degree() != Some(0) {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            chain.push(Poly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        if chain.last().unwrap().is_zero() {
            chain.pop();
        }
        chain
    }
}

/// Number of sign changes along a Sturm chain at `x`, zeros skipped.
pub fn sign_variations(chain: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| rational::sign(&p.eval(x)))
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots in `(a, b]`.
pub fn count_roots(chain: &[Poly], a: &Rational, b: &Rational) -> usize {
    sign_variations(chain, a).saturating_sub(sign_variations(chain, b))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        // (x-1)(x-2)(x-3)
        let f = p(&[-6, 11, -6, 1]);
        let chain = f.sturm();
        assert_eq!(count_roots(&chain, &int(0), &int(10)), 3);
        assert_eq!(count_roots(&chain, &int(1), &int(2)), 1);
        assert_eq!(count_roots(&chain, &int(3), &int(10)), 0);
        // x^2 + 1
        assert_eq!(count_roots(&p(&[1, 0, 1]).sturm(), &int(-10), &int(10)), 0);
        // (x-1)^2 has one distinct root
        assert_eq!(count_roots(&p(&[1, -2, 1]).sturm(), &int(0), &int(5)), 1);
    }

    #[test]
    fn remainder_and_eval() {
        let f = p(&[-1, 0, 0, 1]);
        assert_eq!(f.rem(&p(&[-1, 1])), Poly::new(vec![]));
        assert_eq!(f.eval(&int(2)), int(7));
        assert_eq!(f.derivative(), p(&[0, 0, 3]));
        assert_eq!(f.root_bound(), int(2));
    }
}
