use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ApproxError;
use crate::arith::rational::{self, Rational};
use crate::arith::Interval;

pub const MAX_DIM: usize = 8;

/// The target `Θ`: one certified interval per coordinate, reduced mod 1 so
/// that every lower endpoint lies in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetVector {
    pub label: String,
    pub precision: u32,
    components: Vec<Interval>,
}

/// On-disk form of a target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetFile {
    pub label: String,
    pub n: usize,
    pub precision_digits: u32,
    pub components: Vec<String>,
}

impl TargetVector {
    pub fn new(label: impl Into<String>, precision: u32, components: Vec<Interval>) -> Result<Self, ApproxError> {
        let n = components.len();
        if n == 0 || n > MAX_DIM {
            return Err(ApproxError::Dimension(n));
        }
        let limit = Rational::new(BigInt::one(), rational::pow10(precision));
        let mut reduced = Vec::with_capacity(n);
        for (index, c) in components.into_iter().enumerate() {
            if c.width() > limit {
                return Err(ApproxError::TooWide {
                    index,
                    width: c.width().to_string(),
                    digits: precision,
                });
            }
            let shift = rational::from_bigint(-rational::floor(c.lo()));
            reduced.push(Interval::new(c.lo() + &shift, c.hi() + &shift)?);
        }
        Ok(Self {
            label: label.into(),
            precision,
            components: reduced,
        })
    }

    /// Parses decimal strings (`"0.6180339887"`, read as the interval of
    /// half-width `10^-d / 2` around the value) or exact fractions (`"5/8"`).
    pub fn from_strings(label: impl Into<String>, precision: u32, comps: &[String]) -> Result<Self, ApproxError> {
        let half = Rational::new(BigInt::one(), rational::pow10(precision) * 2);
        let ivs = comps
            .iter()
            .map(|s| {
                let x = rational::parse_rational(s)?;
                Ok(if s.contains('/') {
                    Interval::point(x)
                } else {
                    Interval::new(&x - &half, &x + &half)?
                })
            })
            .collect::<Result<Vec<_>, ApproxError>>()?;
        Self::new(label, precision, ivs)
    }

    pub fn from_file(file: &TargetFile) -> Result<Self, ApproxError> {
        if file.n != file.components.len() {
            return Err(ApproxError::ComponentCount {
                declared: file.n,
                found: file.components.len(),
            });
        }
        Self::from_strings(file.label.clone(), file.precision_digits, &file.components)
    }

    /// Point components are written as exact fractions, the others as their
    /// midpoint with `d + 1` digits. Reading the file back encloses the
    /// original intervals whenever those midpoints are exact at `d + 1`
    /// digits, which holds for [`generate_power_basis`] output.
    pub fn to_file(&self) -> TargetFile {
        let components = self
            .components
            .iter()
            .map(|c| {
                if c.is_point() {
                    format!("{}/{}", c.lo().numer(), c.lo().denom())
                } else {
                    rational::to_decimal(&c.midpoint(), self.precision + 1)
                }
            })
            .collect();
        TargetFile {
            label: self.label.clone(),
            n: self.n(),
            precision_digits: self.precision,
            components,
        }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_exact(&self) -> bool {
        self.components.iter().all(Interval::is_point)
    }
}

/// `(r^(1/k), r^(2/k), ..., r^(n/k)) mod 1`, each coordinate enclosed in an
/// interval of width `10^-d` obtained from an integer `k`-th root.
pub fn generate_power_basis(r: &Rational, k: u32, n: usize, d: u32) -> Result<TargetVector, ApproxError> {
    if !r.is_positive() {
        return Err(ApproxError::InvalidRoot(format!("radicand {r} must be positive")));
    }
    if k < 2 {
        return Err(ApproxError::InvalidRoot(format!("degree {k} must be at least 2")));
    }
    if exact_root(r.numer(), k).is_some() && exact_root(r.denom(), k).is_some() {
        return Err(ApproxError::PerfectPower(r.to_string()));
    }
    let scale = rational::pow10(d);
    let scale_k = num_traits::pow(scale.clone(), k as usize);
    let mut comps = Vec::with_capacity(n);
    for i in 1..=n {
        let num = num_traits::pow(r.numer().clone(), i) * &scale_k;
        let den = num_traits::pow(r.denom().clone(), i);
        let big_n = &num / &den;
        let root = big_n.nth_root(k);
        let exact = (&num % &den).is_zero() && num_traits::pow(root.clone(), k as usize) == big_n;
        let lo = Rational::new(root.clone(), scale.clone());
        comps.push(if exact {
            Interval::point(lo)
        } else {
            Interval::new(lo, Rational::new(root + 1, scale.clone()))?
        });
    }
    TargetVector::new(format!("power basis {r}^(i/{k})"), d, comps)
}

fn exact_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let r = x.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *x).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{parse_rational, rat};

    #[test]
    fn power_basis_square_root_of_two() {
        let t = generate_power_basis(&rat(2, 1), 2, 1, 10).unwrap();
        assert!(t.components()[0].contains(&parse_rational("0.41421356237").unwrap()));
        assert_eq!(t.components()[0].width(), rat(1, 10_000_000_000));
    }

    #[test]
    fn perfect_powers_rejected() {
        assert!(matches!(
            generate_power_basis(&rat(4, 1), 2, 1, 5),
            Err(ApproxError::PerfectPower(_))
        ));
        assert!(matches!(
            generate_power_basis(&rat(8, 27), 3, 1, 5),
            Err(ApproxError::PerfectPower(_))
        ));
        // 4^(1/4) = sqrt 2 is irrational, but 4^(2/4) = 2 is exact
        let t = generate_power_basis(&rat(4, 1), 4, 2, 8).unwrap();
        assert!(t.components()[1].is_point());
    }

    #[test]
    fn reduction_mod_one_and_width_check() {
        let t = TargetVector::from_strings("x", 3, &["2.25".to_string(), "-0.5".to_string()]).unwrap();
        assert!(t.components()[0].contains(&rat(1, 4)));
        assert!(t.components()[1].contains(&rat(1, 2)));
        let wide = Interval::new(rat(0, 1), rat(1, 10)).unwrap();
        assert!(matches!(TargetVector::new("w", 3, vec![wide]), Err(ApproxError::TooWide { .. })));
        assert!(matches!(TargetVector::new("e", 3, vec![]), Err(ApproxError::Dimension(0))));
    }

    #[test]
    fn file_round_trip_encloses() {
        let t = generate_power_basis(&rat(2, 1), 5, 4, 30).unwrap();
        let back = TargetVector::from_file(&t.to_file()).unwrap();
        for (a, b) in t.components().iter().zip(back.components()) {
            assert!(b.contains(a.lo()) && b.contains(a.hi()));
        }
    }
}
