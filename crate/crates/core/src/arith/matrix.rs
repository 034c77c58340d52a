use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{self, Rational};
use super::ArithError;

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::Ragged);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, ArithError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rational::int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, ArithError> {
        if self.cols != other.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>, ArithError> {
        if x.len() != self.cols {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination on the
    /// integer matrix obtained by clearing each row's denominators.
    pub fn det(&self) -> Result<Rational, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let (mut grid, scale) = self.integer_rows();
        let d = bareiss_det(&mut grid);
        Ok(Rational::new(d, scale))
    }

    /// Solves `self * x = rhs` exactly.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>, ArithError> {
        let cols = self.solve_many(&[rhs.to_vec()])?;
        Ok(cols.into_iter().next().unwrap())
    }

    pub fn inverse(&self) -> Result<RationalMatrix, ArithError> {
        let n = self.rows;
        let units: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let cols = self.solve_many(&units)?;
        let mut inv = Self::zeros(n, n);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }

    /// Fraction-free forward elimination of `[A | B]` followed by rational
    /// back substitution, one solution vector per right-hand side.
    pub fn solve_many(&self, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if let Some(bad) = rhs.iter().find(|b| b.len() != n) {
            return Err(ArithError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let k = rhs.len();
        let mut aug = RationalMatrix::zeros(n, n + k);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for (c, b) in rhs.iter().enumerate() {
                aug[(i, n + c)] = b[i].clone();
            }
        }
        let (mut grid, _) = aug.integer_rows();
        if bareiss_echelon(&mut grid, n) < n {
            return Err(ArithError::Singular);
        }
        let mut out = Vec::with_capacity(k);
        for c in 0..k {
            let mut x = vec![Rational::zero(); n];
            for i in (0..n).rev() {
                let mut acc = Rational::from_integer(grid[i][n + c].clone());
                for j in i + 1..n {
                    if !grid[i][j].is_zero() {
                        acc -= Rational::from_integer(grid[i][j].clone()) * &x[j];
                    }
                }
                x[i] = acc / Rational::from_integer(grid[i][i].clone());
            }
            out.push(x);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let (mut grid, _) = self.integer_rows();
        bareiss_echelon(&mut grid, self.cols)
    }

    /// Rows scaled to integers, plus the product of the row multipliers.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let grid = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = rational::common_denominator(row.iter());
                scale *= &l;
                row.iter()
                    .map(|x| x.numer() * (&l / x.denom()))
                    .collect()
            })
            .collect();
        (grid, scale)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Bareiss elimination restricted to the first `pivot_cols` columns; returns
/// the number of pivots (the rank of that block). Entries above each pivot
/// row are left untouched, rows below are eliminated, and every division is
/// exact.
fn bareiss_echelon(m: &mut [Vec<BigInt>], pivot_cols: usize) -> usize {
    let rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..width {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn bareiss_det(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Rank over the rationals of a list of integer vectors.
pub fn int_rank(vs: &[Vec<BigInt>]) -> Result<usize, ArithError> {
    let Some(first) = vs.first() else {
        return Err(ArithError::EmptyInput);
    };
    let len = first.len();
    if let Some(bad) = vs.iter().find(|v| v.len() != len) {
        return Err(ArithError::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let mut grid: Vec<Vec<BigInt>> = vs.to_vec();
    Ok(bareiss_echelon(&mut grid, len))
}

/// Exact determinant of a square integer matrix given as rows.
pub fn int_det(rows: &[Vec<BigInt>]) -> Result<BigInt, ArithError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(ArithError::NonSquare {
            rows: n,
            cols: rows.first().map_or(0, Vec::len),
        });
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut grid = rows.to_vec();
    Ok(bareiss_det(&mut grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn determinant_basics() {
        assert_eq!(RationalMatrix::identity(15).det().unwrap(), int(1));
        let p = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(p.det().unwrap(), int(-1));
        let r = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 5)]])
            .unwrap();
        assert_eq!(r.det().unwrap(), rat(1, 10) - rat(1, 12));
        let ns = RationalMatrix::zeros(2, 3);
        assert!(matches!(ns.det(), Err(ArithError::NonSquare { .. })));
    }

    #[test]
    fn solve_and_inverse_small() {
        let id = RationalMatrix::identity(2);
        assert_eq!(id.solve(&[int(3), int(5)]).unwrap(), vec![int(3), int(5)]);
        let d = RationalMatrix::from_i64(&[&[2, 0], &[0, 4]]).unwrap();
        assert_eq!(d.solve(&[int(1), int(1)]).unwrap(), vec![rat(1, 2), rat(1, 4)]);
        let u = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(
            u.inverse().unwrap(),
            RationalMatrix::from_i64(&[&[1, -1], &[0, 1]]).unwrap()
        );
        let s = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(s.solve(&[int(1), int(1)]), Err(ArithError::Singular));
    }

    #[test]
    fn pivoting_needed() {
        let m = RationalMatrix::from_i64(&[&[0, 0, 1], &[0, 2, 0], &[3, 0, 0]]).unwrap();
        assert_eq!(m.det().unwrap(), int(-6));
        let x = m.solve(&[int(1), int(2), int(3)]).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1)]);
    }

    #[test]
    fn integer_rank() {
        let e = |i: usize| -> Vec<BigInt> {
            (0..5).map(|j| BigInt::from((i == j) as i32)).collect()
        };
        let sum: Vec<BigInt> = e(0).iter().zip(e(1)).map(|(a, b)| a + b).collect();
        assert_eq!(int_rank(&[e(0), e(1), sum]).unwrap(), 2);
        assert_eq!(int_rank(&(0..5).map(e).collect::<Vec<_>>()).unwrap(), 5);
        assert_eq!(int_rank(&[]), Err(ArithError::EmptyInput));
        assert!(int_rank(&[e(0), vec![BigInt::one()]]).is_err());
    }
}
