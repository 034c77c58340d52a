//! Exact phase-one simplex for feasibility of `A x >= b, E x = f` with free
//! `x`, returning either a feasible point or a Farkas certificate.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::matrix::dot;
use crate::arith::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearSystem {
    pub ineq: Vec<Vec<Rational>>,
    pub ineq_rhs: Vec<Rational>,
    pub eq: Vec<Vec<Rational>>,
    pub eq_rhs: Vec<Rational>,
    pub dim: usize,
}

/// Multipliers proving infeasibility: `y_ineq >= 0`,
/// `y_ineq^T A + y_eq^T E = 0` and `y_ineq^T b + y_eq^T f > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Farkas {
    pub y_ineq: Vec<Rational>,
    pub y_eq: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    Infeasible(Farkas),
}

impl LinearSystem {
    pub fn push_ineq(&mut self, row: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(row.len(), self.dim);
        self.ineq.push(row);
        self.ineq_rhs.push(rhs);
    }

    pub fn push_eq(&mut self, row: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(row.len(), self.dim);
        self.eq.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.ineq.iter().zip(&self.ineq_rhs).all(|(r, b)| dot(r, x) >= *b)
            && self.eq.iter().zip(&self.eq_rhs).all(|(r, f)| dot(r, x) == *f)
    }

    pub fn refuted_by(&self, c: &Farkas) -> bool {
        if c.y_ineq.len() != self.ineq.len() || c.y_eq.len() != self.eq.len() {
            return false;
        }
        if c.y_ineq.iter().any(Signed::is_negative) {
            return false;
        }
        let combo_zero = (0..self.dim).all(|j| {
            let s = self.ineq.iter().zip(&c.y_ineq).map(|(r, y)| &r[j] * y).sum::<Rational>()
                + self.eq.iter().zip(&c.y_eq).map(|(r, y)| &r[j] * y).sum::<Rational>();
            s.is_zero()
        });
        let value = dot(&c.y_ineq, &self.ineq_rhs) + dot(&c.y_eq, &self.eq_rhs);
        combo_zero && value.is_positive()
    }

    /// Decides feasibility; either outcome is re-verified exactly before it
    /// is returned.
    pub fn solve(&self) -> LpOutcome {
        let out = Tableau::phase_one(self);
        match &out {
            LpOutcome::Feasible(x) => assert!(self.satisfied_by(x), "simplex returned a non-feasible point"),
            LpOutcome::Infeasible(c) => assert!(self.refuted_by(c), "simplex returned an invalid certificate"),
        }
        out
    }
}

/// Columns: `x+ (n) | x- (n) | slack (m_ineq) | artificial (m)`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn phase_one(sys: &LinearSystem) -> LpOutcome {
        let n = sys.dim;
        let mi = sys.ineq.len();
        let m = mi + sys.eq.len();
        let width = 2 * n + mi + m;
        let art0 = 2 * n + mi;
        let mut sigma = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let all = sys.ineq.iter().zip(&sys.ineq_rhs).chain(sys.eq.iter().zip(&sys.eq_rhs));
        for (i, (r, b)) in all.enumerate() {
            let s = if b.is_negative() { -Rational::one() } else { Rational::one() };
            let mut row = vec![Rational::zero(); width];
            for j in 0..n {
                row[j] = &s * &r[j];
                row[n + j] = -&row[j];
            }
            if i < mi {
                row[2 * n + i] = -&s;
            }
            row[art0 + i] = Rational::one();
            rows.push(row);
            rhs.push(&s * b);
            sigma.push(s);
        }
        let mut cost = vec![Rational::zero(); width + 1];
        for j in 0..width {
            cost[j] = if j >= art0 {
                Rational::zero()
            } else {
                -rows.iter().map(|r| &r[j]).sum::<Rational>()
            };
        }
        cost[width] = -rhs.iter().sum::<Rational>();
        let mut t = Tableau {
            rows,
            rhs,
            cost,
            basis: (art0..art0 + m).collect(),
        };
        t.run(width);
        // cost[width] holds minus the phase-one objective
        if t.cost[width].is_negative() {
            let w: Vec<Rational> = (0..m).map(|i| Rational::one() - &t.cost[art0 + i]).collect();
            let y: Vec<Rational> = w.iter().zip(&sigma).map(|(w, s)| w * s).collect();
            LpOutcome::Infeasible(Farkas {
                y_ineq: y[..mi].to_vec(),
                y_eq: y[mi..].to_vec(),
            })
        } else {
            let mut z = vec![Rational::zero(); width];
            for (i, &b) in t.basis.iter().enumerate() {
                z[b] = t.rhs[i].clone();
            }
            LpOutcome::Feasible((0..n).map(|j| &z[j] - &z[n + j]).collect())
        }
    }

    /// Bland's rule: lowest-index entering column, lowest basis index among
    /// tied ratios; terminates without cycling.
    fn run(&mut self, width: usize) {
        loop {
            let Some(enter) = (0..width).find(|&j| self.cost[j].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (pr, _) = leave.expect("phase one is bounded below by zero");
            self.pivot(pr, enter, width);
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize, width: usize) {
        let p = self.rows[pr][pc].clone();
        for v in self.rows[pr].iter_mut() {
            *v /= &p;
        }
        self.rhs[pr] /= &p;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for i in 0..self.rows.len() {
            if i == pr || self.rows[i][pc].is_zero() {
                continue;
            }
            let f = self.rows[i][pc].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.cost[pc].clone();
        for (c, p) in self.cost.iter_mut().zip(&prow[..width]) {
            if !p.is_zero() {
                *c -= &f * p;
            }
        }
        self.cost[width] -= &f * &prhs;
        self.basis[pr] = pc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn sys(dim: usize) -> LinearSystem {
        LinearSystem {
            dim,
            ..Default::default()
        }
    }

    #[test]
    fn box_feasible_and_contradiction() {
        let mut s = sys(2);
        s.push_ineq(vec![int(1), int(0)], int(1));
        s.push_ineq(vec![int(0), int(1)], int(-3));
        s.push_ineq(vec![int(-1), int(-1)], int(-5));
        assert!(matches!(s.solve(), LpOutcome::Feasible(_)));
        s.push_ineq(vec![int(1), int(1)], int(6));
        let LpOutcome::Infeasible(c) = s.solve() else {
            panic!("x + y >= 6 and x + y <= 5 are incompatible")
        };
        assert!(s.refuted_by(&c));
    }

    #[test]
    fn equalities() {
        let mut s = sys(2);
        s.push_eq(vec![int(1), int(1)], int(1));
        s.push_eq(vec![int(1), int(-1)], rat(1, 2));
        let LpOutcome::Feasible(x) = s.solve() else { panic!() };
        assert_eq!(x, vec![rat(3, 4), rat(1, 4)]);
        s.push_ineq(vec![int(1), int(0)], int(1));
        assert!(matches!(s.solve(), LpOutcome::Infeasible(_)));
    }
}
