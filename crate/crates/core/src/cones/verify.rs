use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::simplex::{Farkas, LinearSystem, LpOutcome};
use super::system::{AffineForms, Case, ConeSystem, Instance};
use super::ConeError;
use crate::arith::matrix::dot;
use crate::arith::rational::{self, Rational};
use crate::arith::{ArithError, Interval, RationalMatrix};
use crate::roots::{self, PolynomialCase, RootBracket};

const MESH: usize = 256;
const CLOSURE_MESH: usize = 40;

fn lift(e: ArithError) -> ConeError {
    match e {
        ArithError::Singular => ConeError::Singular,
        e => e.into(),
    }
}

fn check_tol(tol: &Rational) -> Result<(), ConeError> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(ConeError::Domain(format!("tolerance {tol} must be positive")))
    }
}

/// Admissible `alpha` for the built-in cases.
fn check_case_alpha(case: Case, alpha: &Rational) -> Result<(), ConeError> {
    let q = rational::rat(1, 4);
    let h = rational::rat(1, 2);
    let ok = match case {
        Case::Zis => *alpha >= q && *alpha <= h,
        Case::Zis2 => *alpha >= h && *alpha < Rational::one(),
        Case::Zis3 => *alpha >= q && *alpha < Rational::one(),
        Case::Custom => alpha.is_positive() && *alpha < Rational::one(),
    };
    if ok {
        Ok(())
    } else {
        Err(ConeError::Domain(format!("alpha = {alpha} outside the range of case {}", case.name())))
    }
}

/// The polynomial whose largest positive root the critical ratio of a
/// built-in case should reproduce.
pub fn matching_polynomial(case: Case) -> Option<PolynomialCase> {
    match case {
        Case::Zis => Some(PolynomialCase::F21),
        Case::Zis2 => Some(PolynomialCase::F22),
        Case::Zis3 => Some(PolynomialCase::F3),
        Case::Custom => None,
    }
}

fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let den = rational::common_denominator(&v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * rational::from_bigint(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| rational::from_bigint(x / &g)).collect()
}

/// Apex and edge directions of an instantiated simplicial system: the cone is
/// `apex + sum lambda_i rays[i]` with `lambda >= 0`, and `rays[i]` is the
/// edge along which every row except row `i` stays active.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySet {
    pub labels: Vec<String>,
    pub matrix: RationalMatrix,
    pub constants: Vec<Rational>,
    pub det: Rational,
    pub apex: Vec<Rational>,
    pub rays: Vec<Vec<Rational>>,
}

impl RaySet {
    /// Rows vanishing on ray `i`.
    pub fn active_rows(&self, i: usize) -> usize {
        self.matrix
            .mul_vec(&self.rays[i])
            .expect("square")
            .iter()
            .filter(|v| v.is_zero())
            .count()
    }

    /// Each ray is nonzero, keeps every row nonnegative and leaves exactly its
    /// own row; the apex makes every form vanish.
    pub fn verify(&self) -> bool {
        let apex_ok = self
            .matrix
            .mul_vec(&self.apex)
            .is_ok_and(|v| v.iter().zip(&self.constants).all(|(x, c)| (x + c).is_zero()));
        apex_ok
            && self.rays.iter().enumerate().all(|(i, r)| {
                let vals = self.matrix.mul_vec(r).expect("square");
                vals.iter()
                    .enumerate()
                    .all(|(j, v)| if j == i { v.is_positive() } else { v.is_zero() })
            })
    }
}

pub fn extreme_rays(sys: &ConeSystem, alpha: &Rational, g: &Rational) -> Result<RaySet, ConeError> {
    let inst = sys.instantiate_all(alpha, g)?;
    rays_of(sys, &inst.rows)
}

fn rays_of(sys: &ConeSystem, forms: &AffineForms) -> Result<RaySet, ConeError> {
    if !forms.matrix.is_square() {
        return Err(ConeError::Domain(format!(
            "{} rows over {} coordinates is not simplicial",
            forms.matrix.rows(),
            forms.matrix.cols()
        )));
    }
    let det = forms.matrix.det().map_err(lift)?;
    if det.is_zero() {
        return Err(ConeError::Singular);
    }
    let inv = forms.matrix.inverse().map_err(lift)?;
    let neg_b: Vec<Rational> = forms.constants.iter().map(|c| -c).collect();
    let apex = inv.mul_vec(&neg_b).map_err(lift)?;
    let rays = (0..inv.cols()).map(|j| primitive(inv.column(j))).collect();
    let set = RaySet {
        labels: sys.free_labels().into_iter().map(str::to_string).collect(),
        matrix: forms.matrix.clone(),
        constants: forms.constants.clone(),
        det,
        apex,
        rays,
    };
    assert!(set.verify(), "inverse columns failed re-verification");
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The apex itself lies on the hyperplane.
    ApexOnPlane,
    /// The form vanishes along this ray (homogeneous cones).
    ZeroRay(usize),
    /// The form changes sign from the apex along this ray.
    OppositeRay(usize),
    /// Two rays with opposite strict signs (homogeneous cones).
    OppositePair(usize, usize),
    /// Apex and all rays share one strict sign: infeasible.
    UniformSign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestCertificate {
    /// `apex_value = L(apex)`, `ray_values[i]` is the linear part of `L` on ray `i`.
    Simplicial {
        apex_value: Rational,
        ray_values: Vec<Rational>,
        witness: Witness,
    },
    Point(Vec<Rational>),
    Farkas(Farkas),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneTest {
    pub alpha: Rational,
    pub g: Rational,
    pub feasible: bool,
    pub certificate: TestCertificate,
}

fn sign_test(rays: &RaySet, hyperplane: &AffineForms) -> (bool, TestCertificate) {
    let l = hyperplane.matrix.row(0);
    let apex_value = dot(l, &rays.apex) + &hyperplane.constants[0];
    let ray_values: Vec<Rational> = rays.rays.iter().map(|r| dot(l, r)).collect();
    let apex_zero = rays.apex.iter().all(Zero::is_zero);
    let witness = if apex_value.is_zero() && !apex_zero {
        Witness::ApexOnPlane
    } else if apex_value.is_zero() {
        let pos = ray_values.iter().position(Signed::is_positive);
        let neg = ray_values.iter().position(Signed::is_negative);
        match (ray_values.iter().position(Zero::is_zero), pos, neg) {
            (Some(i), _, _) => Witness::ZeroRay(i),
            (None, Some(i), Some(j)) => Witness::OppositePair(i, j),
            _ => Witness::UniformSign,
        }
    } else {
        let s = rational::sign(&apex_value);
        match ray_values.iter().position(|v| rational::sign(v) == -s) {
            Some(i) => Witness::OppositeRay(i),
            None => Witness::UniformSign,
        }
    };
    let feasible = witness != Witness::UniformSign;
    (
        feasible,
        TestCertificate::Simplicial {
            apex_value,
            ray_values,
            witness,
        },
    )
}

fn lp_test(inst: &Instance) -> (bool, TestCertificate) {
    let dim = inst.rows.matrix.cols();
    let mut lp = LinearSystem {
        dim,
        ..Default::default()
    };
    let push_forms = |lp: &mut LinearSystem, f: &AffineForms, eq: bool| {
        for (i, c) in f.constants.iter().enumerate() {
            let row = f.matrix.row(i).to_vec();
            if eq {
                lp.push_eq(row, -c);
            } else {
                lp.push_ineq(row, -c);
            }
        }
    };
    push_forms(&mut lp, &inst.rows, false);
    push_forms(&mut lp, &inst.cuts, false);
    push_forms(&mut lp, &inst.equalities, true);
    push_forms(&mut lp, &inst.hyperplane, true);
    let homogeneous = [&inst.rows, &inst.cuts, &inst.equalities, &inst.hyperplane]
        .iter()
        .all(|f| f.is_homogeneous());
    if homogeneous {
        // scale out the zero point: some row is positive on any nonzero point
        let sum = (0..dim)
            .map(|j| (0..inst.rows.matrix.rows()).map(|i| inst.rows.matrix[(i, j)].clone()).sum())
            .collect();
        lp.push_ineq(sum, Rational::one());
    }
    match lp.solve() {
        LpOutcome::Feasible(x) => (true, TestCertificate::Point(x)),
        LpOutcome::Infeasible(f) => (false, TestCertificate::Farkas(f)),
    }
}

/// Whether a nonzero point of the cone lies on the hyperplane. Systems with
/// only simplicial rows are decided by the sign pattern of the hyperplane
/// form on apex and rays; systems with extra cuts or equalities by an exact
/// linear program.
pub fn cone_meets_hyperplane(sys: &ConeSystem, alpha: &Rational, g: &Rational) -> Result<HyperplaneTest, ConeError> {
    let inst = sys.instantiate_all(alpha, g)?;
    let square = inst.rows.matrix.is_square();
    if square && inst.rows.matrix.det().map_err(lift)?.is_zero() {
        return Err(ConeError::Singular);
    }
    let (feasible, certificate) = if square && sys.cuts.is_empty() && sys.equalities.is_empty() {
        sign_test(&rays_of(sys, &inst.rows)?, &inst.hyperplane)
    } else {
        lp_test(&inst)
    };
    Ok(HyperplaneTest {
        alpha: alpha.clone(),
        g: g.clone(),
        feasible,
        certificate,
    })
}

/// Value of the hyperplane form at the apex together with the determinant
/// sign, at one `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApexCertificate {
    pub g: Rational,
    pub det_sign: i32,
    pub l_apex: Rational,
    /// `l_apex * det` is zero or has the sign it takes at the top of the scan.
    pub feasible: bool,
}

impl ApexCertificate {
    fn numerator_sign(&self) -> i32 {
        rational::sign(&self.l_apex) * self.det_sign
    }
}

fn apex_eval(sys: &ConeSystem, alpha: &Rational, g: &Rational) -> Result<ApexCertificate, ConeError> {
    let inst = sys.instantiate_all(alpha, g)?;
    let det = inst.rows.matrix.det().map_err(lift)?;
    if det.is_zero() {
        return Err(ConeError::Singular);
    }
    let neg_b: Vec<Rational> = inst.rows.constants.iter().map(|c| -c).collect();
    let apex = inst.rows.matrix.solve(&neg_b).map_err(lift)?;
    let l_apex = inst.hyperplane.eval(&apex).remove(0);
    Ok(ApexCertificate {
        g: g.clone(),
        det_sign: rational::sign(&det),
        l_apex,
        feasible: false,
    })
}

/// Threshold in `g` where the apex of the cone crosses the hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalG {
    pub case: Case,
    pub alpha: Rational,
    pub bracket: Interval,
    pub lo: ApexCertificate,
    pub hi: ApexCertificate,
    /// Cells of the scan where the determinant changes sign.
    pub poles: Vec<Interval>,
    pub scan_bound: Rational,
}

impl CriticalG {
    pub fn consistent(&self) -> bool {
        self.hi.feasible && (!self.lo.feasible || self.bracket.is_point())
    }
}

struct Scan<'a> {
    sys: &'a ConeSystem,
    alpha: &'a Rational,
    poles: Vec<Interval>,
    events: Vec<Interval>,
}

impl Scan<'_> {
    fn eval(&self, g: &Rational) -> Result<ApexCertificate, ConeError> {
        apex_eval(self.sys, self.alpha, g)
    }

    /// Records crossings in `[x, y]`, splitting at determinant sign changes.
    fn cell(&mut self, x: &ApexCertificate, y: &ApexCertificate, depth: u32) -> Result<(), ConeError> {
        if x.det_sign == y.det_sign {
            if rational::sign(&x.l_apex) * rational::sign(&y.l_apex) < 0 {
                self.events.push(Interval::new(x.g.clone(), y.g.clone())?);
            }
            return Ok(());
        }
        if depth > 4 {
            return Ok(());
        }
        let two = rational::int(2);
        let floor = (&y.g - &x.g) / rational::from_bigint(BigInt::one() << 40u32);
        let (mut lo, mut hi) = (x.clone(), y.clone());
        while &hi.g - &lo.g > floor {
            let mut mid = (&lo.g + &hi.g) / &two;
            let m = match self.eval(&mid) {
                Ok(m) => m,
                Err(ConeError::Singular) => {
                    mid += &floor / rational::int(4);
                    self.eval(&mid)?
                }
                Err(e) => return Err(e),
            };
            if m.det_sign == lo.det_sign {
                lo = m;
            } else {
                hi = m;
            }
        }
        self.poles.push(Interval::new(lo.g.clone(), hi.g.clone())?);
        for p in [&lo, &hi] {
            if p.l_apex.is_zero() {
                self.events.push(Interval::point(p.g.clone()));
            }
        }
        self.cell(x, &lo, depth + 1)?;
        self.cell(&hi, y, depth + 1)
    }
}

/// Locates the `g` at which `L(apex)` changes sign, after a mesh scan on
/// `(0, 4/(1-alpha)]` confirming exactly one crossing. Determinant sign
/// changes are isolated first so that poles of `L(apex)` are not mistaken
/// for crossings.
pub fn critical_g(sys: &ConeSystem, alpha: &Rational, tol: &Rational) -> Result<CriticalG, ConeError> {
    check_tol(tol)?;
    check_case_alpha(sys.case, alpha)?;
    let bound = rational::int(4) / (Rational::one() - alpha);
    let mesh: Vec<Rational> = (1..=MESH)
        .map(|i| &bound * rational::rat(i as i64, MESH as i64))
        .collect();
    let evals: Vec<Option<ApexCertificate>> = mesh
        .par_iter()
        .map(|g| match apex_eval(sys, alpha, g) {
            Ok(c) => Ok(Some(c)),
            Err(ConeError::Singular) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let valid: Vec<ApexCertificate> = evals.into_iter().flatten().collect();
    let top = valid.last().ok_or(ConeError::Singular)?.numerator_sign();
    let mut scan = Scan {
        sys,
        alpha,
        poles: Vec::new(),
        events: Vec::new(),
    };
    for p in &valid {
        if p.l_apex.is_zero() {
            scan.events.push(Interval::point(p.g.clone()));
        }
    }
    for w in valid.windows(2) {
        scan.cell(&w[0], &w[1], 0)?;
    }
    let Scan { mut events, poles, .. } = scan;
    events.sort_by(|a, b| a.lo().cmp(b.lo()));
    events.dedup();
    let event = match events.len() {
        0 => {
            return Err(ConeError::NoCrossing {
                bound: bound.to_string(),
            })
        }
        1 => events.pop().unwrap(),
        _ => return Err(ConeError::NonMonotone { flips: events }),
    };
    let mark = |mut c: ApexCertificate| {
        let s = c.numerator_sign();
        c.feasible = s == 0 || s == top;
        c
    };
    let mut lo = apex_eval(sys, alpha, event.lo())?;
    let mut hi = apex_eval(sys, alpha, event.hi())?;
    let two = rational::int(2);
    while !lo.l_apex.is_zero() && !hi.l_apex.is_zero() && &hi.g - &lo.g > *tol {
        let mid = apex_eval(sys, alpha, &((&lo.g + &hi.g) / &two))?;
        if mid.l_apex.is_zero() {
            lo = mid.clone();
            hi = mid;
        } else if rational::sign(&mid.l_apex) == rational::sign(&lo.l_apex) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo.l_apex.is_zero() {
        hi = lo.clone();
    } else if hi.l_apex.is_zero() {
        lo = hi.clone();
    }
    Ok(CriticalG {
        case: sys.case,
        alpha: alpha.clone(),
        bracket: Interval::new(lo.g.clone(), hi.g.clone())?,
        lo: mark(lo),
        hi: mark(hi),
        poles,
        scan_bound: bound,
    })
}

/// Threshold in `g` above which the system with all its cuts and equalities
/// admits a point on the hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureThreshold {
    pub alpha: Rational,
    pub bracket: Interval,
    pub below: Farkas,
    pub above: Vec<Rational>,
}

pub fn closure_threshold(sys: &ConeSystem, alpha: &Rational, tol: &Rational) -> Result<ClosureThreshold, ConeError> {
    check_tol(tol)?;
    check_case_alpha(sys.case, alpha)?;
    let bound = rational::int(4) / (Rational::one() - alpha);
    let test = |g: &Rational| -> Result<(bool, TestCertificate), ConeError> {
        let inst = sys.instantiate_all(alpha, g)?;
        Ok(lp_test(&inst))
    };
    let mesh: Vec<Rational> = (1..=CLOSURE_MESH)
        .map(|i| &bound * rational::rat(i as i64, CLOSURE_MESH as i64))
        .collect();
    let results: Vec<(bool, TestCertificate)> = mesh.par_iter().map(test).collect::<Result<_, _>>()?;
    let flips: Vec<Interval> = results
        .windows(2)
        .zip(mesh.windows(2))
        .filter(|(r, _)| r[0].0 != r[1].0)
        .map(|(_, m)| Interval::new(m[0].clone(), m[1].clone()))
        .collect::<Result<_, _>>()?;
    let first = results.iter().position(|r| r.0);
    let (mut lo, mut hi, mut cert_lo, mut cert_hi) = match (first, flips.len()) {
        (Some(i), 1) if i > 0 => (
            mesh[i - 1].clone(),
            mesh[i].clone(),
            results[i - 1].1.clone(),
            results[i].1.clone(),
        ),
        (Some(_), n) if n > 1 => return Err(ConeError::NonMonotone { flips }),
        _ => {
            return Err(ConeError::NoCrossing {
                bound: bound.to_string(),
            })
        }
    };
    let two = rational::int(2);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        let (ok, cert) = test(&mid)?;
        if ok {
            hi = mid;
            cert_hi = cert;
        } else {
            lo = mid;
            cert_lo = cert;
        }
    }
    let (TestCertificate::Farkas(below), TestCertificate::Point(above)) = (cert_lo, cert_hi) else {
        unreachable!("linear program certificates");
    };
    Ok(ClosureThreshold {
        alpha: alpha.clone(),
        bracket: Interval::new(lo, hi)?,
        below,
        above,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPoint {
    pub alpha: Rational,
    pub simplicial: bool,
    pub critical: Result<CriticalG, ConeError>,
    pub root: Option<Result<RootBracket, ConeError>>,
    pub overlap: bool,
    /// Hyperplane test just below the critical bracket.
    pub below: Option<Result<HyperplaneTest, ConeError>>,
    pub closure: Option<Result<ClosureThreshold, ConeError>>,
}

impl CriticalPoint {
    pub fn below_infeasible(&self) -> bool {
        matches!(&self.below, Some(Ok(t)) if !t.feasible)
    }

    pub fn passed(&self) -> bool {
        self.critical.is_ok() && self.overlap && self.below_infeasible()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub case: Case,
    pub polynomial: Option<PolynomialCase>,
    pub row_labels: Vec<String>,
    pub system_text: String,
    pub points: Vec<CriticalPoint>,
}

impl ConeReport {
    pub fn all_passed(&self) -> bool {
        self.points.iter().all(CriticalPoint::passed)
    }
}

/// Offset below the critical bracket at which emptiness below the crossing is checked.
pub fn below_offset() -> Rational {
    rational::rat(1, 1000)
}

/// Critical ratio, matching polynomial root and the infeasibility check below
/// the bracket for every grid point, in grid order.
pub fn verify_cone_system(
    sys: &ConeSystem,
    polynomial: Option<PolynomialCase>,
    grid: &[Rational],
    tol: &Rational,
    with_closure: bool,
) -> Result<ConeReport, ConeError> {
    check_tol(tol)?;
    let points = grid
        .par_iter()
        .map(|alpha| {
            let critical = critical_g(sys, alpha, tol);
            let root = polynomial.map(|p| roots::positive_root(p, alpha, tol).map_err(ConeError::from));
            let overlap = match (&critical, &root) {
                (Ok(c), Some(Ok(r))) => c.bracket.overlaps(&r.interval()),
                _ => false,
            };
            let probe = critical.as_ref().map(|c| c.bracket.hi().clone()).unwrap_or_else(|_| rational::int(2));
            let simplicial = sys
                .instantiate(alpha, &probe)
                .and_then(|m| m.det().map_err(lift))
                .is_ok_and(|d| !d.is_zero());
            let below = critical.as_ref().ok().and_then(|c| {
                let g = c.bracket.lo() - below_offset();
                g.is_positive().then(|| cone_meets_hyperplane(sys, alpha, &g))
            });
            let closure = with_closure.then(|| closure_threshold(sys, alpha, tol));
            CriticalPoint {
                alpha: alpha.clone(),
                simplicial,
                critical,
                root,
                overlap,
                below,
                closure,
            }
        })
        .collect();
    Ok(ConeReport {
        case: sys.case,
        polynomial,
        row_labels: sys.rows.iter().map(|r| r.label.clone()).collect(),
        system_text: sys.to_text(),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowMatch {
    Same { reference: String },
    Negated { reference: String },
    Differs {
        closest: String,
        negated: bool,
        columns: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconciliation {
    /// One entry per candidate row, labelled by the candidate row label.
    pub rows: Vec<(String, RowMatch)>,
    pub candidate_det_nonzero: bool,
    pub reference_critical: Result<CriticalG, ConeError>,
    pub candidate_critical: Result<CriticalG, ConeError>,
}

impl Reconciliation {
    pub fn identical_brackets(&self) -> bool {
        matches!((&self.reference_critical, &self.candidate_critical), (Ok(a), Ok(b)) if a.bracket == b.bracket)
    }
}

fn dense_rows(sys: &ConeSystem, names: &[String], alpha: &Rational, g: &Rational) -> Result<Vec<Vec<Rational>>, ConeError> {
    sys.rows
        .iter()
        .map(|r| {
            let mut v = vec![Rational::zero(); names.len()];
            for (c, e) in sys.coords.iter().zip(&r.entries) {
                let i = names
                    .iter()
                    .position(|n| *n == c.name)
                    .ok_or_else(|| ConeError::Domain(format!("coordinate {} unknown to the reference", c.name)))?;
                let x = e.eval(alpha, g)?;
                v[i] = match &c.fixed {
                    Some(f) => x * f,
                    None => x,
                };
            }
            Ok(v)
        })
        .collect()
}

/// Row-by-row comparison of two encodings of one system over shared
/// coordinate names, evaluated at a generic parameter point, plus the
/// critical ratio of each at `alpha`.
pub fn reconcile(
    reference: &ConeSystem,
    candidate: &ConeSystem,
    alpha: &Rational,
    tol: &Rational,
) -> Result<Reconciliation, ConeError> {
    let names: Vec<String> = reference.coords.iter().map(|c| c.name.clone()).collect();
    let (sa, sg) = (rational::rat(3, 11), rational::rat(13, 7));
    let reference_rows = dense_rows(reference, &names, &sa, &sg)?;
    let candidate_rows = dense_rows(candidate, &names, &sa, &sg)?;
    let diff = |a: &[Rational], b: &[Rational], neg: bool| -> Vec<String> {
        a.iter()
            .zip(b)
            .zip(&names)
            .filter(|((x, y), _)| if neg { **x != -(*y).clone() } else { x != y })
            .map(|(_, n)| n.clone())
            .collect()
    };
    let rows = candidate
        .rows
        .iter()
        .zip(&candidate_rows)
        .map(|(row, v)| {
            let mut best: Option<(usize, bool, Vec<String>)> = None;
            for (j, w) in reference_rows.iter().enumerate() {
                for neg in [false, true] {
                    let cols = diff(v, w, neg);
                    if best.as_ref().is_none_or(|b| cols.len() < b.2.len()) {
                        best = Some((j, neg, cols));
                    }
                }
            }
            let (j, neg, cols) = best.expect("reference has rows");
            let reference = reference.rows[j].label.clone();
            let m = match (cols.is_empty(), neg) {
                (true, false) => RowMatch::Same { reference },
                (true, true) => RowMatch::Negated { reference },
                _ => RowMatch::Differs {
                    closest: reference,
                    negated: neg,
                    columns: cols,
                },
            };
            (row.label.clone(), m)
        })
        .collect();
    let candidate_det_nonzero = candidate
        .instantiate(&sa, &sg)
        .and_then(|m| m.det().map_err(lift))
        .is_ok_and(|d| !d.is_zero());
    Ok(Reconciliation {
        rows,
        candidate_det_nonzero,
        reference_critical: critical_g(reference, alpha, tol),
        candidate_critical: critical_g(candidate, alpha, tol),
    })
}

/// Solution of the three-way equality defining `u` and `v`, whose common
/// value `V` is the largest positive root of `F1` at `omega_hat = alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvSolution {
    pub alpha: Rational,
    pub common: RootBracket,
    pub u: Interval,
    pub v: Interval,
    /// The three expressions evaluated at the lower and upper end of `common`.
    pub expressions: [[Rational; 3]; 2],
}

impl UvSolution {
    pub fn max_disagreement(&self) -> Rational {
        let mut m = Rational::zero();
        for e in &self.expressions {
            for i in 0..3 {
                for j in 0..3 {
                    let d = (&e[i] - &e[j]).abs();
                    if d > m {
                        m = d;
                    }
                }
            }
        }
        m
    }
}

fn uv_expressions(alpha: &Rational, big_v: &Rational) -> Result<[Rational; 3], ConeError> {
    let one = Rational::one();
    let m = &one - alpha;
    let a = alpha / &m;
    let u = &a / big_v;
    let v = one.clone() / &m - big_v;
    if u.is_zero() || v == one {
        return Err(ConeError::OutOfRange(format!("(u, v) = ({u}, {v})")));
    }
    Ok([
        alpha / (&m * &u),
        -&v + one.clone() / &m,
        (&m * &u + alpha) / (&m * (&one - &v)),
    ])
}

pub fn solve_uv(alpha: &Rational, tol: &Rational) -> Result<UvSolution, ConeError> {
    check_tol(tol)?;
    let one = Rational::one();
    if *alpha < rational::rat(1, 4) || *alpha >= one {
        return Err(ConeError::Domain(format!("alpha = {alpha} outside [1/4, 1)")));
    }
    let m = &one - alpha;
    let a = alpha / &m;
    let mut t = tol.clone();
    for _ in 0..64 {
        let common = roots::positive_root(PolynomialCase::F1, alpha, &t)?;
        let expressions = [uv_expressions(alpha, &common.lo)?, uv_expressions(alpha, &common.hi)?];
        let u = Interval::new(&a / &common.hi, &a / &common.lo)?;
        let v = Interval::new(one.clone() / &m - &common.hi, one.clone() / &m - &common.lo)?;
        for (name, iv) in [("u", &u), ("v", &v)] {
            if !iv.lo().is_positive() || *iv.hi() >= one {
                return Err(ConeError::OutOfRange(format!("{name} in {iv}")));
            }
        }
        let sol = UvSolution {
            alpha: alpha.clone(),
            common,
            u,
            v,
            expressions,
        };
        if sol.max_disagreement() <= *tol {
            return Ok(sol);
        }
        t /= rational::int(16);
    }
    Err(ConeError::Domain(format!("no agreement within {tol} at alpha = {alpha}")))
}
