use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::ConeError;
use crate::arith::rational::{self, Rational};
use crate::arith::RationalMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Zis,
    Zis2,
    Zis3,
    Custom,
}

impl Case {
    pub fn parse(s: &str) -> Result<Case, ConeError> {
        match s.to_ascii_lowercase().as_str() {
            "zis" => Ok(Case::Zis),
            "zis2" => Ok(Case::Zis2),
            "zis3" => Ok(Case::Zis3),
            "custom" => Ok(Case::Custom),
            other => Err(ConeError::Parse(format!("unknown case {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Zis => "zis",
            Case::Zis2 => "zis2",
            Case::Zis3 => "zis3",
            Case::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coord {
    pub name: String,
    /// Coordinates pinned to a value do not appear as matrix columns; their
    /// contributions become the constant part of each form.
    pub fixed: Option<Rational>,
}

/// A linear form with one parametric coefficient per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub label: String,
    pub entries: Vec<Expr>,
}

/// Parametric system of constraints `form(X) >= 0`.
///
/// `rows` define the (affine) simplicial cone. `cuts` and `equalities` are
/// extra valid relations used only by the closure feasibility test, and
/// `hyperplane` is the form that must vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSystem {
    pub case: Case,
    pub name: String,
    pub coords: Vec<Coord>,
    pub rows: Vec<Row>,
    pub cuts: Vec<Row>,
    pub equalities: Vec<Row>,
    pub hyperplane: Row,
}

/// Forms `A x + b` evaluated at fixed parameters, over the free coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForms {
    pub matrix: RationalMatrix,
    pub constants: Vec<Rational>,
}

impl AffineForms {
    pub fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .mul_vec(x)
            .expect("dimension checked at instantiation")
            .into_iter()
            .zip(&self.constants)
            .map(|(v, c)| v + c)
            .collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constants.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub alpha: Rational,
    pub g: Rational,
    pub rows: AffineForms,
    pub cuts: AffineForms,
    pub equalities: AffineForms,
    pub hyperplane: AffineForms,
}

impl ConeSystem {
    pub fn free_labels(&self) -> Vec<&str> {
        self.coords.iter().filter(|c| c.fixed.is_none()).map(|c| c.name.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.coords.iter().filter(|c| c.fixed.is_none()).count()
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.dim()
    }

    fn check_params(alpha: &Rational, g: &Rational) -> Result<(), ConeError> {
        if *alpha <= Rational::zero() || *alpha >= Rational::one() {
            return Err(ConeError::Domain(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if *g <= Rational::zero() {
            return Err(ConeError::Domain(format!("g = {g} must be positive")));
        }
        Ok(())
    }

    fn forms(&self, rows: &[Row], alpha: &Rational, g: &Rational) -> Result<AffineForms, ConeError> {
        let free = self.dim();
        let mut m = RationalMatrix::zeros(rows.len(), free);
        let mut constants = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.entries.len() != self.coords.len() {
                return Err(ConeError::Parse(format!(
                    "row {:?} has {} entries for {} coordinates",
                    row.label,
                    row.entries.len(),
                    self.coords.len()
                )));
            }
            let mut col = 0;
            let mut c = Rational::zero();
            for (coord, e) in self.coords.iter().zip(&row.entries) {
                let v = e.eval(alpha, g)?;
                match &coord.fixed {
                    Some(val) => c += v * val,
                    None => {
                        m[(i, col)] = v;
                        col += 1;
                    }
                }
            }
            constants.push(c);
        }
        Ok(AffineForms { matrix: m, constants })
    }

    pub fn instantiate_all(&self, alpha: &Rational, g: &Rational) -> Result<Instance, ConeError> {
        Self::check_params(alpha, g)?;
        Ok(Instance {
            alpha: alpha.clone(),
            g: g.clone(),
            rows: self.forms(&self.rows, alpha, g)?,
            cuts: self.forms(&self.cuts, alpha, g)?,
            equalities: self.forms(&self.equalities, alpha, g)?,
            hyperplane: self.forms(std::slice::from_ref(&self.hyperplane), alpha, g)?,
        })
    }

    /// The constraint matrix of the simplicial rows at `(alpha, g)`.
    pub fn instantiate(&self, alpha: &Rational, g: &Rational) -> Result<RationalMatrix, ConeError> {
        Ok(self.instantiate_all(alpha, g)?.rows.matrix)
    }

    /// Line-oriented text form, readable by [`ConeSystem::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.name);
        let _ = writeln!(out, "case {}", self.case.name());
        for c in &self.coords {
            match &c.fixed {
                Some(v) => {
                    let _ = writeln!(out, "coord {} = {v}", c.name);
                }
                None => {
                    let _ = writeln!(out, "coord {}", c.name);
                }
            }
        }
        let mut emit = |kind: &str, r: &Row| {
            let cells: Vec<String> = r.entries.iter().map(|e| e.to_string()).collect();
            if r.label.is_empty() {
                let _ = writeln!(out, "{kind} {}", cells.join(" "));
            } else {
                let _ = writeln!(out, "{kind} {}: {}", r.label, cells.join(" "));
            }
        };
        for r in &self.rows {
            emit("row", r);
        }
        for r in &self.cuts {
            emit("cut", r);
        }
        for r in &self.equalities {
            emit("equality", r);
        }
        emit("hyperplane", &self.hyperplane);
        out
    }

    /// Reads the text format:
    ///
    /// ```text
    /// case custom
    /// coord x
    /// coord y = 1
    /// row first: 1 -alpha
    /// cut -1 g
    /// equality 1 -1
    /// hyperplane 1 -a
    /// ```
    ///
    /// Entries are whitespace separated, one per coordinate in declaration
    /// order, each an arithmetic expression in `alpha`, `a`, `g` and numbers.
    pub fn parse(text: &str) -> Result<ConeSystem, ConeError> {
        let mut case = Case::Custom;
        let mut name = String::new();
        let mut coords: Vec<Coord> = Vec::new();
        let mut rows = Vec::new();
        let mut cuts = Vec::new();
        let mut equalities = Vec::new();
        let mut hyperplane = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if name.is_empty() {
                    name = comment.trim().to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConeError::Parse(format!("line {}: {msg}", lineno + 1));
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "case" => case = Case::parse(rest)?,
                "coord" => {
                    let (cname, fixed) = match rest.split_once('=') {
                        Some((n, v)) => (n.trim(), Some(rational::parse_rational(v).map_err(|e| err(e.to_string()))?)),
                        None => (rest, None),
                    };
                    if cname.is_empty() || cname.contains(char::is_whitespace) {
                        return Err(err(format!("bad coordinate name {cname:?}")));
                    }
                    if coords.iter().any(|c| c.name == cname) {
                        return Err(err(format!("duplicate coordinate {cname}")));
                    }
                    coords.push(Coord {
                        name: cname.to_string(),
                        fixed,
                    });
                }
                "row" | "cut" | "equality" | "hyperplane" => {
                    let (label, body) = match rest.split_once(':') {
                        Some((l, b)) => (l.trim().to_string(), b),
                        None => (String::new(), rest),
                    };
                    let entries = body
                        .split_whitespace()
                        .map(Expr::parse)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| err(e.to_string()))?;
                    if entries.len() != coords.len() {
                        return Err(err(format!("{} entries for {} coordinates", entries.len(), coords.len())));
                    }
                    let r = Row { label, entries };
                    match kw {
                        "row" => rows.push(r),
                        "cut" => cuts.push(r),
                        "equality" => equalities.push(r),
                        _ => {
                            if hyperplane.replace(r).is_some() {
                                return Err(err("second hyperplane".into()));
                            }
                        }
                    }
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            }
        }
        let hyperplane = hyperplane.ok_or_else(|| ConeError::Parse("missing hyperplane".into()))?;
        if rows.is_empty() {
            return Err(ConeError::Parse("no rows".into()));
        }
        Ok(ConeSystem {
            case,
            name,
            coords,
            rows,
            cuts,
            equalities,
            hyperplane,
        })
    }
}

impl fmt::Display for ConeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Index labels along one chain: `nu, r1, ..., rn, k`.
fn points(n: usize) -> Vec<String> {
    std::iter::once("nu".to_string())
        .chain((1..=n).map(|i| format!("r{i}")))
        .chain(std::iter::once("k".to_string()))
        .collect()
}

fn xi(p: &str, off: i32) -> String {
    suffixed("xi", p, off)
}

fn big_x(p: &str, off: i32) -> String {
    suffixed("X", p, off)
}

fn suffixed(base: &str, p: &str, off: i32) -> String {
    match off {
        0 => format!("{base}[{p}]"),
        o if o > 0 => format!("{base}[{p}+{o}]"),
        o => format!("{base}[{p}{o}]"),
    }
}

struct Builder {
    coords: Vec<Coord>,
}

impl Builder {
    fn new(n: usize) -> Self {
        let pts = points(n);
        let mut coords = Vec::new();
        for p in &pts {
            coords.push(xi(p, -1));
            coords.push(xi(p, 0));
        }
        for p in &pts {
            if p != "nu" {
                coords.push(big_x(p, 0));
            }
            coords.push(big_x(p, 1));
        }
        let mut coords: Vec<Coord> = coords.into_iter().map(|name| Coord { name, fixed: None }).collect();
        // log q_nu is the unit of scale
        coords.push(Coord {
            name: big_x("nu", 0),
            fixed: Some(Rational::one()),
        });
        Self { coords }
    }

    fn row(&self, label: impl Into<String>, terms: &[(Expr, String)]) -> Row {
        let mut entries = vec![Expr::zero(); self.coords.len()];
        for (e, name) in terms {
            let i = self
                .coords
                .iter()
                .position(|c| &c.name == name)
                .unwrap_or_else(|| panic!("unknown coordinate {name}"));
            entries[i] = e.clone();
        }
        Row {
            label: label.into(),
            entries,
        }
    }
}

fn one() -> Expr {
    Expr::int(1)
}

fn minus_one() -> Expr {
    Expr::int(-1)
}

/// The three built-in systems. Conventions: `xi = ln zeta`, `X = ln q`,
/// `X[nu] = 1`; every row reads `form >= 0`.
pub fn builtin_system(case: Case) -> Result<ConeSystem, ConeError> {
    let n = match case {
        Case::Zis | Case::Zis2 => 2,
        Case::Zis3 => 3,
        Case::Custom => return Err(ConeError::Domain("custom systems are loaded from text".into())),
    };
    let pts = points(n);
    let b = Builder::new(n);
    let last_r = &pts[n];
    let mut rows = Vec::new();

    rows.push(b.row(
        "det",
        &[
            (one(), xi("nu", -1)),
            (one(), xi(last_r, -1)),
            (one(), xi("k", -1)),
            (one(), xi("k", 0)),
            (one(), big_x("k", 1)),
        ],
    ));
    if case == Case::Zis2 {
        rows.push(b.row(
            "det-r1",
            &[(one(), xi("r1", -1)), (one(), xi("r1", 0)), (one(), big_x("r1", 1))],
        ));
    }
    // xi_{j-1} + alpha X_j <= 0
    let aal = |b: &Builder, p: &str, off: i32| {
        let (xp, xo) = (p.to_string(), off - 1);
        b.row(
            format!("alpha {}", big_x(p, off)),
            &[(minus_one(), xi(&xp, xo)), (-Expr::Alpha, big_x(p, off))],
        )
    };
    rows.push(aal(&b, "nu", 0));
    rows.push(aal(&b, "nu", 1));
    let aal_pts: Vec<&str> = match case {
        Case::Zis3 => vec!["r2", "r3", "k"],
        _ => vec!["r1", "r2", "k"],
    };
    for p in &aal_pts {
        rows.push(aal(&b, p, 1));
    }
    // X_{r_i + 1} <= X_{r_{i+1}} along the inner points
    for w in pts[1..].windows(2) {
        rows.push(b.row(
            format!("order X {}", w[0]),
            &[(one(), big_x(&w[1], 0)), (minus_one(), big_x(&w[0], 1))],
        ));
    }
    let ge = |b: &Builder, hi: String, lo: String| {
        b.row(format!("{hi} >= {lo}"), &[(one(), hi.clone()), (minus_one(), lo)])
    };
    match case {
        Case::Zis => {
            rows.push(ge(&b, xi("r1", -1), xi("r1", 0)));
            rows.push(ge(&b, xi("r1", 0), xi("r2", -1)));
            rows.push(ge(&b, xi("r2", 0), xi("k", -1)));
        }
        Case::Zis2 => {
            rows.push(ge(&b, xi("r1", 0), xi("r2", -1)));
            rows.push(ge(&b, xi("r2", 0), xi("k", -1)));
        }
        _ => {
            rows.push(ge(&b, xi("r1", 0), xi("r2", -1)));
            rows.push(ge(&b, xi("r2", -1), xi("r2", 0)));
            rows.push(ge(&b, xi("r2", 0), xi("r3", -1)));
            rows.push(ge(&b, xi("r3", 0), xi("k", -1)));
            rows.push(ge(&b, xi("r1", -1), xi("r1", 0)));
        }
    }
    // X_{j+1} <= g X_j
    for p in &pts {
        rows.push(b.row(
            format!("growth {p}"),
            &[(Expr::G, big_x(p, 0)), (minus_one(), big_x(p, 1))],
        ));
    }

    // closure relations: monotone xi and X along the index order, and the
    // equal products across each run after r1
    let mut xi_order = Vec::new();
    let mut x_order = Vec::new();
    for p in &pts {
        for off in -1..=1 {
            let (a, c) = (xi(p, off), big_x(p, off));
            if b.coords.iter().any(|k| k.name == a) {
                xi_order.push(a);
            }
            if b.coords.iter().any(|k| k.name == c) {
                x_order.push(c);
            }
        }
    }
    let mut cuts = Vec::new();
    for w in xi_order.windows(2) {
        cuts.push(ge(&b, w[0].clone(), w[1].clone()));
    }
    for w in x_order.windows(2) {
        cuts.push(ge(&b, w[1].clone(), w[0].clone()));
    }
    let mut equalities = Vec::new();
    for w in pts[1..].windows(2) {
        equalities.push(b.row(
            format!("run {} {}", w[0], w[1]),
            &[
                (one(), xi(&w[0], 0)),
                (one(), big_x(&w[0], 1)),
                (minus_one(), xi(&w[1], -1)),
                (minus_one(), big_x(&w[1], 0)),
            ],
        ));
    }
    let hyperplane = b.row(
        "L",
        &[
            (one(), xi("nu", 0)),
            (one(), big_x("nu", 1)),
            (minus_one(), xi("r1", -1)),
            (minus_one(), big_x("r1", 0)),
        ],
    );
    Ok(ConeSystem {
        case,
        name: format!("builtin {}", case.name()),
        coords: b.coords,
        rows,
        cuts,
        equalities,
        hyperplane,
    })
}

/// Reference 15 x 15 matrix for the first system in its original sign
/// conventions, with its `X[nu]` terms restored as a fixed column. Kept as
/// data so it can be reconciled against the built-in rows.
pub const G_MATRIX_TEXT: &str = include_str!("g_matrix.sys");

pub fn g_matrix_system() -> ConeSystem {
    ConeSystem::parse(G_MATRIX_TEXT).expect("bundled system parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn counts() {
        let zis = builtin_system(Case::Zis).unwrap();
        assert_eq!((zis.rows.len(), zis.dim()), (15, 15));
        let zis2 = builtin_system(Case::Zis2).unwrap();
        assert_eq!((zis2.rows.len(), zis2.dim()), (15, 15));
        let zis3 = builtin_system(Case::Zis3).unwrap();
        assert_eq!((zis3.rows.len(), zis3.dim()), (19, 19));
        assert_eq!(g_matrix_system().dim(), 15);
    }

    #[test]
    fn text_round_trip() {
        for case in [Case::Zis, Case::Zis2, Case::Zis3] {
            let sys = builtin_system(case).unwrap();
            let back = ConeSystem::parse(&sys.to_text()).unwrap();
            let (al, g) = (rat(1, 3), rat(2, 1));
            assert_eq!(back.instantiate_all(&al, &g).unwrap(), sys.instantiate_all(&al, &g).unwrap());
            assert_eq!(back.free_labels(), sys.free_labels());
        }
    }

    #[test]
    fn parameter_domain() {
        let sys = builtin_system(Case::Zis).unwrap();
        assert!(sys.instantiate(&rat(0, 1), &rat(2, 1)).is_err());
        assert!(sys.instantiate(&rat(1, 3), &rat(0, 1)).is_err());
        assert!(ConeSystem::parse("coord x\nrow 1 2\nhyperplane 1").is_err());
    }
}
