use std::path::Path;

use diophant::approx::{generate_power_basis, ApproxRun, BestApproxRecord, RecordLine, TargetFile, TargetVector};
use diophant::arith::rational::{self, Rational};
use diophant::chains::{detect_chains, estimate_index, verify_chain, ChainError};
use diophant::cones::{
    builtin_system, g_matrix_system, matching_polynomial, reconcile, solve_uv, verify_cone_system, ApexCertificate, Case,
    ConeError, ConeSystem, CriticalG, HyperplaneTest, RowMatch, TestCertificate, Witness,
};
use diophant::exponents::{estimate_exponents, ExponentError};
use diophant::roots::{self, g_table, rational_grid, remark2_compare, RootBracket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cache;
use crate::report::{emit, exact_and_dec, exact_and_dec_cells, sha256_hex, Csv, Fmt, InputRecord};
use crate::settings::Settings;
use crate::{Command, Failure};

/// Main output text, extra manifest fields and the inputs consumed.
struct Produced {
    text: String,
    summary: Value,
    inputs: Vec<InputRecord>,
    status: Result<(), Failure>,
}

impl Produced {
    fn ok(text: String, summary: Value, inputs: Vec<InputRecord>) -> Self {
        Self {
            text,
            summary,
            inputs,
            status: Ok(()),
        }
    }
}

pub fn dispatch(command: Command, s: &Settings) -> Result<(), Failure> {
    let fmt = Fmt { digits: s.digits() };
    let produced = match command {
        Command::BestApprox => best_approx(s)?,
        Command::Exponents => exponents(s, fmt)?,
        Command::DetectIndex => detect_index(s)?,
        Command::Pipeline => pipeline(s, fmt)?,
        Command::GTable => gtable(s, fmt)?,
        Command::VerifyCones => verify_cones(s, fmt)?,
        Command::Remark2 => remark2(s, fmt)?,
        Command::UvSolve => uv_solve(s, fmt)?,
    };
    let manifest = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "settings": s,
        "decimal_digits": fmt.digits,
        "inputs": produced.inputs.iter().map(|i| json!({
            "role": i.role, "spec": i.spec, "sha256": i.sha256, "content": i.content,
        })).collect::<Vec<_>>(),
        "summary": produced.summary,
    });
    emit(s.out.as_deref(), &produced.text, manifest)?;
    produced.status
}

fn parse_q(s: &str, what: &str) -> Result<Rational, Failure> {
    rational::parse_rational(s).map_err(|e| Failure::input(format!("{what}: {e}")))
}

fn tol(s: &Settings, default: &str) -> Result<Rational, Failure> {
    let t = parse_q(s.tol.as_deref().unwrap_or(default), "--tol")?;
    if t <= Rational::from_integer(0.into()) {
        return Err(Failure::input("--tol must be positive"));
    }
    Ok(t)
}

/// `lo:hi:count` gives `count` equally spaced points with both ends
/// included; otherwise a comma-separated list. An empty string or a count of
/// zero gives an empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<Rational>, Failure> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, count] => {
            let (lo, hi) = (parse_q(lo, "grid")?, parse_q(hi, "grid")?);
            let count: usize = count.trim().parse().map_err(|_| Failure::input(format!("grid count {count:?}")))?;
            if lo > hi {
                return Err(Failure::input("grid lower end exceeds upper end"));
            }
            Ok(match count {
                0 => Vec::new(),
                1 => vec![lo],
                n => rational_grid(&lo, &hi, n - 1),
            })
        }
        [_] => spec.split(',').map(|x| parse_q(x, "grid")).collect(),
        _ => Err(Failure::input(format!("grid {spec:?} is neither lo:hi:count nor a list"))),
    }
}

fn grid(s: &Settings, default: &str) -> Result<Vec<Rational>, Failure> {
    parse_grid(s.alpha_grid.as_deref().unwrap_or(default))
}

fn load_target(s: &Settings) -> Result<(TargetVector, InputRecord), Failure> {
    let spec = s.target.as_deref().ok_or_else(|| Failure::input("--target is required"))?;
    let (target, sha) = if let Some(rest) = spec.strip_prefix("power:") {
        let p: Vec<&str> = rest.split(':').collect();
        let [r, k, n] = p.as_slice() else {
            return Err(Failure::input("power target is power:R:K:N"));
        };
        let r = parse_q(r, "radicand")?;
        let k: u32 = k.parse().map_err(|_| Failure::input(format!("degree {k:?}")))?;
        let n: usize = n.parse().map_err(|_| Failure::input(format!("dimension {n:?}")))?;
        let t = generate_power_basis(&r, k, n, s.precision.unwrap_or(40)).map_err(Failure::input)?;
        (t, None)
    } else if let Some(n) = spec.strip_prefix("random:") {
        let n: usize = n.parse().map_err(|_| Failure::input(format!("dimension {n:?}")))?;
        let digits = s.precision.unwrap_or(30);
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed.unwrap_or(0));
        let comps: Vec<String> = (0..n)
            .map(|_| {
                let body: String = (0..digits).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
                format!("0.{body}")
            })
            .collect();
        let t = TargetVector::from_strings(format!("random seed {}", s.seed.unwrap_or(0)), digits, &comps)
            .map_err(Failure::input)?;
        (t, None)
    } else {
        let text = std::fs::read_to_string(spec).map_err(|e| Failure::input(format!("{spec}: {e}")))?;
        let mut file: TargetFile = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{spec}: {e}")))?;
        if let Some(p) = s.precision {
            file.precision_digits = p;
        }
        let t = TargetVector::from_file(&file).map_err(|e| Failure::input(format!("{spec}: {e}")))?;
        (t, Some(sha256_hex(text.as_bytes())))
    };
    let record = InputRecord {
        role: "target".into(),
        spec: spec.to_string(),
        sha256: sha,
        content: serde_json::to_value(target.to_file()).map_err(Failure::other)?,
    };
    Ok((target, record))
}

fn q_max(s: &Settings) -> Result<u64, Failure> {
    match s.q {
        Some(0) | None => Err(Failure::input("--Q must be given and positive")),
        Some(q) => Ok(q),
    }
}

fn run_engine(s: &Settings) -> Result<(ApproxRun, Vec<InputRecord>, bool), Failure> {
    let (target, rec) = load_target(s)?;
    let q = q_max(s)?;
    let (run, hit) = cache::engine_run(&target, q)?;
    Ok((run, vec![rec], hit))
}

fn run_summary(run: &ApproxRun, cache_hit: bool) -> Value {
    json!({
        "records": run.records.len(),
        "uncertain": run.uncertain,
        "exact_hit": run.exact_hit,
        "q_max": run.q_max,
        "cache_hit": cache_hit,
    })
}

fn load_records(path: &Path) -> Result<(Vec<BestApproxRecord>, InputRecord), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |e: String| Failure::input(format!("{} line {}: {e}", path.display(), i + 1));
        let rec: RecordLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        out.push(BestApproxRecord::try_from(&rec).map_err(|e| bad(e.to_string()))?);
    }
    let input = InputRecord {
        role: "records".into(),
        spec: path.display().to_string(),
        sha256: Some(sha256_hex(text.as_bytes())),
        content: Value::Null,
    };
    Ok((out, input))
}

/// Records from `--records` when given, otherwise from an engine run.
fn sequence(s: &Settings) -> Result<(Vec<BestApproxRecord>, Vec<InputRecord>, Value), Failure> {
    match &s.records {
        Some(p) => {
            let (recs, input) = load_records(p)?;
            Ok((recs, vec![input], Value::Null))
        }
        None => {
            let (run, inputs, hit) = run_engine(s)?;
            let summary = run_summary(&run, hit);
            Ok((run.records, inputs, summary))
        }
    }
}

fn records_text(records: &[BestApproxRecord]) -> Result<String, Failure> {
    let mut out = String::new();
    for (nu, r) in records.iter().enumerate() {
        out.push_str(&serde_json::to_string(&r.to_line(nu)).map_err(Failure::other)?);
        out.push('\n');
    }
    Ok(out)
}

fn best_approx(s: &Settings) -> Result<Produced, Failure> {
    let (run, inputs, hit) = run_engine(s)?;
    let mut p = Produced::ok(records_text(&run.records)?, run_summary(&run, hit), inputs);
    if let Some(q) = run.exact_hit {
        p.status = Err(Failure::ExactHit(q));
    }
    Ok(p)
}

fn tail_fraction(s: &Settings) -> Result<Rational, Failure> {
    parse_q(s.tail_fraction.as_deref().unwrap_or("1/2"), "--tail-fraction")
}

fn interval_text(iv: &diophant::arith::Interval) -> String {
    format!("[{}, {}]", iv.lo(), iv.hi())
}

fn exponents(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let (records, inputs, engine) = sequence(s)?;
    let frac = tail_fraction(s)?;
    let est = estimate_exponents(&records, &frac).map_err(|e| match e {
        ExponentError::TooShort(_) | ExponentError::Domain(_) => Failure::input(e),
        other => Failure::other(other),
    })?;
    let mut header = exact_and_dec(&["zeta_mid", "ratio_omega", "ratio_omega_hat"]);
    header.splice(0..0, ["nu".to_string(), "q".to_string()]);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&h);
    for r in &est.per_nu_ratios {
        let mut row = vec![r.nu.to_string(), r.q.to_string(), r.zeta_mid.to_string()];
        row.push(interval_text(&r.ratio_omega));
        row.push(r.ratio_omega_hat.as_ref().map(interval_text).unwrap_or_default());
        row.push(fmt.dec(&r.zeta_mid));
        row.push(fmt.dec(&r.ratio_omega.midpoint()));
        row.push(r.ratio_omega_hat.as_ref().map(|x| fmt.dec(&x.midpoint())).unwrap_or_default());
        csv.push(row);
    }
    let summary = json!({
        "engine": engine,
        "tail_fraction": frac.to_string(),
        "omega_est": fmt.q(&est.omega_est),
        "omega_hat_est": fmt.q(&est.omega_hat_est),
        "omega_enclosure": fmt.iv(&est.omega_enclosure),
        "omega_hat_enclosure": fmt.iv(&est.omega_hat_enclosure),
        "tail_window": [est.tail_window.0, est.tail_window.1],
    });
    eprintln!(
        "omega ~ {}  omega_hat ~ {}",
        fmt.dec(&est.omega_est),
        fmt.dec(&est.omega_hat_est)
    );
    Ok(Produced::ok(csv.render(), summary, inputs))
}

fn chains_json(records: &[BestApproxRecord]) -> Result<(Value, Option<usize>), Failure> {
    let seq: Vec<_> = records.iter().map(BestApproxRecord::vector).collect();
    let classify = |e: ChainError| match e {
        ChainError::WrongDimension { .. } => Failure::input(format!("{e}; chains need four-dimensional targets")),
        other => Failure::other(other),
    };
    let chains = detect_chains(&seq).map_err(classify)?;
    let mut out = Vec::new();
    for c in &chains {
        let rep = verify_chain(&seq, c).map_err(classify)?;
        out.push(json!({
            "nu": c.nu,
            "r": c.r,
            "k": c.k,
            "n": c.n,
            "conditions": {
                "independent_triples": rep.independent_triples,
                "runs_in_planes": rep.runs_in_planes,
                "common_three_space": rep.common_three_space,
                "ends_outside": rep.ends_outside,
                "five_independent": rep.five_independent,
            },
            "det_vi": c.det_vi.to_string(),
            "verified": rep.passed(),
        }));
    }
    let est = estimate_index(&chains, seq.len());
    let doc = json!({
        "horizon": est.horizon,
        "index_proxy": est.value,
        "note": est.note,
        "chains": out,
    });
    Ok((doc, est.value))
}

fn detect_index(s: &Settings) -> Result<Produced, Failure> {
    let (records, inputs, engine) = sequence(s)?;
    let (doc, index) = chains_json(&records)?;
    let text = serde_json::to_string_pretty(&doc).map_err(Failure::other)? + "\n";
    Ok(Produced::ok(text, json!({ "engine": engine, "index_proxy": index }), inputs))
}

fn pipeline(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let (records, inputs, engine) = sequence(s)?;
    let (_, index) = chains_json(&records)?;
    let frac = tail_fraction(s)?;
    let t = tol(s, "1e-12")?;
    let mut notes = Vec::new();
    let est = match estimate_exponents(&records, &frac) {
        Ok(e) => Some(e),
        Err(ExponentError::TooShort(n)) => {
            notes.push(format!("TooShort: {n} usable records"));
            None
        }
        Err(e) => return Err(Failure::other(e)),
    };
    let bound = match (&est, index) {
        (None, _) => None,
        (Some(_), None) => {
            notes.push("index proxy infinite: no chain within the horizon".into());
            None
        }
        (Some(_), Some(i)) if i > 3 => {
            notes.push(format!("index proxy {i} has no bound"));
            None
        }
        (Some(e), Some(i)) => match roots::theorem1_bound(i as u8, &e.omega_hat_est, &t) {
            Ok(b) => Some(b.lo().clone()),
            Err(err) => {
                notes.push(format!("bound unavailable: {err}"));
                None
            }
        },
    };
    let slack = match (&est, &bound) {
        (Some(e), Some(b)) => Some(&e.omega_est - b),
        _ => None,
    };
    let mut header = vec!["label".to_string(), "Q".to_string(), "records".to_string(), "index_proxy".to_string()];
    header.extend(exact_and_dec(&["omega_est", "omega_hat_est", "bound", "slack"]));
    header.push("note".into());
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&h);
    let label = inputs[0].content.get("label").and_then(Value::as_str).unwrap_or("records").to_string();
    let mut row = vec![
        label,
        s.q.map(|q| q.to_string()).unwrap_or_default(),
        records.len().to_string(),
        index.map(|i| i.to_string()).unwrap_or_default(),
    ];
    row.extend(exact_and_dec_cells(
        fmt,
        &[
            est.as_ref().map(|e| &e.omega_est),
            est.as_ref().map(|e| &e.omega_hat_est),
            bound.as_ref(),
            slack.as_ref(),
        ],
    ));
    row.push(notes.join("; "));
    csv.push(row);
    Ok(Produced::ok(csv.render(), json!({ "engine": engine, "notes": notes }), inputs))
}

fn gtable(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let grid = grid(s, "1/4:99/100:20")?;
    let t = tol(s, "1e-12")?;
    let names = [
        "omega_hat", "G1_lo", "G1_hi", "G2_lo", "G2_hi", "G3_lo", "G3_hi", "bound1", "bound2", "bound3", "ss_bound_n4",
    ];
    let header = exact_and_dec(&names);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&h);
    let rows = g_table(&grid, &t).map_err(Failure::input)?;
    for r in &rows {
        let vals: Vec<Option<&Rational>> = std::iter::once(&r.omega_hat)
            .chain(r.g.iter().flat_map(|b| [&b.lo, &b.hi]))
            .chain(r.bounds.iter().map(|b| b.lo()))
            .chain(std::iter::once(&r.ss_bound_n4))
            .map(Some)
            .collect();
        csv.push(exact_and_dec_cells(fmt, &vals));
    }
    let summary = json!({ "points": rows.len(), "tol": t.to_string(), "bound_columns": "lower end of omega_hat * G bracket" });
    Ok(Produced::ok(csv.render(), summary, Vec::new()))
}

fn bracket_json(fmt: Fmt, b: &RootBracket) -> Value {
    json!({
        "case": format!("{:?}", b.case),
        "lo": fmt.q(&b.lo),
        "hi": fmt.q(&b.hi),
        "sign_lo": b.sign_lo,
        "sign_hi": b.sign_hi,
        "positive_roots": b.positive_roots,
    })
}

fn apex_json(fmt: Fmt, c: &ApexCertificate) -> Value {
    json!({ "g": fmt.q(&c.g), "det_sign": c.det_sign, "l_apex": fmt.q(&c.l_apex), "feasible": c.feasible })
}

fn critical_json(fmt: Fmt, c: &Result<CriticalG, ConeError>) -> Value {
    match c {
        Ok(c) => json!({
            "bracket": fmt.iv(&c.bracket),
            "lo": apex_json(fmt, &c.lo),
            "hi": apex_json(fmt, &c.hi),
            "poles": c.poles.iter().map(|p| fmt.iv(p)).collect::<Vec<_>>(),
            "scan_bound": c.scan_bound.to_string(),
            "consistent": c.consistent(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn exact_list(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn test_json(fmt: Fmt, t: &HyperplaneTest) -> Value {
    let cert = match &t.certificate {
        TestCertificate::Simplicial {
            apex_value,
            ray_values,
            witness,
        } => {
            let w = match witness {
                Witness::ApexOnPlane => json!({ "kind": "apex_on_plane" }),
                Witness::ZeroRay(i) => json!({ "kind": "zero_ray", "ray": i }),
                Witness::OppositeRay(i) => json!({ "kind": "opposite_ray", "ray": i }),
                Witness::OppositePair(i, j) => json!({ "kind": "opposite_pair", "rays": [i, j] }),
                Witness::UniformSign => json!({ "kind": "uniform_sign" }),
            };
            json!({ "kind": "sign_pattern", "apex_value": apex_value.to_string(), "ray_values": exact_list(ray_values), "witness": w })
        }
        TestCertificate::Point(x) => json!({ "kind": "point", "x": exact_list(x) }),
        TestCertificate::Farkas(f) => json!({ "kind": "farkas", "y_ineq": exact_list(&f.y_ineq), "y_eq": exact_list(&f.y_eq) }),
    };
    json!({ "g": fmt.q(&t.g), "feasible": t.feasible, "certificate": cert })
}

fn load_system(s: &Settings) -> Result<(ConeSystem, Vec<InputRecord>), Failure> {
    let case = match s.case.as_deref() {
        Some(c) => Case::parse(c).map_err(Failure::input)?,
        None if s.system.is_some() => Case::Custom,
        None => Case::Zis,
    };
    match &s.system {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let mut sys = ConeSystem::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            if s.case.is_some() {
                sys.case = case;
            }
            let input = InputRecord {
                role: "system".into(),
                spec: path.display().to_string(),
                sha256: Some(sha256_hex(text.as_bytes())),
                content: Value::String(text),
            };
            Ok((sys, vec![input]))
        }
        None if case == Case::Custom => Err(Failure::input("--case custom needs --system")),
        None => Ok((builtin_system(case).map_err(Failure::input)?, Vec::new())),
    }
}

fn row_match_json(m: &RowMatch) -> Value {
    match m {
        RowMatch::Same { reference } => json!({ "status": "same", "reference": reference }),
        RowMatch::Negated { reference } => json!({ "status": "negated", "reference": reference }),
        RowMatch::Differs {
            closest,
            negated,
            columns,
        } => json!({ "status": "differs", "closest": closest, "negated": negated, "columns": columns }),
    }
}

fn verify_cones(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let (sys, inputs) = load_system(s)?;
    let default_grid = match sys.case {
        Case::Zis => "1/4:1/2:6",
        Case::Zis2 => "1/2:9/10:5",
        Case::Zis3 => "3/10:7/10:3",
        Case::Custom => "1/4:1/2:6",
    };
    let grid = grid(s, default_grid)?;
    let t = tol(s, "1e-9")?;
    let poly = matching_polynomial(sys.case);
    let rep = verify_cone_system(&sys, poly, &grid, &t, s.closure.unwrap_or(false)).map_err(Failure::input)?;
    let points: Vec<Value> = rep
        .points
        .iter()
        .map(|p| {
            json!({
                "alpha": fmt.q(&p.alpha),
                "simplicial": p.simplicial,
                "critical_g": critical_json(fmt, &p.critical),
                "root": match &p.root {
                    Some(Ok(b)) => bracket_json(fmt, b),
                    Some(Err(e)) => json!({ "error": e.to_string() }),
                    None => Value::Null,
                },
                "overlap": p.overlap,
                "below": match &p.below {
                    Some(Ok(t)) => test_json(fmt, t),
                    Some(Err(e)) => json!({ "error": e.to_string() }),
                    None => Value::Null,
                },
                "closure": match &p.closure {
                    Some(Ok(c)) => json!({
                        "bracket": fmt.iv(&c.bracket),
                        "below": { "y_ineq": exact_list(&c.below.y_ineq), "y_eq": exact_list(&c.below.y_eq) },
                        "above": exact_list(&c.above),
                    }),
                    Some(Err(e)) => json!({ "error": e.to_string() }),
                    None => Value::Null,
                },
                "passed": p.passed(),
            })
        })
        .collect();
    let mut doc = json!({
        "case": sys.case.name(),
        "system": sys.name,
        "polynomial": poly.map(|p| format!("{p:?}")),
        "tol": t.to_string(),
        "coordinates": sys.free_labels(),
        "row_labels": rep.row_labels,
        "system_text": rep.system_text,
        "points": points,
        "all_passed": rep.all_passed(),
    });
    if s.reconcile.unwrap_or(false) {
        let alpha = grid.first().cloned().unwrap_or_else(|| rational::rat(1, 3));
        let reference = builtin_system(Case::Zis).map_err(Failure::other)?;
        let r = reconcile(&reference, &g_matrix_system(), &alpha, &t).map_err(Failure::other)?;
        doc["reconciliation"] = json!({
            "alpha": fmt.q(&alpha),
            "rows": r.rows.iter().map(|(l, m)| json!({ "row": l, "match": row_match_json(m) })).collect::<Vec<_>>(),
            "candidate_det_nonzero": r.candidate_det_nonzero,
            "reference_critical_g": critical_json(fmt, &r.reference_critical),
            "candidate_critical_g": critical_json(fmt, &r.candidate_critical),
            "identical_brackets": r.identical_brackets(),
        });
    }
    let text = serde_json::to_string_pretty(&doc).map_err(Failure::other)? + "\n";
    let failed: Vec<String> = rep.points.iter().filter(|p| !p.passed()).map(|p| p.alpha.to_string()).collect();
    let summary = json!({ "points": rep.points.len(), "failed": failed });
    let mut p = Produced::ok(text, summary, inputs);
    if poly.is_some() && !failed.is_empty() {
        p.status = Err(Failure::Check(format!("alpha = {}", failed.join(", "))));
    }
    Ok(p)
}

fn remark2(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let grid = grid(s, "1/4:99/100:50")?;
    let t = tol(s, "1e-12")?;
    let names = ["omega_hat", "g3_lo", "g3_hi", "r2a_lo", "r2a_hi", "r2b_lo", "r2b_hi"];
    let mut header = exact_and_dec(&names);
    header.extend(["best".to_string(), "variant_exceeds_f3".to_string(), "errors".to_string()]);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&h);
    let mut exceed = 0;
    for w in &grid {
        let r = remark2_compare(w, &t).map_err(Failure::input)?;
        let ends = |b: &Option<RootBracket>| [b.as_ref().map(|b| b.lo.clone()), b.as_ref().map(|b| b.hi.clone())];
        let vals: Vec<Option<Rational>> = std::iter::once(Some(w.clone()))
            .chain(ends(&r.g3))
            .chain(ends(&r.g_r2a))
            .chain(ends(&r.g_r2b))
            .collect();
        let refs: Vec<Option<&Rational>> = vals.iter().map(Option::as_ref).collect();
        let mut row = exact_and_dec_cells(fmt, &refs);
        row.push(r.best.map(|b| format!("{b:?}")).unwrap_or_default());
        row.push(r.variant_exceeds_f3.to_string());
        row.push(r.errors.join("; "));
        exceed += usize::from(r.variant_exceeds_f3);
        csv.push(row);
    }
    let summary = json!({ "points": grid.len(), "variant_exceeds_f3": exceed });
    Ok(Produced::ok(csv.render(), summary, Vec::new()))
}

fn uv_solve(s: &Settings, fmt: Fmt) -> Result<Produced, Failure> {
    let grid = grid(s, "1/4:99/100:20")?;
    let t = tol(s, "1e-12")?;
    let names = ["alpha", "V_lo", "V_hi", "u_lo", "u_hi", "v_lo", "v_hi", "max_disagreement"];
    let mut header = exact_and_dec(&names);
    header.extend(["f1_sign_lo".to_string(), "f1_sign_hi".to_string()]);
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&h);
    for a in &grid {
        let sol = solve_uv(a, &t).map_err(|e| match e {
            ConeError::Domain(_) => Failure::input(e),
            other => Failure::other(other),
        })?;
        let dis = sol.max_disagreement();
        let vals = [
            a,
            &sol.common.lo,
            &sol.common.hi,
            sol.u.lo(),
            sol.u.hi(),
            sol.v.lo(),
            sol.v.hi(),
            &dis,
        ];
        let refs: Vec<Option<&Rational>> = vals.iter().map(|v| Some(*v)).collect();
        let mut row = exact_and_dec_cells(fmt, &refs);
        row.push(sol.common.sign_lo.to_string());
        row.push(sol.common.sign_hi.to_string());
        csv.push(row);
    }
    Ok(Produced::ok(csv.render(), json!({ "points": csv.len(), "tol": t.to_string() }), Vec::new()))
}
