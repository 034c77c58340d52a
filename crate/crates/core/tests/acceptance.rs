//! One line per acceptance criterion, each with its runtime budget.

mod common;

use std::time::{Duration, Instant};

use common::{fibonacci_upto, naive_best_approx, planted_sequence, random_target, synthetic_sequence};
use diophant::approx::{best_approx_sequence_par, generate_power_basis, TargetVector};
use diophant::arith::rational::{int, rat, to_decimal, Rational};
use diophant::chains::{detect_chains, verify_chain};
use diophant::cones::{builtin_system, matching_polynomial, solve_uv, verify_cone_system, Case};
use diophant::exponents::{estimate_exponents, jarnik_bound, schmidt_summerer_bound};
use diophant::roots::{eval_poly, g, positive_root, rational_grid, remark2_compare, theorem1_bound, PolynomialCase};
use num_bigint::BigInt;
use num_traits::Zero;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn exact_values() -> Outcome {
    for case in [PolynomialCase::F1, PolynomialCase::F21, PolynomialCase::F3] {
        let v = eval_poly(case, &rat(1, 4), &int(1)).map_err(|e| e.to_string())?;
        ensure(v.is_zero(), format!("{case:?}(1) = {v} at 1/4"))?;
    }
    Ok("F1, F21, F3 vanish at 1 for omega_hat = 1/4".into())
}

fn seam() -> Outcome {
    let t = rat(1, 1_000_000_000_000);
    let a = positive_root(PolynomialCase::F21, &rat(1, 2), &t).map_err(|e| e.to_string())?;
    let b = positive_root(PolynomialCase::F22, &rat(1, 2), &t).map_err(|e| e.to_string())?;
    ensure(a.overlaps(&b), format!("{} vs {}", a.interval(), b.interval()))?;
    Ok(format!("both roots near {}", to_decimal(&a.lo, 12)))
}

fn ordering() -> Outcome {
    let t = rat(1, 1_000_000_000_000);
    let grid: Vec<Rational> = (1..=50).map(|i| rat(1, 4) + rat(3 * i, 4 * 51)).collect();
    let mut prev: Option<[diophant::roots::RootBracket; 3]> = None;
    for w in &grid {
        let gs = [1, 2, 3].map(|l| g(l, w, &t));
        let [g1, g2, g3] = gs.map(|r| r.map_err(|e| e.to_string()));
        let (g1, g2, g3) = (g1?, g2?, g3?);
        ensure(g3.certainly_below(&g2) && g2.certainly_below(&g1), format!("order fails at {w}"))?;
        if let Some(p) = &prev {
            for (a, b) in p.iter().zip([&g1, &g2, &g3]) {
                ensure(a.certainly_below(b), format!("G not increasing at {w}"))?;
            }
        }
        prev = Some([g1, g2, g3]);
    }
    Ok("G3 < G2 < G1 and each increasing on 50 points".into())
}

fn cone_system(case: Case, grid: &[Rational]) -> Outcome {
    let sys = builtin_system(case).map_err(|e| e.to_string())?;
    let tol = rat(1, 1_000_000_000);
    let rep = verify_cone_system(&sys, matching_polynomial(case), grid, &tol, false).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for p in &rep.points {
        let c = p.critical.as_ref().map_err(|e| format!("alpha {}: {e}", p.alpha))?;
        ensure(p.overlap, format!("alpha {}: bracket {} misses the root", p.alpha, c.bracket))?;
        ensure(p.below_infeasible(), format!("alpha {}: feasible below the bracket", p.alpha))?;
        parts.push(format!("{}->{}", p.alpha, to_decimal(c.bracket.lo(), 9)));
    }
    let mut msg = parts.join(" ");
    if case == Case::Zis3 {
        msg.push_str(&format!("; rows: {}", rep.row_labels.join(" | ")));
    }
    Ok(msg)
}

fn uv() -> Outcome {
    let tol = rat(1, 1_000_000_000);
    let s = solve_uv(&rat(1, 4), &tol).map_err(|e| e.to_string())?;
    ensure(
        s.common.is_exact() && s.common.lo == int(1) && s.u.is_point() && s.u.contains(&rat(1, 3)) && s.v.contains(&rat(1, 3)),
        "alpha = 1/4 is not exact",
    )?;
    ensure(s.expressions.iter().flatten().all(|e| *e == int(1)), "expressions differ from 1 at 1/4")?;
    for i in 0..20 {
        let alpha = rat(1, 4) + rat(3 * i, 80);
        let s = solve_uv(&alpha, &tol).map_err(|e| format!("alpha {alpha}: {e}"))?;
        let width = s.common.interval().width();
        ensure(
            s.max_disagreement() <= tol.clone().max(width.clone()),
            format!("alpha {alpha}: disagreement {}", s.max_disagreement()),
        )?;
        ensure(
            s.common.is_exact() || s.common.sign_lo * s.common.sign_hi < 0,
            format!("alpha {alpha}: no sign change"),
        )?;
    }
    Ok("exact at 1/4; 20 grid points agree".into())
}

fn engine_oracle() -> Outcome {
    for seed in 0..20 {
        let t = random_target(seed, 4, 30);
        let run = best_approx_sequence_par(&t, 10_000).map_err(|e| e.to_string())?;
        let naive = naive_best_approx(&t, 10_000);
        ensure(run.records == naive.records, format!("seed {seed}: records differ"))?;
        ensure(run.uncertain == naive.uncertain, format!("seed {seed}: uncertain sets differ"))?;
    }
    Ok("20 targets identical record-for-record".into())
}

fn fibonacci() -> Outcome {
    let phi = "0.618033988749894848204586834365638117720309179805762862135448622705260";
    let t = TargetVector::from_strings("golden", 60, &[phi.to_string()]).map_err(|e| e.to_string())?;
    let run = best_approx_sequence_par(&t, 1_000_000).map_err(|e| e.to_string())?;
    let qs: Vec<u64> = run.records.iter().map(|r| r.q).collect();
    ensure(qs == fibonacci_upto(1_000_000), "denominators are not the Fibonacci numbers")?;
    let est = estimate_exponents(&run.records, &rat(1, 4)).map_err(|e| e.to_string())?;
    let ok = |x: &Rational| *x >= rat(95, 100) && *x <= rat(110, 100);
    ensure(
        ok(&est.omega_est) && ok(&est.omega_hat_est),
        format!("estimates {} {}", to_decimal(&est.omega_est, 4), to_decimal(&est.omega_hat_est, 4)),
    )?;
    Ok(format!(
        "{} records, omega ~ {}, omega_hat ~ {}",
        qs.len(),
        to_decimal(&est.omega_est, 4),
        to_decimal(&est.omega_hat_est, 4)
    ))
}

fn chains() -> Outcome {
    let mut seqs: Vec<Vec<Vec<BigInt>>> = (0..50).map(|s| synthetic_sequence(s, 24, 0.4)).collect();
    seqs.extend((0..50).map(|s| planted_sequence(s, 1 + s as usize % 3).0));
    let t = generate_power_basis(&rat(2, 1), 5, 4, 40).map_err(|e| e.to_string())?;
    let run = best_approx_sequence_par(&t, 200_000).map_err(|e| e.to_string())?;
    seqs.push(run.records.iter().map(|r| r.vector()).collect());
    let mut total = 0;
    let mut longest = 0;
    for (i, seq) in seqs.iter().enumerate() {
        for c in detect_chains(seq).map_err(|e| e.to_string())? {
            let rep = verify_chain(seq, &c).map_err(|e| e.to_string())?;
            ensure(rep.passed(), format!("sequence {i}: {:?}", rep.first_failure))?;
            ensure(!rep.det_vi.is_zero() && rep.det_vi == c.det_vi, format!("sequence {i}: determinant"))?;
            total += 1;
            longest = longest.max(c.n);
        }
    }
    ensure(total > 0, "no chains detected")?;
    Ok(format!("{total} chains verified, longest n = {longest}"))
}

fn bounds() -> Outcome {
    for w in rational_grid(&rat(1, 2), &rat(49, 50), 24) {
        let (a, b) = (jarnik_bound(&w), schmidt_summerer_bound(&w, 2));
        ensure(a.is_ok() && a == b, format!("Jarnik differs at {w}"))?;
    }
    let tol = rat(1, 1_000_000_000);
    for w in rational_grid(&rat(1, 4), &rat(39, 40), 29) {
        let b = theorem1_bound(1, &w, &tol).map_err(|e| e.to_string())?;
        if w == rat(1, 4) {
            ensure(b.contains(&w), "bound differs from 1/4 at 1/4")?;
        } else {
            ensure(*b.lo() > w, format!("bound not above omega_hat at {w}"))?;
        }
    }
    Ok("Jarnik identity exact; G1 bound above omega_hat off 1/4".into())
}

fn remark2() -> Outcome {
    let tol = rat(1, 1_000_000_000);
    let grid: Vec<Rational> = (0..50).map(|i| rat(1, 4) + rat(3 * i, 200)).collect();
    let mut hits = Vec::new();
    for w in &grid {
        let row = remark2_compare(w, &tol).map_err(|e| e.to_string())?;
        if row.variant_exceeds_f3 {
            hits.push(w.clone());
        }
    }
    ensure(!hits.is_empty(), "no grid point where a variant root exceeds the F3 root")?;
    Ok(format!("{} of {} points, first at {}", hits.len(), grid.len(), hits[0]))
}

fn main() {
    let grid1 = [rat(1, 4), rat(3, 10), rat(7, 20), rat(2, 5), rat(9, 20), rat(1, 2)];
    let grid2 = [rat(1, 2), rat(3, 5), rat(7, 10), rat(4, 5), rat(9, 10)];
    let grid3 = [rat(3, 10), rat(1, 2), rat(7, 10)];
    type Check = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(u32, &str, u64, Check)> = vec![
        (1, "exact boundary values", 1, Box::new(exact_values)),
        (2, "piecewise seam", 1, Box::new(seam)),
        (3, "ordering and monotonicity", 30, Box::new(ordering)),
        (4, "first cone system", 300, Box::new(move || cone_system(Case::Zis, &grid1))),
        (5, "second cone system", 300, Box::new(move || cone_system(Case::Zis2, &grid2))),
        (6, "third cone system", 600, Box::new(move || cone_system(Case::Zis3, &grid3))),
        (7, "u,v system", 10, Box::new(uv)),
        (8, "engine oracle equivalence", 300, Box::new(engine_oracle)),
        (9, "Fibonacci sanity", 120, Box::new(fibonacci)),
        (10, "chain round-trip", 120, Box::new(chains)),
        (11, "bound consistency", 10, Box::new(bounds)),
        (12, "variant polynomial sweep", 60, Box::new(remark2)),
    ];
    let mut failures = Vec::new();
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let line = match (&outcome, over) {
            (Ok(msg), false) => format!("criterion {n:>2} PASS {name} ({elapsed:.2?}): {msg}"),
            (Ok(msg), true) => format!("criterion {n:>2} FAIL {name} ({elapsed:.2?} > {budget}s): {msg}"),
            (Err(msg), _) => format!("criterion {n:>2} FAIL {name} ({elapsed:.2?}): {msg}"),
        };
        println!("{line}");
        if outcome.is_err() || over {
            failures.push(n);
        }
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
