use diophant::arith::rational::{int, rat, to_f64, Rational};
use diophant::exponents::{dim3_bound, jarnik_bound, schmidt_summerer_bound};
use diophant::roots::{
    count_roots, eval_poly, g, g_table, positive_root, rational_grid, remark2_compare, theorem1_bound, Poly,
    PolynomialCase,
};
use proptest::prelude::*;

/// Floating-point coefficients written out independently of the library.
fn coeffs_f64(case: PolynomialCase, w: f64) -> Vec<f64> {
    let a = w / (1.0 - w);
    let b = w / ((1.0 - w) * (1.0 - w));
    match case {
        PolynomialCase::F1 => vec![-a, -a, -a, 1.0],
        PolynomialCase::F21 => vec![-b, a * a, -a, -a, 1.0],
        PolynomialCase::F22 => vec![-b, a, -a, -a, 1.0],
        PolynomialCase::F3 => vec![-b, 0.0, a * a, -a, -a, 1.0],
        _ => unreachable!(),
    }
}

/// Largest sign change on a fine float mesh, refined by float bisection.
fn float_root(case: PolynomialCase, w: f64) -> f64 {
    let c = coeffs_f64(case, w);
    let f = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
    let top = 1.0 + c.iter().map(|k| k.abs()).sum::<f64>();
    let n = 200_000;
    let mut hit = None;
    for i in (0..n).rev() {
        let (x0, x1) = (top * i as f64 / n as f64, top * (i + 1) as f64 / n as f64);
        if f(x0) * f(x1) <= 0.0 {
            hit = Some((x0, x1));
            break;
        }
    }
    let (mut lo, mut hi) = hit.expect("sign change");
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if f(lo) * f(m) <= 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    0.5 * (lo + hi)
}

fn tol() -> Rational {
    rat(1, 1_000_000_000_000)
}

#[test]
fn exact_value_one_at_quarter() {
    for case in [PolynomialCase::F1, PolynomialCase::F21, PolynomialCase::F3] {
        assert_eq!(eval_poly(case, &rat(1, 4), &int(1)).unwrap(), int(0));
        assert!(positive_root(case, &rat(1, 4), &tol()).unwrap().interval().contains(&int(1)));
    }
}

#[test]
fn seam_at_one_half() {
    let a = positive_root(PolynomialCase::F21, &rat(1, 2), &tol()).unwrap();
    let b = positive_root(PolynomialCase::F22, &rat(1, 2), &tol()).unwrap();
    assert!(a.overlaps(&b));
    assert!((to_f64(&a.lo) - 1.6698).abs() < 1e-3);
}

#[test]
fn sturm_counts_known_roots() {
    // (x - 1)(x - 2)(x - 3)
    let p = Poly::new(vec![int(-6), int(11), int(-6), int(1)]);
    let chain = p.sturm();
    assert_eq!(count_roots(&chain, &int(0), &int(4)), 3);
    assert_eq!(count_roots(&chain, &rat(3, 2), &int(3)), 2);
    assert_eq!(count_roots(&chain, &int(3), &int(10)), 0);
}

#[test]
fn bounds_table() {
    let grid = rational_grid(&rat(1, 2), &rat(9, 10), 8);
    let rows = g_table(&grid, &rat(1, 1_000_000)).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r.g[2].certainly_below(&r.g[1]) && r.g[1].certainly_below(&r.g[0]));
    }
    assert!(g(2, &rat(1, 5), &tol()).is_err());
}

#[test]
fn classical_bounds() {
    for w in rational_grid(&rat(1, 2), &rat(19, 20), 9) {
        assert_eq!(jarnik_bound(&w).unwrap(), schmidt_summerer_bound(&w, 2).unwrap());
    }
    // (w/2)(a + sqrt(a^2 + 4a)) with w = 1/2, a = 1
    let d = dim3_bound(&rat(1, 2), &tol()).unwrap();
    let expect = 0.5 * (1.0 + 5f64.sqrt()) / 2.0;
    assert!((to_f64(d.lo()) - expect).abs() < 1e-10);
    assert!(theorem1_bound(1, &rat(1, 4), &tol()).unwrap().contains(&rat(1, 4)));
}

#[test]
fn remark_variants_exceed_f3_somewhere() {
    let rows: Vec<_> = rational_grid(&rat(3, 10), &rat(9, 10), 6)
        .iter()
        .map(|w| remark2_compare(w, &rat(1, 1_000_000)).unwrap())
        .collect();
    assert!(rows.iter().any(|r| r.variant_exceeds_f3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn roots_agree_with_float_oracle(k in 1i64..=99) {
        let w = rat(1, 4) + rat(3, 4) * rat(k, 100);
        let wf = to_f64(&w);
        let mut cases = vec![PolynomialCase::F1, PolynomialCase::F3];
        cases.push(if w <= rat(1, 2) { PolynomialCase::F21 } else { PolynomialCase::F22 });
        for case in cases {
            let b = positive_root(case, &w, &rat(1, 1_000_000_000)).unwrap();
            prop_assert!(b.sign_lo * b.sign_hi <= 0);
            prop_assert!((to_f64(&b.lo) - float_root(case, wf)).abs() < 1e-7, "{:?} at {}", case, w);
        }
    }

    #[test]
    fn g_functions_increase(k in 1i64..=98) {
        let t = rat(1, 1_000_000_000);
        let (w0, w1) = (rat(1, 4) + rat(3 * k, 400), rat(1, 4) + rat(3 * (k + 1), 400));
        for level in 1..=3 {
            let (a, b) = (g(level, &w0, &t).unwrap(), g(level, &w1, &t).unwrap());
            prop_assert!(a.certainly_below(&b), "level {} at {}", level, w0);
        }
    }
}
