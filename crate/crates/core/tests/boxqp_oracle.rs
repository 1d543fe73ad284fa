mod common;

use common::{box_qp_brute_force, normal, random_spd, rng};
use npstm::boxqp::{kkt_residual, solve, BoxQp, DEFAULT_TOL};
use npstm::multilinear::Matrix;

#[test]
fn three_variable_instance_matches_enumeration() {
    let mut r = rng(3);
    let h = random_spd(&mut r, 3);
    let f: Vec<f64> = (0..3).map(|_| normal(&mut r)).collect();
    let qp = BoxQp::new(h.clone(), f.clone(), 1.0).unwrap();
    let sol = solve(&qp, DEFAULT_TOL, qp.default_max_sweeps(), None).unwrap();
    let (alpha, best) = box_qp_brute_force(&h, &f, 1.0);
    assert!((sol.objective - best).abs() < 1e-8);
    for (a, b) in sol.alpha.iter().zip(&alpha) {
        assert!((a - b).abs() < 1e-5, "{:?} vs {:?}", sol.alpha, alpha);
    }
}

#[test]
fn small_problems_match_enumeration() {
    let mut r = rng(11);
    for case in 0..60 {
        let m = 1 + case % 7;
        let h = random_spd(&mut r, m);
        let f: Vec<f64> = (0..m).map(|_| 2.0 * normal(&mut r)).collect();
        let c = 0.5 + (case % 4) as f64;
        let qp = BoxQp::new(h.clone(), f.clone(), c).unwrap();
        let sol = solve(&qp, DEFAULT_TOL, qp.default_max_sweeps(), None).unwrap();
        let (_, best) = box_qp_brute_force(&h, &f, c);
        assert!(sol.converged);
        assert!(
            (sol.objective - best).abs() <= 1e-8,
            "case {case}: {} vs {best}",
            sol.objective
        );
        assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
    }
}

#[test]
fn objective_never_increases_across_sweeps() {
    let mut r = rng(5);
    let m = 40;
    let h = random_spd(&mut r, m);
    let f: Vec<f64> = (0..m).map(|_| normal(&mut r)).collect();
    let qp = BoxQp::new(h, f, 0.7).unwrap();
    let mut alpha = vec![0.0; m];
    let mut last = qp.objective(&alpha);
    for _ in 0..60 {
        let s = solve(&qp, 1e-300, 1, Some(&alpha)).unwrap();
        assert!(s.objective <= last + 1e-12, "{} > {last}", s.objective);
        last = s.objective;
        alpha = s.alpha;
    }
}

#[test]
fn large_problem_reaches_tolerance() {
    let mut r = rng(99);
    let m = 200;
    let h = random_spd(&mut r, m);
    let f: Vec<f64> = (0..m).map(|_| normal(&mut r)).collect();
    let qp = BoxQp::new(h, f, 1.0).unwrap();
    let sol = solve(&qp, DEFAULT_TOL, qp.default_max_sweeps(), None).unwrap();
    assert!(sol.converged, "kkt {}", sol.kkt_residual);
    assert!(kkt_residual(&qp, &sol.alpha) <= DEFAULT_TOL);
}

#[test]
fn identical_inputs_give_identical_bits() {
    let mut r = rng(8);
    let h = random_spd(&mut r, 30);
    let f: Vec<f64> = (0..30).map(|_| normal(&mut r)).collect();
    let qp = BoxQp::new(h, f, 2.0).unwrap();
    let a = solve(&qp, DEFAULT_TOL, 5000, None).unwrap();
    let b = solve(&qp, DEFAULT_TOL, 5000, None).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.alpha), bits(&b.alpha));
}

#[test]
fn singular_psd_matrix() {
    // rank-one H
    let v = [1.0, -2.0, 0.5];
    let mut h = Matrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            h[(i, j)] = v[i] * v[j];
        }
    }
    let f = vec![1.0, 0.3, -0.2];
    let qp = BoxQp::new(h.clone(), f.clone(), 1.0).unwrap();
    let sol = solve(&qp, DEFAULT_TOL, qp.default_max_sweeps(), None).unwrap();
    let (_, best) = box_qp_brute_force(&h, &f, 1.0);
    assert!(sol.kkt_residual <= DEFAULT_TOL);
    assert!(sol.objective <= best + 1e-8);
}
