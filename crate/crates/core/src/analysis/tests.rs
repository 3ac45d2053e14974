use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::sdpsolver::{solve_kappa, SdpProblem};
use crate::states;
use crate::xychain::factorization_lambda;

fn geom(a: usize, b: usize) -> Geometry {
    Geometry::new(a, b).unwrap()
}

fn series(lambda: Vec<f64>, f: impl Fn(f64) -> f64) -> Series {
    let values = lambda.iter().map(|&l| f(l)).collect();
    Series::new(lambda, values)
}

fn uniform(start: f64, step: f64, count: usize) -> Vec<f64> {
    LambdaGrid::with_count(start, step, count).unwrap().points()
}

fn max_of(table: &SweepTable, c: Column) -> f64 {
    table
        .column(c)
        .unwrap()
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn grid_construction() {
    let g = LambdaGrid::new(0.0, 2.0, 0.1).unwrap();
    assert_eq!(g.count, 21);
    assert!((g.stop() - 2.0).abs() < 1e-12);
    assert!(LambdaGrid::new(0.0, 1.0, 0.3).is_err());
    assert!(LambdaGrid::new(1.0, 0.0, 0.1).is_err());
    assert!(LambdaGrid::new(0.0, 1.0, 0.0).is_err());
    assert!(LambdaGrid::with_count(-0.1, 0.1, 3).is_err());
    let c = LambdaGrid::centered(1.0, 0.01, 5).unwrap();
    assert!((c.point(2) - 1.0).abs() < 1e-15);
}

#[test]
fn column_names_round_trip() {
    for c in Column::ALL {
        assert_eq!(c.name().parse::<Column>().unwrap(), c);
    }
    assert_eq!("TAU-UB".parse::<Column>().unwrap(), Column::TauUb);
    assert!(matches!(
        "n4".parse::<Column>(),
        Err(AnalysisError::UnknownColumn(_))
    ));
}

#[test]
fn derivative_of_constant_and_quadratic() {
    let x = uniform(0.0, 0.05, 41);
    let d = derivative(&series(x.clone(), |_| 3.7)).unwrap();
    assert!(d.values.iter().all(|v| v.abs() < 1e-12));
    let d = derivative(&series(x, |l| l * l)).unwrap();
    for (l, v) in d.lambda.iter().zip(&d.values) {
        assert!((v - 2.0 * l).abs() < 1e-10, "{l}: {v}");
    }
}

#[test]
fn derivative_preconditions() {
    let s = series(vec![0.0, 0.1], |l| l);
    assert!(matches!(
        derivative(&s),
        Err(AnalysisError::TooFewRows { needed: 3, got: 2 })
    ));
    let s = series(vec![0.0, 0.1, 0.3], |l| l);
    assert!(matches!(derivative(&s), Err(AnalysisError::NonUniformGrid)));
}

#[test]
fn pseudo_critical_refines_parabola() {
    let s = series(uniform(0.9, 0.01, 21), |l| (l - 0.9734).powi(2) - 2.0);
    let scan = pseudo_critical(&s, 41).unwrap();
    assert!((scan.lambda_m - 0.9734).abs() < 1e-12);
    assert!((scan.min_derivative + 2.0).abs() < 1e-12);
    assert_eq!(scan.length, 41);
    let edge = series(uniform(0.9, 0.01, 21), |l| l);
    assert!(matches!(
        pseudo_critical(&edge, 41),
        Err(AnalysisError::WindowTooNarrow(_))
    ));
}

#[test]
fn linear_fit_is_exact_on_lines() {
    let x: Vec<f64> = (0..7).map(|k| k as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| -1.25 * v + 0.5).collect();
    let f = linear_fit(&x, &y).unwrap();
    assert!((f.slope + 1.25).abs() < 1e-12 && (f.intercept - 0.5).abs() < 1e-12);
    assert!(f.rms_residual < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
    assert_eq!(f.window, (0.0, 6.0));
    assert!(linear_fit(&x[..4], &y[..4]).is_err());
    assert!(linear_fit(&[1.0; 6], &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).is_err());
}

#[test]
fn log_fit_recovers_synthetic_coefficients() {
    let s = series(uniform(0.95, 1e-4, 1001), |l| {
        0.5 * (l - 1.0).abs().ln() + 0.1
    });
    for side in [Side::Left, Side::Right, Side::Both] {
        let f = fit_log_divergence(
            &s,
            1.0,
            LogWindow {
                side,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (f.slope - 0.5).abs() < 1e-6 && (f.intercept - 0.1).abs() < 1e-6,
            "{side:?}: {f:?}"
        );
        assert!(f.n_points >= 5);
    }
    let bad = LogWindow {
        min: 0.0,
        ..Default::default()
    };
    assert!(matches!(
        fit_log_divergence(&s, 1.0, bad),
        Err(AnalysisError::DegenerateWindow(_))
    ));
    let narrow = LogWindow {
        min: 1e-2,
        max: 1.01e-2,
        side: Side::Left,
    };
    assert!(fit_log_divergence(&s, 1.0, narrow).is_err());
}

#[test]
fn finite_size_and_exponent_fits() {
    let lengths = [41usize, 101, 201, 401, 1001, 2701];
    let scans: Vec<CriticalScan> = lengths
        .iter()
        .map(|&l| {
            let lf = l as f64;
            CriticalScan {
                length: l,
                lambda_m: 1.0 - 0.7 * lf.powf(-1.38),
                min_derivative: -0.28 * lf.ln() + 0.27,
            }
        })
        .collect();
    let f = fit_finite_size(&scans).unwrap();
    assert!((f.slope + 0.28).abs() < 1e-12 && (f.intercept - 0.27).abs() < 1e-12);
    let e = fit_exponent(&scans, 1.0).unwrap();
    assert!((e.slope + 1.38).abs() < 1e-9 && (e.intercept - 0.7f64.ln()).abs() < 1e-9);
    assert!(matches!(
        fit_finite_size(&scans[..4]),
        Err(AnalysisError::TooFewLengths { needed: 5, got: 4 })
    ));
}

fn curve(length: usize, offset: f64) -> CollapseCurve {
    let x: Vec<f64> = (0..41).map(|k| -2.0 + 0.1 * k as f64).collect();
    let y = x.iter().map(|v| v * v + offset).collect();
    CollapseCurve {
        length,
        lambda_m: 1.0,
        x,
        y,
    }
}

#[test]
fn collapse_spread_metric() {
    let one = scaling_collapse(vec![curve(41, 0.0)], (-1.0, 1.0), 21);
    assert_eq!(one.spread, 0.0);
    assert_eq!(one.relative_spread, 0.0);
    let same = scaling_collapse(vec![curve(41, 0.0), curve(201, 0.0)], (-1.0, 1.0), 21);
    assert!(same.spread < 1e-15);
    let shifted = scaling_collapse(vec![curve(41, 0.0), curve(201, 0.2)], (-1.0, 1.0), 21);
    assert!((shifted.spread - 0.2).abs() < 1e-12);
    assert!((shifted.range - 4.2).abs() < 1e-12);
    assert!((shifted.window_range - 1.2).abs() < 1e-12);
}

#[test]
fn collapse_curve_from_derivative_is_zero_at_lambda_m() {
    let scan = CriticalScan {
        length: 101,
        lambda_m: 0.998,
        min_derivative: -1.0,
    };
    let d = series(uniform(0.99, 1e-4, 161), |l| (l - 0.998).powi(2) - 1.0);
    let c = CollapseCurve::from_derivative(&scan, &d);
    let s = Series::new(c.x.clone(), c.y.clone());
    assert!(s.interpolate(0.0).unwrap().abs() < 1e-12);
    assert!((c.x[0] + 0.808).abs() < 1e-9);
}

#[test]
fn fidelity_examples() {
    let bell = states::bell::<f64>();
    assert!((fidelity(&bell, &bell).unwrap() - 1.0).abs() < 1e-9);
    let a = states::basis::<f64>(3, 0);
    let b = states::basis::<f64>(3, 7);
    assert!(fidelity(&a, &b).unwrap() < 1e-9);
    let mixed = states::maximally_mixed::<f64>(2);
    assert!((fidelity(&mixed, &bell).unwrap() - 0.5).abs() < 1e-9);
    assert!(matches!(
        fidelity(&bell, &a),
        Err(LinalgError::DimensionMismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fidelity_is_symmetric_and_matches_pure_overlap(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = states::random_mixed::<f64, _>(&mut r, 3, 3);
        let b = states::random_mixed::<f64, _>(&mut r, 3, 5);
        let (fab, fba) = (fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
        prop_assert!((fab - fba).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&fab));
        let u = states::random_ket::<f64, _>(&mut r, 8);
        let v = states::random_ket::<f64, _>(&mut r, 8);
        let overlap = u.iter().zip(&v).fold(crate::scalar::cplx(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y).norm();
        let f = fidelity(&Density::pure(&u, vec![2, 2, 2]).unwrap(), &Density::pure(&v, vec![2, 2, 2]).unwrap()).unwrap();
        prop_assert!((f - overlap).abs() < 1e-7, "{} vs {}", f, overlap);
    }
}

#[test]
fn binegativity_route_agrees_with_sdp() {
    let opts = EvalOptions::default();
    for (lambda, gamma, a, b) in [
        (0.6, 1.0, 1, 1),
        (1.0, 1.0, 2, 1),
        (1.3, 0.5, 1, 2),
        (1.0, 0.5, 4, 4),
    ] {
        let rho = rdm3(geom(a, b), &Params::infinite(lambda, gamma).unwrap()).unwrap();
        for center in 0..3 {
            let fast = e_ppt_cut(&rho, center, &opts).unwrap();
            let sdp = solve_kappa(&SdpProblem::new(&rho, center).unwrap());
            assert!(sdp.converged());
            assert!(
                (fast.value - sdp.e_kappa).abs() < 1e-6,
                "{lambda} {gamma} {center}: {} vs {}",
                fast.value,
                sdp.e_kappa
            );
        }
    }
}

#[test]
fn sweep_rows_are_ordered_and_consistent() {
    let grid = LambdaGrid::new(0.0, 2.0, 0.1).unwrap();
    let t = sweep(&[Column::TauUb], geom(1, 1), 1.0, grid, Chain::Infinite).unwrap();
    assert_eq!(t.rows.len(), 21);
    assert!(t.rows.windows(2).all(|w| w[0].lambda < w[1].lambda));
    for r in &t.rows {
        let c = &r.record.per_center;
        let mean = |f: &dyn Fn(&crate::measures::CenterTerms<f64>) -> f64| {
            (f(&c[0]) + f(&c[1]) + f(&c[2])) / 3.0
        };
        assert!((r.record.t3 - mean(&|x| x.t3).max(0.0)).abs() < 1e-15);
        assert!((r.record.tau_lb - mean(&|x| x.tau_lb).max(0.0)).abs() < 1e-15);
        assert!((r.record.tau_ub.unwrap() - mean(&|x| x.tau_ub.unwrap())).abs() < 1e-15);
        assert_eq!(r.status(), "ok");
    }
    let zero = &t.rows[0];
    for c in Column::ALL {
        assert!(zero.value(c).unwrap().abs() < 1e-12, "{c} at lambda = 0");
    }
    let again = sweep(&[Column::TauUb], geom(1, 1), 1.0, grid, Chain::Infinite).unwrap();
    assert_eq!(t, again);
}

#[test]
fn sweep_without_sdp_leaves_tau_ub_missing() {
    let grid = LambdaGrid::new(0.5, 0.7, 0.1).unwrap();
    let t = sweep(&[Column::N3], geom(1, 1), 1.0, grid, Chain::Infinite).unwrap();
    assert!(matches!(
        t.column(Column::TauUb),
        Err(AnalysisError::MissingColumn(Column::TauUb))
    ));
    assert!(t.column(Column::N3).is_ok());
}

#[test]
fn sweep_rejects_bad_configuration() {
    let grid = LambdaGrid::new(0.0, 1.0, 0.5).unwrap();
    assert!(sweep(&[Column::N3], geom(3, 3), 1.0, grid, Chain::Finite(5)).is_err());
    assert!(sweep(&[Column::N3], geom(1, 1), 1.5, grid, Chain::Infinite).is_err());
    assert!(sweep(&[Column::N3], geom(1, 1), 1.0, grid, Chain::Finite(10)).is_err());
}

#[test]
fn ising_n3_dominates_nearest_neighbour_triple() {
    let all = [Column::N3, Column::T3, Column::TauUb, Column::TauLb];
    let t = sweep(
        &all,
        geom(1, 1),
        1.0,
        LambdaGrid::new(0.0, 2.0, 0.01).unwrap(),
        Chain::Infinite,
    )
    .unwrap();
    let n3 = max_of(&t, Column::N3);
    for c in [Column::T3, Column::TauUb, Column::TauLb] {
        assert!(n3 > max_of(&t, c), "{c}");
    }
}

#[test]
fn infinite_chain_derivative_minimum_sits_at_critical_point() {
    let grid = LambdaGrid::new(0.9, 1.1, 1e-3).unwrap();
    let t = sweep(&[Column::TauUb], geom(1, 1), 1.0, grid, Chain::Infinite).unwrap();
    let d = derivative(&t.column(Column::TauUb).unwrap()).unwrap();
    let k = d.argmin().unwrap();
    assert!((d.lambda[k] - 1.0).abs() <= 1e-3 + 1e-12, "{}", d.lambda[k]);
}

#[test]
fn finite_chain_pseudo_critical_point_approaches_one_from_below() {
    let search = CriticalSearch::default();
    let (s41, _) = locate_pseudo_critical(Column::TauUb, geom(1, 1), 1.0, 41, &search).unwrap();
    let (s101, _) = locate_pseudo_critical(Column::TauUb, geom(1, 1), 1.0, 101, &search).unwrap();
    assert!(s41.lambda_m < 1.0 && s101.lambda_m < 1.0);
    assert!(1.0 - s101.lambda_m < 1.0 - s41.lambda_m);
    assert!(s101.min_derivative < s41.min_derivative);
}

#[test]
fn ising_concurrence_range() {
    let below = LambdaGrid::new(0.0, 0.99, 0.01).unwrap();
    let c2 = sweep(&[Column::CAlpha], geom(2, 1), 1.0, below, Chain::Infinite).unwrap();
    assert!(max_of(&c2, Column::CAlpha) > 0.0);
    let c3 = sweep(&[Column::CAlpha], geom(3, 1), 1.0, below, Chain::Infinite).unwrap();
    assert!(max_of(&c3, Column::CAlpha) < 1e-9);
}

#[test]
fn n3_reaches_beyond_pair_concurrence() {
    let below = LambdaGrid::new(0.95, 0.999, 1e-3).unwrap();
    let t = sweep(
        &[Column::N3, Column::CAlpha],
        geom(7, 7),
        0.2,
        below,
        Chain::Infinite,
    )
    .unwrap();
    assert!(max_of(&t, Column::N3) > 1e-9);
    assert!(max_of(&t, Column::CAlpha) < 1e-9);
}

fn factorization_table(column: Column, gamma: f64, step: f64) -> SweepTable {
    let lf = factorization_lambda(gamma).unwrap();
    let grid = LambdaGrid::centered((lf / step).round() * step + 0.3 * step, step, 81).unwrap();
    sweep(&[column], geom(1, 1), gamma, grid, Chain::Infinite).unwrap()
}

#[test]
fn n3_pinpoints_factorization_point() {
    let p = detect_factorization(&factorization_table(Column::N3, 0.2, 1e-3), Column::N3).unwrap();
    assert!((p.lambda - 1.0206).abs() < 0.003, "{p:?}");
    assert!((p.lambda - factorization_lambda(0.2).unwrap()).abs() < 1e-6);
    assert!(p.bracket.0 <= p.lambda && p.lambda <= p.bracket.1);
}

#[test]
fn detection_is_stable_under_grid_halving() {
    for column in [Column::N3, Column::TauUb] {
        let coarse = detect_factorization(&factorization_table(column, 0.4, 2e-3), column).unwrap();
        let fine = detect_factorization(&factorization_table(column, 0.4, 1e-3), column).unwrap();
        assert!((coarse.lambda - fine.lambda).abs() <= 2e-3, "{column}");
    }
}

#[test]
fn t3_vanishes_at_the_product_ground_state() {
    let p = detect_factorization(&factorization_table(Column::T3, 0.2, 1e-3), Column::T3).unwrap();
    assert!(
        (p.lambda - factorization_lambda(0.2).unwrap()).abs() < 1e-3,
        "{p:?}"
    );
}

#[test]
fn tau_lb_plateau_is_not_a_crossing() {
    let grid = LambdaGrid::new(0.9, 1.2, 1e-3).unwrap();
    let t = sweep(&[Column::TauLb], geom(1, 1), 0.2, grid, Chain::Infinite).unwrap();
    assert!(matches!(
        detect_factorization(&t, Column::TauLb),
        Err(AnalysisError::NotFound(..))
    ));
}

#[test]
fn factorization_scaling_rejects_boundary_anisotropy() {
    for gamma in [0.0, 1.0] {
        let r = factorization_scaling(gamma, geom(1, 1), Column::N3, &[7, 9, 11, 13, 15]);
        assert!(matches!(
            r,
            Err(AnalysisError::Xy(XyError::GammaBoundary(_)))
        ));
    }
}

#[test]
fn factorization_scaling_decays_exponentially() {
    let s = factorization_scaling(0.4, geom(1, 1), Column::N3, &[7, 9, 11, 13, 15]).unwrap();
    assert!(s.fit.slope < 0.0);
    assert!(s.fit.r_squared > 0.999);
    for p in &s.samples {
        assert!(p.n3 >= p.c1 && p.tau_ub < p.n3, "{p:?}");
    }
}

#[test]
fn ising_has_no_bound_entanglement_window() {
    let grid = LambdaGrid::new(0.0, 2.0, 0.01).unwrap();
    for (a, b) in [(1, 1), (4, 4)] {
        assert!(
            bound_entanglement_scan(1.0, geom(a, b), grid, Chain::Infinite)
                .unwrap()
                .windows
                .is_empty()
        );
    }
}

#[test]
fn bound_scan_endpoints_are_refined() {
    let opts = BoundOptions {
        tau_threshold: 1e-12,
        ..Default::default()
    };
    let grid = LambdaGrid::new(0.9, 1.3, 0.01).unwrap();
    let scan = bound_entanglement_scan_with(0.5, geom(4, 4), grid, Chain::Infinite, &opts).unwrap();
    assert_eq!(scan.windows.len(), 2, "{:?}", scan.windows);
    for w in &scan.windows {
        assert!(w.start < w.end);
        assert!(w.max_negativities[0] < 1e-9 && w.max_negativities[1] > 1e-9);
        for lambda in [w.start + 1e-4, w.end - 1e-4] {
            let r = evaluate(
                geom(4, 4),
                &Params::infinite(lambda, 0.5).unwrap(),
                &EvalOptions::default(),
            )
            .unwrap();
            assert!(r.record.bipartite_negativities[0] < 1e-9 && r.record.tau_ub.unwrap() > 1e-12);
        }
    }
}

#[test]
fn finite_and_infinite_states_agree_away_from_criticality() {
    for (lambda, gamma) in [(0.3, 1.0), (0.5, 0.5), (1.6, 0.8)] {
        let g = geom(1, 1);
        let a = rdm3(g, &Params::finite(lambda, gamma, 21).unwrap()).unwrap();
        let b = rdm3(g, &Params::infinite(lambda, gamma).unwrap()).unwrap();
        assert!(fidelity(&a, &b).unwrap() > 0.999);
    }
}
