//! Acceptance suite: one check per criterion, one PASS/FAIL line each.
//! Runs without the libtest harness so every line reaches stdout.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xymqc::analysis::{
    bound_entanglement_scan, derivative, detect_factorization, factorization_scaling, fidelity,
    fit_exponent, fit_finite_size, fit_log_divergence, locate_pseudo_critical, sweep, Column,
    CriticalScan, CriticalSearch, LambdaGrid, LogWindow, SweepTable,
};
use xymqc::edsim::{reduced_state, Hamiltonian, Parity};
use xymqc::linalg::partial_trace;
use xymqc::measures::{log_negativity, n3, negativity, t3, tau_lb, tau_ub, MqcRecord};
use xymqc::sdpsolver::{binegativity_min_eigenvalue, e_ppt_triple, solve_kappa, SdpProblem};
use xymqc::states;
use xymqc::xychain::{factorization_lambda, rdm3, Chain, Geometry, Params};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn geom(a: usize, b: usize) -> Geometry {
    Geometry::new(a, b).unwrap()
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

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for length in [9usize, 11] {
        for gamma in [0.2, 0.5, 1.0] {
            for lambda in [0.0, 0.5, 1.0, 1.5, 2.0] {
                let h = Hamiltonian::new(length, lambda, gamma).unwrap();
                let gs = h.sector_ground_state(Parity::Even).unwrap();
                let params = Params::finite(lambda, gamma, length).unwrap();
                for alpha in 1..length {
                    for beta in 1..length - alpha {
                        let g = geom(alpha, beta);
                        let ed = reduced_state(&gs.state, &g.offsets()).unwrap();
                        let exact = rdm3(g, &params).unwrap();
                        worst = worst.max((ed.matrix() - exact.matrix()).max_abs());
                        count += 1;
                    }
                }
            }
        }
    }
    outcome(
        worst < 1e-8,
        format!("max elementwise deviation {worst:.2e} over {count} reduced states"),
    )
}

fn factorization_point() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut misses = Vec::new();
    let grid = LambdaGrid::new(0.5, 2.0, 1e-3).unwrap();
    for gamma in [0.2, 0.4, 0.6, 0.8] {
        let exact = factorization_lambda(gamma).unwrap();
        for (a, b) in [(1, 1), (2, 1), (2, 2)] {
            let table = sweep(&[Column::TauUb], geom(a, b), gamma, grid, Chain::Infinite).unwrap();
            for column in [Column::N3, Column::TauUb] {
                match detect_factorization(&table, column) {
                    Ok(p) => {
                        let err = (p.lambda - exact).abs();
                        worst = worst.max(err);
                        if err > 0.005 {
                            misses
                                .push(format!("{column} g={gamma} m=({a},{b}) at {:.5}", p.lambda));
                        }
                    }
                    Err(e) => misses.push(format!("{column} g={gamma} m=({a},{b}): {e}")),
                }
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!("24 detections, max |lambda - lambda_f| = {worst:.1e}; misses {misses:?}"),
    )
}

struct SlopeCase {
    column: Column,
    geometry: (usize, usize),
    slope: f64,
    tol: f64,
}

const SLOPE_CASES: [SlopeCase; 5] = [
    SlopeCase {
        column: Column::TauUb,
        geometry: (1, 1),
        slope: 0.2819,
        tol: 0.03,
    },
    SlopeCase {
        column: Column::N3,
        geometry: (2, 1),
        slope: 0.1961,
        tol: 0.02,
    },
    SlopeCase {
        column: Column::T3,
        geometry: (1, 1),
        slope: 0.0776,
        tol: 0.01,
    },
    SlopeCase {
        column: Column::TauLb,
        geometry: (1, 1),
        slope: 0.0461,
        tol: 0.01,
    },
    SlopeCase {
        column: Column::TauUb,
        geometry: (3, 1),
        slope: 0.0989,
        tol: 0.015,
    },
];

const LENGTHS: [usize; 6] = [41, 101, 201, 401, 1001, 2701];

fn scans(column: Column, g: Geometry) -> Vec<CriticalScan> {
    LENGTHS
        .iter()
        .map(|&l| {
            locate_pseudo_critical(column, g, 1.0, l, &CriticalSearch::default())
                .unwrap()
                .0
        })
        .collect()
}

fn critical_slopes() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for case in &SLOPE_CASES {
        let g = geom(case.geometry.0, case.geometry.1);
        let grid = LambdaGrid::new(0.96, 1.04, 1e-4).unwrap();
        let table = sweep(&[case.column], g, 1.0, grid, Chain::Infinite).unwrap();
        let d = derivative(&table.column(case.column).unwrap()).unwrap();
        let log = fit_log_divergence(&d, 1.0, LogWindow::default()).unwrap();
        let fs = fit_finite_size(&scans(case.column, g)).unwrap();
        let ok =
            (log.slope - case.slope).abs() <= case.tol && (fs.slope + case.slope).abs() <= case.tol;
        pass &= ok;
        parts.push(format!(
            "{}{:?}: a={:.4} fs={:.4} (target {:.4})",
            case.column, case.geometry, log.slope, fs.slope, case.slope
        ));
    }
    outcome(pass, parts.join("; "))
}

fn pseudo_critical_exponents() -> Outcome {
    let ub = fit_exponent(&scans(Column::TauUb, geom(1, 1)), 1.0).unwrap();
    let n = fit_exponent(&scans(Column::N3, geom(2, 1)), 1.0).unwrap();
    let pass = (ub.slope + 1.38).abs() <= 0.15 && (n.slope + 1.89).abs() <= 0.25;
    outcome(
        pass,
        format!(
            "tau_ub(1,1) exponent {:.3} (target -1.38); n3(2,1) exponent {:.3} (target -1.89)",
            ub.slope, n.slope
        ),
    )
}

fn ising_range() -> Outcome {
    let all = [Column::N3, Column::T3, Column::TauUb, Column::TauLb];
    let grid = LambdaGrid::new(0.0, 2.0, 1e-3).unwrap();
    let far = sweep(&all, geom(3, 3), 1.0, grid, Chain::Infinite).unwrap();
    let near = sweep(&all, geom(3, 2), 1.0, grid, Chain::Infinite).unwrap();
    let far_max = all.map(|c| max_of(&far, c));
    let near_max = all.map(|c| max_of(&near, c));
    let pass = far_max.iter().all(|&v| v < 1e-6) && near_max.iter().any(|&v| v > 1e-4);
    let show = |v: &[f64; 4]| {
        v.iter()
            .map(|x| format!("{x:.1e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcome(
        pass,
        format!(
            "m=(3,3) maxima [{}]; m=(3,2) maxima [{}]",
            show(&far_max),
            show(&near_max)
        ),
    )
}

fn bound_entanglement() -> Outcome {
    let grid = LambdaGrid::new(0.0, 2.0, 1e-3).unwrap();
    let scan = bound_entanglement_scan(0.5, geom(4, 4), grid, Chain::Infinite).unwrap();
    let first = scan.windows.iter().any(|w| {
        w.start < 1.074
            && w.end > 0.959
            && (w.start - 0.959).abs() <= 0.01
            && (w.end - 1.074).abs() <= 0.01
    });
    let second = scan
        .windows
        .iter()
        .any(|w| w.start < 1.226 && w.end > 1.205);
    let inside_ok = scan.windows.iter().all(|w| w.max_negativities[0] < 1e-9);
    let found: Vec<String> = scan
        .windows
        .iter()
        .map(|w| {
            format!(
                "({:.4}, {:.4}) max tau_ub {:.2e}",
                w.start, w.end, w.max_tau_ub
            )
        })
        .collect();
    outcome(first && second && inside_ok, format!("windows {found:?}"))
}

fn fidelity_grid() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b) in [(1, 1), (3, 3), (6, 3), (6, 6)] {
        let g = geom(a, b);
        let mut good = 0;
        for i in 0..21 {
            for j in 0..11 {
                let (lambda, gamma) = (0.1 * i as f64, 0.1 * j as f64);
                let finite = rdm3(g, &Params::finite(lambda, gamma, 21).unwrap()).unwrap();
                let infinite = rdm3(g, &Params::infinite(lambda, gamma).unwrap()).unwrap();
                if fidelity(&finite, &infinite).unwrap() > 0.99 {
                    good += 1;
                }
            }
        }
        pass &= good * 10 >= 231 * 9;
        parts.push(format!("m=({a},{b}) {good}/231"));
    }
    outcome(pass, parts.join(", "))
}

fn sdp_correctness() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let (mut floor_violation, mut equality_error, mut worst_gap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut psd_subset = 0;
    let mut unconverged = 0;
    for k in 0..200 {
        let rank = r.gen_range(1..=8);
        let rho = states::random_mixed::<f64, _>(&mut r, 3, rank);
        let center = k % 3;
        let sol = solve_kappa(&SdpProblem::new(&rho, center).unwrap());
        let ln = log_negativity(&rho, center).unwrap();
        floor_violation = floor_violation.max(ln - sol.e_kappa);
        if sol.converged() {
            worst_gap = worst_gap.max(sol.duality_gap.abs());
        } else {
            unconverged += 1;
        }
        if binegativity_min_eigenvalue(&rho, center).unwrap() >= 0.0 {
            psd_subset += 1;
            equality_error = equality_error.max((sol.e_kappa - ln).abs());
        }
    }
    let pass = floor_violation <= 1e-6 && equality_error < 1e-5 && worst_gap < 1e-7;
    outcome(
        pass,
        format!(
            "max(LN - E) = {floor_violation:.1e}; binegativity-PSD subset {psd_subset}, max |E - LN| = {equality_error:.1e}; max gap {worst_gap:.1e}; unconverged {unconverged}"
        ),
    )
}

fn measure_properties() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut monogamy_violation: f64 = f64::NEG_INFINITY;
    for _ in 0..500 {
        let rho = states::random_pure::<f64, _>(&mut r, 3);
        for x in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&k| k != x).collect();
            let n = negativity(&rho, x).unwrap();
            let pair = |y: usize| negativity(&partial_trace(&rho, &[x, y]).unwrap(), 0).unwrap();
            let (a, b) = (pair(others[0]), pair(others[1]));
            monogamy_violation = monogamy_violation.max(a * a + b * b - n * n);
        }
    }
    let ghz = states::ghz::<f64>();
    let e = e_ppt_triple(&ghz).unwrap().map(|s| s.e_kappa);
    let ghz_values = [
        n3(&ghz).unwrap(),
        t3(&ghz).unwrap(),
        tau_ub(&ghz, e).unwrap(),
        tau_lb(&ghz).unwrap(),
    ];
    let ghz_ok = ghz_values.iter().all(|v| (v - 1.0).abs() < 1e-6);
    let mut product_max: f64 = 0.0;
    for _ in 0..200 {
        let rho = states::random_product::<f64, _>(&mut r, 3);
        let e = e_ppt_triple(&rho).unwrap().map(|s| s.e_kappa);
        let rec = MqcRecord::compute(&rho, Some(e)).unwrap();
        for v in [rec.n3, rec.t3, rec.tau_ub.unwrap().abs(), rec.tau_lb] {
            product_max = product_max.max(v);
        }
    }
    let mut mirror: f64 = 0.0;
    for _ in 0..60 {
        let (a, b) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let params = Params::infinite(r.gen_range(0.0..2.0), r.gen_range(0.0..=1.0)).unwrap();
        let left: f64 = n3(&rdm3(geom(a, b), &params).unwrap()).unwrap();
        let right = n3(&rdm3(geom(b, a), &params).unwrap()).unwrap();
        mirror = mirror.max((left - right).abs());
    }
    let pass = monogamy_violation <= 1e-12 && ghz_ok && product_max < 1e-9 && mirror < 1e-9;
    outcome(
        pass,
        format!(
            "monogamy max excess {monogamy_violation:.1e}; GHZ {ghz_values:.7?}; product max {product_max:.1e}; mirror max {mirror:.1e}"
        ),
    )
}

fn factorization_finite_size() -> Outcome {
    let lengths: Vec<usize> = (7..=21).step_by(2).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for gamma in [0.2, 0.4, 0.6, 0.8] {
        for (a, b) in [(1, 1), (2, 1)] {
            match factorization_scaling(gamma, geom(a, b), Column::N3, &lengths) {
                Ok(s) => {
                    let ordered = s.samples.iter().all(|p| p.n3 >= p.c1 && p.tau_ub < p.n3);
                    pass &= s.fit.r_squared > 0.999 && s.fit.slope < 0.0 && ordered;
                    parts.push(format!("g={gamma} m=({a},{b}) R2={:.5}", s.fit.r_squared));
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("g={gamma} m=({a},{b}) error {e}"));
                }
            }
        }
    }
    let at21 = |gamma: f64| {
        n3(&rdm3(
            geom(1, 1),
            &Params::finite(factorization_lambda(gamma).unwrap(), gamma, 21).unwrap(),
        )
        .unwrap())
        .unwrap()
    };
    let (low, high) = (at21(0.2), at21(0.6));
    let within_order = |v: f64, anchor: f64| (v.log10() - anchor.log10()).abs() <= 1.0;
    pass &= within_order(low, 1e-2) && within_order(high, 1e-6);
    parts.push(format!("N3(L=21): g=0.2 {low:.2e}, g=0.6 {high:.2e}"));
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("factorization point", factorization_point),
        ("critical scaling slopes", critical_slopes),
        ("pseudo-critical exponents", pseudo_critical_exponents),
        ("Ising MQC range", ising_range),
        ("bound entanglement windows", bound_entanglement),
        ("finite/infinite fidelity", fidelity_grid),
        ("SDP correctness", sdp_correctness),
        ("measure properties", measure_properties),
        (
            "factorization finite-size scaling",
            factorization_finite_size,
        ),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        if !out.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} [{:.1}s] {}",
            k + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failures,
        failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
