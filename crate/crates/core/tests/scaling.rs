//! Secondary critical-scaling checks: fit intercepts and scaling collapse.

use xymqc::analysis::{
    collapse_curve, derivative, fit_log_divergence, locate_pseudo_critical, scaling_collapse,
    sweep, Column, CriticalSearch, LambdaGrid, LogWindow,
};
use xymqc::xychain::{Chain, Geometry};

#[test]
fn log_fit_intercepts_are_close_to_published() {
    let cases = [
        (Column::TauUb, (1, 1), 0.3906),
        (Column::N3, (2, 1), 0.3042),
        (Column::T3, (1, 1), 0.1304),
        (Column::TauLb, (1, 1), 0.0685),
        (Column::TauUb, (3, 1), 0.1240),
    ];
    let grid = LambdaGrid::new(0.96, 1.04, 1e-4).unwrap();
    for (column, (a, b), intercept) in cases {
        let g = Geometry::new(a, b).unwrap();
        let table = sweep(&[column], g, 1.0, grid, Chain::Infinite).unwrap();
        let d = derivative(&table.column(column).unwrap()).unwrap();
        let fit = fit_log_divergence(&d, 1.0, LogWindow::default()).unwrap();
        assert!(
            (fit.intercept - intercept).abs() < 0.05,
            "{column} {a},{b}: {}",
            fit.intercept
        );
    }
}

#[test]
fn derivatives_collapse_in_scaling_variables() {
    let g = Geometry::new(1, 1).unwrap();
    for column in [Column::TauUb, Column::T3] {
        let curves = [41, 201, 401, 2701]
            .iter()
            .map(|&l| {
                let (scan, _) =
                    locate_pseudo_critical(column, g, 1.0, l, &CriticalSearch::default()).unwrap();
                collapse_curve(column, g, 1.0, &scan, 5.0, 101).unwrap()
            })
            .collect();
        let report = scaling_collapse(curves, (-2.0, 2.0), 41);
        assert!(
            report.relative_spread < 0.1,
            "{column}: {}",
            report.relative_spread
        );
    }
}
