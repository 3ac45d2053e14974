use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use xymqc::analysis::{
    bound_entanglement_scan_with, derivative, factorization_candidates, factorization_scaling,
    fidelity, fit_exponent, fit_finite_size, fit_log_divergence, locate_pseudo_critical, sweep,
    sweep_with, BoundOptions, BoundWindow, Column, CriticalScan, CriticalSearch, DetectOptions,
    EvalOptions, FactorizationPoint, FactorizationScaling, FitResult, LambdaGrid, LogWindow, Row,
};
use xymqc::edsim::{reduced_state, Hamiltonian, Parity};
use xymqc::sdpsolver::SdpOptions;
use xymqc::xychain::{factorization_lambda, rdm3, Chain, CorrelationTable, Geometry, Params};

use crate::config::{
    BoundArgs, FactorizeArgs, FidelityArgs, FitArgs, RdmArgs, RunConfig, SweepArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::output::{emit, field, json_document, Metadata, CSV_HEADER};

fn geometry(a: usize, b: usize) -> Result<Geometry, CliError> {
    Ok(Geometry::new(a, b)?)
}

fn chain_of(length: Option<usize>) -> Chain {
    length.map_or(Chain::Infinite, Chain::Finite)
}

pub fn rdm(args: &RdmArgs) -> Result<(), CliError> {
    let g = args.geometry.geometry()?;
    let params = Params::new(args.lambda, args.gamma, args.chain.chain())?;
    g.check(params.chain)?;
    let rho = rdm3(g, &params)?;
    let eig = rho
        .eigenvalues()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let table = CorrelationTable::compute(&params, g.span() + 1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# lambda = {}, gamma = {}, L = {}, alpha = {}, beta = {}",
        params.lambda, params.gamma, params.chain, g.alpha, g.beta
    );
    let max_r = table.max_r() as i64;
    for r in -max_r..=max_r {
        let _ = writeln!(out, "# G[{r}] = {:.15e}", table.get(r));
    }
    let m = rho.matrix();
    let imaginary = m.as_slice().iter().any(|z| z.im.abs() > 1e-14);
    out.push_str("rho (real part):\n");
    for i in 0..m.rows() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:>13.6e}", z.re))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    if imaginary {
        out.push_str("rho (imaginary part):\n");
        for i in 0..m.rows() {
            let line: Vec<String> = m
                .row(i)
                .iter()
                .map(|z| format!("{:>13.6e}", z.im))
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    let eig: Vec<String> = eig.iter().map(|v| format!("{v:.10e}")).collect();
    let _ = writeln!(out, "eigenvalues: {}", eig.join(" "));
    print!("{out}");
    Ok(())
}

fn csv_line(row: &Row) -> String {
    let r = &row.record;
    let n = r.bipartite_negativities;
    format!(
        "{},{},{},{},{},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{}",
        row.lambda,
        row.gamma,
        row.geometry.alpha,
        row.geometry.beta,
        row.chain,
        r.n3,
        r.t3,
        field(r.tau_ub),
        r.tau_lb,
        n[0],
        n[1],
        n[2],
        row.c_alpha,
        row.status()
    )
}

pub fn sweep_cmd(config: &RunConfig, args: &SweepArgs) -> Result<(), CliError> {
    let grid = args.grid.grid()?;
    let chain = args.chain.chain();
    let opts = EvalOptions {
        with_tau_ub: !args.no_tau_ub,
        binegativity_shortcut: !args.sdp.force_sdp,
        sdp: SdpOptions {
            gap_tol: args.sdp.sdp_tol,
            ..SdpOptions::default()
        },
        ..EvalOptions::default()
    };
    let geometries = args
        .geometries
        .iter()
        .map(|&(a, b)| geometry(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    for g in &geometries {
        g.check(chain)?;
    }
    let mut out = Metadata::new(config).csv_lines(config);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut flagged = 0;
    for g in geometries {
        let table = sweep_with(&opts, g, args.gamma, grid, chain)?;
        flagged += table.flagged_rows().count();
        for row in &table.rows {
            out.push_str(&csv_line(row));
            out.push('\n');
        }
    }
    emit(args.output.output.as_deref(), &out)?;
    if flagged > 0 {
        eprintln!("warning: {flagged} rows flagged in the status column");
    }
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    measure: Column,
    geometry: Geometry,
    gamma: f64,
    lambda_c: f64,
    log_fit: FitResult,
    scans: Vec<CriticalScan>,
    finite_size_fit: Option<FitResult>,
    exponent_fit: Option<FitResult>,
}

pub fn fit(config: &RunConfig, args: &FitArgs) -> Result<(), CliError> {
    let g = args.geometry.geometry()?;
    if !(args.window_min > 0.0 && args.window_max > args.window_min) {
        return Err(CliError::Usage(format!(
            "bad log window [{}, {}]",
            args.window_min, args.window_max
        )));
    }
    let half = (args.window_max * 4.0 / 3.0 / args.lambda_step).ceil() as usize;
    let grid = LambdaGrid::centered(args.lambda_c, args.lambda_step, 2 * half + 1)?;
    let table = sweep(&[args.measure], g, args.gamma, grid, Chain::Infinite)?;
    let d = derivative(&table.column(args.measure)?)?;
    let window = LogWindow {
        min: args.window_min,
        max: args.window_max,
        side: args.side.into(),
    };
    let log_fit = fit_log_divergence(&d, args.lambda_c, window)?;
    let search = CriticalSearch {
        lambda_c: args.lambda_c,
        ..CriticalSearch::default()
    };
    let scans = args
        .lengths
        .iter()
        .map(|&l| Ok(locate_pseudo_critical(args.measure, g, args.gamma, l, &search)?.0))
        .collect::<Result<Vec<_>, CliError>>()?;
    let (finite_size_fit, exponent_fit) = if scans.is_empty() {
        (None, None)
    } else {
        (
            Some(fit_finite_size(&scans)?),
            Some(fit_exponent(&scans, args.lambda_c)?),
        )
    };
    println!(
        "log fit: d{}/dlambda = {:.4} ln|lambda - lambda_c| + {:.4} (R2 {:.5}, {} points)",
        args.measure, log_fit.slope, log_fit.intercept, log_fit.r_squared, log_fit.n_points
    );
    for s in &scans {
        println!(
            "L = {:>5}: lambda_m = {:.6}, min derivative = {:.6}",
            s.length, s.lambda_m, s.min_derivative
        );
    }
    if let (Some(fs), Some(ex)) = (&finite_size_fit, &exponent_fit) {
        println!(
            "finite size: min derivative = {:.4} ln L + {:.4} (R2 {:.5})",
            fs.slope, fs.intercept, fs.r_squared
        );
        println!(
            "pseudo-critical: |lambda_m - lambda_c| ~ L^{:.3} (R2 {:.5})",
            ex.slope, ex.r_squared
        );
    }
    if let Some(path) = args.output.output.as_deref() {
        let report = FitReport {
            measure: args.measure,
            geometry: g,
            gamma: args.gamma,
            lambda_c: args.lambda_c,
            log_fit,
            scans,
            finite_size_fit,
            exponent_fit,
        };
        emit(Some(path), &json_document(&Metadata::new(config), &report))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FactorizeReport {
    measure: Column,
    geometry: Geometry,
    gamma: f64,
    chain: Chain,
    exact: f64,
    candidates: Vec<FactorizationPoint>,
    scaling: Option<FactorizationScaling>,
}

pub fn factorize(config: &RunConfig, args: &FactorizeArgs) -> Result<(), CliError> {
    let g = args.geometry.geometry()?;
    let chain = chain_of(args.length);
    g.check(chain)?;
    let exact = factorization_lambda(args.gamma)?;
    let grid = LambdaGrid::new(args.lambda_min, args.lambda_max, args.lambda_step)?;
    let table = sweep(&[args.measure], g, args.gamma, grid, chain)?;
    let opts = DetectOptions {
        threshold: args.threshold,
        max_width: args.max_width,
    };
    let candidates = factorization_candidates(&table, args.measure, &opts)?;
    let scaling = if args.scaling_lengths.is_empty() {
        None
    } else {
        Some(factorization_scaling(
            args.gamma,
            g,
            args.measure,
            &args.scaling_lengths,
        )?)
    };
    println!("1/sqrt(1 - gamma^2) = {exact:.6}");
    for c in &candidates {
        println!(
            "{} vanishes at lambda = {:.6} (bracket [{:.6}, {:.6}], min {:.2e}, offset {:+.1e})",
            args.measure,
            c.lambda,
            c.bracket.0,
            c.bracket.1,
            c.min_value,
            c.lambda - exact
        );
    }
    if let Some(s) = &scaling {
        println!(
            "ln {} at lambda_f = {:.4} L + {:.4} (R2 {:.6})",
            args.measure, s.fit.slope, s.fit.intercept, s.fit.r_squared
        );
    }
    if let Some(path) = args.output.output.as_deref() {
        let report = FactorizeReport {
            measure: args.measure,
            geometry: g,
            gamma: args.gamma,
            chain,
            exact,
            candidates: candidates.clone(),
            scaling,
        };
        emit(Some(path), &json_document(&Metadata::new(config), &report))?;
    }
    if candidates.is_empty() {
        return Err(CliError::Compute(format!(
            "no zero of {} in [{}, {}]",
            args.measure, args.lambda_min, args.lambda_max
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundReport {
    gamma: f64,
    geometry: Geometry,
    chain: Chain,
    options: BoundOptions,
    windows: Vec<BoundWindow>,
}

pub fn boundscan(config: &RunConfig, args: &BoundArgs) -> Result<(), CliError> {
    let g = args.geometry.geometry()?;
    let chain = chain_of(args.length);
    g.check(chain)?;
    let options = BoundOptions {
        ppt_threshold: args.ppt_threshold,
        tau_threshold: args.tau_threshold,
    };
    let scan = bound_entanglement_scan_with(args.gamma, g, args.grid.grid()?, chain, &options)?;
    println!(
        "{} window(s) with N(i|jk) < {:e} and tau_ub > {:e}",
        scan.windows.len(),
        options.ppt_threshold,
        options.tau_threshold
    );
    for w in &scan.windows {
        println!(
            "[{:.5}, {:.5}]: {} grid points, max tau_ub {:.3e}, max N(i|jk) {:.1e}",
            w.start, w.end, w.grid_points, w.max_tau_ub, w.max_negativities[0]
        );
    }
    if let Some(path) = args.output.output.as_deref() {
        let report = BoundReport {
            gamma: args.gamma,
            geometry: g,
            chain,
            options,
            windows: scan.windows,
        };
        emit(Some(path), &json_document(&Metadata::new(config), &report))?;
    }
    Ok(())
}

pub fn fidelity_cmd(config: &RunConfig, args: &FidelityArgs) -> Result<(), CliError> {
    let lambdas = args.grid.grid()?.points();
    let gammas = LambdaGrid::new(args.gamma_min, args.gamma_max, args.gamma_step)?.points();
    if gammas.iter().any(|&v| v > 1.0) {
        return Err(CliError::Usage(format!(
            "gamma must lie in [0, 1], got up to {}",
            args.gamma_max
        )));
    }
    let mut out = Metadata::new(config).csv_lines(config);
    out.push_str("lambda,gamma,alpha,beta,L,fidelity\n");
    for &(a, b) in &args.geometries {
        let g = geometry(a, b)?;
        g.check(Chain::Finite(args.length))?;
        let points: Vec<(f64, f64)> = lambdas
            .iter()
            .flat_map(|&l| gammas.iter().map(move |&y| (l, y)))
            .collect();
        let values = points
            .par_iter()
            .map(|&(l, y)| {
                let finite = rdm3(g, &Params::finite(l, y, args.length)?)?;
                let infinite = rdm3(g, &Params::infinite(l, y)?)?;
                fidelity(&finite, &infinite).map_err(|e| CliError::Compute(e.to_string()))
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        let close = values.iter().filter(|&&f| f > args.threshold).count();
        println!(
            "m = ({a},{b}): {close}/{} points above {}",
            values.len(),
            args.threshold
        );
        for ((l, y), f) in points.iter().zip(&values) {
            let _ = writeln!(out, "{l},{y},{a},{b},{},{f:.15}", args.length);
        }
    }
    if let Some(path) = args.output.output.as_deref() {
        emit(Some(path), &out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Deviation {
    alpha: usize,
    beta: usize,
    max_abs: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    length: usize,
    lambda: f64,
    gamma: f64,
    ground_energy: f64,
    lanczos_residual: f64,
    tolerance: f64,
    max_deviation: f64,
    deviations: Vec<Deviation>,
}

pub fn verify(config: &RunConfig, args: &VerifyArgs) -> Result<(), CliError> {
    let params = Params::finite(args.lambda, args.gamma, args.length)?;
    let gs = Hamiltonian::from_params(&params)?.sector_ground_state(Parity::Even)?;
    let mut deviations = Vec::new();
    for alpha in 1..args.length {
        for beta in 1..args.length - alpha {
            let g = geometry(alpha, beta)?;
            let ed = reduced_state(&gs.state, &g.offsets())?;
            let exact = rdm3(g, &params)?;
            deviations.push(Deviation {
                alpha,
                beta,
                max_abs: ed.matrix().max_abs_diff(exact.matrix()),
            });
        }
    }
    let max_deviation = deviations.iter().map(|d| d.max_abs).fold(0.0, f64::max);
    println!(
        "L = {}, lambda = {}, gamma = {}: ground energy {:.12}, Lanczos residual {:.1e}",
        args.length, args.lambda, args.gamma, gs.energy, gs.residual
    );
    for d in &deviations {
        println!(
            "m = ({},{}): max deviation {:.3e}",
            d.alpha, d.beta, d.max_abs
        );
    }
    println!(
        "max deviation over {} geometries: {max_deviation:.3e} (tolerance {:e})",
        deviations.len(),
        args.tolerance
    );
    if let Some(path) = args.output.output.as_deref() {
        let report = VerifyReport {
            length: args.length,
            lambda: args.lambda,
            gamma: args.gamma,
            ground_energy: gs.energy,
            lanczos_residual: gs.residual,
            tolerance: args.tolerance,
            max_deviation,
            deviations,
        };
        emit(Some(path), &json_document(&Metadata::new(config), &report))?;
    }
    if !(max_deviation <= args.tolerance) {
        return Err(CliError::Compute(format!(
            "deviation {max_deviation:e} exceeds {:e}",
            args.tolerance
        )));
    }
    Ok(())
}
