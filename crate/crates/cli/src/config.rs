use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use xymqc::analysis::{Column, LambdaGrid, Side};
use xymqc::xychain::{Chain, Geometry};

use crate::error::CliError;

pub const WORKERS_ENV: &str = "XYMQC_WORKERS";

/// Tripartite quantum correlations of the transverse-field XY chain.
#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(name = "xymqc", version)]
pub struct RunConfig {
    /// Worker threads for grid evaluations.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Print the three-spin reduced density matrix and its spectrum.
    Rdm(RdmArgs),
    /// Evaluate every measure over a lambda grid and write CSV.
    Sweep(SweepArgs),
    /// Log-divergence and finite-size fits of the derivative near lambda_c.
    Fit(FitArgs),
    /// Locate the factorization point from zeros of a measure.
    Factorize(FactorizeArgs),
    /// Find windows where the i|jk cut is PPT but tau_ub stays positive.
    Boundscan(BoundArgs),
    /// Fidelity between finite-chain and infinite-chain reduced states.
    Fidelity(FidelityArgs),
    /// Compare the analytic reduced states with exact diagonalization.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct ChainArgs {
    /// Odd length of a finite periodic chain.
    #[arg(long = "L", value_parser = parse_odd_length)]
    pub length: Option<usize>,
    /// Use the thermodynamic limit.
    #[arg(long)]
    pub infinite: bool,
}

impl ChainArgs {
    pub fn chain(&self) -> Chain {
        match self.length {
            Some(l) => Chain::Finite(l),
            None => Chain::Infinite,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryArgs {
    #[arg(long)]
    pub alpha: usize,
    #[arg(long)]
    pub beta: usize,
}

impl GeometryArgs {
    pub fn geometry(&self) -> Result<Geometry, CliError> {
        Geometry::new(self.alpha, self.beta).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda_step: f64,
}

impl GridArgs {
    pub fn grid(&self) -> Result<LambdaGrid, CliError> {
        LambdaGrid::new(self.lambda_min, self.lambda_max, self.lambda_step)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output file; written atomically.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdmArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Spin separations as ALPHA,BETA; repeatable.
    #[arg(long = "geometry", required = true, value_parser = parse_geometry)]
    pub geometries: Vec<(usize, usize)>,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Skip the E_PPT solves; tau_ub is left empty.
    #[arg(long)]
    pub no_tau_ub: bool,
    #[command(flatten)]
    pub sdp: SdpArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpArgs {
    /// Duality-gap tolerance of the E_PPT solver.
    #[arg(long, default_value_t = 1e-10)]
    pub sdp_tol: f64,
    /// Always solve the SDP instead of using the binegativity shortcut.
    #[arg(long)]
    pub force_sdp: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
            SideArg::Both => Side::Both,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long, value_parser = parse_column)]
    pub measure: Column,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_c: f64,
    /// Smallest |lambda - lambda_c| in the log fit.
    #[arg(long, default_value_t = 3e-4)]
    pub window_min: f64,
    /// Largest |lambda - lambda_c| in the log fit.
    #[arg(long, default_value_t = 3e-2)]
    pub window_max: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Both)]
    pub side: SideArg,
    /// Spacing of the infinite-chain grid around lambda_c.
    #[arg(long, default_value_t = 1e-4)]
    pub lambda_step: f64,
    /// Odd chain lengths for the finite-size fits; empty skips them.
    #[arg(long, value_delimiter = ',', value_parser = parse_odd_length, default_values_t = [41usize, 101, 201, 401, 1001, 2701])]
    pub lengths: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizeArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, value_parser = parse_column)]
    pub measure: Column,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Odd length of a finite chain; the thermodynamic limit when absent.
    #[arg(long = "L", value_parser = parse_odd_length)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda_step: f64,
    /// Values below this count as zero.
    #[arg(long, default_value_t = 1e-9)]
    pub threshold: f64,
    /// Widest accepted zero, in lambda.
    #[arg(long, default_value_t = 0.02)]
    pub max_width: f64,
    /// Odd chain lengths for an exponential-decay fit at lambda_f.
    #[arg(long, value_delimiter = ',', value_parser = parse_odd_length)]
    pub scaling_lengths: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundArgs {
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Odd length of a finite chain; the thermodynamic limit when absent.
    #[arg(long = "L", value_parser = parse_odd_length)]
    pub length: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// N(i|jk) below this counts as PPT.
    #[arg(long, default_value_t = 1e-9)]
    pub ppt_threshold: f64,
    /// tau_ub above this counts as tripartite entanglement.
    #[arg(long, default_value_t = 1e-6)]
    pub tau_threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityArgs {
    /// Odd length of the finite chain compared with the infinite one.
    #[arg(long = "L", value_parser = parse_odd_length)]
    pub length: usize,
    /// Spin separations as ALPHA,BETA; repeatable.
    #[arg(long = "geometry", required = true, value_parser = parse_geometry)]
    pub geometries: Vec<(usize, usize)>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma_step: f64,
    /// Fidelity counted as close.
    #[arg(long, default_value_t = 0.99)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Odd chain length, at most 13.
    #[arg(long = "L", value_parser = parse_odd_length)]
    pub length: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub gamma: f64,
    /// Largest accepted elementwise deviation.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl RunConfig {
    /// Single-line JSON form echoed into output metadata.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    #[cfg(test)]
    pub fn from_canonical(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn parse_odd_length(s: &str) -> Result<usize, String> {
    let l: usize = s.parse().map_err(|e| format!("{e}"))?;
    if l.is_multiple_of(2) {
        return Err(format!("chain length must be odd, got L = {l}"));
    }
    Ok(l)
}

pub fn parse_geometry(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected ALPHA,BETA, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("alpha: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("beta: {e}"))?;
    Geometry::new(a, b).map_err(|e| e.to_string())?;
    Ok((a, b))
}

pub fn parse_column(s: &str) -> Result<Column, String> {
    s.parse::<Column>().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("xymqc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn canonical_form_round_trips() {
        let configs = [
            parse(&[
                "rdm", "--alpha", "1", "--beta", "2", "--lambda", "0.3", "--gamma", "0.7", "--L",
                "11",
            ]),
            parse(&[
                "sweep",
                "--geometry",
                "1,1",
                "--geometry",
                "2,1",
                "--gamma",
                "0.1",
                "--infinite",
                "--lambda-step",
                "0.01",
            ]),
            parse(&[
                "fit",
                "--measure",
                "tau-ub",
                "--alpha",
                "1",
                "--beta",
                "1",
                "--lengths",
                "41,201",
            ]),
            parse(&[
                "factorize",
                "--gamma",
                "0.2",
                "--measure",
                "n3",
                "--alpha",
                "1",
                "--beta",
                "1",
            ]),
            parse(&[
                "boundscan",
                "--gamma",
                "0.5",
                "--alpha",
                "4",
                "--beta",
                "4",
                "--tau-threshold",
                "1e-12",
            ]),
            parse(&[
                "fidelity",
                "--L",
                "21",
                "--geometry",
                "3,3",
                "--workers",
                "2",
            ]),
            parse(&["verify", "--L", "9", "--lambda", "0.7", "--gamma", "1"]),
        ];
        for c in configs {
            let text = c.canonical();
            let back = RunConfig::from_canonical(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.canonical(), text);
        }
    }

    #[test]
    fn even_length_is_rejected() {
        let err = RunConfig::try_parse_from([
            "xymqc", "verify", "--L", "10", "--lambda", "1", "--gamma", "1",
        ])
        .unwrap_err();
        assert!(err.to_string().contains("must be odd"));
    }

    #[test]
    fn chain_flags_are_exclusive_and_required() {
        let base = [
            "xymqc", "rdm", "--alpha", "1", "--beta", "1", "--lambda", "0", "--gamma", "1",
        ];
        assert!(RunConfig::try_parse_from(base).is_err());
        let both: Vec<&str> = base
            .iter()
            .copied()
            .chain(["--L", "9", "--infinite"])
            .collect();
        assert!(RunConfig::try_parse_from(both).is_err());
    }

    #[test]
    fn geometry_parser() {
        assert_eq!(parse_geometry("6, 3"), Ok((6, 3)));
        assert!(parse_geometry("0,3").is_err());
        assert!(parse_geometry("3").is_err());
    }
}
