mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use e2qes::dyson::{solve_dyson, tdde_residual, FreeParams, ReadingCheck};
use e2qes::model::{classify_pt, hermitian_defect, parse_expr, CoefficientSet, PtClass, DEFAULT_SAMPLE_TIMES};
use e2qes::observables::{
    double_scaling_compare, double_scaling_csv, expectation_csv, expectation_series, Level, QuadratureGrid,
    ThreeLevelSystem, DEFAULT_NODES,
};
use e2qes::qes::quantization_eigenvalues;
use e2qes::verify::{run_suite, VerifyConfig};
use e2qes::Exec;

use config::{ScalingConfig, SolveConfig, SpectrumConfig, ThreeLevelConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] e2qes::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 for unreadable or malformed input, 3 for violated numerical
    /// preconditions, 1 for a failing verification.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Core(e) if e.is_parse() => 2,
            CliError::Core(_) | CliError::Internal(_) => 3,
            CliError::VerifyFailed(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "e2qes", version, about = "Dyson maps, QES spectra and invariants for time-dependent E2 models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Truncation order M (modes -M..=M).
    #[arg(long)]
    truncation: Option<usize>,
    /// Quadrature nodes K.
    #[arg(long)]
    quadrature: Option<usize>,
    /// Scale factor applied to verification bounds.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated probe times.
    #[arg(long, value_delimiter = ',')]
    probe_times: Option<Vec<f64>>,
    /// Run sweeps on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    fn read_input(&self) -> Result<String, CliError> {
        let path = self.input.as_ref().ok_or_else(|| CliError::Config("--input is required".into()))?;
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    }

    fn parse<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        let text = self.read_input()?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", self.input_name())))
    }

    fn input_name(&self) -> String {
        self.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        output::emit(text, self.output.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// PT classes admitted by a coefficient set.
    Classify(Common),
    /// Hermitian counterpart and Dyson map for one PT class.
    SolveDyson(Common),
    /// Quantization roots and energies of one QES block.
    Spectrum(Common),
    /// Three-level states sampled on the quadrature grid (CSV).
    Wavefunctions(Common),
    /// Expectation values of u, v, J for the three-level states (CSV).
    Observables(Common),
    /// Run the self-check suite; exits 1 if any check fails.
    Verify(Common),
    /// Eigenvalue deviations from the Mathieu limit (CSV).
    DoubleScaling(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify(c) => classify(&c),
        Command::SolveDyson(c) => solve(&c),
        Command::Spectrum(c) => spectrum(&c),
        Command::Wavefunctions(c) => wavefunctions(&c),
        Command::Observables(c) => observables(&c),
        Command::Verify(c) => verify(&c),
        Command::DoubleScaling(c) => scaling(&c),
    }
}

fn probe_times(c: &Common) -> Vec<f64> {
    c.probe_times.clone().unwrap_or_else(|| DEFAULT_SAMPLE_TIMES.to_vec())
}

fn classify(c: &Common) -> Result<(), CliError> {
    let set = CoefficientSet::from_json_str(&c.read_input()?)?;
    let classes: Vec<PtClass> = classify_pt(&set, &probe_times(c)).into_iter().collect();
    c.emit(&output::json(&classes)?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveReport {
    class: PtClass,
    h: serde_json::Value,
    dyson_map: MapSummary,
    free_parameters: Vec<&'static str>,
    constraints: Vec<ConstraintRow>,
    readings: Vec<ReadingCheck>,
    residuals: Vec<ResidualRow>,
}

#[derive(Serialize)]
struct MapSummary {
    tau: String,
    lambda: String,
    rho: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConstraintRow {
    name: &'static str,
    max_residual: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResidualRow {
    t: f64,
    dyson_relation: f64,
    hermitian_defect: f64,
}

fn solve(c: &Common) -> Result<(), CliError> {
    let cfg: SolveConfig = c.parse()?;
    let inputs = CoefficientSet::from_json_value(&cfg.coefficients)?;
    let times = probe_times(c);
    let mut free = FreeParams::new().probe_times(times.clone());
    if let Some(l) = &cfg.lambda {
        free = free.lambda(parse_expr(l)?);
    }
    if let Some(t) = &cfg.tau {
        free = free.tau(parse_expr(t)?);
    }
    let sol = solve_dyson(cfg.class, &inputs, &free)?;
    let m = c.truncation.unwrap_or(32);
    let residuals = times
        .iter()
        .map(|&t| {
            let (defect, _) = hermitian_defect(&sol.h_coeffs, t, m)?;
            Ok(ResidualRow { t, dyson_relation: tdde_residual(&inputs, &sol.h_coeffs, &sol.params, t, m)?, hermitian_defect: defect })
        })
        .collect::<Result<Vec<_>, e2qes::Error>>()?;
    let constraints = sol
        .constraints
        .iter()
        .map(|k| ConstraintRow {
            name: k.name,
            max_residual: times.iter().map(|&t| k.residual.eval(t).abs()).fold(0.0, f64::max),
        })
        .collect();
    let report = SolveReport {
        class: cfg.class,
        h: sol.h_coeffs.to_json_value(),
        dyson_map: MapSummary {
            tau: sol.params.tau.to_string(),
            lambda: sol.params.lambda.to_string(),
            rho: sol.params.rho.to_string(),
        },
        free_parameters: sol.free_parameters.clone(),
        constraints,
        readings: sol.readings.clone(),
        residuals,
    };
    c.emit(&output::json(&report)?)
}

fn spectrum(c: &Common) -> Result<(), CliError> {
    let cfg: SpectrumConfig = c.parse()?;
    let spec = quantization_eigenvalues(cfg.sector, cfg.n_hat, cfg.zeta, cfg.beta)?;
    c.emit(&output::json(&spec)?)
}

fn three_level(c: &Common) -> Result<(ThreeLevelConfig, ThreeLevelSystem, QuadratureGrid), CliError> {
    let cfg: ThreeLevelConfig = c.parse()?;
    let sys = ThreeLevelSystem::new(cfg.zeta, cfg.beta, parse_expr(&cfg.lambda)?)?;
    let grid = QuadratureGrid::new(cfg.theta0, c.quadrature.unwrap_or(DEFAULT_NODES))?;
    Ok((cfg, sys, grid))
}

fn wavefunctions(c: &Common) -> Result<(), CliError> {
    let (cfg, sys, grid) = three_level(c)?;
    let phi = sys.wavefunctions(cfg.t, &grid);
    let mut out = String::from("theta");
    for l in Level::ALL {
        out.push_str(&format!(",re_{0},im_{0}", l.name()));
    }
    out.push('\n');
    for (k, th) in grid.nodes().iter().enumerate() {
        out.push_str(&th.to_string());
        for p in &phi {
            out.push_str(&format!(",{},{}", p[k].re, p[k].im));
        }
        out.push('\n');
    }
    c.emit(&out)
}

fn observables(c: &Common) -> Result<(), CliError> {
    let (cfg, sys, grid) = three_level(c)?;
    let times = if cfg.times.is_empty() { probe_times(c) } else { cfg.times.clone() };
    c.emit(&expectation_csv(&expectation_series(&sys, &times, &grid)?)?)
}

fn verify(c: &Common) -> Result<(), CliError> {
    let mut cfg: VerifyConfig = match &c.input {
        Some(_) => c.parse()?,
        None => VerifyConfig::default(),
    };
    if let Some(m) = c.truncation {
        cfg.truncation = m;
    }
    if let Some(k) = c.quadrature {
        cfg.quadrature = k;
    }
    if let Some(s) = c.tolerance {
        cfg.tolerance_scale = s;
    }
    if let Some(ts) = &c.probe_times {
        cfg.probe_times = ts.clone();
    }
    let report = run_suite(&cfg, c.exec());
    c.emit(&output::json(&report)?)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|k| !k.passed).map(|k| k.name).collect();
        Err(CliError::VerifyFailed(failed.join(", ")))
    }
}

fn scaling(c: &Common) -> Result<(), CliError> {
    let cfg: ScalingConfig = c.parse()?;
    let rows = double_scaling_compare(cfg.g, &cfg.zetas, cfg.beta, c.truncation.unwrap_or(64), cfg.k_low, c.exec())?;
    c.emit(&double_scaling_csv(&rows)?)
}
