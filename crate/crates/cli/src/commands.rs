use std::fmt;
use std::fs;
use std::io::Read;

use cayley_expm::bench::{rows_to_csv, run_bench, BenchConfig, BenchRow};
use cayley_expm::expm_poly::{expm, expm_oracle, matrix_spectrum, Method};
use cayley_expm::invariants::{
    charpoly_coeffs, sym_from_spectrum, sym_from_traces, trace_determinant, SymmetricInvariants,
};
use cayley_expm::selftest::{run_selftest, SelftestConfig};
use cayley_expm::simplex_geometry::{
    angles_to_spectrum, geometry_csv, invariants_from_angles, simplex_vertices, spectrum_to_angles,
    su3_angle_from_invariants, su4_angles_from_invariants, AngleInvariants, AngleParams, EigenvalueVector,
};
use cayley_expm::sun_generators::{character, spin_generator, Spin};
use cayley_expm::{Complex64, ComplexMatrix, Error, MatrixJson};
use serde::Serialize;

use crate::output::to_json_string;
use crate::{BenchArgs, Cli, Command, ExpmArgs, Format, MatrixSource, MethodArg, RootsArgs, SelftestArgs, SpinArgs};

/// Tolerance for the character check printed by `spin`.
const SPIN_CHARACTER_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    /// Bad usage or input; exit status 1.
    Input(String),
    /// Numerical failure or a failed check; exit status 2.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Expm(args) => cmd_expm(args),
        Command::Invariants(args) => cmd_invariants(&args.source),
        Command::Roots(args) => cmd_roots(args),
        Command::Spin(args) => cmd_spin(args),
        Command::Bench(args) => cmd_bench(args, cli.seed),
        Command::Selftest(args) => cmd_selftest(args, cli.seed),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = to_json_string(value).map_err(|e| CliError::Numerical(format!("cannot encode output: {e}")))?;
    println!("{text}");
    Ok(())
}

fn read_matrix(source: &MatrixSource) -> CliResult<ComplexMatrix> {
    let text = match (&source.input, &source.matrix) {
        (_, Some(inline)) => inline.clone(),
        (Some(path), None) if path.as_os_str() == "-" => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
            buf
        }
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(CliError::Input("no matrix given".into())),
    };
    let json: MatrixJson =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed matrix JSON: {e}")))?;
    Ok(ComplexMatrix::from_json(&json)?)
}

#[derive(Serialize)]
struct ExpmOutput {
    method: &'static str,
    t: f64,
    n: usize,
    result: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation_from_oracle: Option<f64>,
}

fn cmd_expm(args: &ExpmArgs) -> CliResult<()> {
    if !args.t.is_finite() {
        return Err(CliError::Input("t must be finite".into()));
    }
    if let Some(tol) = args.assert_tol {
        if !(tol > 0.0) {
            return Err(CliError::Input("--assert-tol must be positive".into()));
        }
    }
    let m = read_matrix(&args.source)?;
    let (method, name) = match args.method {
        MethodArg::Ch => (Method::CayleyHamilton, "ch"),
        MethodArg::Explicit => (Method::Explicit, "explicit"),
        MethodArg::Oracle => (Method::Oracle, "oracle"),
    };
    let u = expm(method, &m, args.t)?;
    let deviation = (args.compare || args.assert_tol.is_some())
        .then(|| u.max_abs_diff(&expm_oracle(&m, args.t)));
    print_json(&ExpmOutput {
        method: name,
        t: args.t,
        n: m.n(),
        result: u.to_json(),
        deviation_from_oracle: deviation,
    })?;
    match (args.assert_tol, deviation) {
        (Some(tol), Some(dev)) if !(dev <= tol) => Err(CliError::Numerical(format!(
            "deviation from the reference {dev:e} exceeds {tol:e}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct InvariantsOutput {
    n: usize,
    /// `tr M^p`, `p = 1..n`.
    power_sums: Vec<Complex64>,
    /// `S_0..S_n` by the Newton recurrence.
    #[serde(rename = "S")]
    s: Vec<Complex64>,
    /// `S_m = I_m / m!` from the banded determinant of traces.
    s_determinant: Vec<Complex64>,
    /// `S_0..S_n` from the eigenvalues.
    s_spectrum: Vec<Complex64>,
    /// `I_m = m!·S_m`.
    #[serde(rename = "I")]
    i: Vec<Complex64>,
    /// `det(zI − M)`, highest power first.
    charpoly: Vec<Complex64>,
    spectrum: Vec<Complex64>,
    determinant: Complex64,
}

fn cmd_invariants(source: &MatrixSource) -> CliResult<()> {
    let m = read_matrix(source)?;
    let n = m.n();
    let power_sums = m.trace_powers(n)?;
    let newton: SymmetricInvariants = sym_from_traces(&power_sums, n)?;
    let mut fact = 1.0;
    let s_determinant = (0..=n)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            trace_determinant(&power_sums, k) / fact
        })
        .collect();
    let spectrum = matrix_spectrum(&m)?;
    print_json(&InvariantsOutput {
        n,
        power_sums: power_sums.clone(),
        s: newton.s().to_vec(),
        s_determinant,
        s_spectrum: sym_from_spectrum(&spectrum).s().to_vec(),
        i: newton.trace_invariants(),
        charpoly: charpoly_coeffs(&newton),
        spectrum: spectrum.values().to_vec(),
        determinant: m.determinant(),
    })
}

#[derive(Serialize)]
struct RootsOutput {
    n: usize,
    r: f64,
    /// Components in parameterization order.
    spectrum: Vec<f64>,
    angles: Vec<f64>,
    gimbal: bool,
    invariants: AngleInvariants,
    /// `θ ∈ [0, π/3]` recovered from `tr H²` and `det H` (N = 3).
    #[serde(skip_serializing_if = "Option::is_none")]
    su3_theta_from_invariants: Option<f64>,
    /// `(θ, φ)` recovered from `tr H²`, `tr H³`, `tr H⁴` (N = 4).
    #[serde(skip_serializing_if = "Option::is_none")]
    su4_angles_from_invariants: Option<Vec<f64>>,
}

fn cmd_roots(args: &RootsArgs) -> CliResult<()> {
    let (params, ev) = match (&args.angles, &args.spectrum) {
        (Some(angles), None) => {
            let p = AngleParams::new(args.n, args.r, angles.clone())?;
            let ev = angles_to_spectrum(&p)?;
            (p, ev)
        }
        (None, Some(spectrum)) => {
            if spectrum.len() != args.n {
                return Err(CliError::Input(format!(
                    "--spectrum has {} entries but --n is {}",
                    spectrum.len(),
                    args.n
                )));
            }
            let ev = EigenvalueVector::new(spectrum.clone())?;
            (spectrum_to_angles(&ev)?, ev)
        }
        _ => return Err(CliError::Input("give exactly one of --angles or --spectrum".into())),
    };
    let invariants = invariants_from_angles(&params)?;
    let su3_theta = match (args.n, invariants.det) {
        (3, Some(det)) if params.r > 0.0 => Some(su3_angle_from_invariants(invariants.tr_h2, det)?),
        _ => None,
    };
    let su4_angles = match (args.n, invariants.tr_h4) {
        (4, Some(tr_h4)) => Some(su4_angles_from_invariants(invariants.tr_h2, invariants.tr_h3, tr_h4)?.angles),
        _ => None,
    };
    if let Some(path) = &args.emit_geometry {
        let r = ev.radius();
        if r == 0.0 {
            return Err(CliError::Input("the zero spectrum has no axis to draw".into()));
        }
        let axis: Vec<f64> = ev.components.iter().map(|x| x / r).collect();
        let csv = geometry_csv(&simplex_vertices(args.n, r)?, &axis)?;
        fs::write(path, csv).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    print_json(&RootsOutput {
        n: args.n,
        r: params.r,
        spectrum: ev.components.clone(),
        angles: params.angles.clone(),
        gimbal: params.gimbal,
        invariants,
        su3_theta_from_invariants: su3_theta,
        su4_angles_from_invariants: su4_angles,
    })
}

#[derive(Serialize)]
struct SpinOutput {
    j: String,
    axis: [f64; 3],
    theta: f64,
    generator: MatrixJson,
    exponential: MatrixJson,
    trace: Complex64,
    character: Complex64,
    character_deviation: f64,
    passed: bool,
}

fn cmd_spin(args: &SpinArgs) -> CliResult<()> {
    let j: Spin = args.j.parse()?;
    let axis: [f64; 3] = args
        .axis
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Input("--axis takes three components".into()))?;
    if !args.theta.is_finite() {
        return Err(CliError::Input("theta must be finite".into()));
    }
    let g = spin_generator(j, axis)?;
    let u = expm(Method::CayleyHamilton, g.matrix.matrix(), args.theta)?;
    let chi = character(j, Complex64::new(0.0, args.theta));
    let deviation = (u.trace() - chi).norm();
    let passed = deviation <= SPIN_CHARACTER_TOL;
    print_json(&SpinOutput {
        j: j.to_string(),
        axis,
        theta: args.theta,
        generator: g.matrix.matrix().to_json(),
        exponential: u.to_json(),
        trace: u.trace(),
        character: chi,
        character_deviation: deviation,
        passed,
    })?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("character check failed: deviation {deviation:e}")))
    }
}

fn cmd_bench(args: &BenchArgs, seed: u64) -> CliResult<()> {
    let cfg = BenchConfig {
        ns: args.n.clone(),
        batch: args.batch,
        reps: args.reps,
        seed,
        t: args.t,
    };
    let rows = run_bench(&cfg)?;
    match args.format {
        Format::Csv => print!("{}", rows_to_csv(&rows)),
        Format::Json => print_json(&rows)?,
    }
    let failed: Vec<&BenchRow> = rows.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{} benchmark rows exceed the deviation gate",
            failed.len()
        )))
    }
}

fn cmd_selftest(args: &SelftestArgs, seed: u64) -> CliResult<()> {
    let reports = run_selftest(&SelftestConfig {
        samples: args.samples,
        seed,
        suite: args.suite.clone(),
    })?;
    println!("{:<12} {:>7} {:>12}  {:<6} worst check", "suite", "checks", "worst ratio", "status");
    for r in &reports {
        println!(
            "{:<12} {:>7} {:>12.3e}  {:<6} {}",
            r.suite,
            r.checks,
            r.worst_ratio,
            if r.passed { "pass" } else { "FAIL" },
            r.worst_check
        );
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::Numerical("self-test failed".into()))
    }
}
