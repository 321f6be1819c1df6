//! Timing of the polynomial exponential against the Taylor reference and
//! the explicit SU(N) forms, with a correctness gate on every run.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm_poly::{expm, Method};
use crate::matrix::{ComplexMatrix, HermitianTraceless};
use crate::sun_generators::random_traceless_hermitian;

/// Deviation allowed between methods on benchmark inputs.
pub const BENCH_GATE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub batch: usize,
    pub reps: usize,
    pub seed: u64,
    pub t: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ns: (2..=8).collect(),
            batch: 1000,
            reps: 5,
            seed: 0,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: &'static str,
    pub n: usize,
    pub batch: usize,
    pub ns_per_matrix: f64,
    pub max_deviation: f64,
}

impl BenchRow {
    pub fn passed(&self) -> bool {
        self.max_deviation <= BENCH_GATE
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::CayleyHamilton => "ch",
        Method::Oracle => "oracle",
        Method::Explicit => "explicit",
    }
}

/// Seed of draw `index` at dimension `n`; independent of evaluation order.
pub fn draw_seed(seed: u64, n: usize, index: usize) -> u64 {
    seed ^ ((n as u64) << 48) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_method(method: Method, inputs: &[HermitianTraceless], t: f64) -> Result<Vec<ComplexMatrix>> {
    inputs.iter().map(|h| expm(method, h.matrix(), t)).collect()
}

/// Runs every method on `batch` seeded draws per `n`. Timing loops are
/// sequential; generation and verification run in parallel.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.batch == 0 || cfg.reps == 0 {
        return Err(Error::invalid("batch and reps must be at least 1"));
    }
    if let Some(&n) = cfg.ns.iter().find(|&&n| !(2..=12).contains(&n)) {
        return Err(Error::invalid(format!("benchmark dimension {n} is outside 2..12")));
    }
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let inputs = (0..cfg.batch)
            .into_par_iter()
            .map(|i| random_traceless_hermitian(n, draw_seed(cfg.seed, n, i)))
            .collect::<Result<Vec<_>>>()?;
        let reference: Vec<ComplexMatrix> = inputs
            .par_iter()
            .map(|h| expm(Method::Oracle, h.matrix(), cfg.t))
            .collect::<Result<_>>()?;

        let mut methods = vec![Method::CayleyHamilton, Method::Oracle];
        if n <= 5 {
            methods.push(Method::Explicit);
        }
        for method in methods {
            let mut best = f64::INFINITY;
            for _ in 0..cfg.reps {
                let start = Instant::now();
                let out = run_method(method, &inputs, cfg.t)?;
                best = best.min(start.elapsed().as_nanos() as f64);
                std::hint::black_box(out);
            }
            // the oracle row is checked against the polynomial route
            let check = if method == Method::Oracle { Method::CayleyHamilton } else { method };
            let max_deviation = inputs
                .par_iter()
                .zip(&reference)
                .map(|(h, r)| expm(check, h.matrix(), cfg.t).map(|u| u.max_abs_diff(r)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            log::debug!("{} n={n}: {:.0} ns/matrix", method_name(method), best / cfg.batch as f64);
            rows.push(BenchRow {
                method: method_name(method),
                n,
                batch: cfg.batch,
                ns_per_matrix: best / cfg.batch as f64,
                max_deviation,
            });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,n,batch,ns_per_matrix,max_deviation\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.1},{:.3e}\n",
            r.method, r.n, r.batch, r.ns_per_matrix, r.max_deviation
        ));
    }
    out
}
