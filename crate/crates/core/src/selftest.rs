//! Property suites run at reduced sample counts by the `selftest`
//! subcommand. Every check is recorded as `error / tolerance`; a suite
//! passes when no ratio exceeds 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm_poly::{exp_coeffs, expm_ch, expm_oracle, resolvent_poly, su_explicit, unit_term};
use crate::invariants::{sym_from_spectrum, sym_from_traces};
use crate::matrix::{ComplexMatrix, HermitianTraceless};
use crate::response::{divided_difference_derivs, residue_derivs, response_contour_oracle, response_derivs};
use crate::simplex_geometry::{
    angles_to_spectrum, multiset_distance, project_spectrum, simplex_vertices, spectrum_to_angles,
    AngleParams,
};
use crate::spectra::{char_roots_general, eig_hermitian, Spectrum};
use crate::sun_generators::{
    character, random_axis_with, random_complex_matrix_with, random_traceless_hermitian_with,
    spin_generator, spin_trace_moments, Spin,
};

pub const SUITES: [&str; 7] = ["matrix", "spectra", "invariants", "response", "expm", "geometry", "spin"];

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestConfig {
    pub samples: usize,
    pub seed: u64,
    pub suite: Option<String>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            samples: 20,
            seed: 0,
            suite: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: usize,
    /// Largest `error / tolerance` seen.
    pub worst_ratio: f64,
    pub worst_check: String,
    pub passed: bool,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    worst_ratio: f64,
    worst_check: String,
}

impl Tally {
    fn check(&mut self, name: &str, err: f64, tol: f64) {
        self.checks += 1;
        let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
        if ratio > self.worst_ratio || self.worst_check.is_empty() {
            self.worst_ratio = ratio;
            self.worst_check = name.to_string();
        }
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { f64::INFINITY }, 1.0);
    }

    fn finish(self, suite: &'static str) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.checks,
            passed: self.worst_ratio <= 1.0,
            worst_ratio: self.worst_ratio,
            worst_check: self.worst_check,
        }
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<Vec<SuiteReport>> {
    if cfg.samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let selected: Vec<&'static str> = match &cfg.suite {
        None => SUITES.to_vec(),
        Some(name) => match SUITES.iter().find(|s| **s == name.as_str()) {
            Some(&s) => vec![s],
            None => {
                return Err(Error::invalid(format!(
                    "unknown suite '{name}', expected one of {}",
                    SUITES.join(", ")
                )))
            }
        },
    };
    selected
        .into_iter()
        .enumerate()
        .map(|(k, suite)| {
            let mut rng = SplitMix64::seed_from_u64(cfg.seed.wrapping_add(k as u64));
            let mut tally = Tally::default();
            match suite {
                "matrix" => matrix_suite(cfg.samples, &mut rng, &mut tally),
                "spectra" => spectra_suite(cfg.samples, &mut rng, &mut tally),
                "invariants" => invariants_suite(cfg.samples, &mut rng, &mut tally),
                "response" => response_suite(cfg.samples, &mut rng, &mut tally),
                "expm" => expm_suite(cfg.samples, &mut rng, &mut tally),
                "geometry" => geometry_suite(cfg.samples, &mut rng, &mut tally),
                _ => spin_suite(cfg.samples, &mut rng, &mut tally),
            }?;
            Ok(tally.finish(suite))
        })
        .collect()
}

fn dim(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

fn matrix_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 1, 8);
        let a = random_complex_matrix_with(n, rng);
        let b = random_complex_matrix_with(n, rng);
        let ab = &a * &b;
        let scale = a.frobenius_norm() * b.frobenius_norm();
        tally.check("(AB)† = B†A†", ab.adjoint().max_abs_diff(&(&b.adjoint() * &a.adjoint())), 1e-14 * scale);
        tally.check("tr AB = tr BA", (ab.trace() - (&b * &a).trace()).norm(), 1e-13 * scale);
        tally.check(
            "det AB = det A det B",
            (ab.determinant() - a.determinant() * b.determinant()).norm(),
            1e-12 * scale.powi(n as i32).max(1.0),
        );
        let h = HermitianTraceless::project(&(&a + &a.adjoint()))?;
        tally.flag("projection is hermitian traceless", HermitianTraceless::new(h.into_inner()).is_ok());
        let back = ComplexMatrix::from_json(&a.to_json())?;
        tally.flag("JSON roundtrip", back == a);
    }
    Ok(())
}

fn spectra_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 2, 8);
        let h = random_traceless_hermitian_with(n, rng)?;
        let spec = eig_hermitian(&h)?;
        let norm2 = h.matrix().frobenius_norm().powi(2);
        let sum_sq: f64 = spec.real_values().iter().map(|x| x * x).sum();
        tally.check("Σλ² = tr H²", (sum_sq - norm2).abs(), 1e-12 * norm2);
        let general = char_roots_general(h.matrix())?;
        let gap = general
            .values()
            .iter()
            .zip(spec.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        tally.check("charpoly roots = Jacobi eigenvalues", gap, 1e-8 * spec.scale());
    }
    Ok(())
}

fn invariants_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 2, 8);
        let m = random_complex_matrix_with(n, rng);
        let from_traces = sym_from_traces(&m.trace_powers(n)?, n)?;
        let from_spec = sym_from_spectrum(&char_roots_general(&m)?);
        for k in 0..=n {
            let a = from_traces.s()[k];
            let b = from_spec.s()[k];
            tally.check("S_m from traces = S_m from spectrum", (a - b).norm(), 1e-8 * a.norm().max(1.0));
        }
        let t = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let mut shifted = ComplexMatrix::identity(n);
        shifted.add_scaled(t, &m);
        let det = shifted.determinant();
        tally.check(
            "det(I + tM) = Σ t^m S_m",
            (from_traces.generating_function(t) - det).norm(),
            1e-9 * det.norm().max(1.0),
        );
    }
    Ok(())
}

fn response_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 2, 6);
        let h = random_traceless_hermitian_with(n, rng)?;
        let raw = eig_hermitian(&h)?;
        let rho = raw.spectral_radius();
        let spec = Spectrum::from_real(&raw.real_values().iter().map(|x| x / rho).collect::<Vec<_>>());
        let t = rng.random_range(-5.0..5.0);
        let residue = response_derivs(&spec, t, 0)?.derivs()[0];
        let contour = response_contour_oracle(&spec, t, 1.25, 512)?;
        tally.check("residue sum = contour quadrature", (residue - contour).norm(), 1e-9);

        let a = rng.random_range(-1.0..1.0);
        let gap = 10f64.powf(rng.random_range(-8.0..-4.0));
        let near = [a, a + gap, a - 1.5, a + 1.7].map(|x| Complex64::new(x, 0.0));
        let merged = [a + gap / 2.0, a + gap / 2.0, a - 1.5, a + 1.7].map(|x| Complex64::new(x, 0.0));
        let generic = residue_derivs(&near, t, 3);
        let confluent = divided_difference_derivs(&merged, t, 3, 0.0);
        let scale = 1.7 + a.abs();
        let diff = generic
            .iter()
            .zip(&confluent)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        tally.check("near-degenerate → confluent limit", diff, 10.0 * gap * scale.max(1.0).powi(3) * (1.0 + t.abs()));
    }
    Ok(())
}

fn expm_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 2, 8);
        let h = random_traceless_hermitian_with(n, rng)?;
        let t = rng.random_range(-5.0..5.0);
        let rho = eig_hermitian(&h)?.spectral_radius();
        let u = expm_ch(h.matrix(), t)?;
        let id = ComplexMatrix::identity(n);
        tally.check(
            "expm_ch = oracle",
            u.max_abs_diff(&expm_oracle(h.matrix(), t)),
            1e-9 * (t.abs() * rho).exp(),
        );
        tally.check("UU† = I", (&u * &u.adjoint()).max_abs_diff(&id), 1e-10);
        tally.check("det U = 1", (u.determinant() - 1.0).norm(), 1e-9);
        let t2 = rng.random_range(-5.0..5.0);
        let joint = expm_ch(h.matrix(), t + t2)?;
        tally.check("group law", joint.max_abs_diff(&(&u * &expm_ch(h.matrix(), t2)?)), 1e-9);

        let spec = eig_hermitian(&h)?.snapped();
        let inv = sym_from_spectrum(&spec);
        let rd = response_derivs(&spec, t, n - 1)?;
        let e0 = exp_coeffs(&inv, &rd)?.e[0];
        let u0 = unit_term(&inv, &rd)?;
        tally.check("unit term = E_0", (u0 - e0).norm() / e0.norm().max(u0.norm()), 1e-12);
        if n <= 5 {
            tally.check("explicit SU(N) form = expm_ch", su_explicit(&h, t, n)?.max_abs_diff(&u), 1e-10);
        }

        let m = random_complex_matrix_with(n, rng);
        let rho = char_roots_general(&m)?.spectral_radius();
        let s = Complex64::from_polar(0.9 / rho, rng.random_range(0.0..2.0 * PI));
        if let Ok((r, _)) = resolvent_poly(&m, s) {
            let mut a = ComplexMatrix::identity(n);
            a.add_scaled(-s, &m);
            tally.check("(I − sM) R = I", (&a * &r).max_abs_diff(&id), 1e-10);
        }
    }
    Ok(())
}

fn geometry_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let n = dim(rng, 3, 5);
        let h = random_traceless_hermitian_with(n, rng)?;
        let eig = eig_hermitian(&h)?.real_values();
        let r = eig.iter().map(|x| x * x).sum::<f64>().sqrt();
        let axis: Vec<f64> = eig.iter().map(|x| x / r).collect();
        let projected = project_spectrum(&simplex_vertices(n, r)?, &axis)?;
        tally.check("simplex projection = eigenvalues", multiset_distance(&projected.components, &eig), 1e-9);

        let angles: Vec<f64> = match n {
            3 => vec![rng.random_range(0.0..2.0 * PI)],
            4 => vec![rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)],
            _ => vec![
                rng.random_range(0.0..PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..2.0 * PI),
            ],
        };
        let p = AngleParams::new(n, r, angles)?;
        let ev = angles_to_spectrum(&p)?;
        let back = angles_to_spectrum(&spectrum_to_angles(&ev)?)?;
        let gap = back
            .components
            .iter()
            .zip(&ev.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        tally.check("angles ↔ spectrum roundtrip", gap, 1e-10 * r);
    }
    Ok(())
}

fn spin_suite(samples: usize, rng: &mut SplitMix64, tally: &mut Tally) -> Result<()> {
    for k in 0..samples {
        let j = Spin::from_twice((k % 8 + 1) as u32);
        let g = spin_generator(j, random_axis_with(rng))?;
        let spec = eig_hermitian(&g.matrix)?;
        tally.check(
            "spectrum {j, …, −j}",
            multiset_distance(&spec.real_values(), &j.weights()),
            1e-10,
        );
        let moments = spin_trace_moments(j, 2)?;
        tally.check(
            "tr (n̂·J)² closed form",
            (moments.moments[0] - moments.quadratic_closed_form).abs(),
            1e-10 * moments.quadratic_closed_form,
        );
        let theta = rng.random_range(-PI..PI);
        let u = expm_ch(g.matrix.matrix(), theta)?;
        let chi = character(j, Complex64::new(0.0, theta));
        tally.check("tr exp(iθ n̂·J) = character", (u.trace() - chi).norm(), 1e-9);
    }
    Ok(())
}
