//! The response function `F(t) = Σ_k exp(iλ_k t) / C'(λ_k)` and its
//! derivative stack `(−i d/dt)^p F(t)`.
//!
//! Entry `p` of the stack is the `(N−1)`-th divided difference of
//! `z ↦ z^p e^{izt}` over the eigenvalues. Well separated spectra use the
//! residue sum `Σ_k λ_k^p e^{iλ_k t} / C'(λ_k)`. When two eigenvalues are
//! closer than [`CROSSOVER_REL_GAP`] times the spectrum's scale the residue
//! denominators lose too many digits, and the divided-difference table is
//! built directly instead: nodes are grouped into tight clusters, entries
//! spanning a single cluster come from a Taylor expansion about the cluster
//! centre (which reduces to the derivative fill-in `g^{(m)}(λ)/m!` at
//! exactly repeated nodes), and everything else from the usual recursion.
//!
//! The contour form `F(t) = (1/2πi) ∮ e^{itz} / C(z) dz` is provided as an
//! independent check. The `1/2πi` normalisation is included so that the
//! quadrature reproduces the residue sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::{cluster_spectrum, magnitude_scale, Spectrum};
use crate::sun_generators::Spin;

/// Minimum eigenvalue gap, relative to [`Spectrum::scale`], for which the
/// residue sum is used.
pub const CROSSOVER_REL_GAP: f64 = 1e-6;

const TAYLOR_MAX_TERMS: usize = 200;

/// `(−i d/dt)^p F(t)` for `p = 0..=pmax` at a fixed `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseDerivs {
    t: f64,
    derivs: Vec<Complex64>,
}

impl ResponseDerivs {
    pub fn new(t: f64, derivs: Vec<Complex64>) -> Self {
        Self { t, derivs }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Entry `p` is `(−i d/dt)^p F(t)`.
    pub fn derivs(&self) -> &[Complex64] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.derivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivs.is_empty()
    }

    /// The plain derivative `d^p F / dt^p = i^p (−i d/dt)^p F`.
    pub fn d_dt(&self, p: usize) -> Complex64 {
        self.derivs[p] * i_pow(p as i64)
    }
}

/// `i^k` for any integer `k`.
pub(crate) fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `C'(λ_k) = Π_{m≠k} (λ_k − λ_m)`.
pub fn cprime(spec: &Spectrum, k: usize) -> Result<Complex64> {
    if k >= spec.len() {
        return Err(Error::invalid(format!(
            "eigenvalue index {k} out of range for a spectrum of size {}",
            spec.len()
        )));
    }
    if spec.cluster_of(k).len() > 1 {
        return Err(Error::DegenerateSpectrum { index: k });
    }
    Ok(cprime_of(spec.values(), k))
}

fn cprime_of(values: &[Complex64], k: usize) -> Complex64 {
    values
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != k)
        .map(|(_, &lm)| values[k] - lm)
        .product()
}

/// The derivative stack `(−i d/dt)^p F(t)`, `p = 0..=pmax`.
///
/// Degenerate and nearly degenerate spectra go through the confluent
/// divided-difference table; callers need no special handling.
pub fn response_derivs(spec: &Spectrum, t: f64, pmax: usize) -> Result<ResponseDerivs> {
    if !t.is_finite() {
        return Err(Error::invalid("t must be finite"));
    }
    let n = spec.len();
    if n == 0 {
        return Err(Error::invalid("empty spectrum"));
    }
    if pmax > 2 * n {
        return Err(Error::invalid(format!("pmax = {pmax} exceeds 2N = {}", 2 * n)));
    }
    let scale = spec.scale();
    let derivs = if spec.is_simple() && spec.min_gap() > CROSSOVER_REL_GAP * scale {
        residue_derivs(spec.values(), t, pmax)
    } else {
        divided_difference_derivs(spec.snapped().values(), t, pmax, CROSSOVER_REL_GAP * scale)
    };
    Ok(ResponseDerivs { t, derivs })
}

/// Residue sums `Σ_k λ_k^p e^{iλ_k t} / C'(λ_k)`. The nodes must be
/// distinct.
pub fn residue_derivs(values: &[Complex64], t: f64, pmax: usize) -> Vec<Complex64> {
    let weights: Vec<Complex64> = (0..values.len())
        .map(|k| (Complex64::new(0.0, t) * values[k]).exp() / cprime_of(values, k))
        .collect();
    (0..=pmax)
        .map(|p| {
            values
                .iter()
                .zip(&weights)
                .map(|(lambda, w)| lambda.powu(p as u32) * w)
                .sum()
        })
        .collect()
}

/// Divided differences of `z ↦ z^p e^{izt}` over `values` (repeats
/// allowed), for `p = 0..=pmax`.
///
/// Nodes within `cluster_tol` of each other (transitively) are treated as
/// one tight cluster and differenced through a Taylor expansion about the
/// cluster centre.
pub fn divided_difference_derivs(
    values: &[Complex64],
    t: f64,
    pmax: usize,
    cluster_tol: f64,
) -> Vec<Complex64> {
    let groups = cluster_spectrum(values, cluster_tol);
    let mut nodes = Vec::with_capacity(values.len());
    let mut group_of = Vec::with_capacity(values.len());
    let mut centers = Vec::with_capacity(groups.len());
    for (g, members) in groups.iter().enumerate() {
        let center = members.iter().map(|&k| values[k]).sum::<Complex64>() / members.len() as f64;
        centers.push(center);
        for &k in members {
            nodes.push(values[k]);
            group_of.push(g);
        }
    }
    (0..=pmax)
        .map(|p| divided_difference(&nodes, &group_of, &centers, t, p))
        .collect()
}

/// Top entry of the divided-difference table of `z^p e^{izt}`; `nodes` are
/// ordered so that every cluster is contiguous.
fn divided_difference(
    nodes: &[Complex64],
    group_of: &[usize],
    centers: &[Complex64],
    t: f64,
    p: usize,
) -> Complex64 {
    let n = nodes.len();
    let g = |z: Complex64| z.powu(p as u32) * (Complex64::new(0.0, t) * z).exp();
    // table[i] holds f[x_i .. x_{i+m}] for the current order m.
    let mut table: Vec<Complex64> = nodes.iter().map(|&z| g(z)).collect();
    for m in 1..n {
        for i in 0..n - m {
            let j = i + m;
            table[i] = if group_of[i] == group_of[j] {
                let c = centers[group_of[i]];
                let offsets: Vec<Complex64> = nodes[i..=j].iter().map(|&z| z - c).collect();
                taylor_divided_difference(c, &offsets, t, p)
            } else {
                (table[i + 1] - table[i]) / (nodes[j] - nodes[i])
            };
        }
    }
    table[0]
}

/// `g[c + d_0, …, c + d_m]` for `g(z) = z^p e^{izt}` and small offsets, via
/// `Σ_{k≥m} a_k h_{k−m}(d)`, where `a_k` are the Taylor coefficients of `g`
/// at `c` and `h_r` the complete homogeneous symmetric polynomials.
fn taylor_divided_difference(c: Complex64, offsets: &[Complex64], t: f64, p: usize) -> Complex64 {
    let m = offsets.len() - 1;
    let delta = offsets.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let it = Complex64::new(0.0, t);
    let e = (it * c).exp();

    // a_k = e^{ict} Σ_l C(p,l) c^{p−l} (it)^{k−l} / (k−l)!
    let taylor = |k: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for l in 0..=k.min(p) {
            if l > 0 {
                binom *= (p - l + 1) as f64 / l as f64;
            }
            let mut term = c.powu((p - l) as u32) * binom;
            for q in 1..=(k - l) {
                term *= it / q as f64;
            }
            acc += term;
        }
        acc * e
    };

    if delta == 0.0 {
        return taylor(m);
    }

    let mut rmax = 32usize;
    loop {
        let h = complete_homogeneous(offsets, rmax);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut small_run = 0;
        for r in 0..=rmax {
            let a = taylor(m + r);
            sum += a * h[r];
            let bound = a.norm() * delta.powi(r as i32);
            if r > p && bound <= 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
                small_run += 1;
                if small_run >= 2 {
                    return sum;
                }
            } else {
                small_run = 0;
            }
        }
        if rmax >= TAYLOR_MAX_TERMS {
            return sum;
        }
        rmax *= 2;
    }
}

/// `[h_0, …, h_rmax]` of the complete homogeneous symmetric polynomials,
/// via `h_q(S ∪ {x}) = h_q(S) + x·h_{q−1}(S ∪ {x})`.
fn complete_homogeneous(offsets: &[Complex64], rmax: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); rmax + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &d in offsets {
        for q in 1..=rmax {
            let lower = h[q - 1];
            h[q] += d * lower;
        }
    }
    h
}

/// Closed form of the response function for the spin-`j` spectrum
/// `{j, j−1, …, −j}`: `(2i)^{2j} / (2j)! · sin^{2j}(θ/2)`.
pub fn spin_response(j: Spin, theta: f64) -> Complex64 {
    let n = j.twice();
    let factorial: f64 = if n <= 20 {
        (1..=n as u64).product::<u64>() as f64
    } else {
        (1..=n).map(f64::from).product()
    };
    let prefactor = i_pow(n as i64) * 2f64.powi(n as i32) / factorial;
    prefactor * (theta / 2.0).sin().powi(n as i32)
}

/// Default quadrature radius `1.5·max|λ| + 1`.
pub fn default_contour_radius(spec: &Spectrum) -> f64 {
    1.5 * spec.spectral_radius() + 1.0
}

/// Trapezoidal quadrature of `(1/2πi) ∮ e^{itz} / C(z) dz` on the circle
/// `|z| = radius`, counter-clockwise.
pub fn response_contour_oracle(
    spec: &Spectrum,
    t: f64,
    radius: f64,
    npoints: usize,
) -> Result<Complex64> {
    if npoints < 64 {
        return Err(Error::invalid("contour quadrature needs at least 64 nodes"));
    }
    if !(radius > spec.spectral_radius()) {
        return Err(Error::invalid(format!(
            "contour radius {radius} does not enclose all eigenvalues (max |λ| = {})",
            spec.spectral_radius()
        )));
    }
    let it = Complex64::new(0.0, t);
    let sum: Complex64 = (0..npoints)
        .map(|j| {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / npoints as f64);
            let c: Complex64 = spec.values().iter().map(|&l| z - l).product();
            (it * z).exp() / c * z
        })
        .sum();
    Ok(sum / npoints as f64)
}

/// A length scale for comparing response stacks: `max(1, max|λ|)`.
pub fn spectrum_scale(values: &[Complex64]) -> f64 {
    magnitude_scale(values).max(1.0)
}
