//! Test generators: spin-j rotation generators `n̂·J` embedded in SU(2j+1),
//! with their closed-form spectral checks, and seeded random traceless
//! hermitian matrices.
//!
//! Random draws use the SplitMix64 generator (Steele, Lea & Flood 2014,
//! as implemented by `rand_xoshiro::SplitMix64`) seeded with the caller's
//! 64-bit seed, and standard normal deviates from `rand_distr`. Each entry
//! of the auxiliary matrix `A` is `(x + iy)/√2` with `x, y` standard
//! normal; the generator is `H = (A + A†)/2 − (tr/n)·I`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{charpoly_coeffs, sym_from_traces};
use crate::matrix::{ComplexMatrix, HermitianTraceless};

/// A non-negative half-integer, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Spin(u32);

impl Spin {
    pub fn from_twice(twice_j: u32) -> Self {
        Spin(twice_j)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Representation dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Quadratic Casimir `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// The spectrum `{j, j−1, …, −j}` of `n̂·J`.
    pub fn weights(self) -> Vec<f64> {
        let j = self.value();
        (0..self.dim()).map(|k| j - k as f64).collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    /// Accepts `"3/2"`, `"1.5"` or `"2"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("'{s}' is not a non-negative half-integer"));
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(Spin(2 * num)),
                "2" => Ok(Spin(num)),
                _ => Err(bad()),
            };
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * x;
        if !(twice >= 0.0) || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(bad());
        }
        Ok(Spin(twice as u32))
    }
}

/// The generator `n̂·J` of rotations about `axis` in the spin-`j`
/// representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGenerator {
    pub j: Spin,
    pub axis: [f64; 3],
    pub matrix: HermitianTraceless,
}

/// `J_x`, `J_y`, `J_z` in the basis `|j, m⟩`, `m = j, j−1, …, −j`, with the
/// Condon–Shortley phase convention (real, non-negative ladder elements).
pub fn angular_momentum(j: Spin) -> [ComplexMatrix; 3] {
    let dim = j.dim();
    let jv = j.value();
    let zero = Complex64::new(0.0, 0.0);
    // (J+)[a-1][a] = sqrt(j(j+1) − m(m+1)) with m = j − a
    let raise = |row: usize, col: usize| -> f64 {
        if col >= 1 && row == col - 1 {
            let m = jv - col as f64;
            (jv * (jv + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    };
    let jx = ComplexMatrix::from_fn(dim, |r, c| Complex64::new(0.5 * (raise(r, c) + raise(c, r)), 0.0));
    let jy = ComplexMatrix::from_fn(dim, |r, c| Complex64::new(0.0, -0.5 * (raise(r, c) - raise(c, r))));
    let jz = ComplexMatrix::from_fn(dim, |r, c| {
        if r == c {
            Complex64::new(jv - r as f64, 0.0)
        } else {
            zero
        }
    });
    [jx, jy, jz]
}

pub fn spin_generator(j: Spin, axis: [f64; 3]) -> Result<SpinGenerator> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::invalid(format!("rotation axis must be a unit vector (norm {norm})")));
    }
    let [jx, jy, jz] = angular_momentum(j);
    let mut m = jx.scale(Complex64::new(axis[0], 0.0));
    m.add_scaled(Complex64::new(axis[1], 0.0), &jy);
    m.add_scaled(Complex64::new(axis[2], 0.0), &jz);
    let matrix = HermitianTraceless::project(&m)?;
    Ok(SpinGenerator { j, axis, matrix })
}

/// Coefficientwise comparison of the characteristic polynomial of `n̂·J`
/// with `Π_{k=0}^{2j} (λ − (j − k))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharpolyReport {
    pub j: Spin,
    /// `C(λ)` coefficients from traces, highest power first.
    pub from_traces: Vec<f64>,
    /// Coefficients of the product of linear factors.
    pub from_weights: Vec<f64>,
    /// Largest coefficient difference relative to the largest coefficient.
    pub max_rel_deviation: f64,
    pub passed: bool,
}

/// The product `Π(λ − (j−k))` equals `Γ(λ+j+1)/Γ(λ−j)`; only the finite
/// product is evaluated. A tilted axis `(1, 2, 2)/3` is used so the
/// generator is not diagonal.
pub fn spin_charpoly_check(j: Spin) -> Result<CharpolyReport> {
    if j.twice() > 20 {
        return Err(Error::unsupported(j.dim(), "spin characteristic-polynomial check supports 2j <= 20"));
    }
    let generator = spin_generator(j, [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0])?;
    let m = generator.matrix.matrix();
    let inv = sym_from_traces(&m.trace_powers(m.n())?, m.n())?;
    let from_traces: Vec<f64> = charpoly_coeffs(&inv).iter().map(|z| z.re).collect();

    let mut from_weights = vec![1.0];
    for w in j.weights() {
        // multiply by (λ − w)
        let mut next = vec![0.0; from_weights.len() + 1];
        for (k, &a) in from_weights.iter().enumerate() {
            next[k] += a;
            next[k + 1] -= w * a;
        }
        from_weights = next;
    }
    let scale = from_weights.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let max_rel_deviation = from_traces
        .iter()
        .zip(&from_weights)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    Ok(CharpolyReport {
        j,
        from_traces,
        from_weights,
        max_rel_deviation,
        passed: max_rel_deviation <= 1e-9,
    })
}

/// The character `sinh((2j+1)x/2) / sinh(x/2) = Σ_{k=0}^{2j} e^{x(j−k)}`.
///
/// Near the zeros of `sinh(x/2)` the finite sum is used instead.
pub fn character(j: Spin, x: Complex64) -> Complex64 {
    if x.norm() < 1e-8 {
        return Complex64::new(j.dim() as f64, 0.0);
    }
    let denom = (x / 2.0).sinh();
    if denom.norm() < 1e-6 {
        return j.weights().iter().map(|&w| (x * w).exp()).sum();
    }
    (x * (j.dim() as f64) / 2.0).sinh() / denom
}

/// Even trace moments `tr[(n̂·J)^{2k}]`, `k = 1..=kmax`, with the two
/// closed-form checks in terms of the Casimir `c = j(j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMoments {
    pub j: Spin,
    /// `moments[k-1] = Σ_m m^{2k}`.
    pub moments: Vec<f64>,
    /// `c(2j+1)/3`.
    pub quadratic_closed_form: f64,
    /// `24·(2j+1)·c(3c − 1)/360`, from the `x⁴` term of the character.
    pub quartic_closed_form: f64,
}

pub fn spin_trace_moments(j: Spin, kmax: usize) -> Result<TraceMoments> {
    if j.twice() > 20 {
        return Err(Error::unsupported(j.dim(), "trace moments support 2j <= 20"));
    }
    if kmax > 5 {
        return Err(Error::unsupported(kmax, "trace moments support k <= 5"));
    }
    let weights = j.weights();
    let moments = (1..=kmax)
        .map(|k| weights.iter().map(|w| w.powi(2 * k as i32)).sum())
        .collect();
    let c = j.casimir();
    let dim = j.dim() as f64;
    Ok(TraceMoments {
        j,
        moments,
        quadratic_closed_form: c * dim / 3.0,
        quartic_closed_form: 24.0 * dim * c * (3.0 * c - 1.0) / 360.0,
    })
}

/// A seeded random traceless hermitian matrix.
pub fn random_traceless_hermitian(n: usize, seed: u64) -> Result<HermitianTraceless> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    random_traceless_hermitian_with(n, &mut rng)
}

/// As [`random_traceless_hermitian`], drawing from a caller-held generator.
pub fn random_traceless_hermitian_with<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<HermitianTraceless> {
    if n < 2 {
        return Err(Error::invalid("random generators need n >= 2"));
    }
    let a = random_complex_matrix_with(n, rng);
    let herm = &a + &a.adjoint();
    HermitianTraceless::project(&herm.scale(Complex64::new(0.5, 0.0)))
}

/// A matrix of independent standard complex normal entries.
pub fn random_complex_matrix_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

/// A seeded random unit 3-vector.
pub fn random_axis_with<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}
