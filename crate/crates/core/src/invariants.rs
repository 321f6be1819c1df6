//! Elementary symmetric polynomials `S_0..S_N` of a spectrum.
//!
//! They are available two independent ways: directly from eigenvalues,
//! and from the power sums `tr(M^p)` without knowing any eigenvalue. The
//! trace route evaluates both the banded determinant
//!
//! ```text
//!         | tr M        m-1     0     ...  0   |
//!         | tr M²       tr M    m-2   ...  0   |
//! I_m = det| ...                              |,   S_m = I_m / m!
//!         | tr M^{m-1}  ...           tr M  1  |
//!         | tr M^m      ...           tr M² tr M|
//! ```
//!
//! and Newton's recurrence `m·S_m = Σ_{k=1}^{m} (−1)^{k−1} S_{m−k} tr(M^k)`,
//! and insists that they agree.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::lu_determinant;
use crate::spectra::Spectrum;

/// Agreement required between the determinant and recurrence routes,
/// relative to the magnitude of the recurrence terms.
pub const TRACE_ROUTE_AGREEMENT: f64 = 1e-10;

/// Span of `|S_m|` (in decades) beyond which a warning is logged.
const GROWTH_WARN_DECADES: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricInvariants {
    n: usize,
    s: Vec<Complex64>,
    power_sums: Vec<Complex64>,
}

impl SymmetricInvariants {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `S_0..S_N`, with `S_0 = 1`.
    pub fn s(&self) -> &[Complex64] {
        &self.s
    }

    /// `tr(M^p)` for `p = 1..N`.
    pub fn power_sums(&self) -> &[Complex64] {
        &self.power_sums
    }

    /// The trace invariants `I_m = m!·S_m`, `m = 0..N`.
    pub fn trace_invariants(&self) -> Vec<Complex64> {
        let mut fact = 1.0;
        self.s
            .iter()
            .enumerate()
            .map(|(m, &s)| {
                if m > 0 {
                    fact *= m as f64;
                }
                s * fact
            })
            .collect()
    }

    /// `Σ_m t^m S_m`, which equals `det(I + tM)`.
    pub fn generating_function(&self, t: Complex64) -> Complex64 {
        self.s.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &s| acc * t + s)
    }
}

/// `S_m` from eigenvalues, by expanding `Π_k (1 + tλ_k)` one factor at a
/// time.
pub fn sym_from_spectrum(spec: &Spectrum) -> SymmetricInvariants {
    sym_from_values(spec.values())
}

pub(crate) fn sym_from_values(values: &[Complex64]) -> SymmetricInvariants {
    let n = values.len();
    let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
    s[0] = Complex64::new(1.0, 0.0);
    for (k, &lambda) in values.iter().enumerate() {
        for m in (1..=k + 1).rev() {
            let prev = s[m - 1];
            s[m] += lambda * prev;
        }
    }
    let power_sums = (1..=n)
        .map(|p| values.iter().map(|z| z.powu(p as u32)).sum())
        .collect();
    warn_on_growth(&s);
    SymmetricInvariants { n, s, power_sums }
}

/// `S_m` from power sums `tr(M^p)`, `p = 1..` (at least `n` of them).
///
/// Returns the Newton-recurrence values after checking them against the
/// literal determinant form; disagreement beyond
/// [`TRACE_ROUTE_AGREEMENT`] is reported as a numerical failure.
pub fn sym_from_traces(power_sums: &[Complex64], n: usize) -> Result<SymmetricInvariants> {
    if power_sums.len() < n {
        return Err(Error::invalid(format!(
            "need {n} power sums, got {}",
            power_sums.len()
        )));
    }
    let (s, term_scale) = newton_recurrence(power_sums, n);

    let mut fact = 1.0;
    for m in 1..=n {
        fact *= m as f64;
        let via_det = trace_determinant(power_sums, m) / fact;
        let diff = (via_det - s[m]).norm();
        let allowed = TRACE_ROUTE_AGREEMENT * s[m].norm().max(term_scale[m]);
        if diff > allowed {
            return Err(Error::numerical(
                format!("determinant and recurrence forms of S_{m} disagree"),
                diff,
            ));
        }
    }
    warn_on_growth(&s);
    Ok(SymmetricInvariants {
        n,
        s,
        power_sums: power_sums[..n].to_vec(),
    })
}

/// Newton's identities. Also returns, for each `m`, the magnitude
/// `Σ_k |S_{m−k}||tr M^k| / m` of the summed terms.
fn newton_recurrence(power_sums: &[Complex64], n: usize) -> (Vec<Complex64>, Vec<f64>) {
    let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut scale = vec![0.0; n + 1];
    s[0] = Complex64::new(1.0, 0.0);
    scale[0] = 1.0;
    for m in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for k in 1..=m {
            let term = s[m - k] * power_sums[k - 1];
            mag += term.norm();
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s[m] = acc / m as f64;
        scale[m] = mag / m as f64;
    }
    (s, scale)
}

/// The banded `m × m` determinant `I_m` built from power sums.
pub fn trace_determinant(power_sums: &[Complex64], m: usize) -> Complex64 {
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..=i {
            a[i * m + j] = power_sums[i - j];
        }
        if i + 1 < m {
            a[i * m + i + 1] = Complex64::new((m - 1 - i) as f64, 0.0);
        }
    }
    lu_determinant(m, a)
}

/// The closed forms of `I_0..I_4` in terms of traces:
///
/// * `I_0 = 1`, `I_1 = tr H`, `I_2 = (tr H)² − tr H²`
/// * `I_3 = (tr H)³ − 3 tr H tr H² + 2 tr H³`
/// * `I_4 = (tr H)⁴ − 6 (tr H)² tr H² + 8 tr H tr H³ + 3 (tr H²)² − 6 tr H⁴`
pub fn explicit_low_invariants(power_sums: &[Complex64], m: usize) -> Result<Complex64> {
    if m > 4 {
        return Err(Error::unsupported(m, "closed-form trace invariants exist for m <= 4"));
    }
    if power_sums.len() < m {
        return Err(Error::invalid(format!("I_{m} needs {m} power sums")));
    }
    let p = |k: usize| power_sums[k - 1];
    Ok(match m {
        0 => Complex64::new(1.0, 0.0),
        1 => p(1),
        2 => p(1) * p(1) - p(2),
        3 => p(1).powu(3) - 3.0 * p(1) * p(2) + 2.0 * p(3),
        _ => {
            p(1).powu(4) - 6.0 * p(1) * p(1) * p(2) + 8.0 * p(1) * p(3) + 3.0 * p(2) * p(2)
                - 6.0 * p(4)
        }
    })
}

/// Coefficients of `C(z) = det(zI − M) = Σ_m (−1)^m S_m z^{N−m}`, highest
/// power first; the leading coefficient is exactly 1.
pub fn charpoly_coeffs(inv: &SymmetricInvariants) -> Vec<Complex64> {
    inv.s
        .iter()
        .enumerate()
        .map(|(m, &s)| if m % 2 == 0 { s } else { -s })
        .collect()
}

/// Entries at roundoff level, `|S_m| ≤ 64ε·C(n,m)·ρ^m` with
/// `ρ = max_m |S_m|^{1/m}`, count as zero.
fn warn_on_growth(s: &[Complex64]) {
    let n = s.len().saturating_sub(1);
    let rho = (1..=n)
        .map(|m| s[m].norm().powf(1.0 / m as f64))
        .fold(0.0, f64::max);
    let mut binom = 1.0;
    let mut mags = Vec::with_capacity(s.len());
    for (m, z) in s.iter().enumerate() {
        if m > 0 {
            binom *= (n + 1 - m) as f64 / m as f64;
        }
        let floor = 64.0 * f64::EPSILON * binom * rho.powi(m as i32);
        if z.norm() > floor {
            mags.push(z.norm());
        }
    }
    let (lo, hi) = mags
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if hi > 0.0 && (hi / lo).log10() > GROWTH_WARN_DECADES {
        log::warn!(
            "symmetric invariants span {:.1} orders of magnitude; polynomial coefficients mix disparate scales",
            (hi / lo).log10()
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn reals(v: &[Complex64]) -> Vec<f64> {
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn from_spectrum_examples() {
        let inv = sym_from_spectrum(&Spectrum::from_real(&[1.0, 2.0, 3.0]));
        assert_eq!(reals(inv.s()), vec![1.0, 6.0, 11.0, 6.0]);
        assert_eq!(reals(inv.power_sums()), vec![6.0, 14.0, 36.0]);
        let inv = sym_from_spectrum(&Spectrum::from_real(&[1.0, -1.0]));
        assert_eq!(reals(inv.s()), vec![1.0, 0.0, -1.0]);
        let inv = sym_from_spectrum(&Spectrum::from_real(&[0.0; 4]));
        assert_eq!(reals(inv.s()), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn from_traces_examples() {
        let inv = sym_from_traces(&[c(6.0), c(14.0), c(36.0)], 3).unwrap();
        for (got, want) in inv.s().iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!((got - c(want)).norm() < 1e-13);
        }
        let inv = sym_from_traces(&[c(0.0), c(2.0)], 2).unwrap();
        assert_eq!(reals(inv.s()), vec![1.0, 0.0, -1.0]);
        let inv = sym_from_traces(&[c(0.0); 3], 3).unwrap();
        assert_eq!(reals(inv.s()), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(sym_from_traces(&[c(1.0)], 2).is_err());
    }

    #[test]
    fn traceless_input_gives_exact_zero_s1() {
        let inv = sym_from_traces(&[c(0.0), c(5.0), c(-1.5), c(9.0)], 4).unwrap();
        assert_eq!(inv.s()[1], c(0.0));
    }

    #[test]
    fn determinant_form_low_orders() {
        let ps = [c(6.0), c(14.0), c(36.0)];
        assert_eq!(trace_determinant(&ps, 0), c(1.0));
        assert!((trace_determinant(&ps, 2) - c(36.0 - 14.0)).norm() < 1e-12);
        assert!((trace_determinant(&ps, 3) - c(36.0)).norm() < 1e-12);
    }

    #[test]
    fn explicit_invariant_examples() {
        let r2 = 2.5;
        let ps = [c(0.0), c(r2), c(0.7), c(4.1)];
        assert_eq!(explicit_low_invariants(&ps, 2).unwrap(), c(-r2));
        assert_eq!(explicit_low_invariants(&[c(6.0), c(14.0), c(36.0)], 3).unwrap(), c(36.0));
        assert_eq!(explicit_low_invariants(&[], 0).unwrap(), c(1.0));
        assert!(matches!(
            explicit_low_invariants(&ps, 5),
            Err(Error::UnsupportedOrder { order: 5, .. })
        ));
    }

    #[test]
    fn charpoly_examples() {
        let inv = sym_from_spectrum(&Spectrum::from_real(&[1.0, 2.0, 3.0]));
        assert_eq!(reals(&charpoly_coeffs(&inv)), vec![1.0, -6.0, 11.0, -6.0]);
        let inv = sym_from_traces(&[c(0.0), c(2.0)], 2).unwrap();
        assert_eq!(reals(&charpoly_coeffs(&inv)), vec![1.0, 0.0, -1.0]);
        let inv = sym_from_traces(&[c(0.0), c(0.0)], 2).unwrap();
        assert_eq!(reals(&charpoly_coeffs(&inv)), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn trace_invariants_are_factorial_multiples() {
        let inv = sym_from_spectrum(&Spectrum::from_real(&[1.0, 2.0, 3.0]));
        assert_eq!(reals(&inv.trace_invariants()), vec![1.0, 6.0, 22.0, 36.0]);
    }
}
