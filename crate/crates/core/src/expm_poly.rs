//! `exp(itM)` as the order-`(N−1)` matrix polynomial `Σ_n M^n E_n(t)` with
//!
//! ```text
//! E_n(t) = Σ_{m=0}^{N−1−n} (−1)^m S_m (−i d/dt)^{N−1−n−m} F(t)
//! ```
//!
//! plus the resolvent polynomial of `(I − sM)^{-1}`, the unit-matrix term
//! written with trace invariants, the explicit SU(2..5) group-element
//! forms, and a scaling-and-squaring Taylor reference that shares no code
//! with the spectral route.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{sym_from_spectrum, sym_from_traces, SymmetricInvariants};
use crate::matrix::{ComplexMatrix, HermitianTraceless, HERMITIAN_TRACELESS_TOL};
use crate::response::{response_derivs, ResponseDerivs};
use crate::spectra::{char_roots_general, eig_hermitian, hermitian_eigenvalues, Spectrum};

/// The scalar coefficients `E_0..E_{N−1}` at a given `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpPolyCoeffs {
    pub t: f64,
    pub e: Vec<Complex64>,
}

/// The scalar coefficients `R_0..R_{N−1}` of the resolvent at `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventCoeffs {
    pub s: Complex64,
    pub r: Vec<Complex64>,
}

/// Exponentiation routes selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// `Σ M^n E_n(t)` from the spectrum and the response function.
    CayleyHamilton,
    /// The explicit SU(2..5) bracket forms.
    Explicit,
    /// Scaling and squaring of the Taylor series.
    Oracle,
}

pub fn expm(method: Method, m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    match method {
        Method::CayleyHamilton => expm_ch(m, t),
        Method::Oracle => Ok(expm_oracle(m, t)),
        Method::Explicit => {
            let n = m.n();
            if !(2..=5).contains(&n) {
                return Err(Error::unsupported(n, "explicit SU(N) forms exist for N = 2..5"));
            }
            let h = HermitianTraceless::new(m.clone())?;
            su_explicit(&h, t, n)
        }
    }
}

/// Evaluates `E_n(t)` exactly as the double sum is written.
pub fn exp_coeffs(inv: &SymmetricInvariants, rd: &ResponseDerivs) -> Result<ExpPolyCoeffs> {
    let n = inv.n();
    if inv.s().len() != n + 1 {
        return Err(Error::invalid("symmetric invariants must hold S_0..S_N"));
    }
    if rd.len() < n {
        return Err(Error::invalid(format!(
            "need {n} response derivatives, got {}",
            rd.len()
        )));
    }
    let s = inv.s();
    let d = rd.derivs();
    let e = (0..n)
        .map(|k| {
            (0..n - k)
                .map(|m| {
                    let term = s[m] * d[n - 1 - k - m];
                    if m % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum()
        })
        .collect();
    Ok(ExpPolyCoeffs { t: rd.t(), e })
}

/// Spectrum used by the polynomial route: Jacobi for hermitian input,
/// characteristic-polynomial roots otherwise.
pub fn matrix_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    if m.is_hermitian(HERMITIAN_TRACELESS_TOL) {
        let sym = (m + &m.adjoint()).scale(Complex64::new(0.5, 0.0));
        Ok(Spectrum::from_real(&hermitian_eigenvalues(&sym)?))
    } else {
        char_roots_general(m)
    }
}

/// `exp(itM) = Σ_{n=0}^{N−1} M^n E_n(t)`.
pub fn expm_ch(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(m.n()));
    }
    let spec = matrix_spectrum(m)?.snapped();
    expm_ch_with_spectrum(m, &spec, t)
}

/// The polynomial route with a precomputed spectrum of `m`.
pub fn expm_ch_with_spectrum(m: &ComplexMatrix, spec: &Spectrum, t: f64) -> Result<ComplexMatrix> {
    let n = m.n();
    if spec.len() != n {
        return Err(Error::invalid("spectrum size does not match the matrix"));
    }
    let inv = sym_from_spectrum(spec);
    let rd = response_derivs(spec, t, n - 1)?;
    let coeffs = exp_coeffs(&inv, &rd)?;
    Ok(assemble(&m.power_ladder(n - 1), &coeffs.e))
}

/// Exponentials of independent matrices, evaluated in parallel.
pub fn expm_ch_batch(ms: &[ComplexMatrix], t: f64) -> Vec<Result<ComplexMatrix>> {
    ms.par_iter().map(|m| expm_ch(m, t)).collect()
}

fn assemble(ladder: &[ComplexMatrix], coeffs: &[Complex64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(ladder[0].n());
    for (power, &c) in ladder.iter().zip(coeffs) {
        out.add_scaled(c, power);
    }
    out
}

/// Reference `exp(itM)` by scaling and squaring: scale `itM` by `2^{-k}`
/// until its ∞-norm is at most 1/2, sum the Taylor series until a term
/// drops below `1e-20` of the partial sum, then square `k` times.
pub fn expm_oracle(m: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let a = m.scale(Complex64::new(0.0, t));
    let norm = a.inf_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = a.scale(Complex64::new(0.5f64.powi(squarings), 0.0));

    let n = m.n();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for j in 1..200 {
        term = (&term * &a).scale(Complex64::new(1.0 / j as f64, 0.0));
        sum = &sum + &term;
        if term.max_norm() <= 1e-20 * sum.max_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `(I − sM)^{-1} = Σ_n M^n R_n(s)` with
/// `R_n(s) = s^n / det(I − sM) · Trunc_{N−1−n}[det(I − sM)]`.
///
/// `det(I − sM) = Σ_m (−s)^m S_m` is built from traces; truncating that
/// coefficient list realises the Taylor truncation.
pub fn resolvent_poly(m: &ComplexMatrix, s: Complex64) -> Result<(ComplexMatrix, ResolventCoeffs)> {
    let n = m.n();
    let inv = sym_from_traces(&m.trace_powers(n)?, n)?;
    let mut neg_s_pow = Complex64::new(1.0, 0.0);
    let terms: Vec<Complex64> = inv
        .s()
        .iter()
        .map(|&sm| {
            let term = sm * neg_s_pow;
            neg_s_pow *= -s;
            term
        })
        .collect();
    let det: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    if det.norm() <= 1e-12 * scale {
        return Err(Error::PoleProximity {
            s: format!("{s}"),
            det_abs: det.norm(),
        });
    }
    let mut partial = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, term) in terms.iter().take(n).enumerate() {
        acc += term;
        partial[k] = acc;
    }
    let r: Vec<Complex64> = (0..n)
        .map(|k| s.powu(k as u32) / det * partial[n - 1 - k])
        .collect();
    let matrix = assemble(&m.power_ladder(n - 1), &r);
    Ok((matrix, ResolventCoeffs { s, r }))
}

/// The unit-matrix coefficient written with trace invariants,
/// `(−1)^{N−1} Σ_{n=0}^{N−1} (1/n!) I_n (i d/dt)^{N−1−n} F(t)`.
///
/// Algebraically identical to `E_0` through `S_n = I_n / n!`.
pub fn unit_term(inv: &SymmetricInvariants, rd: &ResponseDerivs) -> Result<Complex64> {
    let n = inv.n();
    if rd.len() < n {
        return Err(Error::invalid(format!(
            "need {n} response derivatives, got {}",
            rd.len()
        )));
    }
    let invariants = inv.trace_invariants();
    let mut fact = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &ik) in invariants.iter().take(n).enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let p = n - 1 - k;
        // (i d/dt)^p = (−1)^p (−i d/dt)^p
        let i_ddt = if p.is_multiple_of(2) { rd.derivs()[p] } else { -rd.derivs()[p] };
        sum += ik / fact * i_ddt;
    }
    Ok(if (n - 1).is_multiple_of(2) { sum } else { -sum })
}

/// One scalar term `coeff · Π tr(H^a) · d^deriv F / dt^deriv` of an explicit
/// bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitTerm {
    pub coeff: Complex64,
    pub traces: &'static [usize],
    pub deriv: usize,
}

/// The terms multiplying `H^power` in an explicit bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBlock {
    pub power: usize,
    pub terms: &'static [ExplicitTerm],
}

const fn term(re: f64, im: f64, traces: &'static [usize], deriv: usize) -> ExplicitTerm {
    ExplicitTerm {
        coeff: Complex64::new(re, im),
        traces,
        deriv,
    }
}

const THIRD: f64 = 1.0 / 3.0;

const F: ExplicitTerm = term(1.0, 0.0, &[], 0);
const MINUS_I_DF: ExplicitTerm = term(0.0, -1.0, &[], 1);
const HALF_TR2_PLUS_D2: [ExplicitTerm; 2] = [term(-0.5, 0.0, &[2], 0), term(-1.0, 0.0, &[], 2)];
const CUBIC_BLOCK: [ExplicitTerm; 3] = [
    term(-THIRD, 0.0, &[3], 0),
    term(0.0, 0.5, &[2], 1),
    term(0.0, 1.0, &[], 3),
];

// exp(itH) = [H − i d/dt] F_2
const SU2: [PowerBlock; 2] = [
    PowerBlock { power: 1, terms: &[F] },
    PowerBlock { power: 0, terms: &[MINUS_I_DF] },
];
// exp(itH) = [H² − iH d/dt − I(½tr H² + d²/dt²)] F_3
const SU3: [PowerBlock; 3] = [
    PowerBlock { power: 2, terms: &[F] },
    PowerBlock { power: 1, terms: &[MINUS_I_DF] },
    PowerBlock { power: 0, terms: &HALF_TR2_PLUS_D2 },
];
// exp(itH) = [H³ − iH² d/dt − H(½tr H² + d²/dt²)
//             + I(−⅓tr H³ + ½i tr H² d/dt + i d³/dt³)] F_4
const SU4: [PowerBlock; 4] = [
    PowerBlock { power: 3, terms: &[F] },
    PowerBlock { power: 2, terms: &[MINUS_I_DF] },
    PowerBlock { power: 1, terms: &HALF_TR2_PLUS_D2 },
    PowerBlock { power: 0, terms: &CUBIC_BLOCK },
];
// exp(itH) = [H⁴ − iH³ d/dt − H²(½tr H² + d²/dt²)
//             + H(−⅓tr H³ + ½i tr H² d/dt + i d³/dt³)
//             + I(⅛(tr H²)² − ¼tr H⁴ + ⅓tr H³ i d/dt + ½tr H² d²/dt² + d⁴/dt⁴)] F_5
const SU5: [PowerBlock; 5] = [
    PowerBlock { power: 4, terms: &[F] },
    PowerBlock { power: 3, terms: &[MINUS_I_DF] },
    PowerBlock { power: 2, terms: &HALF_TR2_PLUS_D2 },
    PowerBlock { power: 1, terms: &CUBIC_BLOCK },
    PowerBlock {
        power: 0,
        terms: &[
            term(0.125, 0.0, &[2, 2], 0),
            term(-0.25, 0.0, &[4], 0),
            term(0.0, THIRD, &[3], 1),
            term(0.5, 0.0, &[2], 2),
            term(1.0, 0.0, &[], 4),
        ],
    },
];

/// The explicit bracket for SU(N), highest power of `H` first.
pub fn explicit_form(n: usize) -> Result<&'static [PowerBlock]> {
    match n {
        2 => Ok(&SU2),
        3 => Ok(&SU3),
        4 => Ok(&SU4),
        5 => Ok(&SU5),
        _ => Err(Error::unsupported(n, "explicit SU(N) forms exist for N = 2..5")),
    }
}

/// Scalar multiplying `H^power`, given traces `tr(H^a)` (index `a − 1`).
fn evaluate_block(block: &PowerBlock, traces: &[Complex64], rd: &ResponseDerivs) -> Complex64 {
    block
        .terms
        .iter()
        .map(|t| {
            let tr: Complex64 = t.traces.iter().map(|&a| traces[a - 1]).product();
            t.coeff * tr * rd.d_dt(t.deriv)
        })
        .sum()
}

fn su_ingredients(h: &HermitianTraceless, t: f64) -> Result<(Vec<Complex64>, ResponseDerivs)> {
    let n = h.n();
    let spec = eig_hermitian(h)?.snapped();
    let rd = response_derivs(&spec, t, n - 1)?;
    let traces = h.matrix().trace_powers(n.max(4))?;
    Ok((traces, rd))
}

/// Evaluates the explicit SU(N) bracket, `N = 2..5`, wiring each `d/dt`
/// power to the response derivative stack of `H`.
pub fn su_explicit(h: &HermitianTraceless, t: f64, n: usize) -> Result<ComplexMatrix> {
    let form = explicit_form(n)?;
    if h.n() != n {
        return Err(Error::invalid(format!(
            "generator is {0}x{0} but SU({n}) was requested",
            h.n()
        )));
    }
    let (traces, rd) = su_ingredients(h, t)?;
    let ladder = h.matrix().power_ladder(n - 1);
    let mut out = ComplexMatrix::zeros(n);
    for block in form {
        out.add_scaled(evaluate_block(block, &traces, &rd), &ladder[block.power]);
    }
    Ok(out)
}

/// Outcome of the SU(N−1) ↔ SU(N) hierarchy comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub n: usize,
    /// The explicit SU(N) bracket minus its unit term, with every power of
    /// `H` lowered by one, has the same terms as the SU(N−1) bracket.
    pub structural_match: bool,
    /// Largest difference between the two brackets evaluated on `F_N`.
    pub explicit_deviation: f64,
    /// Same comparison for the general coefficients `E_n` at ranks `N` and
    /// `N−1` with the trace invariants held fixed.
    pub general_deviation: f64,
    /// Largest difference between the explicit bracket and the general
    /// coefficients at rank `N`, relative to their magnitude.
    pub explicit_vs_general: f64,
    pub max_deviation: f64,
}

/// Checks that the rank-`N` coefficient structure, with the unit term
/// dropped and matrix powers decremented, reproduces the rank-`(N−1)`
/// structure applied to `F_N`.
pub fn sun_hierarchy_check(h: &HermitianTraceless, t: f64) -> Result<HierarchyReport> {
    let n = h.n();
    if !(3..=5).contains(&n) {
        return Err(Error::unsupported(n, "the hierarchy check covers N = 3..5"));
    }
    let upper = explicit_form(n)?;
    let lower = explicit_form(n - 1)?;
    let (traces, rd) = su_ingredients(h, t)?;

    let mut structural_match = true;
    let mut explicit_deviation = 0.0f64;
    for block in upper.iter().filter(|b| b.power >= 1) {
        match lower.iter().find(|b| b.power == block.power - 1) {
            Some(partner) => {
                structural_match &= partner.terms == block.terms;
                let diff = evaluate_block(block, &traces, &rd) - evaluate_block(partner, &traces, &rd);
                explicit_deviation = explicit_deviation.max(diff.norm());
            }
            None => structural_match = false,
        }
    }

    let inv = sym_from_traces(&traces[..n], n)?;
    let upper_e = exp_coeffs(&inv, &rd)?;
    let truncated = sym_from_traces(&traces[..n - 1], n - 1)?;
    let lower_e = exp_coeffs(&truncated, &rd)?;
    let general_deviation = (1..n)
        .map(|k| (upper_e.e[k] - lower_e.e[k - 1]).norm())
        .fold(0.0, f64::max);

    let scale = upper_e.e.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let explicit_vs_general = upper
        .iter()
        .map(|b| (evaluate_block(b, &traces, &rd) - upper_e.e[b.power]).norm() / scale)
        .fold(0.0, f64::max);

    let max_deviation = explicit_deviation.max(general_deviation).max(explicit_vs_general);
    Ok(HierarchyReport {
        n,
        structural_match,
        explicit_deviation,
        general_deviation,
        explicit_vs_general,
        max_deviation,
    })
}
