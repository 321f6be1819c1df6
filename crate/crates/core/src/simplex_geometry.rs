//! Eigenvalues of traceless hermitian generators as projections of the
//! vertices of an `(N−1)`-simplex, and hyperspherical angles for N = 3, 4, 5.
//!
//! Angle order is `(θ)` for N=3, `(θ, φ)` for N=4 and `(ψ, θ, φ)` for N=5.
//! Components are in the order of the parameterization, not sorted.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

const GRAM_REL_TOL: f64 = 1e-12;
const HYPERPLANE_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;
const GIMBAL_REL: f64 = 1e-14;
const SU4_FORWARD_TOL: f64 = 1e-9;
const SU4_SNAP: f64 = 1e-12;
const SU4_SNAP_ACCEPT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexVertexSet {
    pub n: usize,
    pub r: f64,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleParams {
    pub n: usize,
    pub r: f64,
    pub angles: Vec<f64>,
    /// Set when some angles are undetermined and were returned as 0.
    pub gimbal: bool,
}

impl AngleParams {
    pub fn new(n: usize, r: f64, angles: Vec<f64>) -> Result<Self> {
        if !(3..=5).contains(&n) {
            return Err(Error::unsupported(n, "angle parameterizations exist for N = 3, 4, 5"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("radius must be finite and non-negative"));
        }
        if angles.len() != n - 2 {
            return Err(Error::invalid(format!("N = {n} takes {} angles", n - 2)));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(Self {
            n,
            r,
            angles,
            gimbal: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueVector {
    pub components: Vec<f64>,
}

impl EigenvalueVector {
    /// Checks `Σλ = 0` to `1e-12·r`.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 || components.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("need at least two finite eigenvalues"));
        }
        let ev = Self { components };
        let sum: f64 = ev.components.iter().sum();
        if sum.abs() > GRAM_REL_TOL * ev.radius().max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(format!("eigenvalues sum to {sum:e}, not zero")));
        }
        Ok(ev)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// `r = |λ|`, so that `r² = tr H²`.
    pub fn radius(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn power_sum(&self, k: i32) -> f64 {
        self.components.iter().map(|x| x.powi(k)).sum()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.components.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Largest componentwise gap between two spectra compared as sorted
/// multisets; infinite when the lengths differ.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `f_k = (ê_k − n⃗/N)·r·√(N/(N−1))`.
pub fn simplex_vertices(n: usize, r: f64) -> Result<SimplexVertexSet> {
    if n < 2 {
        return Err(Error::invalid("a simplex needs n >= 2"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("radius must be positive"));
    }
    let nf = n as f64;
    let scale = r * (nf / (nf - 1.0)).sqrt();
    let vertices = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let e = if i == k { 1.0 } else { 0.0 };
                    (e - 1.0 / nf) * scale
                })
                .collect()
        })
        .collect();
    Ok(SimplexVertexSet { n, r, vertices })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `λ_k = √((N−1)/N)·f_k·ê`.
pub fn project_spectrum(vs: &SimplexVertexSet, axis: &[f64]) -> Result<EigenvalueVector> {
    if axis.len() != vs.n {
        return Err(Error::invalid("axis dimension does not match the simplex"));
    }
    let along_n: f64 = axis.iter().sum();
    if along_n.abs() > HYPERPLANE_TOL {
        return Err(Error::invalid("axis is not in the traceless hyperplane"));
    }
    let norm = dot(axis, axis).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("axis has norm {norm}, expected 1")));
    }
    let nf = vs.n as f64;
    let pre = ((nf - 1.0) / nf).sqrt();
    Ok(EigenvalueVector {
        components: vs.vertices.iter().map(|f| pre * dot(f, axis)).collect(),
    })
}

/// The closed-form component formulas.
pub fn angles_to_spectrum(p: &AngleParams) -> Result<EigenvalueVector> {
    let r = p.r;
    let components = match (p.n, p.angles.as_slice()) {
        (3, &[theta]) => (1..=3)
            .map(|k| (2.0f64 / 3.0).sqrt() * r * (theta + TAU * k as f64 / 3.0).cos())
            .collect(),
        (4, &[theta, phi]) => {
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            vec![
                r * (-FRAC_1_SQRT_2 * sp * st - 0.5 * ct),
                r * (FRAC_1_SQRT_2 * sp * st - 0.5 * ct),
                r * (-FRAC_1_SQRT_2 * cp * st + 0.5 * ct),
                r * (FRAC_1_SQRT_2 * cp * st + 0.5 * ct),
            ]
        }
        (5, &[psi, theta, phi]) => {
            let (ss, cs) = psi.sin_cos();
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let s5 = 2.0 * 5f64.sqrt();
            let s3 = 2.0 * 3f64.sqrt();
            let s6 = 6f64.sqrt();
            vec![
                r * (-4.0 / s5 * cs),
                r * (cs / s5 - 3.0 / s3 * ct * ss),
                r * (cs / s5 + ct * ss / s3 - 2.0 / s6 * cp * st * ss),
                r * (cs / s5 + ct * ss / s3 + cp * st * ss / s6 - FRAC_1_SQRT_2 * st * sp * ss),
                r * (cs / s5 + ct * ss / s3 + cp * st * ss / s6 + FRAC_1_SQRT_2 * st * sp * ss),
            ]
        }
        (3..=5, _) => return Err(Error::invalid("wrong number of angles")),
        (n, _) => return Err(Error::unsupported(n, "angle parameterizations exist for N = 3, 4, 5")),
    };
    Ok(EigenvalueVector { components })
}

/// Orthonormal basis of the traceless hyperplane in which the angles are
/// standard spherical coordinates, in angle order.
///
/// For N = 4 this fixes the tetrahedron axis: with coordinates along
/// `u₁ = (−1,1,0,0)/√2`, `u₂ = (0,0,−1,1)/√2`, `u₃ = (−1,−1,1,1)/2` the
/// eigenvalue direction is `(sinθ sinφ, sinθ cosφ, cosθ)`.
pub fn hyperplane_basis(n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::invalid("need n >= 2"));
    }
    let h = FRAC_1_SQRT_2;
    Ok(match n {
        3 => {
            let a = (2.0f64 / 3.0).sqrt();
            vec![
                (1..=3).map(|k| a * (TAU * k as f64 / 3.0).cos()).collect(),
                (1..=3).map(|k| -a * (TAU * k as f64 / 3.0).sin()).collect(),
            ]
        }
        4 => vec![
            vec![-h, h, 0.0, 0.0],
            vec![0.0, 0.0, -h, h],
            vec![-0.5, -0.5, 0.5, 0.5],
        ],
        _ => (0..n - 1)
            .map(|j| {
                let tail = (n - 1 - j) as f64;
                let norm = (tail * tail + tail).sqrt();
                (0..n)
                    .map(|i| match i.cmp(&j) {
                        std::cmp::Ordering::Less => 0.0,
                        std::cmp::Ordering::Equal => -tail / norm,
                        std::cmp::Ordering::Greater => 1.0 / norm,
                    })
                    .collect()
            })
            .collect(),
    })
}

/// Closed-form invariants of a parameterized spectrum. Entries without a
/// closed form for the given N are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleInvariants {
    pub tr_h2: f64,
    pub tr_h3: f64,
    pub tr_h4: Option<f64>,
    pub det: Option<f64>,
}

pub fn invariants_from_angles(p: &AngleParams) -> Result<AngleInvariants> {
    let r = p.r;
    let r2 = r * r;
    match (p.n, p.angles.as_slice()) {
        (3, &[theta]) => {
            let det = r.powi(3) * (3.0 * theta).cos() / (3.0 * 6f64.sqrt());
            Ok(AngleInvariants {
                tr_h2: r2,
                tr_h3: 3.0 * det,
                tr_h4: Some(r2 * r2 / 2.0),
                det: Some(det),
            })
        }
        (4, &[theta, phi]) => {
            let st = theta.sin();
            let (sp, cp) = phi.sin_cos();
            let s2 = st * st;
            let tr_h3 = 0.75 * r.powi(3) * st * (2.0 * theta).sin() * (2.0 * phi).cos();
            let det = r2 * r2 / 16.0 * (1.0 + (2.0 * sp * sp - 3.0) * s2) * (1.0 + (2.0 * cp * cp - 3.0) * s2);
            Ok(AngleInvariants {
                tr_h2: r2,
                tr_h3,
                tr_h4: Some((r2 * r2 - 8.0 * det) / 2.0),
                det: Some(det),
            })
        }
        (5, &[psi, theta, phi]) => {
            let (ss, cs) = psi.sin_cos();
            let (st, ct) = theta.sin_cos();
            let cp = phi.cos();
            let tr_h3 = r.powi(3)
                * (3.0 / 5f64.sqrt() * cs * (0.5 - cs * cs)
                    + 5.0 / (2.0 * 3f64.sqrt()) * ss.powi(3) * ct * (0.6 - ct * ct)
                    + 2.0 * 2f64.sqrt() / 3f64.sqrt() * ss.powi(3) * st.powi(3) * cp * (0.75 - cp * cp));
            Ok(AngleInvariants {
                tr_h2: r2,
                tr_h3,
                tr_h4: None,
                det: None,
            })
        }
        (3..=5, _) => Err(Error::invalid("wrong number of angles")),
        (n, _) => Err(Error::unsupported(n, "angle parameterizations exist for N = 3, 4, 5")),
    }
}

/// `θ = arccos(3√6·det/r³)/3`, in `[0, π/3]`.
pub fn su3_angle_from_invariants(r2: f64, det: f64) -> Result<f64> {
    if !(r2 > 0.0 && r2.is_finite() && det.is_finite()) {
        return Err(Error::invalid("need finite tr H² > 0 and finite det"));
    }
    let x = 3.0 * 6f64.sqrt() * det / r2.powf(1.5);
    if x.abs() > 1.0 + 1e-12 {
        return Err(Error::InconsistentInvariants(format!(
            "|3√6 det / r³| = {} exceeds 1",
            x.abs()
        )));
    }
    Ok(x.clamp(-1.0, 1.0).acos() / 3.0)
}

/// Residuals of the SU(4) relations in `c = cosθ`, `v = cos 2φ`, with
/// `a = tr H³/r³` and `b = 16 det/r⁴`, and their Jacobian.
fn su4_system(c: f64, v: f64, a: f64, b: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let u = 1.0 - c * c;
    let g1 = 1.5 * u * c * v - a;
    let g2 = (1.0 - 2.0 * u).powi(2) - u * u * v * v - b;
    let dg2_du = -4.0 * (1.0 - 2.0 * u) - 2.0 * u * v * v;
    let jac = [
        [1.5 * v * (1.0 - 3.0 * c * c), 1.5 * u * c],
        [dg2_du * (-2.0 * c), -2.0 * u * u * v],
    ];
    ([g1, g2], jac)
}

fn su4_newton(mut c: f64, mut v: f64, a: f64, b: f64) -> (f64, f64, f64) {
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    let (mut g, mut jac) = su4_system(c, v, a, b);
    let mut mu = 1e-3;
    for _ in 0..200 {
        if norm(g) < 1e-15 {
            break;
        }
        // Levenberg step: (JᵀJ + μI) δ = −Jᵀg
        let jtj = [
            [jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0], jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1]],
            [0.0, jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1]],
        ];
        let jtg = [
            jac[0][0] * g[0] + jac[1][0] * g[1],
            jac[0][1] * g[0] + jac[1][1] * g[1],
        ];
        let mut improved = false;
        for _ in 0..30 {
            let m00 = jtj[0][0] + mu;
            let m11 = jtj[1][1] + mu;
            let m01 = jtj[0][1];
            let det = m00 * m11 - m01 * m01;
            if det == 0.0 {
                mu *= 10.0;
                continue;
            }
            let dc = -(m11 * jtg[0] - m01 * jtg[1]) / det;
            let dv = -(m00 * jtg[1] - m01 * jtg[0]) / det;
            let nc = (c + dc).clamp(-1.0, 1.0);
            let nv = (v + dv).clamp(0.0, 1.0);
            let (ng, njac) = su4_system(nc, nv, a, b);
            if norm(ng) < norm(g) {
                c = nc;
                v = nv;
                g = ng;
                jac = njac;
                mu = (mu / 10.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (c, v, norm(g))
}

/// Recovers `(θ, φ)` with `θ ∈ [0, π]`, `φ ∈ [0, π/4]` from `tr H²`,
/// `tr H³`, `tr H⁴` by a damped Newton solve from an 8×8 grid of starts.
/// A root is accepted only if the forward map reproduces `tr H³` and
/// `tr H⁴` to `1e-9` relative.
pub fn su4_angles_from_invariants(tr_h2: f64, tr_h3: f64, tr_h4: f64) -> Result<AngleParams> {
    if ![tr_h2, tr_h3, tr_h4].iter().all(|x| x.is_finite()) || tr_h2 < 0.0 {
        return Err(Error::invalid("need finite invariants with tr H² >= 0"));
    }
    if tr_h2 == 0.0 {
        if tr_h3 == 0.0 && tr_h4 == 0.0 {
            let mut p = AngleParams::new(4, 0.0, vec![0.0, 0.0])?;
            p.gimbal = true;
            return Ok(p);
        }
        return Err(Error::InconsistentInvariants("tr H² = 0 forces all traces to vanish".into()));
    }
    let r = tr_h2.sqrt();
    let r3 = r * tr_h2;
    let r4 = tr_h2 * tr_h2;
    let det = (r4 - 2.0 * tr_h4) / 8.0;
    let a = tr_h3 / r3;
    let b = 16.0 * det / r4;

    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..8 {
        for j in 0..8 {
            let c0 = -1.0 + 2.0 * i as f64 / 7.0;
            let v0 = j as f64 / 7.0;
            let (c, v, res) = su4_newton(c0, v0, a, b);
            if best.is_none_or(|(_, _, r)| res < r) {
                best = Some((c, v, res));
            }
        }
    }
    let (c, v, _) = best.expect("grid is non-empty");
    // Boundary roots (degenerate spectra) are only reached to about √ε;
    // snapping them is kept when it does not worsen the forward residual.
    let snap = |x: f64, lo: f64, hi: f64| {
        if x - lo < SU4_SNAP {
            lo
        } else if hi - x < SU4_SNAP {
            hi
        } else {
            x
        }
    };
    let evaluate = |c: f64, v: f64| -> Result<(AngleParams, f64)> {
        let theta = c.acos();
        let mut params = AngleParams::new(4, r, vec![theta, v.acos() / 2.0])?;
        params.gimbal = theta.sin() <= GIMBAL_REL;
        let ev = angles_to_spectrum(&params)?;
        let d3 = (ev.power_sum(3) - tr_h3).abs() / r3;
        let d4 = (ev.power_sum(4) - tr_h4).abs() / r4;
        Ok((params, d3.max(d4)))
    };
    let snapped = evaluate(snap(c, -1.0, 1.0), snap(v, 0.0, 1.0))?;
    let (params, residual) = if snapped.1 <= SU4_SNAP_ACCEPT {
        snapped
    } else {
        let raw = evaluate(c, v)?;
        if raw.1 < snapped.1 {
            raw
        } else {
            snapped
        }
    };
    if residual > SU4_FORWARD_TOL {
        return Err(Error::InconsistentInvariants(format!(
            "no real SU(4) spectrum matches these traces (forward residual {residual:e})"
        )));
    }
    Ok(params)
}

/// Inverts the closed-form component formulas by projecting onto
/// [`hyperplane_basis`] and reading off spherical coordinates with
/// `atan2`. Returns `θ ∈ [0, 2π)` for N=3, `θ ∈ [0, π]`, `φ ∈ [0, 2π)` for
/// N=4 and `ψ, θ ∈ [0, π]`, `φ ∈ [0, 2π)` for N=5. Undetermined angles at
/// gimbal points are 0 and flagged.
pub fn spectrum_to_angles(ev: &EigenvalueVector) -> Result<AngleParams> {
    let n = ev.n();
    if !(3..=5).contains(&n) {
        return Err(Error::unsupported(n, "angle parameterizations exist for N = 3, 4, 5"));
    }
    let r = ev.radius();
    let sum: f64 = ev.components.iter().sum();
    if sum.abs() > GRAM_REL_TOL * r.max(f64::MIN_POSITIVE) {
        return Err(Error::invalid("eigenvalues are not traceless"));
    }
    if r == 0.0 {
        let mut p = AngleParams::new(n, 0.0, vec![0.0; n - 2])?;
        p.gimbal = true;
        return Ok(p);
    }
    let x: Vec<f64> = hyperplane_basis(n)?
        .iter()
        .map(|b| dot(b, &ev.components))
        .collect();
    let wrap = |a: f64| if a < 0.0 { a + TAU } else { a };
    let tiny = GIMBAL_REL * r;

    let (angles, gimbal) = match n {
        3 => (vec![wrap(x[1].atan2(x[0]))], false),
        4 => {
            let rho = x[0].hypot(x[1]);
            let theta = rho.atan2(x[2]);
            if rho <= tiny {
                (vec![theta, 0.0], true)
            } else {
                (vec![theta, wrap(x[0].atan2(x[1]))], false)
            }
        }
        _ => {
            let rho_phi = x[2].hypot(x[3]);
            let rho_theta = x[1].hypot(rho_phi);
            let psi = rho_theta.atan2(x[0]);
            if rho_theta <= tiny {
                (vec![psi, 0.0, 0.0], true)
            } else if rho_phi <= tiny {
                (vec![psi, rho_phi.atan2(x[1]), 0.0], true)
            } else {
                (vec![psi, rho_phi.atan2(x[1]), wrap(x[3].atan2(x[2]))], false)
            }
        }
    };
    let mut p = AngleParams::new(n, r, angles)?;
    p.gimbal = gimbal;
    Ok(p)
}

/// CSV of the simplex vertices and the axis, both in ambient coordinates
/// `e1..eN` and in [`hyperplane_basis`] coordinates `h1..h(N−1)`.
pub fn geometry_csv(vs: &SimplexVertexSet, axis: &[f64]) -> Result<String> {
    let n = vs.n;
    if axis.len() != n {
        return Err(Error::invalid("axis dimension does not match the simplex"));
    }
    let basis = hyperplane_basis(n)?;
    let mut out = String::from("kind,index");
    for i in 1..=n {
        let _ = write!(out, ",e{i}");
    }
    for i in 1..n {
        let _ = write!(out, ",h{i}");
    }
    out.push('\n');
    let mut row = |kind: &str, index: usize, v: &[f64]| {
        let _ = write!(out, "{kind},{index}");
        for x in v {
            let _ = write!(out, ",{x:.16e}");
        }
        for b in &basis {
            let _ = write!(out, ",{:.16e}", dot(b, v));
        }
        out.push('\n');
    };
    for (k, f) in vs.vertices.iter().enumerate() {
        row("vertex", k + 1, f);
    }
    row("axis", 0, axis);
    Ok(out)
}

/// The canonical N=3 angle `θ mod 2π/3`, which labels the spectrum up to
/// a cyclic relabelling of its components.
pub fn su3_canonical(theta: f64) -> f64 {
    theta.rem_euclid(TAU / 3.0)
}
