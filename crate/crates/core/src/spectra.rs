//! Eigenvalues: a cyclic Jacobi solver for hermitian matrices, a
//! characteristic-polynomial root finder for general matrices, and
//! clustering of (near-)degenerate eigenvalues.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{charpoly_coeffs, sym_from_traces};
use crate::matrix::{ComplexMatrix, HermitianTraceless};

/// Relative clustering tolerance, applied to [`Spectrum::scale`].
pub const DEFAULT_CLUSTER_REL_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 50;
const JACOBI_REL_TOL: f64 = 1e-14;
const ABERTH_MAX_ITERS: usize = 1000;

/// Eigenvalues sorted by descending real part, then descending imaginary
/// part, together with a partition of their indices into clusters of
/// numerically coincident values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<Complex64>,
    clusters: Vec<Vec<usize>>,
}

impl Spectrum {
    /// Sorts `values` and clusters them with the default tolerance.
    pub fn new(values: Vec<Complex64>) -> Self {
        let tol = DEFAULT_CLUSTER_REL_TOL * magnitude_scale(&values);
        Self::with_tolerance(values, tol)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Sorts `values` and clusters them with an absolute tolerance.
    pub fn with_tolerance(mut values: Vec<Complex64>, tol: f64) -> Self {
        sort_descending(&mut values);
        let clusters = cluster_spectrum(&values, tol);
        Self { values, clusters }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every cluster is a singleton.
    pub fn is_simple(&self) -> bool {
        self.clusters.iter().all(|c| c.len() == 1)
    }

    /// The cluster containing index `k`.
    pub fn cluster_of(&self, k: usize) -> &[usize] {
        self.clusters
            .iter()
            .find(|c| c.contains(&k))
            .map(Vec::as_slice)
            .expect("clusters partition the index set")
    }

    /// Largest pairwise distance between eigenvalues.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (a, za) in self.values.iter().enumerate() {
            for zb in &self.values[a + 1..] {
                d = d.max((za - zb).norm());
            }
        }
        d
    }

    /// Smallest pairwise distance, `+inf` for a single eigenvalue.
    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for (a, za) in self.values.iter().enumerate() {
            for zb in &self.values[a + 1..] {
                g = g.min((za - zb).norm());
            }
        }
        g
    }

    /// Length scale used by the relative tolerances:
    /// `max(diameter, max|λ|)`.
    pub fn scale(&self) -> f64 {
        magnitude_scale(&self.values)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real parts, for spectra of hermitian matrices.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// The same spectrum with each cluster replaced by its mean, repeated
    /// with multiplicity.
    pub fn snapped(&self) -> Spectrum {
        let mut values = self.values.clone();
        for cluster in &self.clusters {
            if cluster.len() > 1 {
                let mean = cluster.iter().map(|&k| self.values[k]).sum::<Complex64>()
                    / cluster.len() as f64;
                for &k in cluster {
                    values[k] = mean;
                }
            }
        }
        Spectrum {
            values,
            clusters: self.clusters.clone(),
        }
    }
}

pub(crate) fn magnitude_scale(values: &[Complex64]) -> f64 {
    let mut scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (a, za) in values.iter().enumerate() {
        for zb in &values[a + 1..] {
            scale = scale.max((za - zb).norm());
        }
    }
    scale
}

fn sort_descending(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Partitions indices of `values` into the transitive closure of
/// `|λ_a − λ_b| ≤ tol`. Groups are returned sorted, ordered by their
/// smallest index.
pub fn cluster_spectrum(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            if (values[a] - values[b]).norm() <= tol {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Real spectrum of a traceless hermitian matrix.
pub fn eig_hermitian(h: &HermitianTraceless) -> Result<Spectrum> {
    let values = hermitian_eigenvalues(h.matrix())?;
    let norm = h.matrix().frobenius_norm();
    let sum: f64 = values.iter().sum();
    if sum.abs() > 1e-10 * norm {
        return Err(Error::numerical("eigenvalues of a traceless matrix do not sum to zero", sum));
    }
    Ok(Spectrum::from_real(&values))
}

/// Eigenvalues of any hermitian matrix by cyclic complex Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm is at most
/// `1e-14·‖H‖_F`, within a budget of 50 sweeps.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    let mut a = m.clone();
    let norm = a.frobenius_norm();
    let target = JACOBI_REL_TOL * norm;
    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::numerical(
                format!("Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"),
                off,
            ));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
        off = off_norm(&a);
        sweeps += 1;
    }
    Ok((0..n).map(|i| a[(i, i)].re).collect())
}

/// One two-sided rotation `A ← G† A G` annihilating `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let b_abs = b.norm();
    if b_abs == 0.0 {
        return;
    }
    let phase = b / b_abs; // e^{iα}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b_abs);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iα}) · [[c, s], [-s, c]]
    let ph = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = ph * -s;
    let g_qq = ph * c;

    let n = a.n();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Eigenvalues of a general matrix as roots of its characteristic
/// polynomial, whose coefficients come from traces of matrix powers.
///
/// Accuracy degrades with dimension; sizes above 16 are not supported.
/// Roots within `√ε` (relative) of each other are clustered, since that is
/// the attainable accuracy for a double root.
pub fn char_roots_general(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.n();
    if n > 16 {
        return Err(Error::unsupported(n, "characteristic-polynomial roots support n <= 16"));
    }
    let power_sums = m.trace_powers(n)?;
    let inv = sym_from_traces(&power_sums, n)?;
    let coeffs = charpoly_coeffs(&inv);
    let mut roots = polynomial_roots(&coeffs)?;
    let scale = magnitude_scale(&roots);
    let tol = (DEFAULT_CLUSTER_REL_TOL * scale).max(4.0 * f64::EPSILON.sqrt() * scale);
    for cluster in cluster_spectrum(&roots, tol) {
        if cluster.len() > 1 {
            let mean = cluster.iter().map(|&k| roots[k]).sum::<Complex64>() / cluster.len() as f64;
            let centre = refine_cluster_centre(&coeffs, cluster.len(), mean, tol);
            for &k in &cluster {
                roots[k] = centre;
            }
        }
    }
    Ok(Spectrum::with_tolerance(roots, tol))
}

/// A `k`-fold cluster of roots of `p` is located far more accurately by the
/// nearby simple root of `p^{(k−1)}` than by the mean of the individually
/// ill-conditioned roots. Falls back to `start` if Newton wanders off.
fn refine_cluster_centre(coeffs: &[Complex64], k: usize, start: Complex64, tol: f64) -> Complex64 {
    let mut d: Vec<Complex64> = coeffs.to_vec();
    for _ in 1..k {
        let deg = d.len() - 1;
        d = d[..deg]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (deg - i) as f64)
            .collect();
    }
    let mut z = start;
    for _ in 0..50 {
        let (p, dp, _) = horner(&d, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if z.is_nan() || (z - start).norm() > tol {
        start
    } else {
        z
    }
}

/// Horner evaluation of `p(z)`, `p'(z)` and the modulus bound `Σ|c_k||z|^k`
/// for coefficients in descending order.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = coeffs[0];
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = coeffs[0].norm();
    let za = z.norm();
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * za + c.norm();
    }
    (p, dp, bound)
}

/// All roots of a monic polynomial (descending coefficients) by
/// Aberth–Ehrlich simultaneous iteration, each polished by one Newton step.
pub(crate) fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut poly: Vec<Complex64> = coeffs.to_vec();
    let mut roots = Vec::with_capacity(poly.len().saturating_sub(1));
    while poly.len() > 1 && *poly.last().unwrap() == zero {
        poly.pop();
        roots.push(zero);
    }
    let deg = poly.len() - 1;
    match deg {
        0 => return Ok(roots),
        1 => {
            roots.push(-poly[1] / poly[0]);
            return Ok(roots);
        }
        _ => {}
    }

    let center = -poly[1] / (poly[0] * deg as f64);
    let radius = poly[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| (c / poly[0]).norm().powf(1.0 / (k + 1) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            center + Complex64::from_polar(radius, angle)
        })
        .collect();
    let mut done = vec![false; deg];

    for _ in 0..ABERTH_MAX_ITERS {
        if done.iter().all(|&d| d) {
            break;
        }
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner(&poly, z[i]);
            if p.norm() <= 8.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == zero {
                        zero
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            }
        }
    }

    // Polish: one Newton step, kept only if it reduces the residual.
    for zi in z.iter_mut() {
        let (p, dp, _) = horner(&poly, *zi);
        if dp != zero {
            let cand = *zi - p / dp;
            let (pc, _, _) = horner(&poly, cand);
            if pc.norm() < p.norm() {
                *zi = cand;
            }
        }
    }

    let max_coeff = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let worst = z
        .iter()
        .map(|&zi| horner(&poly, zi).0.norm())
        .fold(0.0, f64::max);
    if !(worst <= 1e-8 * max_coeff) {
        return Err(Error::numerical("Aberth iteration stagnated", worst));
    }
    roots.extend(z);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn herm(m: ComplexMatrix) -> HermitianTraceless {
        HermitianTraceless::new(m).unwrap()
    }

    #[test]
    fn jacobi_diagonal_and_sigma_x() {
        let s = eig_hermitian(&herm(ComplexMatrix::from_real_diagonal(&[1.0, -1.0]))).unwrap();
        assert_eq!(s.real_values(), vec![1.0, -1.0]);

        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = eig_hermitian(&herm(sx)).unwrap();
        let v = s.real_values();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_degenerate_pair_is_clustered() {
        let s = eig_hermitian(&herm(ComplexMatrix::from_real_diagonal(&[-1.0, 2.0, -1.0]))).unwrap();
        assert_eq!(s.real_values(), vec![2.0, -1.0, -1.0]);
        assert_eq!(s.clusters(), &[vec![0], vec![1, 2]]);
    }

    #[test]
    fn jacobi_complex_hermitian_2x2() {
        // [[a, b], [b*, -a]] has eigenvalues ±sqrt(a² + |b|²).
        let b = Complex64::new(0.3, -0.4);
        let m = ComplexMatrix::new(2, vec![c(1.2), b, b.conj(), c(-1.2)]).unwrap();
        let s = eig_hermitian(&herm(m)).unwrap();
        let expected = (1.2f64 * 1.2 + 0.25).sqrt();
        assert!((s.real_values()[0] - expected).abs() < 1e-14);
        assert!((s.real_values()[1] + expected).abs() < 1e-14);
    }

    #[test]
    fn general_roots_examples() {
        let s = char_roots_general(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])).unwrap();
        for (got, want) in s.values().iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - c(want)).norm() < 1e-12);
        }

        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = char_roots_general(&nil).unwrap();
        assert_eq!(s.values(), &[c(0.0), c(0.0)]);
        assert_eq!(s.clusters(), &[vec![0, 1]]);

        // companion matrix of z³ − 6z² + 11z − 6
        let comp = ComplexMatrix::from_real_rows(&[
            &[6.0, -11.0, 6.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
        ]);
        let s = char_roots_general(&comp).unwrap();
        for (got, want) in s.values().iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - c(want)).norm() < 1e-10, "{got} vs {want}");
        }
        assert!(s.is_simple());
    }

    #[test]
    fn general_roots_complex_pair() {
        // rotation generator [[0, -1], [1, 0]] has eigenvalues ±i
        let m = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let s = char_roots_general(&m).unwrap();
        assert!((s.values()[0] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((s.values()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_roots_cluster() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let s = char_roots_general(&m).unwrap();
        assert_eq!(s.clusters().len(), 1);
        let snapped = s.snapped();
        for v in snapped.values() {
            assert!((v - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn cluster_examples() {
        let v = [c(1.0), c(1.0 + 1e-13), c(-2.0)];
        assert_eq!(cluster_spectrum(&v, 1e-10), vec![vec![0, 1], vec![2]]);
        let v = [c(1.0), c(2.0), c(3.0)];
        assert_eq!(cluster_spectrum(&v, 0.0), vec![vec![0], vec![1], vec![2]]);
        let v = [c(0.0); 3];
        assert_eq!(cluster_spectrum(&v, 1e-10), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn clustering_is_transitive() {
        let v = [c(0.0), c(0.6), c(1.2), c(5.0)];
        assert_eq!(cluster_spectrum(&v, 0.7), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn sorting_tie_breaks_on_imaginary_part() {
        let s = Spectrum::new(vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 1.0),
        ]);
        assert_eq!(
            s.values(),
            &[Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)]
        );
    }
}
