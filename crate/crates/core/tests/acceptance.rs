//! Acceptance criteria. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cayley_expm::bench::{draw_seed, run_bench, BenchConfig};
use cayley_expm::expm_poly::{exp_coeffs, expm_ch, expm_oracle, resolvent_poly, su_explicit, unit_term};
use cayley_expm::invariants::{sym_from_spectrum, sym_from_traces, trace_determinant};
use cayley_expm::response::{
    divided_difference_derivs, residue_derivs, response_contour_oracle, response_derivs, spin_response,
};
use cayley_expm::simplex_geometry::{
    angles_to_spectrum, invariants_from_angles, multiset_distance, project_spectrum, simplex_vertices,
    spectrum_to_angles, su4_angles_from_invariants, AngleParams,
};
use cayley_expm::spectra::{char_roots_general, eig_hermitian, hermitian_eigenvalues};
use cayley_expm::sun_generators::{
    character, random_axis_with, random_complex_matrix_with, random_traceless_hermitian, spin_generator,
    Spin,
};
use cayley_expm::{Complex64, ComplexMatrix, HermitianTraceless, Spectrum};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const SEED: u64 = 20_240_601;

const C1_REL: f64 = 1e-9;
const C1_RUNTIME_S: f64 = 30.0;
const C1_DRAWS: usize = 500;
const C1_TIMES: [f64; 3] = [0.1, 1.0, 5.0];
const C2_TOL: f64 = 1e-10;
const C2_DRAWS: usize = 200;
const C3_REL: f64 = 1e-12;
const C4_REL: f64 = 1e-8;
const C4_GF_REL: f64 = 1e-9;
const C4_DRAWS: usize = 1000;
const C5_TOL: f64 = 1e-10;
const C5_PAIRS: usize = 100;
const C5_POLE_DISTANCE: f64 = 0.1;
const C6_CONTOUR_TOL: f64 = 1e-9;
const C6_NODES: usize = 512;
const C6_RADIUS: f64 = 1.25;
const C6_GAPS: [f64; 5] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
const C6_CONTINUITY_FACTOR: f64 = 10.0;
const C7_SPECTRUM_TOL: f64 = 1e-10;
const C7_TRACE_TOL: f64 = 1e-10;
const C7_CHARACTER_TOL: f64 = 1e-12;
const C7_RESPONSE_TOL: f64 = 1e-10;
const C7_GROUP_TOL: f64 = 1e-9;
const C7_AXES: usize = 3;
const C8_GRAM_TOL: f64 = 1e-12;
const C8_PROJECTION_TOL: f64 = 1e-9;
const C8_VIETE_TOL: f64 = 1e-12;
const C8_FORMULA_TOL: f64 = 1e-11;
const C8_ROUNDTRIP_TOL: f64 = 1e-10;
const C8_INVERSE_TOL: f64 = 1e-9;
const C8_DRAWS: usize = 500;
const C8_TRIPLES: usize = 200;
const C9_UNITARY_TOL: f64 = 1e-10;
const C9_DET_TOL: f64 = 1e-9;
const C10_GATE: f64 = 1e-9;

/// Records `error / tolerance` for every check.
#[derive(Default)]
struct Tally {
    checks: usize,
    worst: f64,
    worst_name: String,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, name: &str, err: f64, tol: f64) {
        self.checks += 1;
        let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
        if ratio > 1.0 {
            self.failures += 1;
        }
        if ratio > self.worst || self.worst_name.is_empty() {
            self.worst = ratio;
            self.worst_name = name.to_string();
        }
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { f64::INFINITY }, 1.0);
    }

    fn note(&mut self, text: String) {
        self.notes.push(text);
    }
}

type Criterion = (&'static str, fn(&mut Tally) -> Result<(), String>);

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rng(tag: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(SEED ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn identity_defect(u: &ComplexMatrix) -> (f64, f64) {
    let id = ComplexMatrix::identity(u.n());
    ((u * &u.adjoint()).max_abs_diff(&id), (u.determinant() - 1.0).norm())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

fn hermitian_draws(n: usize, count: usize) -> Result<Vec<HermitianTraceless>, String> {
    (0..count)
        .map(|i| random_traceless_hermitian(n, draw_seed(SEED, n, i)).map_err(fail))
        .collect()
}

fn separated_spectrum(n: usize, min_gap: f64, r: &mut SplitMix64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        if (0..n).all(|a| (a + 1..n).all(|b| (v[a] - v[b]).abs() >= min_gap)) {
            return v;
        }
    }
}

fn oracle_equivalence(tally: &mut Tally) -> Result<(), String> {
    let start = Instant::now();
    for n in 2..=8 {
        for h in hermitian_draws(n, C1_DRAWS)? {
            let rho = eig_hermitian(&h).map_err(fail)?.spectral_radius();
            for t in C1_TIMES {
                let u = expm_ch(h.matrix(), t).map_err(fail)?;
                let dev = u.max_abs_diff(&expm_oracle(h.matrix(), t));
                tally.check("expm_ch vs Taylor reference", dev, C1_REL * (t.abs() * rho).exp());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    tally.check("runtime", elapsed, C1_RUNTIME_S);
    tally.note(format!("{:.2} s for {} exponentials", elapsed, 7 * C1_DRAWS * C1_TIMES.len()));
    Ok(())
}

fn explicit_draws() -> Result<Vec<(HermitianTraceless, f64)>, String> {
    let mut r = rng(2);
    let mut out = Vec::new();
    for n in 2..=5 {
        for h in hermitian_draws(n, C2_DRAWS)? {
            out.push((h, r.random_range(-5.0..5.0)));
        }
    }
    Ok(out)
}

fn explicit_equivalence(tally: &mut Tally) -> Result<(), String> {
    for (h, t) in explicit_draws()? {
        let explicit = su_explicit(&h, t, h.n()).map_err(fail)?;
        let general = expm_ch(h.matrix(), t).map_err(fail)?;
        tally.check("explicit SU(N) form vs expm_ch", explicit.max_abs_diff(&general), C2_TOL);
    }
    Ok(())
}

fn unit_term_identity(tally: &mut Tally) -> Result<(), String> {
    for (h, t) in explicit_draws()? {
        let n = h.n();
        let inv = sym_from_traces(&h.matrix().trace_powers(n).map_err(fail)?, n).map_err(fail)?;
        let spec = eig_hermitian(&h).map_err(fail)?.snapped();
        let rd = response_derivs(&spec, t, n - 1).map_err(fail)?;
        let e0 = exp_coeffs(&inv, &rd).map_err(fail)?.e[0];
        let u0 = unit_term(&inv, &rd).map_err(fail)?;
        tally.check("unit term vs E_0", rel(u0, e0), C3_REL);
    }
    Ok(())
}

fn invariant_double_computation(tally: &mut Tally) -> Result<(), String> {
    let mut r = rng(4);
    for i in 0..C4_DRAWS {
        let n = 2 + i % 7;
        let a = random_complex_matrix_with(n, &mut r);
        let herm = (&a + &a.adjoint()).scale(Complex64::new(0.5, 0.0));
        let ps = herm.trace_powers(n).map_err(fail)?;
        let newton = sym_from_traces(&ps, n).map_err(fail)?;
        let eig = hermitian_eigenvalues(&herm).map_err(fail)?;
        let from_spec = sym_from_spectrum(&Spectrum::from_real(&eig));
        let mut fact = 1.0;
        for m in 1..=n {
            fact *= m as f64;
            let det_form = trace_determinant(&ps, m) / fact;
            tally.check("determinant form vs Newton", rel(det_form, newton.s()[m]), C4_REL);
            tally.check("determinant form vs spectrum", rel(det_form, from_spec.s()[m]), C4_REL);
        }
        for _ in 0..10 {
            let t = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let mut shifted = ComplexMatrix::identity(n);
            shifted.add_scaled(t, &herm);
            let det = shifted.determinant();
            tally.check(
                "generating function vs det(I + tM)",
                rel(newton.generating_function(t), det),
                C4_GF_REL,
            );
        }
    }
    Ok(())
}

fn resolvent_identity(tally: &mut Tally) -> Result<(), String> {
    let mut r = rng(5);
    let mut done = 0;
    while done < C5_PAIRS {
        let n = 2 + done % 7;
        let m = random_complex_matrix_with(n, &mut r);
        let spec = char_roots_general(&m).map_err(fail)?;
        let rho = spec.spectral_radius();
        let s = Complex64::from_polar(r.random_range(0.0..2.0) / rho, r.random_range(0.0..2.0 * PI));
        let pole_distance = spec
            .values()
            .iter()
            .map(|l| (s - l.inv()).norm())
            .fold(f64::INFINITY, f64::min);
        if pole_distance < C5_POLE_DISTANCE / rho {
            continue;
        }
        let (res, _) = resolvent_poly(&m, s).map_err(fail)?;
        let mut a = ComplexMatrix::identity(n);
        a.add_scaled(-s, &m);
        tally.check("(I − sM)·R(s) vs I", (&a * &res).max_abs_diff(&ComplexMatrix::identity(n)), C5_TOL);
        done += 1;
    }
    Ok(())
}

fn response_cross_checks(tally: &mut Tally) -> Result<(), String> {
    let mut r = rng(6);
    for i in 0..500 {
        let n = 2 + i % 5;
        let spec = Spectrum::from_real(&separated_spectrum(n, 0.05, &mut r));
        let t = r.random_range(-10.0..10.0);
        let residue = response_derivs(&spec, t, 0).map_err(fail)?.derivs()[0];
        let contour = response_contour_oracle(&spec, t, C6_RADIUS, C6_NODES).map_err(fail)?;
        tally.check("residue sum vs contour quadrature", (residue - contour).norm(), C6_CONTOUR_TOL);
    }
    for gap in C6_GAPS {
        for _ in 0..100 {
            let a = r.random_range(-1.0..1.0);
            let t = r.random_range(-5.0..5.0);
            let near = [a, a + gap, a - 1.5, a + 1.7].map(|x| Complex64::new(x, 0.0));
            let merged = [a + gap / 2.0, a + gap / 2.0, a - 1.5, a + 1.7].map(|x| Complex64::new(x, 0.0));
            let spec = Spectrum::new(near.to_vec());
            let bound = C6_CONTINUITY_FACTOR * gap * spec.scale();
            let max_diff = |x: &[Complex64], y: &[Complex64]| {
                x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
            };
            let limit = divided_difference_derivs(&merged, t, 3, 0.0);
            let generic = residue_derivs(&near, t, 3);
            let confluent = divided_difference_derivs(&near, t, 3, 2.0 * gap);
            let dispatched = response_derivs(&spec, t, 3).map_err(fail)?;
            tally.check("generic vs confluent on the same nodes", max_diff(&generic, &confluent), bound);
            tally.check("dispatched stack vs degenerate limit", max_diff(dispatched.derivs(), &limit), bound);
        }
    }
    Ok(())
}

fn spin_suite(tally: &mut Tally) -> Result<(), String> {
    let mut r = rng(7);
    for twice in 1..=8u32 {
        let j = Spin::from_twice(twice);
        let weights = j.weights();
        for _ in 0..C7_AXES {
            let g = spin_generator(j, random_axis_with(&mut r)).map_err(fail)?;
            let m = g.matrix.matrix();
            let spec = eig_hermitian(&g.matrix).map_err(fail)?;
            tally.check("spectrum {j, …, −j}", multiset_distance(&spec.real_values(), &weights), C7_SPECTRUM_TOL);
            let quad = j.casimir() * j.dim() as f64 / 3.0;
            let tr2 = m.trace_powers(2).map_err(fail)?[1];
            tally.check("tr (n̂·J)² vs j(j+1)(2j+1)/3", (tr2 - quad).norm() / quad, C7_TRACE_TOL);

            let theta = r.random_range(-PI..PI);
            let x = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-PI..PI));
            let sum: Complex64 = weights.iter().map(|&w| (x * w).exp()).sum();
            tally.check("character vs Σ e^{x m}", rel(character(j, x), sum), C7_CHARACTER_TOL);

            let nodes: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
            let residue = residue_derivs(&nodes, theta, 0)[0];
            tally.check("closed-form response vs residue sum", (spin_response(j, theta) - residue).norm(), C7_RESPONSE_TOL);

            let u = expm_ch(m, theta).map_err(fail)?;
            let (unitary, _) = identity_defect(&u);
            tally.check("exp(iθ n̂·J) unitary", unitary, C7_GROUP_TOL);
            let chi = character(j, Complex64::new(0.0, theta));
            tally.check("tr exp(iθ n̂·J) vs character", (u.trace() - chi).norm(), C7_GROUP_TOL);
        }
    }
    Ok(())
}

fn draw_angles(n: usize, r: &mut SplitMix64) -> Vec<f64> {
    // away from the gimbal sets sin θ = 0 and sin ψ = 0
    match n {
        3 => vec![r.random_range(0.0..2.0 * PI)],
        4 => vec![r.random_range(0.01..PI - 0.01), r.random_range(0.0..2.0 * PI)],
        _ => vec![
            r.random_range(0.01..PI - 0.01),
            r.random_range(0.01..PI - 0.01),
            r.random_range(0.0..2.0 * PI),
        ],
    }
}

/// Largest angle difference; the last angle is periodic.
fn angle_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| {
            let d = (x - y).abs();
            if k == a.len() - 1 {
                d.min(2.0 * PI - d)
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

fn geometry_suite(tally: &mut Tally) -> Result<(), String> {
    let mut r = rng(8);
    for n in 2..=12 {
        let rad = r.random_range(0.1..10.0);
        let vs = simplex_vertices(n, rad).map_err(fail)?;
        let r2 = rad * rad;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = vs.vertices[a].iter().zip(&vs.vertices[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { r2 } else { r2 / (1.0 - n as f64) };
                tally.check("Gram relation", (dot - want).abs() / r2, C8_GRAM_TOL);
            }
        }
        let sum_norm = (0..n)
            .map(|i| vs.vertices.iter().map(|f| f[i]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        tally.check("vertex sum", sum_norm / rad, C8_GRAM_TOL);
    }

    for n in 3..=5 {
        for h in hermitian_draws(n, C8_DRAWS)? {
            let eig = eig_hermitian(&h).map_err(fail)?.real_values();
            let rad = eig.iter().map(|x| x * x).sum::<f64>().sqrt();
            let axis: Vec<f64> = eig.iter().map(|x| x / rad).collect();
            let projected = project_spectrum(&simplex_vertices(n, rad).map_err(fail)?, &axis).map_err(fail)?;
            tally.check("simplex projection vs eigensolver", multiset_distance(&projected.components, &eig), C8_PROJECTION_TOL);
        }
    }

    for _ in 0..C8_DRAWS {
        let rad = r.random_range(0.1..10.0);
        let theta = r.random_range(0.0..2.0 * PI);
        let ev = angles_to_spectrum(&AngleParams::new(3, rad, vec![theta]).map_err(fail)?).map_err(fail)?;
        let prod: f64 = ev.components.iter().product();
        let unit = rad.powi(3) / (3.0 * 6f64.sqrt());
        tally.check("SU(3) product of roots", (prod - unit * (3.0 * theta).cos()).abs() / unit, C8_VIETE_TOL);
    }

    for n in 3..=5 {
        for _ in 0..C8_DRAWS {
            let rad = r.random_range(0.1..10.0);
            let p = AngleParams::new(n, rad, draw_angles(n, &mut r)).map_err(fail)?;
            let ev = angles_to_spectrum(&p).map_err(fail)?;
            let inv = invariants_from_angles(&p).map_err(fail)?;
            if n >= 4 {
                tally.check("closed-form tr H³", (inv.tr_h3 - ev.power_sum(3)).abs() / rad.powi(3), C8_FORMULA_TOL);
                tally.check("closed-form tr H²", (inv.tr_h2 - ev.power_sum(2)).abs() / rad.powi(2), C8_FORMULA_TOL);
            }
            if let (4, Some(det), Some(tr4)) = (n, inv.det, inv.tr_h4) {
                let prod: f64 = ev.components.iter().product();
                tally.check("closed-form det", (det - prod).abs() / rad.powi(4), C8_FORMULA_TOL);
                tally.check("closed-form tr H⁴", (tr4 - ev.power_sum(4)).abs() / rad.powi(4), C8_FORMULA_TOL);
            }
            let back = spectrum_to_angles(&ev).map_err(fail)?;
            tally.flag("roundtrip off gimbal set", !back.gimbal);
            tally.check("angles → spectrum → angles", angle_gap(&p.angles, &back.angles), C8_ROUNDTRIP_TOL);
            let ev2 = angles_to_spectrum(&back).map_err(fail)?;
            let gap = ev.components.iter().zip(&ev2.components).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            tally.check("spectrum → angles → spectrum", gap / rad, C8_ROUNDTRIP_TOL);
        }
    }

    for h in hermitian_draws(4, C8_TRIPLES)? {
        let ps = h.matrix().trace_powers(4).map_err(fail)?;
        let (t2, t3, t4) = (ps[1].re, ps[2].re, ps[3].re);
        let p = su4_angles_from_invariants(t2, t3, t4).map_err(fail)?;
        let ev = angles_to_spectrum(&p).map_err(fail)?;
        let residual = ((ev.power_sum(3) - t3).abs() / t2.powf(1.5)).max((ev.power_sum(4) - t4).abs() / (t2 * t2));
        tally.check("SU(4) inverse forward residual", residual, C8_INVERSE_TOL);
    }
    Ok(())
}

fn group_membership(tally: &mut Tally) -> Result<(), String> {
    let record = |tally: &mut Tally, what: &str, u: &ComplexMatrix| {
        let (unitary, det) = identity_defect(u);
        tally.check(&format!("{what}: UU† = I"), unitary, C9_UNITARY_TOL);
        tally.check(&format!("{what}: det U = 1"), det, C9_DET_TOL);
    };
    for n in 2..=8 {
        for h in hermitian_draws(n, C1_DRAWS)? {
            for t in C1_TIMES {
                record(tally, "expm_ch", &expm_ch(h.matrix(), t).map_err(fail)?);
                record(tally, "oracle", &expm_oracle(h.matrix(), t));
            }
        }
    }
    for (h, t) in explicit_draws()? {
        record(tally, "explicit form", &su_explicit(&h, t, h.n()).map_err(fail)?);
    }
    let mut r = rng(9);
    for twice in 1..=8u32 {
        let g = spin_generator(Spin::from_twice(twice), random_axis_with(&mut r)).map_err(fail)?;
        record(tally, "spin", &expm_ch(g.matrix.matrix(), r.random_range(-PI..PI)).map_err(fail)?);
    }
    Ok(())
}

fn benchmark_integrity(tally: &mut Tally) -> Result<(), String> {
    let rows = run_bench(&BenchConfig::default()).map_err(fail)?;
    for n in 2..=8 {
        tally.flag("every dimension benchmarked", rows.iter().any(|row| row.n == n && row.method == "ch"));
    }
    for row in &rows {
        tally.check(&format!("{} n={} max deviation", row.method, row.n), row.max_deviation, C10_GATE);
    }
    for n in 2..=8 {
        let time = |m: &str| rows.iter().find(|row| row.n == n && row.method == m).map(|row| row.ns_per_matrix);
        let (ch, oracle) = (time("ch").unwrap_or(f64::NAN), time("oracle").unwrap_or(f64::NAN));
        let explicit = time("explicit").map(|e| format!(", explicit {e:.0} ns")).unwrap_or_default();
        tally.note(format!("n={n}: ch {ch:.0} ns, oracle {oracle:.0} ns ({:.1}x){explicit}", oracle / ch));
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("explicit SU(2..5) forms", explicit_equivalence),
        ("unit term vs E_0", unit_term_identity),
        ("invariant double computation", invariant_double_computation),
        ("resolvent identity", resolvent_identity),
        ("response cross-checks", response_cross_checks),
        ("spin-j suite", spin_suite),
        ("simplex geometry", geometry_suite),
        ("SU(N) membership", group_membership),
        ("benchmark integrity", benchmark_integrity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut tally = Tally::default();
        let outcome = run(&mut tally);
        let passed = outcome.is_ok() && tally.failures == 0 && tally.checks > 0;
        if !passed {
            failed += 1;
        }
        let status = if passed { "PASS" } else { "FAIL" };
        match outcome {
            Ok(()) => println!(
                "criterion {:>2} {status} {name}: {} checks, {} over tolerance, worst err/tol {:.2e} ({}), {:.1} s",
                k + 1,
                tally.checks,
                tally.failures,
                tally.worst,
                tally.worst_name,
                start.elapsed().as_secs_f64()
            ),
            Err(e) => println!("criterion {:>2} {status} {name}: error: {e}", k + 1),
        }
        for note in &tally.notes {
            println!("    {note}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
