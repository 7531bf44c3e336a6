//! End-to-end acceptance run. One line per criterion with the measured
//! value, the tolerance and the wall time; the test fails if any line fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use lommel_zeros::limitlaw::{
    classify, curve_tangent, density_mu1, measure_masses, solve_alpha0, stokes_residual,
    trace_curve, upsilon, xi, Regime,
};
use lommel_zeros::spectra::{build_lommel_jacobi, eigenvalues, localization_check};
use lommel_zeros::validate::{
    bessel_grid, check_bessel_identity, check_cauchy_convergence, check_olver_decay,
    compare_empirical_limit, roots_cached, OLVER_LADDER,
};
use lommel_zeros::Alpha;
use num_complex::Complex64;

const FAMILY: [f64; 7] = [0.05, 0.15, 0.25, f64::NAN, 0.45, 0.8, 2.0];

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

fn family() -> Vec<Alpha> {
    FAMILY
        .iter()
        .map(|&a| alpha(if a.is_nan() { solve_alpha0() } else { a }))
        .collect()
}

/// Written to the stderr handle directly, which the test harness does not
/// capture, so the report shows up in plain `cargo test` output.
fn report(line: std::fmt::Arguments) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn run(id: u32, name: &str, tol: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let dt = t.elapsed();
    let in_time = dt <= budget;
    let ok = o.ok && in_time;
    report(format_args!(
        "{} {id:>2} {name}: {} (tol {tol}) [{:.3?} / budget {:.0?}{}]",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        dt,
        budget,
        if in_time { "" } else { ", over budget" },
    ));
    ok
}

fn threshold() -> Outcome {
    let a0 = solve_alpha0();
    outcome((a0 - 0.33137).abs() < 5e-5, format!("alpha0 = {a0:.15}"))
}

fn endpoints() -> Outcome {
    let x1 = xi(alpha(0.25)).unwrap();
    let x2 = xi(alpha(0.5)).unwrap();
    let a0 = solve_alpha0();
    let mut ok = (x1.re - 0.246).abs() < 1e-3 && x1.im == 0.0;
    ok &= (x2.im - 0.369).abs() < 1e-3 && x2.re == 0.0;
    let mut worst: f64 = 0.0;
    for a in [0.05, 0.15, 0.25, 0.33] {
        let x = xi(alpha(a)).unwrap();
        worst = worst.max((x - (1.0 - a / a0)).norm());
    }
    ok &= worst < 1e-8;
    outcome(
        ok,
        format!(
            "xi(0.25) = {:.6}, Im xi(0.5) = {:.6}, closed-form gap {worst:.1e}",
            x1.re, x2.im
        ),
    )
}

fn localization() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for n in [2, 5, 10, 50, 100, 500] {
        for a in [0.25, solve_alpha0(), 0.5, 1.0, 2.0] {
            match roots_cached(n, alpha(a)).and_then(|rs| localization_check(&rs)) {
                Ok(r) => {
                    worst = worst.min(r.min_margin);
                    if !r.pass || r.margins.len() != n {
                        failures.push(format!("n={n} a={a}"));
                    }
                }
                Err(e) => failures.push(format!("n={n} a={a}: {e}")),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("30 root sets, min slack {worst:.3e} {failures:?}"),
    )
}

fn bessel_identity() -> Outcome {
    let r = check_bessel_identity(&bessel_grid());
    outcome(
        r.pass,
        format!(
            "{} points, max deviation {:.2e}",
            r.points.len(),
            r.max_deviation
        ),
    )
}

fn olver() -> Outcome {
    match check_olver_decay(&OLVER_LADDER, &[0.5, 0.7, 1.0]) {
        Ok(r) => {
            let all: Vec<f64> = r.rows.iter().flat_map(|row| row.ratios.clone()).collect();
            let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = all.iter().cloned().fold(0.0, f64::max);
            outcome(
                r.pass,
                format!("{} ratios in [{lo:.3}, {hi:.3}]", all.len()),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn stokes_curve() -> Outcome {
    let mut res: f64 = 0.0;
    let mut ends: f64 = 0.0;
    for a in family() {
        let arc = match trace_curve(a, 200) {
            Ok(arc) => arc,
            Err(e) => return outcome(false, format!("alpha {}: {e}", a.get())),
        };
        for s in &arc.samples {
            res = res.max(stokes_residual(a, s.z).unwrap().abs());
        }
        let first = arc.samples.first().unwrap().z;
        let last = arc.samples.last().unwrap().z;
        ends = ends.max((first - xi(a).unwrap()).norm());
        ends = ends.max((last - Complex64::new(1.0, 2.0 * a.get())).norm());
    }
    outcome(
        res < 1e-10 && ends < 1e-6,
        format!("max |F| {res:.2e}, endpoint gap {ends:.2e}"),
    )
}

fn normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in family() {
        let (m1, m2) = measure_masses(a, 1e-12).unwrap();
        worst = worst.max((4.0 * m1 + 2.0 * m2 - 1.0).abs());
    }
    outcome(worst < 1e-6, format!("max |4 m1 + 2 m2 - 1| = {worst:.2e}"))
}

/// Share of all roots lying within `2/n` of the axis segment, against `2 m2`.
fn axis_share() -> Outcome {
    let n = 500;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for a in [0.25, 0.5, 2.0] {
        let al = alpha(a);
        let rs = roots_cached(n, al).unwrap();
        let tol = 2.0 / n as f64;
        let on_axis = |z: &Complex64| match classify(al) {
            Regime::Supercritical => z.re.abs() <= tol,
            _ => z.im.abs() <= tol,
        };
        let share = rs.roots.iter().filter(|z| on_axis(z)).count() as f64 / n as f64;
        let (_, m2) = measure_masses(al, 1e-12).unwrap();
        worst = worst.max((share - 2.0 * m2).abs());
        parts.push(format!("a={a}: {share:.4} vs {:.4}", 2.0 * m2));
    }
    outcome(
        worst < 0.02,
        format!("n=500 axis share {}; roots reused from 3", parts.join(", ")),
    )
}

fn weak_convergence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.25, 0.5] {
        match compare_empirical_limit(500, alpha(a), 25) {
            Ok(r) => {
                ok &= r.sup_discrepancy < 0.05;
                parts.push(format!("a={a}: sup {:.4}", r.sup_discrepancy));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("a={a}: {e}"));
            }
        }
    }
    outcome(ok, format!("{}; roots reused from 3", parts.join(", ")))
}

fn cauchy() -> Outcome {
    let c = Complex64::new;
    let cases = [
        (0.25, [c(0.5, 0.5), c(0.5, 1.5), c(1.5, 0.3)]),
        (0.5, [c(0.5, 1.5), c(1.3, 0.4), c(0.1, 0.6)]),
        (1.0, [c(2.0, 2.0), c(0.3, 2.5), c(1.3, 0.5)]),
    ];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (a, zs) in cases {
        match check_cauchy_convergence(alpha(a), &zs, &[100, 200, 400]) {
            Ok(r) => {
                ok &= r.pass;
                for row in &r.rows {
                    worst = worst.max(*row.errors.last().unwrap());
                }
            }
            Err(e) => return outcome(false, format!("a={a}: {e}")),
        }
    }
    outcome(ok, format!("9 points, monotone, max err(400) {worst:.2e}"))
}

/// Complex density `1/4 + log Y/(2 pi i)` times `dz/dx` against the
/// positive form.
fn density_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.25, 0.5, 1.0] {
        let al = alpha(a);
        let arc = trace_curve(al, 52).unwrap();
        for s in &arc.samples[1..51] {
            let y = upsilon(al, s.z).unwrap();
            let f = 0.25 + y.ln() / Complex64::new(0.0, 2.0 * PI);
            let dz = Complex64::new(1.0, curve_tangent(al, s.z).unwrap());
            let complex_form = f * dz;
            let positive = density_mu1(al, s.z).unwrap();
            worst = worst.max((complex_form - positive).norm());
        }
    }
    outcome(worst < 1e-10, format!("150 samples, max gap {worst:.2e}"))
}

fn symmetry() -> Outcome {
    let mut pairing: f64 = 0.0;
    let mut spectral: f64 = 0.0;
    for n in [2, 5, 10, 50] {
        for a in [0.25, 0.5, 1.0, 2.0] {
            let al = alpha(a);
            let rs = roots_cached(n, al).unwrap();
            pairing = pairing.max(rs.diagnostics.pairing_defect.unwrap_or(f64::INFINITY));
            for &z in &rs.roots {
                for image in [-z, z.conj()] {
                    let d = rs
                        .roots
                        .iter()
                        .map(|w| (w - image).norm())
                        .fold(f64::INFINITY, f64::min);
                    pairing = pairing.max(d);
                }
            }
            let im = build_lommel_jacobi(n, al).unwrap().imaginary_part();
            let mut got: Vec<f64> = eigenvalues(&im)
                .unwrap()
                .roots
                .iter()
                .map(|z| z.re)
                .collect();
            got.sort_by(f64::total_cmp);
            let mut want: Vec<f64> = (1..=n)
                .map(|k| 2.0 * a * (PI * k as f64 / (n + 1) as f64).cos())
                .collect();
            want.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                spectral = spectral.max((g - w).abs());
            }
        }
    }
    outcome(
        pairing < 1e-9 && spectral < 1e-10,
        format!("pairing {pairing:.2e}, Im J spectrum gap {spectral:.2e}"),
    )
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let ms = Duration::from_millis;
    let results = [
        run(1, "threshold alpha0", "5e-5", ms(1), threshold),
        run(2, "left endpoints xi", "1e-3 / 1e-8", ms(10), endpoints),
        run(3, "localization rectangle", "-1e-10", s(120), localization),
        run(4, "Bessel-product identity", "1e-8", s(10), bessel_identity),
        run(5, "uniform expansion decay", "[0.3, 0.7]", s(10), olver),
        run(
            6,
            "Stokes curve tracing",
            "1e-10 / 1e-6",
            s(5),
            stokes_curve,
        ),
        run(7, "mass normalization", "1e-6", s(5), normalization),
        run(7, "axis root share", "0.02", s(60), axis_share),
        run(
            8,
            "binned weak convergence",
            "0.05",
            s(300),
            weak_convergence,
        ),
        run(9, "Cauchy transform convergence", "0.02", s(180), cauchy),
        run(10, "density forms agree", "1e-10", s(1), density_forms),
        run(
            11,
            "symmetry and Im J spectrum",
            "1e-9 / 1e-10",
            s(10),
            symmetry,
        ),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    report(format_args!(
        "{} of {} checks passed",
        results.len() - failed,
        results.len()
    ));
    assert_eq!(failed, 0);
}
