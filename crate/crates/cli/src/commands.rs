use lommel_zeros::limitlaw::{
    classify, density_mu1, density_mu2, limiting_cauchy, measure_masses, solve_alpha0,
    support_distance, trace_curve, xi, Regime,
};
use lommel_zeros::spectra::{
    build_lommel_jacobi, empirical_cauchy, localization_check, roots_q, RootSet,
};
use lommel_zeros::validate::{compare_roots, ComparisonReport, Region};
use lommel_zeros::Alpha;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::Result;
use crate::svg::{Panel, Series, Shape, PALETTE};
use crate::table::Table;

pub const DEFAULT_N: usize = 100;

/// Everything a command produces before it is encoded.
pub struct Dataset {
    pub table: Table,
    pub params: Value,
    pub diagnostics: Value,
    /// Single-row result whose JSON `data` is an object.
    pub scalar: bool,
    pub panels: Vec<Panel>,
}

/// Up to five decimals, trailing zeros dropped.
pub fn short(x: f64) -> String {
    let s = format!("{x:.5}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn params(cfg: &RunConfig) -> Value {
    json!({
        "alpha": cfg.alpha,
        "n": cfg.n_or(DEFAULT_N),
        "steps": cfg.steps,
        "bins": cfg.bins,
        "tol": cfg.tol,
    })
}

pub fn build(cfg: &RunConfig) -> Result<Dataset> {
    let mut d = match cfg.command {
        Command::Roots => roots(cfg)?,
        Command::Curve => curve(cfg)?,
        Command::Density => density(cfg)?,
        Command::Alpha0 => alpha0(),
        Command::Xi => xi_cmd(cfg)?,
        Command::Compare => compare(cfg)?,
        Command::Cauchy => cauchy(cfg)?,
        Command::Jacobi => jacobi(cfg)?,
        Command::Figures => unreachable!("figures are written by figures::write"),
    };
    d.params = params(cfg);
    Ok(d)
}

fn dataset(table: Table, diagnostics: Value) -> Dataset {
    Dataset {
        table,
        params: Value::Null,
        diagnostics,
        scalar: false,
        panels: Vec::new(),
    }
}

/// The support of the limit measure: the arc mirrored into all four
/// quadrants and the axis segment.
pub fn support_series(
    alpha: Alpha,
    steps: usize,
    color: &'static str,
    label: Option<String>,
) -> Result<Vec<Series>> {
    let arc = trace_curve(alpha, steps)?;
    let mut out = Vec::new();
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        out.push(Series {
            label: None,
            color,
            shape: Shape::Line(arc.points().map(|z| (sx * z.re, sy * z.im)).collect()),
        });
    }
    let x = xi(alpha)?;
    if classify(alpha) != Regime::Critical {
        out.push(Series {
            label: None,
            color,
            shape: Shape::Line(vec![(-x.re, -x.im), (x.re, x.im)]),
        });
    }
    out[0].label = label;
    Ok(out)
}

pub fn roots_panel(alpha: Alpha, rs: &RootSet, steps: usize) -> Result<Panel> {
    let mut series = vec![Series {
        label: Some(format!("roots, n = {}", rs.n)),
        color: PALETTE[0],
        shape: Shape::Points(rs.roots.iter().map(|z| (z.re, z.im)).collect()),
    }];
    series.extend(support_series(
        alpha,
        steps,
        PALETTE[1],
        Some("limit support".into()),
    )?);
    Ok(Panel {
        title: format!("alpha = {}", short(alpha.get())),
        x_label: "Re z".into(),
        y_label: "Im z".into(),
        series,
        equal_aspect: true,
        legend_outside: false,
    })
}

fn roots(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let rs = roots_q(cfg.n_or(DEFAULT_N), alpha)?;
    let mut t = Table::new("roots", &["re", "im", "residual"]);
    for (z, r) in rs.roots.iter().zip(&rs.residuals) {
        t.push(vec![z.re.into(), z.im.into(), (*r).into()]);
    }
    let loc = localization_check(&rs)?;
    let diagnostics = json!({
        "solve": serde_json::to_value(&rs.diagnostics)?,
        "certified": rs.certified(1e-12),
        "localization_min_margin": loc.min_margin,
    });
    let mut d = dataset(t, diagnostics);
    d.panels = vec![roots_panel(alpha, &rs, cfg.steps)?];
    Ok(d)
}

fn curve(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let arc = trace_curve(alpha, cfg.steps)?;
    let mut t = Table::new("curve", &["x", "y", "slope", "density"]);
    for s in &arc.samples {
        t.push(vec![
            s.z.re.into(),
            s.z.im.into(),
            s.slope.into(),
            density_mu1(alpha, s.z)?.into(),
        ]);
    }
    let diagnostics = json!({
        "max_residual": arc.max_residual(),
        "start": [arc.start.re, arc.start.im],
        "end": [arc.end.re, arc.end.im],
    });
    let mut d = dataset(t, diagnostics);
    d.panels = vec![Panel {
        title: format!("arc, alpha = {}", short(alpha.get())),
        x_label: "x".into(),
        y_label: "y".into(),
        series: vec![Series {
            label: None,
            color: PALETTE[1],
            shape: Shape::Line(arc.points().map(|z| (z.re, z.im)).collect()),
        }],
        equal_aspect: false,
        legend_outside: false,
    }];
    Ok(d)
}

/// `density_mu2` on `steps` equally spaced points of its segment.
fn mu2_curve(alpha: Alpha, steps: usize) -> Result<Vec<(f64, f64)>> {
    let x = xi(alpha)?;
    let end = x.re.max(x.im);
    (0..steps)
        .map(|k| {
            let t = end * k as f64 / (steps - 1) as f64;
            Ok((t, density_mu2(alpha, t)?))
        })
        .collect()
}

fn mu1_curve(alpha: Alpha, steps: usize) -> Result<Vec<(f64, f64)>> {
    trace_curve(alpha, steps)?
        .samples
        .iter()
        .map(|s| Ok((s.x, density_mu1(alpha, s.z)?)))
        .collect()
}

fn axis_label(alpha: Alpha) -> &'static str {
    if classify(alpha) == Regime::Supercritical {
        "Im z"
    } else {
        "Re z"
    }
}

fn density(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let mut t = Table::new("density", &["region", "t", "density"]);
    let mu1 = mu1_curve(alpha, cfg.steps)?;
    for &(x, v) in &mu1 {
        t.push(vec!["mu1".into(), x.into(), v.into()]);
    }
    let mut panels = vec![Panel {
        title: format!("mu1 per unit x, alpha = {}", short(alpha.get())),
        x_label: "x".into(),
        y_label: "density".into(),
        series: vec![Series {
            label: None,
            color: PALETTE[0],
            shape: Shape::Line(mu1),
        }],
        equal_aspect: false,
        legend_outside: false,
    }];
    if classify(alpha) != Regime::Critical {
        let mu2 = mu2_curve(alpha, cfg.steps)?;
        for &(s, v) in &mu2 {
            t.push(vec!["mu2".into(), s.into(), v.into()]);
        }
        panels.insert(
            0,
            Panel {
                title: format!("mu2, alpha = {}", short(alpha.get())),
                x_label: axis_label(alpha).into(),
                y_label: "density".into(),
                series: vec![Series {
                    label: None,
                    color: PALETTE[0],
                    shape: Shape::Line(mu2),
                }],
                equal_aspect: false,
                legend_outside: false,
            },
        );
    }
    let (m1, m2) = measure_masses(alpha, cfg.tol)?;
    let diagnostics = json!({
        "regime": format!("{:?}", classify(alpha)),
        "mu1_mass": m1,
        "mu2_mass": m2,
        "total_mass": 4.0 * m1 + 2.0 * m2,
    });
    let mut d = dataset(t, diagnostics);
    d.panels = panels;
    Ok(d)
}

fn alpha0() -> Dataset {
    let mut t = Table::new("alpha0", &["alpha0"]);
    t.push(vec![solve_alpha0().into()]);
    let mut d = dataset(t, json!({}));
    d.scalar = true;
    d
}

fn xi_cmd(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let x = xi(alpha)?;
    let mut t = Table::new("xi", &["re", "im"]);
    t.push(vec![x.re.into(), x.im.into()]);
    let mut d = dataset(t, json!({ "regime": format!("{:?}", classify(alpha)) }));
    d.scalar = true;
    Ok(d)
}

/// Histogram of one region of a comparison against the exact density.
pub fn histogram_panel(
    alpha: Alpha,
    report: &ComparisonReport,
    region: Region,
    steps: usize,
) -> Result<Panel> {
    let bars: Vec<(f64, f64, f64)> = report
        .per_bin
        .iter()
        .filter(|b| b.region == region)
        .map(|b| (b.lo, b.hi, b.empirical / (b.hi - b.lo)))
        .collect();
    let (exact, name, x_label) = match region {
        Region::Axis => (mu2_curve(alpha, steps)?, "mu2", axis_label(alpha)),
        Region::Arc => (mu1_curve(alpha, steps)?, "mu1", "x"),
    };
    Ok(Panel {
        title: format!("{name}, alpha = {}, n = {}", short(alpha.get()), report.n),
        x_label: x_label.into(),
        y_label: "density".into(),
        series: vec![
            Series {
                label: Some("roots".into()),
                color: PALETTE[1],
                shape: Shape::Bars(bars),
            },
            Series {
                label: Some("limit".into()),
                color: PALETTE[0],
                shape: Shape::Line(exact),
            },
        ],
        equal_aspect: false,
        legend_outside: false,
    })
}

fn compare(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let rs = roots_q(cfg.n_or(DEFAULT_N), alpha)?;
    let r = compare_roots(&rs, alpha, cfg.bins)?;
    let mut t = Table::new(
        "compare",
        &["bin_lo", "bin_hi", "empirical", "theoretical", "region"],
    );
    for b in &r.per_bin {
        let region = match b.region {
            Region::Axis => "axis",
            Region::Arc => "arc",
        };
        t.push(vec![
            b.lo.into(),
            b.hi.into(),
            b.empirical.into(),
            b.theoretical.into(),
            region.into(),
        ]);
    }
    let diagnostics = json!({
        "sup_discrepancy": r.sup_discrepancy,
        "axis_tolerance": r.axis_tolerance,
        "axis_fraction": r.axis_fraction,
        "arc_fraction": r.arc_fraction,
        "pass": r.pass,
    });
    let mut panels = Vec::new();
    if classify(alpha) != Regime::Critical {
        panels.push(histogram_panel(alpha, &r, Region::Axis, cfg.steps)?);
    }
    panels.push(histogram_panel(alpha, &r, Region::Arc, cfg.steps)?);
    let mut d = dataset(t, diagnostics);
    d.panels = panels;
    Ok(d)
}

const CAUCHY_POINTS: [(f64, f64); 4] = [(0.5, 1.5), (1.5, 0.5), (2.0, 2.0), (0.0, 3.0)];

fn cauchy(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let points: Vec<Complex64> = if cfg.points.is_empty() {
        CAUCHY_POINTS
            .iter()
            .map(|&(x, y)| Complex64::new(x, y))
            .collect()
    } else {
        cfg.points.clone()
    };
    let rs = roots_q(cfg.n_or(DEFAULT_N), alpha)?;
    let mut t = Table::new(
        "cauchy",
        &[
            "z_re",
            "z_im",
            "empirical_re",
            "empirical_im",
            "limit_re",
            "limit_im",
            "error",
            "support_distance",
        ],
    );
    for z in points {
        let e = empirical_cauchy(&rs, z)?;
        let l = limiting_cauchy(alpha, z)?;
        t.push(vec![
            z.re.into(),
            z.im.into(),
            e.re.into(),
            e.im.into(),
            l.re.into(),
            l.im.into(),
            (e - l).norm().into(),
            support_distance(alpha, z)?.into(),
        ]);
    }
    Ok(dataset(t, json!({})))
}

fn jacobi(cfg: &RunConfig) -> Result<Dataset> {
    let alpha = cfg.alpha()?;
    let m = build_lommel_jacobi(cfg.n_or(DEFAULT_N), alpha)?;
    let mut t = Table::new("jacobi", &["row", "col", "re", "im"]);
    let n = m.order();
    for k in 0..n {
        if k > 0 {
            let v = m.offdiagonal()[k - 1];
            t.push(vec![k.into(), (k - 1).into(), v.re.into(), v.im.into()]);
        }
        let v = m.diagonal()[k];
        t.push(vec![k.into(), k.into(), v.re.into(), v.im.into()]);
        if k + 1 < n {
            let v = m.offdiagonal()[k];
            t.push(vec![k.into(), (k + 1).into(), v.re.into(), v.im.into()]);
        }
    }
    Ok(dataset(t, json!({ "order": n })))
}
