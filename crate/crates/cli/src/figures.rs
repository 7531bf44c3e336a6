//! The three standard figures: roots over the limit support, binned roots
//! against the limit densities, and the family of limit curves.

use std::path::{Path, PathBuf};

use lommel_zeros::limitlaw::{classify, solve_alpha0, trace_curve, xi, Regime};
use lommel_zeros::spectra::roots_q_batch;
use lommel_zeros::validate::{compare_roots, Region};
use lommel_zeros::Alpha;

use crate::commands::{histogram_panel, roots_panel, short};
use crate::config::RunConfig;
use crate::error::Result;
use crate::svg::{emit_svg, Panel, Series, Shape, Style, PALETTE};

pub const FIG1_N: usize = 100;
pub const FIG2_N: usize = 500;
pub const FIG3_ALPHAS: [f64; 7] = [0.05, 0.15, 0.25, f64::NAN, 0.45, 0.8, 2.0];

fn fig3_alphas() -> Vec<Alpha> {
    FIG3_ALPHAS
        .iter()
        .map(|&a| Alpha::new(if a.is_nan() { solve_alpha0() } else { a }).unwrap())
        .collect()
}

pub fn fig1(alphas: &[Alpha], n: usize, steps: usize) -> Result<String> {
    let jobs: Vec<(usize, Alpha)> = alphas.iter().map(|&a| (n, a)).collect();
    let mut panels = Vec::new();
    for (rs, &a) in roots_q_batch(&jobs).into_iter().zip(alphas) {
        panels.push(roots_panel(a, &rs?, steps)?);
    }
    let style = Style {
        width: 600.0 * panels.len() as f64,
        height: 600.0,
        columns: panels.len(),
        ..Style::default()
    };
    emit_svg(&panels, &style)
}

pub fn fig2(alphas: &[Alpha], n: usize, bins: usize, steps: usize) -> Result<String> {
    let jobs: Vec<(usize, Alpha)> = alphas.iter().map(|&a| (n, a)).collect();
    let mut panels = Vec::new();
    for (rs, &a) in roots_q_batch(&jobs).into_iter().zip(alphas) {
        let report = compare_roots(&rs?, a, bins)?;
        if classify(a) != Regime::Critical {
            panels.push(histogram_panel(a, &report, Region::Axis, steps)?);
        }
        panels.push(histogram_panel(a, &report, Region::Arc, steps)?);
    }
    let style = Style {
        width: 1200.0,
        height: 500.0 * panels.len().div_ceil(2) as f64,
        columns: 2,
        ..Style::default()
    };
    emit_svg(&panels, &style)
}

/// Limit curves with the imaginary part scaled by `1/(2 alpha)`.
pub fn fig3(alphas: &[Alpha], steps: usize) -> Result<String> {
    let mut series = Vec::new();
    for (k, &a) in alphas.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let s = 1.0 / (2.0 * a.get());
        let arc = trace_curve(a, steps)?;
        series.push(Series {
            label: Some(format!("alpha = {}", short(a.get()))),
            color,
            shape: Shape::Line(arc.points().map(|z| (z.re, z.im * s)).collect()),
        });
        let x = xi(a)?;
        if classify(a) != Regime::Critical {
            series.push(Series {
                label: None,
                color,
                shape: Shape::Line(vec![(0.0, 0.0), (x.re, x.im * s)]),
            });
        }
    }
    let panel = Panel {
        title: "limit curves, Im z scaled by 1/(2 alpha)".into(),
        x_label: "Re z".into(),
        y_label: "Im z / (2 alpha)".into(),
        series,
        equal_aspect: true,
        legend_outside: true,
    };
    emit_svg(&[panel], &Style::default())
}

/// Writes `fig1.svg`, `fig2.svg` and `fig3.svg` into `dir`.
pub fn write(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let a = |x: f64| Alpha::new(x).unwrap();
    let docs = [
        (
            "fig1.svg",
            fig1(
                &[a(1.0), a(solve_alpha0()), a(0.25)],
                cfg.n_or(FIG1_N),
                cfg.steps,
            )?,
        ),
        (
            "fig2.svg",
            fig2(&[a(0.25), a(0.5)], cfg.n_or(FIG2_N), cfg.bins, cfg.steps)?,
        ),
        ("fig3.svg", fig3(&fig3_alphas(), cfg.steps)?),
    ];
    let mut paths = Vec::new();
    for (name, doc) in docs {
        let p = dir.join(name);
        std::fs::write(&p, doc)?;
        paths.push(p);
    }
    Ok(paths)
}
