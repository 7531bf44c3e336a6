use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Roots of Q_n
    Roots,
    /// Traced arc of the limiting support
    Curve,
    /// Densities of the two limit measures
    Density,
    /// Critical value of alpha
    Alpha0,
    /// Left end of the arc
    Xi,
    /// Binned roots against limit masses
    Compare,
    /// Empirical against limiting Cauchy transform
    Cauchy,
    /// Entries of the tridiagonal matrix
    Jacobi,
    /// Write fig1.svg, fig2.svg and fig3.svg into --output
    Figures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Roots => "roots",
            Command::Curve => "curve",
            Command::Density => "density",
            Command::Alpha0 => "alpha0",
            Command::Xi => "xi",
            Command::Compare => "compare",
            Command::Cauchy => "cauchy",
            Command::Jacobi => "jacobi",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Zeros of Lommel polynomials in the order variable and their limit law.
#[derive(Debug, Clone, Parser)]
#[command(name = "lommel-zeros", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Polynomial degree; figures default to 100 (fig1) and 500 (fig2)
    #[arg(long)]
    pub n: Option<usize>,
    /// Samples along the arc
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 25)]
    pub bins: usize,
    /// Quadrature tolerance for masses
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file (directory for figures); stdout if absent
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Evaluation point `re,im` for cauchy; repeatable
    #[arg(long = "z", value_parser = parse_point)]
    pub points: Vec<Complex64>,
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(Complex64::new(p(re)?, p(im)?))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return usage(format!("--alpha must be positive, got {a}"));
            }
        } else if !matches!(self.command, Command::Alpha0 | Command::Figures) {
            return usage(format!("{} needs --alpha", self.command.name()));
        }
        if self.n == Some(0) {
            return usage("--n must be at least 1".into());
        }
        if self.steps < 16 {
            return usage(format!("--steps must be at least 16, got {}", self.steps));
        }
        if self.bins < 5 {
            return usage(format!("--bins must be at least 5, got {}", self.bins));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return usage(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        let svg_ok = matches!(
            self.command,
            Command::Roots
                | Command::Curve
                | Command::Density
                | Command::Compare
                | Command::Figures
        );
        if self.format == Format::Svg && !svg_ok {
            return usage(format!("{} has no svg output", self.command.name()));
        }
        if self.command == Command::Figures && self.format != Format::Svg {
            return usage("figures only writes svg; pass --format svg".into());
        }
        Ok(())
    }

    pub fn alpha(&self) -> Result<lommel_zeros::Alpha> {
        let a = self
            .alpha
            .ok_or_else(|| CliError::Usage(format!("{} needs --alpha", self.command.name())))?;
        Ok(lommel_zeros::Alpha::new(a)?)
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}
