use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use lommel_zeros_cli::config::{Command, Format, RunConfig};
use lommel_zeros_cli::error::{CliError, Result};
use lommel_zeros_cli::{commands, figures, svg};

const THREADS_VAR: &str = "LOMMEL_THREADS";

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let k: usize = v.parse().ok().filter(|&k| k > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn encode(cfg: &RunConfig, d: &commands::Dataset) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match cfg.format {
        Format::Csv => d.table.write_csv(&mut buf)?,
        Format::Json => {
            let v = d
                .table
                .to_json(d.params.clone(), d.diagnostics.clone(), d.scalar)?;
            serde_json::to_writer_pretty(&mut buf, &v)?;
            buf.push(b'\n');
        }
        Format::Svg => buf = svg::emit_svg(&d.panels, &svg::Style::default())?.into_bytes(),
    }
    Ok(buf)
}

fn dispatch(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    init_threads()?;
    if cfg.command == Command::Figures {
        let dir = cfg.output.as_deref().unwrap_or(Path::new("."));
        for p in figures::write(cfg, dir)? {
            println!("{}", p.display());
        }
        return Ok(());
    }
    let bytes = encode(cfg, &commands::build(cfg)?)?;
    match &cfg.output {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string())),
    };
    match dispatch(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
