use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qrc_cli::error::{exit_code, usage};
use qrc_cli::format::to_json;
use qrc_cli::report::{bound_config, build_report, render_text};
use qrc_cli::sweep::{sweep, write_csv, Family, Range};
use qrc_cli::verify::{render_table, run_verify, Level};
use qrc_core::gates::{gate_from_spec, load_unitary};

#[derive(Parser)]
#[command(name = "qrc", version, about = "Resource-power lower bounds on circuit cost")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every applicable cost lower bound for one gate.
    Report(ReportArgs),
    /// Closed-form and Monte Carlo CGP curves for the U_theta or U_t family.
    Sweep(SweepArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["gate", "unitary"]))]
struct ReportArgs {
    /// Gate spec such as `t`, `qft:5` or `utheta:0.785`.
    #[arg(long)]
    gate: Option<String>,
    /// JSON or CSV unitary file.
    #[arg(long)]
    unitary: Option<PathBuf>,
    /// Comma-separated alpha grid.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7, 1.5, 2.0])]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Diagonal floor for the restricted relative-entropy bound.
    #[arg(long)]
    delta: Option<f64>,
    /// kappa_max of the admissible generator set.
    #[arg(long)]
    kappa_max: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Utheta,
    Ut,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// LO:HI:STEPS, giving STEPS+1 points.
    #[arg(long)]
    range: String,
    /// Monte Carlo samples per point; 0 leaves the MC columns empty.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    level: LevelArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("QRC_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage(format!("QRC_THREADS = `{v}` is not a positive integer")))?;
        if n == 0 {
            return Err(usage("QRC_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn report(a: ReportArgs) -> anyhow::Result<i32> {
    let u = match (&a.gate, &a.unitary) {
        (Some(g), None) => gate_from_spec(g)?,
        (None, Some(p)) => load_unitary(p)?,
        _ => return Err(usage("exactly one of --gate and --unitary is required")),
    };
    let mut cfg = bound_config(a.alpha, a.samples, a.seed, a.restarts);
    cfg.delta = a.delta;
    cfg.kappa_max = a.kappa_max;
    let doc = build_report(&u, &cfg)?;
    let text = match a.format {
        Format::Json => to_json(&doc)?,
        Format::Text => render_text(&doc),
    };
    emit(a.out.as_ref(), &text)?;
    Ok(0)
}

fn sweep_cmd(a: SweepArgs) -> anyhow::Result<i32> {
    let family = match a.family {
        FamilyArg::Utheta => Family::Utheta,
        FamilyArg::Ut => Family::Ut,
    };
    let rows = sweep(family, Range::parse(&a.range)?, a.samples, a.seed)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(a.out.as_ref(), std::str::from_utf8(&buf)?)?;
    Ok(0)
}

fn verify(a: VerifyArgs) -> anyhow::Result<i32> {
    let level = match a.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let r = run_verify(level, a.seed)?;
    print!("{}", render_table(&r));
    if let Some(p) = &a.out {
        emit(Some(p), &to_json(&r)?)?;
    }
    Ok(if r.passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Report(a) => report(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Verify(a) => verify(a),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
