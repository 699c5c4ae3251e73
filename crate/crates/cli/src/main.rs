use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use syncmem_core::experiments::Figure;
use syncmem_core::io::{execute, parse_override, parse_recipe};
use syncmem_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

/// Synchronization versus memory in a pair of coupled qubits.
///
/// Every command writes CSV files and a `<command>_manifest.toml` into the
/// output directory. Passing a manifest back through `--config` reruns the
/// same recipe.
#[derive(Parser, Debug)]
#[command(name = "syncmem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Master equation: C12 and N over detuning and coupling.
    Fig1(Common),
    /// Master equation with Ohmic bath and low-frequency dephasing.
    Fig2(Common),
    /// Collision model: detuning and coupling, one panel per SWAP angle.
    Fig4(Common),
    /// Collision model: SWAP angle and coupling, one panel per detuning.
    Fig5(Common),
    /// Collision model: detuning and SWAP angle at fixed coupling.
    Fig6(Common),
    /// Collision model: sliding C12 and running N traces.
    Fig7(Common),
    /// The fig6 grid with the entanglement-based memory measure.
    Fig8(Common),
    /// One master-equation run: observables, distance and windowed C12.
    MeRun(Common),
    /// One collision-model run: observables, distance and windowed C12.
    CmRun(Common),
    /// Custom grid; choose axes and engine through the config.
    Sweep(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat-key TOML recipe (a previous manifest also works).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// Override a recipe key, e.g. `--set lambda=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    n_collisions: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Points per grid axis, spread evenly over the current axis range.
    #[arg(long)]
    resolution: Option<usize>,
    /// Evaluate grid points one after another.
    #[arg(long)]
    serial: bool,
    /// Worker threads (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write PNG heatmaps of every diagram.
    #[arg(long)]
    heatmap: bool,
}

impl Command {
    fn split(self) -> (Figure, Common) {
        match self {
            Command::Fig1(c) => (Figure::Fig1, c),
            Command::Fig2(c) => (Figure::Fig2, c),
            Command::Fig4(c) => (Figure::Fig4, c),
            Command::Fig5(c) => (Figure::Fig5, c),
            Command::Fig6(c) => (Figure::Fig6, c),
            Command::Fig7(c) => (Figure::Fig7, c),
            Command::Fig8(c) => (Figure::Fig8, c),
            Command::MeRun(c) => (Figure::MeRun, c),
            Command::CmRun(c) => (Figure::CmRun, c),
            Command::Sweep(c) => (Figure::Sweep, c),
        }
    }
}

fn overrides(c: &Common) -> Result<Vec<(String, String)>, Error> {
    let mut out = c
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut flag = |k: &str, v: String| out.push((k.to_string(), v));
    if let Some(n) = c.n_collisions {
        flag("n_collisions", n.to_string());
    }
    if let Some(t) = c.t_end {
        flag("t_end", format!("{t:?}"));
    }
    if let Some(n) = c.resolution {
        flag("resolution", n.to_string());
    }
    if c.serial {
        flag("parallel", "false".into());
    }
    if let Some(w) = c.workers {
        flag("workers", w.to_string());
    }
    if c.heatmap {
        flag("heatmap", "true".into());
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Error> {
    let (figure, common) = cli.command.split();
    let cfg = parse_recipe(figure, common.config.as_deref(), &overrides(&common)?)?;
    let m = execute(&cfg, &common.out)?;
    for f in &m.outputs {
        println!("wrote {}", common.out.join(f).display());
    }
    println!("wrote {}", common.out.join(m.file_name()).display());
    println!(
        "cells ok={} missing={} flagged={} in {:.1}s",
        m.cells_ok, m.cells_missing, m.cells_flagged, m.wall_clock_seconds
    );
    for t in &m.traces {
        let get = |k: &str| {
            t.get(k)
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "omega1={} swap_gamma={} N={} first_sync={}",
            get("omega1"),
            get("swap_gamma"),
            get("nm_final"),
            get("first_sync")
        );
    }
    for n in &m.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Format { .. } | Error::Label(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
