//! Command-line harness: single runs, (v, f) sweeps, and config validation.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use swarmfire::collisions::CollisionMode;
use swarmfire::config::{emit_config, parse_config};
use swarmfire::engine::{RunResult, SimState};
use swarmfire::sweep::{self, SweepRow};

#[derive(Parser)]
#[command(
    name = "swarmfire",
    version,
    about = "Deterministic firefighting-swarm simulator and collision experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario to completion; writes run.json and events.csv.
    Run {
        /// Scenario config file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also stream one JSON line of swarm state per tick to ticks.jsonl.
        #[arg(long)]
        dump_ticks: bool,
        /// Override the config's collision counting mode.
        #[arg(long, value_enum)]
        collision_mode: Option<CollisionMode>,
    },
    /// Run every (v, f) pair of a sweep spec; writes the CSV table, plot
    /// series, and a run log.
    Sweep {
        /// Sweep spec file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for sweep entries; 0 picks the machine default.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Override the base config's collision counting mode.
        #[arg(long, value_enum)]
        collision_mode: Option<CollisionMode>,
    },
    /// Parse and validate a config, printing its canonical form.
    Validate {
        /// Scenario config file (TOML).
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            dump_ticks,
            collision_mode,
        } => cmd_run(&config, &out, dump_ticks, collision_mode),
        Command::Sweep {
            config,
            out,
            jobs,
            collision_mode,
        } => cmd_sweep(&config, &out, jobs, collision_mode),
        Command::Validate { config } => cmd_validate(&config),
    }
}

fn read_config_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn cmd_run(
    config: &Path,
    out: &Path,
    dump_ticks: bool,
    collision_mode: Option<CollisionMode>,
) -> Result<()> {
    let mut cfg = parse_config(&read_config_text(config)?)?;
    if let Some(mode) = collision_mode {
        cfg.run.collision_mode = mode;
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;

    let mut sim = SimState::new(&cfg);
    let mut ticks = match dump_ticks {
        true => Some(BufWriter::new(File::create(out.join("ticks.jsonl"))?)),
        false => None,
    };
    let result = loop {
        sim.step();
        if let Some(w) = ticks.as_mut() {
            serde_json::to_writer(&mut *w, &sim.tick_snapshot())?;
            w.write_all(b"\n")?;
        }
        if let Some(termination) = sim.termination() {
            break sim.result(termination);
        }
    };
    if let Some(mut w) = ticks {
        w.flush()?;
    }

    fs::write(
        out.join("run.json"),
        serde_json::to_string_pretty(&result)? + "\n",
    )?;
    let mut events = BufWriter::new(File::create(out.join("events.csv"))?);
    write_events_csv(&mut events, &result)?;
    events.flush()?;

    let m = &result.metrics;
    println!(
        "{}: C={} T={} v={} f={} f/v={} C/T={}",
        result.termination,
        m.collisions,
        m.duration,
        m.cruise_speed,
        m.sampling_frequency,
        m.f_over_v,
        m.c_over_t
    );
    Ok(())
}

fn write_events_csv<W: Write>(mut w: W, result: &RunResult) -> Result<()> {
    writeln!(w, "time,drone_a,drone_b,x_a,y_a,x_b,y_b")?;
    for e in &result.events {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            e.time, e.drone_a, e.drone_b, e.pos_a.x, e.pos_a.y, e.pos_b.x, e.pos_b.y
        )?;
    }
    Ok(())
}

fn cmd_sweep(
    config: &Path,
    out: &Path,
    jobs: usize,
    collision_mode: Option<CollisionMode>,
) -> Result<()> {
    let mut spec = sweep::parse_sweep_spec(&read_config_text(config)?)?;
    if let Some(mode) = collision_mode {
        spec.base.run.collision_mode = mode;
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot build worker pool")?;
    let rows: Vec<SweepRow> = pool.install(|| sweep::run_sweep(&spec));

    let csv_path = out.join(&spec.output);
    if let Some(parent) = csv_path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut csv = BufWriter::new(File::create(&csv_path)?);
    sweep::write_sweep_csv(&mut csv, &rows)?;
    csv.flush()?;

    if !rows.is_empty() {
        let mut by_speed = BufWriter::new(File::create(out.join("ct_vs_v.dat"))?);
        sweep::write_rate_vs_speed(&mut by_speed, &rows)?;
        by_speed.flush()?;
        let mut by_ratio = BufWriter::new(File::create(out.join("ct_vs_fov.dat"))?);
        sweep::write_rate_vs_ratio(&mut by_ratio, &rows)?;
        by_ratio.flush()?;
    }
    let mut log = BufWriter::new(File::create(out.join("runs.log"))?);
    sweep::write_run_log(&mut log, &rows)?;
    log.flush()?;

    println!("wrote {} rows to {}", rows.len(), csv_path.display());
    Ok(())
}

fn cmd_validate(config: &Path) -> Result<()> {
    let cfg = parse_config(&read_config_text(config)?)?;
    print!("{}", emit_config(&cfg));
    Ok(())
}
