//! Parameter sweeps: run a list of (v, f) combinations against one base
//! scenario and emit the result table as CSV plus plain-text plot series.
//!
//! Entries are independent, so the sweep may run them on the ambient rayon
//! thread pool; rows are collected back into spec order regardless of
//! completion order, and runs are deterministic, so the emitted bytes never
//! depend on scheduling.

use crate::collisions::MetricsRecord;
use crate::config::{ConfigError, SimConfig};
use crate::engine::{SimState, Termination};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

/// One sweep: which (v, f) combinations to run, how often, and the CSV name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// CSV file name, relative to the output directory.
    pub output: String,
    /// Runs per pair. Runs are deterministic, so repeats only prove it.
    pub repetitions: usize,
    /// (cruise speed m/s, sampling frequency Hz), one run each, in order.
    pub pairs: Vec<[f64; 2]>,
    /// Scenario shared by every run; each pair overrides v and f.
    pub base: SimConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            output: "sweep.csv".to_string(),
            repetitions: 1,
            pairs: Vec::new(),
            base: SimConfig::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repetitions == 0 {
            return Err(ConfigError::Invalid {
                key: "repetitions".to_string(),
                message: "must be at least 1".to_string(),
            });
        }
        self.base.validate()?;
        for (i, &[v, f]) in self.pairs.iter().enumerate() {
            if !(v > 0.0 && f > 0.0) {
                return Err(ConfigError::Invalid {
                    key: "pairs".to_string(),
                    message: format!("pair {} (v={v}, f={f}): both values must be positive", i + 1),
                });
            }
            // Each pair must itself yield a runnable config; the fire
            // stability bound depends on f.
            let mut cfg = self.base.clone();
            cfg.swarm.cruise_speed = v;
            cfg.swarm.sampling_frequency = f;
            cfg.validate().map_err(|e| ConfigError::Invalid {
                key: "pairs".to_string(),
                message: format!("pair {} (v={v}, f={f}): {e}", i + 1),
            })?;
        }
        Ok(())
    }

    /// Run list in output order: spec order, each pair repeated.
    fn expanded(&self) -> Vec<(usize, f64, f64)> {
        let mut runs = Vec::with_capacity(self.pairs.len() * self.repetitions);
        let mut id = 1;
        for &[v, f] in &self.pairs {
            for _ in 0..self.repetitions {
                runs.push((id, v, f));
                id += 1;
            }
        }
        runs
    }
}

/// Parses and validates a sweep spec file.
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec, ConfigError> {
    let spec: SweepSpec =
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// One finished sweep run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// 1-based row id in spec order.
    pub id: usize,
    pub metrics: MetricsRecord,
    pub termination: Termination,
}

/// Runs every entry on the ambient thread pool and returns rows in spec
/// order. Runs that only hit the time budget are kept, with their
/// termination recorded.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    spec.expanded()
        .par_iter()
        .map(|&(id, v, f)| {
            let mut cfg = spec.base.clone();
            cfg.swarm.cruise_speed = v;
            cfg.swarm.sampling_frequency = f;
            let result = SimState::new(&cfg).run();
            SweepRow {
                id,
                metrics: result.metrics,
                termination: result.termination,
            }
        })
        .collect()
}

/// Writes the sweep table. Floats print at full round-trip precision in
/// plain decimal notation; ratios come from the metrics record, which holds
/// them unrounded.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "id,v,f,C,T,f_over_v,C_over_T")?;
    for row in rows {
        let m = &row.metrics;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.id,
            m.cruise_speed,
            m.sampling_frequency,
            m.collisions,
            m.duration,
            m.f_over_v,
            m.c_over_t
        )?;
    }
    Ok(())
}

/// Collision rate against cruise speed, restricted to rows sharing the
/// first row's frequency. One `v C_over_T` point per line.
pub fn write_rate_vs_speed<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    if let Some(first) = rows.first() {
        let f = first.metrics.sampling_frequency;
        for row in rows.iter().filter(|r| r.metrics.sampling_frequency == f) {
            writeln!(w, "{} {}", row.metrics.cruise_speed, row.metrics.c_over_t)?;
        }
    }
    Ok(())
}

/// Collision rate against f/v for every row. One `f_over_v C_over_T` point
/// per line.
pub fn write_rate_vs_ratio<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    for row in rows {
        writeln!(w, "{} {}", row.metrics.f_over_v, row.metrics.c_over_t)?;
    }
    Ok(())
}

/// One line per run with its termination reason, for the sweep sidecar log.
pub fn write_run_log<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    for row in rows {
        writeln!(
            w,
            "run {} (v={}, f={}): {}",
            row.id, row.metrics.cruise_speed, row.metrics.sampling_frequency, row.termination
        )?;
    }
    Ok(())
}
