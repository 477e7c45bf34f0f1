//! Closed-loop experiments over seeded replications, summary statistics and
//! their CSV forms.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ipa::JacobianEstimate;
use crate::regulator::{run_closed_loop, ControllerState, CycleRecord, Mode, TrafficPlant};
use crate::scenario::{replication_inputs, ExperimentConfig, CONFIG_KEYS};

/// First control cycle (1-based) included in the mean deviation.
pub const MEAN_FROM: usize = 10;
/// Last control cycle included in the mean deviation and the maximum.
pub const STATS_TO: usize = 50;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRow {
    pub k: usize,
    pub theta: [f64; 2],
    pub g: [f64; 2],
    pub e: [f64; 2],
    pub j11: f64,
    pub j21: f64,
    pub j22: f64,
}

impl From<&CycleRecord> for RunRow {
    fn from(r: &CycleRecord) -> Self {
        let JacobianEstimate { j11, j21, j22, .. } = r.jacobian;
        Self { k: r.k, theta: r.theta, g: r.y, e: r.error, j11, j21, j22 }
    }
}

pub const RUN_COLUMNS: &str = "k,theta1,theta2,g1,g2,e1,e2,j11,j21,j22";

/// One replication of a closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSeries {
    pub rows: Vec<RunRow>,
    pub metadata: Vec<(String, String)>,
}

fn config_metadata(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = CONFIG_KEYS
        .iter()
        .map(|k| (k.to_string(), cfg.get(k).unwrap_or_default()))
        .collect();
    meta.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    meta
}

fn write_metadata(out: &mut String, title: &str, meta: &[(String, String)]) {
    let _ = writeln!(out, "# {title}");
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

impl RunSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_metadata(&mut out, "run series", &self.metadata);
        let _ = writeln!(out, "{RUN_COLUMNS}");
        for r in &self.rows {
            let vals = [r.theta[0], r.theta[1], r.g[0], r.g[1], r.e[0], r.e[1], r.j11, r.j21, r.j22];
            let cells: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{},{}", r.k, cells.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut metadata = Vec::new();
        let mut header_seen = false;
        for (idx, line) in text.lines().enumerate() {
            let bad = |message: String| Error::Config { line: idx + 1, key: None, message };
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once('=') {
                    metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !header_seen {
                if line != RUN_COLUMNS {
                    return Err(bad(format!("expected header `{RUN_COLUMNS}`")));
                }
                header_seen = true;
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 10 {
                return Err(bad(format!("expected 10 columns, got {}", cells.len())));
            }
            let k = cells[0].parse::<usize>().map_err(|_| bad(format!("bad cycle index `{}`", cells[0])))?;
            let mut v = [0.0; 9];
            for (slot, cell) in v.iter_mut().zip(&cells[1..]) {
                *slot = cell.parse::<f64>().map_err(|_| bad(format!("bad number `{cell}`")))?;
            }
            rows.push(RunRow {
                k,
                theta: [v[0], v[1]],
                g: [v[2], v[3]],
                e: [v[4], v[5]],
                j11: v[6],
                j21: v[7],
                j22: v[8],
            });
        }
        Ok(Self { rows, metadata })
    }

    /// `|mean of G_i over cycles MEAN_FROM..=STATS_TO - r_i|`; NaN when the
    /// run is too short.
    pub fn mean_deviation(&self, reference: [f64; 2]) -> [f64; 2] {
        let sel: Vec<&RunRow> = self.rows.iter().filter(|r| r.k >= MEAN_FROM && r.k <= STATS_TO).collect();
        let n = sel.len() as f64;
        let mut out = [f64::NAN; 2];
        if sel.is_empty() {
            return out;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let mean = sel.iter().map(|r| r.g[i]).sum::<f64>() / n;
            *slot = (mean - reference[i]).abs();
        }
        out
    }

    /// Largest `G_i` over cycles `1..=STATS_TO`.
    pub fn max_output(&self) -> [f64; 2] {
        let mut out = [f64::NAN; 2];
        for r in self.rows.iter().filter(|r| r.k <= STATS_TO) {
            for i in 0..2 {
                if out[i].is_nan() || r.g[i] > out[i] {
                    out[i] = r.g[i];
                }
            }
        }
        out
    }
}

/// Runs replication `replication` of `cfg`.
pub fn run_replication(cfg: &ExperimentConfig, replication: u64) -> Result<RunSeries> {
    cfg.validate()?;
    let mut metadata = config_metadata(cfg);
    metadata.push(("replication".into(), replication.to_string()));
    if cfg.num_control_cycles == 0 {
        return Ok(RunSeries { rows: Vec::new(), metadata });
    }
    let (a1, a2) = replication_inputs(cfg, replication, cfg.horizon())?;
    let mut plant = TrafficPlant::new(&a1, &a2, cfg.plan()?, cfg.service_profile()?, cfg.phi, [0.0, 0.0], cfg.cycles_per_control)?;
    let mut state = ControllerState::new(cfg.theta_init, cfg.reference, cfg.initial_gain_matrix(), cfg.mode, cfg.guards())?;
    let records = run_closed_loop(&mut plant, &mut state, cfg.num_control_cycles)?;
    Ok(RunSeries { rows: records.iter().map(RunRow::from).collect(), metadata })
}

/// Replications `0..cfg.replications`, in parallel, returned in order.
pub fn run_replications(cfg: &ExperimentConfig) -> Result<Vec<RunSeries>> {
    (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| run_replication(cfg, r))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub zeta: f64,
    pub mode: Mode,
    pub mean_abs_dev: [f64; 2],
    pub max_g: [f64; 2],
    pub replications: usize,
}

/// Replication averages of the per-run statistics.
pub fn summarize(zeta: f64, mode: Mode, reference: [f64; 2], series: &[RunSeries]) -> SummaryRow {
    let n = series.len() as f64;
    let mut dev = [0.0; 2];
    let mut max = [0.0; 2];
    for s in series {
        let d = s.mean_deviation(reference);
        let m = s.max_output();
        for i in 0..2 {
            dev[i] += d[i];
            max[i] += m[i];
        }
    }
    for i in 0..2 {
        dev[i] /= n;
        max[i] /= n;
    }
    SummaryRow { zeta, mode, mean_abs_dev: dev, max_g: max, replications: series.len() }
}

pub const SUMMARY_COLUMNS: &str = "zeta,mode,mean_abs_dev1,mean_abs_dev2,max_g1,max_g2,replications";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SummaryRow>,
    pub metadata: Vec<(String, String)>,
}

/// One sweep cell: the config with both arrival spreads set to `zeta`, run
/// in `mode`.
pub fn cell_config(cfg: &ExperimentConfig, zeta: f64, mode: Mode) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.alpha1.zeta = zeta;
    c.alpha2_tilde.zeta = zeta;
    c.mode = mode;
    c
}

/// Every `zeta` in both modes. Calls `on_cell` with each cell's runs as
/// they complete, in deterministic order.
pub fn sweep(
    cfg: &ExperimentConfig,
    zetas: &[f64],
    mut on_cell: impl FnMut(&ExperimentConfig, &[RunSeries]) -> Result<()>,
) -> Result<SweepSummary> {
    let mut rows = Vec::new();
    for &zeta in zetas {
        for mode in [Mode::Centralized, Mode::Decentralized] {
            let cell = cell_config(cfg, zeta, mode);
            let series = run_replications(&cell)?;
            on_cell(&cell, &series)?;
            rows.push(summarize(zeta, mode, cell.reference, &series));
        }
    }
    Ok(SweepSummary { rows, metadata: config_metadata(cfg) })
}

impl SweepSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_metadata(&mut out, "sweep summary", &self.metadata);
        let _ = writeln!(out, "{SUMMARY_COLUMNS}");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_f64(r.zeta),
                r.mode,
                fmt_f64(r.mean_abs_dev[0]),
                fmt_f64(r.mean_abs_dev[1]),
                fmt_f64(r.max_g[0]),
                fmt_f64(r.max_g[1]),
                r.replications
            );
        }
        out
    }
}
