//! Batches of independent runs on a rayon pool.
//!
//! Run `k` gets the `k`-th draw of a generator seeded with the master seed,
//! and results are collected in run order, so a batch is a pure function of
//! the master seed apart from its `_ms` columns.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{io_err, Error, Result};
use crate::experiments::{
    armpa_record, mission_record, motion_record, scaling_record, scaling_world, ArmpaRecord, MissionRecord, MotionRecord,
    ScalingRecord,
};
use crate::stats::{linear_fit, BatchStats, LinearFit, Quantiles, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One random world and one mission plan per run.
    Mission,
    /// One motion scenario and one path per run.
    Motion,
    /// One full executive run per run.
    Armpa,
    /// Mission planning time against waypoint count.
    Scaling,
}

pub fn run_seeds(master: u64, runs: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..runs).map(|_| rng.gen()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub nodes: usize,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Batch {
    Mission(BatchStats<MissionRecord>),
    Motion(BatchStats<MotionRecord>),
    Armpa(BatchStats<ArmpaRecord>),
    /// Records, per-size median planning time and the line through the medians.
    Scaling(BatchStats<ScalingRecord>, Vec<ScalingPoint>, LinearFit),
}

#[derive(Serialize)]
struct BatchFile<'a> {
    mode: Mode,
    engine: String,
    seed: u64,
    runs: usize,
    violations: usize,
    summary: BTreeMap<&'static str, Quantiles>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling_ms: Option<(&'a [ScalingPoint], &'a LinearFit)>,
}

fn parallel<R: Send>(seeds: &[u64], f: impl Fn(usize, u64) -> R + Sync) -> Vec<R> {
    seeds.par_iter().enumerate().map(|(k, &s)| f(k, s)).collect()
}

/// Runs `runs` independent runs, or `runs` per waypoint count in scaling
/// mode. Scaling runs are timed one at a time so they do not compete for
/// cores.
pub fn monte_carlo(cfg: &RunConfig, runs: usize, mode: Mode) -> Result<Batch> {
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(match mode {
        Mode::Mission => {
            let seeds = run_seeds(cfg.run.seed, runs);
            Batch::Mission(BatchStats::new(parallel(&seeds, |k, s| mission_record(cfg, k, s, None))))
        }
        Mode::Motion => {
            let seeds = run_seeds(cfg.run.seed, runs);
            Batch::Motion(BatchStats::new(parallel(&seeds, |k, s| motion_record(cfg, k, s))))
        }
        Mode::Armpa => {
            let seeds = run_seeds(cfg.run.seed, runs);
            Batch::Armpa(BatchStats::new(parallel(&seeds, |k, s| armpa_record(cfg, k, s))))
        }
        Mode::Scaling => {
            let cfg = &cfg.scaling_config();
            let sizes = &cfg.scaling.nodes;
            let seeds = run_seeds(cfg.run.seed, runs * sizes.len());
            let jobs: Vec<(usize, u64, usize)> =
                seeds.iter().enumerate().map(|(k, &s)| (k, s, sizes[k / runs])).collect();
            let worlds: Vec<_> = jobs.par_iter().map(|&(_, s, n)| scaling_world(cfg, n, s)).collect();
            let records: Vec<ScalingRecord> =
                jobs.iter().zip(worlds).map(|(&(k, s, n), w)| scaling_record(cfg, k, s, n, w)).collect();
            let points: Vec<ScalingPoint> = sizes
                .iter()
                .map(|&n| {
                    let ms: Vec<f64> = records.iter().filter(|r| r.nodes == n).map(|r| r.mission_ms).collect();
                    ScalingPoint { nodes: n, median_ms: Quantiles::of(&ms).median }
                })
                .collect();
            let x: Vec<f64> = points.iter().map(|p| p.nodes as f64).collect();
            let y: Vec<f64> = points.iter().map(|p| p.median_ms).collect();
            let fit = linear_fit(&x, &y);
            Batch::Scaling(BatchStats::new(records), points, fit)
        }
    })
}

impl Batch {
    pub fn mode(&self) -> Mode {
        match self {
            Batch::Mission(_) => Mode::Mission,
            Batch::Motion(_) => Mode::Motion,
            Batch::Armpa(_) => Mode::Armpa,
            Batch::Scaling(..) => Mode::Scaling,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Batch::Mission(b) => b.records.len(),
            Batch::Motion(b) => b.records.len(),
            Batch::Armpa(b) => b.records.len(),
            Batch::Scaling(b, ..) => b.records.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn violations(&self) -> usize {
        match self {
            Batch::Mission(b) => b.violations,
            Batch::Motion(b) => b.violations,
            Batch::Armpa(b) => b.violations,
            Batch::Scaling(b, ..) => b.violations,
        }
    }

    /// Writes `records.csv`, `summary.csv` and `batch.json` into `out`.
    pub fn write(&self, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(out).map_err(io_err(out))?;
        let records = out.join("records.csv");
        let summary = out.join("summary.csv");
        let json = out.join("batch.json");
        fn emit<R: Record>(b: &BatchStats<R>, records: &Path, summary: &Path) -> Result<BTreeMap<&'static str, Quantiles>> {
            b.write_records(records)?;
            b.write_summary(summary)?;
            Ok(b.summary_map())
        }
        let (map, scaling_ms) = match self {
            Batch::Mission(b) => (emit(b, &records, &summary)?, None),
            Batch::Motion(b) => (emit(b, &records, &summary)?, None),
            Batch::Armpa(b) => (emit(b, &records, &summary)?, None),
            Batch::Scaling(b, points, fit) => (emit(b, &records, &summary)?, Some((points.as_slice(), fit))),
        };
        let file = BatchFile {
            mode: self.mode(),
            engine: cfg.run.engine.to_string(),
            seed: cfg.run.seed,
            runs: self.len(),
            violations: self.violations(),
            summary: map,
            scaling_ms,
        };
        let f = std::fs::File::create(&json).map_err(io_err(&json))?;
        serde_json::to_writer_pretty(f, &file)?;
        Ok(vec![records, summary, json])
    }
}
