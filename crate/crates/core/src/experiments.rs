//! Sweeps generators across sizes and seeds, records (|X|, L) pairs, and
//! fits log-log growth exponents.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators;
use crate::geom::PointSet;
use crate::peel::layer_number;

/// Point-set family a sweep draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Collinear,
    Convex,
    UniformBall,
    Grid,
    Onion,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Collinear => "collinear",
            Family::Convex => "convex",
            Family::UniformBall => "uniform_ball",
            Family::Grid => "grid",
            Family::Onion => "onion",
        }
    }

    /// Whether the family ignores the seed.
    pub fn is_deterministic(self) -> bool {
        !matches!(self, Family::UniformBall)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collinear" => Ok(Family::Collinear),
            "convex" => Ok(Family::Convex),
            "uniform_ball" | "uniform-ball" => Ok(Family::UniformBall),
            "grid" => Ok(Family::Grid),
            "onion" => Ok(Family::Onion),
            other => Err(Error::invalid(format!(
                "unknown family `{other}` (expected collinear, convex, uniform_ball, grid, or onion)"
            ))),
        }
    }
}

/// One generated-and-peeled data point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub family: Family,
    pub d: usize,
    pub n_param: usize,
    pub actual_size: usize,
    pub layer_number: u32,
    pub seed: u64,
    /// Wall time of generation plus peeling; 0 unless timings were requested.
    pub wall_time_ms: u64,
}

/// What to sweep. `alpha` is consulted by the onion family only.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub family: Family,
    pub d: usize,
    pub n_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub alpha: f64,
    /// Worker threads; 1 keeps everything on the caller's thread.
    pub threads: usize,
    /// Record wall times (trades away byte-reproducibility of the output).
    pub record_timings: bool,
}

impl SweepConfig {
    pub fn new(family: Family, d: usize, n_list: Vec<usize>, seeds: Vec<u64>) -> Self {
        SweepConfig {
            family,
            d,
            n_list,
            seeds,
            alpha: 4.0,
            threads: 1,
            record_timings: false,
        }
    }
}

/// Least-squares fit of log layer_number against log actual_size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub point_count: usize,
}

/// Generates and peels every (n, seed) pair, in canonical (n, seed) order.
/// Deterministic apart from `record_timings`; `threads > 1` changes the
/// schedule but not the output order or contents.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    if cfg.n_list.is_empty() {
        return Err(Error::invalid("n_list must be nonempty"));
    }
    if !cfg.n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("n_list must be strictly increasing"));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::invalid("seeds must be nonempty"));
    }
    if cfg.threads == 0 {
        return Err(Error::invalid("threads must be at least 1"));
    }

    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let tasks: Vec<(usize, u64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();

    let run_one = |&(n, seed): &(usize, u64)| -> Result<ExperimentRecord> {
        let start = Instant::now();
        let x = generate(cfg, n, seed)?;
        let layers = layer_number(&x)?;
        let wall_time_ms = if cfg.record_timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        Ok(ExperimentRecord {
            family: cfg.family,
            d: x.dim(),
            n_param: n,
            actual_size: x.len(),
            layer_number: layers,
            seed,
            wall_time_ms,
        })
    };

    if cfg.threads == 1 {
        tasks.iter().map(run_one).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::invalid(format!("could not start worker threads: {e}")))?;
        pool.install(|| tasks.par_iter().map(run_one).collect())
    }
}

fn generate(cfg: &SweepConfig, n: usize, seed: u64) -> Result<PointSet<f64>> {
    match cfg.family {
        Family::Collinear => {
            expect_dim(cfg, 2)?;
            generators::gen_collinear(n)
        }
        Family::Convex => {
            expect_dim(cfg, 2)?;
            generators::gen_convex_position(n)
        }
        Family::UniformBall => generators::gen_uniform_ball(cfg.d, n, seed),
        Family::Grid => generators::gen_grid(cfg.d, n),
        Family::Onion => {
            expect_dim(cfg, 2)?;
            generators::gen_onion(n, cfg.alpha).map(|(x, _)| x)
        }
    }
}

fn expect_dim(cfg: &SweepConfig, want: usize) -> Result<()> {
    if cfg.d != want {
        return Err(Error::invalid(format!(
            "family {} is {want}-dimensional, got d = {}",
            cfg.family, cfg.d
        )));
    }
    Ok(())
}

/// Ordinary least squares on (log size, log mean layer number), one fit
/// point per n_param with seeds averaged arithmetically first.
pub fn fit_exponent(records: &[ExperimentRecord]) -> Result<ExponentFit> {
    if records.iter().any(|r| r.layer_number == 0 || r.actual_size == 0) {
        return Err(Error::invalid("records must have positive size and layer number"));
    }
    // Group by n_param, preserving size order.
    let mut groups: Vec<(usize, Vec<&ExperimentRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(n, _)| *n == r.n_param) {
            Some((_, v)) => v.push(r),
            None => groups.push((r.n_param, vec![r])),
        }
    }
    let mut xs = Vec::with_capacity(groups.len());
    let mut ys = Vec::with_capacity(groups.len());
    for (_, group) in &groups {
        let mean_size: f64 =
            group.iter().map(|r| r.actual_size as f64).sum::<f64>() / group.len() as f64;
        let mean_layers: f64 =
            group.iter().map(|r| r.layer_number as f64).sum::<f64>() / group.len() as f64;
        xs.push(mean_size.ln());
        ys.push(mean_layers.ln());
    }
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid(format!(
            "exponent fit needs at least 2 distinct sizes, got {}",
            distinct.len()
        )));
    }

    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0 // constant data is fit exactly by the zero-slope line
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ExponentFit {
        slope,
        intercept,
        r_squared,
        point_count: xs.len(),
    })
}

/// Is the fitted slope within `tolerance` of the target?
pub fn check_claim(fit: &ExponentFit, target_slope: f64, tolerance: f64) -> Result<bool> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok((fit.slope - target_slope).abs() <= tolerance)
}
