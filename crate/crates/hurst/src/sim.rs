//! Monte Carlo runner.
//!
//! Each `(n, h)` cell draws `R` fBm paths from seeds derived from
//! `(master_seed, n, h, replication)`. Every method and wavelet angle
//! is evaluated on the same paths.
//!
//! Plan files are TOML; every key is optional:
//!
//! ```toml
//! n_values = [1024, 2048, 4096]
//! h_values = [0.3, 0.5, 0.7, 0.8, 0.9]
//! methods = ["ttme", "va"]
//! wavelet_angles = [1.5707963267948966]
//! replications = 300
//! master_seed = 2718
//! levels = 10
//! level_range = [4, 10]
//! groups = 8
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use hurst_core::{estimate_from_pyramid, ndwt_forward, pollen_filter, EstimatorConfig, Method};
use rayon::prelude::*;

use crate::fbm::{derive_seed, FbmGenerator};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "n,true_h,method,mean,variance,mse,replications";
pub const WORKERS_ENV: &str = "HURST_WORKERS";
pub const DEFAULT_SEED: u64 = 2718;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationPlan {
    pub n_values: Vec<usize>,
    pub h_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub wavelet_angles: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub levels: usize,
    pub level_range: (usize, usize),
    pub groups: usize,
}

impl Default for SimulationPlan {
    fn default() -> Self {
        Self {
            n_values: vec![1 << 10, 1 << 11, 1 << 12],
            h_values: vec![0.3, 0.5, 0.7, 0.8, 0.9],
            methods: Method::ALL.to_vec(),
            wavelet_angles: vec![PI / 2.0],
            replications: 300,
            master_seed: DEFAULT_SEED,
            levels: 10,
            level_range: (4, 10),
            groups: 8,
        }
    }
}

impl SimulationPlan {
    /// Defaults restricted to one path length: preset 1, 2, 3 use
    /// `N = 2^10, 2^11, 2^12`.
    pub fn table(index: u8) -> Result<Self> {
        let n = match index {
            1 => 1 << 10,
            2 => 1 << 11,
            3 => 1 << 12,
            _ => return Err(Error::InvalidPlan(format!("no table {index}"))),
        };
        Ok(Self {
            n_values: vec![n],
            ..Self::default()
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    fn config(&self, method: Method, angle: f64) -> EstimatorConfig {
        EstimatorConfig {
            wavelet_angle: angle,
            levels: self.levels,
            level_range: self.level_range,
            groups: self.groups,
            ..EstimatorConfig::new(method)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::InvalidPlan(format!("{what} is empty")));
        if self.n_values.is_empty() {
            return empty("n_values");
        }
        if self.h_values.is_empty() {
            return empty("h_values");
        }
        if self.methods.is_empty() {
            return empty("methods");
        }
        if self.wavelet_angles.is_empty() {
            return empty("wavelet_angles");
        }
        if self.replications == 0 {
            return Err(Error::InvalidPlan("replications must be >= 1".into()));
        }
        if let Some(a) = self.wavelet_angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidPlan(format!("wavelet angle {a}")));
        }
        self.config(self.methods[0], PI / 2.0).validate()?;
        Ok(())
    }

    /// CSV label for a method, suffixed with the angle when several are run.
    pub fn label(&self, method: Method, angle: f64) -> String {
        if self.wavelet_angles.len() > 1 {
            format!("{}@{angle}", method.name())
        } else {
            method.name().to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub true_h: f64,
    pub method: String,
    pub mean: f64,
    pub variance: f64,
    pub mse: f64,
    pub replications: usize,
}

/// `(mean, variance, mse)` with variance over `R − 1` and MSE over `R`.
pub fn summarize(estimates: &[f64], true_h: f64) -> Result<(f64, f64, f64)> {
    let r = estimates.len();
    if r < 2 {
        return Err(Error::TooFewReplications(r));
    }
    let rf = r as f64;
    let mean = estimates.iter().sum::<f64>() / rf;
    let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    let mse = estimates.iter().map(|e| (e - true_h).powi(2)).sum::<f64>() / rf;
    Ok((mean, variance, mse))
}

/// Identifies the path handed to an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub n: usize,
    pub h: f64,
    pub replication: usize,
}

/// Called once per (cell, replication, method, angle) with the path the
/// estimate was computed from.
pub type Observer<'a> = &'a (dyn Fn(Draw, Method, &[f64]) + Sync);

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Worker threads; `None` reads `HURST_WORKERS`, then falls back to the
    /// rayon default.
    pub workers: Option<usize>,
    pub observer: Option<Observer<'a>>,
}

pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w| w > 0)
}

pub fn run_simulation(plan: &SimulationPlan, options: &RunOptions<'_>) -> Result<Vec<SummaryRow>> {
    plan.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = options.workers.or_else(workers_from_env) {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let mut rows = Vec::new();
    for &n in &plan.n_values {
        for &h in &plan.h_values {
            rows.extend(pool.install(|| run_cell(plan, n, h, options.observer))?);
        }
    }
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.true_h.total_cmp(&b.true_h))
            .then_with(|| a.method.cmp(&b.method))
    });
    Ok(rows)
}

fn run_cell(
    plan: &SimulationPlan,
    n: usize,
    h: f64,
    observer: Option<Observer<'_>>,
) -> Result<Vec<SummaryRow>> {
    let generator = FbmGenerator::new(n, h, 1.0)?;
    let combos: Vec<(f64, Method)> = plan
        .wavelet_angles
        .iter()
        .flat_map(|&a| plan.methods.iter().map(move |&m| (a, m)))
        .collect();
    let cell_err = |method: Method, replication: Option<usize>, e: Error| Error::Cell {
        n,
        h,
        method,
        replication,
        source: Box::new(e),
    };
    let per_rep: Vec<Vec<f64>> = (0..plan.replications)
        .into_par_iter()
        .map(|rep| {
            let path = generator.generate(derive_seed(plan.master_seed, n, h, rep));
            let draw = Draw {
                n,
                h,
                replication: rep,
            };
            let mut out = Vec::with_capacity(combos.len());
            for &angle in &plan.wavelet_angles {
                let filter = pollen_filter(angle);
                let pyr = ndwt_forward(path.values(), &filter, plan.levels)
                    .map_err(|e| cell_err(plan.methods[0], Some(rep), e.into()))?;
                for &method in &plan.methods {
                    if let Some(obs) = observer {
                        obs(draw, method, path.values());
                    }
                    let est = estimate_from_pyramid(&pyr, &plan.config(method, angle))
                        .map_err(|e| cell_err(method, Some(rep), e.into()))?;
                    out.push(est.h_hat);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    combos
        .iter()
        .enumerate()
        .map(|(c, &(angle, method))| {
            let est: Vec<f64> = per_rep.iter().map(|r| r[c]).collect();
            let (mean, variance, mse) =
                summarize(&est, h).map_err(|e| cell_err(method, None, e))?;
            Ok(SummaryRow {
                n,
                true_h: h,
                method: plan.label(method, angle),
                mean,
                variance,
                mse,
                replications: plan.replications,
            })
        })
        .collect()
}

pub fn format_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.true_h, r.method, r.mean, r.variance, r.mse, r.replications
        );
    }
    out
}

pub fn format_json(rows: &[SummaryRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}
