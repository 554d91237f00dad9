//! Signal-strength sweep over the two-component benchmark.
//!
//! Every `(gamma, run)` pair generates a fresh tensor with seed
//! `base_seed + run`, clusters it with MSC and MSC-DBSCAN, and scores both.
//! Rows are emitted in `(gamma, seed, method)` order regardless of how the
//! runs were scheduled.

use std::fmt::Write as _;
use std::time::Instant;

use crate::cli::eval::evaluate;
use crate::cli::methods::{run_method, Method};
use crate::error::{Error, Result};
use crate::msc::MscConfig;
use crate::par::{self, Execution};
use crate::report::ClustersJson;
use crate::synth::{benchmark_spec, generate};

pub const SWEEP_METHODS: [Method; 2] = [Method::Msc, Method::MscDbscan];

/// Parses `start:stop:step`; `stop` is included when it lies on the grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Argument(format!("bad range '{s}', expected start:stop:step")))?;
    let (start, stop, step) = match nums[..] {
        [a] => (a, a, 1.0),
        [a, b, c] => (a, b, c),
        _ => return Err(Error::Argument(format!("bad range '{s}', expected start:stop:step"))),
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Argument(format!(
            "bad range '{s}': need step > 0 and stop >= start"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    pub runs: usize,
    pub epsilon: f64,
    pub base_seed: u64,
    pub msc: MscConfig,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub seed: u64,
    pub method: Method,
    pub ari_modes: [f64; 3],
    pub ari: f64,
    pub rmse: Option<f64>,
    pub wall_ms: Option<f64>,
    pub status: String,
    /// Cluster sizes per mode.
    pub cluster_sizes: [Vec<usize>; 3],
}

/// One benchmark instance scored under both methods.
pub fn run_instance(gamma: f64, seed: u64, epsilon: f64, msc: &MscConfig, timing: bool) -> Vec<SweepRow> {
    let failed = |method, status: String| SweepRow {
        gamma,
        seed,
        method,
        ari_modes: [f64::NAN; 3],
        ari: f64::NAN,
        rmse: None,
        wall_ms: None,
        status,
        cluster_sizes: Default::default(),
    };
    let generated = benchmark_spec(gamma, seed).and_then(|spec| generate(&spec));
    let (t, truth) = match generated {
        Ok(x) => x,
        Err(e) => return SWEEP_METHODS.iter().map(|&m| failed(m, e.kind().to_string())).collect(),
    };
    SWEEP_METHODS
        .iter()
        .map(|&method| {
            let started = Instant::now();
            let run = run_method(&t, method, epsilon, msc);
            let wall = started.elapsed().as_secs_f64() * 1e3;
            let (modes, tri) = match run {
                Ok(x) => x,
                Err(e) => return failed(method, e.kind().to_string()),
            };
            let doc = ClustersJson::new(method.name(), epsilon, &modes, &tri);
            let status = modes
                .iter()
                .find_map(|m| m.failure.as_ref().map(|f| f.kind.to_string()))
                .unwrap_or_else(|| "ok".to_string());
            let ev = match evaluate(&doc, Some(&truth.labels), Some(&t)) {
                Ok(ev) => ev,
                Err(e) => return failed(method, e.kind().to_string()),
            };
            let ari_modes = ev.ari.expect("truth supplied");
            SweepRow {
                gamma,
                seed,
                method,
                ari_modes,
                ari: ev.ari_mean().expect("truth supplied"),
                rmse: ev.rmse_weighted,
                wall_ms: timing.then_some(wall),
                status,
                cluster_sizes: modes.clone().map(|m| m.clusters.iter().map(|c| c.len()).collect()),
            }
        })
        .collect()
}

pub fn run_sweep(cfg: &SweepConfig, exec: Execution) -> Vec<SweepRow> {
    let jobs: Vec<(f64, u64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| (0..cfg.runs as u64).map(move |r| (g, r)))
        .map(|(g, r)| (g, cfg.base_seed.wrapping_add(r)))
        .collect();
    par::map_slice(exec, &jobs, |&(g, seed)| {
        run_instance(g, seed, cfg.epsilon, &cfg.msc, cfg.timing)
    })
    .into_iter()
    .flatten()
    .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const ROWS_HEADER: &str = "gamma,seed,method,mode,ari,rmse,wall_ms,ari_mode1,ari_mode2,ari_mode3,status";

pub fn rows_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},mean,{},{},{},{},{},{},{}",
            r.gamma,
            r.seed,
            r.method.name(),
            r.ari,
            opt(r.rmse),
            opt(r.wall_ms),
            r.ari_modes[0],
            r.ari_modes[1],
            r.ari_modes[2],
            r.status
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub gamma: f64,
    pub method: Method,
    pub ari_mean: f64,
    pub ari_std: f64,
    pub rmse_mean: Option<f64>,
    pub runs: usize,
}

/// Mean and sample standard deviation of ARI per `(gamma, method)`.
pub fn aggregate(rows: &[SweepRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(f64, Method)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(g, m)| g == r.gamma && m == r.method) {
            keys.push((r.gamma, r.method));
        }
    }
    keys.into_iter()
        .map(|(gamma, method)| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.gamma == gamma && r.method == method).collect();
            let aris: Vec<f64> = group.iter().map(|r| r.ari).filter(|a| a.is_finite()).collect();
            let n = aris.len() as f64;
            let mean = aris.iter().sum::<f64>() / n;
            let std = if aris.len() > 1 {
                (aris.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let rmses: Vec<f64> = group.iter().filter_map(|r| r.rmse).collect();
            let rmse_mean = (!rmses.is_empty()).then(|| rmses.iter().sum::<f64>() / rmses.len() as f64);
            AggregateRow {
                gamma,
                method,
                ari_mean: mean,
                ari_std: std,
                rmse_mean,
                runs: group.len(),
            }
        })
        .collect()
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("gamma,method,ari_mean,ari_std,rmse_mean,runs\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.gamma,
            r.method.name(),
            r.ari_mean,
            r.ari_std,
            opt(r.rmse_mean),
            r.runs
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_syntax() {
        assert_eq!(parse_range("50:100:5").unwrap().len(), 11);
        assert_eq!(parse_range("80:80:1").unwrap(), vec![80.0]);
        assert_eq!(parse_range("0:1:0.3").unwrap().len(), 4);
        assert_eq!(parse_range("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_range("70").unwrap(), vec![70.0]);
        assert!(parse_range("5:1:1").is_err());
        assert!(parse_range("1:5:0").is_err());
        assert!(parse_range("a:b:c").is_err());
    }

    #[test]
    fn aggregate_stats() {
        let row = |ari, rmse| SweepRow {
            gamma: 60.0,
            seed: 0,
            method: Method::MscDbscan,
            ari_modes: [ari; 3],
            ari,
            rmse,
            wall_ms: None,
            status: "ok".into(),
            cluster_sizes: Default::default(),
        };
        let agg = aggregate(&[row(1.0, Some(2.0)), row(0.5, None), row(0.0, Some(1.0))]);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].ari_mean, 0.5);
        assert_eq!(agg[0].ari_std, 0.5);
        assert_eq!(agg[0].rmse_mean, Some(1.5));
        assert_eq!(agg[0].runs, 3);
    }
}
