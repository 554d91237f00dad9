use clap::ValueEnum;

use crate::error::Result;
use crate::msc::{msc_mode, MscConfig};
use crate::par;
use crate::pipeline::{check_inputs, pair_triclusters, run_msc_dbscan, ModeClustering, TriclusterSet};
use crate::tensor::{IndexSet, Mode, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Msc,
    MscDbscan,
    MscIterated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Msc => "msc",
            Method::MscDbscan => "msc-dbscan",
            Method::MscIterated => "msc-iterated",
        }
    }
}

/// Runs `method` on every mode. Per-mode failures are recorded, not raised.
pub fn run_method(
    t: &Tensor3,
    method: Method,
    epsilon: f64,
    config: &MscConfig,
) -> Result<([ModeClustering; 3], TriclusterSet)> {
    match method {
        Method::MscDbscan => run_msc_dbscan(t, epsilon, config),
        Method::Msc => {
            check_inputs(t, epsilon)?;
            let modes = per_mode(config, |mode| match msc_mode(t, mode, epsilon, config) {
                Ok(out) => ModeClustering::from_msc(&out),
                Err(e) => ModeClustering::failed(mode, &e),
            });
            let tri = pair_triclusters(t, &modes);
            Ok((modes, tri))
        }
        Method::MscIterated => {
            check_inputs(t, epsilon)?;
            let modes = per_mode(config, |mode| iterate_mode(t, mode, epsilon, config));
            let tri = pair_triclusters(t, &modes);
            Ok((modes, tri))
        }
    }
}

fn per_mode(config: &MscConfig, f: impl Fn(Mode) -> ModeClustering + Sync + Send) -> [ModeClustering; 3] {
    par::map_slice(config.execution, &Mode::ALL, |&m| f(m))
        .try_into()
        .expect("three modes")
}

/// Repeated MSC on the slices not yet clustered, until a run fails to
/// converge or fewer than three slices remain.
fn iterate_mode(t: &Tensor3, mode: Mode, epsilon: f64, config: &MscConfig) -> ModeClustering {
    let m = t.dim(mode);
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut result: Option<ModeClustering> = None;
    let mut found = Vec::new();
    while remaining.len() >= 3 {
        let sub = match restrict(t, mode, &remaining) {
            Ok(sub) => sub,
            Err(e) => {
                result.get_or_insert_with(|| ModeClustering::failed(mode, &e));
                break;
            }
        };
        let out = match msc_mode(&sub, mode, epsilon, config) {
            Ok(out) => out,
            Err(e) => {
                result.get_or_insert_with(|| ModeClustering::failed(mode, &e));
                break;
            }
        };
        if result.is_none() {
            // The first pass sees every slice, so its diagnostics index the full mode.
            result = Some(ModeClustering::from_msc(&out));
        }
        if !out.result.converged {
            break;
        }
        let members: Vec<usize> = out.result.cluster.indices().iter().map(|&p| remaining[p]).collect();
        remaining.retain(|i| !members.contains(i));
        found.push(IndexSet::from_sorted(mode, members));
    }
    let mut mc = result.unwrap_or_else(|| ModeClustering {
        mode,
        msc_cluster: IndexSet::empty(mode),
        clusters: Vec::new(),
        noise: IndexSet::empty(mode),
        diagnostics: None,
        radius: None,
        failure: None,
    });
    mc.clusters = found;
    mc
}

fn restrict(t: &Tensor3, mode: Mode, keep: &[usize]) -> Result<Tensor3> {
    let sets = Mode::ALL.map(|m| {
        if m == mode {
            IndexSet::from_sorted(m, keep.to_vec())
        } else {
            IndexSet::full(m, t.dim(m))
        }
    });
    t.subcube(&sets[0], &sets[1], &sets[2])
}
