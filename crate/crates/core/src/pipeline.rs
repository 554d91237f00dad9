//! End-to-end MSC and MSC-DBSCAN over the three modes, plus tricluster
//! assembly.

use crate::dbscan::split_cluster_with;
use crate::error::{Error, Result};
use crate::msc::{msc_mode, ModeMsc, MscConfig};
use crate::par;
use crate::tensor::{IndexSet, Mode, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct MscDiagnostics {
    pub d: Vec<f64>,
    pub l: usize,
    pub bound: f64,
    pub converged: bool,
    pub lambda_max: f64,
    pub lambda_over_mu: f64,
    /// `√ε ≤ 1/(m − l)` for the returned cluster.
    pub epsilon_condition: bool,
}

/// A mode that could not be clustered, e.g. all slices zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeFailure {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ModeFailure {
    fn from(e: &Error) -> Self {
        ModeFailure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeClustering {
    pub mode: Mode,
    /// Cluster returned by MSC before splitting (empty if not converged).
    pub msc_cluster: IndexSet,
    /// Disjoint sub-clusters ordered by descending mean `d`.
    pub clusters: Vec<IndexSet>,
    pub noise: IndexSet,
    pub diagnostics: Option<MscDiagnostics>,
    /// DBSCAN radius, when a split was attempted.
    pub radius: Option<f64>,
    pub failure: Option<ModeFailure>,
}

impl ModeClustering {
    pub fn failed(mode: Mode, err: &Error) -> Self {
        ModeClustering {
            mode,
            msc_cluster: IndexSet::empty(mode),
            clusters: Vec::new(),
            noise: IndexSet::empty(mode),
            diagnostics: None,
            radius: None,
            failure: Some(err.into()),
        }
    }

    /// MSC output as-is: the converged cluster, unsplit.
    pub fn from_msc(out: &ModeMsc) -> Self {
        let r = &out.result;
        ModeClustering {
            mode: r.mode,
            msc_cluster: r.cluster.clone(),
            clusters: if r.converged {
                vec![r.cluster.clone()]
            } else {
                Vec::new()
            },
            noise: IndexSet::empty(r.mode),
            diagnostics: Some(diagnostics(out)),
            radius: None,
            failure: None,
        }
    }

    pub fn mean_d(&self, set: &IndexSet) -> f64 {
        match &self.diagnostics {
            Some(diag) if !set.is_empty() => set.indices().iter().map(|&i| diag.d[i]).sum::<f64>() / set.len() as f64,
            _ => f64::NAN,
        }
    }
}

fn diagnostics(out: &ModeMsc) -> MscDiagnostics {
    let r = &out.result;
    MscDiagnostics {
        d: r.d.clone(),
        l: r.l,
        bound: r.bound,
        converged: r.converged,
        lambda_max: out.lambda_max,
        lambda_over_mu: out.lambda_over_mu,
        epsilon_condition: r.epsilon_condition(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tricluster {
    pub sets: [IndexSet; 3],
    /// Mean absolute value of the sub-cube entries.
    pub score: f64,
}

impl Tricluster {
    pub fn volume(&self) -> usize {
        self.sets.iter().map(IndexSet::len).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingRule {
    /// The i-th cluster (by descending mean `d`) of each mode form the
    /// i-th tricluster; extra clusters in longer modes are dropped.
    MeanDRank { counts: [usize; 3] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriclusterSet {
    pub triclusters: Vec<Tricluster>,
    pub pairing_rule: PairingRule,
}

pub(crate) fn check_inputs(t: &Tensor3, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if t.dims().iter().any(|&d| d < 3) {
        return Err(Error::Argument(format!(
            "every dimension must be at least 3, got {:?}",
            t.dims()
        )));
    }
    Ok(())
}

/// MSC alone on every mode.
pub fn run_msc(t: &Tensor3, epsilon: f64, config: &MscConfig) -> Result<[ModeMsc; 3]> {
    check_inputs(t, epsilon)?;
    let out = par::map_slice(config.execution, &Mode::ALL, |&mode| msc_mode(t, mode, epsilon, config));
    let [a, b, c]: [Result<ModeMsc>; 3] = out.try_into().expect("three modes");
    Ok([a?, b?, c?])
}

fn cluster_mode(t: &Tensor3, mode: Mode, epsilon: f64, config: &MscConfig) -> ModeClustering {
    let out = match msc_mode(t, mode, epsilon, config) {
        Ok(out) => out,
        Err(e) => return ModeClustering::failed(mode, &e),
    };
    let mut mc = ModeClustering::from_msc(&out);
    if !out.result.converged {
        return mc;
    }
    match split_cluster_with(
        &out.similarity,
        &out.result.cluster,
        epsilon,
        config.log_base,
        config.execution,
    ) {
        Ok(split) => {
            mc.clusters = split.clusters;
            mc.noise = split.noise;
            mc.radius = Some(split.radius);
        }
        Err(e) => {
            mc.clusters.clear();
            mc.failure = Some((&e).into());
        }
    }
    mc
}

/// MSC followed by the DBSCAN split on every mode, then rank pairing.
///
/// Failures inside one mode are recorded on that mode's [`ModeClustering`]
/// rather than aborting the run.
pub fn run_msc_dbscan(t: &Tensor3, epsilon: f64, config: &MscConfig) -> Result<([ModeClustering; 3], TriclusterSet)> {
    check_inputs(t, epsilon)?;
    let modes: [ModeClustering; 3] = par::map_slice(config.execution, &Mode::ALL, |&mode| {
        cluster_mode(t, mode, epsilon, config)
    })
    .try_into()
    .expect("three modes");
    let tri = pair_triclusters(t, &modes);
    Ok((modes, tri))
}

/// Pairs mode clusters by their mean-`d` rank.
pub fn pair_triclusters(t: &Tensor3, modes: &[ModeClustering; 3]) -> TriclusterSet {
    let ranked: Vec<Vec<&IndexSet>> = modes
        .iter()
        .map(|mc| {
            let mut sets: Vec<(f64, &IndexSet)> = mc.clusters.iter().map(|s| (mc.mean_d(s), s)).collect();
            sets.sort_by(|a, b| b.0.total_cmp(&a.0));
            sets.into_iter().map(|(_, s)| s).collect()
        })
        .collect();
    let counts = [ranked[0].len(), ranked[1].len(), ranked[2].len()];
    let n = counts.iter().copied().min().unwrap_or(0);
    let triclusters = (0..n)
        .filter_map(|r| {
            let sets = [ranked[0][r].clone(), ranked[1][r].clone(), ranked[2][r].clone()];
            let sub = t.subcube(&sets[0], &sets[1], &sets[2]).ok()?;
            let score = sub.data().iter().map(|v| v.abs()).sum::<f64>() / sub.data().len() as f64;
            Some(Tricluster { sets, score })
        })
        .collect();
    TriclusterSet {
        triclusters,
        pairing_rule: PairingRule::MeanDRank { counts },
    }
}
