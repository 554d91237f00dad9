//! Clusters JSON document written by `cluster` and read by `eval`.
//!
//! Key order is fixed by field order:
//! `{"epsilon","method","modes":[{"mode","msc_cluster","clusters","noise","d","bound","converged"}],"triclusters":[{"j1","j2","j3","score"}]}`.
//! Non-finite numbers are written as `null`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{ModeClustering, TriclusterSet};
use crate::tensor::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustersJson {
    pub epsilon: f64,
    pub method: String,
    pub modes: Vec<ModeJson>,
    pub triclusters: Vec<TriclusterJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeJson {
    pub mode: Mode,
    pub msc_cluster: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
    pub d: Vec<f64>,
    pub bound: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriclusterJson {
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
    pub j3: Vec<usize>,
    pub score: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ClustersJson {
    pub fn new(method: &str, epsilon: f64, modes: &[ModeClustering; 3], tri: &TriclusterSet) -> Self {
        ClustersJson {
            epsilon,
            method: method.to_string(),
            modes: modes
                .iter()
                .map(|mc| ModeJson {
                    mode: mc.mode,
                    msc_cluster: mc.msc_cluster.indices().to_vec(),
                    clusters: mc.clusters.iter().map(|s| s.indices().to_vec()).collect(),
                    noise: mc.noise.indices().to_vec(),
                    d: mc.diagnostics.as_ref().map(|g| g.d.clone()).unwrap_or_default(),
                    bound: mc.diagnostics.as_ref().and_then(|g| finite(g.bound)),
                    converged: mc.diagnostics.as_ref().is_some_and(|g| g.converged),
                })
                .collect(),
            triclusters: tri
                .triclusters
                .iter()
                .map(|t| TriclusterJson {
                    j1: t.sets[0].indices().to_vec(),
                    j2: t.sets[1].indices().to_vec(),
                    j3: t.sets[2].indices().to_vec(),
                    score: finite(t.score),
                })
                .collect(),
        }
    }

    /// Predicted clusters for `mode`, empty if the mode is absent.
    pub fn mode_clusters(&self, mode: Mode) -> &[Vec<usize>] {
        self.modes
            .iter()
            .find(|m| m.mode == mode)
            .map_or(&[][..], |m| &m.clusters[..])
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("clusters document serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json_string();
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("document serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
