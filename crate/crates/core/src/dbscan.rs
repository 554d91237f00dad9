//! Density-based clustering and the split step applied to an MSC cluster.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::msc::{spread_bound, LogBase, SimilarityMatrix};
use crate::par::{self, Execution};
use crate::tensor::IndexSet;

/// Smallest radius returned by [`derived_radius`].
pub const MIN_RADIUS: f64 = 1e-12;

/// Minimum neighbourhood size used by the split step.
pub const SPLIT_MINPTS: usize = 2;

/// Points of a common dimension under the euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 && !data.is_empty() {
            return Err(Error::Argument("zero-dimensional points".into()));
        }
        if dim > 0 && !data.len().is_multiple_of(dim) {
            return Err(Error::Argument(format!(
                "{} values do not form points of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite point coordinate".into()));
        }
        Ok(PointSet { dim, data })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Argument("points of mixed dimension".into()));
        }
        PointSet::new(dim, points.concat())
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        euclidean(self.point(a), self.point(b))
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Noise,
    Cluster(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbscanLabels {
    pub labels: Vec<Label>,
    pub n_clusters: usize,
}

impl DbscanLabels {
    /// Member indices of every cluster, in cluster-id order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (i, l) in self.labels.iter().enumerate() {
            if let Label::Cluster(c) = l {
                out[*c].push(i);
            }
        }
        out
    }

    pub fn noise(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == Label::Noise)
            .collect()
    }
}

pub fn dbscan(points: &PointSet, radius: f64, minpts: usize) -> Result<DbscanLabels> {
    dbscan_with(points, radius, minpts, Execution::Sequential)
}

/// Classic DBSCAN with closed neighbourhoods (`distance <= radius`, the
/// point itself counted). Seeds are scanned in index order; cluster ids
/// follow discovery order.
pub fn dbscan_with(points: &PointSet, radius: f64, minpts: usize, exec: Execution) -> Result<DbscanLabels> {
    if !(radius > 0.0) {
        return Err(Error::Argument(format!("radius must be positive, got {radius}")));
    }
    if minpts == 0 {
        return Err(Error::Argument("minpts must be at least 1".into()));
    }
    let n = points.len();
    let neighbors: Vec<Vec<usize>> = par::map_range(exec, n, |i| {
        (0..n).filter(|&j| points.distance(i, j) <= radius).collect()
    });

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut next_id = 0;
    for seed in 0..n {
        if labels[seed].is_some() {
            continue;
        }
        if neighbors[seed].len() < minpts {
            labels[seed] = Some(Label::Noise);
            continue;
        }
        let id = next_id;
        next_id += 1;
        labels[seed] = Some(Label::Cluster(id));
        let mut queue: VecDeque<usize> = neighbors[seed].iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            match labels[q] {
                Some(Label::Cluster(_)) => continue,
                // Previously marked noise: becomes a border point.
                Some(Label::Noise) => labels[q] = Some(Label::Cluster(id)),
                None => {
                    labels[q] = Some(Label::Cluster(id));
                    if neighbors[q].len() >= minpts {
                        queue.extend(neighbors[q].iter().copied());
                    }
                }
            }
        }
    }
    Ok(DbscanLabels {
        labels: labels.into_iter().map(|l| l.expect("every point visited")).collect(),
        n_clusters: next_id,
    })
}

/// `√(l·ε/2 + √max(0, ln(m − l)))`, clamped below at [`MIN_RADIUS`].
pub fn derived_radius(l: usize, epsilon: f64, m: usize) -> Result<f64> {
    derived_radius_with(l, epsilon, m, LogBase::Natural)
}

pub fn derived_radius_with(l: usize, epsilon: f64, m: usize, log_base: LogBase) -> Result<f64> {
    if l < 2 || l + 1 > m {
        return Err(Error::Argument(format!(
            "cluster size {l} outside 2..={} for m = {m}",
            m.saturating_sub(1)
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(spread_bound(l, epsilon, m, log_base).sqrt().max(MIN_RADIUS))
}

/// Result of splitting one MSC cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// Sub-clusters ordered by descending mean `d`.
    pub clusters: Vec<IndexSet>,
    pub noise: IndexSet,
    pub radius: f64,
}

/// Runs DBSCAN on the full columns of `C` for the members of `j`.
pub fn split_cluster(c: &SimilarityMatrix, j: &IndexSet, epsilon: f64) -> Result<Split> {
    split_cluster_with(c, j, epsilon, LogBase::Natural, Execution::Sequential)
}

pub fn split_cluster_with(
    c: &SimilarityMatrix,
    j: &IndexSet,
    epsilon: f64,
    log_base: LogBase,
    exec: Execution,
) -> Result<Split> {
    if j.len() < 2 {
        return Err(Error::Argument(format!(
            "split needs at least 2 members, got {}",
            j.len()
        )));
    }
    let m = c.m();
    if let Some(&last) = j.indices().last() {
        if last >= m {
            return Err(Error::range(format!("{} member", j.mode()), last, m));
        }
    }
    let radius = derived_radius_with(j.len(), epsilon, m, log_base)?;
    let mut data = Vec::with_capacity(j.len() * m);
    for &i in j.indices() {
        data.extend_from_slice(c.column(i));
    }
    let points = PointSet::new(m, data)?;
    let labels = dbscan_with(&points, radius, SPLIT_MINPTS, exec)?;

    let to_original = |local: &[usize]| -> Vec<usize> { local.iter().map(|&p| j.indices()[p]).collect() };
    let mut clusters: Vec<(f64, IndexSet)> = labels
        .clusters()
        .iter()
        .map(|members| {
            let idx = to_original(members);
            let mean = idx.iter().map(|&i| c.d[i]).sum::<f64>() / idx.len() as f64;
            (mean, IndexSet::from_sorted(j.mode(), idx))
        })
        .collect();
    // Stable: equal means keep discovery order.
    clusters.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(Split {
        clusters: clusters.into_iter().map(|(_, s)| s).collect(),
        noise: IndexSet::from_sorted(j.mode(), to_original(&labels.noise())),
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msc::{similarity_matrix, SliceSpectra};
    use crate::tensor::Mode;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(1, xs.to_vec()).unwrap()
    }

    #[test]
    fn one_dimensional_example() {
        let l = dbscan(&line(&[0.0, 0.1, 10.0]), 1.0, 2).unwrap();
        assert_eq!(l.labels, vec![Label::Cluster(0), Label::Cluster(0), Label::Noise]);
    }

    #[test]
    fn identical_points_single_cluster() {
        let l = dbscan(&line(&[3.0; 6]), 0.5, 2).unwrap();
        assert_eq!(l.n_clusters, 1);
        assert!(l.noise().is_empty());
    }

    #[test]
    fn empty_input() {
        let l = dbscan(&PointSet::new(3, vec![]).unwrap(), 1.0, 2).unwrap();
        assert!(l.labels.is_empty());
        assert_eq!(l.n_clusters, 0);
    }

    #[test]
    fn closed_neighbourhood() {
        let l = dbscan(&line(&[0.0, 1.0]), 1.0, 2).unwrap();
        assert_eq!(l.n_clusters, 1);
    }

    #[test]
    fn border_point_claimed_by_first_cluster() {
        // Point 3 is within reach of a core point of both groups.
        let l = dbscan(&line(&[0.0, 0.1, 0.2, 1.0, 1.8, 1.9, 2.0]), 0.85, 4).unwrap();
        assert_eq!(l.n_clusters, 2);
        assert_eq!(l.labels[3], Label::Cluster(0));
        assert_eq!(l.labels[0], Label::Cluster(0));
        assert_eq!(l.labels[6], Label::Cluster(1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(dbscan(&line(&[0.0]), 0.0, 2).is_err());
        assert!(dbscan(&line(&[0.0]), 1.0, 0).is_err());
    }

    #[test]
    fn radius_examples() {
        let r = derived_radius(10, 0.001, 50).unwrap();
        assert!((r - (0.005 + 40f64.ln().sqrt()).sqrt()).abs() < 1e-15);
        assert!((r - 1.387_676).abs() < 1e-6, "{r}");
        let r = derived_radius(20, 0.001, 50).unwrap();
        assert!((r - 1.361_703).abs() < 1e-6, "{r}");
        assert_eq!(derived_radius(2, 1e-300, 3).unwrap(), MIN_RADIUS);
        assert!(derived_radius(1, 0.001, 50).is_err());
        assert!(derived_radius(50, 0.001, 50).is_err());
    }

    fn unit(dim: usize, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        v
    }

    #[test]
    fn split_pair_of_equal_columns() {
        let vecs = vec![unit(3, 0), unit(3, 0), unit(3, 1), unit(3, 2)];
        let s = SliceSpectra::from_eigenpairs(Mode::One, vec![1.0, 1.0, 0.2, 0.2], &vecs).unwrap();
        let sim = similarity_matrix(&s);
        let j = IndexSet::new(Mode::One, vec![0, 1], 4).unwrap();
        let split = split_cluster(&sim, &j, 0.001).unwrap();
        assert_eq!(split.clusters, vec![j]);
        assert!(split.noise.is_empty());
    }

    #[test]
    fn split_orders_by_mean_d() {
        // Block {0,1} is larger in lambda than block {2,3}.
        let vecs = vec![unit(4, 0), unit(4, 0), unit(4, 1), unit(4, 1), unit(4, 2), unit(4, 3)];
        let lam = vec![0.6, 0.6, 1.0, 1.0, 0.1, 0.1];
        let sim = similarity_matrix(&SliceSpectra::from_eigenpairs(Mode::Two, lam, &vecs).unwrap());
        let j = IndexSet::new(Mode::Two, vec![0, 1, 2, 3], 6).unwrap();
        let split = split_cluster(&sim, &j, 0.001).unwrap();
        let got: Vec<&[usize]> = split.clusters.iter().map(|s| s.indices()).collect();
        assert_eq!(got, vec![&[2, 3][..], &[0, 1][..]]);
    }
}
