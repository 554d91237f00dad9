//! Multi-slice clustering along a single mode.
//!
//! Each slice contributes its dominant covariance eigenpair. Eigenvectors
//! scaled by their relative eigenvalue form the columns of `V`; the slice
//! similarity is `C = |VᵀV|` and its row sums `d` drive the selection. The
//! initial cluster is the upper group at the widest gap of sorted `d`, then
//! members are dropped (lowest `d` first) until the spread of `d` over the
//! cluster is within `l·ε/2 + √log(m − l)`.

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::spectral::{covariance, dot, EigConfig, SymMatrix};
use crate::tensor::{IndexSet, Matrix, Mode, Tensor3};

/// Logarithm used inside the spread bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MscConfig {
    pub eig: EigConfig,
    pub log_base: LogBase,
    pub execution: Execution,
}

impl MscConfig {
    pub fn sequential(self) -> Self {
        MscConfig {
            execution: Execution::Sequential,
            ..self
        }
    }
}

/// `l·ε/2 + √max(0, log(m − l))`.
pub fn spread_bound(l: usize, epsilon: f64, m: usize, log_base: LogBase) -> f64 {
    let tail = if m > l {
        log_base.log((m - l) as f64).max(0.0)
    } else {
        0.0
    };
    l as f64 * epsilon / 2.0 + tail.sqrt()
}

/// Per-slice spectral summary of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpectra {
    pub mode: Mode,
    /// Top covariance eigenvalue of every slice.
    pub lambdas: Vec<f64>,
    pub lambda_max: f64,
    /// `dim x m`; column `i` is the slice eigenvector scaled by `lambdas[i] / lambda_max`.
    pub v_matrix: Matrix,
    /// Slices whose covariance was identically zero.
    pub degenerate_slices: usize,
}

impl SliceSpectra {
    /// Assembles spectra from per-slice eigenvalues and unit eigenvectors.
    pub fn from_eigenpairs(mode: Mode, lambdas: Vec<f64>, vectors: &[Vec<f64>]) -> Result<Self> {
        if lambdas.len() != vectors.len() || lambdas.is_empty() {
            return Err(Error::Argument(format!(
                "{} eigenvalues for {} eigenvectors",
                lambdas.len(),
                vectors.len()
            )));
        }
        let dim = vectors[0].len();
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Argument("eigenvectors must share a positive dimension".into()));
        }
        if lambdas.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::Argument("eigenvalues must be finite and nonnegative".into()));
        }
        let lambda_max = lambdas.iter().copied().fold(0.0, f64::max);
        if lambda_max == 0.0 {
            return Err(Error::Degenerate(format!("every {mode} slice has zero top eigenvalue")));
        }
        let m = lambdas.len();
        let mut v_matrix = Matrix::zeros(dim, m);
        for (i, (lam, vec)) in lambdas.iter().zip(vectors).enumerate() {
            let rel = lam / lambda_max;
            for (r, x) in vec.iter().enumerate() {
                v_matrix.set(r, i, rel * x);
            }
        }
        Ok(SliceSpectra {
            mode,
            lambdas,
            lambda_max,
            v_matrix,
            degenerate_slices: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `lambdas[i] / lambda_max`.
    pub fn relative(&self, i: usize) -> f64 {
        self.lambdas[i] / self.lambda_max
    }
}

/// Computes the dominant eigenpair of every slice along `mode`.
pub fn slice_spectra(t: &Tensor3, mode: Mode, config: &MscConfig) -> Result<SliceSpectra> {
    let m = t.dim(mode);
    if m < 3 {
        return Err(Error::Argument(format!("{mode} needs at least 3 slices, got {m}")));
    }
    let pairs = par::map_range(config.execution, m, |i| {
        let slice = t.slice(mode, i)?;
        config.eig.top_eigenpair(&covariance(&slice))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let degenerate = pairs.iter().filter(|p| p.degenerate).count();
    let (lambdas, vectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().map(|p| (p.value, p.vector)).unzip();
    let mut spectra = SliceSpectra::from_eigenpairs(mode, lambdas, &vectors)?;
    spectra.degenerate_slices = degenerate;
    Ok(spectra)
}

/// Slice similarity `C = |VᵀV|` with its row sums `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub c: SymMatrix,
    pub d: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn m(&self) -> usize {
        self.d.len()
    }

    /// Column `i` of `C` (equal to row `i`).
    pub fn column(&self, i: usize) -> &[f64] {
        self.c.row(i)
    }
}

pub fn similarity_matrix(s: &SliceSpectra) -> SimilarityMatrix {
    similarity_matrix_with(s, Execution::Sequential)
}

pub fn similarity_matrix_with(s: &SliceSpectra, exec: Execution) -> SimilarityMatrix {
    let m = s.len();
    let cols: Vec<Vec<f64>> = (0..m).map(|i| s.v_matrix.column(i)).collect();
    let upper = par::map_range(exec, m, |i| {
        (i..m).map(|j| dot(&cols[i], &cols[j]).abs()).collect::<Vec<_>>()
    });
    let mut data = vec![0.0; m * m];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + off;
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
    }
    let c = SymMatrix::from_mirrored(m, data);
    let d = (0..m).map(|i| c.row(i).iter().sum()).collect();
    SimilarityMatrix { c, d }
}

/// Upper group of `d` at its widest consecutive gap.
///
/// Ties between equally wide gaps go to the gap at larger `d`.
pub fn initial_cluster_by_gap(mode: Mode, d: &[f64]) -> Result<IndexSet> {
    if d.len() < 3 {
        return Err(Error::Argument(format!(
            "gap initialization needs at least 3 entries, got {}",
            d.len()
        )));
    }
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let (lo, hi) = (d[order[0]], d[order[d.len() - 1]]);
    if hi - lo <= 1e-12 {
        return Err(Error::NoGap);
    }
    let mut split = 0;
    let mut widest = f64::NEG_INFINITY;
    for p in 0..order.len() - 1 {
        let gap = d[order[p + 1]] - d[order[p]];
        if gap >= widest {
            widest = gap;
            split = p + 1;
        }
    }
    let mut members = order[split..].to_vec();
    members.sort_unstable();
    Ok(IndexSet::from_sorted(mode, members))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MscResult {
    pub mode: Mode,
    /// Empty unless `converged`.
    pub cluster: IndexSet,
    pub d: Vec<f64>,
    pub epsilon: f64,
    /// Number of slices along the mode.
    pub m: usize,
    /// Cluster size; 0 when not converged.
    pub l: usize,
    /// Spread bound at the final evaluated cluster size.
    pub bound: f64,
    pub converged: bool,
    /// Indices dropped by refinement, in removal order.
    pub removed: Vec<usize>,
}

impl MscResult {
    /// Spread of `d` over the cluster, `max − min`.
    pub fn spread(&self) -> f64 {
        spread(self.cluster.indices(), &self.d)
    }

    /// Whether `√ε ≤ 1/(m − l)` holds for the returned cluster.
    pub fn epsilon_condition(&self) -> bool {
        self.converged && self.epsilon.sqrt() <= 1.0 / (self.m - self.l) as f64
    }

    fn empty(mode: Mode, d: Vec<f64>, epsilon: f64, bound: f64, removed: Vec<usize>) -> Self {
        MscResult {
            mode,
            cluster: IndexSet::empty(mode),
            m: d.len(),
            d,
            epsilon,
            l: 0,
            bound,
            converged: false,
            removed,
        }
    }
}

fn spread(members: &[usize], d: &[f64]) -> f64 {
    let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
        (lo.min(d[i]), hi.max(d[i]))
    });
    if members.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Shrinks `j0` until the spread of `d` over it satisfies the bound.
pub fn refine_cluster(j0: &IndexSet, d: &[f64], epsilon: f64, m: usize, log_base: LogBase) -> Result<MscResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if j0.len() < 2 {
        return Err(Error::Argument(format!(
            "refinement needs at least 2 members, got {}",
            j0.len()
        )));
    }
    if m != d.len() {
        return Err(Error::Argument(format!("d has {} entries but m = {m}", d.len())));
    }
    let mode = j0.mode();
    let mut members = j0.indices().to_vec();
    let mut removed = Vec::new();
    loop {
        let l = members.len();
        let bound = spread_bound(l, epsilon, m, log_base);
        if l < 2 {
            return Ok(MscResult::empty(mode, d.to_vec(), epsilon, bound, removed));
        }
        if spread(&members, d) <= bound {
            return Ok(MscResult {
                mode,
                cluster: IndexSet::from_sorted(mode, members),
                d: d.to_vec(),
                epsilon,
                m,
                l,
                bound,
                converged: true,
                removed,
            });
        }
        // First minimum wins, so ties drop the lowest index.
        let (pos, _) =
            members.iter().enumerate().fold(
                (0, f64::INFINITY),
                |best, (p, &i)| if d[i] < best.1 { (p, d[i]) } else { best },
            );
        removed.push(members.remove(pos));
    }
}

/// MSC output for one mode, with the intermediates the DBSCAN stage needs.
#[derive(Debug, Clone)]
pub struct ModeMsc {
    pub result: MscResult,
    pub similarity: SimilarityMatrix,
    pub lambda_max: f64,
    /// `lambda_max / μ` with `μ = (√(rows − 1) + √cols)²` for the slice shape.
    pub lambda_over_mu: f64,
}

pub fn msc_mode(t: &Tensor3, mode: Mode, epsilon: f64, config: &MscConfig) -> Result<ModeMsc> {
    if !(epsilon > 0.0) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    let spectra = slice_spectra(t, mode, config)?;
    let similarity = similarity_matrix_with(&spectra, config.execution);
    let m = similarity.m();
    let result = match initial_cluster_by_gap(mode, &similarity.d) {
        Ok(j0) if j0.len() >= 2 => refine_cluster(&j0, &similarity.d, epsilon, m, config.log_base)?,
        Ok(j0) => {
            let bound = spread_bound(j0.len(), epsilon, m, config.log_base);
            MscResult::empty(mode, similarity.d.clone(), epsilon, bound, j0.indices().to_vec())
        }
        Err(Error::NoGap) => MscResult::empty(mode, similarity.d.clone(), epsilon, f64::NAN, Vec::new()),
        Err(e) => return Err(e),
    };

    let [m1, m2, m3] = t.dims();
    let (rows, cols) = match mode {
        Mode::One => (m2, m3),
        Mode::Two => (m1, m3),
        Mode::Three => (m1, m2),
    };
    let mu = (((rows - 1) as f64).sqrt() + (cols as f64).sqrt()).powi(2);
    Ok(ModeMsc {
        result,
        similarity,
        lambda_max: spectra.lambda_max,
        lambda_over_mu: spectra.lambda_max / mu,
    })
}
