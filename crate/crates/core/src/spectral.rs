//! Slice covariances and their dominant eigenpairs.
//!
//! `top_eigenpair` is a deterministic power iteration; `full_eigen_jacobi`
//! is a cyclic Jacobi solver used as an exact reference on small matrices
//! and behind `EigMethod::Exact`.

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Largest matrix accepted by the Jacobi solver.
pub const JACOBI_MAX_DIM: usize = 512;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;

/// Symmetric dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Wraps row-major data, checking symmetry to within `1e-9` per entry.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Argument(format!(
                "symmetric matrix of order {n} needs {} values, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-9 {
                    return Err(Error::Validation(format!(
                        "matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::Argument("matrix is not square".into()));
        }
        SymMatrix::from_vec(rows.len(), rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        SymMatrix { n, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = v;
        }
        SymMatrix { n, data }
    }

    pub(crate) fn from_mirrored(n: usize, data: Vec<f64>) -> Self {
        SymMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), v);
        }
    }
}

/// An eigenvalue with its unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// Set when the input matrix was identically zero.
    pub degenerate: bool,
    pub iterations: usize,
}

impl EigenPair {
    /// `‖C·v − λ·v‖₂`.
    pub fn residual(&self, c: &SymMatrix) -> f64 {
        let cv = c.mul_vec(&self.vector);
        cv.iter()
            .zip(&self.vector)
            .map(|(a, b)| (a - self.value * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    /// Power iteration, falling back to Jacobi when it fails to converge.
    Power,
    /// Cyclic Jacobi on every slice.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigConfig {
    pub method: EigMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigConfig {
    fn default() -> Self {
        EigConfig {
            method: EigMethod::Power,
            tol: 1e-10,
            max_iter: 5000,
        }
    }
}

impl EigConfig {
    pub fn exact() -> Self {
        EigConfig {
            method: EigMethod::Exact,
            ..EigConfig::default()
        }
    }

    /// Dominant eigenpair according to the configured method.
    pub fn top_eigenpair(&self, c: &SymMatrix) -> Result<EigenPair> {
        match self.method {
            EigMethod::Power => match top_eigenpair(c, self.tol, self.max_iter) {
                Err(Error::Convergence { .. }) if c.n() <= JACOBI_MAX_DIM => top_exact(c),
                other => other,
            },
            EigMethod::Exact => top_exact(c),
        }
    }
}

fn top_exact(c: &SymMatrix) -> Result<EigenPair> {
    if c.frobenius() == 0.0 {
        return Ok(degenerate_pair(c.n()));
    }
    let mut pairs = full_eigen_jacobi(c)?;
    let mut top = pairs.swap_remove(0);
    top.value = top.value.max(0.0);
    Ok(top)
}

/// `MᵀM`, computed once per unordered column pair and mirrored.
pub fn covariance(m: &Matrix) -> SymMatrix {
    let n = m.cols();
    let mut data = vec![0.0; n * n];
    for r in 0..m.rows() {
        let row = m.row(r);
        for i in 0..n {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            let acc = &mut data[i * n..(i + 1) * n];
            for j in i..n {
                acc[j] += ri * row[j];
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            data[j * n + i] = data[i * n + j];
        }
    }
    SymMatrix::from_mirrored(n, data)
}

/// Dominant eigenpair of a symmetric PSD matrix by power iteration.
///
/// Starts from the normalized all-ones vector. If the iterate collapses to
/// (numerically) zero, the start was orthogonal to the range of `c`, and the
/// iteration restarts from the standard basis vectors in index order.
pub fn top_eigenpair(c: &SymMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Argument(format!(
            "power iteration needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
        )));
    }
    let n = c.n();
    let scale = c.frobenius();
    if scale == 0.0 {
        return Ok(degenerate_pair(n));
    }

    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut starts = std::iter::once(ones).chain((0..n).map(|k| basis(n, k)));
    let mut total_iter = 0;
    loop {
        let Some(start) = starts.next() else {
            // c != 0 guarantees some basis vector is not in its kernel.
            unreachable!("every start vector annihilated by a nonzero matrix");
        };
        match power_from(c, start, tol, max_iter, scale) {
            PowerOutcome::Converged(mut pair) => {
                pair.iterations += total_iter;
                fix_sign(&mut pair.vector);
                return Ok(pair);
            }
            PowerOutcome::Stalled(iters) => total_iter += iters,
            PowerOutcome::Exhausted(residual) => {
                return Err(Error::Convergence {
                    iterations: max_iter,
                    residual,
                })
            }
        }
    }
}

enum PowerOutcome {
    Converged(EigenPair),
    Stalled(usize),
    Exhausted(f64),
}

fn power_from(c: &SymMatrix, mut v: Vec<f64>, tol: f64, max_iter: usize, scale: f64) -> PowerOutcome {
    let n = c.n();
    let mut w = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        c.mul_vec_into(&v, &mut w);
        let norm = norm2(&w);
        if norm <= 1e-14 * scale {
            return PowerOutcome::Stalled(it);
        }
        let lambda = dot(&v, &w);
        residual = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * lambda.max(1.0) {
            return PowerOutcome::Converged(EigenPair {
                value: lambda.max(0.0),
                vector: v,
                degenerate: false,
                iterations: it,
            });
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    PowerOutcome::Exhausted(residual)
}

/// All eigenpairs by cyclic Jacobi rotations, sorted by descending value.
pub fn full_eigen_jacobi(c: &SymMatrix) -> Result<Vec<EigenPair>> {
    let n = c.n();
    if n > JACOBI_MAX_DIM {
        return Err(Error::Argument(format!(
            "Jacobi solver is capped at order {JACOBI_MAX_DIM}, got {n}"
        )));
    }
    let mut a = c.data().to_vec();
    let mut vecs = vec![0.0; n * n];
    for i in 0..n {
        vecs[i * n + i] = 1.0;
    }
    let target = JACOBI_OFF_TOL * c.frobenius();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence {
                iterations: sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (vecs[k * n + p], vecs[k * n + q]);
                    vecs[k * n + p] = cs * vkp - sn * vkq;
                    vecs[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| {
            let mut vector: Vec<f64> = (0..n).map(|k| vecs[k * n + j]).collect();
            fix_sign(&mut vector);
            EigenPair {
                value: a[j * n + j],
                vector,
                degenerate: false,
                iterations: sweeps,
            }
        })
        .collect();
    // Stable sort keeps ties in column order.
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn degenerate_pair(n: usize) -> EigenPair {
    EigenPair {
        value: 0.0,
        vector: basis(n, 0),
        degenerate: true,
        iterations: 0,
    }
}

fn basis(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is >= 0.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
