//! Dense third-order tensors, matrices and per-mode index sets.
//!
//! Storage is row-major throughout: entry `(i, j, k)` of an `m1 x m2 x m3`
//! tensor lives at `((i * m2) + j) * m3 + k`. Indices are 0-based; modes are
//! numbered 1, 2, 3.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three tensor axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    /// 1-based mode number.
    pub fn number(self) -> u8 {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
            Mode::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            _ => Err(Error::Argument(format!("mode must be 1, 2 or 3, got {n}"))),
        }
    }

    /// 0-based axis position.
    pub fn axis(self) -> usize {
        self.number() as usize - 1
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode-{}", self.number())
    }
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Argument(format!(
                "matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Argument("ragged matrix rows".into()));
        }
        Matrix::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

/// Dense third-order tensor. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3]) -> Result<Self> {
        Self::check_dims(dims)?;
        Ok(Tensor3 {
            dims,
            data: vec![0.0; dims.iter().product()],
        })
    }

    /// Builds a tensor from row-major data, rejecting non-finite entries.
    pub fn from_vec(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        Self::check_dims(dims)?;
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::Argument(format!(
                "tensor {}x{}x{} needs {expected} values, got {}",
                dims[0],
                dims[1],
                dims[2],
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite entry {} at flat index {pos}",
                data[pos]
            )));
        }
        Ok(Tensor3 { dims, data })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        Self::check_dims(dims)?;
        let mut data = Vec::with_capacity(dims.iter().product());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::from_vec(dims, data)
    }

    fn check_dims(dims: [usize; 3]) -> Result<()> {
        if dims.contains(&0) {
            return Err(Error::Argument(format!(
                "tensor dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, mode: Mode) -> usize {
        self.dims[mode.axis()]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    /// Returns the tensor with every entry multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Tensor3::from_vec(self.dims, self.data.iter().map(|v| alpha * v).collect())
    }

    /// Copies out the slice obtained by fixing `index` along `mode`.
    ///
    /// Mode 1 gives the `m2 x m3` matrix `T(i,:,:)`, mode 2 the `m1 x m3`
    /// matrix `T(:,j,:)` and mode 3 the `m1 x m2` matrix `T(:,:,k)`.
    pub fn slice(&self, mode: Mode, index: usize) -> Result<Matrix> {
        let [m1, m2, m3] = self.dims;
        let bound = self.dim(mode);
        if index >= bound {
            return Err(Error::range(format!("{mode} slice"), index, bound));
        }
        let m = match mode {
            Mode::One => {
                let start = index * m2 * m3;
                Matrix {
                    rows: m2,
                    cols: m3,
                    data: self.data[start..start + m2 * m3].to_vec(),
                }
            }
            Mode::Two => {
                let mut data = Vec::with_capacity(m1 * m3);
                for i in 0..m1 {
                    let start = (i * m2 + index) * m3;
                    data.extend_from_slice(&self.data[start..start + m3]);
                }
                Matrix {
                    rows: m1,
                    cols: m3,
                    data,
                }
            }
            Mode::Three => {
                let mut data = Vec::with_capacity(m1 * m2);
                for i in 0..m1 {
                    for j in 0..m2 {
                        data.push(self.get(i, j, index));
                    }
                }
                Matrix {
                    rows: m1,
                    cols: m2,
                    data,
                }
            }
        };
        Ok(m)
    }

    /// Extracts the `|j1| x |j2| x |j3|` sub-cube, preserving index order.
    pub fn subcube(&self, j1: &IndexSet, j2: &IndexSet, j3: &IndexSet) -> Result<Tensor3> {
        for (set, mode) in [j1, j2, j3].into_iter().zip(Mode::ALL) {
            if set.mode() != mode {
                return Err(Error::Argument(format!(
                    "index set for {} passed in {mode} position",
                    set.mode()
                )));
            }
            if set.is_empty() {
                return Err(Error::Argument(format!("empty {mode} index set")));
            }
            if let Some(&last) = set.indices().last() {
                if last >= self.dim(mode) {
                    return Err(Error::range(format!("{mode} member"), last, self.dim(mode)));
                }
            }
        }
        let mut data = Vec::with_capacity(j1.len() * j2.len() * j3.len());
        for &i in j1.indices() {
            for &j in j2.indices() {
                for &k in j3.indices() {
                    data.push(self.get(i, j, k));
                }
            }
        }
        Ok(Tensor3 {
            dims: [j1.len(), j2.len(), j3.len()],
            data,
        })
    }
}

/// Sorted, duplicate-free set of 0-based indices along one mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    mode: Mode,
    indices: Vec<usize>,
}

impl IndexSet {
    /// Sorts and validates `indices` against the mode dimension `bound`.
    pub fn new(mode: Mode, mut indices: Vec<usize>, bound: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument(format!("duplicate index in {mode} set")));
        }
        if let Some(&last) = indices.last() {
            if last >= bound {
                return Err(Error::range(format!("{mode} member"), last, bound));
            }
        }
        Ok(IndexSet { mode, indices })
    }

    pub fn empty(mode: Mode) -> Self {
        IndexSet {
            mode,
            indices: Vec::new(),
        }
    }

    pub fn full(mode: Mode, m: usize) -> Self {
        IndexSet {
            mode,
            indices: (0..m).collect(),
        }
    }

    /// Caller guarantees `indices` is strictly ascending.
    pub(crate) fn from_sorted(mode: Mode, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        IndexSet { mode, indices }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|i| !other.contains(*i))
    }
}

// Mode serializes as its 1-based number.
impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Mode::from_number(n).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counting(dims: [usize; 3]) -> Tensor3 {
        let n: usize = dims.iter().product();
        Tensor3::from_vec(dims, (0..n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn slice_layout() {
        let t = counting([2, 2, 2]);
        let s = t.slice(Mode::One, 0).unwrap();
        assert_eq!(s, Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap());
        let s = t.slice(Mode::Three, 1).unwrap();
        assert_eq!(s, Matrix::from_rows(&[vec![1.0, 3.0], vec![5.0, 7.0]]).unwrap());
    }

    #[test]
    fn zero_slice_shape() {
        let t = Tensor3::zeros([3, 4, 5]).unwrap();
        let s = t.slice(Mode::Two, 2).unwrap();
        assert_eq!((s.rows(), s.cols()), (3, 5));
        assert!(s.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slice_out_of_range_names_mode() {
        let t = counting([2, 3, 4]);
        let err = t.slice(Mode::Two, 3).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mode-2") && msg.contains('3'), "{msg}");
    }

    #[test]
    fn slices_agree_on_entries() {
        let t = counting([3, 4, 5]);
        for i in 0..3 {
            for j in 0..4 {
                for k in 0..5 {
                    let v = t.get(i, j, k);
                    assert_eq!(t.slice(Mode::One, i).unwrap().get(j, k), v);
                    assert_eq!(t.slice(Mode::Two, j).unwrap().get(i, k), v);
                    assert_eq!(t.slice(Mode::Three, k).unwrap().get(i, j), v);
                }
            }
        }
    }

    #[test]
    fn subcube_cases() {
        let t = counting([3, 4, 5]);
        let full = t
            .subcube(
                &IndexSet::full(Mode::One, 3),
                &IndexSet::full(Mode::Two, 4),
                &IndexSet::full(Mode::Three, 5),
            )
            .unwrap();
        assert_eq!(full, t);

        let single = t
            .subcube(
                &IndexSet::new(Mode::One, vec![2], 3).unwrap(),
                &IndexSet::new(Mode::Two, vec![1], 4).unwrap(),
                &IndexSet::new(Mode::Three, vec![3], 5).unwrap(),
            )
            .unwrap();
        assert_eq!(single.dims(), [1, 1, 1]);
        assert_eq!(single.data(), &[t.get(2, 1, 3)]);

        let sum = Tensor3::from_fn([4, 4, 4], |i, j, k| (i + j + k) as f64).unwrap();
        let sets = |m| IndexSet::new(m, vec![0, 1], 4).unwrap();
        let sub = sum
            .subcube(&sets(Mode::One), &sets(Mode::Two), &sets(Mode::Three))
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(sub.get(i, j, k), (i + j + k) as f64);
                }
            }
        }
    }

    #[test]
    fn subcube_rejects_bad_sets() {
        let t = counting([3, 3, 3]);
        let full = |m| IndexSet::full(m, 3);
        assert!(matches!(
            t.subcube(&IndexSet::empty(Mode::One), &full(Mode::Two), &full(Mode::Three)),
            Err(Error::Argument(_))
        ));
        let wide = IndexSet::new(Mode::Two, vec![5], 10).unwrap();
        assert!(matches!(
            t.subcube(&full(Mode::One), &wide, &full(Mode::Three)),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn index_set_validation() {
        let s = IndexSet::new(Mode::One, vec![3, 1, 2], 4).unwrap();
        assert_eq!(s.indices(), &[1, 2, 3]);
        assert!(IndexSet::new(Mode::One, vec![1, 1], 4).is_err());
        assert!(IndexSet::new(Mode::One, vec![4], 4).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            Tensor3::from_vec([1, 1, 2], vec![0.0, f64::NAN]),
            Err(Error::Validation(_))
        ));
    }
}
