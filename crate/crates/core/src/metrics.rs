//! Adjusted Rand index and sub-cube coherence.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tensor::{IndexSet, Tensor3};

/// Label used for background (unclustered) slices.
pub const BACKGROUND: i64 = -1;

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Adjusted Rand index from the contingency table.
///
/// The background label is an ordinary class. Degenerate cases where the
/// expected and maximal index coincide (a single point, or two identical
/// trivial partitions) return 1.
pub fn ari(a: &[i64], b: &[i64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "labelings differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut table: HashMap<(i64, i64), u64> = HashMap::new();
    let mut rows: HashMap<i64, u64> = HashMap::new();
    let mut cols: HashMap<i64, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: u64 = table.values().map(|&n| pairs(n)).sum();
    let sum_a: u64 = rows.values().map(|&n| pairs(n)).sum();
    let sum_b: u64 = cols.values().map(|&n| pairs(n)).sum();
    let total = pairs(a.len() as u64);
    if total == 0 {
        return Ok(1.0);
    }
    let expected = sum_a as f64 * sum_b as f64 / total as f64;
    let max = 0.5 * (sum_a + sum_b) as f64;
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index as f64 - expected) / denom)
}

/// Labels of length `m`: position of the containing set in `clusters`, or
/// [`BACKGROUND`].
pub fn labels_from_sets(clusters: &[Vec<usize>], m: usize) -> Result<Vec<i64>> {
    let mut labels = vec![BACKGROUND; m];
    for (c, set) in clusters.iter().enumerate() {
        for &i in set {
            if i >= m {
                return Err(Error::Validation(format!("cluster member {i} exceeds dimension {m}")));
            }
            if labels[i] != BACKGROUND {
                return Err(Error::Validation(format!("index {i} assigned to two clusters")));
            }
            labels[i] = c as i64;
        }
    }
    Ok(labels)
}

/// Root mean square deviation of the sub-cube entries around their mean.
pub fn rmse_subcube(t: &Tensor3, tri: (&IndexSet, &IndexSet, &IndexSet)) -> Result<f64> {
    let sub = t.subcube(tri.0, tri.1, tri.2)?;
    let n = sub.data().len() as f64;
    let mean = sub.data().iter().sum::<f64>() / n;
    let ss: f64 = sub.data().iter().map(|v| (v - mean).powi(2)).sum();
    Ok((ss / n).sqrt())
}

/// Volume-weighted mean of `(rmse, volume)` pairs; `None` when empty.
pub fn weighted_rmse(parts: &[(f64, usize)]) -> Option<f64> {
    let vol: usize = parts.iter().map(|p| p.1).sum();
    if vol == 0 {
        return None;
    }
    Some(parts.iter().map(|(r, v)| r * *v as f64).sum::<f64>() / vol as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Mode;

    #[test]
    fn ari_identity_and_permutation() {
        let a = [0, 0, 1, 1, 2];
        assert_eq!(ari(&a, &a).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn ari_hand_value() {
        // Pairs: same/same 2, same/diff 1, diff/same 4, diff/diff 8.
        // Hubert–Arabie: 2(ad − bc) / ((a+b)(b+d) + (a+c)(c+d)).
        let expected = 2.0 * (2.0 * 8.0 - 1.0 * 4.0) / (3.0 * 9.0 + 6.0 * 12.0);
        let got = ari(&[0, 0, 1, 1, 2, 2], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((got - 0.242_424_242_424).abs() < 1e-9);
    }

    #[test]
    fn ari_edge_cases() {
        assert_eq!(ari(&[5], &[2]).unwrap(), 1.0);
        assert!(ari(&[0, 1], &[0]).is_err());
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(ari(&[0, 1, 2], &[0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn labels_from_sets_marks_background() {
        let l = labels_from_sets(&[vec![1, 2], vec![4]], 5).unwrap();
        assert_eq!(l, vec![-1, 0, 0, -1, 1]);
        assert!(labels_from_sets(&[vec![1], vec![1]], 3).is_err());
        assert!(labels_from_sets(&[vec![3]], 3).is_err());
    }

    #[test]
    fn rmse_examples() {
        let t = Tensor3::from_fn([3, 3, 3], |_, _, _| 4.2).unwrap();
        let all = |m| IndexSet::full(m, 3);
        assert!(rmse_subcube(&t, (&all(Mode::One), &all(Mode::Two), &all(Mode::Three))).unwrap() < 1e-12);

        let t = Tensor3::from_fn([2, 2, 2], |i, _, _| 2.0 * i as f64).unwrap();
        let all = |m| IndexSet::full(m, 2);
        let r = rmse_subcube(&t, (&all(Mode::One), &all(Mode::Two), &all(Mode::Three))).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_mean() {
        assert_eq!(weighted_rmse(&[]), None);
        assert_eq!(weighted_rmse(&[(1.0, 1), (3.0, 3)]), Some(2.5));
    }
}
