//! Plug-in mutual information on equal-frequency bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoResult {
    /// Bits.
    pub mi: f64,
    pub joint_entropy: f64,
    /// `mi / joint_entropy`; 0 when the joint entropy is 0.
    pub iqr: f64,
    pub n_bins: usize,
    /// Pairs used after dropping NaN entries.
    pub n: usize,
    /// Set when either variable is constant.
    pub degenerate: bool,
}

/// Bin index per value: sort, then cut ranks into `n_bins` equal groups.
/// Tied values share the bin of their first rank.
pub fn equal_frequency_bins(x: &[f64], n_bins: usize) -> Vec<usize> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut bins = vec![0; n];
    let mut j = 0;
    while j < n {
        let bin = (j * n_bins / n).min(n_bins - 1);
        let v = x[idx[j]];
        while j < n && x[idx[j]] == v {
            bins[idx[j]] = bin;
            j += 1;
        }
    }
    bins
}

fn entropy_bits(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

pub fn mutual_information(x: &[f64], y: &[f64], n_bins: usize) -> Result<MutualInfoResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if n_bins < 2 {
        return Err(Error::InvalidConfig(format!("n_bins must be at least 2, got {n_bins}")));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(a, b)| (*a, *b))
        .unzip();
    let n = xs.len();
    if n < 100 {
        return Err(Error::InsufficientLength { needed: 100, got: n });
    }
    let bx = equal_frequency_bins(&xs, n_bins);
    let by = equal_frequency_bins(&ys, n_bins);
    let mut joint = vec![0usize; n_bins * n_bins];
    let mut mx = vec![0usize; n_bins];
    let mut my = vec![0usize; n_bins];
    for i in 0..n {
        joint[bx[i] * n_bins + by[i]] += 1;
        mx[bx[i]] += 1;
        my[by[i]] += 1;
    }
    let nf = n as f64;
    let hx = entropy_bits(mx.iter().copied(), nf);
    let hy = entropy_bits(my.iter().copied(), nf);
    // Sorted so the sum, and hence MI, is exactly symmetric in (x, y).
    joint.sort_unstable();
    let hxy = entropy_bits(joint.iter().copied(), nf);
    let mi = (hx + hy - hxy).max(0.0);
    let degenerate = hx == 0.0 || hy == 0.0;
    Ok(MutualInfoResult {
        mi,
        joint_entropy: hxy,
        iqr: if hxy > 0.0 { mi / hxy } else { 0.0 },
        n_bins,
        n,
        degenerate,
    })
}

/// Symmetric IQR matrix of the given columns; the diagonal is 1 unless the
/// column is constant.
pub fn iqr_matrix(columns: &[Vec<f64>], n_bins: usize) -> Result<Vec<Vec<f64>>> {
    let k = columns.len();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = mutual_information(&columns[i], &columns[j], n_bins)?;
            m[i][j] = r.iqr;
            m[j][i] = r.iqr;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn self_information() {
        let x: Vec<f64> = (0..500).map(|i| ((i * 7919) % 1000) as f64 / 3.0).collect();
        let r = mutual_information(&x, &x, 20).unwrap();
        assert!((r.iqr - 1.0).abs() < 1e-12);
        assert!((r.mi - 20f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn independence_and_symmetry() {
        let mut rng = rng_from_seed(1);
        let x: Vec<f64> = (0..75_000).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..75_000).map(|_| rng.gen()).collect();
        let a = mutual_information(&x, &y, 20).unwrap();
        let b = mutual_information(&y, &x, 20).unwrap();
        assert!(a.iqr < 0.01);
        assert_eq!(a.mi, b.mi);
    }

    #[test]
    fn constant_input_is_flagged() {
        let x = vec![3.0; 200];
        let y: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let r = mutual_information(&x, &y, 10).unwrap();
        assert!(r.degenerate && r.iqr == 0.0);
    }

    #[test]
    fn bins_are_balanced() {
        let x: Vec<f64> = (0..1000).rev().map(|i| i as f64).collect();
        let b = equal_frequency_bins(&x, 20);
        for k in 0..20 {
            assert_eq!(b.iter().filter(|&&v| v == k).count(), 50);
        }
    }
}
