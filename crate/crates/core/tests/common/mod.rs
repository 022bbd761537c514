//! Oracles shared by the property and acceptance suites. Each one is an
//! independent, deliberately naive computation of something the library
//! does more cleverly.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitroot_ml::learners::{fit_gbm, log_loss, FeatureMatrix, GbmParams, TreeNode};

/// Solve the normal equations `X'X b = X'y` by Gauss-Jordan elimination
/// with partial pivoting.
pub fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for c in 0..k {
        let p = (c..k).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

/// Five uniform features; the label depends on the first and third.
pub fn toy(seed: u64, n: usize) -> (FeatureMatrix, Vec<i8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let r: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        y.push(if r[0] - r[2] + 0.3 * rng.gen_range(-1.0..1.0) > 0.0 { 1 } else { -1 });
        rows.push(r);
    }
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

/// Largest gap between a one-tree booster's leaf values and the Newton
/// step `-L'/L''` obtained from central differences of the leaf loss.
pub fn newton_leaf_gap(seed: u64) -> f64 {
    let (x, y) = toy(seed, 200);
    let y01: Vec<u8> = y.iter().map(|&v| u8::from(v == 1)).collect();
    let m = fit_gbm(
        &x,
        &y01,
        &GbmParams {
            n_trees: 1,
            learning_rate: 1.0,
            max_depth: 2,
            subsample: 1.0,
            colsample: 1.0,
            ..GbmParams::default()
        },
    )
    .unwrap();
    let t = &m.trees[0];
    let mut worst = 0.0f64;
    for (leaf, node) in t.nodes.iter().enumerate() {
        let TreeNode::Leaf { value, .. } = node else { continue };
        let yl: Vec<u8> = (0..x.n_rows()).filter(|&i| t.leaf(x.row(i)) == leaf).map(|i| y01[i]).collect();
        let loss = |g: f64| log_loss(&vec![m.init_score + g; yl.len()], &yl) * yl.len() as f64;
        let h = 1e-4;
        let d1 = (loss(h) - loss(-h)) / (2.0 * h);
        let d2 = (loss(h) - 2.0 * loss(0.0) + loss(-h)) / (h * h);
        worst = worst.max((value + d1 / d2).abs());
    }
    worst
}
