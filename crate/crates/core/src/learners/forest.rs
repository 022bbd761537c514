//! Random forest of Gini trees on bootstrap resamples.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{check_labels, FeatureMatrix};
use super::tree::{build_tree, Objective, Presorted, RowData, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub k_features: usize,
    pub min_node_size: usize,
    pub seed: u64,
    /// Draw a bootstrap sample per tree; disabling it is a test hook.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 500,
            k_features: 9,
            min_node_size: 4,
            seed: 0,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub k_features: usize,
    pub min_node_size: usize,
    pub seed: u64,
    pub n_features: usize,
    /// Out-of-bag misclassification rate at a 0.5 cut, when available.
    pub oob_error: Option<f64>,
}

const TREE_STREAM: u64 = 0xF0;

pub fn fit_forest(x: &FeatureMatrix, labels: &[i8], params: &ForestParams) -> Result<ForestModel> {
    check_labels(labels, x.n_rows())?;
    if params.n_trees == 0 {
        return Err(Error::InvalidConfig("forest needs at least one tree".into()));
    }
    if params.k_features == 0 || params.k_features > x.n_cols() || params.min_node_size == 0 {
        return Err(Error::InvalidConfig(format!(
            "k_features must lie in 1..={} and min_node_size must be positive",
            x.n_cols()
        )));
    }
    let n = x.n_rows();
    let pre = Presorted::new(x);
    let target: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { 0.0 }).collect();
    let tree_params = TreeParams {
        objective: Objective::Gini,
        min_node_size: params.min_node_size as f64,
        max_depth: None,
        min_child_weight: 0.0,
        features_per_node: params.k_features,
        allowed_features: (0..x.n_cols()).collect(),
    };

    // Each tree returns its in-bag rows as a bitset; out-of-bag votes are
    // tallied afterwards in tree order so the result is thread-independent.
    let grow = |b: usize| -> (Tree, Vec<u64>) {
        let mut rng = rng_from_seed(derive_seed(params.seed, TREE_STREAM, b as u64));
        let mut weights = vec![0.0; n];
        if params.bootstrap {
            for _ in 0..n {
                weights[rng.gen_range(0..n)] += 1.0;
            }
        } else {
            weights.fill(1.0);
        }
        let mut in_bag = vec![0u64; n.div_ceil(64)];
        for (i, w) in weights.iter().enumerate() {
            if *w > 0.0 {
                in_bag[i / 64] |= 1 << (i % 64);
            }
        }
        let data = RowData {
            target: &target,
            hessian: None,
            weights: &weights,
        };
        (build_tree(&pre, &data, &tree_params, &mut rng), in_bag)
    };

    let grown: Vec<(Tree, Vec<u64>)> = (0..params.n_trees).into_par_iter().map(grow).collect();
    let mut oob_sum = vec![0.0; n];
    let mut oob_cnt = vec![0u32; n];
    if params.bootstrap {
        for (tree, in_bag) in &grown {
            for i in 0..n {
                if in_bag[i / 64] & (1 << (i % 64)) == 0 {
                    oob_sum[i] += tree.predict(x.row(i));
                    oob_cnt[i] += 1;
                }
            }
        }
    }
    let oob_error = params.bootstrap.then(|| {
        let (mut wrong, mut seen) = (0usize, 0usize);
        for i in 0..n {
            if oob_cnt[i] > 0 {
                seen += 1;
                let pred = if oob_sum[i] / oob_cnt[i] as f64 > 0.5 { 1 } else { -1 };
                if pred != labels[i] {
                    wrong += 1;
                }
            }
        }
        if seen > 0 {
            wrong as f64 / seen as f64
        } else {
            f64::NAN
        }
    });
    Ok(ForestModel {
        trees: grown.into_iter().map(|(t, _)| t).collect(),
        k_features: params.k_features,
        min_node_size: params.min_node_size,
        seed: params.seed,
        n_features: x.n_cols(),
        oob_error: oob_error.filter(|e| e.is_finite()),
    })
}

impl ForestModel {
    /// Mean unit-root proportion of the leaves reached by `row`.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }

    /// Mean-decrease-in-impurity per feature, averaged over trees (unscaled).
    pub fn raw_importance(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(t.importance(self.n_features)) {
                *a += v;
            }
        }
        acc.iter().map(|v| v / self.trees.len() as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::tree::grow_tree;

    fn data(seed: u64) -> (FeatureMatrix, Vec<i8>) {
        let mut rng = rng_from_seed(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..300 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let c: f64 = rng.gen_range(-1.0..1.0);
            let noise: f64 = rng.gen_range(-0.3..0.3);
            rows.push(vec![a, b, c]);
            y.push(if a + 0.5 * b + noise > 0.0 { 1 } else { -1 });
        }
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn single_tree_without_bootstrap_is_grow_tree() {
        let (x, y) = data(1);
        let p = ForestParams {
            n_trees: 1,
            k_features: 3,
            min_node_size: 1,
            seed: 5,
            bootstrap: false,
        };
        let f = fit_forest(&x, &y, &p).unwrap();
        let t = grow_tree(&x, &y, 3, 1, &mut rng_from_seed(derive_seed(5, TREE_STREAM, 0))).unwrap();
        assert_eq!(f.trees[0], t);
        assert!(f.oob_error.is_none());
    }

    #[test]
    fn deterministic_and_bounded() {
        let (x, y) = data(2);
        let p = ForestParams {
            n_trees: 30,
            k_features: 2,
            min_node_size: 2,
            seed: 11,
            bootstrap: true,
        };
        let a = fit_forest(&x, &y, &p).unwrap();
        let b = fit_forest(&x, &y, &p).unwrap();
        assert_eq!(a, b);
        for i in 0..x.n_rows() {
            let s = a.score(x.row(i));
            assert!((0.0..=1.0).contains(&s));
        }
        let oob = a.oob_error.unwrap();
        assert!(oob < 0.3, "{oob}");
    }

    #[test]
    fn invalid_parameters() {
        let (x, y) = data(3);
        let mut p = ForestParams::default();
        p.k_features = 4;
        assert!(fit_forest(&x, &y, &p).is_err());
    }
}
