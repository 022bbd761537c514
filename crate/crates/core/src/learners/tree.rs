//! Exact greedy binary trees shared by the forest and gradient boosting.
//!
//! Every feature keeps a list of the in-sample rows sorted by value (invalid
//! values last). A node owns the same contiguous segment in every list, and
//! splitting stably partitions each segment, so no sorting happens below the
//! root.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::matrix::{check_labels, FeatureMatrix};
use super::stump::midpoint;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Where invalid values go: the child with more training mass.
        missing_left: bool,
        /// Weighted impurity decrease of the split.
        gain: f64,
        weight: f64,
    },
    Leaf {
        /// Unit-root proportion for classification trees, the leaf value for
        /// regression trees.
        value: f64,
        weight: f64,
    },
}

/// Flat node array with the root at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { .. } => return i,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    missing_left,
                    ..
                } => {
                    let x = row[*feature];
                    let go_left = if x.is_nan() { *missing_left } else { x <= *threshold };
                    i = if go_left { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match &self.nodes[self.leaf(row)] {
            TreeNode::Leaf { value, .. } => *value,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    /// `[unit root, near unit root]` proportions of the leaf reached by `row`.
    pub fn class_proportions(&self, row: &[f64]) -> [f64; 2] {
        let p = self.predict(row);
        [p, 1.0 - p]
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    /// Impurity decrease per feature divided by the root weight.
    pub fn importance(&self, n_features: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_features];
        let root_w = match &self.nodes[0] {
            TreeNode::Leaf { weight, .. } | TreeNode::Split { weight, .. } => *weight,
        };
        if root_w <= 0.0 {
            return out;
        }
        for n in &self.nodes {
            if let TreeNode::Split { feature, gain, .. } = n {
                out[*feature] += gain / root_w;
            }
        }
        out
    }
}

/// Columns plus row orders sorted by value with invalid entries last.
#[derive(Debug, Clone)]
pub(crate) struct Presorted {
    pub columns: Vec<Vec<f64>>,
    pub order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(x: &FeatureMatrix) -> Self {
        let columns = x.columns();
        let order = columns
            .iter()
            .map(|c| {
                let mut idx: Vec<u32> = (0..c.len() as u32).collect();
                idx.sort_by(|&a, &b| {
                    let (va, vb) = (c[a as usize], c[b as usize]);
                    match (va.is_nan(), vb.is_nan()) {
                        (false, false) => va.total_cmp(&vb),
                        (a_nan, b_nan) => a_nan.cmp(&b_nan),
                    }
                    .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Presorted { columns, order }
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Objective {
    /// Two-class Gini; the target is 1 for a unit root and 0 otherwise.
    Gini,
    /// Squared error of the target (the residual) for the split, Newton step
    /// `sum target / sum hessian` for the leaf.
    Newton,
}

#[derive(Debug, Clone)]
pub(crate) struct TreeParams {
    pub objective: Objective,
    /// A node of at most this much weight becomes a leaf.
    pub min_node_size: f64,
    pub max_depth: Option<usize>,
    /// Minimum hessian mass per child (Newton only).
    pub min_child_weight: f64,
    /// Features drawn per node from `allowed_features`.
    pub features_per_node: usize,
    pub allowed_features: Vec<usize>,
}

pub(crate) struct RowData<'a> {
    pub target: &'a [f64],
    pub hessian: Option<&'a [f64]>,
    pub weights: &'a [f64],
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    w: f64,
    a: f64,
    h: f64,
}

impl Acc {
    fn add(&mut self, data: &RowData, i: usize) {
        let w = data.weights[i];
        self.w += w;
        self.a += w * data.target[i];
        if let Some(h) = data.hessian {
            self.h += w * h[i];
        }
    }

    fn plus(self, o: Acc) -> Acc {
        Acc {
            w: self.w + o.w,
            a: self.a + o.a,
            h: self.h + o.h,
        }
    }

    fn minus(self, o: Acc) -> Acc {
        Acc {
            w: self.w - o.w,
            a: self.a - o.a,
            h: self.h - o.h,
        }
    }

    fn score(&self, obj: Objective) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        match obj {
            Objective::Gini => (self.a * self.a + (self.w - self.a) * (self.w - self.a)) / self.w,
            Objective::Newton => self.a * self.a / self.w,
        }
    }

    fn leaf_value(&self, obj: Objective) -> f64 {
        match obj {
            Objective::Gini => {
                if self.w > 0.0 {
                    self.a / self.w
                } else {
                    0.5
                }
            }
            Objective::Newton => {
                if self.h > 0.0 {
                    self.a / self.h
                } else {
                    0.0
                }
            }
        }
    }
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    missing_left: bool,
}

const MIN_GAIN: f64 = 1e-12;

fn admissible(obj: Objective, l: &Acc, r: &Acc, p: &TreeParams) -> bool {
    match obj {
        Objective::Gini => l.w > 0.0 && r.w > 0.0,
        Objective::Newton => l.w > 0.0 && r.w > 0.0 && l.h >= p.min_child_weight && r.h >= p.min_child_weight,
    }
}

pub(crate) fn build_tree(pre: &Presorted, data: &RowData, params: &TreeParams, rng: &mut Rng) -> Tree {
    let n_all = pre.n_rows();
    let mut lists: Vec<Vec<u32>> = pre
        .order
        .iter()
        .map(|o| o.iter().copied().filter(|&i| data.weights[i as usize] > 0.0).collect())
        .collect();
    let n_in = lists.first().map_or(0, Vec::len);
    let mut root = Acc::default();
    if let Some(l) = lists.first() {
        for &i in l {
            root.add(data, i as usize);
        }
    }
    let obj = params.objective;
    let mut nodes: Vec<TreeNode> = vec![TreeNode::Leaf {
        value: root.leaf_value(obj),
        weight: root.w,
    }];
    let mut go_left = vec![false; n_all];
    let mut buf: Vec<u32> = Vec::with_capacity(n_in);
    let mut stack = vec![(0usize, 0usize, n_in, 0usize, root)];
    let k = params.features_per_node.min(params.allowed_features.len()).max(1);

    while let Some((id, s, e, depth, acc)) = stack.pop() {
        let leaf = TreeNode::Leaf {
            value: acc.leaf_value(obj),
            weight: acc.w,
        };
        let stop = e - s < 2
            || params.max_depth.is_some_and(|d| depth >= d)
            || match obj {
                Objective::Gini => acc.w <= params.min_node_size || acc.a <= 1e-12 || acc.w - acc.a <= 1e-12,
                Objective::Newton => acc.w < 2.0,
            };
        if stop {
            nodes[id] = leaf;
            continue;
        }
        let mut feats: Vec<usize> = if k >= params.allowed_features.len() {
            params.allowed_features.clone()
        } else {
            params.allowed_features.choose_multiple(rng, k).copied().collect()
        };
        feats.sort_unstable();

        let parent_score = acc.score(obj);
        let mut best: Option<Candidate> = None;
        for &f in &feats {
            let col = &pre.columns[f];
            let seg = &lists[f][s..e];
            let mut valid_end = seg.len();
            let mut missing = Acc::default();
            while valid_end > 0 && col[seg[valid_end - 1] as usize].is_nan() {
                valid_end -= 1;
                missing.add(data, seg[valid_end] as usize);
            }
            let valid = acc.minus(missing);
            let mut left = Acc::default();
            for j in 0..valid_end.saturating_sub(1) {
                let i = seg[j] as usize;
                left.add(data, i);
                let (xa, xb) = (col[i], col[seg[j + 1] as usize]);
                if !(xa < xb) {
                    continue;
                }
                let right = valid.minus(left);
                let missing_left = left.w >= right.w;
                let (l, r) = if missing_left {
                    (left.plus(missing), right)
                } else {
                    (left, right.plus(missing))
                };
                if !admissible(obj, &l, &r, params) {
                    continue;
                }
                let gain = l.score(obj) + r.score(obj) - parent_score;
                if gain > MIN_GAIN && best.as_ref().map_or(true, |b| gain > b.gain) {
                    best = Some(Candidate {
                        gain,
                        feature: f,
                        threshold: midpoint(xa, xb),
                        missing_left,
                    });
                }
            }
        }
        let Some(b) = best else {
            nodes[id] = leaf;
            continue;
        };

        let col = &pre.columns[b.feature];
        let mut lacc = Acc::default();
        let mut n_left = 0;
        for &i in &lists[b.feature][s..e] {
            let i = i as usize;
            let x = col[i];
            let l = if x.is_nan() { b.missing_left } else { x <= b.threshold };
            go_left[i] = l;
            if l {
                lacc.add(data, i);
                n_left += 1;
            }
        }
        for list in lists.iter_mut() {
            buf.clear();
            let seg = &mut list[s..e];
            let mut w = 0;
            for j in 0..seg.len() {
                let i = seg[j];
                if go_left[i as usize] {
                    seg[w] = i;
                    w += 1;
                } else {
                    buf.push(i);
                }
            }
            seg[w..].copy_from_slice(&buf);
        }
        let left_id = nodes.len();
        let right_id = left_id + 1;
        let racc = acc.minus(lacc);
        nodes.push(TreeNode::Leaf { value: 0.0, weight: 0.0 });
        nodes.push(TreeNode::Leaf { value: 0.0, weight: 0.0 });
        nodes[id] = TreeNode::Split {
            feature: b.feature,
            threshold: b.threshold,
            left: left_id,
            right: right_id,
            missing_left: b.missing_left,
            gain: b.gain,
            weight: acc.w,
        };
        stack.push((right_id, s + n_left, e, depth + 1, racc));
        stack.push((left_id, s, s + n_left, depth + 1, lacc));
    }
    Tree { nodes }
}

/// Classification tree on all rows with unit weights: `k_features` drawn per
/// node, nodes of at most `min_node_size` rows become leaves.
pub fn grow_tree(
    x: &FeatureMatrix,
    labels: &[i8],
    k_features: usize,
    min_node_size: usize,
    rng: &mut Rng,
) -> crate::Result<Tree> {
    check_labels(labels, x.n_rows()).or_else(|e| match e {
        crate::Error::DegenerateLabels(_) => Ok(()),
        other => Err(other),
    })?;
    if min_node_size == 0 || k_features == 0 {
        return Err(crate::Error::InvalidConfig("min_node_size and k_features must be at least 1".into()));
    }
    let pre = Presorted::new(x);
    let target: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { 0.0 }).collect();
    let weights = vec![1.0; x.n_rows()];
    let params = TreeParams {
        objective: Objective::Gini,
        min_node_size: min_node_size as f64,
        max_depth: None,
        min_child_weight: 0.0,
        features_per_node: k_features,
        allowed_features: (0..x.n_cols()).collect(),
    };
    let data = RowData {
        target: &target,
        hessian: None,
        weights: &weights,
    };
    Ok(build_tree(&pre, &data, &params, rng))
}
