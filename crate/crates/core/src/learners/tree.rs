//! Axis-aligned regression tree shared by the forest and the booster.
//!
//! A node holding rows `I` with targets `r` scores `S^2 / (n + l2)`, where
//! `S = sum(r)` and `n = |I|`. A split is chosen to maximize the summed
//! child scores; with `l2 = 0` that is the same as minimizing the children's
//! squared error. Leaves emit `S / (n + l2)`: the mean when `l2 = 0`, the
//! second-order boosting weight otherwise.
//!
//! Candidate thresholds are midpoints between consecutive distinct values.
//! Ties go to the lowest feature index, then the lowest threshold.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Relative slack within which two split gains count as tied.
const GAIN_TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// `None` grows until another stopping rule applies. `Some(0)` is a single leaf.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features drawn per split; `>= p` means all features.
    pub mtry: usize,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

impl RegressionTree {
    /// Grows a tree over `rows` (repeats allowed, as in a bootstrap sample).
    ///
    /// `columns` is column-major feature data; `targets` is indexed by row.
    /// `rng` is only drawn from when `mtry < p`.
    pub fn fit<R: Rng + ?Sized>(
        columns: &[Vec<f64>],
        targets: &[f64],
        rows: Vec<usize>,
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let mut tree = RegressionTree { nodes: Vec::new() };
        let mut scratch = Vec::new();
        // (node slot, rows, depth)
        let mut stack = vec![(0usize, rows, 0usize)];
        tree.nodes.push(Node::Leaf { value: 0.0 });
        while let Some((slot, idx, depth)) = stack.pop() {
            let sum: f64 = idx.iter().map(|&i| targets[i]).sum();
            let leaf = Node::Leaf {
                value: sum / (idx.len() as f64 + params.l2),
            };
            let can_split = params.max_depth.is_none_or(|d| depth < d)
                && idx.len() >= 2 * params.min_leaf.max(1);
            let choice = if can_split {
                best_split(columns, targets, &idx, params, rng, &mut scratch)
            } else {
                None
            };
            let Some(choice) = choice else {
                tree.nodes[slot] = leaf;
                continue;
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = idx
                .into_iter()
                .partition(|&i| columns[choice.feature][i] <= choice.threshold);
            let left = tree.nodes.len();
            tree.nodes.push(Node::Leaf { value: 0.0 });
            let right = tree.nodes.len();
            tree.nodes.push(Node::Leaf { value: 0.0 });
            tree.nodes[slot] = Node::Split {
                feature: choice.feature,
                threshold: choice.threshold,
                left,
                right,
            };
            stack.push((right, right_rows, depth + 1));
            stack.push((left, left_rows, depth + 1));
        }
        tree
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => k = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    /// The root split as `(feature, threshold)`, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => Some((feature, threshold)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

fn best_split<R: Rng + ?Sized>(
    columns: &[Vec<f64>],
    targets: &[f64],
    idx: &[usize],
    params: &TreeParams,
    rng: &mut R,
    scratch: &mut Vec<(f64, f64)>,
) -> Option<SplitChoice> {
    let p = columns.len();
    let features: Vec<usize> = if params.mtry >= p {
        (0..p).collect()
    } else {
        let mut f = sample(rng, p, params.mtry.max(1)).into_vec();
        f.sort_unstable();
        f
    };

    let n = idx.len();
    let l2 = params.l2;
    // Squared-error splits are shift invariant; centering keeps the sums small.
    let shift = if l2 == 0.0 {
        idx.iter().map(|&i| targets[i]).sum::<f64>() / n as f64
    } else {
        0.0
    };
    let total: f64 = idx.iter().map(|&i| targets[i] - shift).sum();
    let parent = total * total / (n as f64 + l2);
    let scale: f64 = idx.iter().map(|&i| (targets[i] - shift).powi(2)).sum::<f64>();
    let min_leaf = params.min_leaf.max(1);

    let mut best: Option<SplitChoice> = None;
    for &f in &features {
        let col = &columns[f];
        scratch.clear();
        scratch.extend(idx.iter().map(|&i| (col[i], targets[i] - shift)));
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += scratch[k].1;
            let (lo, hi) = (scratch[k].0, scratch[k + 1].0);
            if lo == hi {
                continue;
            }
            let n_left = k + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / (n_left as f64 + l2)
                + right_sum * right_sum / (n_right as f64 + l2);
            let better = match best {
                None => true,
                Some(b) => gain > b.gain + GAIN_TIE_RTOL * b.gain.abs().max(f64::MIN_POSITIVE),
            };
            if better {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(SplitChoice {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
    }
    // A split has to buy something over the parent.
    best.filter(|b| b.gain - parent > 1e-12 * scale.max(parent.abs()))
}
