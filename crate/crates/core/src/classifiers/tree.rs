//! Weighted CART-style decision tree shared by the standalone tree, AdaBoost,
//! and the random forest.
//!
//! Growth is deterministic: nodes are expanded depth-first (left before
//! right), candidate features are drawn from the caller's seeded RNG, split
//! thresholds are midpoints between consecutive distinct values, and a split
//! must strictly decrease weighted Gini impurity.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

/// Minimum weighted-impurity decrease for a split to be accepted.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Leaf {
        p_attack: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tree {
    pub(crate) nodes: Vec<Node>,
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub max_features: usize,
}

struct GrowCtx<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [f64],
    w: &'a [f64],
    params: &'a GrowParams,
}

impl Tree {
    /// Grow a tree on the rows `rows` of `x` with 0/1 targets `y` and sample
    /// weights `w` (need not be normalized).
    pub(crate) fn grow(
        x: ArrayView2<f64>,
        y: &[f64],
        w: &[f64],
        rows: &[usize],
        params: &GrowParams,
        rng: &mut ChaCha8Rng,
    ) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let ctx = GrowCtx { x, y, w, params };
        grow_node(&mut tree, &ctx, rows, 0, rng);
        tree
    }

    /// Attack-class probability at the leaf reached by `row` of `x`.
    pub(crate) fn predict_row(&self, x: ArrayView2<f64>, row: usize) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { p_attack } => return *p_attack,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[(row, *feature)] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

fn weighted_stats(ctx: &GrowCtx, rows: &[usize]) -> (f64, f64) {
    let mut total = 0.0;
    let mut attack = 0.0;
    for &r in rows {
        total += ctx.w[r];
        attack += ctx.w[r] * ctx.y[r];
    }
    (total, attack)
}

fn gini(total: f64, attack: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = attack / total;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Returns the new node's index.
fn grow_node(
    tree: &mut Tree,
    ctx: &GrowCtx,
    rows: &[usize],
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let (total, attack) = weighted_stats(ctx, rows);
    let p_attack = if total > 0.0 { attack / total } else { 0.0 };
    let parent_gini = gini(total, attack);
    if depth >= ctx.params.max_depth || parent_gini <= 0.0 {
        tree.nodes.push(Node::Leaf { p_attack });
        return tree.nodes.len() - 1;
    }

    let d = ctx.x.ncols();
    // Candidate features for this node, in drawn order; drawing is skipped
    // (no RNG consumption) when every feature is a candidate.
    let candidates: Vec<usize> = if ctx.params.max_features >= d {
        (0..d).collect()
    } else {
        sample(rng, d, ctx.params.max_features).into_vec()
    };

    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    let mut order: Vec<usize> = Vec::with_capacity(rows.len());
    for &feature in &candidates {
        order.clear();
        order.extend_from_slice(rows);
        order.sort_by(|&a, &b| {
            ctx.x[(a, feature)]
                .partial_cmp(&ctx.x[(b, feature)])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut left_total = 0.0;
        let mut left_attack = 0.0;
        for i in 0..order.len() - 1 {
            let r = order[i];
            left_total += ctx.w[r];
            left_attack += ctx.w[r] * ctx.y[r];
            let v = ctx.x[(r, feature)];
            let next = ctx.x[(order[i + 1], feature)];
            if next <= v {
                continue;
            }
            let right_total = total - left_total;
            let right_attack = attack - left_attack;
            let children = left_total * gini(left_total, left_attack)
                + right_total * gini(right_total, right_attack);
            let gain = parent_gini - children / total;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, feature, 0.5 * (v + next)));
            }
        }
    }

    match best {
        Some((gain, feature, threshold)) if gain > MIN_GAIN => {
            let placeholder = tree.nodes.len();
            tree.nodes.push(Node::Leaf { p_attack });
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| ctx.x[(r, feature)] <= threshold);
            let left = grow_node(tree, ctx, &left_rows, depth + 1, rng);
            let right = grow_node(tree, ctx, &right_rows, depth + 1, rng);
            tree.nodes[placeholder] = Node::Split {
                feature,
                threshold,
                left,
                right,
            };
            placeholder
        }
        _ => {
            tree.nodes.push(Node::Leaf { p_attack });
            tree.nodes.len() - 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;

    fn grow_plain(x: ArrayView2<f64>, y: &[f64], max_depth: usize) -> Tree {
        let w = vec![1.0; y.len()];
        let rows: Vec<usize> = (0..y.len()).collect();
        let params = GrowParams {
            max_depth,
            max_features: x.ncols(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        Tree::grow(x, y, &w, &rows, &params, &mut rng)
    }

    #[test]
    fn separable_data_reaches_pure_leaves() {
        let x = array![[0.0], [0.1], [0.2], [1.0], [1.1], [1.2]];
        let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let tree = grow_plain(x.view(), &y, 5);
        for (row, want) in y.iter().enumerate() {
            let p = tree.predict_row(x.view(), row);
            assert_eq!(p, *want, "row {row}");
        }
    }

    #[test]
    fn threshold_is_midpoint() {
        let x = array![[0.0], [1.0]];
        let y = [0.0, 1.0];
        let tree = grow_plain(x.view(), &y, 5);
        match &tree.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(*threshold, 0.5),
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn pure_node_stays_leaf() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = [1.0, 1.0, 1.0];
        let tree = grow_plain(x.view(), &y, 5);
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.predict_row(x.view(), 0), 1.0);
    }

    #[test]
    fn constant_features_stay_leaf() {
        // No split point exists, so no strict improvement is possible.
        let x = array![[1.0], [1.0], [1.0], [1.0]];
        let y = [0.0, 1.0, 0.0, 1.0];
        let tree = grow_plain(x.view(), &y, 5);
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.predict_row(x.view(), 0), 0.5);
    }

    #[test]
    fn depth_cap_is_respected() {
        // 8 alternating points need depth 3 to memorize; cap at 1.
        let x = array![
            [0.0],
            [1.0],
            [2.0],
            [3.0],
            [4.0],
            [5.0],
            [6.0],
            [7.0]
        ];
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let tree = grow_plain(x.view(), &y, 1);
        let depth = max_depth_of(&tree, 0);
        assert!(depth <= 1, "depth {depth}");
    }

    fn max_depth_of(tree: &Tree, idx: usize) -> usize {
        match &tree.nodes[idx] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + max_depth_of(tree, *left).max(max_depth_of(tree, *right))
            }
        }
    }

    #[test]
    fn weights_steer_the_split() {
        // Unweighted, feature 0 splits 3/1; with the minority row upweighted
        // the best split must separate it.
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [0.0, 0.0, 0.0, 1.0];
        let rows = [0, 1, 2, 3];
        let params = GrowParams {
            max_depth: 1,
            max_features: 2,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w_heavy = [1.0, 1.0, 1.0, 100.0];
        let tree = Tree::grow(x.view(), &y, &w_heavy, &rows, &params, &mut rng);
        let p3 = tree.predict_row(x.view(), 3);
        assert!(p3 > 0.99, "upweighted row should live in a pure-ish leaf");
    }

    #[test]
    fn growth_is_deterministic_per_seed() {
        let x = array![
            [0.0, 3.0],
            [1.0, 2.0],
            [2.0, 1.0],
            [3.0, 0.0],
            [0.5, 2.5],
            [2.5, 0.5]
        ];
        let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        let w = vec![1.0; 6];
        let rows: Vec<usize> = (0..6).collect();
        let params = GrowParams {
            max_depth: 3,
            max_features: 1,
        };
        let mut rng_a = ChaCha8Rng::seed_from_u64(7);
        let mut rng_b = ChaCha8Rng::seed_from_u64(7);
        let a = Tree::grow(x.view(), &y, &w, &rows, &params, &mut rng_a);
        let b = Tree::grow(x.view(), &y, &w, &rows, &params, &mut rng_b);
        assert_eq!(a, b);
    }
}
