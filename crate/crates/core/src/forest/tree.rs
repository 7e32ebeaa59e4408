//! CART-style classification tree grown on Gini impurity.

use std::cmp::Ordering;

use rand::seq::SliceRandom;

use crate::rng::{derive_rng, derive_seed, stream};

/// Number of label classes (CQI 0..=15).
pub const N_CLASSES: usize = 16;

/// Preorder node. A split's left child directly follows it.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        right: usize,
    },
    Leaf {
        class: u8,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Samples with `x[feature] <= threshold` go left.
    pub fn predict(&self, x: &[f64]) -> u8 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        i + 1
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> (usize, usize) {
            // Returns (depth below i, index after the subtree).
            match &nodes[i] {
                Node::Leaf { .. } => (0, i + 1),
                Node::Split { right, .. } => {
                    let (dl, _) = walk(nodes, i + 1);
                    let (dr, end) = walk(nodes, *right);
                    (1 + dl.max(dr), end)
                }
            }
        }
        walk(&self.nodes, 0).0
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

/// Training data in column-major layout.
pub struct Columns<'a> {
    pub columns: Vec<Vec<f64>>,
    pub labels: &'a [u8],
}

impl<'a> Columns<'a> {
    pub fn new(rows: &[Vec<f64>], labels: &'a [u8], arity: usize) -> Self {
        let columns = (0..arity)
            .map(|f| rows.iter().map(|r| r[f]).collect())
            .collect();
        Columns { columns, labels }
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub max_depth: usize,
    pub m_try: usize,
    pub min_samples_split: usize,
}

/// Candidate split scored by `S_l/n_l + S_r/n_r` with `S = Σ count²`;
/// larger means lower weighted Gini impurity.
#[derive(Debug, Clone, Copy)]
pub struct SplitScore {
    pub sq_left: u64,
    pub n_left: u64,
    pub sq_right: u64,
    pub n_right: u64,
}

impl SplitScore {
    /// Exact comparison by cross-multiplication.
    pub fn cmp(&self, other: &SplitScore) -> Ordering {
        let num = |s: &SplitScore| {
            s.sq_left as u128 * s.n_right as u128 + s.sq_right as u128 * s.n_left as u128
        };
        let den = |s: &SplitScore| s.n_left as u128 * s.n_right as u128;
        (num(self) * den(other)).cmp(&(num(other) * den(self)))
    }

    /// Weighted child Gini impurity.
    pub fn impurity(&self) -> f64 {
        let n = (self.n_left + self.n_right) as f64;
        let child = |sq: u64, m: u64| m as f64 - sq as f64 / m as f64;
        (child(self.sq_left, self.n_left) + child(self.sq_right, self.n_right)) / n
    }

    /// True when the split strictly lowers impurity below the parent's.
    pub fn improves_on(&self, parent_sq: u64) -> bool {
        let n = (self.n_left + self.n_right) as u128;
        let lhs = (self.sq_left as u128 * self.n_right as u128
            + self.sq_right as u128 * self.n_left as u128)
            * n;
        lhs > parent_sq as u128 * self.n_left as u128 * self.n_right as u128
    }
}

/// Gini impurity of a class histogram.
pub fn gini(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let sq: u64 = counts.iter().map(|c| c * c).sum();
    1.0 - sq as f64 / (n * n) as f64
}

#[derive(Debug, Clone, Copy)]
pub struct BestSplit {
    pub feature: usize,
    pub threshold: f64,
    pub score: SplitScore,
}

fn sq_sum(counts: &[u64; N_CLASSES]) -> u64 {
    counts.iter().map(|c| c * c).sum()
}

/// Best threshold on one feature for the samples `idx`, or `None` when the
/// feature is constant there. Ties keep the lowest threshold.
pub fn best_threshold(values: &[f64], labels: &[u8], idx: &[u32]) -> Option<(f64, SplitScore)> {
    let mut pairs: Vec<(f64, u8)> = idx
        .iter()
        .map(|&i| (values[i as usize], labels[i as usize]))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.first()?.0 == pairs.last()?.0 {
        return None;
    }
    let mut right = [0u64; N_CLASSES];
    for &(_, l) in &pairs {
        right[l as usize] += 1;
    }
    let mut left = [0u64; N_CLASSES];
    let n = pairs.len() as u64;
    let mut best: Option<(f64, SplitScore)> = None;
    for k in 0..pairs.len() - 1 {
        let (v, l) = pairs[k];
        left[l as usize] += 1;
        right[l as usize] -= 1;
        let next = pairs[k + 1].0;
        if next == v {
            continue;
        }
        let n_left = k as u64 + 1;
        let score = SplitScore {
            sq_left: sq_sum(&left),
            n_left,
            sq_right: sq_sum(&right),
            n_right: n - n_left,
        };
        if best.map_or(true, |(_, b)| score.cmp(&b) == Ordering::Greater) {
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next {
                threshold = v;
            }
            best = Some((threshold, score));
        }
    }
    best
}

fn majority(counts: &[u64; N_CLASSES]) -> u8 {
    let mut best = 0;
    for c in 1..N_CLASSES {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best as u8
}

struct Grower<'a> {
    data: &'a Columns<'a>,
    params: GrowParams,
    seed: u64,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn grow(&mut self, idx: &mut [u32], depth: usize, key: u64) {
        let mut counts = [0u64; N_CLASSES];
        for &i in idx.iter() {
            counts[self.data.labels[i as usize] as usize] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.params.max_depth || pure || idx.len() < self.params.min_samples_split {
            self.nodes.push(Node::Leaf {
                class: majority(&counts),
            });
            return;
        }
        let split = self.choose_split(idx, key);
        let parent_sq = sq_sum(&counts);
        let Some(split) = split.filter(|s| s.score.improves_on(parent_sq)) else {
            self.nodes.push(Node::Leaf {
                class: majority(&counts),
            });
            return;
        };
        let col = &self.data.columns[split.feature];
        // Stable partition keeps the left and right sample orders fixed.
        let (mut left, mut right): (Vec<u32>, Vec<u32>) = idx
            .iter()
            .partition(|&&i| col[i as usize] <= split.threshold);
        let me = self.nodes.len();
        self.nodes.push(Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            right: 0,
        });
        self.grow(&mut left, depth + 1, derive_seed(key, &[1]));
        let right_index = self.nodes.len();
        if let Node::Split { right, .. } = &mut self.nodes[me] {
            *right = right_index;
        }
        self.grow(&mut right, depth + 1, derive_seed(key, &[2]));
    }

    /// Visits features in a node-specific random order until `m_try`
    /// non-constant ones have been scored.
    fn choose_split(&self, idx: &[u32], key: u64) -> Option<BestSplit> {
        let mut rng = derive_rng(self.seed, &[stream::SPLIT, key]);
        let mut order: Vec<usize> = (0..self.data.arity()).collect();
        order.shuffle(&mut rng);
        let mut best: Option<BestSplit> = None;
        let mut scored = 0;
        for f in order {
            if scored == self.params.m_try {
                break;
            }
            let Some((threshold, score)) =
                best_threshold(&self.data.columns[f], self.data.labels, idx)
            else {
                continue;
            };
            scored += 1;
            let replace = match &best {
                None => true,
                Some(b) => match score.cmp(&b.score) {
                    Ordering::Greater => true,
                    Ordering::Equal => f < b.feature,
                    Ordering::Less => false,
                },
            };
            if replace {
                best = Some(BestSplit {
                    feature: f,
                    threshold,
                    score,
                });
            }
        }
        best
    }
}

/// Grows one tree on the samples `idx` (may repeat). The split randomness
/// of a node depends only on `seed` and the node's path from the root.
pub fn grow_tree(data: &Columns<'_>, idx: &mut [u32], params: GrowParams, seed: u64) -> Tree {
    let mut g = Grower {
        data,
        params,
        seed,
        nodes: Vec::new(),
    };
    g.grow(idx, 0, 1);
    Tree { nodes: g.nodes }
}
