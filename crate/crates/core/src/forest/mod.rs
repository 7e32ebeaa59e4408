//! Multi-class random forest: bootstrap-aggregated Gini trees with random
//! feature sub-selection per node and majority voting.

pub mod dataset;
pub mod tree;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_rng, derive_seed, stream};

pub use dataset::Dataset;
use tree::{grow_tree, Columns, GrowParams};
pub use tree::{Node, Tree, N_CLASSES};

const MODEL_MAGIC: &str = "cran-rf-forest";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainParams {
    pub t_n: usize,
    pub t_d: usize,
    pub m_try: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl TrainParams {
    pub fn new(t_n: usize, t_d: usize, m_try: usize, seed: u64) -> Self {
        TrainParams {
            t_n,
            t_d,
            m_try,
            min_samples_split: 2,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub arity: usize,
    pub t_n: usize,
    pub t_d: usize,
    pub m_try: usize,
    pub train_seed: u64,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
}

fn check_params(ds: &Dataset, p: &TrainParams) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    if p.t_n == 0 || p.t_d == 0 || p.m_try == 0 {
        return Err(Error::Argument(
            "t_n, t_d and m_try must be positive".into(),
        ));
    }
    if p.m_try > ds.arity() {
        return Err(Error::Argument(format!(
            "m_try {} exceeds feature arity {}",
            p.m_try,
            ds.arity()
        )));
    }
    Ok(())
}

fn tree_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, &[stream::TREE, t as u64])
}

/// Tree `t` of the forest: its bootstrap and split randomness come only
/// from `(p.seed, t)`.
fn train_tree(cols: &Columns<'_>, n: usize, p: &TrainParams, t: usize) -> Tree {
    let seed = tree_seed(p.seed, t);
    let mut rng = derive_rng(seed, &[0]);
    let mut idx: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n as u32)).collect();
    let params = GrowParams {
        max_depth: p.t_d,
        m_try: p.m_try,
        min_samples_split: p.min_samples_split.max(2),
    };
    grow_tree(cols, &mut idx, params, seed)
}

fn assemble(ds: &Dataset, p: &TrainParams, trees: Vec<Tree>) -> ForestModel {
    ForestModel {
        arity: ds.arity(),
        t_n: p.t_n,
        t_d: p.t_d,
        m_try: p.m_try,
        train_seed: p.seed,
        feature_names: ds.feature_names.clone(),
        trees,
    }
}

fn warn_degenerate(ds: &Dataset) {
    if ds.class_histogram().iter().filter(|&&c| c > 0).count() == 1 {
        log::warn!("dataset holds a single class; every tree is one leaf");
    }
}

/// Trains trees in parallel. The model equals [`train_serial`]'s.
pub fn train(ds: &Dataset, p: &TrainParams) -> Result<ForestModel> {
    check_params(ds, p)?;
    warn_degenerate(ds);
    let cols = Columns::new(&ds.features, &ds.labels, ds.arity());
    let trees = (0..p.t_n)
        .into_par_iter()
        .map(|t| train_tree(&cols, ds.len(), p, t))
        .collect();
    Ok(assemble(ds, p, trees))
}

/// Trains trees one after another, last tree first.
pub fn train_serial(ds: &Dataset, p: &TrainParams) -> Result<ForestModel> {
    check_params(ds, p)?;
    warn_degenerate(ds);
    let cols = Columns::new(&ds.features, &ds.labels, ds.arity());
    let mut trees: Vec<Tree> = (0..p.t_n)
        .rev()
        .map(|t| train_tree(&cols, ds.len(), p, t))
        .collect();
    trees.reverse();
    Ok(assemble(ds, p, trees))
}

/// Most frequent vote; ties go to the lower class.
pub fn majority_vote(votes: impl IntoIterator<Item = u8>) -> u8 {
    let mut counts = [0usize; N_CLASSES];
    for v in votes {
        counts[v as usize] += 1;
    }
    let mut best = 0;
    for c in 1..N_CLASSES {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best as u8
}

impl ForestModel {
    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        if x.len() != self.arity {
            return Err(Error::Argument(format!(
                "feature vector has {} entries, model expects {}",
                x.len(),
                self.arity
            )));
        }
        Ok(majority_vote(self.trees.iter().map(|t| t.predict(x))))
    }

    /// Forest made of the first `t_n` trees.
    pub fn truncated(&self, t_n: usize) -> ForestModel {
        let mut m = self.clone();
        m.trees.truncate(t_n);
        m.t_n = m.trees.len();
        m
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}");
        let _ = writeln!(out, "version {MODEL_VERSION}");
        let _ = writeln!(out, "arity {}", self.arity);
        let _ = writeln!(out, "t_n {}", self.trees.len());
        let _ = writeln!(out, "t_d {}", self.t_d);
        let _ = writeln!(out, "m_try {}", self.m_try);
        let _ = writeln!(out, "seed {}", self.train_seed);
        let _ = writeln!(out, "features {}", self.feature_names.join(","));
        for (i, t) in self.trees.iter().enumerate() {
            let _ = writeln!(out, "tree {i} {}", t.nodes.len());
            for n in &t.nodes {
                match n {
                    Node::Split {
                        feature, threshold, ..
                    } => {
                        let _ = writeln!(out, "S {feature} {threshold}");
                    }
                    Node::Leaf { class } => {
                        let _ = writeln!(out, "L {class}");
                    }
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ForestModel::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut p = ModelParser {
            lines: text.lines().enumerate().peekable(),
            source,
            last: 0,
        };
        let magic = p.next_line()?;
        if magic != MODEL_MAGIC {
            return Err(p.err(format!("expected '{MODEL_MAGIC}' header")));
        }
        let version: u32 = p.field("version")?;
        if version != MODEL_VERSION {
            return Err(Error::Version {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let arity: usize = p.field("arity")?;
        let t_n: usize = p.field("t_n")?;
        let t_d: usize = p.field("t_d")?;
        let m_try: usize = p.field("m_try")?;
        let seed: u64 = p.field("seed")?;
        let names_line = p.keyed("features")?;
        let feature_names: Vec<String> = if names_line.is_empty() {
            Vec::new()
        } else {
            names_line.split(',').map(str::to_string).collect()
        };
        if feature_names.len() != arity {
            return Err(p.err(format!(
                "{} feature names for arity {arity}",
                feature_names.len()
            )));
        }
        let mut trees = Vec::with_capacity(t_n);
        for t in 0..t_n {
            let header = p.keyed("tree")?;
            let mut it = header.split_whitespace();
            let index: usize = parse_num(it.next(), &p)?;
            let count: usize = parse_num(it.next(), &p)?;
            if index != t || it.next().is_some() {
                return Err(p.err(format!("expected 'tree {t} <count>'")));
            }
            let mut nodes = Vec::with_capacity(count);
            p.read_subtree(&mut nodes, arity, 0, t_d)?;
            if nodes.len() != count {
                return Err(p.err(format!(
                    "tree {t} has {} nodes, header says {count}",
                    nodes.len()
                )));
            }
            trees.push(Tree { nodes });
        }
        if p.next_line()? != "end" {
            return Err(p.err("expected 'end'".into()));
        }
        if let Some((i, _)) = p.lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(
                format!("{source}:{}", i + 1),
                "content after 'end'",
            ));
        }
        Ok(ForestModel {
            arity,
            t_n,
            t_d,
            m_try,
            train_seed: seed,
            feature_names,
            trees,
        })
    }
}

fn parse_num<T: std::str::FromStr>(s: Option<&str>, p: &ModelParser<'_>) -> Result<T> {
    s.and_then(|s| s.parse().ok())
        .ok_or_else(|| p.err("bad or missing number".into()))
}

struct ModelParser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    source: &'a str,
    last: usize,
}

impl ModelParser<'_> {
    fn err(&self, message: String) -> Error {
        Error::parse(format!("{}:{}", self.source, self.last), message)
    }

    fn next_line(&mut self) -> Result<&str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l.trim())
            }
            None => {
                self.last += 1;
                Err(self.err("unexpected end of file".into()))
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<String> {
        let line = self.next_line()?.to_string();
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.trim().to_string()),
            None if line == key => Ok(String::new()),
            _ => Err(self.err(format!("expected '{key}'"))),
        }
    }

    fn field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| self.err(format!("bad value for '{key}'")))
    }

    fn read_subtree(
        &mut self,
        nodes: &mut Vec<Node>,
        arity: usize,
        depth: usize,
        t_d: usize,
    ) -> Result<()> {
        let line = self.next_line()?.to_string();
        let mut it = line.split_whitespace();
        match it.next() {
            Some("L") => {
                let class: u8 = parse_num(it.next(), self)?;
                if class as usize >= N_CLASSES || it.next().is_some() {
                    return Err(self.err(format!("invalid leaf '{line}'")));
                }
                nodes.push(Node::Leaf { class });
                Ok(())
            }
            Some("S") => {
                let feature: usize = parse_num(it.next(), self)?;
                let threshold: f64 = parse_num(it.next(), self)?;
                if feature >= arity || !threshold.is_finite() || it.next().is_some() {
                    return Err(self.err(format!("invalid split '{line}'")));
                }
                if depth >= t_d {
                    return Err(self.err(format!("tree deeper than t_d = {t_d}")));
                }
                let me = nodes.len();
                nodes.push(Node::Split {
                    feature,
                    threshold,
                    right: 0,
                });
                self.read_subtree(nodes, arity, depth + 1, t_d)?;
                let r = nodes.len();
                if let Node::Split { right, .. } = &mut nodes[me] {
                    *right = r;
                }
                self.read_subtree(nodes, arity, depth + 1, t_d)
            }
            _ => Err(self.err(format!("expected a node, found '{line}'"))),
        }
    }
}

/// Fraction of samples predicted correctly.
pub fn accuracy(model: &ForestModel, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Argument("accuracy of an empty dataset".into()));
    }
    let mut correct = 0usize;
    for (x, &y) in ds.features.iter().zip(&ds.labels) {
        if model.predict(x)? == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.len() as f64)
}

/// One cell of the dimensioning table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionRow {
    pub t_n: usize,
    pub t_d: usize,
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
    pub test_accuracy: f64,
    /// Training time of the first `t_n` trees.
    pub train_seconds: f64,
}

/// Accuracy of every prefix length in `t_ns` given per-tree predictions.
fn prefix_accuracies(per_tree: &[Vec<u8>], labels: &[u8], t_ns: &[usize]) -> Vec<f64> {
    let n = labels.len();
    let mut counts = vec![[0u32; N_CLASSES]; n];
    let mut done = 0;
    let mut wanted: Vec<(usize, usize)> = t_ns
        .iter()
        .copied()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    wanted.sort();
    let mut results = vec![0.0; t_ns.len()];
    for (t_n, slot) in wanted {
        while done < t_n {
            for (c, &v) in counts.iter_mut().zip(&per_tree[done]) {
                c[v as usize] += 1;
            }
            done += 1;
        }
        let correct = counts
            .iter()
            .zip(labels)
            .filter(|(c, &y)| {
                let mut best = 0;
                for k in 1..N_CLASSES {
                    if c[k] > c[best] {
                        best = k;
                    }
                }
                best as u8 == y
            })
            .count();
        results[slot] = correct as f64 / n.max(1) as f64;
    }
    results
}

/// Train/validation/test accuracy over a grid of tree counts and depths.
/// For each depth one forest of `max(t_ns)` trees is grown; smaller counts
/// are its prefixes, which equal forests trained with that count.
pub fn dimensioning_sweep(
    train_set: &Dataset,
    validation: &Dataset,
    test: &Dataset,
    t_ns: &[usize],
    t_ds: &[usize],
    m_try: usize,
    seed: u64,
) -> Result<Vec<DimensionRow>> {
    if t_ns.is_empty() || t_ds.is_empty() {
        return Err(Error::Argument("dimensioning grid is empty".into()));
    }
    let max_tn = *t_ns.iter().max().expect("non-empty");
    let mut rows = Vec::new();
    for &t_d in t_ds {
        let p = TrainParams::new(max_tn, t_d, m_try, seed);
        check_params(train_set, &p)?;
        let cols = Columns::new(&train_set.features, &train_set.labels, train_set.arity());
        let timed: Vec<(Tree, f64)> = (0..max_tn)
            .into_par_iter()
            .map(|t| {
                let start = Instant::now();
                let tree = train_tree(&cols, train_set.len(), &p, t);
                (tree, start.elapsed().as_secs_f64())
            })
            .collect();
        let predict_all = |ds: &Dataset| -> Vec<Vec<u8>> {
            timed
                .par_iter()
                .map(|(tree, _)| ds.features.iter().map(|x| tree.predict(x)).collect())
                .collect()
        };
        let train_acc = prefix_accuracies(&predict_all(train_set), &train_set.labels, t_ns);
        let val_acc = if validation.is_empty() {
            vec![f64::NAN; t_ns.len()]
        } else {
            prefix_accuracies(&predict_all(validation), &validation.labels, t_ns)
        };
        let test_acc = prefix_accuracies(&predict_all(test), &test.labels, t_ns);
        for (i, &t_n) in t_ns.iter().enumerate() {
            rows.push(DimensionRow {
                t_n,
                t_d,
                train_accuracy: train_acc[i],
                validation_accuracy: val_acc[i],
                test_accuracy: test_acc[i],
                train_seconds: timed[..t_n].iter().map(|(_, s)| s).sum(),
            });
        }
    }
    Ok(rows)
}
