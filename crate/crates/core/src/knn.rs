//! k-nearest-neighbour classification of grid feature vectors.
//!
//! Two backends share one candidate ordering, `(squared distance, sample
//! index)`, so they select identical neighbour sets and therefore identical
//! votes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid_features::{squared_distance, FeatureVector, GridSpec};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    Brute,
    #[default]
    KdTree,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Brute => "brute",
            Backend::KdTree => "kd_tree",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Backend::Brute),
            "kd_tree" | "kdtree" => Ok(Backend::KdTree),
            _ => Err(Error::InvalidArgument(format!("unknown k-NN backend `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample<T> {
    pub label: String,
    pub features: FeatureVector<T>,
}

impl<T> LabeledSample<T> {
    pub fn new(label: impl Into<String>, features: FeatureVector<T>) -> Self {
        LabeledSample {
            label: label.into(),
            features,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub label: String,
    pub votes: usize,
    /// Mean distance from the query to the winning label's voters.
    pub mean_distance: T,
}

pub const DEFAULT_K: usize = 5;
const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node<T> {
    Leaf(Vec<usize>),
    Split {
        dim: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// Median-split tree over feature dimensions. Each split uses the dimension
/// of largest spread; left holds coordinates `<= value`, right `>= value`.
#[derive(Clone, Debug)]
struct KdTree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> KdTree<T> {
    fn build(samples: &[LabeledSample<T>]) -> Self {
        let mut tree = KdTree { nodes: Vec::new() };
        tree.build_node(samples, (0..samples.len()).collect());
        tree
    }

    fn build_node(&mut self, samples: &[LabeledSample<T>], mut idx: Vec<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(Vec::new()));
        if idx.len() <= LEAF_SIZE {
            self.nodes[id] = Node::Leaf(idx);
            return id;
        }
        let dims = samples[idx[0]].features.values.len();
        let coord = |i: usize, d: usize| samples[i].features.values[d];
        let (dim, spread) = (0..dims)
            .map(|d| {
                let (lo, hi) = idx.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
                    let v = coord(i, d);
                    (lo.min(v), hi.max(v))
                });
                (d, hi - lo)
            })
            .fold((0, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if spread <= T::zero() {
            self.nodes[id] = Node::Leaf(idx);
            return id;
        }
        idx.sort_by(|&a, &b| {
            coord(a, dim)
                .partial_cmp(&coord(b, dim))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let right_idx = idx.split_off(idx.len() / 2);
        let value = coord(right_idx[0], dim);
        let left = self.build_node(samples, idx);
        let right = self.build_node(samples, right_idx);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }
}

/// Bounded, ascending list of the best `(distance², index)` candidates.
struct Candidates<T> {
    k: usize,
    best: Vec<(T, usize)>,
}

impl<T: Scalar> Candidates<T> {
    fn new(k: usize) -> Self {
        Candidates {
            k,
            best: Vec::with_capacity(k + 1),
        }
    }

    fn full(&self) -> bool {
        self.best.len() == self.k
    }

    fn worst(&self) -> T {
        self.best.last().map_or(T::infinity(), |c| c.0)
    }

    fn offer(&mut self, d: T, i: usize) {
        let precedes = |c: &(T, usize)| c.0 < d || (c.0 == d && c.1 < i);
        if self.full() && self.best.last().is_some_and(precedes) {
            return;
        }
        let pos = self.best.partition_point(precedes);
        self.best.insert(pos, (d, i));
        self.best.truncate(self.k);
    }
}

#[derive(Clone, Debug)]
pub struct KnnModel<T> {
    k: usize,
    grid: GridSpec,
    backend: Backend,
    samples: Vec<LabeledSample<T>>,
    tree: Option<KdTree<T>>,
}

impl<T: Scalar> KnnModel<T> {
    pub fn fit(samples: Vec<LabeledSample<T>>, k: usize, backend: Backend) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("k-NN training samples"))?;
        let grid = first.features.grid;
        if k == 0 || k > samples.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} must be in 1..={}",
                samples.len()
            )));
        }
        for s in &samples {
            if s.features.grid != grid || s.features.values.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: s.features.values.len(),
                });
            }
            if s.label.is_empty() || s.label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!(
                    "label `{}` must be nonempty without whitespace",
                    s.label
                )));
            }
        }
        let tree = (backend == Backend::KdTree).then(|| KdTree::build(&samples));
        Ok(KnnModel {
            k,
            grid,
            backend,
            samples,
            tree,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn samples(&self) -> &[LabeledSample<T>] {
        &self.samples
    }

    /// Distinct labels in sorted order.
    pub fn labels(&self) -> Vec<String> {
        let mut l: Vec<String> = self.samples.iter().map(|s| s.label.clone()).collect();
        l.sort();
        l.dedup();
        l
    }

    fn check(&self, q: &FeatureVector<T>) -> Result<()> {
        if q.grid != self.grid || q.values.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: q.values.len(),
            });
        }
        Ok(())
    }

    /// The `k` nearest samples as `(squared distance, sample index)`, nearest
    /// first; equal distances order by index.
    pub fn neighbors(&self, q: &FeatureVector<T>) -> Result<Vec<(T, usize)>> {
        self.check(q)?;
        let mut c = Candidates::new(self.k);
        match &self.tree {
            None => {
                for (i, s) in self.samples.iter().enumerate() {
                    c.offer(squared_distance(&q.values, &s.features.values), i);
                }
            }
            Some(tree) => self.search(tree, 0, &q.values, &mut c),
        }
        Ok(c.best)
    }

    fn search(&self, tree: &KdTree<T>, node: usize, q: &[T], c: &mut Candidates<T>) {
        match &tree.nodes[node] {
            Node::Leaf(idx) => {
                for &i in idx {
                    c.offer(squared_distance(q, &self.samples[i].features.values), i);
                }
            }
            &Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                self.search(tree, near, q, c);
                if !c.full() || diff * diff <= c.worst() {
                    self.search(tree, far, q, c);
                }
            }
        }
    }

    /// Majority label among the `k` nearest samples. Vote ties go to the
    /// smaller mean distance, then the lexicographically smaller label.
    pub fn classify(&self, q: &FeatureVector<T>) -> Result<Classification<T>> {
        let nn = self.neighbors(q)?;
        let mut tally: BTreeMap<&str, (usize, T)> = BTreeMap::new();
        for &(d2, i) in &nn {
            let e = tally.entry(self.samples[i].label.as_str()).or_insert((0, T::zero()));
            e.0 += 1;
            e.1 = e.1 + d2.sqrt();
        }
        let mut best: Option<(&str, usize, T)> = None;
        for (label, (votes, sum)) in tally {
            let mean = sum / T::of(votes as f64);
            let better = match best {
                None => true,
                Some((_, bv, bm)) => votes > bv || (votes == bv && mean < bm),
            };
            if better {
                best = Some((label, votes, mean));
            }
        }
        let (label, votes, mean_distance) = best.expect("k >= 1");
        Ok(Classification {
            label: label.to_string(),
            votes,
            mean_distance,
        })
    }

    /// Text model: header line, one `<label> <f0> ...` line per sample with
    /// 9 significant digits, then `end <count>`.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "KNN v1 k={} grid={} backend={}\n",
            self.k, self.grid, self.backend
        );
        for sample in &self.samples {
            s.push_str(&sample.label);
            for v in &sample.features.values {
                s.push_str(&format!(" {:.8e}", v.as_f64()));
            }
            s.push('\n');
        }
        s.push_str(&format!("end {}\n", self.samples.len()));
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(Error::parse(1, "empty model file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.first() != Some(&"KNN") {
            return Err(Error::parse(1, "expected `KNN` header"));
        }
        match toks.get(1) {
            Some(&"v1") => {}
            Some(v) => return Err(Error::Version(format!("KNN {v}"))),
            None => return Err(Error::parse(1, "missing version")),
        }
        let field = |key: &str| -> Result<&str> {
            toks.iter()
                .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| Error::parse(1, format!("missing `{key}=`")))
        };
        let k: usize = field("k")?.parse().map_err(|_| Error::parse(1, "bad k"))?;
        let grid: GridSpec = field("grid")?.parse().map_err(|e| Error::parse(1, format!("{e}")))?;
        let backend: Backend = field("backend")?.parse().map_err(|e| Error::parse(1, format!("{e}")))?;

        let mut samples = Vec::new();
        let mut last = 1;
        for (ln, line) in lines {
            last = ln;
            let mut toks = line.split_whitespace();
            let Some(label) = toks.next() else {
                return Err(Error::parse(ln, "blank line"));
            };
            if label == "end" {
                let n: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::parse(ln, "bad end marker"))?;
                if n != samples.len() {
                    return Err(Error::parse(ln, format!("end marker says {n} samples, read {}", samples.len())));
                }
                return Self::fit(samples, k, backend);
            }
            let values = toks
                .map(|t| t.parse::<f64>().map(T::of))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|e| Error::parse(ln, format!("bad feature value: {e}")))?;
            if values.len() != grid.len() {
                return Err(Error::parse(
                    ln,
                    format!("expected {} features, got {}", grid.len(), values.len()),
                ));
            }
            samples.push(LabeledSample::new(label, FeatureVector { grid, values }));
        }
        Err(Error::parse(last + 1, "truncated: missing end marker"))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
