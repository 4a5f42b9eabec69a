//! Euclidean distances and agglomerative clustering.
//!
//! [`agglomerate`] keeps a dissimilarity matrix between live clusters and
//! updates it with the Lance–Williams recurrence after each merge.
//! [`oracle::agglomerate_oracle`] recomputes every linkage from its
//! definition instead and exists to check the fast path.
//!
//! Cluster ids: leaves are `0..n`, the cluster created by merge step `s` is
//! `n + s`. Among pairs at the same minimal distance the pair with the
//! lexicographically smallest `(smaller id, larger id)` is merged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod oracle;

pub use oracle::{agglomerate_oracle, agglomerate_oracle_bounded, DEFAULT_ORACLE_BOUND};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HacError {
    #[error("no observations to cluster")]
    EmptyInput,
    #[error("observation {index} has no coordinates")]
    ZeroDimension { index: usize },
    #[error("observation {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("observation {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("oracle limited to {bound} observations, got {n}")]
    OracleTooLarge { n: usize, bound: usize },
    #[error("cannot cut {n} leaves into {k} clusters")]
    CutOutOfRange { k: usize, n: usize },
    #[error("{labels} labels for {n} leaves")]
    LabelCount { labels: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    Average,
    Centroid,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Centroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Centroid => "centroid",
        }
    }

    /// Whether merge heights are guaranteed non-decreasing.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Linkage::Centroid)
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Linkage::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown linkage `{s}` (expected single, complete, average or centroid)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
    /// Set when some merge is lower than the merge before it. Only centroid
    /// linkage can produce this.
    pub inversion: bool,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i}")).collect()
}

fn has_inversion(merges: &[Merge]) -> bool {
    merges.windows(2).any(|w| w[1].height < w[0].height)
}

impl Dendrogram {
    pub(crate) fn from_merges(n: usize, linkage: Linkage, merges: Vec<Merge>) -> Self {
        let inversion = has_inversion(&merges);
        Dendrogram {
            labels: default_labels(n),
            linkage,
            merges,
            inversion,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, HacError> {
        if labels.len() != self.labels.len() {
            return Err(HacError::LabelCount {
                labels: labels.len(),
                n: self.labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    /// Id of the root cluster.
    pub fn root(&self) -> usize {
        self.merges.last().map_or(0, |m| m.id)
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.leaf_count()
    }

    pub fn merge(&self, id: usize) -> Option<&Merge> {
        id.checked_sub(self.leaf_count()).and_then(|s| self.merges.get(s))
    }

    /// Height at which cluster `id` was formed; 0 for leaves.
    pub fn height(&self, id: usize) -> f64 {
        self.merge(id).map_or(0.0, |m| m.height)
    }

    /// Children of merge `id` ordered by their smallest leaf index, the
    /// order used by every renderer.
    pub fn ordered_children(&self, id: usize) -> Option<[usize; 2]> {
        let m = self.merge(id)?;
        let first_leaf = |c: usize| self.members(c)[0];
        Some(if first_leaf(m.left) <= first_leaf(m.right) {
            [m.left, m.right]
        } else {
            [m.right, m.left]
        })
    }

    /// Leaf indices under cluster `id`, ascending.
    pub fn members(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            match self.merge(c) {
                Some(m) => {
                    stack.push(m.left);
                    stack.push(m.right);
                }
                None => out.push(c),
            }
        }
        out.sort_unstable();
        out
    }
}

/// Straight-line distance between two observations.
pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64, HacError> {
    if x.is_empty() {
        return Err(HacError::ZeroDimension { index: 0 });
    }
    if x.len() != y.len() {
        return Err(HacError::DimensionMismatch {
            index: 1,
            expected: x.len(),
            found: y.len(),
        });
    }
    if let Some(index) = [x, y].iter().position(|v| v.iter().any(|c| !c.is_finite())) {
        return Err(HacError::NonFinite { index });
    }
    Ok(squared_distance(x, y).sqrt())
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Symmetric pairwise distances, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

pub(crate) fn check_observations(vectors: &[Vec<f64>]) -> Result<usize, HacError> {
    let first = vectors.first().ok_or(HacError::EmptyInput)?;
    let dim = first.len();
    for (index, v) in vectors.iter().enumerate() {
        if v.is_empty() {
            return Err(HacError::ZeroDimension { index });
        }
        if v.len() != dim {
            return Err(HacError::DimensionMismatch {
                index,
                expected: dim,
                found: v.len(),
            });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(HacError::NonFinite { index });
        }
    }
    Ok(dim)
}

pub fn distance_matrix(vectors: &[Vec<f64>]) -> Result<DistanceMatrix, HacError> {
    check_observations(vectors)?;
    let n = vectors.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = squared_distance(&vectors[i], &vectors[j]).sqrt();
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, entries })
}

/// Lance–Williams distance from the union of clusters `a` and `b` to a
/// third cluster. For centroid linkage all three distances are squared.
fn lance_williams(linkage: Linkage, d_a: f64, d_b: f64, d_ab: f64, n_a: usize, n_b: usize) -> f64 {
    let (n_a, n_b) = (n_a as f64, n_b as f64);
    match linkage {
        Linkage::Single => d_a.min(d_b),
        Linkage::Complete => d_a.max(d_b),
        Linkage::Average => (n_a * d_a + n_b * d_b) / (n_a + n_b),
        Linkage::Centroid => {
            let n_ab = n_a + n_b;
            ((n_a * d_a + n_b * d_b) / n_ab - n_a * n_b * d_ab / (n_ab * n_ab)).max(0.0)
        }
    }
}

/// Clusters `vectors` bottom-up until one cluster remains.
pub fn agglomerate(vectors: &[Vec<f64>], linkage: Linkage) -> Result<Dendrogram, HacError> {
    check_observations(vectors)?;
    let n = vectors.len();
    let squared = linkage == Linkage::Centroid;

    // Dense matrix indexed by slot; a merged cluster reuses the slot of its
    // smaller-id child.
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let sq = squared_distance(&vectors[i], &vectors[j]);
            let d = if squared { sq } else { sq.sqrt() };
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut slot_id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    // Live slots ordered by cluster id, so scanning pairs in order visits
    // (smaller id, larger id) lexicographically.
    let mut live: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best = (f64::INFINITY, 0, 0);
        for (p, &a) in live.iter().enumerate() {
            for &b in &live[p + 1..] {
                let d = dist[a * n + b];
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (d_ab, a, b) = best;
        let (n_a, n_b) = (size[a], size[b]);

        for &m in &live {
            if m == a || m == b {
                continue;
            }
            let d = lance_williams(linkage, dist[a * n + m], dist[b * n + m], d_ab, n_a, n_b);
            dist[a * n + m] = d;
            dist[m * n + a] = d;
        }

        let id = n + step;
        merges.push(Merge {
            left: slot_id[a],
            right: slot_id[b],
            height: if squared { d_ab.sqrt() } else { d_ab },
            id,
            size: n_a + n_b,
        });
        slot_id[a] = id;
        size[a] = n_a + n_b;
        live.retain(|&s| s != a && s != b);
        live.push(a);
    }

    Ok(Dendrogram::from_merges(n, linkage, merges))
}

/// Flat clustering with `k` groups: the last `k - 1` merges are undone.
/// Groups are ordered by their smallest leaf index; members ascend.
pub fn cut_indices(dendrogram: &Dendrogram, k: usize) -> Result<Vec<Vec<usize>>, HacError> {
    let n = dendrogram.leaf_count();
    if k == 0 || k > n {
        return Err(HacError::CutOutOfRange { k, n });
    }
    // Union-find over cluster ids, replaying the first n - k merges.
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in &dendrogram.merges[..n - k] {
        let l = find(&mut parent, m.left);
        let r = find(&mut parent, m.right);
        parent[l] = m.id;
        parent[r] = m.id;
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(leaf),
            None => groups.push((root, vec![leaf])),
        }
    }
    Ok(groups.into_iter().map(|(_, g)| g).collect())
}

/// [`cut_indices`] with leaf labels.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<Vec<String>>, HacError> {
    Ok(cut_indices(dendrogram, k)?
        .into_iter()
        .map(|g| g.into_iter().map(|i| dendrogram.labels[i].clone()).collect())
        .collect())
}
