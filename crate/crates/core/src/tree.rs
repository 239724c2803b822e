//! Labeled trees on `1..=n`, the Prüfer bijection and uniform sampling.
//!
//! Labels are 1-based everywhere in the public API. Edges are stored with
//! the smaller label first; the lexicographically sorted edge list is the
//! canonical form used for equality, hashing and JSON output.

use std::hash::{Hash, Hasher};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone)]
pub struct LabeledTree {
    n: usize,
    // Oriented (small, large); order is whatever the producer emitted.
    edges: Vec<(u32, u32)>,
}

impl LabeledTree {
    /// Builds a tree from an edge list, checking that it spans `1..=n`
    /// without cycles.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one vertex".into()));
        }
        if n > u32::MAX as usize {
            return invalid(format!("n = {n} too large"));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "expected {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut dsu = DisjointSets::new(n);
        let mut oriented = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for label in [u, v] {
                if label == 0 || label > n {
                    return Err(Error::LabelOutOfRange { label, n });
                }
            }
            if u == v {
                return Err(Error::InvalidTree(format!("self-loop at {u}")));
            }
            if dsu.union(u - 1, v - 1).is_none() {
                return Err(Error::InvalidTree(format!("edge {{{u},{v}}} closes a cycle")));
            }
            oriented.push((u.min(v) as u32, u.max(v) as u32));
        }
        Ok(LabeledTree { n, edges: oriented })
    }

    /// Trusted constructor for producers that already guarantee validity.
    fn from_valid(n: usize, edges: Vec<(u32, u32)>) -> Self {
        debug_assert_eq!(edges.len(), n.saturating_sub(1));
        LabeledTree { n, edges }
    }

    pub fn single_vertex() -> Self {
        LabeledTree { n: 1, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u < v`, in producer order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn canonical_edges(&self) -> Vec<(u32, u32)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n + 1];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn to_json(&self, root: Option<usize>) -> TreeJson {
        TreeJson {
            n: self.n,
            edges: self.canonical_edges().into_iter().map(|(u, v)| [u as usize, v as usize]).collect(),
            root,
        }
    }
}

impl PartialEq for LabeledTree {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_edges() == other.canonical_edges()
    }
}

impl Eq for LabeledTree {}

impl Hash for LabeledTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.canonical_edges().hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedTree {
    pub tree: LabeledTree,
    root: usize,
}

impl RootedTree {
    pub fn new(tree: LabeledTree, root: usize) -> Result<Self> {
        if root == 0 || root > tree.n() {
            return Err(Error::LabelOutOfRange { label: root, n: tree.n() });
        }
        Ok(RootedTree { tree, root })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn to_json(&self) -> TreeJson {
        self.tree.to_json(Some(self.root))
    }
}

/// Wire format: `{"n": .., "edges": [[u,v],..], "root": int|null}` with
/// `u < v` and edges sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub root: Option<usize>,
}

impl TreeJson {
    pub fn into_tree(self) -> Result<(LabeledTree, Option<usize>)> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let tree = LabeledTree::new(self.n, &edges)?;
        if let Some(r) = self.root {
            if r == 0 || r > self.n {
                return Err(Error::LabelOutOfRange { label: r, n: self.n });
            }
        }
        Ok((tree, self.root))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrueferSeq {
    n: usize,
    seq: Vec<u32>,
}

impl PrueferSeq {
    pub fn new(n: usize, seq: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return invalid(format!("Prüfer sequences need n >= 2, got {n}"));
        }
        if seq.len() != n - 2 {
            return invalid(format!("Prüfer sequence for n = {n} must have length {}, got {}", n - 2, seq.len()));
        }
        if let Some(&label) = seq.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::LabelOutOfRange { label, n });
        }
        Ok(PrueferSeq { n, seq: seq.into_iter().map(|l| l as u32).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.seq.iter().map(|&l| l as usize)
    }

    fn from_raw(n: usize, seq: Vec<u32>) -> Self {
        PrueferSeq { n, seq }
    }
}

/// Decodes with the smallest-leaf-first convention in O(n).
pub fn prufer_decode(p: &PrueferSeq) -> LabeledTree {
    decode_raw(p.n, &p.seq)
}

pub(crate) fn decode_raw(n: usize, seq: &[u32]) -> LabeledTree {
    debug_assert!(n >= 2 && seq.len() == n - 2);
    let mut degree = vec![1u32; n + 1];
    degree[0] = 0;
    for &v in seq {
        degree[v as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 1;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &v in seq {
        let v = v as usize;
        edges.push((leaf.min(v) as u32, leaf.max(v) as u32));
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    // The last remaining pair always includes n.
    edges.push((leaf as u32, n as u32));
    LabeledTree::from_valid(n, edges)
}

/// Inverse of [`prufer_decode`]. Trees with fewer than two vertices have no
/// Prüfer sequence.
pub fn prufer_encode(t: &LabeledTree) -> Result<PrueferSeq> {
    let n = t.n();
    if n < 2 {
        return invalid("Prüfer encoding needs n >= 2");
    }
    let adj = Adjacency::new(t);
    // Parent pointers with n as the root.
    let mut parent = vec![0u32; n + 1];
    let mut stack = vec![n];
    let mut seen = vec![false; n + 1];
    seen[n] = true;
    while let Some(u) = stack.pop() {
        for &w in adj.neighbors(u) {
            let w = w as usize;
            if !seen[w] {
                seen[w] = true;
                parent[w] = u as u32;
                stack.push(w);
            }
        }
    }
    let mut degree: Vec<u32> = (0..=n).map(|u| adj.neighbors(u).len() as u32).collect();
    let mut seq = Vec::with_capacity(n - 2);
    let mut ptr = 1;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for _ in 0..n - 2 {
        let next = parent[leaf] as usize;
        seq.push(next as u32);
        degree[next] -= 1;
        if degree[next] == 1 && next < ptr {
            leaf = next;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    Ok(PrueferSeq::from_raw(n, seq))
}

/// Compressed adjacency lists indexed by label.
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn new(t: &LabeledTree) -> Self {
        let n = t.n();
        let mut offsets = vec![0usize; n + 2];
        for &(u, v) in t.edges() {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; 2 * t.edges().len()];
        for &(u, v) in t.edges() {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Adjacency { offsets, targets }
    }

    pub fn neighbors(&self, label: usize) -> &[u32] {
        &self.targets[self.offsets[label]..self.offsets[label + 1]]
    }
}

/// Uniform over all n^(n-2) labeled trees, via a uniform Prüfer sequence.
pub fn sample_uniform_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LabeledTree> {
    match n {
        0 => invalid("n must be at least 1"),
        1 => Ok(LabeledTree::single_vertex()),
        2 => Ok(LabeledTree::from_valid(2, vec![(1, 2)])),
        _ => {
            let seq: Vec<u32> = (0..n - 2).map(|_| rng.random_range(1..=n as u32)).collect();
            Ok(decode_raw(n, &seq))
        }
    }
}

/// Uniform over all n^(n-1) rooted trees: a uniform tree and an independent
/// uniform root.
pub fn sample_uniform_rooted_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RootedTree> {
    let tree = sample_uniform_tree(n, rng)?;
    let root = rng.random_range(1..=n);
    Ok(RootedTree { tree, root })
}
