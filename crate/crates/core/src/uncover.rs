//! The uncover process: vertices are revealed in label order and every
//! revealed vertex brings along its edges to previously revealed vertices.

use rand::{Rng, RngExt};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{invalid, Result};
use crate::tree::LabeledTree;

/// Edge counts `k_1, ..., k_n` of the forests induced by `1..=j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncoverPath {
    n: usize,
    k: Vec<u32>,
}

impl UncoverPath {
    /// Validates the structural invariants of an uncover sequence.
    pub fn new(k: Vec<usize>) -> Result<Self> {
        let n = k.len();
        if n == 0 {
            return invalid("empty uncover path");
        }
        if k[0] != 0 || k[n - 1] != n - 1 {
            return invalid("an uncover path starts at 0 and ends at n-1");
        }
        for j in 1..=n {
            if k[j - 1] > j - 1 {
                return invalid(format!("k_{j} = {} exceeds {}", k[j - 1], j - 1));
            }
            if j >= 2 && k[j - 1] < k[j - 2] {
                return invalid(format!("path decreases at j = {j}"));
            }
        }
        Ok(UncoverPath { n, k: k.into_iter().map(|v| v as u32).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `K_j` for `0 <= j <= n`, with `K_0 = 0`.
    pub fn k(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.k[j - 1] as usize
        }
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.k.iter().map(|&v| v as usize)
    }

    /// Components of the forest on `1..=j`.
    pub fn components(&self, j: usize) -> usize {
        j - self.k(j)
    }

    /// CSV rows `j,k_j` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k_j\n");
        for (j, v) in self.values().enumerate() {
            out.push_str(&format!("{},{}\n", j + 1, v));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.k).expect("integer array serializes")
    }
}

/// Edge counts via a counting pass: an edge `{u, v}` is revealed at step
/// `max(u, v)`.
pub fn uncover_path(t: &LabeledTree) -> UncoverPath {
    let n = t.n();
    let mut k = vec![0u32; n];
    for &(_, v) in t.edges() {
        k[v as usize - 1] += 1;
    }
    for j in 1..n {
        k[j] += k[j - 1];
    }
    UncoverPath { n, k }
}

/// Component structure of the forest induced by `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterReport {
    #[serde(skip)]
    pub n: usize,
    pub k: usize,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    /// Size of the root's component, 0 when the root is still covered.
    pub root_cluster: usize,
    pub largest: usize,
}

impl ClusterReport {
    pub fn components(&self) -> usize {
        self.sizes.len()
    }

    /// Number of components of size exactly `r`.
    pub fn count_of_size(&self, r: usize) -> usize {
        self.sizes.iter().filter(|&&s| s == r).count()
    }
}

/// Incremental uncover pass with union-find component tracking.
///
/// Snapshots can be taken at any step; advancing is amortized
/// near-constant per revealed edge, so reports at several depths cost a
/// single pass.
pub struct UncoverProcess {
    n: usize,
    step: usize,
    // Lower-labelled neighbours of each vertex, bucketed by label.
    lower_off: Vec<u32>,
    lower: Vec<u32>,
    dsu: DisjointSets,
    edges: usize,
    largest: usize,
}

impl UncoverProcess {
    pub fn new(t: &LabeledTree) -> Self {
        let n = t.n();
        let mut lower_off = vec![0u32; n + 2];
        for &(_, v) in t.edges() {
            lower_off[v as usize + 1] += 1;
        }
        for i in 1..lower_off.len() {
            lower_off[i] += lower_off[i - 1];
        }
        let mut fill = lower_off.clone();
        let mut lower = vec![0u32; t.edges().len()];
        for &(u, v) in t.edges() {
            lower[fill[v as usize] as usize] = u;
            fill[v as usize] += 1;
        }
        UncoverProcess {
            n,
            step: 0,
            lower_off,
            lower,
            dsu: DisjointSets::new(n),
            edges: 0,
            largest: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of uncovered vertices.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn uncovered_edges(&self) -> usize {
        self.edges
    }

    pub fn components(&self) -> usize {
        self.step - self.edges
    }

    pub fn largest(&self) -> usize {
        self.largest
    }

    /// Uncovers the next vertex; returns the number of edges it revealed.
    pub fn advance(&mut self) -> Option<usize> {
        if self.step == self.n {
            return None;
        }
        self.step += 1;
        let v = self.step;
        let range = self.lower_off[v] as usize..self.lower_off[v + 1] as usize;
        let revealed = range.len();
        let mut size = 1;
        for idx in range {
            let u = self.lower[idx] as usize;
            if let Some(s) = self.dsu.union(u - 1, v - 1) {
                size = s;
            }
        }
        self.edges += revealed;
        self.largest = self.largest.max(size);
        Some(revealed)
    }

    pub fn advance_to(&mut self, k: usize) -> Result<()> {
        if k > self.n {
            return invalid(format!("k = {k} exceeds n = {}", self.n));
        }
        if k < self.step {
            return invalid(format!("cannot rewind from step {} to {k}", self.step));
        }
        while self.step < k {
            self.advance();
        }
        Ok(())
    }

    /// Size of the component containing `label`, or 0 if still covered.
    pub fn cluster_size(&mut self, label: usize) -> usize {
        if label == 0 || label > self.step {
            0
        } else {
            self.dsu.set_size(label - 1)
        }
    }

    /// Multiplicities `X_r` of component sizes, indexed by `r` in `0..=step`.
    pub fn size_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.step + 1];
        for i in 0..self.step {
            if self.dsu.is_root(i) {
                counts[self.dsu.root_size(i)] += 1;
            }
        }
        counts
    }

    pub fn report(&mut self, root: Option<usize>) -> ClusterReport {
        let mut sizes: Vec<usize> = (0..self.step)
            .filter(|&i| self.dsu.is_root(i))
            .map(|i| self.dsu.root_size(i))
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let root_cluster = root.map_or(0, |r| self.cluster_size(r));
        ClusterReport {
            n: self.n,
            k: self.step,
            sizes,
            root_cluster,
            largest: self.largest,
        }
    }
}

pub fn cluster_report(t: &LabeledTree, k: usize, root: Option<usize>) -> Result<ClusterReport> {
    if k > t.n() {
        return invalid(format!("k = {k} exceeds n = {}", t.n()));
    }
    if let Some(r) = root {
        if r == 0 || r > t.n() {
            return invalid(format!("root {r} outside 1..={}", t.n()));
        }
    }
    let mut p = UncoverProcess::new(t);
    p.advance_to(k)?;
    Ok(p.report(root))
}

/// Centered, rescaled and linearly interpolated edge process
/// `(K~_t - t^2 n) / sqrt(n)`.
pub fn interpolated_z(p: &UncoverPath, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return invalid(format!("t = {t} outside [0, 1]"));
    }
    let n = p.n() as f64;
    let tn = t * n;
    let lo = tn.floor();
    let frac = tn - lo;
    let lo_idx = (lo as usize).min(p.n());
    let hi_idx = (tn.ceil() as usize).min(p.n());
    let interp = (1.0 - frac) * p.k(lo_idx) as f64 + frac * p.k(hi_idx) as f64;
    Ok((interp - t * t * n) / n.sqrt())
}

/// `sup_t |Z(t)|`, exact for the piecewise construction: on each unit
/// segment `Z` is concave, so its minimum sits at an endpoint and its
/// maximum at an endpoint or the stationary point.
pub fn sup_abs_z(p: &UncoverPath) -> f64 {
    let n = p.n() as f64;
    let mut sup = 0.0f64;
    for j in 0..p.n() {
        let kj = p.k(j) as f64;
        let delta = (p.k(j + 1) - p.k(j)) as f64;
        let jf = j as f64;
        let at = |u: f64| kj + u * delta - (jf + u) * (jf + u) / n;
        sup = sup.max(at(0.0).abs()).max(at(1.0).abs());
        let u_star = n * delta / 2.0 - jf;
        if u_star > 0.0 && u_star < 1.0 {
            sup = sup.max(at(u_star).abs());
        }
    }
    sup / n.sqrt()
}

/// `Y_j = (K_j - j(j-1)/n) / (n - j)` for `1 <= j <= n-1`.
pub fn martingale_y(p: &UncoverPath, j: usize) -> Result<f64> {
    let n = p.n();
    if j == 0 || j >= n {
        return invalid(format!("martingale index j = {j} outside 1..={}", n.saturating_sub(1)));
    }
    let jf = j as f64;
    let nf = n as f64;
    Ok((p.k(j) as f64 - jf * (jf - 1.0) / nf) / (nf - jf))
}

/// A path together with `Z` evaluated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessSample {
    pub path: UncoverPath,
    pub z: Vec<(f64, f64)>,
}

pub fn process_sample(path: UncoverPath, grid: &[f64]) -> Result<ProcessSample> {
    let z = grid
        .iter()
        .map(|&t| interpolated_z(&path, t).map(|z| (t, z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProcessSample { path, z })
}

/// Samples `K_1..K_n` from the increment recursion
/// `K_{j+1} = K_j + Ber((j+1)/n) + Bin(j-1-K_j, 1/(n-j))`
/// with fresh independent draws at every step. No tree is built.
pub fn recursive_model_sampler<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UncoverPath> {
    if n < 2 {
        return invalid(format!("recursive model needs n >= 2, got {n}"));
    }
    let nf = n as f64;
    let mut k = Vec::with_capacity(n);
    k.push(0u32);
    let mut cur = 0u64;
    for j in 1..n {
        let mut next = cur;
        if rng.random_bool((j as f64 + 1.0) / nf) {
            next += 1;
        }
        let pending = j as u64 - 1 - cur;
        if pending > 0 {
            let p = 1.0 / (nf - j as f64);
            next += Binomial::new(pending, p).expect("probability in (0, 1]").sample(rng);
        }
        cur = next;
        k.push(cur as u32);
    }
    Ok(UncoverPath { n, k })
}
