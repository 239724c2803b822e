//! Monte Carlo experiments: moments of the edge process, root-cluster
//! laws, the largest component, and goodness-of-fit plumbing.
//!
//! Replication `i` of a run always draws from `RngStream::new(seed, i)`.
//! Per-replication results are collected in index order and reduced
//! sequentially, so reports are bit-identical for any thread count.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::asymptotics::largest_component_tail_limit;
use crate::error::{invalid, Error, Result};
use crate::exact;
use crate::rng::RngStream;
use crate::tree::sample_uniform_tree;
use crate::uncover::{interpolated_z, martingale_y, recursive_model_sampler, sup_abs_z, uncover_path, UncoverProcess};

/// Runs `f` once per replication index in parallel and returns the results
/// in index order.
pub fn replicate<T, F>(seed: u64, samples: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| f(&mut RngStream::new(seed, i).rng()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    EdgeMoments { js: Vec<usize>, grid: Vec<f64> },
    Clusters { k: usize },
    LargestComponent { k: usize, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid("experiments need n >= 2");
        }
        if self.samples == 0 {
            return invalid("samples must be at least 1");
        }
        match &self.kind {
            ExperimentKind::EdgeMoments { js, grid } => {
                if let Some(&j) = js.iter().find(|&&j| j == 0 || j > self.n) {
                    return invalid(format!("j = {j} outside 1..={}", self.n));
                }
                if let Some(&t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return invalid(format!("grid value {t} outside [0, 1]"));
                }
            }
            ExperimentKind::Clusters { k } => {
                if *k > self.n {
                    return invalid(format!("k = {k} exceeds n = {}", self.n));
                }
            }
            ExperimentKind::LargestComponent { k, alpha } => {
                if *k > self.n {
                    return invalid(format!("k = {k} exceeds n = {}", self.n));
                }
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return invalid(format!("alpha = {alpha} outside (0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

/// Sample mean, unbiased variance, and the moment-based standard error of
/// the variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Moments {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        let variance = if n > 1.0 { m2 * n / (n - 1.0) } else { 0.0 };
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
        Moments {
            mean,
            mean_se: (variance / n).sqrt(),
            variance,
            variance_se: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
            skewness,
            excess_kurtosis,
        }
    }
}

/// Sample covariance of paired values with a standard error from the
/// variance of the centered products.
pub fn covariance(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let m = Moments::of(&prods);
    Estimate { mean: m.mean * n / (n - 1.0).max(1.0), se: m.mean_se }
}

/// One merged bin of a goodness-of-fit test. `to` is inclusive; index
/// `expected.len()` stands for the tail beyond the listed cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedBin {
    pub from: usize,
    pub to: usize,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub bins: Vec<MergedBin>,
}

/// Minimum expected count per bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson chi-square test of `observed` against cell probabilities
/// `expected` for `total` draws. Mass missing from `expected` (and any draws
/// not in `observed`) form a tail cell. Consecutive cells are merged until
/// every bin expects at least 5 draws; a short remainder joins the last bin.
pub fn chi_square_test(observed: &[u64], expected: &[f64], total: u64) -> Result<GofResult> {
    if total == 0 {
        return invalid("total must be positive");
    }
    if observed.len() > expected.len() {
        return invalid("more observed cells than expected cells");
    }
    if expected.iter().any(|&p| !(p >= 0.0)) {
        return invalid("expected probabilities must be nonnegative");
    }
    let mass: f64 = expected.iter().sum();
    if mass > 1.0 + 1e-9 {
        return invalid(format!("expected probabilities sum to {mass} > 1"));
    }
    let seen: u64 = observed.iter().sum();
    if seen > total {
        return invalid("observed counts exceed total");
    }
    let tf = total as f64;
    let mut cells: Vec<(u64, f64)> = (0..expected.len()).map(|i| (observed.get(i).copied().unwrap_or(0), expected[i] * tf)).collect();
    let tail_mass = (1.0 - mass).max(0.0);
    let tail_obs = total - seen;
    if tail_mass * tf > 1e-9 || tail_obs > 0 {
        cells.push((tail_obs, tail_mass * tf));
    }
    let mut bins: Vec<MergedBin> = Vec::new();
    let mut cur: Option<MergedBin> = None;
    for (i, (o, e)) in cells.into_iter().enumerate() {
        let b = cur.get_or_insert(MergedBin { from: i, to: i, observed: 0, expected: 0.0 });
        b.to = i;
        b.observed += o;
        b.expected += e;
        if b.expected >= MIN_EXPECTED {
            bins.push(cur.take().expect("set above"));
        }
    }
    if let Some(rest) = cur {
        match bins.last_mut() {
            Some(last) => {
                last.to = rest.to;
                last.observed += rest.observed;
                last.expected += rest.expected;
            }
            None => bins.push(rest),
        }
    }
    if bins.len() < 2 {
        return Err(Error::Degenerate(format!("only {} bin(s) left after merging", bins.len())));
    }
    if let Some(b) = bins.iter().find(|b| b.expected == 0.0 && b.observed > 0) {
        return Err(Error::Degenerate(format!("draws observed in cells {}..={} of zero probability", b.from, b.to)));
    }
    let statistic: f64 = bins.iter().map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected).sum();
    let df = bins.len() - 1;
    let p_value = if statistic <= 0.0 { 1.0 } else { gamma_ur(df as f64 / 2.0, statistic / 2.0) };
    Ok(GofResult { statistic, df, p_value, bins })
}

/// Chi-square test of homogeneity for two samples over the same cells,
/// merging consecutive cells until both expected counts reach 5.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<GofResult> {
    let len = a.len().max(b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return invalid("both samples must be nonempty");
    }
    let total = (na + nb) as f64;
    let (fa, fb) = (na as f64 / total, nb as f64 / total);
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    let mut groups: Vec<(usize, usize, u64, u64)> = Vec::new();
    let mut cur: Option<(usize, usize, u64, u64)> = None;
    for i in 0..len {
        let g = cur.get_or_insert((i, i, 0, 0));
        g.1 = i;
        g.2 += get(a, i);
        g.3 += get(b, i);
        let pooled = (g.2 + g.3) as f64;
        if pooled * fa.min(fb) >= MIN_EXPECTED {
            groups.push(cur.take().expect("set above"));
        }
    }
    if let Some(rest) = cur {
        match groups.last_mut() {
            Some(last) => {
                last.1 = rest.1;
                last.2 += rest.2;
                last.3 += rest.3;
            }
            None => groups.push(rest),
        }
    }
    if groups.len() < 2 {
        return Err(Error::Degenerate(format!("only {} bin(s) left after merging", groups.len())));
    }
    let mut statistic = 0.0;
    let mut bins = Vec::with_capacity(groups.len());
    for &(from, to, oa, ob) in &groups {
        let pooled = (oa + ob) as f64;
        let (ea, eb) = (pooled * fa, pooled * fb);
        statistic += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
        bins.push(MergedBin { from, to, observed: oa, expected: ea });
    }
    let df = groups.len() - 1;
    let p_value = if statistic <= 0.0 { 1.0 } else { gamma_ur(df as f64 / 2.0, statistic / 2.0) };
    Ok(GofResult { statistic, df, p_value, bins })
}

/// Mass below which a cell is ignored by [`tv_distance`] when both laws
/// put less than this on it.
pub const TV_TRUNCATION: f64 = 1e-8;

/// Total-variation distance `1/2 sum |p_i - q_i|` over the common index
/// range, skipping cells where both masses are below 1e-8. Mass of either
/// law beyond the other's listed cells counts in full.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut s = 0.0;
    for i in 0..len {
        let a = p.get(i).copied().unwrap_or(0.0);
        let b = q.get(i).copied().unwrap_or(0.0);
        if a < TV_TRUNCATION && b < TV_TRUNCATION {
            continue;
        }
        s += (a - b).abs();
    }
    0.5 * s
}

/// Counts turned into relative frequencies.
pub fn empirical_pmf(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

fn histogram(values: impl Iterator<Item = usize>, len: usize) -> Vec<u64> {
    let mut h = vec![0u64; len];
    for v in values {
        h[v] += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeMomentRow {
    pub j: usize,
    pub moments: Moments,
    pub exact_mean: f64,
    pub exact_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessGridRow {
    pub t: f64,
    pub mean_z: f64,
    pub var_z: f64,
    pub limit_var: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeMomentReport {
    pub config: ExperimentConfig,
    pub edges: Vec<EdgeMomentRow>,
    pub grid: Vec<ProcessGridRow>,
    /// `cov[a][b]` for grid points `a <= b`, with standard errors.
    pub cov: Vec<Vec<Estimate>>,
    pub limit_cov: Vec<Vec<f64>>,
}

/// Edge counts and the rescaled process `Z` of uniform random trees.
pub fn run_edge_moment_experiment(cfg: &ExperimentConfig) -> Result<EdgeMomentReport> {
    cfg.validate()?;
    let ExperimentKind::EdgeMoments { js, grid } = &cfg.kind else {
        return invalid("configuration is not an edge-moment experiment");
    };
    let n = cfg.n;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = replicate(cfg.seed, cfg.samples, |rng| {
        let t = sample_uniform_tree(n, rng).expect("n >= 2");
        let p = uncover_path(&t);
        let ks = js.iter().map(|&j| p.k(j) as f64).collect();
        let zs = grid.iter().map(|&t| interpolated_z(&p, t).expect("grid validated")).collect();
        (ks, zs)
    });
    let column = |f: &dyn Fn(&(Vec<f64>, Vec<f64>)) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let mut edges = Vec::with_capacity(js.len());
    for (a, &j) in js.iter().enumerate() {
        let xs = column(&|r| r.0[a]);
        edges.push(EdgeMomentRow {
            j,
            moments: Moments::of(&xs),
            exact_mean: exact::expected_edges(n, j)?.to_f64(),
            exact_variance: exact::variance_edges(n, j)?.to_f64(),
        });
    }
    let zcols: Vec<Vec<f64>> = (0..grid.len()).map(|a| column(&|r| r.1[a])).collect();
    let mut grid_rows = Vec::with_capacity(grid.len());
    let mut cov = Vec::with_capacity(grid.len());
    let mut limit_cov = Vec::with_capacity(grid.len());
    for (a, &t) in grid.iter().enumerate() {
        let m = Moments::of(&zcols[a]);
        grid_rows.push(ProcessGridRow {
            t,
            mean_z: m.mean,
            var_z: m.variance,
            limit_var: t * t * (1.0 - t),
            skewness: m.skewness,
            excess_kurtosis: m.excess_kurtosis,
        });
        let mut row = Vec::with_capacity(grid.len());
        let mut lrow = Vec::with_capacity(grid.len());
        for (b, &u) in grid.iter().enumerate() {
            row.push(covariance(&zcols[a], &zcols[b]));
            let (s, t) = if t <= u { (t, u) } else { (u, t) };
            lrow.push(s * s * (1.0 - t));
        }
        cov.push(row);
        limit_cov.push(lrow);
    }
    Ok(EdgeMomentReport { config: cfg.clone(), edges, grid: grid_rows, cov, limit_cov })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterExperimentReport {
    pub config: ExperimentConfig,
    /// `root_counts[m]`: replications whose uniformly chosen root had a
    /// cluster of `m` vertices (0 = root still covered).
    pub root_counts: Vec<u64>,
    /// Finite-`n` law of the root cluster.
    pub exact_pmf: Vec<f64>,
    pub gof: Option<GofResult>,
    pub root_mean: Estimate,
    pub exact_root_mean: f64,
    /// Mean number of components with `r` vertices, index `r`.
    pub mean_components: Vec<f64>,
    pub expected_components: Vec<f64>,
    pub largest: Moments,
    #[serde(skip)]
    pub largest_samples: Vec<u32>,
}

/// Exact finite-`n` root-cluster law as floats: rationals for small `n`,
/// log space beyond.
pub fn root_cluster_law(n: usize, k: usize) -> Result<Vec<f64>> {
    (0..=k)
        .map(|m| {
            if n <= 200 {
                exact::root_cluster_pmf(n, k, m).map(|v| v.to_f64())
            } else {
                if k > n {
                    return invalid(format!("k = {k} exceeds n = {n}"));
                }
                Ok(exact::float::root_cluster_pmf(n, k, m))
            }
        })
        .collect()
}

/// Root cluster of a uniform rooted tree, component-size profile and
/// largest component after `k` steps.
pub fn run_cluster_experiment(cfg: &ExperimentConfig) -> Result<ClusterExperimentReport> {
    cfg.validate()?;
    let ExperimentKind::Clusters { k } = cfg.kind else {
        return invalid("configuration is not a cluster experiment");
    };
    let n = cfg.n;
    let per_rep: Vec<(u32, u32, Vec<u32>)> = replicate(cfg.seed, cfg.samples, |rng| {
        use rand::RngExt;
        let t = sample_uniform_tree(n, rng).expect("n >= 2");
        let root = rng.random_range(1..=n);
        let mut proc = UncoverProcess::new(&t);
        proc.advance_to(k).expect("k validated");
        let rc = if root <= k { proc.cluster_size(root) } else { 0 };
        let sizes = proc.size_counts().into_iter().map(|c| c as u32).collect();
        (rc as u32, proc.largest() as u32, sizes)
    });
    let root_counts = histogram(per_rep.iter().map(|r| r.0 as usize), k + 1);
    let exact_pmf = root_cluster_law(n, k)?;
    let gof = match chi_square_test(&root_counts, &exact_pmf, cfg.samples as u64) {
        Ok(g) => Some(g),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let roots: Vec<f64> = per_rep.iter().map(|r| r.0 as f64).collect();
    let rm = Moments::of(&roots);
    let exact_root_mean = if n <= 200 {
        exact::root_cluster_expectation(n, k)?.to_f64()
    } else {
        exact::float::root_cluster_expectation(n, k)
    };
    let mut mean_components = vec![0.0; k + 1];
    for (_, _, sizes) in &per_rep {
        for (r, &c) in sizes.iter().enumerate().take(k + 1) {
            mean_components[r] += c as f64;
        }
    }
    for v in &mut mean_components {
        *v /= cfg.samples as f64;
    }
    let expected_components = (0..=k).map(|r| if r == 0 { 0.0 } else { exact::float::expected_components(n, k, r) }).collect();
    let largest_samples: Vec<u32> = per_rep.iter().map(|r| r.1).collect();
    let largest = Moments::of(&largest_samples.iter().map(|&c| c as f64).collect::<Vec<_>>());
    Ok(ClusterExperimentReport {
        config: cfg.clone(),
        root_counts,
        exact_pmf,
        gof,
        root_mean: Estimate { mean: rm.mean, se: rm.mean_se },
        exact_root_mean,
        mean_components,
        expected_components,
        largest,
        largest_samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargestComponentReport {
    pub config: ExperimentConfig,
    /// `(n - k)/sqrt(n)`.
    pub c: f64,
    /// Fraction of replications with `C_max >= alpha n`.
    pub exceed: Estimate,
    /// `C_max / n`.
    pub fraction: Moments,
    /// Critical-window limit of `P(C_max >= alpha n)` at this `c`.
    pub limit: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<u32>,
}

/// Size of the largest component of the forest on `[k]` of one uniform
/// tree, via a union-find pass over the edges inside `[k]`.
fn largest_component<R: rand::Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> u32 {
    let t = sample_uniform_tree(n, rng).expect("n >= 1");
    if k == 0 {
        return 0;
    }
    let mut dsu = crate::dsu::DisjointSets::new(k + 1);
    let mut best = 1;
    for &(u, v) in t.edges() {
        if (v as usize) <= k {
            if let Some(s) = dsu.union(u as usize, v as usize) {
                best = best.max(s);
            }
        }
    }
    best as u32
}

/// `C_max` after `k` steps, paired with the critical-window limit.
pub fn run_largest_component_experiment(cfg: &ExperimentConfig) -> Result<LargestComponentReport> {
    cfg.validate()?;
    let ExperimentKind::LargestComponent { k, alpha } = cfg.kind else {
        return invalid("configuration is not a largest-component experiment");
    };
    let n = cfg.n;
    let samples: Vec<u32> = replicate(cfg.seed, cfg.samples, |rng| largest_component(n, k, rng));
    let threshold = alpha * n as f64;
    let hits: Vec<f64> = samples.iter().map(|&c| if c as f64 >= threshold { 1.0 } else { 0.0 }).collect();
    let hm = Moments::of(&hits);
    let fraction = Moments::of(&samples.iter().map(|&c| c as f64 / n as f64).collect::<Vec<_>>());
    let c = (n - k) as f64 / (n as f64).sqrt();
    let limit = if k < n { Some(largest_component_tail_limit(c, alpha)?) } else { None };
    Ok(LargestComponentReport { config: cfg.clone(), c, exceed: Estimate { mean: hm.mean, se: hm.mean_se }, fraction, limit, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBoundRow {
    pub c: f64,
    pub exceed: Estimate,
    pub bound: f64,
    pub passed: bool,
}

/// Empirical `P(sup |Z| >= C)` against `4 (C - 1)^(-2)`, passing when the
/// estimate is within three standard errors of the bound or below it.
pub fn run_tail_bound_check(n: usize, cs: &[f64], samples: usize, seed: u64) -> Result<Vec<TailBoundRow>> {
    if n < 2 || samples == 0 {
        return invalid("need n >= 2 and samples >= 1");
    }
    if let Some(c) = cs.iter().find(|&&c| !(c > 1.0)) {
        return invalid(format!("the tail bound needs C > 1, got {c}"));
    }
    let sups: Vec<f64> = replicate(seed, samples, |rng| sup_abs_z(&uncover_path(&sample_uniform_tree(n, rng).expect("n >= 2"))));
    Ok(cs
        .iter()
        .map(|&c| {
            let hits: Vec<f64> = sups.iter().map(|&s| if s >= c { 1.0 } else { 0.0 }).collect();
            let m = Moments::of(&hits);
            let bound = 4.0 / ((c - 1.0) * (c - 1.0));
            TailBoundRow { c, exceed: Estimate { mean: m.mean, se: m.mean_se }, bound, passed: m.mean <= bound + 3.0 * m.mean_se }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleRow {
    pub j: usize,
    pub y: Moments,
}

/// Mean of the martingale `Y_j` (zero for every `j`).
pub fn run_martingale_check(n: usize, js: &[usize], samples: usize, seed: u64) -> Result<Vec<MartingaleRow>> {
    if n < 2 || samples == 0 {
        return invalid("need n >= 2 and samples >= 1");
    }
    if let Some(&j) = js.iter().find(|&&j| j == 0 || j >= n) {
        return invalid(format!("Y_j needs 1 <= j < n, got {j}"));
    }
    let rows: Vec<Vec<f64>> = replicate(seed, samples, |rng| {
        let p = uncover_path(&sample_uniform_tree(n, rng).expect("n >= 2"));
        js.iter().map(|&j| martingale_y(&p, j).expect("validated")).collect()
    });
    Ok(js
        .iter()
        .enumerate()
        .map(|(a, &j)| MartingaleRow { j, y: Moments::of(&rows.iter().map(|r| r[a]).collect::<Vec<_>>()) })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub j: usize,
    /// Recursive-model sample against tree sample.
    pub two_sample: GofResult,
    /// Each sample against the exact marginal of `K_j`.
    pub recursive_vs_exact: GofResult,
    pub tree_vs_exact: GofResult,
}

/// Exact law of `K_j` from the single-observation count formula.
pub fn edge_count_law(n: usize, j: usize) -> Result<Vec<f64>> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    if n < 3 || j < 2 || j >= n {
        return invalid("the marginal law needs 1 < j < n");
    }
    let total = BigRational::from_integer(num_traits::pow(BigInt::from(n), n - 2));
    (0..j)
        .map(|a| {
            let c = exact::SequenceConstraint::new(n, vec![j], vec![a])?;
            let count = exact::count_trees_partial_sequence(&c)?;
            Ok(exact::ExactValue::new(count.into_rational() / &total).to_f64())
        })
        .collect()
}

/// Compares `K_j` marginals of the recursive model with those of uniform
/// trees. Streams `2 * stream` and `2 * stream + 1` keep the two samples
/// independent.
pub fn run_recursive_consistency(n: usize, js: &[usize], samples: usize, seed: u64) -> Result<Vec<ConsistencyRow>> {
    if let Some(&j) = js.iter().find(|&&j| j < 2 || j >= n) {
        return invalid(format!("marginals need 1 < j < n, got {j}"));
    }
    if samples == 0 {
        return invalid("samples must be at least 1");
    }
    let rec: Vec<Vec<usize>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = recursive_model_sampler(n, &mut RngStream::new(seed, 2 * i).rng()).expect("n >= 2");
            js.iter().map(|&j| p.k(j)).collect()
        })
        .collect();
    let tree: Vec<Vec<usize>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = uncover_path(&sample_uniform_tree(n, &mut RngStream::new(seed, 2 * i + 1).rng()).expect("n >= 2"));
            js.iter().map(|&j| p.k(j)).collect()
        })
        .collect();
    js.iter()
        .enumerate()
        .map(|(a, &j)| {
            let hr = histogram(rec.iter().map(|r| r[a]), j);
            let ht = histogram(tree.iter().map(|r| r[a]), j);
            let law = edge_count_law(n, j)?;
            Ok(ConsistencyRow {
                j,
                two_sample: chi_square_two_sample(&hr, &ht)?,
                recursive_vs_exact: chi_square_test(&hr, &law, samples as u64)?,
                tree_vs_exact: chi_square_test(&ht, &law, samples as u64)?,
            })
        })
        .collect()
}

/// Joint law of the full recursive-model path against exhaustive
/// enumeration of all trees on `[n]`.
pub fn run_recursive_joint_check(n: usize, samples: usize, seed: u64) -> Result<GofResult> {
    let paths = crate::oracle::full_path_counts(n)?;
    let keys: Vec<&Vec<usize>> = paths.keys().collect();
    let total = crate::oracle::tree_count(n) as f64;
    let expected: Vec<f64> = paths.values().map(|&c| c as f64 / total).collect();
    let drawn: Vec<Vec<usize>> = replicate(seed, samples, |rng| recursive_model_sampler(n, rng).expect("n >= 2").values().collect());
    let mut observed = vec![0u64; keys.len()];
    let mut unseen = 0u64;
    for d in &drawn {
        match keys.binary_search(&d) {
            Ok(i) => observed[i] += 1,
            Err(_) => unseen += 1,
        }
    }
    if unseen > 0 {
        return Err(Error::Internal(format!("{unseen} sampled paths do not occur in any tree")));
    }
    chi_square_test(&observed, &expected, samples as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_examples() {
        let g = chi_square_test(&[60, 40], &[0.5, 0.5], 100).unwrap();
        assert!((g.statistic - 4.0).abs() < 1e-12);
        assert_eq!(g.df, 1);
        assert!((g.p_value - 0.045_500_263_896_358_4).abs() < 1e-9);
        let g = chi_square_test(&[25, 50, 25], &[0.25, 0.5, 0.25], 100).unwrap();
        assert_eq!(g.statistic, 0.0);
        assert_eq!(g.p_value, 1.0);
    }

    #[test]
    fn chi_square_merging() {
        let expected = [0.001, 0.001, 0.498, 0.498, 0.001, 0.001];
        let g = chi_square_test(&[0, 1, 50, 47, 1, 1], &expected, 100).unwrap();
        assert_eq!(g.bins.len(), 2);
        assert_eq!((g.bins[0].from, g.bins[0].to), (0, 2));
        assert_eq!((g.bins[1].from, g.bins[1].to), (3, 5));
        // Missing mass becomes a tail cell.
        let g = chi_square_test(&[30, 30], &[0.3, 0.3], 100).unwrap();
        assert_eq!(g.bins.len(), 3);
        assert_eq!(g.bins[2].observed, 40);
        assert!(matches!(chi_square_test(&[3], &[1.0], 3), Err(Error::Degenerate(_))));
        assert!(chi_square_test(&[3], &[1.0], 0).is_err());
        assert!(chi_square_test(&[3, 1], &[0.9, 0.9], 4).is_err());
    }

    #[test]
    fn two_sample_identical_is_zero() {
        let g = chi_square_two_sample(&[100, 200, 300], &[100, 200, 300]).unwrap();
        assert_eq!(g.statistic, 0.0);
        assert_eq!(g.df, 2);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((tv_distance(&[1.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((tv_distance(&[0.6, 0.4], &[0.5, 0.5]) - 0.1).abs() < 1e-15);
        assert_eq!(tv_distance(&[0.5, 0.5, 1e-9], &[0.5, 0.5, 2e-9]), 0.0);
    }

    #[test]
    fn moments_of_known_sample() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!(m.skewness.abs() < 1e-15);
    }

    #[test]
    fn replicate_is_thread_independent() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| replicate(5, 200, |rng| sample_uniform_tree(30, rng).unwrap().canonical_edges()))
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn config_validation() {
        let base = ExperimentConfig { n: 10, samples: 5, seed: 1, kind: ExperimentKind::Clusters { k: 5 } };
        assert!(base.validate().is_ok());
        assert!(ExperimentConfig { samples: 0, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { kind: ExperimentKind::Clusters { k: 11 }, ..base.clone() }.validate().is_err());
        let grid = ExperimentKind::EdgeMoments { js: vec![3], grid: vec![1.5] };
        assert!(ExperimentConfig { kind: grid, ..base.clone() }.validate().is_err());
        let js = ExperimentKind::EdgeMoments { js: vec![11], grid: vec![] };
        assert!(ExperimentConfig { kind: js, ..base.clone() }.validate().is_err());
        let la = ExperimentKind::LargestComponent { k: 5, alpha: 0.0 };
        assert!(ExperimentConfig { kind: la, ..base.clone() }.validate().is_err());
        assert!(run_edge_moment_experiment(&base).is_err());
    }

    #[test]
    fn edge_experiment_small() {
        let cfg = ExperimentConfig { n: 50, samples: 4000, seed: 3, kind: ExperimentKind::EdgeMoments { js: vec![25], grid: vec![0.5] } };
        let r = run_edge_moment_experiment(&cfg).unwrap();
        let row = &r.edges[0];
        assert!((row.moments.mean - row.exact_mean).abs() < 4.0 * row.moments.mean_se);
        assert_eq!(row.exact_mean, 12.0);
        assert_eq!(r, run_edge_moment_experiment(&cfg).unwrap());
    }

    #[test]
    fn cluster_experiment_small() {
        let cfg = ExperimentConfig { n: 20, samples: 20_000, seed: 11, kind: ExperimentKind::Clusters { k: 10 } };
        let r = run_cluster_experiment(&cfg).unwrap();
        assert!(r.gof.as_ref().unwrap().p_value > 1e-3, "{:?}", r.gof);
        assert!((r.root_mean.mean - r.exact_root_mean).abs() < 4.0 * r.root_mean.se);
        for rr in 1..=10 {
            assert!((r.mean_components[rr] - r.expected_components[rr]).abs() < 0.05 + 0.1 * r.expected_components[rr]);
        }
    }

    #[test]
    fn largest_component_small() {
        let cfg = ExperimentConfig { n: 30, samples: 500, seed: 2, kind: ExperimentKind::LargestComponent { k: 30, alpha: 0.5 } };
        let r = run_largest_component_experiment(&cfg).unwrap();
        assert!(r.samples.iter().all(|&c| c == 30));
        assert_eq!(r.exceed.mean, 1.0);
        assert!(r.limit.is_none());
        let cfg = ExperimentConfig { kind: ExperimentKind::LargestComponent { k: 0, alpha: 0.5 }, ..cfg };
        let r = run_largest_component_experiment(&cfg).unwrap();
        assert!(r.samples.iter().all(|&c| c == 0));
    }

    #[test]
    fn edge_law_sums_to_one() {
        let law = edge_count_law(30, 12).unwrap();
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(edge_count_law(30, 30).is_err());
    }

    #[test]
    fn recursive_joint_small() {
        let g = run_recursive_joint_check(5, 20_000, 9).unwrap();
        assert!(g.p_value > 1e-3, "{g:?}");
    }

    #[test]
    fn martingale_and_tail() {
        let rows = run_martingale_check(60, &[10, 30, 50], 3000, 4).unwrap();
        for r in rows {
            assert!(r.y.mean.abs() < 4.0 * r.y.mean_se + 1e-12, "{r:?}");
        }
        let rows = run_tail_bound_check(60, &[2.0, 3.0], 500, 4).unwrap();
        assert!(rows.iter().all(|r| r.passed));
        assert!(run_tail_bound_check(60, &[1.0], 10, 4).is_err());
    }
}
