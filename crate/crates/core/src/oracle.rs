//! Exhaustive enumeration of all labeled trees on a few vertices, used as
//! ground truth for every closed-form count and probability.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{invalid, Error, Result};
use crate::exact::{self, ExactValue, SequenceConstraint};
use crate::tree::{decode_raw, LabeledTree};
use crate::uncover::uncover_path;

/// Largest `n` enumerated without an explicit override.
pub const DEFAULT_MAX_N: usize = 8;
/// Hard ceiling even with the override.
pub const OVERRIDE_MAX_N: usize = 10;

fn check_size(n: usize, allow_large: bool) -> Result<()> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let cap = if allow_large { OVERRIDE_MAX_N } else { DEFAULT_MAX_N };
    if n > cap {
        return invalid(format!("enumeration of n = {n} exceeds the limit {cap}{}", if allow_large { "" } else { " (override required above 8)" }));
    }
    Ok(())
}

/// Number of labeled trees, `n^(n-2)` (1 for `n = 1`).
pub fn tree_count(n: usize) -> u64 {
    if n <= 2 {
        1
    } else {
        (n as u64).pow(n as u32 - 2)
    }
}

/// Streams trees in lexicographic order of their Prüfer sequences.
#[derive(Debug, Clone)]
pub struct TreeEnumerator {
    n: usize,
    seq: Vec<u32>,
    next: u64,
    end: u64,
}

impl Iterator for TreeEnumerator {
    type Item = LabeledTree;

    fn next(&mut self) -> Option<LabeledTree> {
        if self.next >= self.end {
            return None;
        }
        let tree = if self.n == 1 {
            LabeledTree::single_vertex()
        } else {
            decode_raw(self.n, &self.seq)
        };
        self.next += 1;
        // Odometer step; digits run over 1..=n.
        for d in self.seq.iter_mut().rev() {
            if (*d as usize) < self.n {
                *d += 1;
                break;
            }
            *d = 1;
        }
        Some(tree)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for TreeEnumerator {}

/// All `n^(n-2)` labeled trees on `[n]`. `n > 8` needs `allow_large`.
pub fn enumerate_trees(n: usize, allow_large: bool) -> Result<TreeEnumerator> {
    enumerate_range(n, 0..tree_count(n), allow_large)
}

/// Trees with lexicographic Prüfer index in `range`, for splitting the
/// enumeration into independent pieces.
pub fn enumerate_range(n: usize, range: Range<u64>, allow_large: bool) -> Result<TreeEnumerator> {
    check_size(n, allow_large)?;
    let total = tree_count(n);
    if range.start > range.end || range.end > total {
        return invalid(format!("index range {range:?} outside 0..{total}"));
    }
    let len = n.saturating_sub(2);
    let mut seq = vec![1u32; len];
    let mut idx = range.start;
    for d in seq.iter_mut().rev() {
        *d = (idx % n as u64) as u32 + 1;
        idx /= n as u64;
    }
    Ok(TreeEnumerator { n, seq, next: range.start, end: range.end })
}

/// Exact outcome counts from an enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationReport {
    pub n: usize,
    /// Parameters identifying the question, such as `k` or the `js`.
    pub params: Vec<usize>,
    /// Whether each tree was counted once per root.
    pub rooted: bool,
    pub counts: BTreeMap<Vec<usize>, BigUint>,
    pub total: BigUint,
}

impl EnumerationReport {
    pub fn new(n: usize, params: Vec<usize>, rooted: bool) -> Self {
        EnumerationReport { n, params, rooted, counts: BTreeMap::new(), total: BigUint::zero() }
    }

    pub fn add(&mut self, outcome: Vec<usize>, count: u64) {
        *self.counts.entry(outcome).or_default() += count;
        self.total += count;
    }

    pub fn count(&self, outcome: &[usize]) -> BigUint {
        self.counts.get(outcome).cloned().unwrap_or_default()
    }

    /// Adds the counts of a report over a disjoint part of the same
    /// enumeration.
    pub fn merge(&mut self, other: EnumerationReport) -> Result<()> {
        if self.n != other.n || self.params != other.params || self.rooted != other.rooted {
            return invalid("reports describe different questions and cannot be merged");
        }
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Cell<'a> {
            outcome: &'a [usize],
            count: String,
        }
        #[derive(Serialize)]
        struct View<'a> {
            n: usize,
            params: &'a [usize],
            rooted: bool,
            counts: Vec<Cell<'a>>,
            total: String,
        }
        let view = View {
            n: self.n,
            params: &self.params,
            rooted: self.rooted,
            counts: self.counts.iter().map(|(k, v)| Cell { outcome: k, count: v.to_string() }).collect(),
            total: self.total.to_string(),
        };
        serde_json::to_string(&view).expect("plain data")
    }
}

fn check_js(n: usize, js: &[usize]) -> Result<()> {
    let mut prev = 0;
    for &j in js {
        if j <= prev || j > n {
            return invalid(format!("observation points must be strictly increasing within 1..={n}"));
        }
        prev = j;
    }
    Ok(())
}

/// Counts trees by `(k_{j_1}, ..., k_{j_r})`. Needs `n <= 8`.
pub fn oracle_uncover_distribution(n: usize, js: &[usize]) -> Result<EnumerationReport> {
    if n > 8 {
        return invalid("the uncover oracle is limited to n <= 8");
    }
    check_js(n, js)?;
    let mut report = EnumerationReport::new(n, js.to_vec(), false);
    for t in enumerate_trees(n, false)? {
        let p = uncover_path(&t);
        report.add(js.iter().map(|&j| p.k(j)).collect(), 1);
    }
    Ok(report)
}

/// Component masks (bit `v - 1` for label `v`) of the forest on `[k]` for
/// every `k = 0..=n`.
fn forest_masks(t: &LabeledTree) -> Vec<Vec<u32>> {
    let n = t.n();
    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &(u, v) in t.edges() {
        lower[v as usize].push(u as usize);
    }
    let mut dsu = DisjointSets::new(n + 1);
    let mut mask = vec![0u32; n + 1];
    let mut out = vec![Vec::new()];
    for v in 1..=n {
        mask[v] = 1 << (v - 1);
        for &u in &lower[v] {
            let (a, b) = (dsu.find(u), dsu.find(v));
            let m = mask[a] | mask[b];
            dsu.union(a, b);
            let r = dsu.find(v);
            mask[r] = m;
        }
        let comps = (1..=v).filter(|&x| dsu.is_root(x)).map(|x| mask[x]).collect();
        out.push(comps);
    }
    out
}

/// Counts rooted trees by root-cluster size after `k` steps. Needs
/// `n <= 7`; the total is `n^(n-1)`.
pub fn oracle_root_cluster(n: usize, k: usize) -> Result<EnumerationReport> {
    if n > 7 {
        return invalid("the rooted oracle is limited to n <= 7");
    }
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    let mut report = EnumerationReport::new(n, vec![k], true);
    for t in enumerate_trees(n, false)? {
        let comps = &forest_masks(&t)[k];
        for c in comps {
            let size = c.count_ones() as usize;
            report.add(vec![size], size as u64);
        }
        if k < n {
            report.add(vec![0], (n - k) as u64);
        }
    }
    Ok(report)
}

/// Average number of components of size `r` in the forest on `[k]`.
pub fn oracle_expected_components(n: usize, k: usize, r: usize) -> Result<ExactValue> {
    if n > 8 {
        return invalid("the component oracle is limited to n <= 8");
    }
    if r == 0 || r > k || k > n {
        return invalid(format!("need 1 <= r <= k <= n, got r = {r}, k = {k}, n = {n}"));
    }
    let mut total = 0u64;
    for t in enumerate_trees(n, false)? {
        total += forest_masks(&t)[k].iter().filter(|c| c.count_ones() as usize == r).count() as u64;
    }
    Ok(ExactValue::new(BigRational::new(BigInt::from(total), BigInt::from(tree_count(n)))))
}

/// First mismatch found by a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub params: String,
    pub oracle: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub formula: String,
    pub max_n: usize,
    pub cases: u64,
    pub passed: bool,
    pub first_counterexample: Option<Counterexample>,
}

impl FormulaCheck {
    fn new(formula: &str, max_n: usize) -> Self {
        FormulaCheck { formula: formula.to_string(), max_n, cases: 0, passed: true, first_counterexample: None }
    }

    fn compare(&mut self, params: impl FnOnce() -> String, oracle: &ExactValue, formula: &ExactValue) {
        self.cases += 1;
        if oracle != formula && self.first_counterexample.is_none() {
            self.passed = false;
            self.first_counterexample = Some(Counterexample { params: params(), oracle: oracle.to_string(), formula: formula.to_string() });
        }
    }

    fn fail_with(&mut self, params: String, err: Error) {
        self.cases += 1;
        self.passed = false;
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(Counterexample { params, oracle: "-".into(), formula: format!("error: {err}") });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<FormulaCheck>,
}

fn big(v: u64) -> ExactValue {
    ExactValue::from_int(BigInt::from(v))
}

fn frac(num: u64, den: u64) -> ExactValue {
    ExactValue::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Counts of complete uncover paths over all trees on `[n]`.
pub fn full_path_counts(n: usize) -> Result<BTreeMap<Vec<usize>, u64>> {
    let mut counts = BTreeMap::new();
    for t in enumerate_trees(n, false)? {
        *counts.entry(uncover_path(&t).values().collect()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Strictly increasing tuples from `lo..=hi` of length `1..=max_len`.
fn increasing_tuples(lo: usize, hi: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, hi: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for j in start..=hi {
            cur.push(j);
            rec(j + 1, hi, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if lo <= hi {
        rec(lo, hi, max_len, &mut Vec::new(), &mut out);
    }
    out
}

/// Nondecreasing vectors with `a_i <= js_i - 1`.
fn admissible_counts(js: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &j in js {
        let mut next = Vec::new();
        for prefix in &out {
            let lo = prefix.last().copied().unwrap_or(0);
            for a in lo..j {
                let mut v = prefix.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Checks the partial uncover-sequence counts with up to `max_r`
/// observation points, and the full-sequence counts, for `n <= max_n`.
pub fn verify_uncover_counts(max_n: usize, max_r: usize) -> Result<Vec<FormulaCheck>> {
    let mut partial = FormulaCheck::new("count_trees_partial_sequence", max_n);
    let mut full = FormulaCheck::new("count_trees_full_sequence", max_n);
    for n in 1..=max_n {
        let paths = full_path_counts(n)?;
        for js in increasing_tuples(2, n.saturating_sub(1), max_r) {
            let mut table: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
            for (p, c) in &paths {
                *table.entry(js.iter().map(|&j| p[j - 1]).collect()).or_insert(0) += c;
            }
            for a in admissible_counts(&js) {
                let oracle = big(table.get(&a).copied().unwrap_or(0));
                let params = || format!("n={n} js={js:?} a={a:?}");
                match SequenceConstraint::new(n, js.clone(), a.clone()).and_then(|c| exact::count_trees_partial_sequence(&c)) {
                    Ok(f) => partial.compare(params, &oracle, &f),
                    Err(e) => partial.fail_with(params(), e),
                }
            }
        }
        let all_js: Vec<usize> = (1..=n).collect();
        for a in admissible_counts(&all_js) {
            if a[n - 1] != n - 1 {
                continue;
            }
            let oracle = big(paths.get(&a).copied().unwrap_or(0));
            match exact::count_trees_full_sequence(&a) {
                Ok(f) => full.compare(|| format!("a={a:?}"), &oracle, &f),
                Err(e) => full.fail_with(format!("a={a:?}"), e),
            }
        }
    }
    Ok(vec![partial, full])
}

/// Root-cluster law, rooted counts, root-cluster mean and the law of the
/// last uncovered vertex's cluster, against rooted enumeration.
pub fn verify_root_cluster(max_n: usize) -> Result<Vec<FormulaCheck>> {
    let mut pmf = FormulaCheck::new("root_cluster_pmf", max_n);
    let mut rooted = FormulaCheck::new("count_rooted_trees_root_cluster", max_n);
    let mut mean = FormulaCheck::new("root_cluster_expectation", max_n);
    let mut vertex = FormulaCheck::new("uncovered_vertex_cluster_pmf", max_n);
    for n in 1..=max_n {
        let all_rooted = tree_count(n) * n as u64;
        let masks: Vec<Vec<Vec<u32>>> = enumerate_trees(n, false)?.map(|t| forest_masks(&t)).collect();
        for k in 0..=n {
            // counts[m]: rooted trees whose root cluster has m vertices.
            let mut counts = vec![0u64; k + 1];
            // vcounts[m]: trees in which vertex k sits in a cluster of size m.
            let mut vcounts = vec![0u64; k + 1];
            for tm in &masks {
                for c in &tm[k] {
                    let size = c.count_ones() as usize;
                    counts[size] += size as u64;
                    if k >= 1 && c & (1 << (k - 1)) != 0 {
                        vcounts[size] += 1;
                    }
                }
                counts[0] += (n - k) as u64;
            }
            let choose = exact::binomial(n as i64, k as i64);
            let mut weighted = 0u64;
            for m in 0..=k {
                weighted += m as u64 * counts[m];
                let params = || format!("n={n} k={k} m={m}");
                match exact::root_cluster_pmf(n, k, m) {
                    Ok(f) => pmf.compare(params, &frac(counts[m], all_rooted), &f),
                    Err(e) => pmf.fail_with(params(), e),
                }
                let oracle = ExactValue::from_int(BigInt::from(counts[m]) * &choose);
                match exact::count_rooted_trees_root_cluster(n, k, m) {
                    Ok(f) => rooted.compare(params, &oracle, &f),
                    Err(e) => rooted.fail_with(params(), e),
                }
                if m >= 1 {
                    match exact::uncovered_vertex_cluster_pmf(n, k, m) {
                        Ok(f) => vertex.compare(params, &frac(vcounts[m], tree_count(n)), &f),
                        Err(e) => vertex.fail_with(params(), e),
                    }
                }
            }
            match exact::root_cluster_expectation(n, k) {
                Ok(f) => mean.compare(|| format!("n={n} k={k}"), &frac(weighted, all_rooted), &f),
                Err(e) => mean.fail_with(format!("n={n} k={k}"), e),
            }
        }
    }
    Ok(vec![pmf, rooted, mean, vertex])
}

/// Expected component counts and the cluster-set counts with up to
/// `max_l` prescribed components.
pub fn verify_components(max_n: usize, max_l: usize) -> Result<Vec<FormulaCheck>> {
    let mut expected = FormulaCheck::new("expected_components", max_n);
    let mut clusters = FormulaCheck::new("count_trees_with_clusters", max_n);
    for n in 1..=max_n {
        let masks: Vec<Vec<Vec<u32>>> = enumerate_trees(n, false)?.map(|t| forest_masks(&t)).collect();
        for k in 0..=n {
            let full = 1usize << k;
            let mut by_size = vec![0u64; k + 1];
            let mut single = vec![0u64; full];
            let mut pair: BTreeMap<(u32, u32), u64> = BTreeMap::new();
            for tm in &masks {
                let comps = &tm[k];
                for (i, &c) in comps.iter().enumerate() {
                    by_size[c.count_ones() as usize] += 1;
                    single[c as usize] += 1;
                    if max_l >= 2 {
                        for &d in &comps[i + 1..] {
                            *pair.entry((c.min(d), c.max(d))).or_insert(0) += 1;
                        }
                    }
                }
            }
            for r in 1..=k {
                let params = || format!("n={n} k={k} r={r}");
                match exact::expected_components(n, k, r) {
                    Ok(f) => expected.compare(params, &frac(by_size[r], tree_count(n)), &f),
                    Err(e) => expected.fail_with(params(), e),
                }
            }
            let total = big(tree_count(n));
            match exact::count_trees_with_clusters(n, k, &[]) {
                Ok(f) => clusters.compare(|| format!("n={n} k={k} sets=[]"), &total, &f),
                Err(e) => clusters.fail_with(format!("n={n} k={k} sets=[]"), e),
            }
            if max_l == 0 {
                continue;
            }
            for r1 in 1..full {
                let sizes = [r1.count_ones() as usize];
                let params = || format!("n={n} k={k} sets=[{r1:#b}]");
                match exact::count_trees_with_clusters(n, k, &sizes) {
                    Ok(f) => clusters.compare(params, &big(single[r1]), &f),
                    Err(e) => clusters.fail_with(params(), e),
                }
                if max_l < 2 {
                    continue;
                }
                // Pairs are unordered: take r2 > r1 disjoint from r1.
                for r2 in r1 + 1..full {
                    if r1 & r2 != 0 {
                        continue;
                    }
                    let sizes = [r1.count_ones() as usize, r2.count_ones() as usize];
                    let oracle = big(pair.get(&(r1 as u32, r2 as u32)).copied().unwrap_or(0));
                    let params = || format!("n={n} k={k} sets=[{r1:#b}, {r2:#b}]");
                    match exact::count_trees_with_clusters(n, k, &sizes) {
                        Ok(f) => clusters.compare(params, &oracle, &f),
                        Err(e) => clusters.fail_with(params(), e),
                    }
                }
            }
        }
    }
    Ok(vec![expected, clusters])
}

/// Mean and variance of `K_j` against full enumeration.
pub fn verify_edge_moments(max_n: usize) -> Result<Vec<FormulaCheck>> {
    let mut mean = FormulaCheck::new("expected_edges", max_n);
    let mut var = FormulaCheck::new("variance_edges", max_n);
    for n in 1..=max_n {
        let paths = full_path_counts(n)?;
        let total = tree_count(n);
        for j in 1..=n {
            let (mut s1, mut s2) = (0u64, 0u64);
            for (p, c) in &paths {
                s1 += p[j - 1] as u64 * c;
                s2 += (p[j - 1] * p[j - 1]) as u64 * c;
            }
            let m = frac(s1, total);
            let second = frac(s2, total);
            let v = ExactValue::new(second.as_rational() - m.as_rational() * m.as_rational());
            let params = || format!("n={n} j={j}");
            match exact::expected_edges(n, j) {
                Ok(f) => mean.compare(params, &m, &f),
                Err(e) => mean.fail_with(params(), e),
            }
            match exact::variance_edges(n, j) {
                Ok(f) => var.compare(params, &v, &f),
                Err(e) => var.fail_with(params(), e),
            }
        }
    }
    Ok(vec![mean, var])
}

/// Every suite: unrooted checks up to `max_n`, rooted ones up to
/// `min(max_n, 7)`.
pub fn verify_all(max_n: usize) -> Result<VerificationReport> {
    if max_n > 8 {
        return invalid("verification is limited to n <= 8");
    }
    let mut checks = verify_uncover_counts(max_n, 2)?;
    checks.extend(verify_edge_moments(max_n)?);
    checks.extend(verify_root_cluster(max_n.min(7))?);
    checks.extend(verify_components(max_n.min(7), 2)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport { passed, checks })
}
