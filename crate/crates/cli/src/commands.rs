use rand::RngExt;
use serde_json::{json, Value};

use tree_uncover::asymptotics::{self, largest_component_tail_terms, limit_covariance, limit_density, LimitLaw, LimitProcessSampler};
use tree_uncover::dsu::DisjointSets;
use tree_uncover::exact::{self, ExactValue, SequenceConstraint};
use tree_uncover::oracle::{self, VerificationReport};
use tree_uncover::stats::{self, ExperimentConfig, ExperimentKind};
use tree_uncover::uncover::interpolated_z;
use tree_uncover::{cluster_report, prufer_decode, sample_uniform_tree, uncover_path, Error, LabeledTree, PrueferSeq, Result, RngStream};

use crate::args::{Command, ExactFormula, Figure, LimitsCommand, Range, SimulateCommand, Suite};
use crate::output::{Output, Table};
use crate::row;

/// Runs one subcommand. The boolean is false when the command completed
/// but found a failure worth a nonzero exit (oracle mismatches).
pub fn run(cmd: &Command) -> Result<(Output, bool)> {
    let seed = cmd.common().seed;
    match cmd {
        Command::SampleTree { n, rooted, prufer, .. } => sample_tree(*n, *rooted, prufer.as_deref(), seed).map(ok),
        Command::Uncover { n, k, root, .. } => uncover(*n, *k, *root, seed).map(ok),
        Command::Exact { formula } => exact_formula(formula).map(ok),
        Command::Limits { regime } => limits(regime, seed).map(ok),
        Command::OracleVerify { n, suite, .. } => oracle_verify(*n, *suite),
        Command::Simulate { experiment } => simulate(experiment, seed).map(ok),
        Command::Plotdata { figure, n, .. } => plotdata(*figure, *n, seed).map(ok),
    }
}

fn ok(o: Output) -> (Output, bool) {
    (o, true)
}

fn sample_tree(n: usize, rooted: bool, prufer: Option<&[usize]>, seed: u64) -> Result<Output> {
    let mut rng = RngStream::new(seed, 0).rng();
    let tree = match prufer {
        Some(seq) => prufer_decode(&PrueferSeq::new(n, seq.to_vec())?),
        None => sample_uniform_tree(n, &mut rng)?,
    };
    let root = rooted.then(|| rng.random_range(1..=n));
    let mut t = Table::new(&["root", "u", "v"]);
    for (u, v) in tree.canonical_edges() {
        t.push(row![root, u, v]);
    }
    if n == 1 {
        t.push(row![root, "", ""]);
    }
    Ok(Output::Table(t, serde_json::to_value(tree.to_json(root)).expect("serializable")))
}

fn uncover(n: usize, k: Option<usize>, root: Option<usize>, seed: u64) -> Result<Output> {
    let tree = sample_uniform_tree(n, &mut RngStream::new(seed, 0).rng())?;
    if let Some(k) = k {
        let report = cluster_report(&tree, k, root)?;
        let mut t = Table::new(&["size", "count"]);
        let mut sizes = report.sizes.clone();
        sizes.dedup();
        for s in sizes {
            t.push(row![s, report.count_of_size(s)]);
        }
        let v = json!({"n": n, "tree": tree.to_json(root), "report": report});
        return Ok(Output::Table(t, v));
    }
    let p = uncover_path(&tree);
    let mut t = Table::new(&["j", "k_j", "components"]);
    for j in 1..=n {
        t.push(row![j, p.k(j), p.components(j)]);
    }
    let v = json!({"n": n, "tree": tree.to_json(None), "k": p.values().collect::<Vec<_>>()});
    Ok(Output::Table(t, v))
}

fn exact_formula(f: &ExactFormula) -> Result<Output> {
    let (name, params, value): (&str, Value, ExactValue) = match f {
        ExactFormula::ExpectedEdges { n, j, .. } => ("expected-edges", json!({"n": n, "j": j}), exact::expected_edges(*n, *j)?),
        ExactFormula::VarianceEdges { n, k, .. } => ("variance-edges", json!({"n": n, "k": k}), exact::variance_edges(*n, *k)?),
        ExactFormula::CountPartial { n, js, counts, .. } => {
            let c = SequenceConstraint::new(*n, js.clone(), counts.clone())?;
            ("count-partial", json!({"n": n, "js": js, "as": counts}), exact::count_trees_partial_sequence(&c)?)
        }
        ExactFormula::CountFull { counts, .. } => ("count-full", json!({"as": counts}), exact::count_trees_full_sequence(counts)?),
        ExactFormula::CountClusters { n, k, rs, .. } => ("count-clusters", json!({"n": n, "k": k, "rs": rs}), exact::count_trees_with_clusters(*n, *k, rs)?),
        ExactFormula::RootClusterPmf { n, k, m, .. } => ("root-cluster-pmf", json!({"n": n, "k": k, "m": m}), exact::root_cluster_pmf(*n, *k, *m)?),
        ExactFormula::RootedCount { n, k, m, .. } => ("rooted-count", json!({"n": n, "k": k, "m": m}), exact::count_rooted_trees_root_cluster(*n, *k, *m)?),
        ExactFormula::RootClusterMean { n, k, .. } => ("root-cluster-mean", json!({"n": n, "k": k}), exact::root_cluster_expectation(*n, *k)?),
        ExactFormula::UncoveredVertexPmf { n, k, m, .. } => {
            ("uncovered-vertex-pmf", json!({"n": n, "k": k, "m": m}), exact::uncovered_vertex_cluster_pmf(*n, *k, *m)?)
        }
        ExactFormula::ExpectedComponents { n, k, r, .. } => ("expected-components", json!({"n": n, "k": k, "r": r}), exact::expected_components(*n, *k, *r)?),
        ExactFormula::AbelCheck { n, k, .. } => {
            let holds = exact::abel_identity_check(*n, *k)?;
            let v = json!({"formula": "abel-check", "params": {"n": n, "k": k}, "holds": holds});
            return Ok(Output::Plain(holds.to_string(), v));
        }
    };
    let v = json!({"formula": name, "params": params, "value": value.to_string(), "approx": value.to_f64()});
    Ok(Output::Plain(value.to_string(), v))
}

fn cells(r: &Range, default_from: f64, default_to: f64) -> Result<Vec<f64>> {
    let from = r.from.unwrap_or(default_from);
    let to = r.to.unwrap_or(default_to);
    if !(from < to) || r.points == 0 {
        return Err(Error::InvalidArgument(format!("need from < to and points >= 1, got {from}..{to} with {} points", r.points)));
    }
    let h = (to - from) / r.points as f64;
    Ok((0..r.points).map(|i| from + (i as f64 + 0.5) * h).collect())
}

fn density_table(law: LimitLaw, xs: &[f64]) -> Result<Output> {
    law.validate()?;
    let mut t = Table::new(&["x", "density"]);
    let mut pts = Vec::with_capacity(xs.len());
    for &x in xs {
        let f = limit_density(&law, x)?;
        t.push(row![x, f]);
        pts.push([x, f]);
    }
    let v = json!({"law": law, "total_mass": law.total_mass()?, "points": pts});
    Ok(Output::Table(t, v))
}

fn pmf_table(law: LimitLaw, max_m: u64, label: &str) -> Result<Output> {
    law.validate()?;
    let mut t = Table::new(&[label, "p"]);
    let mut ps = Vec::new();
    for m in 0..=max_m {
        let p = law.pmf(m)?;
        t.push(row![m, p]);
        ps.push(p);
    }
    let v = json!({"law": law, "total_mass": law.total_mass()?, "pmf": ps});
    Ok(Output::Table(t, v))
}

fn limits(cmd: &LimitsCommand, seed: u64) -> Result<Output> {
    match cmd {
        LimitsCommand::Central { alpha, max_m, .. } => pmf_table(LimitLaw::Central { alpha: *alpha }, *max_m, "m"),
        LimitsCommand::SupercriticalFixed { d, max_m, .. } => pmf_table(LimitLaw::SupercriticalFixed { d: *d }, *max_m, "j"),
        LimitsCommand::SubcriticalGamma { range, .. } => density_table(LimitLaw::SubcriticalGamma, &cells(range, 0.0, 10.0)?),
        LimitsCommand::Critical { c, range, .. } => density_table(LimitLaw::Critical { c: *c }, &cells(range, 0.0, 1.0)?),
        LimitsCommand::SupercriticalCont { range, .. } => density_table(LimitLaw::SupercriticalCont, &cells(range, 0.0, 10.0)?),
        LimitsCommand::Kappa { c, .. } => {
            let k = asymptotics::kappa(*c)?;
            let mut t = Table::new(&["c", "kappa"]);
            t.push(row![*c, k]);
            Ok(Output::Table(t, json!({"c": c, "kappa": k})))
        }
        LimitsCommand::Covariance { grid, .. } => {
            let mut t = Table::new(&["s", "t", "cov"]);
            let mut rows = Vec::new();
            for &s in grid {
                for &u in grid {
                    let c = limit_covariance(s.min(u), s.max(u))?;
                    t.push(row![s, u, c]);
                    rows.push([s, u, c]);
                }
            }
            Ok(Output::Table(t, json!({"grid": grid, "cov": rows})))
        }
        LimitsCommand::Process { grid, samples, .. } => {
            let sampler = LimitProcessSampler::new(grid)?;
            let paths = stats::replicate(seed, *samples, |rng| sampler.sample(rng));
            let mut t = Table::new(&["sample", "t", "value"]);
            for (i, p) in paths.iter().enumerate() {
                for (&s, &x) in p.grid.iter().zip(&p.values) {
                    t.push(row![i, s, x]);
                }
            }
            let v = json!({"grid": grid, "jitter": sampler.jitter(), "paths": paths.iter().map(|p| &p.values).collect::<Vec<_>>()});
            Ok(Output::Table(t, v))
        }
        LimitsCommand::Largest { c, alpha, .. } => {
            let terms = largest_component_tail_terms(*c, *alpha, asymptotics::largest::QMC_POINTS)?;
            let total = asymptotics::largest_component_tail_limit(*c, *alpha)?;
            let mut t = Table::new(&["c", "alpha", "limit"]);
            t.push(row![*c, *alpha, total]);
            Ok(Output::Table(t, json!({"c": c, "alpha": alpha, "limit": total, "terms": terms})))
        }
    }
}

fn oracle_verify(n: usize, suite: Suite) -> Result<(Output, bool)> {
    if n > 8 {
        return Err(Error::InvalidArgument(format!("oracle verification is limited to n <= 8, got {n}")));
    }
    let report = match suite {
        Suite::All => oracle::verify_all(n)?,
        other => {
            let checks = match other {
                Suite::Uncover => oracle::verify_uncover_counts(n, 2)?,
                Suite::Clusters => oracle::verify_root_cluster(n.min(7))?,
                Suite::Components => oracle::verify_components(n.min(7), 2)?,
                Suite::Moments => oracle::verify_edge_moments(n)?,
                Suite::All => unreachable!(),
            };
            VerificationReport { passed: checks.iter().all(|c| c.passed), checks }
        }
    };
    let mut t = Table::new(&["formula", "max_n", "cases", "passed"]);
    for c in &report.checks {
        t.push(row![c.formula.clone(), c.max_n, c.cases, c.passed]);
    }
    let passed = report.passed;
    Ok((Output::Table(t, serde_json::to_value(&report).expect("serializable")), passed))
}

fn simulate(cmd: &SimulateCommand, seed: u64) -> Result<Output> {
    match cmd {
        SimulateCommand::Edges { n, samples, grid, js, .. } => {
            let cfg = ExperimentConfig { n: *n, samples: *samples, seed, kind: ExperimentKind::EdgeMoments { js: js.clone(), grid: grid.clone() } };
            let r = stats::run_edge_moment_experiment(&cfg)?;
            let t = if js.is_empty() {
                let mut t = Table::new(&["t", "mean_Z", "var_Z"]);
                for g in &r.grid {
                    t.push(row![g.t, g.mean_z, g.var_z]);
                }
                t
            } else {
                let mut t = Table::new(&["j", "mean_K", "se_mean_K", "var_K", "exact_mean_K", "exact_var_K"]);
                for e in &r.edges {
                    t.push(row![e.j, e.moments.mean, e.moments.mean_se, e.moments.variance, e.exact_mean, e.exact_variance]);
                }
                t
            };
            Ok(Output::Table(t, serde_json::to_value(&r).expect("serializable")))
        }
        SimulateCommand::Clusters { n, k, samples, .. } => {
            let cfg = ExperimentConfig { n: *n, samples: *samples, seed, kind: ExperimentKind::Clusters { k: *k } };
            let r = stats::run_cluster_experiment(&cfg)?;
            let mut t = Table::new(&["m", "observed", "empirical", "exact"]);
            for (m, (&o, &p)) in r.root_counts.iter().zip(&r.exact_pmf).enumerate() {
                t.push(row![m, o, o as f64 / *samples as f64, p]);
            }
            Ok(Output::Table(t, serde_json::to_value(&r).expect("serializable")))
        }
        SimulateCommand::Largest { n, k, alpha, samples, .. } => {
            let cfg = ExperimentConfig { n: *n, samples: *samples, seed, kind: ExperimentKind::LargestComponent { k: *k, alpha: *alpha } };
            let r = stats::run_largest_component_experiment(&cfg)?;
            let mut t = Table::new(&["n", "k", "alpha", "c", "exceed", "exceed_se", "mean_fraction", "limit"]);
            t.push(row![*n, *k, *alpha, r.c, r.exceed.mean, r.exceed.se, r.fraction.mean, r.limit]);
            Ok(Output::Table(t, serde_json::to_value(&r).expect("serializable")))
        }
    }
}

/// Component of each uncovered vertex, named by its smallest label.
fn components_at(tree: &LabeledTree, k: usize) -> Vec<usize> {
    let mut dsu = DisjointSets::new(k);
    for &(u, v) in tree.edges() {
        if (v as usize) <= k {
            dsu.union(u as usize - 1, v as usize - 1);
        }
    }
    let mut name = vec![usize::MAX; k];
    let mut out = vec![0; k];
    for i in 0..k {
        let r = dsu.find(i);
        if name[r] == usize::MAX {
            name[r] = i + 1;
        }
        out[i] = name[r];
    }
    out
}

fn plotdata(fig: Figure, n: Option<usize>, seed: u64) -> Result<Output> {
    let n = n.unwrap_or(match fig {
        Figure::Fig1 => 100,
        Figure::Fig2 => 1000,
        Figure::Fig3 => 10_000,
    });
    if n < 2 {
        return Err(Error::InvalidArgument(format!("plot data needs n >= 2, got {n}")));
    }
    let tree = sample_uniform_tree(n, &mut RngStream::new(seed, 0).rng())?;
    match fig {
        Figure::Fig1 => {
            let mut t = Table::new(&["step", "kind", "u", "v", "component"]);
            let mut snaps = Vec::new();
            for i in 1..=9 {
                let k = (i * n).div_ceil(9);
                let comp = components_at(&tree, k);
                for (v, &c) in comp.iter().enumerate() {
                    t.push(row![k, "vertex", v + 1, "", c]);
                }
                let mut edges = Vec::new();
                for (u, v) in tree.canonical_edges() {
                    if (v as usize) <= k {
                        t.push(row![k, "edge", u, v, comp[u as usize - 1]]);
                        edges.push([u, v]);
                    }
                }
                snaps.push(json!({"step": k, "component": comp, "edges": edges}));
            }
            Ok(Output::Table(t, json!({"n": n, "tree": tree.to_json(None), "snapshots": snaps})))
        }
        Figure::Fig2 => {
            let p = uncover_path(&tree);
            let mut t = Table::new(&["j", "edges", "components"]);
            for j in 1..=n {
                t.push(row![j, p.k(j), p.components(j)]);
            }
            let comps: Vec<usize> = (1..=n).map(|j| p.components(j)).collect();
            Ok(Output::Table(t, json!({"n": n, "edges": p.values().collect::<Vec<_>>(), "components": comps})))
        }
        Figure::Fig3 => {
            let p = uncover_path(&tree);
            let mut t = Table::new(&["t", "scaled_edges", "deviation"]);
            let mut rows = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let s = j as f64 / n as f64;
                let scaled = p.k(j) as f64 / (n - 1) as f64;
                let dev = interpolated_z(&p, s)?;
                t.push(row![s, scaled, dev]);
                rows.push([s, scaled, dev]);
            }
            Ok(Output::Table(t, json!({"n": n, "rows": rows})))
        }
    }
}
