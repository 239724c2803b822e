use std::collections::HashMap;

use num_traits::One;
use proptest::prelude::*;
use tree_uncover::exact::{self, ExactValue};
use tree_uncover::oracle::{self, EnumerationReport};
use tree_uncover::stats::{chi_square_test, tv_distance};
use tree_uncover::uncover::interpolated_z;
use tree_uncover::*;

fn prufer_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (3usize..40).prop_flat_map(|n| (Just(n), proptest::collection::vec(1..=n, n - 2)))
}

proptest! {
    #[test]
    fn prufer_round_trip((n, seq) in prufer_strategy()) {
        let p = PrueferSeq::new(n, seq.clone()).unwrap();
        let t = prufer_decode(&p);
        prop_assert_eq!(t.n(), n);
        prop_assert_eq!(t.edges().len(), n - 1);
        let back = prufer_encode(&t).unwrap();
        prop_assert_eq!(back.labels().collect::<Vec<_>>(), seq);
    }

    #[test]
    fn uncover_path_invariants(n in 2usize..300, seed in any::<u64>()) {
        let t = sample_uniform_tree(n, &mut RngStream::new(seed, 0).rng()).unwrap();
        let p = uncover_path(&t);
        prop_assert_eq!(p.k(1), 0);
        prop_assert_eq!(p.k(n), n - 1);
        for j in 1..=n {
            prop_assert!(p.k(j) < j);
            if j > 1 {
                prop_assert!(p.k(j) >= p.k(j - 1));
            }
        }
        prop_assert!(interpolated_z(&p, 0.0).unwrap().abs() < 1e-12);
        prop_assert!(sup_abs(&p) >= interpolated_z(&p, 0.5).unwrap().abs() - 1e-12);
    }

    #[test]
    fn forest_identity(n in 2usize..200, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let t = sample_uniform_tree(n, &mut RngStream::new(seed, 1).rng()).unwrap();
        let k = ((n as f64) * frac).round() as usize;
        let p = uncover_path(&t);
        let r = cluster_report(&t, k, None).unwrap();
        // A forest on k vertices with k_j edges has k - k_j components.
        prop_assert_eq!(r.components(), k - p.k(k));
        prop_assert_eq!(r.sizes.iter().sum::<usize>(), k);
        prop_assert_eq!(r.largest, r.sizes.first().copied().unwrap_or(0));
        let mut proc = UncoverProcess::new(&t);
        proc.advance_to(k).unwrap();
        let counts = proc.size_counts();
        prop_assert_eq!(counts.iter().enumerate().map(|(s, c)| s * c).sum::<usize>(), k);
    }

    #[test]
    fn root_cluster_pmf_sums_to_one(n in 1usize..25, kf in 0.0f64..=1.0) {
        let k = ((n as f64) * kf).floor() as usize;
        let total: ExactValue = (0..=k).map(|m| exact::root_cluster_pmf(n, k, m).unwrap()).sum();
        prop_assert!(total.as_rational().is_one());
    }

    #[test]
    fn component_sizes_add_up(n in 2usize..25, kf in 0.05f64..=1.0) {
        let k = (((n as f64) * kf).ceil() as usize).max(1);
        let weighted: ExactValue = (1..=k)
            .map(|r| exact::expected_components(n, k, r).unwrap() * ExactValue::from_int(r as i64))
            .sum();
        prop_assert_eq!(weighted, ExactValue::from_int(k as i64));
    }

    #[test]
    fn report_merge_is_associative(cuts in proptest::collection::btree_set(1u64..125, 2)) {
        let cuts: Vec<u64> = cuts.into_iter().collect();
        let part = |lo: u64, hi: u64| {
            let mut r = EnumerationReport::new(5, vec![3], false);
            for t in oracle::enumerate_range(5, lo..hi, false).unwrap() {
                r.add(vec![uncover_path(&t).k(3)], 1);
            }
            r
        };
        let (a, b, c) = (part(0, cuts[0]), part(cuts[0], cuts[1]), part(cuts[1], 125));
        let mut left = a.clone();
        left.merge(b.clone()).unwrap();
        left.merge(c.clone()).unwrap();
        let mut bc = b;
        bc.merge(c).unwrap();
        let mut right = a;
        right.merge(bc).unwrap();
        prop_assert_eq!(left.to_json(), right.to_json());
        prop_assert_eq!(left.to_json(), oracle::oracle_uncover_distribution(5, &[3]).unwrap().to_json());
    }

    #[test]
    fn tv_is_a_bounded_metric(p in proptest::collection::vec(0.0f64..1.0, 1..20), q in proptest::collection::vec(0.0f64..1.0, 1..20)) {
        let norm = |v: Vec<f64>| { let s: f64 = v.iter().sum::<f64>().max(1e-300); v.into_iter().map(|x| x / s).collect::<Vec<_>>() };
        let (p, q) = (norm(p), norm(q));
        let d = tv_distance(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - tv_distance(&q, &p)).abs() < 1e-15);
        prop_assert!(tv_distance(&p, &p) == 0.0);
    }

    #[test]
    fn chi_square_p_value_in_range(obs in proptest::collection::vec(0u64..500, 3..10)) {
        let total: u64 = obs.iter().sum::<u64>().max(1);
        let probs = vec![1.0 / obs.len() as f64; obs.len()];
        if let Ok(g) = chi_square_test(&obs, &probs, total) {
            prop_assert!(g.statistic >= 0.0);
            prop_assert!((0.0..=1.0).contains(&g.p_value));
        }
    }
}

fn sup_abs(p: &UncoverPath) -> f64 {
    tree_uncover::uncover::sup_abs_z(p)
}

#[test]
fn sampler_is_uniform_on_four_vertices() {
    let samples = 160_000;
    let trees = tree_uncover::stats::replicate(99, samples, |rng| sample_uniform_tree(4, rng).unwrap().canonical_edges());
    let mut counts: HashMap<Vec<(u32, u32)>, u64> = HashMap::new();
    for t in trees {
        *counts.entry(t).or_default() += 1;
    }
    assert_eq!(counts.len(), 16);
    let mut keys: Vec<_> = counts.keys().cloned().collect();
    keys.sort();
    let observed: Vec<u64> = keys.iter().map(|k| counts[k]).collect();
    let g = chi_square_test(&observed, &[1.0 / 16.0; 16], samples as u64).unwrap();
    assert!(g.p_value > 1e-3, "{g:?}");
}

#[test]
fn sampling_is_reproducible_per_stream() {
    let a = sample_uniform_tree(500, &mut RngStream::new(7, 3).rng()).unwrap();
    let b = sample_uniform_tree(500, &mut RngStream::new(7, 3).rng()).unwrap();
    let c = sample_uniform_tree(500, &mut RngStream::new(7, 4).rng()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn tree_json_round_trip() {
    let t = sample_uniform_rooted_tree(30, &mut RngStream::new(1, 1).rng()).unwrap();
    let text = serde_json::to_string(&t.to_json()).unwrap();
    let back: tree_uncover::tree::TreeJson = serde_json::from_str(&text).unwrap();
    let (tree, root) = back.into_tree().unwrap();
    assert_eq!(tree, t.tree);
    assert_eq!(root, Some(t.root()));
}
