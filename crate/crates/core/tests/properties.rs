mod common;

use common::*;
use gowergraph::inference::{
    assign_tiers, benjamini_hochberg, cohens_d, effect_profile, permanova, tier_of, trend_table, Tier,
};
use gowergraph::network::{detect_communities, knn_lists, modularity, mutual_knn, select_k, Partition};
use gowergraph::similarity::{gower_matrix_from, to_similarity};
use gowergraph::weights::{average_importance, make_splits, vif, CvPlan, MeanStd};
use indexmap::IndexMap;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn gower_bounded_symmetric_and_complemented(seed in any::<u64>(), n in 2usize..25, p in 1usize..7) {
        let mut r = rng(seed);
        let (cols, w) = random_mixed(&mut r, n, p);
        let d = gower_matrix_from(&to_gower_input(&cols, &w)).unwrap();
        let s = to_similarity(&d);
        for i in 0..n {
            prop_assert_eq!(d.get(i, i), 0.0);
            prop_assert_eq!(s.get(i, i), 0.0);
            for j in 0..n {
                prop_assert!((0.0..=1.0).contains(&d.get(i, j)));
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                if i != j {
                    prop_assert_eq!(s.get(i, j), 1.0 - d.get(i, j));
                }
            }
        }
    }

    #[test]
    fn gower_weight_scale_invariant(seed in any::<u64>(), alpha in 0.01f64..100.0) {
        let mut r = rng(seed);
        let (cols, w) = random_mixed(&mut r, 12, 5);
        let scaled: Vec<f64> = w.iter().map(|x| x * alpha).collect();
        let a = gower_matrix_from(&to_gower_input(&cols, &w)).unwrap();
        let b = gower_matrix_from(&to_gower_input(&cols, &scaled)).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                prop_assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gower_permutation_equivariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 10;
        let (cols, w) = random_mixed(&mut r, n, 4);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let permuted: Vec<OracleColumn> = cols
            .iter()
            .map(|c| match c {
                OracleColumn::Num(v) => OracleColumn::Num(perm.iter().map(|&i| v[i]).collect()),
                OracleColumn::Cat(v) => OracleColumn::Cat(perm.iter().map(|&i| v[i]).collect()),
            })
            .collect();
        let a = gower_matrix_from(&to_gower_input(&cols, &w)).unwrap();
        let b = gower_matrix_from(&to_gower_input(&permuted, &w)).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn gower_equal_weight_numeric_is_mean_abs_difference(seed in any::<u64>(), n in 2usize..15, p in 1usize..5) {
        let mut r = rng(seed);
        let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| r.gen_range(-4.0..4.0)).collect()).collect();
        let input = to_gower_input(
            &cols.iter().map(|c| OracleColumn::Num(c.clone())).collect::<Vec<_>>(),
            &vec![1.0; p],
        );
        let d = gower_matrix_from(&input).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mean: f64 = cols
                    .iter()
                    .map(|c| {
                        let range = c.iter().cloned().fold(f64::MIN, f64::max) - c.iter().cloned().fold(f64::MAX, f64::min);
                        if range > 0.0 { (c[i] - c[j]).abs() / range } else { 0.0 }
                    })
                    .sum::<f64>() / p as f64;
                prop_assert!((d.get(i, j) - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mutual_knn_sound(seed in any::<u64>(), n in 3usize..20, ties in any::<bool>()) {
        let mut r = rng(seed);
        let s = random_similarity(&mut r, n, ties);
        for k in 1..n.min(11) {
            let g = mutual_knn(&s, k).unwrap();
            let lists = knn_lists(&s, k).unwrap();
            prop_assert!(g.max_degree() <= k);
            for &(i, j, w) in g.edges() {
                prop_assert!(lists[i].contains(&j) && lists[j].contains(&i));
                prop_assert_eq!(w, s.get(i, j));
            }
        }
    }

    #[test]
    fn modularity_bounds_and_detection_baselines(seed in any::<u64>(), n in 2usize..16, p in 0.1f64..0.9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, p);
        prop_assume!(g.n_edges() > 0);
        let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
        prop_assert!((-0.5..=1.0).contains(&q));
        prop_assert_eq!(modularity(&g, &Partition::single(n)).unwrap(), 0.0);
        let detected = modularity(&g, &detect_communities(&g, seed)).unwrap();
        let singles = modularity(&g, &Partition::singletons(n)).unwrap();
        prop_assert!(detected >= singles.max(0.0) - 1e-12);
    }

    #[test]
    fn permanova_invariants(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut r = rng(seed);
        let n = 14;
        let mut d = gowergraph::similarity::SymMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                d.set(i, j, r.gen_range(0.1..1.0) + if (i < 7) != (j < 7) { 0.3 } else { 0.0 });
            }
        }
        let nodes: Vec<usize> = (0..n).collect();
        let groups: Vec<usize> = (0..n).map(|i| usize::from(i >= 7) + 3 * usize::from(i % 5 == 0)).collect();
        let res = permanova(&d, &nodes, &groups, 99, seed).unwrap();
        prop_assert!(res.p_value >= 1.0 / 100.0 && res.p_value <= 1.0);
        prop_assert!((res.ss_total - res.ss_within - res.ss_between).abs() < 1e-9);

        // Relabeling group ids changes nothing.
        let relabeled: Vec<usize> = groups.iter().map(|&g| 100 - 7 * g).collect();
        let again = permanova(&d, &nodes, &relabeled, 99, seed).unwrap();
        prop_assert_eq!(again.p_value, res.p_value);
        prop_assert_eq!(again.pseudo_f, res.pseudo_f);

        // Multiplying every distance by a constant leaves F unchanged.
        let mut scaled = d.clone();
        for i in 0..n {
            for j in i + 1..n {
                scaled.set(i, j, d.get(i, j) * scale);
            }
        }
        let s = permanova(&scaled, &nodes, &groups, 99, seed).unwrap();
        prop_assert!((s.pseudo_f - res.pseudo_f).abs() <= 1e-9 * res.pseudo_f.abs());
    }

    #[test]
    fn cohens_d_antisymmetric_and_affine_invariant(
        a in proptest::collection::vec(-100.0f64..100.0, 2..20),
        b in proptest::collection::vec(-100.0f64..100.0, 2..20),
        shift in -50.0f64..50.0,
        alpha in 0.1f64..10.0,
    ) {
        let d = cohens_d(&a, &b).unwrap();
        prop_assume!(d.is_finite());
        prop_assert_eq!(cohens_d(&b, &a).unwrap(), -d);
        let shifted = |v: &[f64]| v.iter().map(|x| x + shift).collect::<Vec<_>>();
        let scaled = |v: &[f64]| v.iter().map(|x| x * alpha).collect::<Vec<_>>();
        let tol = 1e-9 * d.abs().max(1.0);
        prop_assert!((cohens_d(&shifted(&a), &shifted(&b)).unwrap() - d).abs() < tol);
        prop_assert!((cohens_d(&scaled(&a), &scaled(&b)).unwrap() - d).abs() < tol);
    }

    #[test]
    fn tiers_partition_clusters(medians in proptest::collection::vec(0.0f64..80.0, 1..30), t1 in 1.0f64..30.0, gap in 0.1f64..30.0) {
        let t2 = t1 + gap;
        let input: Vec<(usize, f64)> = medians.iter().copied().enumerate().collect();
        let a = assign_tiers(&input, t1, t2).unwrap();
        prop_assert_eq!(a.rows.len(), medians.len());
        for (c, m) in &input {
            let tier = a.tier(*c).unwrap();
            prop_assert_eq!(tier, tier_of(*m, t1, t2));
            prop_assert_eq!(tier == Tier::Low, *m < t1);
            prop_assert_eq!(tier == Tier::High, *m >= t2);
        }
        for w in a.rows.windows(2) {
            prop_assert!(w[0].median >= w[1].median);
        }
    }

    #[test]
    fn bh_adjusted_dominates_raw(p in proptest::collection::vec(0.0001f64..1.0, 1..40)) {
        let adj = benjamini_hochberg(&p);
        for (a, r) in adj.iter().zip(&p) {
            prop_assert!(*a >= *r && *a <= 1.0);
        }
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
        for w in idx.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]]);
        }
    }

    #[test]
    fn averaged_importance_is_a_weight_vector(vals in proptest::collection::vec(-0.2f64..1.0, 3)) {
        prop_assume!(vals.iter().any(|&v| v > 0.0));
        let mut per_model = IndexMap::new();
        for (m, shift) in [("a", 0.0), ("b", 0.05)] {
            let t: IndexMap<String, MeanStd> = ["x", "c_p", "c_q"]
                .iter()
                .zip(&vals)
                .map(|(k, v)| (k.to_string(), MeanStd { mean: v + shift, std: 0.0 }))
                .collect();
            per_model.insert(m.to_string(), t);
        }
        let parents: IndexMap<String, String> =
            [("c_p", "c"), ("c_q", "c")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let w = average_importance(&per_model, &["a".into(), "b".into()], &parents).unwrap();
        prop_assert_eq!(w.weights.len(), 2);
        prop_assert!(w.weights.values().all(|&v| v >= 0.0));
        prop_assert!((w.weights.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vif_at_least_one(seed in any::<u64>(), p in 2usize..5) {
        let mut r = rng(seed);
        let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..30).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        for v in vif(&cols).unwrap() {
            prop_assert!(v >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn splits_cover_each_row_once_per_repeat(y in proptest::collection::vec(0.0f64..100.0, 10..80), seed in any::<u64>()) {
        let plan = CvPlan { seed, ..CvPlan::default() };
        let splits = make_splits(&y, &plan).unwrap();
        prop_assert_eq!(splits.len(), 25);
        for rep in 0..5 {
            let mut seen = vec![0; y.len()];
            for s in splits.iter().filter(|s| s.repeat == rep) {
                for &i in &s.validation {
                    seen[i] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn score_identity_over_sweeps(seed in any::<u64>(), n in 8usize..25) {
        let mut r = rng(seed);
        let s = random_similarity(&mut r, n, false);
        let sel = select_k(&s, 1, (n - 1).min(8), seed).unwrap();
        for t in &sel.traces {
            let q = if t.modularity.is_finite() { t.modularity } else { continue };
            prop_assert_eq!(t.score, q - 10.0 * t.p_if - t.p_ad);
        }
    }

    #[test]
    fn network_is_thread_count_independent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_similarity(&mut r, 30, true);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                let sel = select_k(&s, 2, 10, seed).unwrap();
                let g = mutual_knn(&s, sel.best_k).unwrap();
                (sel, g.edges().to_vec(), detect_communities(&g, seed))
            })
        };
        prop_assert_eq!(run(1), run(6));
    }
}

#[test]
fn trend_cells_equal_profile_cells() {
    use gowergraph::dataset::{prepare, PrepareOptions};
    use gowergraph::pipeline::{generate_synthetic, SynthSpec};
    let data = generate_synthetic(&SynthSpec { seed: 9, ..SynthSpec::default() }).unwrap();
    let table = prepare(&data.table, &data.schema, PrepareOptions::default()).unwrap();
    let clusters: Vec<(usize, Vec<usize>)> =
        (0..3).map(|b| (b + 1, (0..60).filter(|&i| data.labels[i] == b).collect())).collect();
    let profile = effect_profile(&table, &clusters, 4).unwrap();
    let order = [3, 1, 2];
    let t = trend_table(&profile, &order).unwrap();
    assert_eq!(t.clusters, order);
    for (f, name) in t.features.iter().enumerate() {
        for (c, label) in order.iter().enumerate() {
            assert_eq!(t.values[f][c].to_bits(), profile.cluster(*label).unwrap().d[name].to_bits());
        }
    }
    for c in &profile.clusters {
        assert_eq!(c.top.len(), 4.min(profile.features.len()));
    }
}
