#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeMap;

use common::*;
use gowergraph::inference::{
    adjusted_rand_index, cluster_composition, cohens_d, permanova, spearman, trend_table, ClusterEffects, EffectProfile,
};
use gowergraph::network::{detect_communities, modularity, mutual_knn, Partition, SimilarityGraph};
use gowergraph::similarity::{gower_matrix_from, GowerColumn, GowerInput, GowerValues};
use gowergraph::weights::fit_ridge;
use indexmap::IndexMap;
use rand::Rng;

#[test]
fn gower_matches_double_loop() {
    let mut r = rng(11);
    for _ in 0..30 {
        let n = r.gen_range(2..40);
        let p = r.gen_range(1..9);
        let (cols, w) = random_mixed(&mut r, n, p);
        let d = gower_matrix_from(&to_gower_input(&cols, &w)).unwrap();
        let oracle = gower_oracle(&cols, &w);
        for i in 0..n {
            for j in 0..n {
                assert!((d.get(i, j) - oracle[i][j]).abs() <= 1e-12, "entry ({i},{j})");
            }
        }
    }
}

#[test]
fn gower_in_single_precision() {
    let mut r = rng(12);
    let (cols, w) = random_mixed(&mut r, 15, 5);
    let oracle = gower_oracle(&cols, &w);
    let input = GowerInput::new(
        cols.iter()
            .zip(&w)
            .map(|(c, &wt)| GowerColumn {
                name: String::new(),
                weight: wt as f32,
                values: match c {
                    OracleColumn::Num(v) => GowerValues::Numeric(v.iter().map(|&x| x as f32).collect()),
                    OracleColumn::Cat(v) => GowerValues::Categorical(v.clone()),
                },
            })
            .collect(),
    )
    .unwrap();
    let d = gower_matrix_from(&input).unwrap();
    for i in 0..15 {
        for j in 0..15 {
            assert!((f64::from(d.get(i, j)) - oracle[i][j]).abs() < 1e-5);
        }
    }
}

#[test]
fn modularity_matches_dense_formula() {
    let mut r = rng(21);
    for _ in 0..40 {
        let n = r.gen_range(2..13);
        let p = r.gen_range(0.15..0.8);
        let g = random_graph(&mut r, n, p);
        if g.n_edges() == 0 {
            continue;
        }
        let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
        assert!((q - modularity_oracle(&g, &labels)).abs() < 1e-12);
    }
}

#[test]
fn louvain_against_exhaustive_optimum() {
    let mut r = rng(22);
    let partitions = all_partitions(7);
    let (mut checked, mut optimal) = (0, 0);
    for _ in 0..12 {
        let g = random_graph(&mut r, 7, 0.45);
        if g.n_edges() == 0 {
            continue;
        }
        let best = partitions.iter().map(|p| modularity_oracle(&g, p)).fold(f64::MIN, f64::max);
        let found = modularity(&g, &detect_communities(&g, 5)).unwrap();
        let singletons = modularity(&g, &Partition::singletons(7)).unwrap();
        assert!(found <= best + 1e-12);
        assert!(found >= singletons.max(0.0) - 1e-12);
        checked += 1;
        if found >= best - 1e-12 {
            optimal += 1;
        }
    }
    assert!(checked >= 8);
    // A local method; on these graphs it misses the optimum only rarely.
    assert!(optimal * 4 >= checked * 3, "{optimal}/{checked} optimal");
}

#[test]
fn mutual_edges_rederived_from_sorted_rows() {
    let mut r = rng(23);
    for ties in [false, true] {
        let s = random_similarity(&mut r, 15, ties);
        for k in 1..8 {
            let g = mutual_knn(&s, k).unwrap();
            // Oracle top-k: full sort by (similarity desc, index asc).
            let top: Vec<Vec<usize>> = (0..15)
                .map(|i| {
                    let mut o: Vec<usize> = (0..15).filter(|&j| j != i).collect();
                    o.sort_by(|&a, &b| s.get(i, b).partial_cmp(&s.get(i, a)).unwrap().then(a.cmp(&b)));
                    o.truncate(k);
                    o
                })
                .collect();
            for i in 0..15 {
                for j in i + 1..15 {
                    let mutual = top[i].contains(&j) && top[j].contains(&i);
                    assert_eq!(g.has_edge(i, j), mutual, "k={k} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn ridge_matches_nalgebra() {
    let mut r = rng(31);
    for _ in 0..10 {
        let n = r.gen_range(10..40);
        let p = r.gen_range(1..6);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| r.gen_range(-2.0..2.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|row| row.iter().sum::<f64>() + r.gen_range(-0.5..0.5)).collect();
        for lambda in [0.0, 0.1, 10.0] {
            let m = fit_ridge(&x, &y, lambda).unwrap();
            let (beta, b0) = ridge_oracle(&x, &y, lambda);
            assert!((m.intercept - b0).abs() < 1e-8);
            for (a, b) in m.coefficients.iter().zip(&beta) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn cohens_d_matches_pooled_formula() {
    let mut r = rng(41);
    for _ in 0..100 {
        let a: Vec<f64> = (0..r.gen_range(2..30)).map(|_| r.gen_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..r.gen_range(2..30)).map(|_| r.gen_range(-3.0..7.0)).collect();
        let d = cohens_d(&a, &b).unwrap();
        assert!((d - cohens_d_oracle(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn spearman_matches_rank_oracle() {
    let mut r = rng(42);
    for _ in 0..50 {
        let n = r.gen_range(2..15);
        let x: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..6u8))).collect();
        let expected = if y.iter().all(|&v| v == y[0]) { 0.0 } else { spearman_oracle(&x, &y) };
        assert!((spearman(&x, &y) - expected).abs() < 1e-12);
    }
}

#[test]
fn trend_of_monotone_construction() {
    let features = vec!["up".to_string(), "down".to_string(), "flat".to_string()];
    let clusters = (1..=5)
        .map(|c| {
            let mut d = IndexMap::new();
            d.insert("up".to_string(), c as f64 * 0.5);
            d.insert("down".to_string(), -(c as f64).powi(2));
            d.insert("flat".to_string(), 0.3);
            ClusterEffects { cluster: c, d, top: vec![] }
        })
        .collect();
    let profile = EffectProfile { features, clusters };
    let t = trend_table(&profile, &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(t.spearman, vec![1.0, -1.0, 0.0]);
    let rev = trend_table(&profile, &[5, 4, 3, 2, 1]).unwrap();
    assert_eq!(rev.clusters, vec![5, 4, 3, 2, 1]);
    assert_eq!(rev.values[0], vec![2.5, 2.0, 1.5, 1.0, 0.5]);
    assert_eq!(rev.spearman[0], -1.0);
}

#[test]
fn composition_matches_group_by() {
    let mut r = rng(51);
    let n = 80;
    let states: Vec<String> = (0..n).map(|_| format!("S{}", r.gen_range(0..5))).collect();
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(1..5)).collect();
    let clusters: Vec<(usize, Vec<usize>)> =
        (1..5).map(|c| (c, (0..n).filter(|&i| labels[i] == c).collect())).collect();
    let rows = cluster_composition(&clusters, &states);
    let mut oracle: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for i in 0..n {
        *oracle.entry((labels[i], states[i].clone())).or_default() += 1;
    }
    let mut total = 0;
    for row in &rows {
        total += row.size;
        assert_eq!(row.counts.iter().map(|c| c.1).sum::<usize>(), row.size);
        for (v, c) in &row.counts {
            assert_eq!(oracle[&(row.cluster, v.clone())], *c);
        }
    }
    assert_eq!(total, n);
}

#[test]
fn ari_matches_pair_counting() {
    let mut r = rng(61);
    for _ in 0..30 {
        let n = r.gen_range(4..40);
        let a: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let b: Vec<usize> = (0..n).map(|_| r.gen_range(0..3)).collect();
        // Hubert-Arabie form over explicit pair agreements.
        let (mut both, mut only_a, mut only_b, mut pairs) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                pairs += 1.0;
                let sa = a[i] == a[j];
                let sb = b[i] == b[j];
                if sa && sb {
                    both += 1.0;
                }
                if sa {
                    only_a += 1.0;
                }
                if sb {
                    only_b += 1.0;
                }
            }
        }
        let expected = only_a * only_b / pairs;
        let max = (only_a + only_b) / 2.0;
        if max == expected {
            continue;
        }
        let oracle = (both - expected) / (max - expected);
        assert!((adjusted_rand_index(&a, &b) - oracle).abs() < 1e-12);
    }
}

#[test]
fn permanova_sums_of_squares_match_definitions() {
    let mut r = rng(71);
    let n = 12;
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.gen_range(0.0..1.0), r.gen_range(0.0..1.0))).collect();
    let mut d = gowergraph::similarity::SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            d.set(i, j, ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
        }
    }
    let groups: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let res = permanova(&d, &(0..n).collect::<Vec<_>>(), &groups, 99, 3).unwrap();
    let mut sst = 0.0;
    let mut ssw = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d2 = d.get(i, j).powi(2);
            sst += d2;
            if groups[i] == groups[j] {
                ssw += d2 / 4.0;
            }
        }
    }
    sst /= n as f64;
    let f = ((sst - ssw) / 2.0) / (ssw / 9.0);
    assert!((res.ss_total - sst).abs() < 1e-12);
    assert!((res.ss_within - ssw).abs() < 1e-12);
    assert!((res.pseudo_f - f).abs() < 1e-9 * f);
    assert!(!res.exact);
}

#[test]
fn graph_from_edges_rejects_bad_input() {
    assert!(SimilarityGraph::from_edges(3, [(0, 0, 1.0)]).is_err());
    assert!(SimilarityGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    assert!(SimilarityGraph::from_edges(3, [(0, 3, 1.0)]).is_err());
}
