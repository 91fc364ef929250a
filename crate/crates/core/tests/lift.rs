mod support;

use fiid_core::lift::{
    greedy_distance_coloring, local_stats, project_rule, r_nice_flags, random_lift, BuiltinRule, LiftGraph,
};
use support::{complete, q};

fn tv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

/// Closed walks of length `k` through `x` that never backtrack, counted by
/// exhaustive search.
fn nb_closed_walks(lift: &LiftGraph, x: usize, k: usize) -> usize {
    fn go(lift: &LiftGraph, start: usize, at: usize, last: Option<usize>, left: usize) -> usize {
        if left == 0 {
            return (at == start) as usize;
        }
        lift.neighbors(at)
            .filter(|&(e, _)| Some(e) != last)
            .map(|(e, y)| go(lift, start, y, Some(e), left - 1))
            .sum()
    }
    go(lift, x, x, None, k)
}

#[test]
fn lifts_are_deterministic_coverings() {
    let k4 = complete(4);
    let a = random_lift(&k4, 500, 3).unwrap();
    assert_eq!(a, random_lift(&k4, 500, 3).unwrap());
    assert_ne!(a, random_lift(&k4, 500, 4).unwrap());
    for x in 0..a.vertex_count() {
        assert_eq!(a.degree(x), 3);
        let mut images: Vec<usize> = a.neighbors(x).map(|(_, y)| a.project_vertex(y)).collect();
        images.sort();
        let mut want: Vec<usize> = (0..4).filter(|&v| v != a.project_vertex(x)).collect();
        want.sort();
        assert_eq!(images, want, "vertex {x} does not cover its base neighborhood");
    }
}

#[test]
fn short_cycles_stay_bounded() {
    // the expected number of non-backtracking closed walks of length k in a
    // random lift tends to the base count, independently of n
    let k4 = complete(4);
    for k in 3..=4 {
        let base = LiftGraph::new(k4.clone(), 1, vec![vec![0]; 6]).unwrap();
        let base_count: usize = (0..4).map(|x| nb_closed_walks(&base, x, k)).sum();
        let mut total = 0usize;
        let seeds = 40;
        for seed in 0..seeds {
            let lift = random_lift(&k4, 200, seed).unwrap();
            total += (0..lift.vertex_count()).map(|x| nb_closed_walks(&lift, x, k)).sum::<usize>();
        }
        let mean = total as f64 / seeds as f64;
        assert!(mean < 3.0 * base_count as f64, "k={k}: mean {mean}, base {base_count}");
    }
}

#[test]
fn niceness_improves_with_size() {
    let k4 = complete(4);
    let frac = |n: usize| {
        let lift = random_lift(&k4, n, 9).unwrap();
        let (v, _) = r_nice_flags(&lift, 2);
        v.iter().filter(|&&f| !f).count() as f64 / v.len() as f64
    };
    let (small, large) = (frac(200), frac(20_000));
    assert!(large < small, "{small} -> {large}");
    assert!(large < 0.01);
}

#[test]
fn rules_approach_their_tree_laws() {
    let k4 = complete(4);
    let n = 20_000;
    let eps = 0.5 / (n as f64).ln();
    for rule in BuiltinRule::ALL {
        let lift = random_lift(&k4, n, 21).unwrap();
        let c = project_rule(&lift, &rule, 22);
        let stats = local_stats(&lift, &c).unwrap();
        for e in 0..k4.edge_count() {
            let got: Vec<f64> = stats.edge_law(e);
            let err = tv(&got, &rule.tree_edge_law(3));
            assert!(err < eps, "{}: edge {e} off by {err}", rule.name());
        }
        for v in 0..4 {
            let got: Vec<f64> = stats.vertex_law(v);
            assert!(tv(&got, &rule.tree_vertex_law(3)) < eps, "{}: vertex {v}", rule.name());
        }
    }
}

#[test]
fn edge_statistics_concentrate() {
    // frozen once: observed values of sd·sqrt(n) were at most 0.54
    const C: f64 = 1.0;
    let k4 = complete(4);
    let n = 4_000;
    let seeds = 50;
    let masses: Vec<Vec<f64>> = (0..seeds)
        .map(|s| {
            let lift = random_lift(&k4, n, 1000 + s).unwrap();
            let c = project_rule(&lift, &BuiltinRule::LocalMax, 2000 + s);
            local_stats(&lift, &c).unwrap().edge_law(0)
        })
        .collect();
    for cell in 0..4 {
        let xs: Vec<f64> = masses.iter().map(|m| m[cell]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
        assert!(sd <= C / (n as f64).sqrt(), "cell {cell}: sd {sd}");
    }
}

#[test]
fn product_rule_error_is_of_order_sqrt_m2_over_n() {
    let k4 = complete(4);
    for n in [1_000usize, 10_000] {
        let mut mean_err = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            let lift = random_lift(&k4, n, s).unwrap();
            let c = project_rule(&lift, &BuiltinRule::Bit, 100 + s);
            let stats = local_stats(&lift, &c).unwrap();
            mean_err += (0..6).map(|e| tv(&stats.edge_law::<f64>(e), &[0.25; 4])).sum::<f64>() / 6.0;
        }
        mean_err /= seeds as f64;
        assert!(mean_err <= 3.0 * (4.0 / n as f64).sqrt(), "n={n}: {mean_err}");
    }
}

#[test]
fn distance_coloring_separates_and_respects_degree_bound() {
    let k4 = complete(4);
    let lift = random_lift(&k4, 300, 5).unwrap();
    for l in 1..=3 {
        let c = greedy_distance_coloring(&lift, l);
        // a vertex has at most 3 + 6 + ... + 3·2^(l-1) vertices within l
        let bound = 1 + (0..l).map(|j| 3 * 2usize.pow(j as u32)).sum::<usize>();
        assert!(c.alphabet() as usize <= bound, "L={l}: {} colors", c.alphabet());
        for x in 0..lift.vertex_count() {
            let mut frontier = vec![x];
            let mut seen = vec![x];
            for _ in 0..l {
                let next: Vec<usize> = frontier
                    .iter()
                    .flat_map(|&y| lift.neighbors(y).map(|(_, z)| z))
                    .filter(|z| !seen.contains(z))
                    .collect();
                seen.extend(&next);
                frontier = next;
            }
            for &y in &seen[1..] {
                assert_ne!(c.state(x), c.state(y), "L={l}: {x} and {y} share a color");
            }
        }
    }
}

#[test]
fn statistics_of_a_coloring_are_a_consistent_collection() {
    for (name, g) in support::small_graphs() {
        let (_, stats) = support::random_stats(&g, 6, 3, 17);
        let mu = support::collection_of(&g, &stats);
        for v in 0..g.vertex_count() {
            let total: fiid_core::Rational = mu.vertex_law(v).iter().sum();
            assert_eq!(total, q(1, 1), "{name}");
        }
    }
}
