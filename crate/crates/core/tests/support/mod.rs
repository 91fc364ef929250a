//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use fiid_core::lift::{local_stats, project_rule, random_lift, BuiltinRule, Coloring, LiftGraph, LocalStats};
use fiid_core::oracle::ConsistentCollection;
use fiid_core::types::{type_from_distances, SubsetType};
use fiid_core::{BaseGraph, Rational};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// A finite subtree of `T_d` with some of its vertices marked.
pub struct MarkedSubtree {
    pub d: usize,
    pub adj: Vec<Vec<usize>>,
    pub marks: Vec<usize>,
}

impl MarkedSubtree {
    pub fn random(rng: &mut impl Rng, d: usize, nodes: usize, marks: usize) -> Self {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new()];
        while adj.len() < nodes {
            let open: Vec<usize> = (0..adj.len()).filter(|&x| adj[x].len() < d).collect();
            let p = *open.choose(rng).unwrap();
            let x = adj.len();
            adj.push(vec![p]);
            adj[p].push(x);
        }
        let mut pts: Vec<usize> = (0..adj.len()).collect();
        pts.shuffle(rng);
        pts.truncate(marks.clamp(1, adj.len()));
        Self { d, adj, marks: pts }
    }

    pub fn distances(&self) -> Vec<Vec<u32>> {
        distances(&self.adj, &self.marks)
    }

    /// Explicit `B_k(marks)`: the tree is padded to degree `d` wherever a
    /// vertex is closer than `k` to a mark.
    pub fn ball(&self, k: usize) -> Self {
        let mut adj = self.adj.clone();
        let mut dist = vec![usize::MAX; adj.len()];
        let mut queue = VecDeque::new();
        for &m in &self.marks {
            dist[m] = 0;
            queue.push_back(m);
        }
        while let Some(x) = queue.pop_front() {
            if dist[x] == k {
                continue;
            }
            while adj[x].len() < self.d {
                let y = adj.len();
                adj.push(vec![x]);
                adj[x].push(y);
                dist.push(usize::MAX);
            }
            for i in 0..adj[x].len() {
                let y = adj[x][i];
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let marks = (0..adj.len()).filter(|&x| dist[x] <= k).collect();
        Self { d: self.d, adj, marks }
    }
}

/// Breadth-first distances between the given vertices of a forest.
pub fn distances(adj: &[Vec<usize>], pts: &[usize]) -> Vec<Vec<u32>> {
    pts.iter()
        .map(|&s| {
            let mut dist = vec![u32::MAX; adj.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if dist[y] == u32::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            pts.iter().map(|&t| dist[t]).collect()
        })
        .collect()
}

pub fn permute(dist: &[Vec<u32>], p: &[usize]) -> Vec<Vec<u32>> {
    p.iter().map(|&i| p.iter().map(|&j| dist[i][j]).collect()).collect()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Lexicographically smallest upper triangle over all orderings of the
/// points: a canonical form by exhaustion.
pub fn lexmin_key(dist: &[Vec<u32>]) -> Vec<u32> {
    let n = dist.len();
    all_permutations(n)
        .into_iter()
        .map(|p| {
            let m = permute(dist, &p);
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| m[i][j]).collect::<Vec<_>>()
        })
        .min()
        .unwrap()
}

pub fn subset_type(d: usize, dist: &[Vec<u32>]) -> SubsetType {
    type_from_distances(d, dist).expect("distances come from a subtree of T_d")
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> BaseGraph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    BaseGraph::from_pairs(n, &pairs).unwrap()
}

/// Small graphs, all subgraphs of `K_4`.
pub fn small_graphs() -> Vec<(&'static str, BaseGraph)> {
    let g = |n: usize, pairs: &[(usize, usize)]| BaseGraph::from_pairs(n, pairs).unwrap();
    vec![
        ("edge", g(2, &[(0, 1)])),
        ("path3", g(3, &[(0, 1), (1, 2)])),
        ("triangle", g(3, &[(0, 1), (1, 2), (0, 2)])),
        ("square", g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])),
        ("paw", g(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        ("diamond", g(4, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 0)])),
        ("k4", complete(4)),
    ]
}

/// Uniform random coloring on `m` states.
pub fn random_coloring(rng: &mut impl Rng, len: usize, m: u32) -> Coloring {
    Coloring::new((0..len).map(|_| rng.gen_range(0..m)).collect(), m)
}

/// Random lift, random coloring, and its statistics.
pub fn random_stats(g: &BaseGraph, n: usize, m: u32, seed: u64) -> (LiftGraph, LocalStats) {
    let lift = random_lift(g, n, seed).unwrap();
    let c = random_coloring(&mut rng(seed ^ 0x5eed), lift.vertex_count(), m);
    let stats = local_stats(&lift, &c).unwrap();
    (lift, stats)
}

/// Statistics of a coloring as an exact collection with masses `count / n`.
pub fn collection_of(g: &BaseGraph, stats: &LocalStats) -> ConsistentCollection {
    let n = stats.fold() as i64;
    let law = |counts: &[u64]| counts.iter().map(|&c| q(c as i64, n)).collect::<Vec<_>>();
    let vertex = (0..g.vertex_count()).map(|v| law(stats.vertex_counts(v))).collect();
    let edge = (0..g.edge_count()).map(|e| law(stats.edge_counts(e))).collect();
    ConsistentCollection::new(g, vertex, edge).unwrap()
}

/// Bit-rule coloring of a fresh lift.
pub fn bit_coloring(g: &BaseGraph, n: usize, seed: u64) -> (LiftGraph, Coloring) {
    let lift = random_lift(g, n, seed).unwrap();
    let c = project_rule(&lift, &BuiltinRule::Bit, seed.wrapping_add(1));
    (lift, c)
}

/// Every nonnegative integer matrix with the given row and column sums.
pub fn pair_count_matrices(cu: &[u64], cv: &[u64]) -> Vec<Vec<Vec<u64>>> {
    fn rows(i: usize, cu: &[u64], left: &mut Vec<u64>, acc: &mut Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<u64>>>) {
        if i == cu.len() {
            if left.iter().all(|&x| x == 0) {
                out.push(acc.clone());
            }
            return;
        }
        let mut row = vec![0; left.len()];
        fill(0, cu[i], &mut row, i, cu, left, acc, out);
    }
    #[allow(clippy::too_many_arguments)]
    fn fill(
        j: usize,
        rest: u64,
        row: &mut Vec<u64>,
        i: usize,
        cu: &[u64],
        left: &mut Vec<u64>,
        acc: &mut Vec<Vec<u64>>,
        out: &mut Vec<Vec<Vec<u64>>>,
    ) {
        if j == row.len() {
            if rest == 0 {
                acc.push(row.clone());
                rows(i + 1, cu, left, acc, out);
                acc.pop();
            }
            return;
        }
        for x in 0..=rest.min(left[j]) {
            row[j] = x;
            left[j] -= x;
            fill(j + 1, rest - x, row, i, cu, left, acc, out);
            left[j] += x;
        }
        row[j] = 0;
    }
    let mut out = Vec::new();
    rows(0, cu, &mut cv.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Random composition of `total` into `parts` nonnegative counts.
pub fn random_counts(rng: &mut impl Rng, total: u64, parts: usize) -> Vec<u64> {
    let mut c = vec![0; parts];
    for _ in 0..total {
        c[rng.gen_range(0..parts)] += 1;
    }
    c
}

pub fn factorial(n: u64) -> num_bigint::BigUint {
    (1..=n).fold(num_bigint::BigUint::from(1u32), |a, k| a * k)
}

// Property checks, each driven by a single seed.

/// Two random subsets have the same type exactly when their distance
/// matrices agree up to reordering; reordering never changes the type.
pub fn check_canonical_congruence(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let d = r.gen_range(3..=4);
    let draw = |r: &mut ChaCha8Rng| {
        let nodes = r.gen_range(1..=6);
        let marks = r.gen_range(1..=4);
        MarkedSubtree::random(r, d, nodes, marks).distances()
    };
    let a = draw(&mut r);
    let b = draw(&mut r);
    let (ta, tb) = (subset_type(d, &a), subset_type(d, &b));
    let (ka, kb) = (lexmin_key(&a), lexmin_key(&b));
    if (ta == tb) != (ka == kb) {
        return Err(format!("type equality {} but lex-min equality {} for {a:?} / {b:?}", ta == tb, ka == kb));
    }
    let mut p: Vec<usize> = (0..a.len()).collect();
    p.shuffle(&mut r);
    if subset_type(d, &permute(&a, &p)) != ta {
        return Err(format!("reordering {p:?} changed the type of {a:?}"));
    }
    if lexmin_key(&ta.distance_matrix()) != ka {
        return Err(format!("stored distances of {a:?} are not congruent to the input"));
    }
    Ok(())
}

/// `B_a(B_b(V)) = B_{a+b}(V)`, and both match an explicit construction.
pub fn check_ball_semigroup(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let d = r.gen_range(3..=4);
    let nodes = r.gen_range(1..=5);
    let marks = r.gen_range(1..=3);
    let sub = MarkedSubtree::random(&mut r, d, nodes, marks);
    let (a, b) = (r.gen_range(0..=2), r.gen_range(0..=1));
    let t = subset_type(d, &sub.distances());
    let nested = t.ball(b).ball(a);
    let direct = t.ball(a + b);
    if nested != direct {
        return Err(format!("B_{a}(B_{b}) != B_{} for {:?}", a + b, sub.distances()));
    }
    let explicit = sub.ball(a + b);
    if direct.len() != explicit.marks.len() || t.ball_size(a + b) != explicit.marks.len() as u64 {
        return Err(format!(
            "ball size {} / {} but explicit count {}",
            direct.len(),
            t.ball_size(a + b),
            explicit.marks.len()
        ));
    }
    if subset_type(d, &explicit.distances()) != direct {
        return Err("explicit ball has a different type".into());
    }
    Ok(())
}

/// Edge histograms of any coloring of any loop-free lift have the vertex histograms
/// as marginals, and the histograms match a direct recount.
pub fn check_marginals(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let graphs = small_graphs();
    let (name, g) = &graphs[r.gen_range(0..graphs.len())];
    let n = r.gen_range(1..=12);
    let m = r.gen_range(1..=3);
    let (lift, stats) = random_stats(g, n, m, r.gen());
    if !stats.marginals_consistent(&lift) {
        return Err(format!("{name}, n={n}: marginals inconsistent"));
    }
    let c = random_coloring(&mut rng(seed), lift.vertex_count(), m);
    let stats = local_stats(&lift, &c).unwrap();
    for e in g.edges() {
        let mut h = vec![0u64; (m * m) as usize];
        for x in 0..lift.vertex_count() {
            for (le, y) in lift.neighbors(x) {
                // count each lift edge once, from its `v` end
                if lift.project_edge(le) == e.id && lift.project_vertex(x) == e.v && lift.project_vertex(y) == e.u {
                    h[(c.state(y) * m + c.state(x)) as usize] += 1;
                }
            }
        }
        if h != stats.edge_counts(e.id) {
            return Err(format!("{name}, n={n}: edge {} histogram {h:?} vs {:?}", e.id, stats.edge_counts(e.id)));
        }
        let rows: Vec<u64> = (0..m as usize).map(|a| (0..m as usize).map(|b| h[a * m as usize + b]).sum()).collect();
        if rows != stats.vertex_counts(e.u) {
            return Err(format!("{name}: recount marginal mismatch"));
        }
    }
    Ok(())
}

/// Summed over all pair-count matrices, matching counts give `N!`; for
/// small `N` each count also matches enumeration of the bijections.
pub fn check_matching_total(seed: u64) -> Result<(), String> {
    use fiid_core::oracle::matching_count;
    let mut r = rng(seed);
    let total = r.gen_range(1..=7u64);
    let mu = r.gen_range(1..=3);
    let mv = r.gen_range(1..=3);
    let cu = random_counts(&mut r, total, mu);
    let cv = random_counts(&mut r, total, mv);
    let ks = pair_count_matrices(&cu, &cv);
    let sum = ks
        .iter()
        .map(|k| matching_count(&cu, &cv, k).map_err(|e| e.to_string()))
        .sum::<Result<num_bigint::BigUint, _>>()?;
    if sum != factorial(total) {
        return Err(format!("cu={cu:?} cv={cv:?}: sum {sum} != {total}!"));
    }
    if total <= 5 {
        let left: Vec<usize> = cu.iter().enumerate().flat_map(|(a, &c)| std::iter::repeat_n(a, c as usize)).collect();
        let right: Vec<usize> = cv.iter().enumerate().flat_map(|(b, &c)| std::iter::repeat_n(b, c as usize)).collect();
        let k = &ks[r.gen_range(0..ks.len())];
        let hits = all_permutations(total as usize)
            .into_iter()
            .filter(|p| {
                let mut h = vec![vec![0u64; mv]; mu];
                for (i, &j) in p.iter().enumerate() {
                    h[left[i]][right[j]] += 1;
                }
                h == *k
            })
            .count();
        let count = matching_count(&cu, &cv, k).unwrap();
        if count != num_bigint::BigUint::from(hits) {
            return Err(format!("cu={cu:?} cv={cv:?} k={k:?}: {count} vs {hits} bijections"));
        }
    }
    Ok(())
}
