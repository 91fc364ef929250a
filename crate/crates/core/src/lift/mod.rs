//! Random `n`-fold lifts of base graphs and local computations on them.

mod rule;
mod stats;

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BaseGraph, GraphError};

pub use rule::{project_rule, BuiltinRule, Coloring, LocalRule, RootedBall};
pub use stats::{
    estimate_type_entropy, evaluate_slack, local_stats, sharpness_ratio, LocalStats, TypeEstimate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("fold count must be at least 1")]
    ZeroFold,
    #[error("expected {expected} permutations of size {n}")]
    BadPermutations { expected: usize, n: usize },
    #[error("lift is not {0}-regular")]
    NotRegular(usize),
    #[error("only {achieved} of {requested} samples found a nice embedding")]
    TooFewNicePositions { achieved: usize, requested: usize },
    #[error("no entropy value for type {0}")]
    MissingType(String),
    #[error("inequality needs both positive and negative terms")]
    OneSided,
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("coloring has {found} vertices, lift has {expected}")]
    ColoringSize { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An `n`-fold covering of a base graph. Lift vertex `(v, i)` has id
/// `v·n + i`; lift edge `(e, i)` has id `e·n + i` and joins `(u, σ_e(i))`
/// to `(v, i)` where `e = (u, v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftGraph {
    base: BaseGraph,
    n: usize,
    perms: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
}

impl LiftGraph {
    pub fn new(base: BaseGraph, n: usize, perms: Vec<Vec<usize>>) -> Result<Self, LiftError> {
        if n == 0 {
            return Err(LiftError::ZeroFold);
        }
        let bad = LiftError::BadPermutations {
            expected: base.edge_count(),
            n,
        };
        if perms.len() != base.edge_count() {
            return Err(bad);
        }
        let mut inverse = Vec::with_capacity(perms.len());
        for p in &perms {
            if p.len() != n {
                return Err(bad);
            }
            let mut inv = vec![usize::MAX; n];
            for (i, &j) in p.iter().enumerate() {
                if j >= n || inv[j] != usize::MAX {
                    return Err(bad);
                }
                inv[j] = i;
            }
            inverse.push(inv);
        }
        Ok(Self {
            base,
            n,
            perms,
            inverse,
        })
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn fold(&self) -> usize {
        self.n
    }

    pub fn permutation(&self, e: usize) -> &[usize] {
        &self.perms[e]
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count() * self.n
    }

    pub fn edge_count(&self) -> usize {
        self.base.edge_count() * self.n
    }

    /// Base vertex under lift vertex `x`.
    pub fn project_vertex(&self, x: usize) -> usize {
        x / self.n
    }

    pub fn project_edge(&self, le: usize) -> usize {
        le / self.n
    }

    /// Endpoints `(u-end, v-end)` of lift edge `le`.
    pub fn edge_endpoints(&self, le: usize) -> (usize, usize) {
        let (e, i) = (le / self.n, le % self.n);
        let edge = &self.base.edges()[e];
        (edge.u * self.n + self.perms[e][i], edge.v * self.n + i)
    }

    /// `(lift edge, neighbor)` pairs at `x`, in base-edge order.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (v, i) = (x / self.n, x % self.n);
        let n = self.n;
        self.base.incident(v).iter().map(move |&(e, w)| {
            let edge = &self.base.edges()[e];
            if edge.v == v {
                (e * n + i, w * n + self.perms[e][i])
            } else {
                let j = self.inverse[e][i];
                (e * n + j, w * n + j)
            }
        })
    }

    pub fn degree(&self, x: usize) -> usize {
        self.base.degree(x / self.n)
    }

    pub fn is_connected(&self) -> bool {
        let total = self.vertex_count();
        let mut seen = vec![false; total];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for (_, y) in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == total
    }

    /// The lift as a standalone base graph (it must be connected).
    pub fn to_base_graph(&self) -> Result<BaseGraph, GraphError> {
        let pairs: Vec<(usize, usize)> = (0..self.edge_count()).map(|le| self.edge_endpoints(le)).collect();
        BaseGraph::from_pairs(self.vertex_count(), &pairs)
    }

    /// Breadth-first tree of radius `r` grown from `roots`, or `None` if the
    /// induced subgraph on the ball contains a cycle. The lift edge `joined`
    /// (if any) is treated as already used by every root, so an edge ball
    /// is grown from both endpoints of that edge.
    pub(crate) fn tree_ball(&self, roots: &[usize], joined: Option<usize>, r: usize) -> Option<BallTree> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut ball = BallTree::default();
        let mut via = Vec::new();
        for &x in roots {
            index.insert(x, ball.nodes.len());
            ball.nodes.push(x);
            ball.parent.push(usize::MAX);
            ball.depth.push(0);
            via.push(joined);
        }
        let mut next = 0;
        while next < ball.nodes.len() {
            let (x, dx) = (ball.nodes[next], ball.depth[next]);
            for (le, y) in self.neighbors(x) {
                if Some(le) == via[next] {
                    continue;
                }
                match index.entry(y) {
                    Entry::Occupied(_) => return None,
                    Entry::Vacant(slot) if dx < r => {
                        slot.insert(ball.nodes.len());
                        ball.nodes.push(y);
                        ball.parent.push(next);
                        ball.depth.push(dx + 1);
                        via.push(Some(le));
                    }
                    Entry::Vacant(_) => {}
                }
            }
            next += 1;
        }
        Some(ball)
    }

    /// Whether the radius-`r` neighborhood of `x` induces a tree.
    pub fn is_vertex_nice(&self, x: usize, r: usize) -> bool {
        self.tree_ball(&[x], None, r).is_some()
    }

    /// Whether the radius-`r` neighborhood of the endpoints of `le` induces
    /// a tree.
    pub fn is_edge_nice(&self, le: usize, r: usize) -> bool {
        let (a, b) = self.edge_endpoints(le);
        self.tree_ball(&[a, b], Some(le), r).is_some()
    }
}

/// A breadth-first tree inside a lift: `nodes[i]` is a lift vertex,
/// `parent[i]` an index into `nodes` (`usize::MAX` for roots).
#[derive(Debug, Clone, Default)]
pub(crate) struct BallTree {
    pub nodes: Vec<usize>,
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
}

/// `m` independent uniform permutations of `0..n`.
pub fn random_permutations<R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect()
}

/// Uniform random `n`-fold lift; deterministic in `(g, n, seed)`.
pub fn random_lift(g: &BaseGraph, n: usize, seed: u64) -> Result<LiftGraph, LiftError> {
    if n == 0 {
        return Err(LiftError::ZeroFold);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms = random_permutations(&mut rng, g.edge_count(), n);
    LiftGraph::new(g.clone(), n, perms)
}

/// Per-vertex and per-edge flags: `true` when the radius-`r` neighborhood
/// induces a tree.
pub fn r_nice_flags(lift: &LiftGraph, r: usize) -> (Vec<bool>, Vec<bool>) {
    let vertices = (0..lift.vertex_count())
        .into_par_iter()
        .map(|x| lift.is_vertex_nice(x, r))
        .collect();
    let edges = (0..lift.edge_count())
        .into_par_iter()
        .map(|le| lift.is_edge_nice(le, r))
        .collect();
    (vertices, edges)
}

/// Greedy coloring in vertex-id order in which equal colors are more than
/// `l` apart. Returns the coloring; its alphabet is the number of colors.
pub fn greedy_distance_coloring(lift: &LiftGraph, l: usize) -> Coloring {
    let total = lift.vertex_count();
    let mut color = vec![u32::MAX; total];
    let mut used = Vec::new();
    let mut depth: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut colors = 0u32;
    for x in 0..total {
        used.clear();
        depth.clear();
        depth.insert(x, 0);
        queue.push_back(x);
        while let Some(y) = queue.pop_front() {
            let dy = depth[&y];
            if color[y] != u32::MAX {
                used.push(color[y]);
            }
            if dy == l {
                continue;
            }
            for (_, z) in lift.neighbors(y) {
                if let Entry::Vacant(slot) = depth.entry(z) {
                    slot.insert(dy + 1);
                    queue.push_back(z);
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        let c = used.iter().enumerate().find(|&(i, &c)| i as u32 != c).map_or(used.len() as u32, |(i, _)| i as u32);
        color[x] = c;
        colors = colors.max(c + 1);
    }
    Coloring::new(color, colors.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> BaseGraph {
        BaseGraph::from_pairs(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn one_fold_is_the_base() {
        let g = k4();
        let lift = random_lift(&g, 1, 9).unwrap();
        assert_eq!(lift.to_base_graph().unwrap(), g);
    }

    #[test]
    fn covering_degrees_and_adjacency() {
        let lift = random_lift(&k4(), 50, 3).unwrap();
        for x in 0..lift.vertex_count() {
            assert_eq!(lift.neighbors(x).count(), 3);
            for (le, y) in lift.neighbors(x) {
                let (a, b) = lift.edge_endpoints(le);
                assert!((a, b) == (x, y) || (a, b) == (y, x));
            }
        }
    }

    #[test]
    fn rejects_bad_permutations() {
        let g = k4();
        assert_eq!(
            LiftGraph::new(g.clone(), 2, vec![vec![0, 0]; 6]).unwrap_err(),
            LiftError::BadPermutations { expected: 6, n: 2 }
        );
        assert_eq!(random_lift(&g, 0, 0).unwrap_err(), LiftError::ZeroFold);
    }

    #[test]
    fn niceness_on_small_graphs() {
        let lift = random_lift(&k4(), 1, 0).unwrap();
        let (v0, e0) = r_nice_flags(&lift, 0);
        assert!(v0.iter().all(|&b| b));
        assert!(e0.iter().all(|&b| b));
        let (v1, e1) = r_nice_flags(&lift, 1);
        assert!(v1.iter().all(|&b| !b));
        assert!(e1.iter().all(|&b| !b));
        // a 6-cycle: radius 2 balls are paths, radius 3 wraps around
        let c6 = BaseGraph::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let lift = random_lift(&c6, 1, 0).unwrap();
        assert!(lift.is_vertex_nice(0, 2));
        assert!(!lift.is_vertex_nice(0, 3));
        assert!(lift.is_edge_nice(0, 1));
        assert!(!lift.is_edge_nice(0, 2));
    }

    #[test]
    fn greedy_coloring_separates() {
        let path = BaseGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let lift = random_lift(&path, 1, 0).unwrap();
        assert_eq!(greedy_distance_coloring(&lift, 2).alphabet(), 3);
        assert_eq!(greedy_distance_coloring(&lift, 1).alphabet(), 2);
        let lift = random_lift(&k4(), 40, 1).unwrap();
        let c = greedy_distance_coloring(&lift, 1);
        for le in 0..lift.edge_count() {
            let (a, b) = lift.edge_endpoints(le);
            assert_ne!(c.state(a), c.state(b));
        }
        assert!(c.alphabet() <= 4);
    }
}
