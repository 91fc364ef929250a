use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Coloring, LiftError, LiftGraph};
use crate::entropy::{plugin_from_counts, rational_to_f64};
use crate::inequality::{type_name, EntropyInequality};
use crate::scalar::Real;
use crate::types::SubsetType;

/// Exact color histograms over the `n` lifts of each base vertex and edge.
/// Edge histograms are row-major in `(state at u-end, state at v-end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalStats {
    n: usize,
    alphabet: u32,
    vertex: Vec<Vec<u64>>,
    edge: Vec<Vec<u64>>,
}

impl LocalStats {
    pub fn fold(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn vertex_counts(&self, v: usize) -> &[u64] {
        &self.vertex[v]
    }

    pub fn edge_counts(&self, e: usize) -> &[u64] {
        &self.edge[e]
    }

    pub fn vertex_law<T: Real>(&self, v: usize) -> Vec<T> {
        normalize(&self.vertex[v], self.n)
    }

    pub fn edge_law<T: Real>(&self, e: usize) -> Vec<T> {
        normalize(&self.edge[e], self.n)
    }

    pub fn vertex_entropy<T: Real>(&self, v: usize) -> T {
        plugin_from_counts(&self.vertex[v])
    }

    pub fn edge_entropy<T: Real>(&self, e: usize) -> T {
        plugin_from_counts(&self.edge[e])
    }

    /// Whether every edge histogram has the endpoint histograms as marginals.
    pub fn marginals_consistent(&self, lift: &LiftGraph) -> bool {
        let m = self.alphabet as usize;
        lift.base().edges().iter().all(|e| {
            let h = &self.edge[e.id];
            (0..m).all(|a| (0..m).map(|b| h[a * m + b]).sum::<u64>() == self.vertex[e.u][a])
                && (0..m).all(|b| (0..m).map(|a| h[a * m + b]).sum::<u64>() == self.vertex[e.v][b])
        })
    }
}

fn normalize<T: Real>(counts: &[u64], n: usize) -> Vec<T> {
    let total = T::from_usize(n).unwrap();
    counts.iter().map(|&c| T::from_u64(c).unwrap() / total).collect()
}

/// Exact local statistics of a coloring.
pub fn local_stats(lift: &LiftGraph, c: &Coloring) -> Result<LocalStats, LiftError> {
    if c.len() != lift.vertex_count() {
        return Err(LiftError::ColoringSize {
            expected: lift.vertex_count(),
            found: c.len(),
        });
    }
    let n = lift.fold();
    let m = c.alphabet() as usize;
    let g = lift.base();
    let vertex = (0..g.vertex_count())
        .map(|v| {
            let mut h = vec![0u64; m];
            for i in 0..n {
                h[c.state(v * n + i) as usize] += 1;
            }
            h
        })
        .collect();
    let edge = (0..g.edge_count())
        .map(|e| {
            let mut h = vec![0u64; m * m];
            for i in 0..n {
                let (a, b) = lift.edge_endpoints(e * n + i);
                h[c.state(a) as usize * m + c.state(b) as usize] += 1;
            }
            h
        })
        .collect();
    Ok(LocalStats {
        n,
        alphabet: c.alphabet(),
        vertex,
        edge,
    })
}

/// Plug-in entropy estimate with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeEstimate<T> {
    pub entropy: T,
    pub std_error: T,
    pub samples: usize,
}

const TASK_SAMPLES: usize = 4096;

/// Hull of a type, rooted at its first point, as breadth-first
/// `(node, parent index)` lists plus the position of each point.
struct Template {
    parent: Vec<usize>,
    children: Vec<usize>,
    points: Vec<usize>,
}

fn template(t: &SubsetType) -> Template {
    let hull = t.tree().hull();
    let root = hull.marked()[0];
    let mut nodes = vec![root];
    let mut parent = vec![usize::MAX];
    let mut index = vec![usize::MAX; hull.node_count()];
    index[root] = 0;
    let mut next = 0;
    while next < nodes.len() {
        let x = nodes[next];
        for &y in hull.neighbors(x) {
            if index[y] == usize::MAX {
                index[y] = nodes.len();
                nodes.push(y);
                parent.push(next);
            }
        }
        next += 1;
    }
    let mut children = vec![0; nodes.len()];
    for &p in parent.iter().skip(1) {
        children[p] += 1;
    }
    Template {
        parent,
        children,
        points: hull.marked().iter().map(|&m| index[m]).collect(),
    }
}

/// Samples embeddings of `t` into the lift at roots whose radius-`diam(t)`
/// neighborhood is a tree, and returns the plug-in entropy of the joint
/// colors. Non-nice roots are rejected; after a bounded number of attempts
/// the shortfall is reported.
pub fn estimate_type_entropy<T: Real>(
    lift: &LiftGraph,
    c: &Coloring,
    t: &SubsetType,
    samples: usize,
    seed: u64,
) -> Result<TypeEstimate<T>, LiftError> {
    let d = t.d();
    if lift.base().regular_degree() != Some(d) {
        return Err(LiftError::NotRegular(d));
    }
    if c.len() != lift.vertex_count() {
        return Err(LiftError::ColoringSize {
            expected: lift.vertex_count(),
            found: c.len(),
        });
    }
    let tpl = template(t);
    let r = t.diameter() as usize;
    let tasks = samples.div_ceil(TASK_SAMPLES);
    let parts: Vec<(HashMap<Vec<u32>, u64>, usize)> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let want = TASK_SAMPLES.min(samples - task * TASK_SAMPLES);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(task as u64);
            let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
            let mut got = 0;
            let mut image = vec![0usize; tpl.parent.len()];
            let mut free = Vec::with_capacity(d);
            for _ in 0..(20 * want + 100) {
                if got == want {
                    break;
                }
                let x = rng.gen_range(0..lift.base().vertex_count()) * lift.fold()
                    + rng.gen_range(0..lift.fold());
                if !lift.is_vertex_nice(x, r) {
                    continue;
                }
                image[0] = x;
                let mut k = 1;
                for node in 0..tpl.parent.len() {
                    if tpl.children[node] == 0 {
                        continue;
                    }
                    let up = (node > 0).then(|| image[tpl.parent[node]]);
                    free.clear();
                    free.extend(lift.neighbors(image[node]).map(|(_, y)| y).filter(|&y| Some(y) != up));
                    free.shuffle(&mut rng);
                    // children of `node` occupy consecutive breadth-first slots
                    for &y in free.iter().take(tpl.children[node]) {
                        image[k] = y;
                        k += 1;
                    }
                }
                let key: Vec<u32> = tpl.points.iter().map(|&p| c.state(image[p])).collect();
                *counts.entry(key).or_insert(0) += 1;
                got += 1;
            }
            (counts, got)
        })
        .collect();
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut achieved = 0;
    for (part, got) in parts {
        achieved += got;
        for (k, v) in part {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    if achieved < samples {
        return Err(LiftError::TooFewNicePositions {
            achieved,
            requested: samples,
        });
    }
    let hist: Vec<u64> = counts.into_values().collect();
    let entropy: T = plugin_from_counts(&hist);
    let total = T::from_usize(achieved).unwrap();
    let second: T = hist
        .iter()
        .map(|&k| {
            let p = T::from_u64(k).unwrap() / total;
            p * p.ln() * p.ln()
        })
        .sum();
    let var = (second - entropy * entropy).max(T::zero()) / total;
    Ok(TypeEstimate {
        entropy,
        std_error: var.sqrt(),
        samples: achieved,
    })
}

/// `Σ coef · h(type)` over the terms of `ineq`.
pub fn evaluate_slack<T: Real>(
    ineq: &EntropyInequality,
    mut h: impl FnMut(&SubsetType) -> Option<T>,
) -> Result<T, LiftError> {
    let mut total = T::zero();
    for (t, c) in ineq.terms() {
        let value = h(t).ok_or_else(|| LiftError::MissingType(type_name(t)))?;
        total = total + T::lit(rational_to_f64(c)) * value;
    }
    Ok(total)
}

/// `(Σ_{c>0} c·|B_r(t)|) / (Σ_{c<0} |c|·|B_r(t)|)`, the ratio of the two
/// sides when every set `V` has entropy proportional to `|B_r(V)|`.
pub fn sharpness_ratio(ineq: &EntropyInequality, r: usize) -> Result<BigRational, LiftError> {
    let mut pos = BigRational::zero();
    let mut neg = BigRational::zero();
    for (t, c) in ineq.terms() {
        let size = BigRational::from_integer(BigInt::from(t.ball_size(r)));
        if c.is_positive() {
            pos += c * size;
        } else {
            neg += -c * size;
        }
    }
    if pos.is_zero() || neg.is_zero() {
        return Err(LiftError::OneSided);
    }
    Ok(pos / neg)
}
