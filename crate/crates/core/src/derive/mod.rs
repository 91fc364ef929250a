//! Inequalities from a regular base graph with walks attached to its
//! vertices, plus blow-ups and random lifts of base graphs.

mod builtin;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{reduce, BaseGraph, Edge, GraphError, Walk, WalkAssignment};
use crate::inequality::{EntropyInequality, InequalityError};
use crate::lift::{random_permutations, LiftGraph};
use crate::types::{MarkedTree, SubsetType, TypeError};

pub use builtin::{builtin, known_inequality, Construction, Derivation, KNOWN_INEQUALITIES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("base graph is not regular")]
    NotRegular,
    #[error("base graph has degree {0}; at least 3 is required")]
    DegreeTooSmall(usize),
    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),
    #[error("{0}")]
    Parameter(String),
    #[error("no connected lift found after {0} attempts")]
    LiftBudget(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
}

const LIFT_ATTEMPTS: usize = 1000;

fn check_regular(g: &BaseGraph) -> Result<usize, DeriveError> {
    let d = g.regular_degree().ok_or(DeriveError::NotRegular)?;
    if d < 3 {
        return Err(DeriveError::DegreeTooSmall(d));
    }
    Ok(d)
}

/// Type of a finite set given as reduced edge words read from a common
/// root in the covering tree. Equal words name the same vertex.
fn type_of_words<'a>(d: usize, words: impl IntoIterator<Item = &'a [usize]>) -> Result<SubsetType, TypeError> {
    let mut tree = MarkedTree::single();
    let mut child: HashMap<(usize, usize), usize> = HashMap::new();
    let mut marked = Vec::new();
    for word in words {
        let mut node = 0;
        for &e in word {
            node = match child.get(&(node, e)) {
                Some(&c) => c,
                None => {
                    let c = tree.add_node(node);
                    child.insert((node, e), c);
                    c
                }
            };
        }
        if !marked.contains(&node) {
            marked.push(node);
        }
    }
    tree.set_marked(marked);
    SubsetType::from_tree(d, &tree)
}

/// Type of the lifted endpoints of the walks at `v`.
pub fn vertex_type(g: &BaseGraph, w: &WalkAssignment, v: usize) -> Result<SubsetType, DeriveError> {
    let d = check_regular(g)?;
    if v >= g.vertex_count() {
        return Err(GraphError::NoSuchVertex(v).into());
    }
    let words: Vec<Vec<usize>> = w.at(v).iter().map(|x| reduce(&x.steps)).collect();
    Ok(type_of_words(d, words.iter().map(Vec::as_slice))?)
}

/// Type of the lifted endpoints of the walks at both ends of edge `e`, the
/// two lifted starts being joined by a lift of `e`.
pub fn edge_type(g: &BaseGraph, w: &WalkAssignment, e: usize) -> Result<SubsetType, DeriveError> {
    let d = check_regular(g)?;
    let &Edge { id, u, v } = g.edge(e)?;
    let mut words: Vec<Vec<usize>> = w.at(u).iter().map(|x| reduce(&x.steps)).collect();
    for x in w.at(v) {
        let mut seq = Vec::with_capacity(x.steps.len() + 1);
        seq.push(id);
        seq.extend_from_slice(&x.steps);
        words.push(reduce(&seq));
    }
    Ok(type_of_words(d, words.iter().map(Vec::as_slice))?)
}

/// `Σ_e H(type_e) - (d-1) Σ_v H(type_v) ≥ 0`.
pub fn derive_inequality(g: &BaseGraph, w: &WalkAssignment) -> Result<EntropyInequality, DeriveError> {
    let d = check_regular(g)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let minus = BigRational::from_integer(BigInt::from(1) - BigInt::from(d));
    let mut terms = Vec::with_capacity(g.vertex_count() + g.edge_count());
    for e in g.edges() {
        terms.push((edge_type(g, w, e.id)?, one.clone()));
    }
    for v in 0..g.vertex_count() {
        terms.push((vertex_type(g, w, v)?, minus.clone()));
    }
    Ok(EntropyInequality::new(d, terms)?)
}

/// Replaces every type `t` by `B_k(t)`.
pub fn blow_up(ineq: &EntropyInequality, k: usize) -> EntropyInequality {
    ineq.map_types(|t| t.ball(k))
}

/// Extends every walk by every non-backtracking walk of length at most `k`
/// from its endpoint. Deriving from the result gives the blow-up of the
/// original derivation.
pub fn blow_up_walks(g: &BaseGraph, w: &WalkAssignment, k: usize) -> Result<WalkAssignment, DeriveError> {
    let mut lists = Vec::with_capacity(g.vertex_count());
    for (v, walks) in w.iter() {
        let mut out: Vec<Walk> = Vec::new();
        for x in walks {
            let end = g.traverse(v, &x.steps)?;
            for tail in g.enumerate_nb_walks(end, k)? {
                let mut seq = x.steps.clone();
                seq.extend_from_slice(&tail.steps);
                let walk = Walk::new(v, reduce(&seq));
                if !out.contains(&walk) {
                    out.push(walk);
                }
            }
        }
        lists.push(out);
    }
    Ok(WalkAssignment::new(g, lists)?)
}

/// A connected `n`-fold lift of `g` from uniformly random per-edge
/// permutations. Lift vertex `(v, i)` has id `v·n + i`; the lift of edge
/// `e = (u, v)` at sheet `i` has id `e·n + i` and joins `(u, σ_e(i))` to
/// `(v, i)`.
pub fn lift_base(g: &BaseGraph, n: usize, seed: u64) -> Result<BaseGraph, DeriveError> {
    if n == 0 {
        return Err(DeriveError::Parameter("lift fold must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..LIFT_ATTEMPTS {
        let perms = random_permutations(&mut rng, g.edge_count(), n);
        let lift = LiftGraph::new(g.clone(), n, perms).expect("permutations are well formed");
        if lift.is_connected() {
            return Ok(lift.to_base_graph()?);
        }
    }
    Err(DeriveError::LiftBudget(LIFT_ATTEMPTS))
}
