use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{LiftError, LiftGraph};

/// A state in `0..alphabet` for every lift vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    states: Vec<u32>,
    alphabet: u32,
}

impl Coloring {
    pub fn new(states: Vec<u32>, alphabet: u32) -> Self {
        assert!(
            states.iter().all(|&s| s < alphabet),
            "state outside alphabet of size {alphabet}"
        );
        Self { states, alphabet }
    }

    pub fn constant(len: usize, state: u32, alphabet: u32) -> Self {
        Self::new(vec![state; len], alphabet)
    }

    pub fn state(&self, x: usize) -> u32 {
        self.states[x]
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// The labeled radius-`R` ball a rule sees. Node 0 is the root; nodes are
/// in breadth-first order.
#[derive(Debug, Clone)]
pub struct RootedBall {
    pub labels: Vec<u64>,
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
}

impl RootedBall {
    pub fn root_label(&self) -> u64 {
        self.labels[0]
    }

    pub fn children(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (x + 1..self.labels.len()).filter(move |&y| self.parent[y] == x)
    }
}

/// A finite-radius rule. `evaluate` must depend only on the labeled ball up
/// to root-preserving isomorphism. State 0 is the default for vertices
/// whose neighborhood is not a tree.
pub trait LocalRule: Sync {
    fn radius(&self) -> usize;
    fn alphabet(&self) -> u32;
    fn evaluate(&self, ball: &RootedBall) -> u32;
}

/// Rules with known laws on `T_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinRule {
    /// `1` iff the own label is in the upper half; radius 0.
    Bit,
    /// `1` iff the own label exceeds every neighbor's; radius 1.
    LocalMax,
    /// Sum of the own bit and the neighbors' bits mod 2; radius 1.
    Parity,
}

fn bit(label: u64) -> u32 {
    (label >> 63) as u32
}

impl BuiltinRule {
    pub const ALL: [BuiltinRule; 3] = [Self::Bit, Self::LocalMax, Self::Parity];

    pub fn parse(name: &str) -> Result<Self, LiftError> {
        match name {
            "bit" => Ok(Self::Bit),
            "local-max" => Ok(Self::LocalMax),
            "parity" => Ok(Self::Parity),
            other => Err(LiftError::UnknownRule(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bit => "bit",
            Self::LocalMax => "local-max",
            Self::Parity => "parity",
        }
    }

    /// Law of one vertex on `T_d`.
    pub fn tree_vertex_law(&self, d: usize) -> Vec<f64> {
        match self {
            Self::Bit | Self::Parity => vec![0.5, 0.5],
            Self::LocalMax => {
                let p = 1.0 / (d as f64 + 1.0);
                vec![1.0 - p, p]
            }
        }
    }

    /// Law of the pair of states at the ends of an edge of `T_d`, row-major.
    pub fn tree_edge_law(&self, d: usize) -> Vec<f64> {
        match self {
            Self::Bit | Self::Parity => vec![0.25; 4],
            Self::LocalMax => {
                let p = 1.0 / (d as f64 + 1.0);
                vec![1.0 - 2.0 * p, p, p, 0.0]
            }
        }
    }
}

impl LocalRule for BuiltinRule {
    fn radius(&self) -> usize {
        match self {
            Self::Bit => 0,
            Self::LocalMax | Self::Parity => 1,
        }
    }

    fn alphabet(&self) -> u32 {
        2
    }

    fn evaluate(&self, ball: &RootedBall) -> u32 {
        let root = ball.root_label();
        match self {
            Self::Bit => bit(root),
            Self::LocalMax => ball.children(0).all(|y| ball.labels[y] < root) as u32,
            Self::Parity => ball.children(0).fold(bit(root), |acc, y| acc ^ bit(ball.labels[y])),
        }
    }
}

/// One uniform 64-bit label per lift vertex, in id order.
pub(crate) fn iid_labels(count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Draws IID labels from `seed` and applies `rule` at every vertex whose
/// radius-`R` neighborhood is a tree; other vertices get state 0.
pub fn project_rule(lift: &LiftGraph, rule: &dyn LocalRule, seed: u64) -> Coloring {
    let labels = iid_labels(lift.vertex_count(), seed);
    project_rule_with_labels(lift, rule, &labels)
}

pub(crate) fn project_rule_with_labels(lift: &LiftGraph, rule: &dyn LocalRule, labels: &[u64]) -> Coloring {
    let r = rule.radius();
    let states = (0..lift.vertex_count())
        .into_par_iter()
        .map(|x| match lift.tree_ball(&[x], None, r) {
            Some(ball) => rule.evaluate(&RootedBall {
                labels: ball.nodes.iter().map(|&y| labels[y]).collect(),
                parent: ball.parent,
                depth: ball.depth,
            }),
            None => 0,
        })
        .collect();
    Coloring::new(states, rule.alphabet())
}
