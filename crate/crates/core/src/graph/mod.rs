//! Finite base graphs, non-backtracking walks and reduced-path arithmetic in
//! the universal covering tree.

mod text;

use std::collections::VecDeque;

use thiserror::Error;

pub use text::{parse_graph, write_graph, GraphFile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(usize),
    #[error("vertex ids are not dense: missing id {0}")]
    SparseVertexIds(usize),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(usize),
    #[error("edge ids are not dense: missing id {0}")]
    SparseEdgeIds(usize),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("edge {edge} is a loop at vertex {vertex}")]
    Loop { edge: usize, vertex: usize },
    #[error("vertex {0} has degree 0")]
    Isolated(usize),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("unknown vertex {0}")]
    NoSuchVertex(usize),
    #[error("unknown edge {0}")]
    NoSuchEdge(usize),
    #[error("walk is not traversable: edge {edge} is not incident to vertex {at}")]
    NotTraversable { at: usize, edge: usize },
    #[error("walk backtracks along edge {0}")]
    Backtracking(usize),
    #[error("walks start at {0} and {1}, expected a common start")]
    StartMismatch(usize, usize),
    #[error("bridge edge {bridge} does not join {from} and {to}")]
    BadBridge { bridge: usize, from: usize, to: usize },
    #[error("walk assigned to vertex {key} starts at {start}")]
    WalkKeyMismatch { key: usize, start: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: usize) -> Option<usize> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// Checks the base-graph invariants: dense unique ids, no loops, every vertex
/// of positive degree, connected.
pub fn validate_graph(vertices: &[usize], edges: &[Edge]) -> Result<(), GraphError> {
    if vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    let n = vertices.len();
    check_dense(vertices, GraphError::DuplicateVertex, GraphError::SparseVertexIds)?;
    let ids: Vec<usize> = edges.iter().map(|e| e.id).collect();
    check_dense(&ids, GraphError::DuplicateEdge, GraphError::SparseEdgeIds)?;
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        for x in [e.u, e.v] {
            if x >= n {
                return Err(GraphError::UnknownVertex {
                    edge: e.id,
                    vertex: x,
                });
            }
        }
        if e.u == e.v {
            return Err(GraphError::Loop {
                edge: e.id,
                vertex: e.u,
            });
        }
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    if let Some(v) = adj.iter().position(|a| a.is_empty()) {
        return Err(GraphError::Isolated(v));
    }
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !reached[y] {
                reached[y] = true;
                queue.push_back(y);
            }
        }
    }
    if let Some(v) = reached.iter().position(|&r| !r) {
        return Err(GraphError::Disconnected(v));
    }
    Ok(())
}

fn check_dense(
    ids: &[usize],
    duplicate: fn(usize) -> GraphError,
    sparse: fn(usize) -> GraphError,
) -> Result<(), GraphError> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(duplicate(w[0]));
    }
    match sorted.iter().enumerate().find(|(i, &id)| *i != id) {
        Some((missing, _)) => Err(sparse(missing)),
        None => Ok(()),
    }
}

/// A finite connected loopless multigraph with dense vertex and edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    n: usize,
    edges: Vec<Edge>,
    /// Incident `(edge id, neighbor)` pairs per vertex, sorted by edge id.
    adj: Vec<Vec<(usize, usize)>>,
}

impl BaseGraph {
    pub fn new(vertices: &[usize], edges: &[Edge]) -> Result<Self, GraphError> {
        validate_graph(vertices, edges)?;
        let n = vertices.len();
        let mut sorted = edges.to_vec();
        sorted.sort_by_key(|e| e.id);
        let mut adj = vec![Vec::new(); n];
        for e in &sorted {
            adj[e.u].push((e.id, e.v));
            adj[e.v].push((e.id, e.u));
        }
        Ok(Self {
            n,
            edges: sorted,
            adj,
        })
    }

    /// Builds a graph on vertices `0..n` whose edge ids follow slice order.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let vertices: Vec<usize> = (0..n).collect();
        let edges: Vec<Edge> = pairs
            .iter()
            .enumerate()
            .map(|(id, &(u, v))| Edge { id, u, v })
            .collect();
        Self::new(&vertices, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge, GraphError> {
        self.edges.get(id).ok_or(GraphError::NoSuchEdge(id))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// `Some(d)` if every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    fn step(&self, at: usize, edge: usize) -> Result<usize, GraphError> {
        let e = self.edge(edge)?;
        e.other(at)
            .ok_or(GraphError::NotTraversable { at, edge })
    }

    /// Endpoint of `steps` traversed from `start`.
    pub fn traverse(&self, start: usize, steps: &[usize]) -> Result<usize, GraphError> {
        if start >= self.n {
            return Err(GraphError::NoSuchVertex(start));
        }
        steps.iter().try_fold(start, |at, &e| self.step(at, e))
    }

    /// Deletes adjacent equal edge ids until none remain. The result is the
    /// geodesic in the covering tree between the lifted endpoints.
    pub fn reduce_walk(&self, start: usize, steps: &[usize]) -> Result<Vec<usize>, GraphError> {
        self.traverse(start, steps)?;
        Ok(reduce(steps))
    }

    /// Covering-tree distance between the lifted endpoints of two walks. With
    /// a bridge, `w2` is lifted from the neighbor of `w1`'s lifted start
    /// across that edge.
    pub fn walk_distance(
        &self,
        w1: &Walk,
        w2: &Walk,
        bridge: Option<usize>,
    ) -> Result<usize, GraphError> {
        let end1 = self.traverse(w1.start, &w1.steps)?;
        self.traverse(w2.start, &w2.steps)?;
        match bridge {
            None if w1.start != w2.start => {
                return Err(GraphError::StartMismatch(w1.start, w2.start))
            }
            Some(b) => {
                let e = self.edge(b)?;
                if e.other(w1.start) != Some(w2.start) {
                    return Err(GraphError::BadBridge {
                        bridge: b,
                        from: w1.start,
                        to: w2.start,
                    });
                }
            }
            None => {}
        }
        let mut seq: Vec<usize> = w1.steps.iter().rev().copied().collect();
        seq.extend(bridge);
        seq.extend_from_slice(&w2.steps);
        debug_assert!(self.traverse(end1, &seq).is_ok());
        Ok(reduce(&seq).len())
    }

    /// All non-backtracking walks from `v` of length at most `max_len`,
    /// ordered by length and then lexicographically by edge id.
    pub fn enumerate_nb_walks(&self, v: usize, max_len: usize) -> Result<Vec<Walk>, GraphError> {
        if v >= self.n {
            return Err(GraphError::NoSuchVertex(v));
        }
        let mut out = vec![Walk::empty(v)];
        let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), v)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (steps, at) in &frontier {
                for &(e, w) in &self.adj[*at] {
                    if steps.last() == Some(&e) {
                        continue;
                    }
                    let mut s = steps.clone();
                    s.push(e);
                    next.push((s, w));
                }
            }
            out.extend(next.iter().map(|(s, _)| Walk::new(v, s.clone())));
            frontier = next;
        }
        Ok(out)
    }
}

/// Free reduction of an edge-id word; cancels immediate backtracks.
pub fn reduce(steps: &[usize]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::with_capacity(steps.len());
    for &e in steps {
        if stack.last() == Some(&e) {
            stack.pop();
        } else {
            stack.push(e);
        }
    }
    stack
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    pub start: usize,
    pub steps: Vec<usize>,
}

impl Walk {
    pub fn new(start: usize, steps: Vec<usize>) -> Self {
        Self { start, steps }
    }

    pub fn empty(start: usize) -> Self {
        Self {
            start,
            steps: Vec::new(),
        }
    }

    pub fn is_non_backtracking(&self) -> bool {
        self.steps.windows(2).all(|w| w[0] != w[1])
    }
}

/// Ordered walk lists per vertex; order is significant downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkAssignment {
    walks: Vec<Vec<Walk>>,
}

impl WalkAssignment {
    /// Vertices with no listed walk receive the single empty walk.
    pub fn new(g: &BaseGraph, mut walks: Vec<Vec<Walk>>) -> Result<Self, GraphError> {
        walks.resize(g.vertex_count().max(walks.len()), Vec::new());
        if walks.len() > g.vertex_count() {
            return Err(GraphError::NoSuchVertex(g.vertex_count()));
        }
        for (v, list) in walks.iter_mut().enumerate() {
            if list.is_empty() {
                list.push(Walk::empty(v));
            }
            for w in list.iter() {
                if w.start != v {
                    return Err(GraphError::WalkKeyMismatch {
                        key: v,
                        start: w.start,
                    });
                }
                g.traverse(w.start, &w.steps)?;
                if let Some(pair) = w.steps.windows(2).find(|p| p[0] == p[1]) {
                    return Err(GraphError::Backtracking(pair[0]));
                }
            }
        }
        Ok(Self { walks })
    }

    /// Every vertex gets only its empty walk.
    pub fn trivial(g: &BaseGraph) -> Self {
        Self {
            walks: (0..g.vertex_count()).map(|v| vec![Walk::empty(v)]).collect(),
        }
    }

    pub fn at(&self, v: usize) -> &[Walk] {
        &self.walks[v]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[Walk])> {
        self.walks.iter().enumerate().map(|(v, w)| (v, w.as_slice()))
    }
}
