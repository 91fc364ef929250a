//! Named base-graph constructions and a catalog of known inequalities.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{derive_inequality, DeriveError};
use crate::graph::{BaseGraph, Walk, WalkAssignment};
use crate::inequality::EntropyInequality;
use crate::types::SubsetType;

/// A named construction of a base graph and walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Two vertices joined by `d` parallel edges, empty walks.
    EdgeVertex,
    /// Two-vertex multigraph; each vertex gets itself and its `e_1` step.
    PathEdge,
    /// Two-vertex multigraph; `u` gets the `i` steps along `e_1..e_i`.
    /// Yields `(d-i) H(F_{i+1}) ≥ (d-i-1) H(F_i) + (d-1) H(vertex)`.
    FlowerStep { i: usize },
    /// `d` copies of the radius-`k` ball glued along their boundary.
    Sphere { k: usize },
    /// Balls joined across their boundaries so that the roots end up at
    /// distance `k`.
    MutualInfo { k: usize },
    /// `K_{d+1}`: every vertex other than `0` steps to `0`.
    CompleteGraph,
}

/// Output of a construction: the base graph, its walks and the derived
/// inequality.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub graph: BaseGraph,
    pub walks: WalkAssignment,
    pub inequality: EntropyInequality,
}

impl Construction {
    /// Looks up a construction by name; `i` and `k` are the parameters of
    /// `flower` and of `sphere` / `mutual_info` respectively.
    pub fn parse(name: &str, i: Option<usize>, k: Option<usize>) -> Result<Self, DeriveError> {
        let need = |p: Option<usize>, what: &str| {
            p.ok_or_else(|| DeriveError::Parameter(format!("`{name}` needs parameter {what}")))
        };
        Ok(match name {
            "edge_vertex" => Self::EdgeVertex,
            "path_edge" => Self::PathEdge,
            "flower" => Self::FlowerStep { i: need(i, "i")? },
            "sphere" => Self::Sphere { k: need(k, "k")? },
            "mutual_info" => Self::MutualInfo { k: need(k, "k")? },
            "complete_graph" => Self::CompleteGraph,
            other => return Err(DeriveError::UnknownConstruction(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::EdgeVertex => "edge_vertex",
            Self::PathEdge => "path_edge",
            Self::FlowerStep { .. } => "flower",
            Self::Sphere { .. } => "sphere",
            Self::MutualInfo { .. } => "mutual_info",
            Self::CompleteGraph => "complete_graph",
        }
    }

    fn check(&self, d: usize) -> Result<(), DeriveError> {
        if d < 3 {
            return Err(DeriveError::DegreeTooSmall(d));
        }
        match *self {
            Self::FlowerStep { i } if i == 0 || i >= d => Err(DeriveError::Parameter(format!(
                "flower step needs 1 <= i < d, got i = {i}"
            ))),
            Self::Sphere { k } | Self::MutualInfo { k } if k == 0 => {
                Err(DeriveError::Parameter("radius k must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// The closed-form inequality the construction is expected to produce.
    pub fn target(&self, d: usize) -> Result<EntropyInequality, DeriveError> {
        self.check(d)?;
        let di = d as i64;
        let vertex = SubsetType::vertex(d)?;
        let ineq = match *self {
            Self::EdgeVertex => EntropyInequality::from_integers(
                d,
                [(SubsetType::edge(d)?, di), (vertex, -2 * (di - 1))],
            )?,
            Self::PathEdge => EntropyInequality::from_integers(
                d,
                [(SubsetType::path(d, 3)?, di - 1), (SubsetType::edge(d)?, 3 - 2 * di)],
            )?,
            Self::FlowerStep { i } => {
                let ii = i as i64;
                EntropyInequality::from_integers(
                    d,
                    [
                        (SubsetType::flower(d, i + 1)?, di - ii),
                        (SubsetType::flower(d, i)?, ii + 1 - di),
                        (vertex, 1 - di),
                    ],
                )?
            }
            Self::Sphere { k } => EntropyInequality::new(
                d,
                [
                    (SubsetType::sphere(d, k)?, rational(1, 1)),
                    (vertex, -rational((di - 1).pow(k as u32), 1)),
                ],
            )?,
            Self::MutualInfo { k } => EntropyInequality::new(
                d,
                [
                    (SubsetType::pair(d, k)?, rational(1, 1)),
                    (vertex, mutual_info_bound(d, k) - rational(2, 1)),
                ],
            )?,
            Self::CompleteGraph => EntropyInequality::new(
                d,
                [
                    (SubsetType::pair(d, 3)?, rational(1, 1)),
                    (vertex, rational(2, di * (di - 1)) - rational(2, 1)),
                ],
            )?,
        };
        Ok(ineq.with_name(self.label()))
    }

    fn label(&self) -> String {
        match *self {
            Self::FlowerStep { i } => format!("flower_step{i}"),
            Self::Sphere { k } => format!("sphere{k}"),
            Self::MutualInfo { k } => format!("mutual_info{k}"),
            _ => self.name().to_string(),
        }
    }
}

fn rational(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Upper bound on `I(Y_u; Y_v) / H(vertex)` at distance `k`.
fn mutual_info_bound(d: usize, k: usize) -> BigRational {
    let l = (k / 2) as u32;
    let dm = d as i64 - 1;
    if k % 2 == 1 {
        rational(2, d as i64 * dm.pow(l))
    } else {
        rational(1, dm.pow(l))
    }
}

/// Incremental edge list with dense ids.
#[derive(Default)]
struct Builder {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

/// One copy of the radius-`l` ball inside a [`Builder`].
struct BallCopy {
    /// Global vertex ids in breadth-first order; index 0 is the root.
    nodes: Vec<usize>,
    level: Vec<usize>,
    /// Local `(edge id, neighbor)` lists inside the copy.
    adj: Vec<Vec<(usize, usize)>>,
}

impl BallCopy {
    fn boundary(&self, l: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.level[x] == l).collect()
    }

    /// Edge path inside the copy from local `from` to every local node.
    fn paths_from(&self, from: usize) -> Vec<Vec<usize>> {
        let mut paths: Vec<Option<Vec<usize>>> = vec![None; self.nodes.len()];
        paths[from] = Some(Vec::new());
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &(e, y) in &self.adj[x] {
                if paths[y].is_none() {
                    let mut p = paths[x].clone().unwrap();
                    p.push(e);
                    paths[y] = Some(p);
                    queue.push_back(y);
                }
            }
        }
        paths.into_iter().map(Option::unwrap).collect()
    }
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, u: usize, v: usize) -> usize {
        self.pairs.push((u, v));
        self.pairs.len() - 1
    }

    /// Adds a copy of the radius-`l` ball of `T_d`. When `boundary` is
    /// given, its level-`l` vertices reuse those ids in order.
    fn ball(&mut self, d: usize, l: usize, boundary: Option<&[usize]>) -> BallCopy {
        let mut shared = boundary.map(|b| b.iter().copied());
        let mut fresh = |b: &mut Self, level: usize| match (&mut shared, level == l) {
            (Some(it), true) => it.next().expect("boundary list too short"),
            _ => b.vertex(),
        };
        let root = fresh(self, 0);
        let mut copy = BallCopy {
            nodes: vec![root],
            level: vec![0],
            adj: vec![Vec::new()],
        };
        let mut x = 0;
        while x < copy.nodes.len() {
            if copy.level[x] < l {
                let kids = if copy.level[x] == 0 { d } else { d - 1 };
                for _ in 0..kids {
                    let level = copy.level[x] + 1;
                    let global = fresh(self, level);
                    let e = self.edge(copy.nodes[x], global);
                    let local = copy.nodes.len();
                    copy.nodes.push(global);
                    copy.level.push(level);
                    copy.adj.push(vec![(e, x)]);
                    copy.adj[x].push((e, local));
                }
            }
            x += 1;
        }
        copy
    }

    fn finish(self, walks: Vec<Vec<Walk>>) -> Result<(BaseGraph, WalkAssignment), DeriveError> {
        let g = BaseGraph::from_pairs(self.n, &self.pairs)?;
        let w = WalkAssignment::new(&g, walks)?;
        Ok((g, w))
    }
}

fn two_vertex(d: usize, walks: Vec<Vec<Walk>>) -> Result<(BaseGraph, WalkAssignment), DeriveError> {
    let g = BaseGraph::from_pairs(2, &vec![(0, 1); d])?;
    let w = WalkAssignment::new(&g, walks)?;
    Ok((g, w))
}

fn sphere_graph(d: usize, k: usize) -> Result<(BaseGraph, WalkAssignment), DeriveError> {
    let mut b = Builder::default();
    let first = b.ball(d, k, None);
    let boundary: Vec<usize> = first.boundary(k).iter().map(|&x| first.nodes[x]).collect();
    let mut copies = vec![first];
    for _ in 1..d {
        copies.push(b.ball(d, k, Some(&boundary)));
    }
    let mut walks = vec![Vec::new(); b.n];
    for copy in &copies {
        let ends = copy.boundary(k);
        for x in 0..copy.nodes.len() {
            if copy.level[x] == k {
                continue;
            }
            let paths = copy.paths_from(x);
            let v = copy.nodes[x];
            walks[v] = ends.iter().map(|&y| Walk::new(v, paths[y].clone())).collect();
        }
    }
    b.finish(walks)
}

/// Joins boundary stubs of `big` to those of `small` in sorted order; each
/// boundary vertex needs `d` minus its in-copy degree.
fn match_boundaries(b: &mut Builder, d: usize, big: &[(usize, usize)], small: &[(usize, usize)]) {
    let stubs = |side: &[(usize, usize)]| -> Vec<usize> {
        let mut out: Vec<usize> = side
            .iter()
            .flat_map(|&(v, deg)| std::iter::repeat_n(v, d - deg))
            .collect();
        out.sort_unstable();
        out
    };
    let (a, c) = (stubs(big), stubs(small));
    debug_assert_eq!(a.len(), c.len());
    for (u, v) in a.into_iter().zip(c) {
        b.edge(u, v);
    }
}

fn boundary_with_degree(copy: &BallCopy, l: usize) -> Vec<(usize, usize)> {
    copy.boundary(l)
        .into_iter()
        .map(|x| (copy.nodes[x], copy.adj[x].len()))
        .collect()
}

fn mutual_info_graph(d: usize, k: usize) -> Result<(BaseGraph, WalkAssignment), DeriveError> {
    let l = k / 2;
    let mut b = Builder::default();
    let mut copies = Vec::new();
    if k % 2 == 1 {
        let x = b.ball(d, l, None);
        let y = b.ball(d, l, None);
        match_boundaries(&mut b, d, &boundary_with_degree(&x, l), &boundary_with_degree(&y, l));
        copies.push(x);
        copies.push(y);
    } else {
        let big = b.ball(d, l, None);
        let mut small_side = Vec::new();
        for _ in 1..d {
            let s = b.ball(d, l - 1, None);
            small_side.extend(boundary_with_degree(&s, l - 1));
            copies.push(s);
        }
        match_boundaries(&mut b, d, &boundary_with_degree(&big, l), &small_side);
        copies.push(big);
    }
    let mut walks = vec![Vec::new(); b.n];
    for copy in &copies {
        let paths = copy.paths_from(0);
        for (x, path) in paths.into_iter().enumerate() {
            let v = copy.nodes[x];
            let mut steps = path;
            steps.reverse();
            walks[v] = vec![Walk::new(v, steps)];
        }
    }
    b.finish(walks)
}

fn complete_graph(d: usize) -> Result<(BaseGraph, WalkAssignment), DeriveError> {
    let mut pairs = Vec::new();
    for u in 0..=d {
        for v in u + 1..=d {
            pairs.push((u, v));
        }
    }
    let g = BaseGraph::from_pairs(d + 1, &pairs)?;
    // edge (0, v) has id v - 1
    let walks = (0..=d)
        .map(|v| if v == 0 { Vec::new() } else { vec![Walk::new(v, vec![v - 1])] })
        .collect();
    let w = WalkAssignment::new(&g, walks)?;
    Ok((g, w))
}

/// Builds the base graph and walks of a construction and derives its
/// inequality.
pub fn builtin(c: Construction, d: usize) -> Result<Derivation, DeriveError> {
    c.check(d)?;
    let (graph, walks) = match c {
        Construction::EdgeVertex => two_vertex(d, Vec::new())?,
        Construction::PathEdge => two_vertex(
            d,
            vec![
                vec![Walk::empty(0), Walk::new(0, vec![0])],
                vec![Walk::empty(1), Walk::new(1, vec![0])],
            ],
        )?,
        Construction::FlowerStep { i } => {
            two_vertex(d, vec![(0..i).map(|e| Walk::new(0, vec![e])).collect()])?
        }
        Construction::Sphere { k } => sphere_graph(d, k)?,
        Construction::MutualInfo { k } => mutual_info_graph(d, k)?,
        Construction::CompleteGraph => complete_graph(d)?,
    };
    let inequality = derive_inequality(&graph, &walks)?.with_name(c.label());
    Ok(Derivation {
        graph,
        walks,
        inequality,
    })
}

/// Names accepted by [`known_inequality`] without a numeric suffix.
pub const KNOWN_INEQUALITIES: &[&str] = &[
    "edge_vertex",
    "star_edge",
    "path_edge",
    "flower",
    "sphere2",
    "mutual_info3",
    "complete_graph",
];

fn suffix(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// Catalog lookup. Besides [`KNOWN_INEQUALITIES`] this accepts
/// `flower<i>` (`1 <= i <= d`), `sphere<k>` and `mutual_info<k>`.
///
/// `star_edge`, `H(star) ≥ (d/2) H(edge)`, is included as a known result;
/// the flower closed forms follow from the flower steps by induction.
pub fn known_inequality(name: &str, d: usize) -> Result<EntropyInequality, DeriveError> {
    if d < 3 {
        return Err(DeriveError::DegreeTooSmall(d));
    }
    let di = d as i64;
    let ineq = match name {
        "edge_vertex" => Construction::EdgeVertex.target(d)?,
        "path_edge" => Construction::PathEdge.target(d)?,
        "complete_graph" => Construction::CompleteGraph.target(d)?,
        "star_edge" => EntropyInequality::from_integers(
            d,
            [(SubsetType::star(d)?, 2), (SubsetType::edge(d)?, -di)],
        )?,
        "flower" => return known_inequality(&format!("flower{d}"), d).map(|i| i.with_name("flower")),
        _ => {
            if let Some(i) = suffix(name, "flower") {
                if i == 0 || i > d {
                    return Err(DeriveError::Parameter(format!("flower size {i} outside 1..={d}")));
                }
                let ii = i as i64;
                EntropyInequality::from_integers(
                    d,
                    [
                        (SubsetType::flower(d, i)?, di - 1),
                        (SubsetType::vertex(d)?, -(ii * di - 2 * ii + 1)),
                    ],
                )?
            } else if let Some(k) = suffix(name, "sphere") {
                Construction::Sphere { k }.target(d)?
            } else if let Some(k) = suffix(name, "mutual_info") {
                Construction::MutualInfo { k }.target(d)?
            } else {
                return Err(DeriveError::UnknownConstruction(name.to_string()));
            }
        }
    };
    Ok(ineq.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructions_meet_targets() {
        for d in 3..=5 {
            let mut all = vec![
                Construction::EdgeVertex,
                Construction::PathEdge,
                Construction::CompleteGraph,
            ];
            all.extend((1..d).map(|i| Construction::FlowerStep { i }));
            all.extend((1..=2).map(|k| Construction::Sphere { k }));
            all.extend((1..=4).map(|k| Construction::MutualInfo { k }));
            for c in all {
                let got = builtin(c, d).unwrap();
                assert_eq!(got.graph.regular_degree(), Some(d), "{c:?} d={d}");
                assert_eq!(got.inequality, c.target(d).unwrap(), "{c:?} d={d}");
            }
        }
    }

    #[test]
    fn sphere_graph_shape() {
        let (g, _) = sphere_graph(3, 3).unwrap();
        // three balls of 22 vertices sharing 12 boundary vertices
        assert_eq!(g.vertex_count(), 3 * 10 + 12);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn renders_like_the_literature() {
        let pe = builtin(Construction::PathEdge, 3).unwrap().inequality;
        assert_eq!(pe.render(), "H(P3) >= 3/2 H(edge)");
        let s2 = builtin(Construction::Sphere { k: 2 }, 3).unwrap().inequality;
        assert_eq!(s2.render(), "H(S2) >= 4 H(vertex)");
        let mi = builtin(Construction::MutualInfo { k: 3 }, 3).unwrap().inequality;
        assert_eq!(mi.render(), "H(dist3) >= 5/3 H(vertex)");
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            builtin(Construction::FlowerStep { i: 3 }, 3),
            Err(DeriveError::Parameter(_))
        ));
        assert!(matches!(builtin(Construction::Sphere { k: 0 }, 3), Err(DeriveError::Parameter(_))));
        assert_eq!(builtin(Construction::EdgeVertex, 2).unwrap_err(), DeriveError::DegreeTooSmall(2));
        assert!(matches!(
            Construction::parse("nope", None, None),
            Err(DeriveError::UnknownConstruction(_))
        ));
        assert!(matches!(known_inequality("flower9", 3), Err(DeriveError::Parameter(_))));
    }

    #[test]
    fn catalog_names_resolve() {
        for d in 3..=5 {
            for name in KNOWN_INEQUALITIES {
                assert_eq!(known_inequality(name, d).unwrap().name(), Some(*name));
            }
        }
        assert_eq!(known_inequality("flower", 3).unwrap(), known_inequality("sphere1", 3).unwrap());
    }
}
