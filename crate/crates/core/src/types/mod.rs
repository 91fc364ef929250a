//! Finite vertex sets of `T_d` up to tree automorphism.
//!
//! A [`SubsetType`] stores only the marked points, as a canonical pairwise
//! distance matrix. The Steiner tree spanned by the points is rebuilt on
//! demand whenever a geometric operation needs it.
//!
//! The canonical ordering comes from the rooted, marked Steiner hull: the
//! hull is rooted at its center (or central edge), subtrees are ordered by
//! their parenthesis encoding, and the marked points are listed in preorder.
//! Isomorphic marked hulls, which is exactly `Aut(T_d)`-equivalence of the
//! point sets, therefore produce identical matrices.

mod steiner;

use std::fmt;

use thiserror::Error;

pub(crate) use steiner::MarkedTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("tree degree {0} is below 3")]
    DegreeTooSmall(usize),
    #[error("empty point set")]
    Empty,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("distance matrix has nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("points {i} and {j} coincide (distance 0)")]
    Coincident { i: usize, j: usize },
    #[error("points ({i}, {j}, {k}) violate the triangle inequality or have odd perimeter")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("points ({i}, {j}, {k}, {l}) violate the four-point condition")]
    FourPoint { i: usize, j: usize, k: usize, l: usize },
    #[error("not a tree metric: reconstruction fails at points ({i}, {j})")]
    NotTreeMetric { i: usize, j: usize },
    #[error("Steiner tree has a vertex of degree {found}, exceeding d = {d}")]
    DegreeExceeded { found: usize, d: usize },
    #[error("parameter out of range: {0}")]
    Parameter(String),
}

/// `Aut(T_d)`-orbit of a finite vertex set of `T_d`.
///
/// Field order gives the derived `Ord` used to key inequality terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetType {
    d: usize,
    n: usize,
    dist: Vec<u32>,
}

impl fmt::Debug for SubsetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetType(d={}, n={}, {:?})", self.d, self.n, self.upper_triangle())
    }
}

fn check_d(d: usize) -> Result<(), TypeError> {
    if d < 3 {
        Err(TypeError::DegreeTooSmall(d))
    } else {
        Ok(())
    }
}

/// Validates a distance matrix as a tree metric realizable in `T_d` and
/// returns its canonical type.
pub fn type_from_distances(d: usize, dist: &[Vec<u32>]) -> Result<SubsetType, TypeError> {
    check_d(d)?;
    let n = dist.len();
    if n == 0 {
        return Err(TypeError::Empty);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(TypeError::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
    }
    for i in 0..n {
        if dist[i][i] != 0 {
            return Err(TypeError::NonzeroDiagonal(i));
        }
        for j in i + 1..n {
            if dist[i][j] != dist[j][i] {
                return Err(TypeError::NotSymmetric { i, j });
            }
            if dist[i][j] == 0 {
                return Err(TypeError::Coincident { i, j });
            }
        }
    }
    check_four_point(dist)?;
    let flat: Vec<u32> = dist.iter().flatten().copied().collect();
    let tree = MarkedTree::from_distances(n, &flat)?;
    SubsetType::from_tree(d, &tree)
}

fn check_four_point(dist: &[Vec<u32>]) -> Result<(), TypeError> {
    let n = dist.len();
    let at = |i: usize, j: usize| dist[i][j] as u64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (at(i, j), at(j, k), at(i, k));
                if a > b + c || b > a + c || c > a + b || (a + b + c) % 2 == 1 {
                    return Err(TypeError::Triangle { i, j, k });
                }
                for l in k + 1..n {
                    let mut sums = [
                        at(i, j) + at(k, l),
                        at(i, k) + at(j, l),
                        at(i, l) + at(j, k),
                    ];
                    sums.sort_unstable();
                    if sums[1] != sums[2] {
                        return Err(TypeError::FourPoint { i, j, k, l });
                    }
                }
            }
        }
    }
    Ok(())
}

impl SubsetType {
    /// Canonical type of the marked points of an explicit tree.
    pub(crate) fn from_tree(d: usize, tree: &MarkedTree) -> Result<Self, TypeError> {
        check_d(d)?;
        let hull = tree.hull();
        let found = hull.max_degree();
        if found > d {
            return Err(TypeError::DegreeExceeded { found, d });
        }
        let order = hull.canonical_order();
        let dist = hull.distance_matrix(&order);
        Ok(Self {
            d,
            n: order.len(),
            dist,
        })
    }

    /// Builds from a flattened upper-triangular distance list (row-major,
    /// `i < j`), as used by the inequality text format.
    pub fn from_upper_triangle(d: usize, n: usize, upper: &[u32]) -> Result<Self, TypeError> {
        if n == 0 {
            return Err(TypeError::Empty);
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(TypeError::Parameter(format!(
                "{} distances given for {n} points, expected {}",
                upper.len(),
                n * (n - 1) / 2
            )));
        }
        let mut m = vec![vec![0u32; n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = *it.next().unwrap();
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        type_from_distances(d, &m)
    }

    pub(crate) fn tree(&self) -> MarkedTree {
        MarkedTree::from_distances(self.n, &self.dist).expect("stored types are tree metrics")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of marked vertices.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }

    pub fn distance_matrix(&self) -> Vec<Vec<u32>> {
        self.dist.chunks(self.n).map(<[u32]>::to_vec).collect()
    }

    pub fn upper_triangle(&self) -> Vec<u32> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j))
            .collect()
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// True when the Steiner hull has no unmarked vertex.
    pub fn is_connected(&self) -> bool {
        self.tree().hull().node_count() == self.n
    }

    /// Type of `B_k(V)`.
    pub fn ball(&self, k: usize) -> SubsetType {
        if k == 0 {
            return self.clone();
        }
        let grown = self.tree().dilate(self.d, k);
        Self::from_tree(self.d, &grown).expect("dilation stays inside T_d")
    }

    /// `|B_k(V)|` for any realization `V`.
    pub fn ball_size(&self, k: usize) -> u64 {
        self.tree().ball_count(self.d, k)
    }

    pub fn vertex(d: usize) -> Result<Self, TypeError> {
        Self::from_tree(d, &MarkedTree::single())
    }

    pub fn edge(d: usize) -> Result<Self, TypeError> {
        Self::path(d, 1)
    }

    /// The vertices of a path with `m` edges.
    pub fn path(d: usize, m: usize) -> Result<Self, TypeError> {
        let tree = path_tree(m);
        let marked = (0..=m).collect();
        Self::from_tree(d, &with_marks(tree, marked))
    }

    /// Two vertices at distance `k >= 1`.
    pub fn pair(d: usize, k: usize) -> Result<Self, TypeError> {
        if k == 0 {
            return Err(TypeError::Parameter("pair distance must be positive".into()));
        }
        Self::from_tree(d, &with_marks(path_tree(k), vec![0, k]))
    }

    /// A vertex together with all `d` neighbors.
    pub fn star(d: usize) -> Result<Self, TypeError> {
        Ok(Self::vertex(d)?.ball(1))
    }

    /// `i` neighbors of a fixed vertex, `1 <= i <= d`.
    pub fn flower(d: usize, i: usize) -> Result<Self, TypeError> {
        check_d(d)?;
        if i == 0 || i > d {
            return Err(TypeError::Parameter(format!("flower size {i} outside 1..={d}")));
        }
        let mut t = MarkedTree::single();
        let leaves = (0..i).map(|_| t.add_node(0)).collect();
        t.set_marked(leaves);
        Self::from_tree(d, &t)
    }

    /// Vertices at distance exactly `k >= 1` from a fixed vertex.
    pub fn sphere(d: usize, k: usize) -> Result<Self, TypeError> {
        check_d(d)?;
        if k == 0 {
            return Err(TypeError::Parameter("sphere radius must be positive".into()));
        }
        let (tree, levels) = full_ball_tree(d, k);
        let marked = (0..tree.node_count()).filter(|&x| levels[x] == k).collect();
        Self::from_tree(d, &with_marks(tree, marked))
    }
}

fn path_tree(m: usize) -> MarkedTree {
    let mut t = MarkedTree::single();
    let mut last = 0;
    for _ in 0..m {
        last = t.add_node(last);
    }
    t
}

fn with_marks(mut t: MarkedTree, marked: Vec<usize>) -> MarkedTree {
    t.set_marked(marked);
    t
}

/// Explicit copy of `B_k` in `T_d` with the level of each node.
pub(crate) fn full_ball_tree(d: usize, k: usize) -> (MarkedTree, Vec<usize>) {
    let mut t = MarkedTree::single();
    let mut level = vec![0];
    let mut frontier = vec![0];
    for depth in 1..=k {
        let mut next = Vec::new();
        for &x in &frontier {
            let kids = if depth == 1 { d } else { d - 1 };
            for _ in 0..kids {
                let y = t.add_node(x);
                level.push(depth);
                next.push(y);
            }
        }
        frontier = next;
    }
    (t, level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u32]]) -> Vec<Vec<u32>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn basic_types() {
        let v = type_from_distances(3, &m(&[&[0]])).unwrap();
        assert_eq!(v, SubsetType::vertex(3).unwrap());
        let e = type_from_distances(3, &m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(e, SubsetType::edge(3).unwrap());
        let f = type_from_distances(3, &m(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]])).unwrap();
        assert_eq!(f, SubsetType::flower(3, 3).unwrap());
        assert_eq!(f, SubsetType::sphere(3, 1).unwrap());
        assert!(!f.is_connected());
        assert!(e.is_connected());
    }

    #[test]
    fn realizability_depends_on_d() {
        // four leaves around one center
        let four = m(&[&[0, 2, 2, 2], &[2, 0, 2, 2], &[2, 2, 0, 2], &[2, 2, 2, 0]]);
        assert_eq!(
            type_from_distances(3, &four),
            Err(TypeError::DegreeExceeded { found: 4, d: 3 })
        );
        assert!(type_from_distances(4, &four).is_ok());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert_eq!(
            type_from_distances(3, &m(&[&[0, 1], &[2, 0]])),
            Err(TypeError::NotSymmetric { i: 0, j: 1 })
        );
        assert_eq!(
            type_from_distances(3, &m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])),
            Err(TypeError::Triangle { i: 0, j: 1, k: 2 })
        );
        let c4 = m(&[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]);
        assert_eq!(
            type_from_distances(3, &c4),
            Err(TypeError::FourPoint { i: 0, j: 1, k: 2, l: 3 })
        );
        assert_eq!(
            type_from_distances(3, &m(&[&[0, 0], &[0, 0]])),
            Err(TypeError::Coincident { i: 0, j: 1 })
        );
        assert_eq!(type_from_distances(2, &m(&[&[0]])), Err(TypeError::DegreeTooSmall(2)));
    }

    #[test]
    fn relabeling_is_invisible() {
        // path 0-1-2-3 plus a leaf hanging off 1
        let a = m(&[
            &[0, 1, 2, 3, 2],
            &[1, 0, 1, 2, 1],
            &[2, 1, 0, 1, 2],
            &[3, 2, 1, 0, 3],
            &[2, 1, 2, 3, 0],
        ]);
        let perm = [3, 0, 4, 1, 2];
        let b: Vec<Vec<u32>> = (0..5)
            .map(|i| (0..5).map(|j| a[perm[i]][perm[j]]).collect())
            .collect();
        assert_eq!(type_from_distances(3, &a).unwrap(), type_from_distances(3, &b).unwrap());
    }

    #[test]
    fn ball_examples() {
        let v = SubsetType::vertex(3).unwrap();
        assert_eq!(v.ball(0), v);
        assert_eq!(v.ball(1), SubsetType::star(3).unwrap());
        assert_eq!(v.ball(1).len(), 4);
        assert_eq!(SubsetType::edge(3).unwrap().ball(1).len(), 6);
        assert_eq!(v.ball_size(1), 4);
        for r in 0..=8u32 {
            assert_eq!(v.ball_size(r as usize), 3 * 2u64.pow(r) - 2);
            assert_eq!(
                SubsetType::edge(3).unwrap().ball_size(r as usize),
                2 * (2u64.pow(r + 1) - 1)
            );
        }
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(SubsetType::sphere(3, 2).unwrap().len(), 6);
        assert_eq!(SubsetType::sphere(4, 3).unwrap().len(), 36);
    }

    #[test]
    fn ball_size_matches_materialized_ball() {
        let t = SubsetType::pair(3, 5).unwrap();
        for k in 0..4 {
            assert_eq!(t.ball(k).len() as u64, t.ball_size(k));
        }
    }
}
