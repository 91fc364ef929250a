//! Exact counts of colorings of random lifts with prescribed local
//! statistics, the matching exponent, and a brute-force cross-check.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::shannon_exact;
use crate::graph::BaseGraph;
use crate::inequality::parse_rational;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("color counts do not match the pair counts")]
    InconsistentCounts,
    #[error("{0}")]
    Collection(String),
    #[error("edge {0}: marginals differ from the endpoint distributions")]
    Marginal(usize),
    #[error("{0} enumeration cases exceed the limit")]
    TooLarge(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Largest number of (lift, coloring) pairs the brute force will visit.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

/// Vertex laws on `M` and edge laws on `M × M` (row-major, state at the
/// `u`-end first) whose edge marginals match the endpoint laws exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistentCollection {
    alphabet: usize,
    vertex: Vec<Vec<BigRational>>,
    edge: Vec<Vec<BigRational>>,
}

fn is_distribution(masses: &[BigRational]) -> bool {
    masses.iter().all(|q| !q.is_negative() && *q <= BigRational::one())
        && masses.iter().sum::<BigRational>() == BigRational::one()
}

impl ConsistentCollection {
    pub fn new(
        g: &BaseGraph,
        vertex: Vec<Vec<BigRational>>,
        edge: Vec<Vec<BigRational>>,
    ) -> Result<Self, OracleError> {
        let bad = |msg: String| Err(OracleError::Collection(msg));
        if vertex.len() != g.vertex_count() || edge.len() != g.edge_count() {
            return bad(format!(
                "collection has {} vertex and {} edge laws, graph has {} and {}",
                vertex.len(),
                edge.len(),
                g.vertex_count(),
                g.edge_count()
            ));
        }
        let m = vertex.first().map_or(0, Vec::len);
        if m == 0 {
            return bad("empty alphabet".into());
        }
        for (v, law) in vertex.iter().enumerate() {
            if law.len() != m || !is_distribution(law) {
                return bad(format!("vertex {v}: not a distribution on {m} states"));
            }
        }
        for e in g.edges() {
            let law = &edge[e.id];
            if law.len() != m * m || !is_distribution(law) {
                return bad(format!("edge {}: not a distribution on {m}x{m} pairs", e.id));
            }
            for a in 0..m {
                let row: BigRational = (0..m).map(|b| &law[a * m + b]).sum();
                let col: BigRational = (0..m).map(|b| &law[b * m + a]).sum();
                if row != vertex[e.u][a] || col != vertex[e.v][a] {
                    return Err(OracleError::Marginal(e.id));
                }
            }
        }
        Ok(Self {
            alphabet: m,
            vertex,
            edge,
        })
    }

    /// Edge laws are the products of the endpoint laws.
    pub fn product(g: &BaseGraph, vertex: Vec<Vec<BigRational>>) -> Result<Self, OracleError> {
        if vertex.len() != g.vertex_count() {
            return Err(OracleError::Collection("one law per vertex required".into()));
        }
        let edge = g
            .edges()
            .iter()
            .map(|e| {
                vertex[e.u]
                    .iter()
                    .flat_map(|a| vertex[e.v].iter().map(move |b| a * b))
                    .collect()
            })
            .collect();
        Self::new(g, vertex, edge)
    }

    /// Uniform product collection on `m` states.
    pub fn uniform(g: &BaseGraph, m: usize) -> Result<Self, OracleError> {
        let law = vec![BigRational::new(BigInt::one(), BigInt::from(m)); m];
        Self::product(g, vec![law; g.vertex_count()])
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn vertex_law(&self, v: usize) -> &[BigRational] {
        &self.vertex[v]
    }

    pub fn edge_law(&self, e: usize) -> &[BigRational] {
        &self.edge[e]
    }

    /// Reads `v <id> <masses...>` and `e <id> <masses...>` rows; masses are
    /// fractions or finite decimals and are kept exact.
    pub fn parse_tsv(g: &BaseGraph, input: &str) -> Result<Self, OracleError> {
        let mut vertex = vec![None; g.vertex_count()];
        let mut edge = vec![None; g.edge_count()];
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| OracleError::Parse { line: line_no, msg };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            let kind = toks.next().unwrap();
            let id: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("missing id".into()))?;
            let masses = toks
                .map(|t| parse_rational(t).ok_or_else(|| err(format!("invalid mass `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let slot = match kind {
                "v" => vertex.get_mut(id),
                "e" => edge.get_mut(id),
                other => return Err(err(format!("unknown record `{other}`"))),
            }
            .ok_or_else(|| err(format!("no {kind} with id {id} in graph")))?;
            if slot.replace(masses).is_some() {
                return Err(err(format!("duplicate {kind} {id}")));
            }
        }
        let missing = |what: &str, i: usize| OracleError::Collection(format!("no law for {what} {i}"));
        let vertex = vertex
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| missing("vertex", i)))
            .collect::<Result<Vec<_>, _>>()?;
        let edge = edge
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| missing("edge", i)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(g, vertex, edge)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let mut rows = |kind: &str, laws: &[Vec<BigRational>]| {
            for (i, law) in laws.iter().enumerate() {
                write!(out, "{kind}\t{i}").unwrap();
                for q in law {
                    write!(out, "\t{q}").unwrap();
                }
                out.push('\n');
            }
        };
        rows("v", &self.vertex);
        rows("e", &self.edge);
        out
    }

    /// `n · law` as integer counts, or `None` if some mass is not a
    /// multiple of `1/n`.
    fn scaled(law: &[BigRational], n: usize) -> Option<Vec<u64>> {
        let n = BigRational::from_integer(BigInt::from(n));
        law.iter()
            .map(|q| {
                let x = q * &n;
                x.is_integer().then(|| x.to_integer().to_u64()).flatten()
            })
            .collect()
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of bijections `L_v → L_u` (equivalently, permutations of one
/// `N`-set of sheets) that pair colors with the counts `k[a][b]`, given
/// `cu[a]` vertices of color `a` on one side and `cv[b]` of color `b` on the
/// other.
pub fn matching_count(cu: &[u64], cv: &[u64], k: &[Vec<u64>]) -> Result<BigUint, OracleError> {
    if k.len() != cu.len() || k.iter().any(|row| row.len() != cv.len()) {
        return Err(OracleError::InconsistentCounts);
    }
    let rows_ok = k.iter().zip(cu).all(|(row, &c)| row.iter().sum::<u64>() == c);
    let cols_ok = (0..cv.len()).all(|b| k.iter().map(|row| row[b]).sum::<u64>() == cv[b]);
    if !rows_ok || !cols_ok {
        return Err(OracleError::InconsistentCounts);
    }
    let mut count = BigUint::one();
    for (row, &c) in k.iter().zip(cu) {
        let denom = row.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        count *= factorial(c) / denom;
    }
    for &c in cv {
        count *= factorial(c);
    }
    Ok(count)
}

/// Expected number of colorings of a uniform random `n`-fold lift of `g`
/// whose vertex and edge statistics equal `mu` exactly.
pub fn expected_colorings(g: &BaseGraph, mu: &ConsistentCollection, n: usize) -> BigRational {
    let m = mu.alphabet;
    let mut vertex_counts = Vec::with_capacity(g.vertex_count());
    for law in &mu.vertex {
        match ConsistentCollection::scaled(law, n) {
            Some(c) => vertex_counts.push(c),
            None => return BigRational::zero(),
        }
    }
    let mut numer = BigUint::one();
    for counts in &vertex_counts {
        let denom = counts.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        numer *= factorial(n as u64) / denom;
    }
    let fact_n = factorial(n as u64);
    let mut denom = BigUint::one();
    for e in g.edges() {
        let Some(pairs) = ConsistentCollection::scaled(&mu.edge[e.id], n) else {
            return BigRational::zero();
        };
        let k: Vec<Vec<u64>> = pairs.chunks(m).map(<[u64]>::to_vec).collect();
        numer *= matching_count(&vertex_counts[e.u], &vertex_counts[e.v], &k)
            .expect("consistent collection has matching marginals");
        denom *= &fact_n;
    }
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `Σ_e H(μ_e) - Σ_v (deg v - 1) H(μ_v)`, the exponential growth rate of
/// [`expected_colorings`] in `n`.
pub fn rate<T: Real>(g: &BaseGraph, mu: &ConsistentCollection) -> T {
    let edges: T = mu.edge.iter().map(|law| shannon_exact::<T>(law)).sum();
    let vertices: T = (0..g.vertex_count())
        .map(|v| T::from_usize(g.degree(v) - 1).unwrap() * shannon_exact::<T>(&mu.vertex[v]))
        .sum();
    edges - vertices
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k % 2 == 0 { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// Enumerates every lift and every coloring and counts the matches; the
/// result divided by the number of lifts is the expectation.
pub fn brute_force_expected_colorings(
    g: &BaseGraph,
    mu: &ConsistentCollection,
    n: usize,
) -> Result<BigRational, OracleError> {
    let m = mu.alphabet;
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let fact = (1..=n).product::<usize>() as f64;
    let cases = (m as f64).powi((n * nv) as i32) * fact.powi(ne as i32);
    if cases > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge(cases));
    }
    let target_v: Option<Vec<Vec<u64>>> =
        mu.vertex.iter().map(|l| ConsistentCollection::scaled(l, n)).collect();
    let target_e: Option<Vec<Vec<u64>>> =
        mu.edge.iter().map(|l| ConsistentCollection::scaled(l, n)).collect();
    let (Some(target_v), Some(target_e)) = (target_v, target_e) else {
        return Ok(BigRational::zero());
    };
    // colorings are base-m numbers over the n·|V| lift vertices
    let total_colorings = m.pow((n * nv) as u32);
    let colorings: Vec<Vec<usize>> = (0..total_colorings)
        .map(|mut code| {
            (0..n * nv)
                .map(|_| {
                    let s = code % m;
                    code /= m;
                    s
                })
                .collect()
        })
        .filter(|c: &Vec<usize>| {
            (0..nv).all(|v| {
                let mut h = vec![0u64; m];
                for i in 0..n {
                    h[c[v * n + i]] += 1;
                }
                h == target_v[v]
            })
        })
        .collect();
    let perms = permutations(n);
    let lifts = perms.len().pow(ne as u32);
    let hits: u64 = (0..lifts)
        .into_par_iter()
        .map(|mut code| {
            let choice: Vec<&[usize]> = (0..ne)
                .map(|_| {
                    let p = &perms[code % perms.len()];
                    code /= perms.len();
                    p.as_slice()
                })
                .collect();
            let mut hits = 0u64;
            let mut h = vec![0u64; m * m];
            for c in &colorings {
                let ok = g.edges().iter().all(|e| {
                    h.iter_mut().for_each(|x| *x = 0);
                    for i in 0..n {
                        h[c[e.u * n + choice[e.id][i]] * m + c[e.v * n + i]] += 1;
                    }
                    h == target_e[e.id]
                });
                hits += ok as u64;
            }
            hits
        })
        .sum();
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(lifts)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn brute_matchings(cu: &[usize], cv: &[usize], k: &[Vec<u64>]) -> usize {
        // cu, cv: colors of the individual vertices
        let n = cu.len();
        permutations(n)
            .into_iter()
            .filter(|p| {
                let mut h = vec![vec![0u64; k[0].len()]; k.len()];
                for i in 0..n {
                    h[cu[p[i]]][cv[i]] += 1;
                }
                h == k
            })
            .count()
    }

    #[test]
    fn matching_examples() {
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(matching_count(&[1, 1], &[1, 1], &id).unwrap(), BigUint::from(1u32));
        assert_eq!(matching_count(&[3], &[3], &[vec![3]]).unwrap(), factorial(3));
        let ones = vec![vec![1, 1], vec![1, 1]];
        let count = matching_count(&[2, 2], &[2, 2], &ones).unwrap();
        assert_eq!(count, BigUint::from(brute_matchings(&[0, 0, 1, 1], &[0, 0, 1, 1], &ones)));
        assert_eq!(count, BigUint::from(16u32));
        assert_eq!(
            matching_count(&[2, 1], &[2, 2], &ones),
            Err(OracleError::InconsistentCounts)
        );
    }

    #[test]
    fn single_state_expects_one() {
        let g = BaseGraph::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let mu = ConsistentCollection::uniform(&g, 1).unwrap();
        assert_eq!(expected_colorings(&g, &mu, 3), q(1, 1));
        assert_eq!(brute_force_expected_colorings(&g, &mu, 3).unwrap(), q(1, 1));
    }

    #[test]
    fn single_edge_uniform_pair() {
        let g = BaseGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let mu = ConsistentCollection::uniform(&g, 2).unwrap();
        // edge masses 1/4 need n divisible by 4
        assert_eq!(expected_colorings(&g, &mu, 2), q(0, 1));
        let exact = expected_colorings(&g, &mu, 4);
        assert_eq!(exact, brute_force_expected_colorings(&g, &mu, 4).unwrap());
        // 6·6 balanced colorings, each matched with probability 16/24
        assert_eq!(exact, q(24, 1));
    }

    #[test]
    fn non_integral_masses_give_zero() {
        let g = BaseGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let mu = ConsistentCollection::uniform(&g, 2).unwrap();
        assert_eq!(expected_colorings(&g, &mu, 3), q(0, 1));
        assert_eq!(brute_force_expected_colorings(&g, &mu, 3).unwrap(), q(0, 1));
    }

    #[test]
    fn rate_examples() {
        let k4 = BaseGraph::from_pairs(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let product = ConsistentCollection::uniform(&k4, 2).unwrap();
        assert!((rate::<f64>(&k4, &product) - 4.0 * ln2).abs() < 1e-12);
        let half = vec![q(1, 2), q(1, 2)];
        let diag = vec![q(1, 2), q(0, 1), q(0, 1), q(1, 2)];
        let copy = ConsistentCollection::new(&k4, vec![half; 4], vec![diag; 6]).unwrap();
        assert!((rate::<f64>(&k4, &copy) + 2.0 * ln2).abs() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_collections() {
        let g = BaseGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let half = vec![q(1, 2), q(1, 2)];
        let skew = vec![q(1, 2), q(1, 2), q(0, 1), q(0, 1)];
        assert_eq!(
            ConsistentCollection::new(&g, vec![half.clone(), half], vec![skew]),
            Err(OracleError::Marginal(0))
        );
    }

    #[test]
    fn tsv_round_trip() {
        let g = BaseGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        let mu = ConsistentCollection::uniform(&g, 3).unwrap();
        assert_eq!(ConsistentCollection::parse_tsv(&g, &mu.to_tsv()).unwrap(), mu);
        let decimal = "v 0 0.5 0.5\nv 1 0.5 0.5\ne 0 0.25 0.25 0.25 0.25\ne 1 0.25 0.25 0.25 0.25\n";
        assert_eq!(
            ConsistentCollection::parse_tsv(&g, decimal).unwrap(),
            ConsistentCollection::uniform(&g, 2).unwrap()
        );
        assert!(matches!(
            ConsistentCollection::parse_tsv(&g, "v 0 pi 0.5\n"),
            Err(OracleError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        let mut all = permutations(3);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 6);
    }
}
