//! Reversible Markov chains indexed by `T_d`: exact entropies of finite
//! vertex sets, inequality checks, parameter scans and the spectral bound.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::entropy::shannon;
use crate::inequality::{type_name, EntropyInequality};
use crate::scalar::Real;
use crate::types::SubsetType;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarkovError {
    #[error("chain has no states")]
    Empty,
    #[error("transition matrix row {0} has the wrong length")]
    NotSquare(usize),
    #[error("stationary vector has length {found}, expected {expected}")]
    PiLength { expected: usize, found: usize },
    #[error("entry ({i}, {j}) is negative or not finite")]
    BadEntry { i: usize, j: usize },
    #[error("row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("stationary vector sums to {0}")]
    PiSum(f64),
    #[error("stationary vector is not invariant at state {0}")]
    NotStationary(usize),
    #[error("chain is not reversible at states ({i}, {j})")]
    NotReversible { i: usize, j: usize },
    #[error("type {0} is not connected")]
    NotConnected(String),
    #[error("{states}^{points} joint states exceed the enumeration limit")]
    TooLarge { states: usize, points: usize },
    #[error("slack does not change sign on the scanned range")]
    NoSignChange,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Parameter(String),
}

/// Largest `|M|^n` for which joint laws are enumerated.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// A reversible stationary chain; the `T_d`-indexed process starts from
/// `pi` at any vertex and moves along every edge with kernel `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain<T: Real> {
    p: Vec<Vec<T>>,
    pi: Vec<T>,
}

impl<T: Real> MarkovChain<T> {
    pub fn new(p: Vec<Vec<T>>, pi: Vec<T>) -> Result<Self, MarkovError> {
        let m = p.len();
        if m == 0 {
            return Err(MarkovError::Empty);
        }
        if let Some(i) = (0..m).find(|&i| p[i].len() != m) {
            return Err(MarkovError::NotSquare(i));
        }
        if pi.len() != m {
            return Err(MarkovError::PiLength {
                expected: m,
                found: pi.len(),
            });
        }
        for i in 0..m {
            for j in 0..m {
                if !(p[i][j] >= T::zero()) || !p[i][j].is_finite() {
                    return Err(MarkovError::BadEntry { i, j });
                }
            }
            if !(pi[i] >= T::zero()) || !pi[i].is_finite() {
                return Err(MarkovError::BadEntry { i: m, j: i });
            }
            let sum: T = p[i].iter().copied().sum();
            if (sum - T::one()).abs() > T::tolerance(1e-12) {
                return Err(MarkovError::RowSum {
                    row: i,
                    sum: sum.to_f64().unwrap(),
                });
            }
        }
        let total: T = pi.iter().copied().sum();
        if (total - T::one()).abs() > T::tolerance(1e-10) {
            return Err(MarkovError::PiSum(total.to_f64().unwrap()));
        }
        let tol = T::tolerance(1e-10);
        for j in 0..m {
            let flow: T = (0..m).map(|i| pi[i] * p[i][j]).sum();
            if (flow - pi[j]).abs() > tol {
                return Err(MarkovError::NotStationary(j));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if (pi[i] * p[i][j] - pi[j] * p[j][i]).abs() > tol {
                    return Err(MarkovError::NotReversible { i, j });
                }
            }
        }
        Ok(Self { p, pi })
    }

    /// Two states that flip with probability `eps` along every edge.
    pub fn binary_symmetric(eps: T) -> Result<Self, MarkovError> {
        if !(eps >= T::zero() && eps <= T::one()) {
            return Err(MarkovError::Parameter(format!("flip probability {eps} outside [0, 1]")));
        }
        let half = T::lit(0.5);
        let stay = T::one() - eps;
        Self::new(vec![vec![stay, eps], vec![eps, stay]], vec![half, half])
    }

    pub fn states(&self) -> usize {
        self.pi.len()
    }

    pub fn transition(&self) -> &[Vec<T>] {
        &self.p
    }

    pub fn stationary(&self) -> &[T] {
        &self.pi
    }

    /// `H(pi)` in nats.
    pub fn vertex_entropy(&self) -> T {
        shannon(&self.pi)
    }

    /// Entropy of the joint law `pi_i p_ij` of the two ends of an edge.
    pub fn edge_entropy(&self) -> T {
        let joint: Vec<T> = (0..self.states())
            .flat_map(|i| self.p[i].iter().map(move |&q| self.pi[i] * q))
            .collect();
        shannon(&joint)
    }

    /// `(n-1) H(edge) - (n-2) H(vertex)` for a connected type on `n` points.
    pub fn connected_set_entropy(&self, t: &SubsetType) -> Result<T, MarkovError> {
        if !t.is_connected() {
            return Err(MarkovError::NotConnected(type_name(t)));
        }
        let n = T::from_usize(t.len()).unwrap();
        let one = T::one();
        let two = one + one;
        Ok((n - one) * self.edge_entropy() - (n - two) * self.vertex_entropy())
    }

    /// Joint law of the states at the points of `t`, indexed in base `|M|`
    /// with point order fixed by the type.
    pub fn joint_law(&self, t: &SubsetType) -> Result<Vec<T>, MarkovError> {
        let m = self.states();
        let n = t.len();
        if (m as f64).powi(n as i32) > ENUMERATION_LIMIT {
            return Err(MarkovError::TooLarge { states: m, points: n });
        }
        let hull = t.tree().hull();
        let nodes = hull.node_count();
        let mut point_at = vec![None; nodes];
        for (i, &x) in hull.marked().iter().enumerate() {
            point_at[x] = Some(i);
        }
        // breadth-first order from node 0
        let mut order = vec![0];
        let mut parent = vec![usize::MAX; nodes];
        parent[0] = 0;
        let mut next = 0;
        while next < order.len() {
            let x = order[next];
            for &y in hull.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
            next += 1;
        }
        // table[x]: law of the marked points below x (most significant
        // first) jointly with the state of x, laid out as `index·m + s`
        let mut tables: Vec<Option<(Vec<usize>, Vec<T>)>> = vec![None; nodes];
        for &x in order.iter().rev() {
            let (mut points, mut table) = match point_at[x] {
                Some(i) => {
                    let mut tab = vec![T::zero(); m * m];
                    for s in 0..m {
                        tab[s * m + s] = T::one();
                    }
                    (vec![i], tab)
                }
                None => (Vec::new(), vec![T::one(); m]),
            };
            for &y in hull.neighbors(x) {
                if y == parent[x] || parent[y] != x {
                    continue;
                }
                let (child_points, child) = tables[y].take().unwrap();
                let size = child.len() / m;
                // message: sum out the child's state through the kernel
                let mut msg = vec![T::zero(); size * m];
                for idx in 0..size {
                    for s in 0..m {
                        msg[idx * m + s] = (0..m).map(|c| self.p[s][c] * child[idx * m + c]).sum();
                    }
                }
                let own = table.len() / m;
                let mut merged = vec![T::zero(); own * size * m];
                for a in 0..own {
                    for b in 0..size {
                        for s in 0..m {
                            merged[(a * size + b) * m + s] = table[a * m + s] * msg[b * m + s];
                        }
                    }
                }
                points.extend(child_points);
                table = merged;
            }
            tables[x] = Some((points, table));
        }
        let (points, root) = tables[0].take().unwrap();
        let size = root.len() / m;
        let law: Vec<T> = (0..size)
            .map(|idx| (0..m).map(|s| self.pi[s] * root[idx * m + s]).sum())
            .collect();
        // reorder so that point 0 is the most significant digit
        let mut out = vec![T::zero(); size];
        for (idx, &mass) in law.iter().enumerate() {
            let mut rest = idx;
            let mut digits = vec![0; n];
            for &p in points.iter().rev() {
                digits[p] = rest % m;
                rest /= m;
            }
            let target = digits.iter().fold(0, |acc, &dgt| acc * m + dgt);
            out[target] = mass;
        }
        Ok(out)
    }

    /// Entropy of the states at the points of `t`, by exact summation over
    /// the Steiner tree.
    pub fn exact_subset_entropy(&self, t: &SubsetType) -> Result<T, MarkovError> {
        Ok(shannon(&self.joint_law(t)?))
    }

    /// Slack `Σ coef · H(type)` of an inequality on this chain. Connected
    /// types use the closed form; the rest are summed exactly.
    pub fn check(&self, ineq: &EntropyInequality) -> Result<T, MarkovError> {
        let mut total = T::zero();
        for (t, c) in ineq.terms() {
            let h = if t.is_connected() {
                self.connected_set_entropy(t)?
            } else {
                self.exact_subset_entropy(t)?
            };
            total = total + T::lit(crate::entropy::rational_to_f64(c)) * h;
        }
        Ok(total)
    }

    /// Second-largest absolute eigenvalue of the kernel and whether it is at
    /// most `1/sqrt(d-1)`.
    pub fn spectral_bound(&self, d: usize) -> (T, bool) {
        let support: Vec<usize> = (0..self.states()).filter(|&i| self.pi[i] > T::zero()).collect();
        let k = support.len();
        let root: Vec<f64> = support.iter().map(|&i| self.pi[i].to_f64().unwrap().sqrt()).collect();
        let sym = DMatrix::from_fn(k, k, |a, b| {
            let (i, j) = (support[a], support[b]);
            root[a] * self.p[i][j].to_f64().unwrap() / root[b]
        });
        // reversibility makes this symmetric up to rounding
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let rho = eig.iter().skip(1).map(|x| x.abs()).fold(0.0, f64::max);
        let limit = 1.0 / ((d as f64) - 1.0).sqrt() + 1e-12;
        (T::lit(rho), rho <= limit)
    }

    /// Reads `m` rows of the kernel followed by one row holding `pi`;
    /// blank lines and `#` comments are skipped.
    pub fn parse_tsv(input: &str) -> Result<Self, MarkovError> {
        let mut rows: Vec<(usize, Vec<T>)> = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map(T::lit).map_err(|_| MarkovError::Parse {
                        line: idx + 1,
                        msg: format!("invalid number `{tok}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((idx + 1, row));
        }
        let Some((_, pi)) = rows.pop() else {
            return Err(MarkovError::Empty);
        };
        let width = pi.len();
        if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != width) {
            return Err(MarkovError::Parse {
                line: *line,
                msg: format!("expected {width} entries"),
            });
        }
        Self::new(rows.into_iter().map(|(_, r)| r).collect(), pi)
    }

    pub fn to_tsv(&self) -> String {
        let row = |r: &[T]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\t");
        let mut out: String = self.p.iter().map(|r| row(r) + "\n").collect();
        out.push_str(&row(&self.pi));
        out.push('\n');
        out
    }
}

/// Slack of `ineq` across a one-parameter family, with the parameter
/// values where it crosses zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan<T> {
    pub grid: Vec<(T, T)>,
    pub thresholds: Vec<T>,
}

const SCAN_POINTS: usize = 200;

/// Evaluates the slack on a uniform grid over `[lo, hi]` and bisects every
/// sign change down to width `tol`.
pub fn scan_regime<T: Real>(
    family: impl Fn(T) -> Result<MarkovChain<T>, MarkovError>,
    ineq: &EntropyInequality,
    lo: T,
    hi: T,
    tol: T,
) -> Result<Scan<T>, MarkovError> {
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(MarkovError::Parameter("scan needs lo < hi and tol > 0".into()));
    }
    let slack = |x: T| family(x)?.check(ineq);
    let steps = T::from_usize(SCAN_POINTS).unwrap();
    let mut grid = Vec::with_capacity(SCAN_POINTS + 1);
    for k in 0..=SCAN_POINTS {
        let x = lo + (hi - lo) * T::from_usize(k).unwrap() / steps;
        grid.push((x, slack(x)?));
    }
    let mut thresholds = Vec::new();
    for w in grid.windows(2) {
        let ((mut a, sa), (mut b, sb)) = (w[0], w[1]);
        if sa == T::zero() {
            thresholds.push(a);
            continue;
        }
        if sa.signum() == sb.signum() || sb == T::zero() {
            continue;
        }
        while b - a > tol {
            let mid = (a + b) / (T::one() + T::one());
            let sm = slack(mid)?;
            if sm.signum() == sa.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        thresholds.push((a + b) / (T::one() + T::one()));
    }
    if let Some(&(x, s)) = grid.last() {
        if s == T::zero() {
            thresholds.push(x);
        }
    }
    if thresholds.is_empty() {
        return Err(MarkovError::NoSignChange);
    }
    Ok(Scan { grid, thresholds })
}
