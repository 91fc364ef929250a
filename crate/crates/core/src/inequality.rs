//! Linear entropy inequalities `Σ c_t · H(t) ≥ 0` with exact rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::types::{SubsetType, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InequalityError {
    #[error("term has tree degree {found}, expected {expected}")]
    MixedDegree { expected: usize, found: usize },
    #[error("scalar {0} is negative")]
    NegativeScalar(BigRational),
    #[error("nothing to combine")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// `Σ terms[t] · H(t) ≥ 0` for every `Aut(T_d)`-factor of IID.
///
/// Coefficients are kept as coprime integers (the common positive factor is
/// divided out on construction). The optional name is a label and takes no
/// part in equality.
#[derive(Debug, Clone)]
pub struct EntropyInequality {
    d: usize,
    terms: BTreeMap<SubsetType, BigRational>,
    name: Option<String>,
}

impl PartialEq for EntropyInequality {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.terms == other.terms
    }
}

impl Eq for EntropyInequality {}

impl EntropyInequality {
    /// Collects like terms, drops zeros and normalizes.
    pub fn new(
        d: usize,
        terms: impl IntoIterator<Item = (SubsetType, BigRational)>,
    ) -> Result<Self, InequalityError> {
        let mut map: BTreeMap<SubsetType, BigRational> = BTreeMap::new();
        for (t, c) in terms {
            if t.d() != d {
                return Err(InequalityError::MixedDegree {
                    expected: d,
                    found: t.d(),
                });
            }
            *map.entry(t).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut ineq = Self {
            d,
            terms: map,
            name: None,
        };
        ineq.normalize();
        Ok(ineq)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_integers(
        d: usize,
        terms: impl IntoIterator<Item = (SubsetType, i64)>,
    ) -> Result<Self, InequalityError> {
        Self::new(
            d,
            terms
                .into_iter()
                .map(|(t, c)| (t, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn terms(&self) -> &BTreeMap<SubsetType, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, t: &SubsetType) -> Option<&BigRational> {
        self.terms.get(t)
    }

    /// True when no terms survive (the inequality `0 ≥ 0`).
    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd = self
            .terms
            .values()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
        let scale = BigRational::new(lcm, gcd);
        for c in self.terms.values_mut() {
            *c = &*c * &scale;
        }
    }

    /// Replaces every type by `f(type)`, merging like terms.
    pub fn map_types(&self, mut f: impl FnMut(&SubsetType) -> SubsetType) -> Self {
        let mut out = Self::new(self.d, self.terms.iter().map(|(t, c)| (f(t), c.clone())))
            .expect("mapping preserves the tree degree");
        out.name = self.name.clone();
        out
    }

    /// Term whose entropy is isolated on the left when rendering: the
    /// positive term with the most marked vertices.
    fn lead(&self) -> Option<(&SubsetType, &BigRational)> {
        self.terms
            .iter()
            .filter(|(_, c)| c.is_positive())
            .max_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }

    /// Human-readable form, e.g. `H(P3) >= 3/2 H(edge)`.
    pub fn render(&self) -> String {
        let Some((lead, lead_c)) = self.lead() else {
            if self.terms.is_empty() {
                return "0 >= 0".to_string();
            }
            let rhs = render_sum(self.terms.iter().map(|(t, c)| (t, -c)));
            return format!("0 >= {rhs}");
        };
        let mut rest: Vec<(&SubsetType, BigRational)> = self
            .terms
            .iter()
            .filter(|(t, _)| *t != lead)
            .map(|(t, c)| (t, -c / lead_c))
            .collect();
        rest.sort_by(|(a, _), (b, _)| b.len().cmp(&a.len()).then_with(|| b.cmp(a)));
        let rhs = if rest.is_empty() {
            "0".to_string()
        } else {
            render_sum(rest.into_iter())
        };
        format!("H({}) >= {rhs}", type_name(lead))
    }

    /// Serializes in the `ineq`/`term` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.name {
            Some(name) => writeln!(out, "ineq d={} name={name}", self.d),
            None => writeln!(out, "ineq d={}", self.d),
        }
        .unwrap();
        for (t, c) in &self.terms {
            write!(out, "term {}/{} {}", c.numer(), c.denom(), t.len()).unwrap();
            for x in t.upper_triangle() {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `ineq`/`term` text format.
    pub fn parse(input: &str) -> Result<Self, InequalityError> {
        let err = |line: usize, msg: String| InequalityError::Parse { line, msg };
        let mut header: Option<(usize, Option<String>)> = None;
        let mut terms = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("ineq") {
                if header.is_some() {
                    return Err(err(line_no, "duplicate `ineq` header".into()));
                }
                let rest = rest.trim_start();
                let (d_part, name) = match rest.find("name=") {
                    Some(pos) => {
                        let name = rest[pos + 5..].trim();
                        (&rest[..pos], (!name.is_empty()).then(|| name.to_string()))
                    }
                    None => (rest, None),
                };
                let d = d_part
                    .trim()
                    .strip_prefix("d=")
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| err(line_no, format!("expected `d=<int>`, found `{}`", d_part.trim())))?;
                header = Some((d, name));
            } else if let Some(rest) = line.strip_prefix("term") {
                let (d, _) = header
                    .as_ref()
                    .ok_or_else(|| err(line_no, "`term` before `ineq` header".into()))?;
                let mut toks = rest.split_whitespace();
                let coef = toks
                    .next()
                    .ok_or_else(|| err(line_no, "missing coefficient".into()))?;
                let coef = parse_rational(coef).ok_or_else(|| err(line_no, format!("invalid coefficient `{coef}`")))?;
                let n: usize = toks
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(line_no, "missing point count".into()))?;
                let upper = toks
                    .map(|s| s.parse::<u32>().map_err(|_| err(line_no, format!("invalid distance `{s}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let t = SubsetType::from_upper_triangle(*d, n, &upper)?;
                terms.push((t, coef));
            } else {
                return Err(err(line_no, format!("unknown record `{line}`")));
            }
        }
        let (d, name) = header.ok_or_else(|| err(0, "missing `ineq` header".into()))?;
        let mut ineq = Self::new(d, terms)?;
        ineq.name = name;
        Ok(ineq)
    }
}

/// Parses `a/b`, an integer, or a finite decimal as an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = BigRational::from_integer(int.abs()) + BigRational::new(frac, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

fn render_coef(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render_sum<'a>(terms: impl Iterator<Item = (&'a SubsetType, BigRational)>) -> String {
    let mut out = String::new();
    for (i, (t, c)) in terms.enumerate() {
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        if !mag.is_one() {
            write!(out, "{} ", render_coef(&mag)).unwrap();
        }
        write!(out, "H({})", type_name(t)).unwrap();
    }
    out
}

/// Conic combination `Σ λ_i · I_i` of inequalities over a common `d`.
pub fn combine(
    ineqs: &[(EntropyInequality, BigRational)],
) -> Result<EntropyInequality, InequalityError> {
    let d = ineqs.first().ok_or(InequalityError::Empty)?.0.d;
    let mut terms = Vec::new();
    for (ineq, lambda) in ineqs {
        if ineq.d != d {
            return Err(InequalityError::MixedDegree {
                expected: d,
                found: ineq.d,
            });
        }
        if lambda.is_negative() {
            return Err(InequalityError::NegativeScalar(lambda.clone()));
        }
        terms.extend(ineq.terms.iter().map(|(t, c)| (t.clone(), c * lambda)));
    }
    EntropyInequality::new(d, terms)
}

/// Short human-readable name for a type: `vertex`, `edge`, `P3`, `star`,
/// `dist3`, `flower`, `S2`, ...; anything unrecognized prints as
/// `T<n>[upper-triangular distances]`.
pub fn type_name(t: &SubsetType) -> String {
    let d = t.d();
    let n = t.len();
    match n {
        1 => return "vertex".into(),
        2 => {
            return match t.distance(0, 1) {
                1 => "edge".into(),
                k => format!("dist{k}"),
            }
        }
        _ => {}
    }
    let connected = t.is_connected();
    if connected {
        if t.diameter() as usize == n - 1 {
            return format!("P{}", n - 1);
        }
        let vertex = SubsetType::vertex(d).expect("d validated");
        let edge = SubsetType::edge(d).expect("d validated");
        for k in 1.. {
            let size = vertex.ball_size(k) as usize;
            if size > n {
                break;
            }
            if size == n && vertex.ball(k) == *t {
                return if k == 1 { "star".into() } else { format!("B{k}(vertex)") };
            }
        }
        for k in 1.. {
            let size = edge.ball_size(k) as usize;
            if size > n {
                break;
            }
            if size == n && edge.ball(k) == *t {
                return format!("B{k}(edge)");
            }
        }
    } else {
        if n <= d && SubsetType::flower(d, n).ok().as_ref() == Some(t) {
            return if n == d { "flower".into() } else { format!("flower{n}") };
        }
        let mut size = d * (d - 1);
        for k in 2.. {
            if size > n {
                break;
            }
            if size == n && SubsetType::sphere(d, k).ok().as_ref() == Some(t) {
                return format!("S{k}");
            }
            size *= d - 1;
        }
    }
    let dists: Vec<String> = t.upper_triangle().iter().map(u32::to_string).collect();
    format!("T{n}[{}]", dists.join(","))
}
