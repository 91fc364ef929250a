//! Shannon entropy of finite distributions, in nats.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::Real;

/// Entropy of a probability vector. Zero masses contribute nothing.
pub fn shannon<T: Real>(probs: &[T]) -> T {
    probs
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.ln())
        .sum()
}

/// Plug-in entropy of an empirical histogram.
pub fn plugin_from_counts<T: Real>(counts: &[u64]) -> T {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let total = T::from_u64(total).unwrap();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = T::from_u64(c).unwrap() / total;
            -p * p.ln()
        })
        .sum()
}

/// Entropy of exact rational masses; each mass is converted to floating point
/// only at the last step.
pub fn shannon_exact<T: Real>(probs: &[BigRational]) -> T {
    probs
        .iter()
        .filter(|q| q.is_positive())
        .map(|q| {
            let p = T::lit(rational_to_f64(q));
            -p * T::lit(ln_rational(q))
        })
        .sum()
}

/// Natural log of a (possibly huge) positive integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "logarithm of zero");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(q: &BigRational) -> f64 {
    assert!(q.is_positive(), "logarithm of a non-positive rational");
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Float value of a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            sign * ln_rational(&q.abs()).exp()
        }
    }
}

/// Binary entropy function in nats.
pub fn binary<T: Real>(p: T) -> T {
    shannon(&[p, T::one() - p])
}
