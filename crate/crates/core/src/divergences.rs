//! Relative entropy, its symmetrization, and the J-divergence
//!
//! `J(a, b) = inf_υ { H(υ|a) + H(υ|b) }`.
//!
//! On a finite index set the infimum is attained at `υᵢ ∝ √(aᵢ bᵢ)`, which
//! gives `J = -2 log Σ √(aᵢ bᵢ)`, minus twice the log Bhattacharyya
//! coefficient. The binary case of this closed form is
//! [`binary_reverse_minimizer`]; the general case is checked against brute
//! force minimization in the test suites.
//!
//! Divergences return `f64::INFINITY` rather than an error when supports
//! are incompatible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{tv_distance, Aligned, SimplexVector};

/// `Σ aᵢ log(aᵢ/bᵢ)` over aligned weight vectors, with `0 log 0 = 0`.
pub fn kl_slices(a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > 0.0 {
            if bi <= 0.0 {
                return f64::INFINITY;
            }
            total += ai * (ai / bi).ln();
        }
    }
    total.max(0.0)
}

/// Relative entropy `H(a|b)` in nats.
pub fn kl<T: Aligned>(a: &T, b: &T) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    Ok(kl_slices(&a, &b))
}

/// `H(a|b) + H(b|a)`.
pub fn symmetric_kl<T: Aligned>(a: &T, b: &T) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    Ok(kl_slices(&a, &b) + kl_slices(&b, &a))
}

/// Lower bound on `H(a|b)` from its Donsker–Varadhan form: the best value of
/// `⟨a, f⟩ - log ⟨b, eᶠ⟩` over the supplied test vectors.
///
/// Entries of `f` may be `-∞` (that coordinate is switched off).
pub fn kl_variational_lb(a: &SimplexVector, b: &SimplexVector, test_values: &[Vec<f64>]) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    if test_values.is_empty() {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for f in test_values {
        if f.len() != a.len() {
            return Err(Error::LengthMismatch { left: f.len(), right: a.len() });
        }
        let linear: f64 = a.iter().zip(f).filter(|(&ai, _)| ai > 0.0).map(|(&ai, &fi)| ai * fi).sum();
        let shift = b.iter().zip(f).filter(|(&bi, _)| bi > 0.0).map(|(_, &fi)| fi).fold(f64::NEG_INFINITY, f64::max);
        let log_mgf = if shift == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let s: f64 = b.iter().zip(f).filter(|(&bi, _)| bi > 0.0).map(|(&bi, &fi)| bi * (fi - shift).exp()).sum();
            shift + s.ln()
        };
        let value = linear - log_mgf;
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// `Σ √(aᵢ bᵢ)` over coordinates where both weights are positive.
pub fn bhattacharyya_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).filter(|(&x, &y)| x > 0.0 && y > 0.0).map(|(&x, &y)| (x * y).sqrt()).sum()
}

/// `J` on aligned weight vectors; `+∞` iff the supports are disjoint.
pub fn j_divergence_slices(a: &[f64], b: &[f64]) -> f64 {
    let bc = bhattacharyya_slices(a, b);
    if bc <= 0.0 {
        f64::INFINITY
    } else {
        (-2.0 * bc.ln()).max(0.0)
    }
}

/// The J-divergence `inf_υ { H(υ|a) + H(υ|b) }`.
pub fn j_divergence<T: Aligned>(a: &T, b: &T) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    Ok(j_divergence_slices(&a, &b))
}

/// The minimizing `υ` of `H(υ|a) + H(υ|b)` on the aligned index set, or
/// `None` when the supports are disjoint.
pub fn j_minimizer_slices(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let bc = bhattacharyya_slices(a, b);
    if bc <= 0.0 {
        return None;
    }
    Some(a.iter().zip(b).map(|(&x, &y)| if x > 0.0 && y > 0.0 { (x * y).sqrt() / bc } else { 0.0 }).collect())
}

/// Minimizer of `L(p) = H((p,1-p)|(q,1-q)) + H((p,1-p)|(r,1-r))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryMinimizer {
    pub p_hat: f64,
    pub value: f64,
}

/// Closed-form minimizer of the binary objective `L(p)`.
///
/// For `0 < q, r < 1` the stationary point is
/// `p̂ = √(qr) / (√(qr) + √((1-q)(1-r)))` with
/// `L(p̂) = -2 log(√((1-q)(1-r)) + √(qr))`. Boundary cases (`q` or `r` in
/// `{0, 1}`) pin `p̂` to the shared endpoint. If the two binary laws have
/// disjoint supports, `L ≡ +∞` and `p_hat` is reported as `0.5`.
pub fn binary_reverse_minimizer(q: f64, r: f64) -> Result<BinaryMinimizer> {
    for (name, v) in [("q", q), ("r", r)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    if q == r {
        return Ok(BinaryMinimizer { p_hat: q, value: 0.0 });
    }
    let head = (q * r).sqrt();
    let tail = ((1.0 - q) * (1.0 - r)).sqrt();
    let bc = head + tail;
    if bc == 0.0 {
        return Ok(BinaryMinimizer { p_hat: 0.5, value: f64::INFINITY });
    }
    Ok(BinaryMinimizer { p_hat: head / bc, value: (-2.0 * bc.ln()).max(0.0) })
}

/// `L(p)` evaluated directly from the two relative entropies.
pub fn binary_objective(p: f64, q: f64, r: f64) -> f64 {
    let v = [p, 1.0 - p];
    kl_slices(&v, &[q, 1.0 - q]) + kl_slices(&v, &[r, 1.0 - r])
}

/// Ingredients of the inequality `tv² ≤ 4 J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinskerCheck {
    pub tv: f64,
    pub j: f64,
    /// `4 J - tv²`; nonnegative up to rounding, `+∞` when `J` is.
    pub slack: f64,
}

pub fn pinsker_check<T: Aligned>(a: &T, b: &T) -> Result<PinskerCheck> {
    let tv = tv_distance(a, b)?;
    let j = j_divergence(a, b)?;
    Ok(PinskerCheck { tv, j, slack: 4.0 * j - tv * tv })
}
