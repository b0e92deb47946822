//! Mean-constrained entropy minimization.
//!
//! Three projections of a base law `ν₀` onto `{μ : ⟨μ, x⟩ = u}`:
//!
//! * forward, `inf H(μ|ν₀)`: an exponential tilt `μ = c e^{rx} ν₀`
//!   ([`forward_tilt`], rate `I₃`);
//! * reverse, `inf H(ν₀|μ)`: a reciprocal-linear reweighting
//!   `μ = ν₀ / (λ₁ + λ₂ x)` ([`reverse_projection`], rate `I₁`);
//! * J-projection, `inf J(μ, ν₀)`: `μ ∝ ν₀ / (λ₁ + λ₂ x)²`
//!   ([`j_projection`], rate `I₂`).
//!
//! For the uniform base all of `I₁` and `I₃` reduce to the closed form
//! [`rate_i1`] built from `F(λ) = e^λ/(e^λ - 1) - 1/λ`.
//!
//! Each solver works on the atoms of the base that carry positive mass and
//! requires `u` strictly inside their convex hull.

use serde::Serialize;

use crate::divergences::{j_divergence_slices, kl_slices};
use crate::error::{Error, Result};
use crate::measures::{Aligned, DiscreteMeasure};

/// Grid size used for uniform-base computations unless the caller says otherwise.
pub const DEFAULT_PROJECTION_GRID: usize = 4096;

/// Below this `|λ|` the series `½ + λ/12 - λ³/720` replaces the direct formula.
const F_SERIES_CUTOFF: f64 = 1e-4;

/// `F(λ) = e^λ/(e^λ - 1) - 1/λ`, with `F(0) = ½`.
///
/// `F` is the mean of the tilt `c e^{λx} dx` on `[0, 1]`; it is strictly
/// increasing from 0 to 1 and satisfies `F(-λ) = 1 - F(λ)`.
pub fn big_f(lam: f64) -> f64 {
    if lam.abs() < F_SERIES_CUTOFF {
        return 0.5 + lam / 12.0 - lam * lam * lam / 720.0;
    }
    if lam > 0.0 {
        // e^λ/(e^λ - 1) = 1/(1 - e^{-λ})
        1.0 / -(-lam).exp_m1() - 1.0 / lam
    } else {
        lam.exp() / lam.exp_m1() - 1.0 / lam
    }
}

/// Inverse of [`big_f`] on `(0, 1)`, by bracketing and bisection to an
/// absolute tolerance of `1e-12`.
pub fn big_f_inv(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("F⁻¹ is defined on (0, 1), got {u}")));
    }
    let (mut lo, mut hi) = (-60.0_f64, 60.0_f64);
    while big_f(lo) > u {
        lo *= 2.0;
        if !lo.is_finite() {
            return Err(Error::Domain(format!("F⁻¹({u}) underflows")));
        }
    }
    while big_f(hi) < u {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain(format!("F⁻¹({u}) overflows")));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = big_f(mid);
        if fm == u {
            return Ok(mid);
        }
        if fm < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `I₁(u) = F⁻¹(u)(u - 1) + log(1 + F⁻¹(u) u)` for the uniform base on
/// `[0, 1]`; `+∞` outside `(0, 1)`.
pub fn rate_i1(u: f64) -> f64 {
    if !(u > 0.0 && u < 1.0) {
        return f64::INFINITY;
    }
    match big_f_inv(u) {
        Ok(r) => (r * (u - 1.0) + (r * u).ln_1p()).max(0.0),
        Err(_) => f64::INFINITY,
    }
}

/// How a solver reached its answer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverDiagnostics {
    pub method: &'static str,
    pub iterations: usize,
    /// Largest absolute constraint violation of the returned minimizer.
    pub residual: f64,
}

/// Forward projection `μ₀ = c e^{rx} ν₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltSolution {
    pub r: f64,
    /// Normalizer; may underflow for extreme tilts, see `log_c`.
    pub c: f64,
    pub log_c: f64,
    #[serde(skip)]
    pub minimizer: DiscreteMeasure,
    /// `H(μ₀|ν₀)`.
    pub value: f64,
    pub diagnostics: SolverDiagnostics,
}

fn check_hull(base: &DiscreteMeasure, u: f64) -> Result<DiscreteMeasure> {
    let (lo, hi) = base.positive_hull();
    if !(u > lo && u < hi) {
        return Err(Error::Infeasible { target: u, lo, hi });
    }
    Ok(base.positive_part())
}

/// Log-domain tilt weights `log ν_i + r x_i` shifted so the largest is 0;
/// returns `(weights, shift)`.
fn tilt_weights(pos: &DiscreteMeasure, r: f64) -> (Vec<f64>, f64) {
    let logs: Vec<f64> = pos.iter().map(|(x, w)| w.ln() + r * x).collect();
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (logs.into_iter().map(|l| (l - shift).exp()).collect(), shift)
}

/// Mean and variance of the tilted law at exponent `r`.
fn tilted_moments(pos: &DiscreteMeasure, r: f64) -> (f64, f64) {
    let (w, _) = tilt_weights(pos, r);
    let z: f64 = w.iter().sum();
    let m = pos.support().iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / z;
    let v = pos.support().iter().zip(&w).map(|(x, w)| (x - m) * (x - m) * w).sum::<f64>() / z;
    (m, v)
}

/// Minimizes `H(μ|base)` subject to `⟨μ, x⟩ = u`.
///
/// The tilted mean `r ↦ ⟨base, x e^{rx}⟩ / ⟨base, e^{rx}⟩` is strictly
/// increasing; its root is found by bracket expansion and safeguarded
/// Newton steps (the derivative is the tilted variance).
pub fn forward_tilt(base: &DiscreteMeasure, u: f64) -> Result<TiltSolution> {
    let pos = check_hull(base, u)?;
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    while tilted_moments(&pos, lo).0 >= u {
        lo *= 2.0;
        if lo < -1e12 {
            return Err(Error::Convergence { method: "tilt-bracket", iterations: 0, residual: f64::NAN });
        }
    }
    while tilted_moments(&pos, hi).0 <= u {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Convergence { method: "tilt-bracket", iterations: 0, residual: f64::NAN });
        }
    }
    let mut r = 0.0_f64.clamp(lo, hi);
    let mut iterations = 0;
    for it in 1..=500 {
        iterations = it;
        let (m, v) = tilted_moments(&pos, r);
        let resid = m - u;
        if resid.abs() <= 1e-15 {
            break;
        }
        if resid < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let newton = r - resid / v;
        r = if v > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * r.abs().max(1.0) {
            break;
        }
    }

    let (w, shift) = tilt_weights(&pos, r);
    let z: f64 = w.iter().sum();
    let log_c = -(shift + z.ln());
    // Zero-mass atoms of the base stay at zero.
    let mass: Vec<f64> =
        base.iter().map(|(x, nu)| if nu > 0.0 { (nu.ln() + r * x + log_c).exp() } else { 0.0 }).collect();
    let minimizer = DiscreteMeasure::from_weights(base.support().to_vec(), mass)?;
    let residual = (minimizer.mean() - u).abs();
    if residual > 1e-9 {
        return Err(Error::Convergence { method: "tilt-newton", iterations, residual });
    }
    let value = kl_slices(minimizer.mass(), base.mass());
    Ok(TiltSolution {
        r,
        c: log_c.exp(),
        log_c,
        minimizer,
        value,
        diagnostics: SolverDiagnostics { method: "tilt-newton", iterations, residual },
    })
}

/// `I₃(u; base) = inf { H(μ|base) : ⟨μ, x⟩ = u }`, `+∞` outside the open
/// hull of the base support.
pub fn rate_i3(u: f64, base: &DiscreteMeasure) -> Result<f64> {
    match forward_tilt(base, u) {
        Ok(s) => Ok(s.value),
        Err(Error::Infeasible { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Reverse projection `μ = ν₀ / (λ₁ + λ₂ x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocalSolution {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(skip)]
    pub minimizer: DiscreteMeasure,
    /// `H(ν₀|μ)`.
    pub value: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Root-finding route for the reverse projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReciprocalSolver {
    /// Damped Newton on `(λ₁, λ₂)`, falling back to bisection.
    Newton,
    /// Bisection on the one-parameter family `1 + t(x - u)` only.
    Bisection,
}

const NEWTON_MAX_ITER: usize = 200;
const CONSTRAINT_TOL: f64 = 1e-13;
const STALL_TOL: f64 = 1e-10;

/// Minimizes `H(base|μ)` subject to `⟨μ, 1⟩ = 1` and `⟨μ, x⟩ = u`.
///
/// Stationarity gives `base_i / μ_i = λ₁ + λ₂ x_i`; the two constraints are
/// solved for `(λ₁, λ₂)` by damped Newton from `(1, 0)`, keeping
/// `λ₁ + λ₂ x_i > 0` on every atom. If Newton stalls, the system is reduced
/// to one monotone equation in `t = λ₂/(λ₁ + λ₂u)` and bisected.
pub fn reverse_projection(base: &DiscreteMeasure, u: f64) -> Result<ReciprocalSolution> {
    reverse_projection_using(base, u, ReciprocalSolver::Newton)
}

pub fn reverse_projection_using(
    base: &DiscreteMeasure,
    u: f64,
    solver: ReciprocalSolver,
) -> Result<ReciprocalSolution> {
    let pos = check_hull(base, u)?;
    let attempt = match solver {
        ReciprocalSolver::Newton => reciprocal_newton(&pos, u),
        ReciprocalSolver::Bisection => None,
    };
    let (l1, l2, method, iterations) = match attempt {
        Some((l1, l2, it)) => (l1, l2, "damped-newton", it),
        None => {
            let (t, it) = reciprocal_bisection(&pos, u)?;
            let s: f64 = pos.iter().map(|(x, w)| w / (1.0 + t * (x - u))).sum();
            (s * (1.0 - t * u), s * t, "bisection", it)
        }
    };
    let mass: Vec<f64> = base.iter().map(|(x, nu)| if nu > 0.0 { nu / (l1 + l2 * x) } else { 0.0 }).collect();
    let raw_total: f64 = mass.iter().sum();
    let minimizer = DiscreteMeasure::from_weights(base.support().to_vec(), mass)?;
    let residual = (minimizer.mean() - u).abs().max((raw_total - 1.0).abs());
    if (minimizer.mean() - u).abs() > 1e-9 {
        return Err(Error::Convergence { method, iterations, residual });
    }
    let value = kl_slices(base.mass(), minimizer.mass());
    Ok(ReciprocalSolution {
        lambda1: l1,
        lambda2: l2,
        minimizer,
        value,
        diagnostics: SolverDiagnostics { method, iterations, residual },
    })
}

fn reciprocal_residual(pos: &DiscreteMeasure, u: f64, l1: f64, l2: f64) -> Option<[f64; 2]> {
    let (mut g0, mut g1) = (-1.0, -u);
    for (x, w) in pos.iter() {
        let h = l1 + l2 * x;
        if h <= 0.0 {
            return None;
        }
        g0 += w / h;
        g1 += w * x / h;
    }
    Some([g0, g1])
}

fn reciprocal_newton(pos: &DiscreteMeasure, u: f64) -> Option<(f64, f64, usize)> {
    let (mut l1, mut l2) = (1.0, 0.0);
    let mut g = reciprocal_residual(pos, u, l1, l2)?;
    for it in 1..=NEWTON_MAX_ITER {
        let norm = g[0].abs().max(g[1].abs());
        if norm <= CONSTRAINT_TOL {
            return Some((l1, l2, it - 1));
        }
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (x, w) in pos.iter() {
            let h = l1 + l2 * x;
            let k = w / (h * h);
            a += k;
            b += k * x;
            c += k * x * x;
        }
        // Jacobian is -[[a, b], [b, c]]; solve [[a, b], [b, c]] d = g.
        let det = a * c - b * b;
        if !(det.is_finite() && det > 0.0) {
            return None;
        }
        let d1 = (c * g[0] - b * g[1]) / det;
        let d2 = (a * g[1] - b * g[0]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (n1, n2) = (l1 + step * d1, l2 + step * d2);
            if let Some(ng) = reciprocal_residual(pos, u, n1, n2) {
                if ng[0].abs().max(ng[1].abs()) < norm {
                    l1 = n1;
                    l2 = n2;
                    g = ng;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // Rounding floor of the residual sums: accept if already tight.
            return (norm <= STALL_TOL).then_some((l1, l2, it));
        }
    }
    None
}

/// Bisection on `φ(t) = Σ ν_i (x_i - u) / (1 + t(x_i - u))`, which is
/// strictly decreasing on the interval where every denominator is positive
/// and diverges to `±∞` at its ends.
fn reciprocal_bisection(pos: &DiscreteMeasure, u: f64) -> Result<(f64, usize)> {
    monotone_bisection(pos, u, |w, d, g| w * d / g)
}

fn monotone_bisection(pos: &DiscreteMeasure, u: f64, term: impl Fn(f64, f64, f64) -> f64) -> Result<(f64, usize)> {
    let (xmin, xmax) = (pos.support()[0], pos.support()[pos.len() - 1]);
    let (mut lo, mut hi) = (-1.0 / (xmax - u), 1.0 / (u - xmin));
    let phi = |t: f64| -> f64 {
        pos.iter()
            .map(|(x, w)| {
                let d = x - u;
                term(w, d, 1.0 + t * d)
            })
            .sum()
    };
    let mut iterations = 0;
    for it in 1..=2000 {
        iterations = it;
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = phi(mid);
        if v == 0.0 {
            return Ok((mid, it));
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    if !t.is_finite() {
        return Err(Error::Convergence { method: "bisection", iterations, residual: f64::NAN });
    }
    Ok((t, iterations))
}

/// `H(base|μ*)` at the reverse projection; `+∞` outside the open hull.
pub fn reverse_rate(u: f64, base: &DiscreteMeasure) -> Result<f64> {
    match reverse_projection(base, u) {
        Ok(s) => Ok(s.value),
        Err(Error::Infeasible { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// J-projection `μ ∝ ν₀ / (λ₁ + λ₂ x)²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BhattacharyyaSolution {
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(skip)]
    pub minimizer: DiscreteMeasure,
    /// `J(μ*, ν₀)`.
    pub value: f64,
    pub diagnostics: SolverDiagnostics,
}

/// Minimizes `J(μ, base)` over `μ` supported on the base atoms subject to
/// `⟨μ, x⟩ = u`, i.e. maximizes the Bhattacharyya sum `Σ √(μ_i ν_i)`.
///
/// The multipliers of the two constraints satisfy
/// `√ν_i / (2√μ_i) = λ₁ + λ₂ x_i`. Writing `λ₁ + λ₂ x ∝ 1 + t(x - u)`
/// leaves a single strictly decreasing equation in `t`, bisected to machine
/// precision; the normalization then fixes the scale. If the result misses
/// the constraints, projected gradient ascent takes over.
pub fn j_projection(base: &DiscreteMeasure, u: f64) -> Result<BhattacharyyaSolution> {
    let pos = check_hull(base, u)?;
    let (t, iterations) = monotone_bisection(&pos, u, |w, d, g| w * d / (g * g))?;
    let mass: Vec<f64> = base
        .iter()
        .map(|(x, nu)| {
            if nu > 0.0 {
                let g = 1.0 + t * (x - u);
                nu / (g * g)
            } else {
                0.0
            }
        })
        .collect();
    let kappa = 1.0 / mass.iter().sum::<f64>();
    let minimizer = DiscreteMeasure::from_weights(base.support().to_vec(), mass)?;
    let residual = (minimizer.mean() - u).abs();
    if residual > 1e-9 {
        return j_projection_projected_gradient(base, u, 100_000);
    }
    let scale = 0.5 / kappa.sqrt();
    Ok(BhattacharyyaSolution {
        lambda1: scale * (1.0 - t * u),
        lambda2: scale * t,
        value: j_divergence_slices(minimizer.mass(), base.mass()),
        minimizer,
        diagnostics: SolverDiagnostics { method: "dual-bisection", iterations, residual },
    })
}

/// Projected gradient ascent of `Σ √(μ_i ν_i)` on the affine slice
/// `{Σμ = 1, Σμx = u}`, started from the forward tilt (a strictly positive
/// feasible point). Steps are backtracked to keep every `μ_i > 0`.
pub fn j_projection_projected_gradient(
    base: &DiscreteMeasure,
    u: f64,
    max_iter: usize,
) -> Result<BhattacharyyaSolution> {
    let pos = check_hull(base, u)?;
    let start = forward_tilt(&pos, u)?;
    let nu = pos.mass();
    let xs = pos.support();
    let mut mu = start.minimizer.mass().to_vec();
    let objective = |m: &[f64]| -> f64 { m.iter().zip(nu).map(|(a, b)| (a * b).sqrt()).sum() };

    // Orthonormal basis of span{1, x} for projecting out constraint directions.
    let n = xs.len() as f64;
    let e1: Vec<f64> = vec![1.0 / n.sqrt(); xs.len()];
    let xbar = xs.iter().sum::<f64>() / n;
    let mut e2: Vec<f64> = xs.iter().map(|x| x - xbar).collect();
    let e2n = e2.iter().map(|v| v * v).sum::<f64>().sqrt();
    e2.iter_mut().for_each(|v| *v /= e2n);

    let mut f = objective(&mu);
    let mut step = 1e-2;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let mut d: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| 0.5 * (v / m).sqrt()).collect();
        for e in [&e1, &e2] {
            let dot: f64 = d.iter().zip(e.iter()).map(|(a, b)| a * b).sum();
            d.iter_mut().zip(e.iter()).for_each(|(a, b)| *a -= dot * b);
        }
        let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if dn < 1e-11 {
            break;
        }
        let mut improved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = mu.iter().zip(&d).map(|(m, g)| m + step * g).collect();
            if cand.iter().all(|&m| m > 0.0) {
                let fc = objective(&cand);
                if fc > f {
                    mu = cand;
                    f = fc;
                    improved = true;
                    step *= 1.5;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let minimizer = DiscreteMeasure::from_weights(xs.to_vec(), mu)?;
    let residual = (minimizer.mean() - u).abs();
    if residual > 1e-8 {
        return Err(Error::Convergence { method: "projected-gradient", iterations, residual });
    }
    // Multipliers by least squares fit of √ν/(2√μ) against (1, x).
    let h: Vec<f64> = minimizer.mass().iter().zip(nu).map(|(m, v)| 0.5 * (v / m).sqrt()).collect();
    let (l1, l2) = affine_fit(xs, &h);
    let (a, b) = minimizer.aligned(base)?;
    Ok(BhattacharyyaSolution {
        lambda1: l1,
        lambda2: l2,
        value: j_divergence_slices(&a, &b),
        minimizer,
        diagnostics: SolverDiagnostics { method: "projected-gradient", iterations, residual },
    })
}

fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// `I₂(u; base) = inf { J(μ, base) : ⟨μ, x⟩ = u }` with candidate measures
/// discretized on `grid_size` equal-width cells: the base is re-binned onto
/// the cell midpoints and [`j_projection`] is solved there. `+∞` outside the
/// open hull of the re-binned support.
pub fn rate_i2(u: f64, base: &DiscreteMeasure, grid_size: usize) -> Result<f64> {
    let coarse = base.coarsen(grid_size)?;
    match j_projection(&coarse, u) {
        Ok(s) => Ok(s.value),
        Err(Error::Infeasible { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> DiscreteMeasure {
        DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn big_f_values() {
        assert_eq!(big_f(0.0), 0.5);
        let e = std::f64::consts::E;
        assert!((big_f(1.0) - (e / (e - 1.0) - 1.0)).abs() < 1e-15);
        assert!((big_f(1.0) - 0.581977).abs() < 1e-6);
        for lam in [0.5, 1.0, 5.0] {
            assert!((big_f(lam) + big_f(-lam) - 1.0).abs() < 1e-15);
        }
        assert!(big_f(800.0) < 1.0 && big_f(-800.0) > 0.0);
    }

    #[test]
    fn big_f_continuous_at_series_cutoff() {
        let a = big_f(F_SERIES_CUTOFF * (1.0 - 1e-12));
        let b = big_f(F_SERIES_CUTOFF * (1.0 + 1e-12));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn big_f_inv_values() {
        assert_eq!(big_f_inv(0.5).unwrap(), 0.0);
        assert!((big_f_inv(big_f(2.3)).unwrap() - 2.3).abs() < 1e-10);
        assert!((big_f_inv(0.581977).unwrap() - 1.0).abs() < 1e-5);
        assert!((big_f_inv(big_f(1.0)).unwrap() - 1.0).abs() < 1e-10);
        assert!(big_f_inv(0.0).is_err());
        assert!(big_f_inv(1.0).is_err());
        // Beyond the initial bracket.
        let r = big_f_inv(1.0 - 1e-4).unwrap();
        assert!((big_f(r) - (1.0 - 1e-4)).abs() < 1e-12);
    }

    #[test]
    fn rate_i1_shape() {
        assert_eq!(rate_i1(0.5), 0.0);
        assert_eq!(rate_i1(0.0), f64::INFINITY);
        assert_eq!(rate_i1(1.0), f64::INFINITY);
        assert!((rate_i1(0.3) - rate_i1(0.7)).abs() < 1e-12);
        assert!(rate_i1(0.99) > rate_i1(0.9));
        assert!(rate_i1(0.999) > 4.0);
    }

    #[test]
    fn tilt_on_uniform() {
        let grid = DiscreteMeasure::uniform_grid(1024).unwrap();
        let s = forward_tilt(&grid, 0.5).unwrap();
        assert!(s.r.abs() < 1e-12);
        assert!((s.c - 1.0).abs() < 1e-12);
        assert!(s.value.abs() < 1e-15);
        let s = forward_tilt(&DiscreteMeasure::uniform_grid(4096).unwrap(), big_f(1.0)).unwrap();
        assert!((s.r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tilt_on_two_points() {
        let s = forward_tilt(&two_point(), 0.75).unwrap();
        assert!((s.minimizer.mass()[0] - 0.25).abs() < 1e-12);
        assert!((s.minimizer.mass()[1] - 0.75).abs() < 1e-12);
        let expected = 0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln();
        assert!((s.value - expected).abs() < 1e-12);
        assert!((s.value - 0.130812).abs() < 1e-6);
        assert!((s.r - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn infeasible_targets() {
        let b = two_point();
        assert!(matches!(forward_tilt(&b, 1.0), Err(Error::Infeasible { .. })));
        assert!(matches!(reverse_projection(&b, 0.0), Err(Error::Infeasible { .. })));
        assert!(matches!(j_projection(&b, 1.5), Err(Error::Infeasible { .. })));
        assert_eq!(rate_i3(1.0, &b).unwrap(), f64::INFINITY);
        assert_eq!(reverse_rate(-0.1, &b).unwrap(), f64::INFINITY);
        assert_eq!(rate_i2(0.0, &b, 8).unwrap(), f64::INFINITY);
        let d = DiscreteMeasure::dirac(0.4).unwrap();
        assert!(forward_tilt(&d, 0.4).is_err());
    }

    #[test]
    fn reverse_on_uniform_centre() {
        let grid = DiscreteMeasure::uniform_grid(4096).unwrap();
        let s = reverse_projection(&grid, 0.5).unwrap();
        assert!(s.lambda2.abs() < 1e-12);
        assert!((s.lambda1 - 1.0).abs() < 1e-12);
        assert!(s.value.abs() < 1e-15);
    }

    #[test]
    fn reverse_on_two_points() {
        let s = reverse_projection(&two_point(), 0.75).unwrap();
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((s.value - expected).abs() < 1e-12);
        assert!((s.value - 0.143841).abs() < 1e-6);
        assert!((s.lambda1 - 2.0).abs() < 1e-10);
        assert!((s.lambda1 + s.lambda2 - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn reverse_routes_agree() {
        let grid = DiscreteMeasure::uniform_grid(2048).unwrap();
        for u in [0.1, 0.35, 0.8, 0.93] {
            let a = reverse_projection_using(&grid, u, ReciprocalSolver::Newton).unwrap();
            let b = reverse_projection_using(&grid, u, ReciprocalSolver::Bisection).unwrap();
            assert_eq!(a.diagnostics.method, "damped-newton");
            assert_eq!(b.diagnostics.method, "bisection");
            assert!((a.value - b.value).abs() < 1e-11, "u={u}");
            assert!((a.lambda2 - b.lambda2).abs() < 1e-6 * a.lambda2.abs().max(1.0));
        }
    }

    #[test]
    fn reverse_slope_is_minus_f_inverse() {
        // On the uniform law the solved λ₂ approaches -F⁻¹(u) while λ₁ + λ₂u = 1.
        let grid = DiscreteMeasure::uniform_grid(4096).unwrap();
        for u in [0.3, 0.7] {
            let s = reverse_projection(&grid, u).unwrap();
            assert!((s.lambda1 + s.lambda2 * u - 1.0).abs() < 1e-10);
            assert!((s.lambda2 + big_f_inv(u).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn j_projection_three_points_brute_force() {
        let base = DiscreteMeasure::new(vec![0.1, 0.4, 0.9], vec![0.5, 0.3, 0.2]).unwrap();
        let u = 0.6;
        let s = j_projection(&base, u).unwrap();
        // Feasible set: μ = (a, b, c), a+b+c = 1, 0.1a + 0.4b + 0.9c = u.
        // Parametrize by c: b = (u - 0.1 - 0.8c)/0.3, a = 1 - b - c.
        let mut best = f64::INFINITY;
        let steps = 200_000;
        for k in 0..=steps {
            let c = k as f64 / steps as f64;
            let b = (u - 0.1 - 0.8 * c) / 0.3;
            let a = 1.0 - b - c;
            if a < 0.0 || b < 0.0 {
                continue;
            }
            let bc = (a * 0.5f64).sqrt() + (b * 0.3f64).sqrt() + (c * 0.2f64).sqrt();
            best = best.min(-2.0 * bc.ln());
        }
        assert!((s.value - best).abs() < 1e-8, "{} vs {}", s.value, best);
        let pg = j_projection_projected_gradient(&base, u, 100_000).unwrap();
        assert!((pg.value - best).abs() < 1e-8);
        assert!((pg.lambda2 - s.lambda2).abs() < 1e-3);
    }

    #[test]
    fn rate_i2_at_mean_is_zero() {
        let grid = DiscreteMeasure::uniform_grid(4096).unwrap();
        assert!(rate_i2(0.5, &grid, 512).unwrap() < 1e-15);
    }
}
