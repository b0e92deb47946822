//! Finite-dimensional rate functions and numerical checks of exponential
//! decay of ball probabilities for `L_n`, `W_n` and `DP(n)`.

use std::io::Write;

use serde::Serialize;

use crate::divergences::{j_divergence, kl};
use crate::error::{Error, Result};
use crate::measures::{project, DiscreteMeasure, Partition, SimplexVector};
use crate::random_measures::{default_truncation, BaseSampler, Family, RngStream};
use crate::special::{beta_interval, binomial_pmf};

/// Smallest replicate count accepted by [`mc_ball_probability`].
pub const MIN_REPLICATES: usize = 1000;

/// `H(q|p)`, the rate of the projected empirical measure.
pub fn multinomial_rate(q: &SimplexVector, p: &SimplexVector) -> Result<f64> {
    kl(q, p)
}

/// `H(p|q)`, the rate of the projected Dirichlet process with `θ = n`.
pub fn dirichlet_rate(q: &SimplexVector, p: &SimplexVector) -> Result<f64> {
    kl(p, q)
}

/// `H(o|q) + H(o|p)`: joint rate of the atom empirical measure at `o` and
/// the weighted measure at `q`. Its infimum over `o` is `J(q, p)`.
pub fn joint_rate(o: &SimplexVector, q: &SimplexVector, p: &SimplexVector) -> Result<f64> {
    Ok(kl(o, q)? + kl(o, p)?)
}

/// Rate of `family` at target `q` for base cell probabilities `p`.
pub fn theory_rate(family: Family, q: &SimplexVector, p: &SimplexVector) -> Result<f64> {
    match family {
        Family::Empirical => multinomial_rate(q, p),
        Family::Dp => dirichlet_rate(q, p),
        Family::Wn => j_divergence(q, p),
    }
}

/// `[inf of the rate over the closed δ-ball, rate at the centre]` for a
/// two-cell target `(q, 1 - q)` and base `(p, 1 - p)`.
///
/// All three rates are convex in the first cell and vanish at `p`, so the
/// infimum sits at the ball point nearest to `p`.
pub fn binary_rate_bracket(family: Family, q: f64, p: f64, delta: f64) -> Result<(f64, f64)> {
    let r = delta / 2.0;
    let nearest = p.clamp((q - r).max(0.0), (q + r).min(1.0));
    let pv = SimplexVector::binary(p)?;
    let lo = theory_rate(family, &SimplexVector::binary(nearest)?, &pv)?;
    let hi = theory_rate(family, &SimplexVector::binary(q)?, &pv)?;
    Ok((lo, hi))
}

/// `P(|X - q| < δ/2)` for the first cell `X` of the projected `W_n` on two
/// cells with base probabilities `(p, 1 - p)`, computed exactly.
///
/// Given `k` atoms in the first cell, `X ~ Beta(k, n - k)`, with `k = 0`
/// and `k = n` giving point masses at 0 and 1. The ball is the open
/// `partition_distance < δ` ball, i.e. `|X - q| < δ/2`.
pub fn exact_ball_probability_binary(base_p: f64, target_q: f64, delta: f64, n: usize) -> Result<f64> {
    if !(base_p > 0.0 && base_p < 1.0) {
        return Err(Error::InvalidParameter(format!("base_p must lie in (0, 1), got {base_p}")));
    }
    if !(0.0..=1.0).contains(&target_q) {
        return Err(Error::InvalidParameter(format!("target_q must lie in [0, 1], got {target_q}")));
    }
    if !(delta > 0.0 && !delta.is_nan()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let r = delta / 2.0;
    let (lo, hi) = (target_q - r, target_q + r);
    let inside = |x: f64| (x - target_q).abs() < r;
    if inside(0.0) && inside(1.0) {
        return Ok(1.0);
    }
    let n64 = n as u64;
    let mut total = 0.0;
    for k in 0..=n64 {
        let w = binomial_pmf(n64, k, base_p);
        if w == 0.0 {
            continue;
        }
        let p = if k == 0 {
            f64::from(u8::from(inside(0.0)))
        } else if k == n64 {
            f64::from(u8::from(inside(1.0)))
        } else {
            beta_interval(k as f64, (n64 - k) as f64, lo, hi)
        };
        total += w * p;
    }
    Ok(total.min(1.0))
}

/// Monte Carlo ball probability with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McBall {
    pub prob: f64,
    pub std_err: f64,
    pub hits: u64,
    pub replicates: usize,
    pub workers: usize,
    /// No replicate landed in the ball; the log-rate is undefined.
    pub zero_hits: bool,
}

/// Fraction of `replicates` draws of `family` whose projection on
/// `partition` lies within `partition_distance < delta` of `target`.
///
/// The `dp` family uses `θ = n`. Replicates are split into contiguous
/// blocks, one per worker, each drawing from `stream.child(worker)`; the
/// hit count is an integer sum, so the result depends only on
/// `(stream, replicates, workers)`.
#[allow(clippy::too_many_arguments)]
pub fn mc_ball_probability(
    family: Family,
    base: &DiscreteMeasure,
    partition: &Partition,
    target: &SimplexVector,
    delta: f64,
    n: usize,
    replicates: usize,
    stream: RngStream,
    workers: usize,
) -> Result<McBall> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_REPLICATES} replicates required, got {replicates}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if target.len() != partition.cells() {
        return Err(Error::LengthMismatch { left: target.len(), right: partition.cells() });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let workers = workers.clamp(1, replicates);
    let sampler = BaseSampler::new(base)?;
    let block = replicates / workers;
    let extra = replicates % workers;
    let counts: Vec<u64> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let size = block + usize::from(w < extra);
                let sampler = &sampler;
                scope.spawn(move || {
                    count_hits(family, sampler, partition, target, delta, n, size, stream.child(w as u64))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let hits: u64 = counts.iter().sum();
    let prob = hits as f64 / replicates as f64;
    Ok(McBall {
        prob,
        std_err: (prob * (1.0 - prob) / replicates as f64).sqrt(),
        hits,
        replicates,
        workers,
        zero_hits: hits == 0,
    })
}

#[allow(clippy::too_many_arguments)]
fn count_hits(
    family: Family,
    sampler: &BaseSampler,
    partition: &Partition,
    target: &SimplexVector,
    delta: f64,
    n: usize,
    replicates: usize,
    stream: RngStream,
) -> u64 {
    let mut rng = stream.generator();
    let theta = n as f64;
    let k = default_truncation(theta);
    let mut cells = vec![0.0; partition.cells()];
    let mut hits = 0;
    for _ in 0..replicates {
        cells.iter_mut().for_each(|c| *c = 0.0);
        let mut add = |a: f64, w: f64| cells[partition.cell_of(a)] += w;
        let scale = match family {
            Family::Empirical => {
                sampler.visit_empirical(n, &mut rng, &mut add);
                1.0
            }
            Family::Wn => sampler.visit_wn(n, &mut rng, &mut add),
            Family::Dp => {
                sampler.visit_dp(theta, k, &mut rng, &mut add);
                1.0
            }
        };
        let dist: f64 = cells.iter().zip(target.coords()).map(|(c, t)| (c / scale - t).abs()).sum();
        if dist < delta {
            hits += 1;
        }
    }
    hits
}

/// How the probabilities of a [`RateEstimate`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    MonteCarlo,
    ExactBinary,
}

/// Ball probabilities over a range of `n` and the implied decay rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    pub n_values: Vec<usize>,
    pub probs: Vec<f64>,
    /// `-(1/n) log P`, `+∞` where no hit was recorded.
    pub log_rates: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub theory: f64,
    pub method: RateMethod,
}

impl RateEstimate {
    pub fn new(
        n_values: Vec<usize>,
        probs: Vec<f64>,
        std_errs: Vec<f64>,
        theory: f64,
        method: RateMethod,
    ) -> Result<Self> {
        if probs.len() != n_values.len() || std_errs.len() != n_values.len() {
            return Err(Error::LengthMismatch { left: n_values.len(), right: probs.len().min(std_errs.len()) });
        }
        if n_values.windows(2).any(|w| w[0] >= w[1]) || n_values.first() == Some(&0) {
            return Err(Error::InvalidParameter("n values must be positive and increasing".into()));
        }
        let log_rates = n_values
            .iter()
            .zip(&probs)
            .map(|(&n, &p)| if p > 0.0 { (-p.ln() / n as f64).max(0.0) } else { f64::INFINITY })
            .collect();
        Ok(RateEstimate { n_values, probs, log_rates, std_errs, theory, method })
    }

    /// Indices whose probability is zero (excluded from fits).
    pub fn zero_hit_points(&self) -> Vec<usize> {
        self.n_values.iter().zip(&self.probs).filter(|(_, &p)| p <= 0.0).map(|(&n, _)| n).collect()
    }

    /// Writes `n,prob,std_err,log_rate` rows preceded by a `# {json}`
    /// metadata line when `header` is given.
    pub fn write_csv(&self, mut out: impl Write, header: Option<&serde_json::Value>) -> Result<()> {
        if let Some(h) = header {
            writeln!(out, "# {h}")?;
        }
        writeln!(out, "n,prob,std_err,log_rate")?;
        for i in 0..self.n_values.len() {
            let lr = self.log_rates[i];
            let lr = if lr.is_finite() { format!("{lr:.12e}") } else { "inf".to_string() };
            writeln!(out, "{},{:.12e},{:.6e},{}", self.n_values[i], self.probs[i], self.std_errs[i], lr)?;
        }
        Ok(())
    }
}

/// Exact `W_n` ball probabilities on two cells for each `n`.
pub fn estimate_rate_exact(base_p: f64, target_q: f64, delta: f64, n_values: &[usize]) -> Result<RateEstimate> {
    let probs = n_values
        .iter()
        .map(|&n| exact_ball_probability_binary(base_p, target_q, delta, n))
        .collect::<Result<Vec<_>>>()?;
    let theory = theory_rate(Family::Wn, &SimplexVector::binary(target_q)?, &SimplexVector::binary(base_p)?)?;
    RateEstimate::new(n_values.to_vec(), probs, vec![0.0; n_values.len()], theory, RateMethod::ExactBinary)
}

/// Monte Carlo ball probabilities for each `n`; the run for `n` uses
/// `stream.child(n)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_rate_mc(
    family: Family,
    base: &DiscreteMeasure,
    partition: &Partition,
    target: &SimplexVector,
    delta: f64,
    n_values: &[usize],
    replicates: usize,
    stream: RngStream,
    workers: usize,
) -> Result<RateEstimate> {
    let mut probs = Vec::with_capacity(n_values.len());
    let mut errs = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let b = mc_ball_probability(
            family,
            base,
            partition,
            target,
            delta,
            n,
            replicates,
            stream.child(n as u64),
            workers,
        )?;
        probs.push(b.prob);
        errs.push(b.std_err);
    }
    let theory = theory_rate(family, target, &project(base, partition))?;
    RateEstimate::new(n_values.to_vec(), probs, errs, theory, RateMethod::MonteCarlo)
}

/// Least-squares fit `log P ≈ -slope·n + intercept` over points with `P > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `log P`.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_rate(estimate: &RateEstimate) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = estimate
        .n_values
        .iter()
        .zip(&estimate.probs)
        .filter(|(_, &p)| p > 0.0 && p.is_finite())
        .map(|(&n, &p)| (n as f64, p.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} usable points, at least 3 with nonzero probability needed",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - beta * p.0).powi(2)).sum();
    Ok(RateFit { slope: -beta, intercept, residual: (rss / k).sqrt(), points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::j_divergence;

    fn sv(v: &[f64]) -> SimplexVector {
        SimplexVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn finite_rates() {
        let p = sv(&[0.5, 0.5]);
        let q = sv(&[0.25, 0.75]);
        assert_eq!(multinomial_rate(&p, &p).unwrap(), 0.0);
        assert!((multinomial_rate(&q, &p).unwrap() - 0.130812).abs() < 1e-6);
        assert_eq!(multinomial_rate(&q, &sv(&[0.0, 1.0])).unwrap(), f64::INFINITY);
        assert_eq!(dirichlet_rate(&p, &p).unwrap(), 0.0);
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((dirichlet_rate(&q, &p).unwrap() - expected).abs() < 1e-15);
        assert_eq!(dirichlet_rate(&sv(&[1.0, 0.0]), &p).unwrap(), f64::INFINITY);
        assert_eq!(dirichlet_rate(&q, &p).unwrap(), multinomial_rate(&p, &q).unwrap());
    }

    #[test]
    fn joint_rate_contracts_to_j() {
        let q = sv(&[0.7, 0.3]);
        let p = sv(&[0.5, 0.5]);
        assert_eq!(joint_rate(&p, &p, &p).unwrap(), 0.0);
        assert!((joint_rate(&q, &q, &p).unwrap() - 0.082282).abs() < 1e-6);
        let steps = 100_000;
        let best = (1..steps)
            .map(|i| joint_rate(&SimplexVector::binary(i as f64 / steps as f64).unwrap(), &q, &p).unwrap())
            .fold(f64::INFINITY, f64::min);
        let j = j_divergence(&q, &p).unwrap();
        assert!(best >= j - 1e-12);
        assert!((best - j).abs() < 1e-6);
    }

    #[test]
    fn exact_ball_examples() {
        assert!((exact_ball_probability_binary(0.5, 1.0, 0.2, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(exact_ball_probability_binary(0.3, 0.6, 2.0, 40).unwrap(), 1.0);
        assert_eq!(exact_ball_probability_binary(0.3, 1.0, 2.5, 40).unwrap(), 1.0);
        let j = -2.0 * (0.35f64.sqrt() + 0.15f64.sqrt()).ln();
        let p = exact_ball_probability_binary(0.5, 0.7, 0.1, 200).unwrap();
        let rate = -p.ln() / 200.0;
        assert!((rate - j).abs() <= 0.05, "{rate}");
        assert!(exact_ball_probability_binary(0.0, 0.5, 0.1, 5).is_err());
        assert!(exact_ball_probability_binary(0.5, 1.5, 0.1, 5).is_err());
        assert!(exact_ball_probability_binary(0.5, 0.5, 0.0, 5).is_err());
        assert!(exact_ball_probability_binary(0.5, 0.5, 0.1, 0).is_err());
    }

    #[test]
    fn exact_ball_by_enumeration_small_n() {
        // n = 2: k = 1 gives X ~ Beta(1, 1), uniform on (0, 1).
        let p = 0.3;
        let got = exact_ball_probability_binary(p, 0.4, 0.3, 2).unwrap();
        let expected = 2.0 * p * (1.0 - p) * 0.3;
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn fit_recovers_exponentials() {
        let ns: Vec<usize> = (1..=10).map(|i| 10 * i).collect();
        let probs: Vec<f64> = ns.iter().map(|&n| (-0.1 * n as f64).exp()).collect();
        let est = RateEstimate::new(ns.clone(), probs, vec![0.0; 10], 0.1, RateMethod::ExactBinary).unwrap();
        let fit = fit_rate(&est).unwrap();
        assert!((fit.slope - 0.1).abs() < 1e-9);
        let probs: Vec<f64> = ns.iter().map(|&n| 7.0 * (-0.1 * n as f64).exp()).collect();
        let est = RateEstimate::new(ns, probs, vec![0.0; 10], 0.1, RateMethod::ExactBinary).unwrap();
        let fit = fit_rate(&est).unwrap();
        assert!((fit.slope - 0.1).abs() < 1e-9);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn fit_needs_three_points() {
        let est =
            RateEstimate::new(vec![1, 2, 3], vec![0.5, 0.0, 0.1], vec![0.0; 3], 0.0, RateMethod::MonteCarlo).unwrap();
        assert!(matches!(fit_rate(&est), Err(Error::Degenerate(_))));
        assert_eq!(est.zero_hit_points(), vec![2]);
        assert_eq!(est.log_rates[1], f64::INFINITY);
    }

    #[test]
    fn rate_estimate_checks_shape() {
        assert!(RateEstimate::new(vec![2, 1], vec![0.1, 0.1], vec![0.0; 2], 0.0, RateMethod::MonteCarlo).is_err());
        assert!(RateEstimate::new(vec![1, 2], vec![0.1], vec![0.0; 2], 0.0, RateMethod::MonteCarlo).is_err());
    }

    #[test]
    fn mc_matches_exact_for_wn() {
        let base = DiscreteMeasure::uniform_grid(1000).unwrap();
        let part = Partition::new(vec![0.5]).unwrap();
        let target = sv(&[0.6, 0.4]);
        let mc =
            mc_ball_probability(Family::Wn, &base, &part, &target, 0.1, 30, 20_000, RngStream::new(3, 0), 2).unwrap();
        let exact = exact_ball_probability_binary(0.5, 0.6, 0.1, 30).unwrap();
        assert!((mc.prob - exact).abs() <= 3.0 * mc.std_err, "{} vs {exact}", mc.prob);
    }

    #[test]
    fn mc_large_ball_and_determinism() {
        let base = DiscreteMeasure::uniform_grid(64).unwrap();
        let part = Partition::new(vec![0.5]).unwrap();
        let centre = project(&base, &part);
        for fam in Family::ALL {
            let b = mc_ball_probability(fam, &base, &part, &centre, 2.5, 20, 1000, RngStream::new(1, 0), 3).unwrap();
            assert_eq!(b.prob, 1.0);
        }
        let target = sv(&[0.7, 0.3]);
        let run = |w| {
            mc_ball_probability(Family::Empirical, &base, &part, &target, 0.1, 20, 5000, RngStream::new(9, 0), w)
                .unwrap()
        };
        assert_eq!(run(2), run(2));
        assert_eq!(run(1).workers, 1);
        assert!(mc_ball_probability(Family::Wn, &base, &part, &target, 0.1, 20, 999, RngStream::new(1, 0), 1).is_err());
        let far = mc_ball_probability(
            Family::Empirical,
            &base,
            &part,
            &sv(&[1.0, 0.0]),
            1e-6,
            50,
            1000,
            RngStream::new(1, 0),
            1,
        )
        .unwrap();
        assert!(far.zero_hits);
    }

    #[test]
    fn binary_bracket_endpoints() {
        let (lo, hi) = binary_rate_bracket(Family::Wn, 0.7, 0.5, 0.1).unwrap();
        let j =
            |q: f64| j_divergence(&SimplexVector::binary(q).unwrap(), &SimplexVector::binary(0.5).unwrap()).unwrap();
        assert!((lo - j(0.65)).abs() < 1e-15);
        assert!((hi - j(0.7)).abs() < 1e-15);
        let (lo, _) = binary_rate_bracket(Family::Empirical, 0.52, 0.5, 0.1).unwrap();
        assert_eq!(lo, 0.0);
    }
}
