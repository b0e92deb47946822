//! Seeded samplers for random probability measures built from a base law:
//! the empirical measure `L_n`, the flat-Dirichlet weighted measure `W_n`,
//! truncated stick-breaking Dirichlet processes and their posteriors.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Beta, Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, Partition, SimplexVector};

/// Reproducible random stream: a seed and a stream index.
///
/// `(seed, stream_id)` selects one of `2⁶⁴` independent ChaCha8 streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Sub-stream `k`, e.g. one per worker. Children of different parents
    /// live under different keys, so they do not collide.
    pub fn child(&self, k: u64) -> RngStream {
        RngStream { seed: splitmix64(self.seed ^ splitmix64(self.stream_id)), stream_id: k }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A random measure realization `Σ wᵢ δ_{aᵢ}`. Atoms may repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAtoms {
    atoms: Vec<f64>,
    weights: SimplexVector,
}

impl WeightedAtoms {
    pub fn new(atoms: Vec<f64>, weights: SimplexVector) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch { left: atoms.len(), right: weights.len() });
        }
        if let Some(&a) = atoms.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidMeasure(format!("atom {a} outside [0, 1]")));
        }
        Ok(WeightedAtoms { atoms, weights })
    }

    fn from_raw(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        let weights = SimplexVector::from_weights(weights).expect("sampler weights are positive");
        WeightedAtoms { atoms, weights }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.coords()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Cell masses on `partition`.
    pub fn project(&self, partition: &Partition) -> SimplexVector {
        let mut cells = vec![0.0; partition.cells()];
        for (&a, &w) in self.atoms.iter().zip(self.weights()) {
            cells[partition.cell_of(a)] += w;
        }
        SimplexVector::from_weights(cells).expect("weights sum to one")
    }

    /// Same law as a [`DiscreteMeasure`], with repeated atoms merged.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::from_atoms(&self.atoms, self.weights())
    }
}

/// `Σ wᵢ f(aᵢ)`, with `f(x) = x` when no function is given.
pub fn mean_functional(w: &WeightedAtoms, f: Option<&dyn Fn(f64) -> f64>) -> f64 {
    let pairs = w.atoms.iter().zip(w.weights());
    match f {
        Some(f) => pairs.map(|(&a, &p)| p * f(a)).sum(),
        None => pairs.map(|(&a, &p)| p * a).sum(),
    }
}

/// Default stick-breaking truncation `⌈10(θ + 1)⌉`.
pub fn default_truncation(theta: f64) -> usize {
    (10.0 * (theta + 1.0)).ceil() as usize
}

/// `U ~ Beta(1, θ)` by inversion, `U = 1 - V^{1/θ}`. Returns `(U, 1 - U)`.
#[inline]
fn stick(rng: &mut (impl Rng + ?Sized), theta: f64) -> (f64, f64) {
    // V in (0, 1]
    let v = 1.0 - rng.random::<f64>();
    let e = v.ln() / theta;
    (-e.exp_m1(), e.exp())
}

/// Alias-table sampler for the atoms of a base law.
#[derive(Debug, Clone)]
pub struct BaseSampler {
    support: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
}

impl BaseSampler {
    pub fn new(base: &DiscreteMeasure) -> Result<Self> {
        let alias = WeightedAliasIndex::new(base.mass().to_vec())
            .map_err(|e| Error::InvalidMeasure(format!("cannot build alias table: {e}")))?;
        Ok(BaseSampler { support: base.support().to_vec(), alias })
    }

    #[inline]
    pub fn draw(&self, rng: &mut (impl Rng + ?Sized)) -> f64 {
        self.support[self.alias.sample(rng)]
    }

    /// Visits the `n` atoms of an empirical measure, each with weight `1/n`.
    pub fn visit_empirical(&self, n: usize, rng: &mut (impl Rng + ?Sized), mut f: impl FnMut(f64, f64)) {
        let w = 1.0 / n as f64;
        for _ in 0..n {
            f(self.draw(rng), w);
        }
    }

    /// Visits the atoms of `W_n` with their *unnormalized* exponential
    /// weights and returns the total weight.
    pub fn visit_wn(&self, n: usize, rng: &mut (impl Rng + ?Sized), mut f: impl FnMut(f64, f64)) -> f64 {
        let mut total = 0.0;
        for _ in 0..n {
            let e: f64 = Exp1.sample(rng);
            total += e;
            f(self.draw(rng), e);
        }
        total
    }

    /// Visits `k` stick-breaking atoms and a final atom carrying the
    /// remainder `Π(1 - Uᵢ)`; the visited weights sum to one.
    pub fn visit_dp(&self, theta: f64, k: usize, rng: &mut (impl Rng + ?Sized), mut f: impl FnMut(f64, f64)) {
        let mut rest = 1.0;
        for _ in 0..k {
            let (u, keep) = stick(rng, theta);
            f(self.draw(rng), rest * u);
            rest *= keep;
        }
        f(self.draw(rng), rest);
    }

    pub fn empirical(&self, n: usize, rng: &mut (impl Rng + ?Sized)) -> WeightedAtoms {
        let mut atoms = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        self.visit_empirical(n, rng, |a, w| {
            atoms.push(a);
            weights.push(w);
        });
        WeightedAtoms::from_raw(atoms, weights)
    }

    pub fn wn(&self, n: usize, rng: &mut (impl Rng + ?Sized)) -> WeightedAtoms {
        let mut atoms = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        self.visit_wn(n, rng, |a, w| {
            atoms.push(a);
            weights.push(w);
        });
        WeightedAtoms::from_raw(atoms, weights)
    }

    pub fn dp(&self, theta: f64, k: usize, rng: &mut (impl Rng + ?Sized)) -> WeightedAtoms {
        let mut atoms = Vec::with_capacity(k + 1);
        let mut weights = Vec::with_capacity(k + 1);
        self.visit_dp(theta, k, rng, |a, w| {
            atoms.push(a);
            weights.push(w);
        });
        // Beta(1, θ) with very small θ can return exactly 1, which leaves
        // later weights at zero; SimplexVector accepts that.
        WeightedAtoms::from_raw(atoms, weights)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be positive and finite, got {theta}")));
    }
    Ok(())
}

/// `L_n = (1/n) Σ δ_{ξᵢ}` with `ξᵢ` i.i.d. from `base`.
pub fn sample_empirical(base: &DiscreteMeasure, n: usize, rng: &mut (impl Rng + ?Sized)) -> Result<WeightedAtoms> {
    check_n(n)?;
    Ok(BaseSampler::new(base)?.empirical(n, rng))
}

/// `W_n = Σ X_{ni} δ_{ξᵢ}` with flat-Dirichlet weights.
pub fn sample_wn(base: &DiscreteMeasure, n: usize, rng: &mut (impl Rng + ?Sized)) -> Result<WeightedAtoms> {
    check_n(n)?;
    Ok(BaseSampler::new(base)?.wn(n, rng))
}

/// Dirichlet process `DP(θ, base)` truncated after `truncation` sticks;
/// `None` uses [`default_truncation`].
pub fn sample_dp(
    base: &DiscreteMeasure,
    theta: f64,
    truncation: Option<usize>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<WeightedAtoms> {
    check_theta(theta)?;
    let k = truncation.unwrap_or_else(|| default_truncation(theta));
    if k == 0 {
        return Err(Error::InvalidParameter("truncation must be at least 1".into()));
    }
    Ok(BaseSampler::new(base)?.dp(theta, k, rng))
}

/// `Σ Wᵢ Zᵢ / Σ Wⱼ` for `n` independent components `Zᵢ` and weights `Wᵢ`.
pub fn sample_wn_general<R: Rng + ?Sized>(
    mut component: impl FnMut(&mut R) -> WeightedAtoms,
    mut weight: impl FnMut(&mut R) -> f64,
    n: usize,
    rng: &mut R,
) -> Result<WeightedAtoms> {
    check_n(n)?;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    let mut total = 0.0;
    for _ in 0..n {
        let w = weight(rng);
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!("mixture weight {w} is not positive")));
        }
        total += w;
        let z = component(rng);
        atoms.extend_from_slice(z.atoms());
        weights.extend(z.weights().iter().map(|p| p * w));
    }
    weights.iter_mut().for_each(|p| *p /= total);
    Ok(WeightedAtoms::from_raw(atoms, weights))
}

/// Posterior of a `DP(θ, base)` prior after `observations`:
/// `U·DP(θ, base) + (1 - U)·Σ Xᵢ δ_{ηᵢ}` with `U ~ Beta(θ, n)` and flat
/// Dirichlet `Xᵢ`.
pub fn sample_posterior(
    base: &DiscreteMeasure,
    theta: f64,
    observations: &[f64],
    truncation: Option<usize>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<WeightedAtoms> {
    check_theta(theta)?;
    if observations.is_empty() {
        return Err(Error::InvalidParameter("posterior needs at least one observation".into()));
    }
    if let Some(&y) = observations.iter().find(|y| !(0.0..=1.0).contains(*y)) {
        return Err(Error::InvalidMeasure(format!("observation {y} outside [0, 1]")));
    }
    let n = observations.len() as f64;
    let u = Beta::new(theta, n).map_err(|e| Error::InvalidParameter(e.to_string()))?.sample(rng);
    let prior = sample_dp(base, theta, truncation, rng)?;
    let mut atoms = prior.atoms().to_vec();
    let mut weights: Vec<f64> = prior.weights().iter().map(|p| p * u).collect();
    let raw: Vec<f64> = observations.iter().map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    atoms.extend_from_slice(observations);
    weights.extend(raw.iter().map(|e| (1.0 - u) * e / total));
    Ok(WeightedAtoms::from_raw(atoms, weights))
}

/// Random-measure families used by the simulators and rate experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `L_n`
    Empirical,
    /// `W_n`
    Wn,
    /// `DP(θ, base)`
    Dp,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Empirical, Family::Wn, Family::Dp];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Empirical => "empirical",
            Family::Wn => "wn",
            Family::Dp => "dp",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "empirical" | "ln" => Ok(Family::Empirical),
            "wn" => Ok(Family::Wn),
            "dp" => Ok(Family::Dp),
            other => Err(Error::Parse(format!("unknown family '{other}' (expected empirical, wn or dp)"))),
        }
    }
}

/// One realization of `⟨·, f⟩` per replicate, drawn sequentially from
/// `stream`. `theta` is used by the `dp` family only.
pub fn simulate_functional(
    family: Family,
    base: &DiscreteMeasure,
    n: usize,
    theta: f64,
    replicates: usize,
    stream: RngStream,
    f: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    check_n(n)?;
    if family == Family::Dp {
        check_theta(theta)?;
    }
    let sampler = BaseSampler::new(base)?;
    let k = default_truncation(theta);
    let mut rng = stream.generator();
    let mut out = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let mut acc = 0.0;
        let value = match family {
            Family::Empirical => {
                sampler.visit_empirical(n, &mut rng, |a, w| acc += w * f(a));
                acc
            }
            Family::Wn => {
                let total = sampler.visit_wn(n, &mut rng, |a, w| acc += w * f(a));
                acc / total
            }
            Family::Dp => {
                sampler.visit_dp(theta, k, &mut rng, |a, w| acc += w * f(a));
                acc
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Writes `replicate_id,n,functional_value` rows.
pub fn write_functional_csv(mut out: impl Write, n: usize, values: &[f64]) -> Result<()> {
    writeln!(out, "replicate_id,n,functional_value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{n},{v:.17e}")?;
    }
    Ok(())
}

/// Sample mean and unbiased variance.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
