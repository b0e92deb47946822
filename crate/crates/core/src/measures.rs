//! Finite probability measures on `[0, 1]`, partitions of the unit interval
//! and the cell-probability vectors they induce.
//!
//! Continuous laws (Lebesgue on `[0, 1]` in particular) are carried as
//! equal-mass grids on cell midpoints, see [`DiscreteMeasure::uniform_grid`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted deviation of input masses from unit sum before renormalizing.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-9;

/// Internal unit-sum invariant after renormalization.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Default number of grid points for a discretized Lebesgue measure.
pub const DEFAULT_GRID: usize = 1024;

/// Tolerance used when matching cut points between partitions.
pub const CUT_TOLERANCE: f64 = 1e-12;

/// A probability measure with finitely many atoms in `[0, 1]`.
///
/// Support points are strictly increasing; masses are nonnegative and sum
/// to one. Zero-mass atoms are allowed and kept.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from strictly increasing support points and masses
    /// summing to one within [`INPUT_SUM_TOLERANCE`].
    pub fn new(support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        let total = check_atoms(&support, &mass)?;
        if (total - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self::normalized(support, mass, total))
    }

    /// Like [`DiscreteMeasure::new`] but accepts any positive total mass.
    pub fn from_weights(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total = check_atoms(&support, &weights)?;
        Ok(Self::normalized(support, weights, total))
    }

    /// Builds a measure from unordered, possibly repeated atoms. Repeated
    /// locations are merged and the result is normalized.
    pub fn from_atoms(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch { left: atoms.len(), right: weights.len() });
        }
        let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(weights.iter().copied()).collect();
        for &(x, w) in &pairs {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidMeasure(format!("atom {x} outside [0, 1]")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("weight {w} is not a finite nonnegative number")));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support = Vec::with_capacity(pairs.len());
        let mut mass: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match support.last() {
                Some(&last) if last == x => *mass.last_mut().unwrap() += w,
                _ => {
                    support.push(x);
                    mass.push(w);
                }
            }
        }
        Self::from_weights(support, mass)
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    /// Uniform law on `n` cell midpoints `(i + 1/2) / n`, each of mass `1/n`.
    ///
    /// This is the discretization of Lebesgue measure on `[0, 1]`. Midpoints
    /// keep the mean at exactly one half and make every moment integral a
    /// midpoint-rule quadrature.
    pub fn uniform_grid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("grid size must be positive".into()));
        }
        let h = 1.0 / n as f64;
        let support = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let mass = vec![h; n];
        Self::from_weights(support, mass)
    }

    /// Convex combination `Σ cᵢ μᵢ` of measures; coefficients are normalized.
    pub fn mixture(components: &[(f64, &DiscreteMeasure)]) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for &(c, m) in components {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidMeasure(format!("mixture coefficient {c}")));
            }
            atoms.extend_from_slice(&m.support);
            weights.extend(m.mass.iter().map(|w| c * w));
        }
        Self::from_atoms(&atoms, &weights)
    }

    /// Histogram of samples on `bins` equal-width cells, each cell carried by
    /// its midpoint. The last cell is closed on the right.
    pub fn histogram(samples: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidMeasure("histogram needs at least one bin".into()));
        }
        let mut counts = vec![0.0; bins];
        for &s in samples {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidMeasure(format!("sample {s} outside [0, 1]")));
            }
            counts[bin_index(s, bins)] += 1.0;
        }
        let support = (0..bins).map(|i| (i as f64 + 0.5) / bins as f64).collect();
        Self::from_weights(support, counts)
    }

    /// Re-bins the measure onto `bins` equal-width cells carried by their
    /// midpoints.
    pub fn coarsen(&self, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidMeasure("coarsening needs at least one bin".into()));
        }
        let mut mass = vec![0.0; bins];
        for (x, w) in self.iter() {
            mass[bin_index(x, bins)] += w;
        }
        let support = (0..bins).map(|i| (i as f64 + 0.5) / bins as f64).collect();
        Self::from_weights(support, mass)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Iterates `(point, mass)` pairs in increasing point order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.mass.iter().copied())
    }

    /// `⟨μ, f⟩`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|x| (x - m) * (x - m))
    }

    /// Smallest and largest support points carrying positive mass.
    pub fn positive_hull(&self) -> (f64, f64) {
        let mut pos = self.iter().filter(|&(_, w)| w > 0.0).map(|(x, _)| x);
        let lo = pos.next().unwrap_or(f64::NAN);
        let hi = pos.last().unwrap_or(lo);
        (lo, hi)
    }

    /// The restriction to atoms with positive mass.
    pub fn positive_part(&self) -> DiscreteMeasure {
        let (support, mass) = self.iter().filter(|&(_, w)| w > 0.0).unzip();
        DiscreteMeasure { support, mass }
    }

    /// Reads a measure file (see [`MeasureSpec`]).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        MeasureSpec::from_json(&text)?.to_measure()
    }

    fn normalized(support: Vec<f64>, mut mass: Vec<f64>, total: f64) -> Self {
        mass.iter_mut().for_each(|w| *w /= total);
        DiscreteMeasure { support, mass }
    }
}

fn bin_index(x: f64, bins: usize) -> usize {
    ((x * bins as f64) as usize).min(bins - 1)
}

fn check_atoms(support: &[f64], mass: &[f64]) -> Result<f64> {
    if support.len() != mass.len() {
        return Err(Error::LengthMismatch { left: support.len(), right: mass.len() });
    }
    if support.is_empty() {
        return Err(Error::InvalidMeasure("empty support".into()));
    }
    for (i, &x) in support.iter().enumerate() {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidMeasure(format!("support point {x} outside [0, 1]")));
        }
        if i > 0 && support[i - 1] >= x {
            return Err(Error::InvalidMeasure(format!("support not strictly increasing at index {i}")));
        }
    }
    let mut total = 0.0;
    for &w in mass {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("mass {w} is not a finite nonnegative number")));
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::InvalidMeasure("total mass is zero".into()));
    }
    Ok(total)
}

/// Ordered interior cut points `0 < t₁ < … < t_m < 1`.
///
/// The induced cells are `[0, t₁), [t₁, t₂), …, [t_m, 1]`: left-closed,
/// right-open, except the last which is closed. An atom sitting exactly on a
/// cut belongs to the cell on its right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    cuts: Vec<f64>,
}

impl Partition {
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::InvalidPartition("at least one cut is required".into()));
        }
        for (i, &t) in cuts.iter().enumerate() {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidPartition(format!("cut {t} is not in (0, 1)")));
            }
            if i > 0 && cuts[i - 1] >= t {
                return Err(Error::InvalidPartition(format!("cuts not strictly increasing at index {i}")));
            }
        }
        Ok(Partition { cuts })
    }

    /// `m - 1` equally spaced cuts giving `m` cells of width `1/m`.
    pub fn equal_cells(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidPartition("need at least two cells".into()));
        }
        Self::new((1..m).map(|i| i as f64 / m as f64).collect())
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Number of cells, `m + 1`.
    pub fn cells(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Index of the cell containing `x`.
    pub fn cell_of(&self, x: f64) -> usize {
        self.cuts.partition_point(|&t| t <= x)
    }
}

/// Probability vector `(p₁, …, p_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexVector {
    coords: Vec<f64>,
}

impl SimplexVector {
    /// Accepts coordinates summing to one within [`INPUT_SUM_TOLERANCE`] and
    /// renormalizes them.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let total = check_simplex(&coords)?;
        if (total - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::InvalidSimplex(format!("coordinates sum to {total}")));
        }
        Ok(Self::scaled(coords, total))
    }

    /// Normalizes arbitrary nonnegative weights with positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = check_simplex(&weights)?;
        Ok(Self::scaled(weights, total))
    }

    /// Two-cell vector `(q, 1 - q)`.
    pub fn binary(q: f64) -> Result<Self> {
        Self::new(vec![q, 1.0 - q])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Merges the cells of a vector projected on `fine` into the cells of
    /// `coarse`. Fails unless `fine` refines `coarse`.
    pub fn merge_cells(&self, fine: &Partition, coarse: &Partition) -> Result<SimplexVector> {
        if self.len() != fine.cells() {
            return Err(Error::LengthMismatch { left: self.len(), right: fine.cells() });
        }
        if !refine(coarse, fine) {
            return Err(Error::InvalidPartition("fine partition does not refine coarse".into()));
        }
        let mut out = vec![0.0; coarse.cells()];
        // Fine cell i starts at cut i-1 (or 0); it lies inside the coarse
        // cell containing its left endpoint.
        for (i, &p) in self.coords.iter().enumerate() {
            let left = if i == 0 { 0.0 } else { fine.cuts()[i - 1] };
            let j = coarse.cuts().partition_point(|&t| t <= left + CUT_TOLERANCE);
            out[j] += p;
        }
        SimplexVector::from_weights(out)
    }

    fn scaled(mut coords: Vec<f64>, total: f64) -> Self {
        coords.iter_mut().for_each(|p| *p /= total);
        SimplexVector { coords }
    }
}

fn check_simplex(coords: &[f64]) -> Result<f64> {
    if coords.is_empty() {
        return Err(Error::InvalidSimplex("empty vector".into()));
    }
    let mut total = 0.0;
    for &p in coords {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidSimplex(format!("coordinate {p} is not a finite nonnegative number")));
        }
        total += p;
    }
    if total <= 0.0 {
        return Err(Error::InvalidSimplex("all coordinates are zero".into()));
    }
    Ok(total)
}

/// Cell probabilities `(μ([0,t₁)), …, μ([t_m,1]))`.
pub fn project(measure: &DiscreteMeasure, partition: &Partition) -> SimplexVector {
    let mut coords = vec![0.0; partition.cells()];
    for (x, w) in measure.iter() {
        coords[partition.cell_of(x)] += w;
    }
    // Total mass is one, so the total here is positive.
    SimplexVector::from_weights(coords).expect("projection of a probability measure")
}

/// True iff every cut of `coarse` also appears among the cuts of `fine`.
pub fn refine(coarse: &Partition, fine: &Partition) -> bool {
    coarse.cuts().iter().all(|&t| fine.cuts().iter().any(|&s| (s - t).abs() <= CUT_TOLERANCE))
}

/// Two objects that can be laid out on a common index set.
///
/// Measures merge their supports (a point missing from one side gets mass
/// zero there); simplex vectors must have equal length.
pub trait Aligned {
    fn aligned(&self, other: &Self) -> Result<(Vec<f64>, Vec<f64>)>;
}

impl Aligned for SimplexVector {
    fn aligned(&self, other: &Self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok((self.coords.clone(), other.coords.clone()))
    }
}

impl Aligned for DiscreteMeasure {
    fn aligned(&self, other: &Self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut i, mut j) = (0, 0);
        let cap = self.len() + other.len();
        let (mut a, mut b) = (Vec::with_capacity(cap), Vec::with_capacity(cap));
        while i < self.len() || j < other.len() {
            let x = self.support.get(i).copied().unwrap_or(f64::INFINITY);
            let y = other.support.get(j).copied().unwrap_or(f64::INFINITY);
            if x == y {
                a.push(self.mass[i]);
                b.push(other.mass[j]);
                i += 1;
                j += 1;
            } else if x < y {
                a.push(self.mass[i]);
                b.push(0.0);
                i += 1;
            } else {
                a.push(0.0);
                b.push(other.mass[j]);
                j += 1;
            }
        }
        Ok((a, b))
    }
}

/// Total variation in the L1 convention, `Σ |aᵢ - bᵢ| = 2 sup_A |a(A) - b(A)|`;
/// ranges over `[0, 2]`.
pub fn tv_distance<T: Aligned>(a: &T, b: &T) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    Ok(l1(&a, &b))
}

/// `Σᵢ |aᵢ - bᵢ|` between cell-probability vectors.
pub fn partition_distance(a: &SimplexVector, b: &SimplexVector) -> Result<f64> {
    let (a, b) = a.aligned(b)?;
    Ok(l1(&a, &b))
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// On-disk measure description.
///
/// ```json
/// {"kind":"discrete","support":[0.25,0.75],"mass":[0.5,0.5]}
/// {"kind":"grid","n":1024}
/// {"kind":"mixture","components":[
///     {"weight":0.5,"measure":{"kind":"grid","n":4096}},
///     {"weight":0.5,"measure":{"kind":"discrete","support":[0.0],"mass":[1.0]}}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Discrete { support: Vec<f64>, mass: Vec<f64> },
    Grid { n: usize },
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub measure: MeasureSpec,
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure spec serializes")
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        match self {
            MeasureSpec::Discrete { support, mass } => DiscreteMeasure::new(support.clone(), mass.clone()),
            MeasureSpec::Grid { n } => DiscreteMeasure::uniform_grid(*n),
            MeasureSpec::Mixture { components } => {
                let parts =
                    components.iter().map(|c| Ok((c.weight, c.measure.to_measure()?))).collect::<Result<Vec<_>>>()?;
                let refs: Vec<(f64, &DiscreteMeasure)> = parts.iter().map(|(w, m)| (*w, m)).collect();
                DiscreteMeasure::mixture(&refs)
            }
        }
    }
}

impl From<&DiscreteMeasure> for MeasureSpec {
    fn from(m: &DiscreteMeasure) -> Self {
        MeasureSpec::Discrete { support: m.support.clone(), mass: m.mass.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(c: &[f64]) -> SimplexVector {
        SimplexVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn project_uniform_grid_halves() {
        let grid = DiscreteMeasure::uniform_grid(100).unwrap();
        let p = project(&grid, &Partition::new(vec![0.5]).unwrap());
        assert!((p.coords()[0] - 0.5).abs() < 1e-12);
        assert!((p.coords()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn project_point_mass() {
        let d = DiscreteMeasure::dirac(0.3).unwrap();
        let p = project(&d, &Partition::new(vec![0.5]).unwrap());
        assert_eq!(p.coords(), &[1.0, 0.0]);
    }

    #[test]
    fn atom_on_cut_goes_right() {
        let m = DiscreteMeasure::new(vec![0.25, 0.5, 0.75], vec![0.2, 0.3, 0.5]).unwrap();
        let p = project(&m, &Partition::new(vec![0.5]).unwrap());
        assert!((p.coords()[0] - 0.2).abs() < 1e-15);
        assert!((p.coords()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn last_cell_is_closed() {
        let m = DiscreteMeasure::new(vec![0.0, 1.0], vec![0.4, 0.6]).unwrap();
        let p = project(&m, &Partition::new(vec![0.3, 0.6]).unwrap());
        assert_eq!(p.coords(), &[0.4, 0.0, 0.6]);
    }

    #[test]
    fn refine_examples() {
        let p = |c: &[f64]| Partition::new(c.to_vec()).unwrap();
        assert!(refine(&p(&[0.5]), &p(&[0.25, 0.5, 0.75])));
        assert!(!refine(&p(&[0.3]), &p(&[0.25, 0.5])));
        assert!(refine(&p(&[0.5]), &p(&[0.5])));
    }

    #[test]
    fn tv_examples() {
        let d0 = DiscreteMeasure::dirac(0.0).unwrap();
        let d1 = DiscreteMeasure::dirac(1.0).unwrap();
        assert_eq!(tv_distance(&d0, &d1).unwrap(), 2.0);
        assert_eq!(tv_distance(&d0, &d0).unwrap(), 0.0);
        let tv = tv_distance(&sv(&[0.7, 0.3]), &sv(&[0.5, 0.5])).unwrap();
        assert!((tv - 0.4).abs() < 1e-15);
    }

    #[test]
    fn partition_distance_examples() {
        assert_eq!(partition_distance(&sv(&[0.3, 0.7]), &sv(&[0.3, 0.7])).unwrap(), 0.0);
        assert_eq!(partition_distance(&sv(&[1.0, 0.0]), &sv(&[0.0, 1.0])).unwrap(), 2.0);
        let d = partition_distance(&sv(&[0.7, 0.3]), &sv(&[0.65, 0.35])).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert!(matches!(partition_distance(&sv(&[1.0]), &sv(&[0.5, 0.5])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(DiscreteMeasure::new(vec![0.5, 0.2], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.2, 1.5], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.2, 0.5], vec![-0.1, 1.1]).is_err());
        assert!(DiscreteMeasure::new(vec![0.2, 0.5], vec![0.5, 0.6]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![0.0]).is_err());
        assert!(Partition::new(vec![0.6, 0.4]).is_err());
        assert!(SimplexVector::new(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let m = DiscreteMeasure::new(vec![0.1, 0.9], vec![0.5, 0.5 + 5e-10]).unwrap();
        let s: f64 = m.mass().iter().sum();
        assert!((s - 1.0).abs() < SUM_TOLERANCE);
    }

    #[test]
    fn mixture_merges_shared_atoms() {
        let grid = DiscreteMeasure::uniform_grid(4).unwrap();
        let d0 = DiscreteMeasure::dirac(0.0).unwrap();
        let m = DiscreteMeasure::mixture(&[(0.5, &grid), (0.5, &d0)]).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m.support()[0], 0.0);
        assert!((m.mass()[0] - 0.5).abs() < 1e-15);
        let g = DiscreteMeasure::mixture(&[(0.5, &grid), (0.5, &grid)]).unwrap();
        assert_eq!(g, grid);
    }

    #[test]
    fn merge_cells_matches_coarse_projection() {
        let m = DiscreteMeasure::new(vec![0.1, 0.3, 0.5, 0.8], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let fine = Partition::new(vec![0.2, 0.5, 0.7]).unwrap();
        let coarse = Partition::new(vec![0.5]).unwrap();
        let merged = project(&m, &fine).merge_cells(&fine, &coarse).unwrap();
        let direct = project(&m, &coarse);
        assert!(partition_distance(&merged, &direct).unwrap() < 1e-15);
        assert!(project(&m, &coarse).merge_cells(&coarse, &fine).is_err());
    }

    #[test]
    fn measure_file_round_trip() {
        let spec = MeasureSpec::from_json(r#"{"kind":"grid","n":8}"#).unwrap();
        assert_eq!(spec.to_measure().unwrap().len(), 8);
        let spec = MeasureSpec::from_json(r#"{"kind":"discrete","support":[0.2,0.4],"mass":[0.25,0.75]}"#).unwrap();
        let m = spec.to_measure().unwrap();
        assert_eq!(MeasureSpec::from(&m), spec);
        assert!(MeasureSpec::from_json(r#"{"kind":"gaussian"}"#).is_err());
        let mixed = MeasureSpec::from_json(
            r#"{"kind":"mixture","components":[
                {"weight":0.5,"measure":{"kind":"grid","n":4}},
                {"weight":0.5,"measure":{"kind":"discrete","support":[0.0],"mass":[1.0]}}]}"#,
        )
        .unwrap()
        .to_measure()
        .unwrap();
        assert_eq!(mixed.support(), &[0.0, 0.125, 0.375, 0.625, 0.875]);
        assert_eq!(mixed.mass(), &[0.5, 0.125, 0.125, 0.125, 0.125]);
    }

    #[test]
    fn coarsen_and_histogram() {
        let grid = DiscreteMeasure::uniform_grid(1024).unwrap();
        let c = grid.coarsen(8).unwrap();
        assert_eq!(c.len(), 8);
        assert!(c.mass().iter().all(|&w| (w - 0.125).abs() < 1e-15));
        let h = DiscreteMeasure::histogram(&[0.0, 0.49, 0.5, 1.0], 2).unwrap();
        assert_eq!(h.mass(), &[0.5, 0.5]);
    }
}
