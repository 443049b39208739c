//! Localization diagnostics: imbalance, entanglement and participation
//! entropies, magnetization profiles, density of states and time averages.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::SpinBasis;
use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::model::Spectrum;

/// Default relative degeneracy tolerance for the participation entropy.
pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Observable records on a shared time grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub imbalance: Vec<f64>,
    /// Entanglement entropy (bits) across `cut`.
    pub entropy: Vec<f64>,
    pub cut: usize,
    /// `magnetization[k][j-1] = ⟨Sᶻ_j(t_k)⟩`.
    pub magnetization: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn new(cut: usize) -> Self {
        Self {
            cut,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Measure `psi` at time `t` against the initial profile `initial`.
    pub fn record(&mut self, t: f64, psi: &StateVector, basis: &SpinBasis, initial: &[f64]) -> Result<()> {
        let profile = magnetization_profile(psi, basis)?;
        self.times.push(t);
        self.imbalance.push(imbalance_from_profiles(&profile, initial, basis.two_s()));
        self.entropy.push(entanglement_entropy(psi, self.cut, basis)?);
        self.magnetization.push(profile);
        Ok(())
    }
}

fn check_basis(psi: &StateVector, basis: &SpinBasis) -> Result<()> {
    if psi.tag() != basis.tag() || psi.len() != basis.len() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// `⟨Sᶻ_j⟩` for `j = 1..=L`.
pub fn magnetization_profile(psi: &StateVector, basis: &SpinBasis) -> Result<Vec<f64>> {
    check_basis(psi, basis)?;
    let mut profile = vec![0.0; basis.length()];
    for (k, a) in psi.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (site, slot) in profile.iter_mut().enumerate() {
            *slot += p * basis.m(k, site + 1) as f64 / 2.0;
        }
    }
    Ok(profile)
}

fn imbalance_from_profiles(now: &[f64], initial: &[f64], two_s: u32) -> f64 {
    let s = two_s as f64 / 2.0;
    let sum: f64 = now.iter().zip(initial).map(|(a, b)| a * b).sum();
    sum / (now.len() as f64 * s * s)
}

/// `𝓘(t) = (1/LS²) Σ_j ⟨Sᶻ_j(t)⟩⟨Sᶻ_j(0)⟩`.
pub fn imbalance(psi_t: &StateVector, psi0: &StateVector, basis: &SpinBasis) -> Result<f64> {
    let now = magnetization_profile(psi_t, basis)?;
    let initial = magnetization_profile(psi0, basis)?;
    Ok(imbalance_from_profiles(&now, &initial, basis.two_s()))
}

/// `𝓘_thermal = (Sᶻ_tot / (L·S))²`.
pub fn thermal_imbalance(length: usize, two_s: u32, two_sz_total: i64) -> f64 {
    // Square in integers first so exact rationals round once.
    let den = length as i128 * two_s as i128;
    let num = two_sz_total as i128;
    (num * num) as f64 / (den * den) as f64
}

/// Von Neumann entropy (bits) of sites `1..=cut` from the Schmidt spectrum.
pub fn entanglement_entropy(psi: &StateVector, cut: usize, basis: &SpinBasis) -> Result<f64> {
    let weights = schmidt_weights(psi, cut, basis)?;
    let s: f64 = weights
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // A product state gives −0.0 or a rounding-level negative value.
    Ok(if s > 0.0 { s } else { 0.0 })
}

/// Squared Schmidt coefficients across the bond after site `cut`.
///
/// The wavefunction is block diagonal in the left-half magnetization, so each
/// block is decomposed separately.
pub fn schmidt_weights(psi: &StateVector, cut: usize, basis: &SpinBasis) -> Result<Vec<f64>> {
    check_basis(psi, basis)?;
    let length = basis.length();
    if cut == 0 || cut >= length {
        return Err(Error::InvalidArgument(format!(
            "entanglement cut {cut} must satisfy 1 <= cut < {length}"
        )));
    }
    // Inside a fixed Sᶻ_tot sector the left magnetization fixes the right one,
    // so the coefficient matrix is block diagonal in it. Otherwise use one block.
    let sectored = basis.two_sz_total().is_some();
    // left magnetization -> (left keys, right keys, entries)
    type Block = (BTreeMap<u64, usize>, BTreeMap<u64, usize>, Vec<(usize, usize, Complex64)>);
    let mut blocks: BTreeMap<i64, Block> = BTreeMap::new();
    let radix = basis.two_s() as u64 + 1;
    for (k, &a) in psi.amplitudes().iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let digits = basis.digits(k);
        let (left, right) = digits.split_at(cut);
        let lkey = left.iter().fold(0u64, |acc, &d| acc * radix + d as u64);
        let rkey = right.iter().fold(0u64, |acc, &d| acc * radix + d as u64);
        let lsum: i64 = if sectored { left.iter().map(|&d| d as i64).sum() } else { 0 };
        let block = blocks.entry(lsum).or_default();
        let nl = block.0.len();
        let li = *block.0.entry(lkey).or_insert(nl);
        let nr = block.1.len();
        let ri = *block.1.entry(rkey).or_insert(nr);
        block.2.push((li, ri, a));
    }
    let mut weights = Vec::new();
    for (lefts, rights, entries) in blocks.into_values() {
        let mut m = DMatrix::<Complex64>::zeros(lefts.len(), rights.len());
        for (i, j, a) in entries {
            m[(i, j)] = a;
        }
        if m.nrows() == 1 || m.ncols() == 1 {
            weights.push(m.iter().map(|a| a.norm_sqr()).sum());
            continue;
        }
        let sv = m.svd(false, false).singular_values;
        weights.extend(sv.iter().map(|s| s * s));
    }
    Ok(weights)
}

/// Eigenvalues and initial-state overlaps used by the participation entropy.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub energies: Vec<f64>,
    pub overlaps: Vec<Complex64>,
    /// Relative tolerance; see [`SpectralDecomposition::absolute_tolerance`].
    pub degeneracy_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn new(spectrum: &Spectrum, psi0: &StateVector, degeneracy_tolerance: f64) -> Result<Self> {
        if spectrum.tag() != psi0.tag() || spectrum.dim() != psi0.len() {
            return Err(Error::BasisMismatch);
        }
        Ok(Self {
            energies: spectrum.values.clone(),
            overlaps: spectrum.project(psi0.amplitudes()),
            degeneracy_tolerance,
        })
    }

    /// `tol · max(1, spectral width)`.
    pub fn absolute_tolerance(&self) -> f64 {
        let (lo, hi) = self
            .energies
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let width = if self.energies.is_empty() { 0.0 } else { hi - lo };
        self.degeneracy_tolerance * width.max(1.0)
    }

    /// Degeneracy-aware inverse participation ratio
    /// `Σ_{m,n} |c_n|²|c_m|² [|E_n − E_m| ≤ tol]`.
    pub fn ipr(&self) -> f64 {
        let tol = self.absolute_tolerance();
        let mut order: Vec<usize> = (0..self.energies.len()).collect();
        order.sort_by(|&a, &b| self.energies[a].total_cmp(&self.energies[b]));
        let energies: Vec<f64> = order.iter().map(|&k| self.energies[k]).collect();
        let weights: Vec<f64> = order.iter().map(|&k| self.overlaps[k].norm_sqr()).collect();
        let mut prefix = vec![0.0; weights.len() + 1];
        for (i, w) in weights.iter().enumerate() {
            prefix[i + 1] = prefix[i] + w;
        }
        energies
            .iter()
            .zip(&weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&e, &w)| {
                let lo = energies.partition_point(|&x| x < e - tol);
                let hi = energies.partition_point(|&x| x <= e + tol);
                w * (prefix[hi] - prefix[lo])
            })
            .sum()
    }
}

/// `S₂ = −ln(IPR)`.
pub fn participation_entropy(decomp: &SpectralDecomposition) -> f64 {
    // IPR can exceed 1 by rounding only; clamp so S₂ stays non-negative.
    (-decomp.ipr().min(1.0).ln()).max(0.0)
}

/// Maximal runs of ascending `values` whose neighbours differ by at most
/// `tolerance`, as half-open index ranges.
pub fn degenerate_groups(values: &[f64], tolerance: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tolerance {
            groups.push(start..k);
            start = k;
        }
    }
    if values.is_empty() {
        groups.clear();
    }
    groups
}

/// Sum of unit-weight Gaussians of width `sigma` at each eigenvalue, normalized
/// to unit trapezoid integral over `grid`.
pub fn density_of_states(eigenvalues: &[f64], sigma: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument("DOS broadening must be positive".into()));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("DOS grid must be ascending with at least two points".into()));
    }
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut curve: Vec<f64> = grid
        .iter()
        .map(|&x| {
            eigenvalues
                .iter()
                .map(|&e| norm * (-0.5 * ((x - e) / sigma).powi(2)).exp())
                .sum()
        })
        .collect();
    let area = trapezoid(grid, &curve);
    if !(area > 0.0) {
        return Err(Error::InvalidArgument("DOS grid does not cover the spectrum".into()));
    }
    curve.iter_mut().for_each(|c| *c /= area);
    Ok(curve)
}

/// `points` equally spaced energies spanning `[min E − 5σ, max E + 5σ]`.
pub fn dos_grid(eigenvalues: &[f64], sigma: f64, points: usize) -> Vec<f64> {
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min) - 5.0 * sigma;
    let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 5.0 * sigma;
    let step = (hi - lo) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|k| lo + k as f64 * step).collect()
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Arithmetic mean of the samples whose times lie in the closed `window`.
pub fn time_average(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch("series and time grid differ in length".into()));
    }
    let (lo, hi) = window;
    let slack = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    let (sum, count) = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= lo - slack && t <= hi + slack)
        .fold((0.0, 0usize), |(s, n), (_, &v)| (s + v, n + 1));
    if count == 0 {
        return Err(Error::InvalidArgument(format!(
            "no samples inside the averaging window [{lo}, {hi}]"
        )));
    }
    Ok(sum / count as f64)
}
