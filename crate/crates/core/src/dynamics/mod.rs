//! Unitary propagation `|ψ(t)⟩ = exp(−iHt)|ψ₀⟩` (ħ = 1, time in units of 1/J₀).

mod krylov;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use krylov::{evolve_krylov, evolve_krylov_each};

use crate::basis::SpinBasis;
use crate::error::{Error, Result};
use crate::model::{full_spectrum, SparseOperator, Spectrum};
use crate::product::BasisTag;

/// Tolerance on ‖ψ‖ − 1 accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Unit-norm complex amplitude vector over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    tag: BasisTag,
}

impl StateVector {
    pub fn new(tag: BasisTag, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "state vector norm {norm} is not 1"
            )));
        }
        Ok(Self { amplitudes, tag })
    }

    /// Rescale arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(tag: BasisTag, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amplitudes, tag })
    }

    /// Unit vector on basis state `ordinal`.
    pub fn basis_state(tag: BasisTag, dim: usize, ordinal: usize) -> Result<Self> {
        if ordinal >= dim {
            return Err(Error::DimensionMismatch(format!(
                "ordinal {ordinal} outside a basis of size {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[ordinal] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, tag })
    }

    /// Product state with projections `m_j = 2Sᶻ_j`.
    pub fn product(basis: &SpinBasis, config: &[i32]) -> Result<Self> {
        let ordinal = basis.index_of(config).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "configuration {config:?} is not in the basis sector"
            ))
        })?;
        Self::basis_state(basis.tag(), basis.len(), ordinal)
    }

    pub(crate) fn from_raw(tag: BasisTag, amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes, tag }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.tag != other.tag || self.len() != other.len() {
            return Err(Error::BasisMismatch);
        }
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    /// Maximum amplitude-wise deviation `‖self − other‖₂`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.tag != other.tag || self.len() != other.len() {
            return Err(Error::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(a_i)·b_i`.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Krylov,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Method::Dense),
            "krylov" => Ok(Method::Krylov),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub method: Method,
    /// Ascending output times, starting at 0.
    pub time_grid: Vec<f64>,
    pub krylov_dim: usize,
    /// Bound on the local error estimate of each Krylov substep.
    pub step_tolerance: f64,
    pub max_substeps: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            method: Method::Krylov,
            time_grid: uniform_grid(500.0, 0.5),
            krylov_dim: 30,
            step_tolerance: 1e-10,
            max_substeps: 10_000_000,
        }
    }
}

impl EvolutionConfig {
    pub fn with_grid(method: Method, time_grid: Vec<f64>) -> Self {
        Self {
            method,
            time_grid,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.time_grid)?;
        if self.krylov_dim < 2 {
            return Err(Error::InvalidArgument("krylov_dim must be at least 2".into()));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(Error::InvalidArgument("step_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// `0, dt, 2dt, …` up to and including `t_max` (within rounding).
pub fn uniform_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}

fn validate_grid(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidArgument("time grid is empty".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidArgument("time grid must start at 0".into()))
        }
        _ => {}
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be strictly ascending".into()));
    }
    Ok(())
}

fn check_operands(h: &SparseOperator, psi: &StateVector) -> Result<()> {
    if h.tag() != psi.tag() || h.dim() != psi.len() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Propagate through a precomputed eigendecomposition, handing each state to `sink`.
pub fn evolve_spectral_each<F>(spectrum: &Spectrum, psi0: &StateVector, times: &[f64], mut sink: F) -> Result<()>
where
    F: FnMut(usize, f64, &StateVector) -> Result<()>,
{
    if spectrum.tag() != psi0.tag() || spectrum.dim() != psi0.len() {
        return Err(Error::BasisMismatch);
    }
    validate_grid(times)?;
    let overlaps = spectrum.project(psi0.amplitudes());
    for (k, &t) in times.iter().enumerate() {
        let state = if t == 0.0 {
            psi0.clone()
        } else {
            let phased: Vec<Complex64> = overlaps
                .iter()
                .zip(&spectrum.values)
                .map(|(&c, &e)| c * Complex64::from_polar(1.0, -e * t))
                .collect();
            StateVector::from_raw(psi0.tag(), spectrum.combine(&phased))
        };
        sink(k, t, &state)?;
    }
    Ok(())
}

/// `ψ(t) = V·exp(−iΛt)·V†·ψ₀` at every requested time.
pub fn evolve_dense(h: &SparseOperator, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    check_operands(h, psi0)?;
    let spectrum = full_spectrum(h)?;
    let mut out = Vec::with_capacity(times.len());
    evolve_spectral_each(&spectrum, psi0, times, |_, _, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Dispatch on `config.method`, streaming states to `sink`.
pub fn evolve_each<F>(h: &SparseOperator, psi0: &StateVector, config: &EvolutionConfig, sink: F) -> Result<()>
where
    F: FnMut(usize, f64, &StateVector) -> Result<()>,
{
    check_operands(h, psi0)?;
    config.validate()?;
    match config.method {
        Method::Dense => {
            let spectrum = full_spectrum(h)?;
            evolve_spectral_each(&spectrum, psi0, &config.time_grid, sink)
        }
        Method::Krylov => evolve_krylov_each(h, psi0, config, sink),
    }
}

/// `⟨ψ|H|ψ⟩`.
pub fn expectation_energy(h: &SparseOperator, psi: &StateVector) -> Result<f64> {
    check_operands(h, psi)?;
    let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.len()];
    h.apply(psi.amplitudes(), &mut hpsi);
    let value = dot(psi.amplitudes(), &hpsi);
    if value.im.abs() > 1e-12 * (1.0 + value.re.abs()) {
        return Err(Error::InvalidArgument(format!(
            "expectation value has imaginary part {}; operator is not Hermitian",
            value.im
        )));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, ModelParams};

    fn pair() -> (SpinBasis, SparseOperator) {
        let basis = SpinBasis::new(2, 1, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(2, 1, 1.0, 0.0), &basis).unwrap();
        (basis, h)
    }

    #[test]
    fn identity_at_time_zero() {
        let basis = SpinBasis::new(6, 3, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(6, 3, 1.0, 1.0).anisotropy(0.3), &basis).unwrap();
        let psi0 = StateVector::product(&basis, &[3, 3, 3, -3, -3, -3]).unwrap();
        let out = evolve_dense(&h, &psi0, &[0.0]).unwrap();
        assert_eq!(out[0], psi0);
    }

    #[test]
    fn two_level_rabi_oscillation() {
        let (basis, h) = pair();
        let psi0 = StateVector::product(&basis, &[1, -1]).unwrap();
        let times = uniform_grid(12.0, 0.25);
        let out = evolve_dense(&h, &psi0, &times).unwrap();
        for (t, s) in times.iter().zip(&out) {
            let p = s.amplitudes()[basis.index_of(&[1, -1]).unwrap()].norm_sqr();
            assert!((p - (t / 2.0).cos().powi(2)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn eigenstate_only_acquires_phase() {
        let basis = SpinBasis::new(6, 3, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(6, 3, 0.0, 0.0).anisotropy(2.0), &basis).unwrap();
        let psi0 = StateVector::product(&basis, &[-3, -3, 3, 3, -3, 3]).unwrap();
        for s in evolve_dense(&h, &psi0, &uniform_grid(20.0, 1.0)).unwrap() {
            assert!((psi0.inner(&s).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_expectations() {
        let (basis, h) = pair();
        let spec = full_spectrum(&h).unwrap();
        for n in 0..2 {
            let v: Vec<Complex64> = spec.eigenvector(n).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let psi = StateVector::new(basis.tag(), v).unwrap();
            assert!((expectation_energy(&h, &psi).unwrap() - spec.values[n]).abs() < 1e-14);
        }
        let mix: Vec<Complex64> = (0..2)
            .map(|k| Complex64::new((spec.eigenvector(0)[k] + spec.eigenvector(1)[k]) / 2f64.sqrt(), 0.0))
            .collect();
        let psi = StateVector::new(basis.tag(), mix).unwrap();
        assert!((expectation_energy(&h, &psi).unwrap() + 0.25).abs() < 1e-14);
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let (_, h) = pair();
        let other = SpinBasis::new(4, 1, Some(0)).unwrap();
        let psi = StateVector::basis_state(other.tag(), other.len(), 0).unwrap();
        assert!(matches!(expectation_energy(&h, &psi), Err(Error::BasisMismatch)));
        assert!(matches!(evolve_dense(&h, &psi, &[0.0]), Err(Error::BasisMismatch)));
    }

    #[test]
    fn construction_checks_norm() {
        let tag = BasisTag(1);
        assert!(StateVector::new(tag, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        let s = StateVector::normalized(tag, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::normalized(tag, vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert_eq!(uniform_grid(500.0, 0.5).len(), 1001);
        assert!(validate_grid(&[0.0, 1.0, 1.0]).is_err());
        assert!(validate_grid(&[0.5, 1.0]).is_err());
        assert!(validate_grid(&[]).is_err());
    }

    mod props {
        use super::*;
        use crate::model::{build_hamiltonian, ModelParams};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn krylov_tracks_dense(
                length in 3usize..7,
                two_s in 1u32..3,
                theta in 0.0f64..6.3,
                h0 in 0.0f64..3.0,
                d in -2.0f64..4.0,
                pick in any::<u64>(),
            ) {
                let basis = SpinBasis::new(length, two_s, None).unwrap();
                let ordinal = (pick % basis.len() as u64) as usize;
                let sector = basis.config(ordinal).iter().map(|&m| m as i64).sum();
                let basis = SpinBasis::new(length, two_s, Some(sector)).unwrap();
                let config = SpinBasis::new(length, two_s, None).unwrap().config(ordinal);
                let params = ModelParams::with_theta(length, two_s, 1.0, theta).field(h0, 0.0).anisotropy(d);
                let h = build_hamiltonian(&params, &basis).unwrap();
                let psi0 = StateVector::product(&basis, &config).unwrap();
                let times = [0.0, 0.7, 3.0, 11.0];
                let dense = evolve_dense(&h, &psi0, &times).unwrap();
                let krylov = evolve_krylov(&h, &psi0, &EvolutionConfig::with_grid(Method::Krylov, times.to_vec())).unwrap();
                for (a, b) in dense.iter().zip(&krylov) {
                    prop_assert!((a.norm() - 1.0).abs() < 1e-10);
                    prop_assert!((b.norm() - 1.0).abs() < 1e-10);
                    let diff: f64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                    prop_assert!(diff < 1e-8, "diff {diff}");
                }
            }
        }
    }
}
