//! Holstein–Primakoff bosonic effective model of the nearest-neighbour chain
//! (`J1 = J`, `J2 = 0`) on a number-conserving boson basis:
//!
//! ```text
//! H = Σ_j μ_j n_j + t Σ_j (a†_j a_{j+1} + h.c.)
//!   + c Σ_j [(a†_j)² a_j a_{j+1} + (a†_{j+1})² a_{j+1} a_j + h.c.]
//!   + U Σ_j n_j(n_j − 1) + V Σ_j n_j n_{j+1}
//! ```
//!
//! The constant ground-state term is dropped, so spectra are defined up to an
//! additive shift. Operator strings that would exceed the occupation cutoff
//! contribute zero.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::SpinBasis;
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, field_profile, full_spectrum, ModelParams, SparseOperator};
use crate::product::{BasisTag, ProductBasis, DEFAULT_ENUMERATION_GUARD};

/// Fixed-total-number boson basis with a per-site occupation cutoff.
#[derive(Debug, Clone)]
pub struct BosonBasis {
    total_n: u32,
    inner: ProductBasis,
}

impl BosonBasis {
    pub fn new(length: usize, n_max: u32, total_n: u32) -> Result<Self> {
        Self::with_guard(length, n_max, total_n, DEFAULT_ENUMERATION_GUARD)
    }

    pub fn with_guard(length: usize, n_max: u32, total_n: u32, guard: u128) -> Result<Self> {
        if length < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain length must be at least 2, got {length}"
            )));
        }
        if n_max == 0 || n_max > 254 {
            return Err(Error::InvalidArgument(format!(
                "occupation cutoff must lie in 1..=254, got {n_max}"
            )));
        }
        if total_n as u64 > length as u64 * n_max as u64 {
            return Err(Error::InvalidArgument(format!(
                "{total_n} bosons do not fit on {length} sites with cutoff {n_max}"
            )));
        }
        let inner = ProductBasis::enumerate("boson", length, n_max + 1, Some(total_n), guard)?;
        Ok(Self { total_n, inner })
    }

    pub fn length(&self) -> usize {
        self.inner.length()
    }

    pub fn n_max(&self) -> u32 {
        self.inner.radix() - 1
    }

    pub fn total_n(&self) -> u32 {
        self.total_n
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len() == 0
    }

    pub fn tag(&self) -> BasisTag {
        self.inner.tag()
    }

    pub fn occupations(&self, ordinal: usize) -> &[u8] {
        self.inner.digits(ordinal)
    }

    pub fn index_of(&self, occupations: &[u8]) -> Option<usize> {
        if occupations.len() != self.length() || occupations.iter().any(|&n| n as u32 > self.n_max()) {
            return None;
        }
        self.inner.index_of_key(self.inner.pack(occupations))
    }
}

/// Which coefficient set to use for the effective model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "form")]
pub enum HpForm {
    /// Coefficients as printed: `μ_j = ±2DS + 2JS − h_j`, `t = −JS`,
    /// `c = J/8`, `U = D`, `V = J/2`. `positive_anisotropy_shift` selects the
    /// sign in front of `2DS`.
    Printed { positive_anisotropy_shift: bool },
    /// Consistent expansion of the spin Hamiltonian about the fully polarized
    /// state: `μ_j = −JS·z_j − h_j + D(1 − 2S)` with `z_j` the number of bonds
    /// at site `j`, `t = JS`, `c = −J/4`, `U = D`, `V = J`. Exact in the
    /// one-boson sector.
    Derived,
}

impl Default for HpForm {
    fn default() -> Self {
        HpForm::Printed {
            positive_anisotropy_shift: true,
        }
    }
}

/// Coefficients of the generalized tilted Bose–Hubbard model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseHubbardTerms {
    pub chemical: Vec<f64>,
    pub hopping: f64,
    pub correlated_hopping: f64,
    pub onsite: f64,
    pub density: f64,
}

impl BoseHubbardTerms {
    /// Plain tilted Bose–Hubbard model: `μ_j = μ0 + j·tilt`.
    pub fn tilted(length: usize, mu0: f64, tilt: f64, hopping: f64, onsite: f64) -> Self {
        Self {
            chemical: (1..=length).map(|j| mu0 + j as f64 * tilt).collect(),
            hopping,
            correlated_hopping: 0.0,
            onsite,
            density: 0.0,
        }
    }

    fn negated_with_onsite_flipped(&self) -> Self {
        Self {
            chemical: self.chemical.iter().map(|m| -m).collect(),
            hopping: -self.hopping,
            correlated_hopping: -self.correlated_hopping,
            onsite: self.onsite,
            density: -self.density,
        }
    }
}

/// Effective-model coefficients for `params` (requires `J2 = 0`).
pub fn hp_terms(params: &ModelParams, form: HpForm) -> Result<BoseHubbardTerms> {
    params.validate()?;
    if params.j2.abs() > 1e-12 * params.j0.abs().max(params.j1.abs()).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "the bosonic model is nearest-neighbour only; got J2 = {}",
            params.j2
        )));
    }
    let j = params.j1;
    let s = params.spin();
    let d = params.d;
    let length = params.length;
    let fields = field_profile(params);
    Ok(match form {
        HpForm::Printed {
            positive_anisotropy_shift,
        } => {
            let shift = if positive_anisotropy_shift { 2.0 * d * s } else { -2.0 * d * s };
            BoseHubbardTerms {
                chemical: fields.iter().map(|h| shift + 2.0 * j * s - h).collect(),
                hopping: -j * s,
                correlated_hopping: j / 8.0,
                onsite: d,
                density: j / 2.0,
            }
        }
        HpForm::Derived => BoseHubbardTerms {
            chemical: fields
                .iter()
                .enumerate()
                .map(|(site, h)| {
                    let bonds = if site == 0 || site == length - 1 { 1.0 } else { 2.0 };
                    -j * s * bonds - h + d * (1.0 - 2.0 * s)
                })
                .collect(),
            hopping: j * s,
            correlated_hopping: -j / 4.0,
            onsite: d,
            density: j,
        },
    })
}

/// Assemble the generalized Bose–Hubbard operator over `basis`.
pub fn build_boson_operator(terms: &BoseHubbardTerms, basis: &BosonBasis) -> Result<SparseOperator> {
    let length = basis.length();
    if terms.chemical.len() != length {
        return Err(Error::DimensionMismatch(format!(
            "{} chemical potentials for {length} sites",
            terms.chemical.len()
        )));
    }
    let n_max = basis.n_max() as i64;
    let inner = &basis.inner;
    let rows: Vec<Vec<(usize, f64)>> = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            let occ: Vec<i64> = inner.digits(k).iter().map(|&n| n as i64).collect();
            let key = inner.keys()[k];
            let mut diag = 0.0;
            for (site, &n) in occ.iter().enumerate() {
                diag += terms.chemical[site] * n as f64 + terms.onsite * (n * (n - 1)) as f64;
                if site + 1 < length {
                    diag += terms.density * (n * occ[site + 1]) as f64;
                }
            }
            let mut row = vec![(k, diag)];
            for site in 0..length - 1 {
                let (nl, nr) = (occ[site], occ[site + 1]);
                // Move one boson right-to-left, then left-to-right.
                for (from, to, sign) in [(nr, nl, 1i64), (nl, nr, -1)] {
                    if from == 0 || to + 1 > n_max {
                        continue;
                    }
                    let amp = ((from * (to + 1)) as f64).sqrt()
                        * (terms.hopping + terms.correlated_hopping * (nl + nr - 1) as f64);
                    if amp == 0.0 {
                        continue;
                    }
                    let target_key = (key as i64 + sign * inner.place_value(site) as i64
                        - sign * inner.place_value(site + 1) as i64) as u64;
                    let target = inner.index_of_key(target_key).expect("hop leaves the number sector");
                    row.push((target, amp));
                }
            }
            row.sort_by_key(|e| e.0);
            row
        })
        .collect();
    Ok(SparseOperator::from_sorted_rows(basis.len(), basis.tag(), rows))
}

/// Effective bosonic Hamiltonian of the spin chain in the chosen form.
pub fn build_hp_hamiltonian(params: &ModelParams, basis: &BosonBasis, form: HpForm) -> Result<SparseOperator> {
    if params.length != basis.length() {
        return Err(Error::DimensionMismatch(format!(
            "params have L={}, boson basis has L={}",
            params.length,
            basis.length()
        )));
    }
    build_boson_operator(&hp_terms(params, form)?, basis)
}

/// Largest eigenvalue discrepancy between the spin chain's one-deviation
/// sector (energies relative to the fully polarized state) and the one-boson
/// sector of the derived effective model.
pub fn one_magnon_crosscheck(params: &ModelParams) -> Result<f64> {
    let length = params.length;
    let top = length as i64 * params.two_s as i64;
    let polarized = SpinBasis::new(length, params.two_s, Some(top))?;
    let reference = build_hamiltonian(params, &polarized)?.get(0, 0);

    let magnon = SpinBasis::new(length, params.two_s, Some(top - 2))?;
    let spin = full_spectrum(&build_hamiltonian(params, &magnon)?)?;

    let bosons = BosonBasis::new(length, params.two_s, 1)?;
    let boson = full_spectrum(&build_hp_hamiltonian(params, &bosons, HpForm::Derived)?)?;

    if spin.dim() != boson.dim() {
        return Err(Error::DimensionMismatch(format!(
            "spin sector has {} states, boson sector {}",
            spin.dim(),
            boson.dim()
        )));
    }
    Ok(spin
        .values
        .iter()
        .zip(&boson.values)
        .map(|(e_spin, e_boson)| (e_spin - reference - e_boson).abs())
        .fold(0.0, f64::max))
}

/// Compare the spectrum of `H(U)` with that of `−H(−U)`, each shifted to zero
/// mean. Returns the largest eigenvalue difference; zero means the two
/// spectra coincide up to an additive constant.
pub fn sign_symmetry_discrepancy(terms: &BoseHubbardTerms, basis: &BosonBasis) -> Result<f64> {
    let centered = |t: &BoseHubbardTerms| -> Result<Vec<f64>> {
        let values = full_spectrum(&build_boson_operator(t, basis)?)?.values;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(values.into_iter().map(|v| v - mean).collect())
    };
    let direct = centered(terms)?;
    let flipped = centered(&terms.negated_with_onsite_flipped())?;
    Ok(direct
        .iter()
        .zip(&flipped)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
