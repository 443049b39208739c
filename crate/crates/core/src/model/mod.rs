//! Extended Majumdar–Ghosh chain with a tilted field and single-ion anisotropy:
//!
//! ```text
//! H = J1 Σ_{j<L} S_j·S_{j+1} + J2 Σ_{j<L-1} S_j·S_{j+2} + Σ_j (h_j + D S^z_j) S^z_j
//! h_j = j·h0 + γ·j²/L²          (j = 1..L, open boundaries)
//! ```

mod operator;
mod spectrum;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use operator::SparseOperator;
pub use spectrum::{full_spectrum, full_spectrum_with_guard, EigenVectors, Spectrum, DEFAULT_DENSE_GUARD};

use crate::basis::{ladder_weight_x4, Ladder, SpinBasis};
use crate::error::{Error, Result};

/// Default cap on the number of stored non-zeros of an assembled operator.
pub const DEFAULT_NNZ_GUARD: usize = 200_000_000;

/// Physical parameters of the chain. Energies are in units of `j0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub length: usize,
    pub two_s: u32,
    pub j0: f64,
    /// Set when `(j1, j2)` were derived from the angle parameterization.
    pub theta: Option<f64>,
    pub j1: f64,
    pub j2: f64,
    pub h0: f64,
    pub gamma: f64,
    pub d: f64,
}

impl ModelParams {
    /// Couplings `(J1, J2) = (J0 cos θ, J0 sin θ)`, all fields and anisotropy zero.
    pub fn with_theta(length: usize, two_s: u32, j0: f64, theta: f64) -> Self {
        let (j1, j2) = couplings_from_theta(j0, theta);
        Self {
            length,
            two_s,
            j0,
            theta: Some(theta.rem_euclid(std::f64::consts::TAU)),
            j1,
            j2,
            h0: 0.0,
            gamma: 0.0,
            d: 0.0,
        }
    }

    /// Explicit exchange couplings.
    pub fn with_couplings(length: usize, two_s: u32, j1: f64, j2: f64) -> Self {
        Self {
            length,
            two_s,
            j0: 1.0,
            theta: None,
            j1,
            j2,
            h0: 0.0,
            gamma: 0.0,
            d: 0.0,
        }
    }

    pub fn field(mut self, h0: f64, gamma: f64) -> Self {
        self.h0 = h0;
        self.gamma = gamma;
        self
    }

    pub fn anisotropy(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain length must be at least 2, got {}",
                self.length
            )));
        }
        if self.two_s == 0 {
            return Err(Error::InvalidArgument("2S must be positive".into()));
        }
        let energies = [self.j0, self.j1, self.j2, self.h0, self.gamma, self.d];
        if energies.iter().any(|e| !e.is_finite()) || self.theta.is_some_and(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("model energies must be finite".into()));
        }
        Ok(())
    }
}

/// `(J1, J2) = (J0 cos θ, J0 sin θ)` with θ reduced modulo 2π.
pub fn couplings_from_theta(j0: f64, theta: f64) -> (f64, f64) {
    let theta = theta.rem_euclid(std::f64::consts::TAU);
    (j0 * theta.cos(), j0 * theta.sin())
}

/// `h_j = j·h0 + γ·j²/L²` for `j = 1..=L`.
pub fn field_profile(params: &ModelParams) -> Vec<f64> {
    let l2 = (params.length * params.length) as f64;
    (1..=params.length)
        .map(|j| {
            let j = j as f64;
            j * params.h0 + params.gamma * j * j / l2
        })
        .collect()
}

/// Assemble the Hamiltonian over `basis` with the default non-zero guard.
pub fn build_hamiltonian(params: &ModelParams, basis: &SpinBasis) -> Result<SparseOperator> {
    build_hamiltonian_with_guard(params, basis, DEFAULT_NNZ_GUARD)
}

pub fn build_hamiltonian_with_guard(
    params: &ModelParams,
    basis: &SpinBasis,
    nnz_guard: usize,
) -> Result<SparseOperator> {
    params.validate()?;
    if params.length != basis.length() || params.two_s != basis.two_s() {
        return Err(Error::DimensionMismatch(format!(
            "params (L={}, 2S={}) vs basis (L={}, 2S={})",
            params.length,
            params.two_s,
            basis.length(),
            basis.two_s()
        )));
    }
    let length = params.length;
    let dim = basis.len();
    let bonds: Vec<(usize, usize, f64)> = [(1usize, params.j1), (2, params.j2)]
        .into_iter()
        .filter(|&(r, _)| r < length)
        .flat_map(|(r, j)| (0..length - r).map(move |i| (i, i + r, j)))
        .collect();
    let flip_bonds = bonds.iter().filter(|b| b.2 != 0.0).count();
    let estimate = dim as u128 * (1 + 2 * flip_bonds) as u128;
    if estimate > nnz_guard as u128 {
        return Err(Error::Capacity {
            what: "operator non-zeros",
            requested: estimate,
            limit: nnz_guard as u128,
        });
    }

    let fields = field_profile(params);
    let two_s = params.two_s;

    let rows: Vec<Vec<(usize, f64)>> = (0..dim)
        .into_par_iter()
        .map(|k| {
            let digits = basis.digits(k);
            let m: Vec<i32> = digits.iter().map(|&d| 2 * d as i32 - two_s as i32).collect();
            let key = basis.keys()[k];

            let mut exchange_zz = 0.0;
            for &(i, j, coupling) in &bonds {
                exchange_zz += coupling * (m[i] * m[j]) as f64 / 4.0;
            }
            let field: f64 = m.iter().zip(&fields).map(|(&mj, &h)| h * mj as f64 / 2.0).sum();
            let square_sum: i64 = m.iter().map(|&mj| (mj * mj) as i64).sum();
            let diag = exchange_zz + field + params.d * square_sum as f64 / 4.0;

            let mut row = vec![(k, diag)];
            for &(i, j, coupling) in &bonds {
                if coupling == 0.0 {
                    continue;
                }
                // S+_i S-_j and S-_i S+_j, each with weight J/2.
                for (dir_i, dir_j, sign) in [(Ladder::Raise, Ladder::Lower, 1i64), (Ladder::Lower, Ladder::Raise, -1)] {
                    let wi = ladder_weight_x4(two_s, m[i], dir_i);
                    let wj = ladder_weight_x4(two_s, m[j], dir_j);
                    if wi == 0 || wj == 0 {
                        continue;
                    }
                    let target_key = (key as i64
                        + sign * basis.place_value(i) as i64
                        - sign * basis.place_value(j) as i64) as u64;
                    let target = basis
                        .index_of_key(target_key)
                        .expect("flip-flop term leaves the Sz sector");
                    row.push((target, coupling * ((wi * wj) as f64).sqrt() / 8.0));
                }
            }
            row.sort_by_key(|e| e.0);
            row
        })
        .collect();
    Ok(SparseOperator::from_sorted_rows(dim, basis.tag(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn theta_couplings() {
        assert_eq!(couplings_from_theta(1.0, 0.0), (1.0, 0.0));
        let (j1, j2) = couplings_from_theta(1.0, FRAC_PI_2);
        assert!(close(j1, 0.0, 1e-15) && close(j2, 1.0, 1e-15));
        let (j1, j2) = couplings_from_theta(1.0, 2.0 * PI / 3.0);
        assert!(close(j1, -0.5, 1e-15) && close(j2, 0.866_025_403_784_438_6, 1e-15));
    }

    #[test]
    fn field_profiles() {
        let p = ModelParams::with_theta(4, 1, 1.0, 0.0);
        assert_eq!(field_profile(&p), vec![0.0; 4]);
        assert_eq!(field_profile(&p.field(2.0, 0.0)), vec![2.0, 4.0, 6.0, 8.0]);
        let p2 = ModelParams::with_theta(2, 1, 1.0, 0.0).field(1.0, 1.0);
        assert_eq!(field_profile(&p2), vec![1.25, 3.0]);
    }

    #[test]
    fn two_site_heisenberg() {
        let basis = SpinBasis::new(2, 1, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(2, 1, 1.0, 0.0), &basis).unwrap();
        let dense = h.to_dense();
        assert_eq!(dense[(0, 0)], -0.25);
        assert_eq!(dense[(1, 1)], -0.25);
        assert_eq!(dense[(0, 1)], 0.5);
        assert_eq!(dense[(1, 0)], 0.5);
        let spec = full_spectrum(&h).unwrap();
        assert!(close(spec.values[0], -0.75, 1e-14));
        assert!(close(spec.values[1], 0.25, 1e-14));
    }

    #[test]
    fn zero_exchange_is_anisotropy_only() {
        let basis = SpinBasis::new(4, 3, Some(0)).unwrap();
        let params = ModelParams::with_theta(4, 3, 0.0, 0.0).anisotropy(0.5);
        let h = build_hamiltonian(&params, &basis).unwrap();
        assert!(h.is_diagonal());
        for k in 0..basis.len() {
            let expected: f64 = basis.config(k).iter().map(|&m| 0.5 * (m as f64 / 2.0).powi(2)).sum();
            assert!(close(h.get(k, k), expected, 1e-14));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let basis = SpinBasis::new(4, 1, Some(0)).unwrap();
        let params = ModelParams::with_theta(6, 1, 1.0, 0.0);
        assert!(matches!(build_hamiltonian(&params, &basis), Err(Error::DimensionMismatch(_))));
        let params = ModelParams::with_theta(4, 3, 1.0, 0.0);
        assert!(matches!(build_hamiltonian(&params, &basis), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn nnz_guard() {
        let basis = SpinBasis::new(8, 1, Some(0)).unwrap();
        let params = ModelParams::with_theta(8, 1, 1.0, 0.3);
        assert!(matches!(
            build_hamiltonian_with_guard(&params, &basis, 100),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn sz_conservation_in_full_space() {
        let basis = SpinBasis::new(5, 2, None).unwrap();
        let params = ModelParams::with_theta(5, 2, 1.0, 0.7).field(0.8, 0.3).anisotropy(1.1);
        let h = build_hamiltonian(&params, &basis).unwrap();
        assert!(h.is_symmetric());
        for (r, c, _) in h.triplets() {
            let sr: i32 = basis.config(r).iter().sum();
            let sc: i32 = basis.config(c).iter().sum();
            assert_eq!(sr, sc);
        }
    }

    #[test]
    fn spin_half_anisotropy_is_a_shift() {
        let basis = SpinBasis::new(6, 1, Some(0)).unwrap();
        let base = ModelParams::with_theta(6, 1, 1.0, 1.3).field(0.7, 0.4);
        let h0 = build_hamiltonian(&base, &basis).unwrap();
        let hd = build_hamiltonian(&base.anisotropy(1.7), &basis).unwrap();
        let shift = 1.7 * 6.0 / 4.0;
        for (r, c, v) in hd.triplets() {
            let expected = h0.get(r, c) + if r == c { shift } else { 0.0 };
            assert!(close(v, expected, 1e-13), "({r},{c})");
        }
        assert_eq!(h0.nnz(), hd.nnz());
    }

    #[test]
    fn theta_sign_identity() {
        for theta in [0.1, 0.9, 2.0, 4.0] {
            let (a1, a2) = couplings_from_theta(1.0, theta);
            let (b1, b2) = couplings_from_theta(1.0, PI - theta);
            assert!(close(a1, -b1, 1e-15) && close(a2, b2, 1e-15));
        }
    }

    proptest! {
        #[test]
        fn assembled_operator_is_symmetric(theta in 0.0..6.28f64, h0 in -3.0..3.0f64, d in -2.0..2.0f64, two_s in 1u32..4) {
            let length = 4;
            let basis = SpinBasis::new(length, two_s, Some((length as i64 * two_s as i64) % 2)).unwrap();
            let params = ModelParams::with_theta(length, two_s, 1.0, theta).field(h0, 0.5).anisotropy(d);
            let h = build_hamiltonian(&params, &basis).unwrap();
            prop_assert!(h.is_symmetric());
        }

        #[test]
        fn theta_periodicity(theta in 0.0..6.28f64) {
            let basis = SpinBasis::new(5, 1, Some(1)).unwrap();
            let a = build_hamiltonian(&ModelParams::with_theta(5, 1, 1.0, theta).field(1.0, 0.0), &basis).unwrap();
            let b = build_hamiltonian(&ModelParams::with_theta(5, 1, 1.0, theta + std::f64::consts::TAU).field(1.0, 0.0), &basis).unwrap();
            let ta: Vec<_> = a.triplets().collect();
            let tb: Vec<_> = b.triplets().collect();
            prop_assert_eq!(ta.len(), tb.len());
            for (x, y) in ta.iter().zip(&tb) {
                prop_assert_eq!((x.0, x.1), (y.0, y.1));
                prop_assert!((x.2 - y.2).abs() < 1e-14);
            }
        }
    }
}
