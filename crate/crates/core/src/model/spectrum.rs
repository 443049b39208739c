use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SparseOperator;
use crate::error::{Error, Result};
use crate::product::BasisTag;

/// Largest dimension handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_GUARD: usize = 20_000;

/// Orthonormal eigenvectors, stored as the columns of a dense matrix, or as a
/// permutation of unit vectors when the operator was already diagonal.
#[derive(Debug, Clone)]
pub enum EigenVectors {
    Dense(DMatrix<f64>),
    /// `Permutation(p)`: eigenvector `n` is the unit vector on basis state `p[n]`.
    Permutation(Vec<usize>),
}

/// Full eigendecomposition with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: EigenVectors,
    tag: BasisTag,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        match &self.vectors {
            EigenVectors::Dense(v) => v.column(n).iter().copied().collect(),
            EigenVectors::Permutation(p) => {
                let mut out = vec![0.0; p.len()];
                out[p[n]] = 1.0;
                out
            }
        }
    }

    /// Overlaps `c_n = ⟨n|ψ⟩`.
    pub fn project(&self, psi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(psi.len(), self.dim());
        match &self.vectors {
            EigenVectors::Dense(v) => v
                .column_iter()
                .map(|col| col.iter().zip(psi).map(|(&a, &b)| b * a).sum())
                .collect(),
            EigenVectors::Permutation(p) => p.iter().map(|&k| psi[k]).collect(),
        }
    }

    /// `Σ_n coeffs[n]·|n⟩` in the original basis.
    pub fn combine(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.dim());
        let dim = self.dim();
        match &self.vectors {
            EigenVectors::Dense(v) => {
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                for (col, &c) in v.column_iter().zip(coeffs) {
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(col.iter()) {
                        *o += c * a;
                    }
                }
                out
            }
            EigenVectors::Permutation(p) => {
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                for (&k, &c) in p.iter().zip(coeffs) {
                    out[k] = c;
                }
                out
            }
        }
    }
}

pub fn full_spectrum(h: &SparseOperator) -> Result<Spectrum> {
    full_spectrum_with_guard(h, DEFAULT_DENSE_GUARD)
}

/// Diagonalize a real symmetric operator. Diagonal operators skip the dense
/// solver; their eigenvectors are the basis states, ordered stably.
pub fn full_spectrum_with_guard(h: &SparseOperator, guard: usize) -> Result<Spectrum> {
    let dim = h.dim();
    if h.is_diagonal() {
        let diag = h.diagonal();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
        return Ok(Spectrum {
            values: order.iter().map(|&k| diag[k]).collect(),
            vectors: EigenVectors::Permutation(order),
            tag: h.tag(),
        });
    }
    if dim > guard {
        return Err(Error::Capacity {
            what: "dense eigensolver dimension",
            requested: dim as u128,
            limit: guard as u128,
        });
    }
    let dense = h.to_dense();
    let a = Mat::<f64>::from_fn(dim, dim, |r, c| dense[(r, c)]);
    drop(dense);
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Convergence(format!("symmetric eigensolver on dim {dim}: {e:?}")))?;
    let (u, s) = (eig.U(), eig.S().column_vector());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| s[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| u[(r, order[c])]);
    Ok(Spectrum {
        values,
        vectors: EigenVectors::Dense(vectors),
        tag: h.tag(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SpinBasis;
    use crate::model::{build_hamiltonian, ModelParams};

    #[test]
    fn residuals_and_orthonormality() {
        let basis = SpinBasis::new(6, 2, Some(0)).unwrap();
        let params = ModelParams::with_theta(6, 2, 1.0, 0.8).field(0.6, 0.2).anisotropy(0.9);
        let h = build_hamiltonian(&params, &basis).unwrap();
        let spec = full_spectrum(&h).unwrap();
        let norm = h.norm_bound();
        assert!(spec.values.windows(2).all(|w| w[0] <= w[1]));
        let EigenVectors::Dense(v) = &spec.vectors else { panic!("expected dense vectors") };
        for n in 0..spec.dim() {
            let col: Vec<f64> = v.column(n).iter().copied().collect();
            let hv = h.apply_real(&col);
            let res: f64 = hv.iter().zip(&col).map(|(a, b)| (a - spec.values[n] * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * norm, "residual {res}");
        }
        let gram = v.transpose() * v;
        let err = (gram - DMatrix::identity(spec.dim(), spec.dim())).amax();
        assert!(err < 1e-10, "orthonormality {err}");
    }

    #[test]
    fn diagonal_fast_path() {
        let basis = SpinBasis::new(8, 3, Some(0)).unwrap();
        let params = ModelParams::with_theta(8, 3, 0.0, 0.0).anisotropy(0.5);
        let h = build_hamiltonian(&params, &basis).unwrap();
        let spec = full_spectrum_with_guard(&h, 10).unwrap();
        assert!(matches!(spec.vectors, EigenVectors::Permutation(_)));
        // Only a handful of distinct levels, each hugely degenerate.
        let mut distinct = spec.values.clone();
        distinct.dedup();
        assert!(distinct.len() < 20);
        assert!(spec.values.windows(2).any(|w| w[0] == w[1]));
    }

    #[test]
    fn dense_guard() {
        let basis = SpinBasis::new(8, 1, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(8, 1, 1.0, 0.0), &basis).unwrap();
        assert!(matches!(full_spectrum_with_guard(&h, 10), Err(Error::Capacity { .. })));
    }

    #[test]
    fn invariant_under_basis_reordering() {
        // Reverse the ordinal order by conjugating with the reversal permutation.
        let basis = SpinBasis::new(6, 1, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(6, 1, 1.0, 2.1).field(0.4, 0.9), &basis).unwrap();
        let n = h.dim();
        let permuted = SparseOperator::from_triplets(
            n,
            h.tag(),
            h.triplets().map(|(r, c, v)| (n - 1 - r, n - 1 - c, v)).collect(),
        )
        .unwrap();
        let a = full_spectrum(&h).unwrap();
        let b = full_spectrum(&permuted).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn project_combine_round_trip() {
        let basis = SpinBasis::new(4, 1, Some(0)).unwrap();
        let h = build_hamiltonian(&ModelParams::with_theta(4, 1, 1.0, 0.4), &basis).unwrap();
        let spec = full_spectrum(&h).unwrap();
        let psi: Vec<Complex64> = (0..h.dim()).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let back = spec.combine(&spec.project(&psi));
        for (a, b) in psi.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
