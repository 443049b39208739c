//! Lanczos approximation of `exp(−iHτ)ψ` with adaptive substepping.
//!
//! Each substep builds an orthonormal Krylov basis `V` of dimension `m` from
//! the current state (full reorthogonalization) and the tridiagonal
//! projection `T = V†HV`. The step is `‖ψ‖·V·exp(−iTτ)e₁`, accepted when the
//! residual estimate `β_m·|[exp(−iTτ)e₁]_m|` is within the step tolerance;
//! otherwise `τ` is halved against the same basis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{check_operands, dot, norm, EvolutionConfig, StateVector};
use crate::error::{Error, Result};
use crate::model::SparseOperator;

const MAX_HALVINGS: usize = 80;

struct KrylovSpace {
    vectors: Vec<Vec<Complex64>>,
    // Eigendecomposition of the projected tridiagonal matrix.
    ritz_values: Vec<f64>,
    ritz_vectors: DMatrix<f64>,
    residual: f64,
    scale: f64,
}

impl KrylovSpace {
    fn build(h: &SparseOperator, psi: &[Complex64], max_dim: usize, breakdown_tol: f64) -> Result<Self> {
        let dim = psi.len();
        let max_dim = max_dim.min(dim).max(1);
        let scale = norm(psi);
        let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim);
        vectors.push(psi.iter().map(|a| a / scale).collect());
        let mut alpha = Vec::with_capacity(max_dim);
        let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        let mut residual = 0.0;

        for j in 0..max_dim {
            h.apply(&vectors[j], &mut w);
            let a = dot(&vectors[j], &w).re;
            alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&vectors[j]) {
                *wi -= vi * a;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, vi) in w.iter_mut().zip(&vectors[j - 1]) {
                    *wi -= vi * b;
                }
            }
            for v in &vectors {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
            let b = norm(&w);
            if b <= breakdown_tol {
                // Happy breakdown: the subspace is invariant.
                residual = 0.0;
                break;
            }
            if j + 1 == max_dim {
                residual = b;
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }

        let m = alpha.len();
        vectors.truncate(m);
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::try_new(t, f64::EPSILON, 1000 * m.max(10))
            .ok_or_else(|| Error::Convergence("tridiagonal eigensolver".into()))?;
        Ok(Self {
            vectors,
            ritz_values: eig.eigenvalues.iter().copied().collect(),
            ritz_vectors: eig.eigenvectors,
            residual,
            scale,
        })
    }

    /// Coefficients of `exp(−iTτ)e₁` in the Krylov basis.
    fn propagate(&self, tau: f64) -> Vec<Complex64> {
        let m = self.vectors.len();
        let q = &self.ritz_vectors;
        let weights: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(q[(0, k)], -self.ritz_values[k] * tau))
            .collect();
        (0..m)
            .map(|i| (0..m).map(|k| weights[k] * q[(i, k)]).sum())
            .collect()
    }

    fn error_estimate(&self, coeffs: &[Complex64]) -> f64 {
        self.scale * self.residual * coeffs.last().map_or(0.0, |c| c.norm())
    }

    fn assemble(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (v, &c) in self.vectors.iter().zip(coeffs) {
            let c = c * self.scale;
            for (o, &x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
}

/// Krylov propagation to every time of `config.time_grid`, streaming states to `sink`.
pub fn evolve_krylov_each<F>(h: &SparseOperator, psi0: &StateVector, config: &EvolutionConfig, mut sink: F) -> Result<()>
where
    F: FnMut(usize, f64, &StateVector) -> Result<()>,
{
    check_operands(h, psi0)?;
    config.validate()?;
    let breakdown_tol = 1e-13 * h.norm_bound().max(1.0);
    let mut current = psi0.amplitudes().to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); current.len()];
    let mut now = 0.0;
    let mut substeps = 0usize;

    for (k, &target) in config.time_grid.iter().enumerate() {
        while target - now > 0.0 {
            let space = KrylovSpace::build(h, &current, config.krylov_dim, breakdown_tol)?;
            let mut tau = target - now;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let coeffs = space.propagate(tau);
                if space.error_estimate(&coeffs) <= config.step_tolerance {
                    accepted = Some(coeffs);
                    break;
                }
                tau /= 2.0;
            }
            let coeffs = accepted.ok_or_else(|| {
                Error::Convergence(format!("Krylov step at t={now} did not meet the tolerance"))
            })?;
            space.assemble(&coeffs, &mut next);
            std::mem::swap(&mut current, &mut next);
            // Land exactly on the output time when the full interval was taken.
            now = if tau == target - now { target } else { now + tau };
            substeps += 1;
            if substeps > config.max_substeps {
                return Err(Error::Convergence(format!(
                    "exceeded {} Krylov substeps before t={target}",
                    config.max_substeps
                )));
            }
        }
        sink(k, target, &StateVector::from_raw(psi0.tag(), current.clone()))?;
    }
    Ok(())
}

/// Krylov propagation collecting the states at every requested time.
pub fn evolve_krylov(h: &SparseOperator, psi0: &StateVector, config: &EvolutionConfig) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(config.time_grid.len());
    evolve_krylov_each(h, psi0, config, |_, _, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}
