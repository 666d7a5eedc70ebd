//! Spectral (eigendecomposition) solution of the vectorized generator:
//! ρ(t) = Σ_k c_k e^{λ_k t} R_k with biorthonormal left/right eigenmatrix
//! pairs, Tr(R_k L_k′) = δ_{kk′} and c_k = Tr(ρ(0) L_k).
//!
//! Requires the `lapack` feature (dense nonsymmetric eigensolver).

use std::cmp::Ordering;

use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, Inverse, OperationNorm, UPLO};
use num_complex::Complex64;

use crate::lindblad::{devectorize, validate_density_matrix, Liouvillian};
use crate::spin::{CMat, MatrixExt};
use crate::{Error, Result};

/// Above this estimate of ‖V‖₁‖V⁻¹‖₁ the eigenbasis is too ill-conditioned
/// (the generator is near-defective) for the spectral propagator to be
/// trusted.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Eigenvalues within this radius of zero count as stationary modes.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// Eigendecomposition of a [`Liouvillian`], sorted with stationary modes
/// first, then by decreasing real part (least-damped first).
#[derive(Clone, Debug)]
pub struct LiouvillianSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenmatrices R_k (devectorized eigenvector columns).
    pub right_matrices: Vec<CMat>,
    /// Left eigenmatrices L_k, normalized so Tr(R_k L_k′) = δ_{kk′}.
    pub left_matrices: Vec<CMat>,
    /// Hilbert-space dimension d.
    pub dim: usize,
    /// ‖V‖₁·‖V⁻¹‖₁ of the eigenvector matrix.
    pub condition_estimate: f64,
}

impl LiouvillianSpectrum {
    /// Number of stationary (|λ| ≤ [`ZERO_MODE_TOL`]) modes.
    pub fn zero_mode_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .take_while(|l| l.norm() <= ZERO_MODE_TOL)
            .count()
    }

    /// Expansion coefficients c_k = Tr(ρ₀ L_k) of a state in the
    /// eigenmatrix basis.
    pub fn coefficients(&self, rho0: &CMat) -> Result<Vec<Complex64>> {
        if rho0.nrows() != self.dim || rho0.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho0.nrows(),
            });
        }
        Ok(self
            .left_matrices
            .iter()
            .map(|l| rho0.dot(l).trace_c())
            .collect())
    }
}

/// Diagonalizes the generator. Fails with a spectral-unreliable error when
/// the eigenvector matrix is numerically singular or its condition
/// estimate exceeds [`CONDITION_LIMIT`] — near an exceptional point the
/// expansion ρ(t) = Σ c_k e^{λ_k t} R_k loses accuracy and the
/// time-stepping solver should be used instead.
pub fn spectral_decompose(lio: &Liouvillian) -> Result<LiouvillianSpectrum> {
    let (eigs, vecs) = lio.matrix.eig()?;
    let inv = match vecs.inv() {
        Ok(w) => w,
        Err(_) => {
            return Err(Error::SpectralUnreliable {
                condition: f64::INFINITY,
            })
        }
    };
    let condition = vecs.opnorm_one()? * inv.opnorm_one()?;
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SpectralUnreliable {
            condition,
        });
    }

    let m = eigs.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (eigs[a], eigs[b]);
        let za = la.norm() > ZERO_MODE_TOL;
        let zb = lb.norm() > ZERO_MODE_TOL;
        za.cmp(&zb)
            .then_with(|| {
                (-la.re)
                    .partial_cmp(&(-lb.re))
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| {
                (-la.im)
                    .partial_cmp(&(-lb.im))
                    .unwrap_or(Ordering::Equal)
            })
    });

    let mut eigenvalues = Vec::with_capacity(m);
    let mut right_matrices = Vec::with_capacity(m);
    let mut left_matrices = Vec::with_capacity(m);
    for &k in &order {
        eigenvalues.push(eigs[k]);
        right_matrices.push(devectorize(&vecs.column(k).to_owned())?);
        // Row k of V⁻¹, reshaped and transposed so that the pairing with
        // the right matrices is the plain trace (no conjugation).
        let left = devectorize(&inv.row(k).to_owned())?;
        left_matrices.push(left.t().to_owned());
    }
    Ok(LiouvillianSpectrum {
        eigenvalues,
        right_matrices,
        left_matrices,
        dim: lio.dim,
        condition_estimate: condition,
    })
}

/// Evaluates ρ(t) = Σ_k c_k e^{λ_k t} R_k at each requested time. The
/// result is re-Hermitized, (ρ + ρ†)/2, to scrub the eigensolver's
/// rounding; the trace is left untouched as a fidelity witness.
pub fn evolve_spectral(
    spectrum: &LiouvillianSpectrum,
    rho0: &CMat,
    times: &[f64],
) -> Result<Vec<CMat>> {
    validate_density_matrix(rho0, 1e-8)?;
    let coeff = spectrum.coefficients(rho0)?;
    let d = spectrum.dim;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !t.is_finite() {
            return Err(Error::Unsupported(format!(
                "evaluation times must be finite, got {t}"
            )));
        }
        let mut rho: CMat = Array2::zeros((d, d));
        for ((c, lam), r) in coeff
            .iter()
            .zip(&spectrum.eigenvalues)
            .zip(&spectrum.right_matrices)
        {
            let w = c * (lam * t).exp();
            if w.norm() == 0.0 {
                continue;
            }
            rho.zip_mut_with(r, |acc, x| *acc += w * x);
        }
        let herm = (&rho + &rho.adjoint()).mapv(|z| z * 0.5);
        out.push(herm);
    }
    Ok(out)
}

/// The unique stationary state R₁/Tr(R₁). Errors when the number of
/// stationary modes differs from one.
pub fn steady_state_exact(spectrum: &LiouvillianSpectrum) -> Result<CMat> {
    let zeros = spectrum.zero_mode_count();
    if zeros != 1 {
        return Err(Error::DegenerateSteadyState {
            multiplicity: zeros,
        });
    }
    let r = &spectrum.right_matrices[0];
    let tr = r.trace_c();
    if tr.norm() < 1e-12 {
        return Err(Error::InvalidState(
            "stationary mode has vanishing trace; no normalizable steady state".into(),
        ));
    }
    Ok(r.mapv(|z| z / tr))
}

/// Smallest eigenvalue of a Hermitian matrix (for positivity checks).
pub fn min_eigenvalue_hermitian(m: &CMat) -> Result<f64> {
    let (vals, _) = m.eigh(UPLO::Lower)?;
    vals.iter()
        .cloned()
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.min(v))))
        .ok_or_else(|| Error::InvalidState("empty matrix has no eigenvalues".into()))
}

/// Max-abs of dρ/dt — how stationary a purported steady state really is.
pub fn stationarity_residual(lio: &Liouvillian, rho: &CMat) -> Result<f64> {
    Ok(lio.apply(rho)?.max_abs())
}
