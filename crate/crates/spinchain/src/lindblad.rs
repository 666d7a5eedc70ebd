//! The exact dissipative dynamics: vectorization of density matrices,
//! dense superoperator (Liouvillian) construction with on-site and
//! nearest-neighbour dissipators, collection rate matrices and their
//! positivity, and a fixed-step time-domain propagator.
//!
//! Vectorization is row-major: vec(ρ)[i·d + j] = ρ_ij, under which
//! vec(AρB) = (A ⊗ Bᵀ)·vec(ρ).

use ndarray::{linalg::general_mat_vec_mul, linalg::kron, Array1, Array2};
use num_complex::Complex64;

use crate::model::{build_hamiltonian, ChainModel};
use crate::spin::{embed_site, identity, jump_operator, Axis3, CMat, MatrixExt, Sign};
use crate::{Error, Result};

/// Dense-solver capacity cap: the superoperator of an N-site chain holds
/// 16^N complex entries, so N beyond this needs deliberate override.
pub const DEFAULT_SITE_CAP: usize = 6;

type CVec = Array1<Complex64>;

/// Row-major vectorization vec(ρ)[i·d + j] = ρ_ij.
pub fn vectorize(rho: &CMat) -> Result<CVec> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    Ok(Array1::from_iter(rho.iter().cloned()))
}

/// Inverse of [`vectorize`]; the length must be a perfect square.
pub fn devectorize(v: &CVec) -> Result<CMat> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: v.len(),
        });
    }
    Ok(Array2::from_shape_vec((d, d), v.to_vec()).expect("square shape"))
}

/// Superoperator of the generalized dissipator
/// D[A,B]ρ = AρB† − ½{B†A, ρ}, in row-major vectorization:
/// A ⊗ B* − ½ (B†A) ⊗ 𝟙 − ½ 𝟙 ⊗ (B†A)ᵀ.
pub fn dissipator_superoperator(a: &CMat, b: &CMat) -> Result<CMat> {
    let d = a.nrows();
    if a.ncols() != d || b.nrows() != d || b.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.nrows(),
        });
    }
    let eye = identity(d);
    let bdag_a = b.adjoint().dot(a);
    let jump = kron(a, &b.mapv(|z| z.conj()));
    let left = kron(&bdag_a, &eye);
    let right = kron(&eye, &bdag_a.t().to_owned());
    Ok(&jump - &(&left + &right).mapv(|z| z * 0.5))
}

/// Superoperator of the coherent part −i[H, ·]:
/// −i (H ⊗ 𝟙 − 𝟙 ⊗ Hᵀ).
pub fn hamiltonian_superoperator(h: &CMat) -> Result<CMat> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let eye = identity(h.nrows());
    let comm = &kron(h, &eye) - &kron(&eye, &h.t().to_owned());
    Ok(comm.mapv(|z| z * Complex64::new(0.0, -1.0)))
}

/// The full generator of the open-chain dynamics in vectorized form.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    /// Dense d² × d² superoperator matrix.
    pub matrix: CMat,
    /// Hilbert-space dimension d = 2^N.
    pub dim: usize,
    pub n_sites: usize,
}

impl Liouvillian {
    /// dρ/dt for a density matrix, through the vectorized generator.
    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.nrows(),
            });
        }
        let v = vectorize(rho)?;
        devectorize(&self.matrix.dot(&v))
    }
}

/// Builds the dense Liouvillian with the default capacity cap.
pub fn build_liouvillian(model: &ChainModel) -> Result<Liouvillian> {
    build_liouvillian_capped(model, DEFAULT_SITE_CAP)
}

/// Builds the dense Liouvillian, refusing chains longer than `site_cap`.
///
/// Dissipative structure: every site carries the six on-site channels
/// (axis × sign) at rates γ_{α,η} with jump operator S_{α,η} on that site;
/// every ordered pair of adjacent sites (j, j′) contributes a cross
/// channel at rate g_{α,η} mixing S_{α,η} on the two sites. Channels with
/// zero rate are skipped.
pub fn build_liouvillian_capped(model: &ChainModel, site_cap: usize) -> Result<Liouvillian> {
    model.validate()?;
    if model.n_sites > site_cap {
        return Err(Error::CapacityExceeded {
            n_sites: model.n_sites,
            cap: site_cap,
        });
    }
    let n = model.n_sites;
    let d = model.dim();
    let h = build_hamiltonian(model)?;
    let mut l = hamiltonian_superoperator(&h)?;

    for ax in Axis3::ALL {
        for sign in Sign::ALL {
            let gamma = model.on_site_rates[ax.index()][sign.index()];
            let g = model.neighbour_rates[ax.index()][sign.index()];
            if gamma == 0.0 && g == 0.0 {
                continue;
            }
            let op = jump_operator(ax, sign);
            let embedded: Vec<CMat> = (1..=n)
                .map(|j| embed_site(&op, j, n))
                .collect::<Result<_>>()?;
            if gamma != 0.0 {
                for a in &embedded {
                    let dis = dissipator_superoperator(a, a)?;
                    l = l + dis.mapv(|z| z * gamma);
                }
            }
            if g != 0.0 {
                for j in 0..n.saturating_sub(1) {
                    // Both orderings of the adjacent pair.
                    let fwd = dissipator_superoperator(&embedded[j + 1], &embedded[j])?;
                    let bwd = dissipator_superoperator(&embedded[j], &embedded[j + 1])?;
                    l = l + (&fwd + &bwd).mapv(|z| z * g);
                }
            }
        }
    }
    Ok(Liouvillian {
        matrix: l,
        dim: d,
        n_sites: n,
    })
}

/// N×N rate matrix of the jump-operator collection {S_{α,η}^(j)}_j for one
/// (axis, sign) channel: the on-site rate on the diagonal, the
/// nearest-neighbour rate on the first off-diagonals.
pub fn dissipator_rate_matrix(model: &ChainModel, axis: Axis3, sign: Sign) -> Array2<f64> {
    let n = model.n_sites;
    let gamma = model.on_site_rates[axis.index()][sign.index()];
    let g = model.neighbour_rates[axis.index()][sign.index()];
    let mut m = Array2::zeros((n, n));
    for j in 0..n {
        m[(j, j)] = gamma;
        if j + 1 < n {
            m[(j, j + 1)] = g;
            m[(j + 1, j)] = g;
        }
    }
    m
}

/// Smallest eigenvalue of [`dissipator_rate_matrix`] in closed form: a
/// symmetric tridiagonal Toeplitz matrix has eigenvalues
/// γ + 2g·cos(kπ/(N+1)), k = 1..N, minimized at γ − 2|g|·cos(π/(N+1)).
pub fn rate_matrix_min_eigenvalue(model: &ChainModel, axis: Axis3, sign: Sign) -> f64 {
    let n = model.n_sites as f64;
    let gamma = model.on_site_rates[axis.index()][sign.index()];
    let g = model.neighbour_rates[axis.index()][sign.index()];
    gamma - 2.0 * g.abs() * (std::f64::consts::PI / (n + 1.0)).cos()
}

/// True when every channel's rate matrix is positive semidefinite, which
/// guarantees the generator is of completely positive (GKSL) form.
pub fn rate_matrices_psd(model: &ChainModel) -> bool {
    Axis3::ALL.iter().all(|&ax| {
        Sign::ALL
            .iter()
            .all(|&s| rate_matrix_min_eigenvalue(model, ax, s) >= -1e-12)
    })
}

/// Checks shape, hermiticity and unit trace (positivity is not examined —
/// that needs an eigendecomposition).
pub fn validate_density_matrix(rho: &CMat, tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::InvalidState(format!(
            "density matrix must be square, got {}×{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if !rho.is_hermitian(tol) {
        return Err(Error::InvalidState(
            "density matrix is not Hermitian within tolerance".into(),
        ));
    }
    let tr = rho.trace_c();
    if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::InvalidState(format!(
            "density matrix trace is {tr}, expected 1"
        )));
    }
    Ok(())
}

/// Pure product state ⊗_j |ψ_j⟩⟨ψ_j| from per-site spinor amplitudes in
/// site order.
pub fn pure_product_state(amplitudes: &[[Complex64; 2]]) -> Result<CMat> {
    if amplitudes.is_empty() {
        return Err(Error::InvalidState(
            "product state needs at least one site".into(),
        ));
    }
    let mut psi: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    for amp in amplitudes {
        let mut next = Vec::with_capacity(psi.len() * 2);
        for a in &psi {
            next.push(a * amp[0]);
            next.push(a * amp[1]);
        }
        psi = next;
    }
    let d = psi.len();
    let mut rho = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            rho[(i, j)] = psi[i] * psi[j].conj();
        }
    }
    Ok(rho)
}

/// Sampled trajectory of the exact solver with conservation diagnostics.
#[derive(Clone, Debug)]
pub struct ExactSeries {
    pub times: Vec<f64>,
    pub states: Vec<CMat>,
    pub diagnostics: EvolveDiagnostics,
}

/// Conservation-law bookkeeping collected at sample points.
#[derive(Clone, Debug, Default)]
pub struct EvolveDiagnostics {
    /// max_t |Tr ρ(t) − 1|.
    pub max_trace_deviation: f64,
    /// max_t ‖ρ(t) − ρ(t)†‖_max.
    pub max_hermiticity_deviation: f64,
    /// Set when either deviation exceeds 1e−8.
    pub flagged: bool,
}

const DIAGNOSTIC_TOL: f64 = 1e-8;

fn sample_diagnostics(v: &CVec, d: usize, diag: &mut EvolveDiagnostics) {
    let mut tr = Complex64::new(0.0, 0.0);
    let mut herm: f64 = 0.0;
    for i in 0..d {
        tr += v[i * d + i];
        for j in 0..=i {
            herm = herm.max((v[i * d + j] - v[j * d + i].conj()).norm());
        }
    }
    diag.max_trace_deviation = diag
        .max_trace_deviation
        .max((tr - Complex64::new(1.0, 0.0)).norm());
    diag.max_hermiticity_deviation = diag.max_hermiticity_deviation.max(herm);
    diag.flagged = diag.max_trace_deviation > DIAGNOSTIC_TOL
        || diag.max_hermiticity_deviation > DIAGNOSTIC_TOL;
}

/// Propagates ρ(t) with fixed-step fourth-order Runge–Kutta on the
/// vectorized generator. Samples at t = 0, every `sample_every` steps and
/// at the final step; `t_end` is rounded to a whole number of steps.
pub fn evolve_rk4(
    lio: &Liouvillian,
    rho0: &CMat,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<ExactSeries> {
    validate_density_matrix(rho0, 1e-8)?;
    if rho0.nrows() != lio.dim {
        return Err(Error::DimensionMismatch {
            expected: lio.dim,
            got: rho0.nrows(),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() || !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Unsupported(format!(
            "propagation needs positive finite dt and t_end, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let every = sample_every.max(1);
    let steps = ((t_end / dt).round() as usize).max(1);
    let d = lio.dim;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let mut v = vectorize(rho0)?;
    let mut k1 = CVec::zeros(d * d);
    let mut k2 = CVec::zeros(d * d);
    let mut k3 = CVec::zeros(d * d);
    let mut k4 = CVec::zeros(d * d);
    let mut stage = CVec::zeros(d * d);

    let mut diagnostics = EvolveDiagnostics::default();
    sample_diagnostics(&v, d, &mut diagnostics);
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];

    for step in 1..=steps {
        general_mat_vec_mul(one, &lio.matrix, &v, zero, &mut k1);
        stage.assign(&v);
        stage.scaled_add(Complex64::new(dt / 2.0, 0.0), &k1);
        general_mat_vec_mul(one, &lio.matrix, &stage, zero, &mut k2);
        stage.assign(&v);
        stage.scaled_add(Complex64::new(dt / 2.0, 0.0), &k2);
        general_mat_vec_mul(one, &lio.matrix, &stage, zero, &mut k3);
        stage.assign(&v);
        stage.scaled_add(Complex64::new(dt, 0.0), &k3);
        general_mat_vec_mul(one, &lio.matrix, &stage, zero, &mut k4);

        let h6 = Complex64::new(dt / 6.0, 0.0);
        let h3 = Complex64::new(dt / 3.0, 0.0);
        v.scaled_add(h6, &k1);
        v.scaled_add(h3, &k2);
        v.scaled_add(h3, &k3);
        v.scaled_add(h6, &k4);

        if step % every == 0 || step == steps {
            let t = step as f64 * dt;
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Diverged { t });
            }
            sample_diagnostics(&v, d, &mut diagnostics);
            times.push(t);
            states.push(devectorize(&v)?);
        }
    }
    Ok(ExactSeries {
        times,
        states,
        diagnostics,
    })
}
