//! Measurements on chain density matrices: partial traces, site-resolved
//! and averaged magnetization, connected two-point correlations, the
//! two-qubit concurrence, and the mean-field-vs-exact deviation metric.
//!
//! Index convention: site 1 is the leftmost Kronecker factor, so in an
//! N-site basis index the bit of site j sits at position N − j (counting
//! from the least significant bit).

use ndarray::Array2;
use num_complex::Complex64;

use crate::spin::{pauli, Axis3, CMat, MatrixExt};
use crate::{Error, Result};

/// Distributes the bits of `x` (MSB-first over `positions`) into a full
/// basis index.
fn scatter_bits(x: usize, positions: &[usize]) -> usize {
    let k = positions.len();
    let mut out = 0usize;
    for (idx, &pos) in positions.iter().enumerate() {
        let bit = (x >> (k - 1 - idx)) & 1;
        out |= bit << pos;
    }
    out
}

fn check_chain_dims(rho: &CMat, n_sites: usize) -> Result<()> {
    let d = 1usize << n_sites;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows(),
        });
    }
    Ok(())
}

/// Traces out every site not listed in `keep` (1-based, strictly
/// increasing). The result orders the kept sites as in `keep`.
pub fn partial_trace(rho: &CMat, keep: &[usize], n_sites: usize) -> Result<CMat> {
    check_chain_dims(rho, n_sites)?;
    if keep.is_empty() {
        return Err(Error::InvalidState(
            "partial trace must keep at least one site".into(),
        ));
    }
    for w in keep.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidState(
                "kept sites must be strictly increasing".into(),
            ));
        }
    }
    for &s in keep {
        if s == 0 || s > n_sites {
            return Err(Error::SiteOutOfRange {
                site: s,
                n_sites,
            });
        }
    }
    let keep_pos: Vec<usize> = keep.iter().map(|&s| n_sites - s).collect();
    let traced_pos: Vec<usize> = (1..=n_sites)
        .filter(|s| !keep.contains(s))
        .map(|s| n_sites - s)
        .collect();
    let dk = 1usize << keep.len();
    let dt = 1usize << traced_pos.len();
    let mut out: CMat = Array2::zeros((dk, dk));
    for a in 0..dk {
        let ia = scatter_bits(a, &keep_pos);
        for b in 0..dk {
            let jb = scatter_bits(b, &keep_pos);
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..dt {
                let env = scatter_bits(e, &traced_pos);
                acc += rho[(ia | env, jb | env)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Expectation value of a single-site operator at `site`.
pub fn site_expectation(rho: &CMat, op: &CMat, site: usize, n_sites: usize) -> Result<Complex64> {
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: op.nrows(),
        });
    }
    let reduced = partial_trace(rho, &[site], n_sites)?;
    Ok(op.dot(&reduced).trace_c())
}

/// Chain-averaged magnetization (1/N)·Σ_j ⟨σ_α^(j)⟩ for α = x, y, z.
pub fn magnetization(rho: &CMat, n_sites: usize) -> Result<[f64; 3]> {
    check_chain_dims(rho, n_sites)?;
    let mut m = [0.0; 3];
    for site in 1..=n_sites {
        let reduced = partial_trace(rho, &[site], n_sites)?;
        for ax in Axis3::ALL {
            m[ax.index()] += pauli(ax).dot(&reduced).trace_c().re / n_sites as f64;
        }
    }
    Ok(m)
}

/// Connected correlation C^{ij}_{αβ} = ⟨σ_α^(i) σ_β^(j)⟩ − ⟨σ_α^(i)⟩⟨σ_β^(j)⟩.
///
/// The sites must differ; the result of a Hermitian ρ is real, and a
/// residual imaginary part above 1e−10 is reported as an invalid state.
pub fn two_point_correlation(
    rho: &CMat,
    site_i: usize,
    site_j: usize,
    axis_a: Axis3,
    axis_b: Axis3,
    n_sites: usize,
) -> Result<f64> {
    if site_i == site_j {
        return Err(Error::CoincidentSites(site_i));
    }
    let (lo, hi) = (site_i.min(site_j), site_i.max(site_j));
    let pair = partial_trace(rho, &[lo, hi], n_sites)?;
    let joint_op = if site_i == lo {
        ndarray::linalg::kron(&pauli(axis_a), &pauli(axis_b))
    } else {
        ndarray::linalg::kron(&pauli(axis_b), &pauli(axis_a))
    };
    let joint = joint_op.dot(&pair).trace_c();
    let si = site_expectation(rho, &pauli(axis_a), site_i, n_sites)?;
    let sj = site_expectation(rho, &pauli(axis_b), site_j, n_sites)?;
    let corr = joint - si * sj;
    if corr.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "correlation has imaginary residue {:.3e}; the state is not Hermitian enough",
            corr.im
        )));
    }
    Ok(corr.re)
}

/// Two-qubit concurrence (entanglement monotone in [0, 1]) of a 4×4
/// density matrix: with ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) and α₁ ≥ … ≥ α₄ the
/// square roots of the eigenvalues of ρρ̃, C = max(0, α₁ − α₂ − α₃ − α₄).
#[cfg(feature = "lapack")]
pub fn concurrence(rho: &CMat) -> Result<f64> {
    use ndarray_linalg::Eig;

    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.nrows(),
        });
    }
    crate::lindblad::validate_density_matrix(rho, 1e-8)?;
    let yy = ndarray::linalg::kron(&pauli(Axis3::Y), &pauli(Axis3::Y));
    let rho_tilde = yy.dot(&rho.mapv(|z| z.conj())).dot(&yy);
    let (eigs, _) = rho.dot(&rho_tilde).eig()?;
    let mut alphas: Vec<f64> = Vec::with_capacity(4);
    for lam in eigs.iter() {
        // The product is similar to a PSD matrix, so its spectrum is real
        // and non-negative up to rounding.
        if lam.re < -1e-10 || lam.im.abs() > 1e-8 {
            return Err(Error::InvalidState(format!(
                "spectrum of the spin-flipped product left the non-negative axis: {lam}"
            )));
        }
        alphas.push(lam.re.max(0.0).sqrt());
    }
    alphas.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok((alphas[0] - alphas[1] - alphas[2] - alphas[3]).max(0.0))
}

/// Pointwise squared distance between two magnetization trajectories and
/// its time average.
#[derive(Clone, Debug)]
pub struct DeviationSeries {
    pub times: Vec<f64>,
    /// |M_a(t) − M_b(t)|² at each sample.
    pub values: Vec<f64>,
    /// Trapezoid average of `values` over the requested window.
    pub time_average: f64,
}

/// Default averaging window.
pub const DEVIATION_WINDOW: (f64, f64) = (0.0, 1e3);

/// Compares two sampled magnetization trajectories on a shared time grid
/// and averages |ΔM|² over `window` (default [`DEVIATION_WINDOW`]) with
/// the trapezoid rule. The grids must agree pointwise to 1e−9.
pub fn deviation_series(
    times_a: &[f64],
    series_a: &[[f64; 3]],
    times_b: &[f64],
    series_b: &[[f64; 3]],
    window: Option<(f64, f64)>,
) -> Result<DeviationSeries> {
    if times_a.len() != series_a.len() || times_b.len() != series_b.len() {
        return Err(Error::GridMismatch(
            "each series must have one value per time sample".into(),
        ));
    }
    if times_a.len() != times_b.len() {
        return Err(Error::GridMismatch(format!(
            "sample counts differ: {} vs {}",
            times_a.len(),
            times_b.len()
        )));
    }
    for (ta, tb) in times_a.iter().zip(times_b) {
        if (ta - tb).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "sample times diverge: {ta} vs {tb}"
            )));
        }
    }
    let values: Vec<f64> = series_a
        .iter()
        .zip(series_b)
        .map(|(a, b)| (0..3).map(|c| (a[c] - b[c]).powi(2)).sum())
        .collect();

    let (w0, w1) = window.unwrap_or(DEVIATION_WINDOW);
    let idx: Vec<usize> = times_a
        .iter()
        .enumerate()
        .filter(|(_, t)| **t >= w0 - 1e-12 && **t <= w1 + 1e-12)
        .map(|(i, _)| i)
        .collect();
    if idx.len() < 2 {
        return Err(Error::GridMismatch(format!(
            "averaging window [{w0}, {w1}] covers fewer than two samples"
        )));
    }
    let mut integral = 0.0;
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        integral += 0.5 * (values[i] + values[j]) * (times_a[j] - times_a[i]);
    }
    let span = times_a[*idx.last().unwrap()] - times_a[idx[0]];
    Ok(DeviationSeries {
        times: times_a.to_vec(),
        values,
        time_average: integral / span,
    })
}
