//! Single-site operators, axis eigenstates, raising/lowering jump
//! operators, and Kronecker embedding into the chain Hilbert space.
//!
//! Conventions fixed here and relied on everywhere else:
//! * canonical basis = σ_z eigenbasis, |↑⟩ = (1, 0) first;
//! * spin operators are S_α = σ_α / 2 (ħ = 1);
//! * site 1 is the **leftmost** Kronecker factor, so for an N-site basis
//!   index the bit of site j is bit (N − j) counting from the least
//!   significant end.

use ndarray::{array, linalg::kron, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix used for all operators and states.
pub type CMat = Array2<Complex64>;

/// Spatial axis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis3 {
    X,
    Y,
    Z,
}

impl Axis3 {
    /// All axes in (x, y, z) order.
    pub const ALL: [Axis3; 3] = [Axis3::X, Axis3::Y, Axis3::Z];

    /// Index into 3-vectors: x → 0, y → 1, z → 2.
    pub fn index(self) -> usize {
        match self {
            Axis3::X => 0,
            Axis3::Y => 1,
            Axis3::Z => 2,
        }
    }

    /// Lower-case letter for file headers and messages.
    pub fn label(self) -> &'static str {
        match self {
            Axis3::X => "x",
            Axis3::Y => "y",
            Axis3::Z => "z",
        }
    }
}

/// Spin orientation along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Up,
    Down,
}

/// Sign selecting the raising (+) or lowering (−) member of a jump-operator
/// pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Both signs in (+, −) order.
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// Index into rate tables: + → 0, − → 1.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// "+" or "-".
    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

/// The Pauli matrix for one axis in the canonical basis.
pub fn pauli(axis: Axis3) -> CMat {
    match axis {
        Axis3::X => array![[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        Axis3::Y => array![[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        Axis3::Z => array![[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
    }
}

/// Spin-1/2 operator S_α = σ_α / 2.
pub fn spin_op(axis: Axis3) -> CMat {
    pauli(axis).mapv(|v| v * 0.5)
}

/// A normalized eigenvector of one Pauli matrix, kept with its labels.
#[derive(Clone, Debug)]
pub struct AxisSpinor {
    pub axis: Axis3,
    pub orientation: Orientation,
    /// Amplitudes in the canonical basis: index 0 = |↑⟩, index 1 = |↓⟩.
    pub amplitudes: [Complex64; 2],
}

/// The ±1 eigenstate of σ_axis, with the global phases fixed once and for
/// all (the x and y "down" states carry a leading minus sign).
pub fn axis_eigenstate(axis: Axis3, orientation: Orientation) -> AxisSpinor {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amplitudes = match (axis, orientation) {
        (Axis3::X, Orientation::Up) => [c(s, 0.), c(s, 0.)],
        (Axis3::X, Orientation::Down) => [c(-s, 0.), c(s, 0.)],
        (Axis3::Y, Orientation::Up) => [c(s, 0.), c(0., s)],
        (Axis3::Y, Orientation::Down) => [c(-s, 0.), c(0., s)],
        (Axis3::Z, Orientation::Up) => [c(1., 0.), c(0., 0.)],
        (Axis3::Z, Orientation::Down) => [c(0., 0.), c(1., 0.)],
    };
    AxisSpinor {
        axis,
        orientation,
        amplitudes,
    }
}

/// Spinor amplitudes (cos θ/2, e^{iφ} sin θ/2) of the pure state whose
/// Bloch vector sits at polar angle θ from +z and azimuth φ.
pub fn tilted_spinor(theta: f64, phi: f64) -> [Complex64; 2] {
    let half = theta / 2.0;
    [
        c(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), phi),
    ]
}

/// Jump operator S_{α,±} that raises (+) or lowers (−) the spin projection
/// along `axis`, up to a unimodular phase:
///
/// * S_{x,±} = −S_z ± i S_y
/// * S_{y,±} =  S_z ± i S_x
/// * S_{z,±} =  S_x ± i S_y
///
/// The two members of each pair are exact adjoints of one another.
pub fn jump_operator(axis: Axis3, sign: Sign) -> CMat {
    let s = match sign {
        Sign::Plus => c(0., 1.),
        Sign::Minus => c(0., -1.),
    };
    let (base, partner) = match axis {
        Axis3::X => (spin_op(Axis3::Z).mapv(|v| -v), spin_op(Axis3::Y)),
        Axis3::Y => (spin_op(Axis3::Z), spin_op(Axis3::X)),
        Axis3::Z => (spin_op(Axis3::X), spin_op(Axis3::Y)),
    };
    &base + &partner.mapv(|v| s * v)
}

/// Embed a single-site operator at 1-based `site` into the `n`-site chain:
/// 𝟙 ⊗ … ⊗ op ⊗ … ⊗ 𝟙 with `op` in position `site`.
pub fn embed_site(op: &CMat, site: usize, n: usize) -> Result<CMat> {
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: op.nrows().max(op.ncols()),
        });
    }
    let mut out = array![[c(1., 0.)]];
    let eye = identity(2);
    for k in 1..=n {
        out = kron(&out, if k == site { op } else { &eye });
    }
    Ok(out)
}

/// Predicates and small conveniences on dense complex matrices.
pub trait MatrixExt {
    /// Max-norm distance to the own adjoint is below `tol`.
    fn is_hermitian(&self, tol: f64) -> bool;
    /// ‖M†M − 𝟙‖_max below `tol`.
    fn is_unitary(&self, tol: f64) -> bool;
    /// Sum of the diagonal.
    fn trace_c(&self) -> Complex64;
    /// Adjoint (conjugate transpose).
    fn adjoint(&self) -> CMat;
    /// Largest absolute value of any entry.
    fn max_abs(&self) -> f64;
}

impl MatrixExt for CMat {
    fn is_hermitian(&self, tol: f64) -> bool {
        if self.nrows() != self.ncols() {
            return false;
        }
        let mut worst = 0.0f64;
        for i in 0..self.nrows() {
            for j in 0..=i {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst < tol
    }

    fn is_unitary(&self, tol: f64) -> bool {
        if self.nrows() != self.ncols() {
            return false;
        }
        let prod = self.adjoint().dot(self);
        let eye = identity(self.nrows());
        (&prod - &eye).max_abs() < tol
    }

    fn trace_c(&self) -> Complex64 {
        self.diag().sum()
    }

    fn adjoint(&self) -> CMat {
        self.t().mapv(|v| v.conj())
    }

    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_mat_eq(a: &CMat, b: &CMat, tol: f64) {
        assert_eq!(a.dim(), b.dim());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = tol);
            assert_abs_diff_eq!(x.im, y.im, epsilon = tol);
        }
    }

    #[test]
    fn pauli_matrices_have_canonical_entries() {
        let z = pauli(Axis3::Z);
        assert_eq!(z[(0, 0)], c(1., 0.));
        assert_eq!(z[(1, 1)], c(-1., 0.));
        assert_eq!(z[(0, 1)], c(0., 0.));
        let x = pauli(Axis3::X);
        assert_eq!(x[(0, 1)], c(1., 0.));
        assert_eq!(x[(1, 0)], c(1., 0.));
        let y = pauli(Axis3::Y);
        assert_eq!(y[(0, 1)], c(0., -1.));
        assert_eq!(y[(1, 0)], c(0., 1.));
        for ax in Axis3::ALL {
            assert!(pauli(ax).is_hermitian(1e-15));
            assert!(pauli(ax).is_unitary(1e-15));
            assert_abs_diff_eq!(pauli(ax).trace_c().norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn axis_eigenstates_match_fixed_phases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let up_x = axis_eigenstate(Axis3::X, Orientation::Up).amplitudes;
        assert_eq!(up_x, [c(s, 0.), c(s, 0.)]);
        let up_z = axis_eigenstate(Axis3::Z, Orientation::Up).amplitudes;
        assert_eq!(up_z, [c(1., 0.), c(0., 0.)]);
        let down_y = axis_eigenstate(Axis3::Y, Orientation::Down).amplitudes;
        assert_eq!(down_y, [c(-s, 0.), c(0., s)]);
    }

    #[test]
    fn axis_eigenstates_are_normalized_eigenvectors() {
        for ax in Axis3::ALL {
            for (orient, eval) in [(Orientation::Up, 1.0), (Orientation::Down, -1.0)] {
                let sp = axis_eigenstate(ax, orient);
                let [a0, a1] = sp.amplitudes;
                assert_abs_diff_eq!(a0.norm_sqr() + a1.norm_sqr(), 1.0, epsilon = 1e-15);
                let m = pauli(ax);
                let r0 = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                let r1 = m[(1, 0)] * a0 + m[(1, 1)] * a1;
                assert_abs_diff_eq!((r0 - a0 * eval).norm(), 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!((r1 - a1 * eval).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn tilted_spinor_has_the_requested_bloch_vector() {
        let (theta, phi) = (0.9_f64, 2.3_f64);
        let [a, b] = tilted_spinor(theta, phi);
        // ⟨σ⟩ from the amplitudes.
        let sx = 2.0 * (a.conj() * b).re;
        let sy = 2.0 * (a.conj() * b).im;
        let sz = a.norm_sqr() - b.norm_sqr();
        assert_abs_diff_eq!(sx, theta.sin() * phi.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(sy, theta.sin() * phi.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(sz, theta.cos(), epsilon = 1e-14);
    }

    #[test]
    fn z_plus_jump_is_canonical_raising_operator() {
        let j = jump_operator(Axis3::Z, Sign::Plus);
        let expect = array![[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]];
        assert_mat_eq(&j, &expect, 1e-15);
    }

    #[test]
    fn x_plus_jump_matrix_entries() {
        let j = jump_operator(Axis3::X, Sign::Plus);
        let expect = array![[c(-0.5, 0.), c(0.5, 0.)], [c(-0.5, 0.), c(0.5, 0.)]];
        assert_mat_eq(&j, &expect, 1e-15);
    }

    #[test]
    fn jump_pairs_are_exact_adjoints() {
        for ax in Axis3::ALL {
            let plus = jump_operator(ax, Sign::Plus);
            let minus = jump_operator(ax, Sign::Minus);
            assert_mat_eq(&plus.adjoint(), &minus, 0.0);
        }
    }

    /// Applies a 2×2 operator to spinor amplitudes.
    fn apply(m: &CMat, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
            m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
        ]
    }

    /// |⟨a|b⟩| with a, b as amplitude pairs.
    fn overlap_abs(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
        (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
    }

    #[test]
    fn plus_jump_raises_and_annihilates_along_each_axis() {
        for ax in Axis3::ALL {
            let plus = jump_operator(ax, Sign::Plus);
            let down = axis_eigenstate(ax, Orientation::Down).amplitudes;
            let up = axis_eigenstate(ax, Orientation::Up).amplitudes;
            let raised = apply(&plus, down);
            // Equals the up state up to a unimodular phase.
            let norm = (raised[0].norm_sqr() + raised[1].norm_sqr()).sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(overlap_abs(up, raised), 1.0, epsilon = 1e-12);
            // Annihilates the up state.
            let dead = apply(&plus, up);
            assert_abs_diff_eq!(dead[0].norm() + dead[1].norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn y_minus_jump_lowers_the_y_up_state() {
        let minus = jump_operator(Axis3::Y, Sign::Minus);
        let up = axis_eigenstate(Axis3::Y, Orientation::Up).amplitudes;
        let down = axis_eigenstate(Axis3::Y, Orientation::Down).amplitudes;
        let lowered = apply(&minus, up);
        assert_abs_diff_eq!(overlap_abs(down, lowered), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn embedding_places_operator_at_requested_site() {
        let sz = pauli(Axis3::Z);
        let at1 = embed_site(&sz, 1, 2).unwrap();
        let at2 = embed_site(&sz, 2, 2).unwrap();
        let d1: Vec<f64> = at1.diag().iter().map(|v| v.re).collect();
        let d2: Vec<f64> = at2.diag().iter().map(|v| v.re).collect();
        assert_eq!(d1, vec![1., 1., -1., -1.]);
        assert_eq!(d2, vec![1., -1., 1., -1.]);

        let eye = identity(2);
        for j in 1..=3 {
            let emb = embed_site(&eye, j, 3).unwrap();
            assert_mat_eq(&emb, &identity(8), 0.0);
        }
    }

    #[test]
    fn embedding_rejects_out_of_range_sites() {
        let sz = pauli(Axis3::Z);
        assert!(matches!(
            embed_site(&sz, 0, 2),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            embed_site(&sz, 3, 2),
            Err(Error::SiteOutOfRange { .. })
        ));
    }
}
