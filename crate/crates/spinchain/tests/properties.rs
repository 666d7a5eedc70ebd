//! Randomized invariant checks for the core algebra and dynamics.
//!
//! Each block below states one structural fact the library is supposed to
//! guarantee for *every* admissible input, then samples that input space.

use ndarray::Array2;
use num_complex::Complex64;
use proptest::array::uniform3;
use proptest::prelude::*;
use spinchain::lindblad::{
    build_liouvillian, devectorize, pure_product_state, vectorize,
};
use spinchain::meanfield::{
    integrate, ll_rhs, ll_rhs_no_offset, mf_rhs, MagnetizationState, MeanFieldConfig, MfMode,
};
use spinchain::model::{build_hamiltonian, ChainModel};
use spinchain::observables::two_point_correlation;
use spinchain::spin::{embed_site, spin_op, tilted_spinor, Axis3, CMat, MatrixExt};

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Magnetization vectors bounded away from the singular origin.
fn arb_mag() -> impl Strategy<Value = [f64; 3]> {
    uniform3(-1.0..1.0f64).prop_filter("norm above 0.2", |m| norm3(*m) > 0.2)
}

fn arb_field() -> impl Strategy<Value = [f64; 3]> {
    uniform3(-2.0..2.0f64)
}

fn arb_coupling() -> impl Strategy<Value = [f64; 3]> {
    uniform3(-2.0..2.0f64)
}

proptest! {
    /// The chain Hamiltonian is Hermitian for any field and coupling.
    #[test]
    fn hamiltonian_is_hermitian(
        n in 1usize..=3,
        b in arb_field(),
        v in arb_coupling(),
    ) {
        let h = build_hamiltonian(&ChainModel::closed(n, b, v)).unwrap();
        prop_assert!(h.is_hermitian(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// With no field and isotropic coupling, every component of the total
    /// spin commutes with the Hamiltonian.
    #[test]
    fn isotropic_hamiltonian_conserves_total_spin(
        n in 2usize..=4,
        v in 0.1..2.0f64,
    ) {
        let h = build_hamiltonian(&ChainModel::closed(n, [0.0; 3], [v; 3])).unwrap();
        for axis in Axis3::ALL {
            let dim = 1usize << n;
            let mut total: CMat = Array2::zeros((dim, dim));
            for site in 1..=n {
                total = total + embed_site(&spin_op(axis), site, n).unwrap();
            }
            let comm = h.dot(&total) - total.dot(&h);
            prop_assert!(comm.max_abs() < 1e-12, "axis {axis:?}: {}", comm.max_abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Without on-site relaxation the motion is purely rotational:
    /// dM/dt is orthogonal to M for both damping closures.
    #[test]
    fn rhs_is_orthogonal_to_m_without_relaxation(
        m in arb_mag(),
        b in arb_field(),
        v in arb_coupling(),
        alpha in 0.0..1.0f64,
        d in uniform3(-1.0..1.0f64),
        use_alpha in any::<bool>(),
    ) {
        let model = ChainModel::closed(1, b, v);
        let config = if use_alpha {
            MeanFieldConfig::ll_alpha(model, alpha, MfMode::Collective)
        } else {
            MeanFieldConfig::fixed_d(model, d, MfMode::Collective)
        };
        let rhs = ll_rhs_no_offset(m, &config).unwrap();
        let dot = m[0] * rhs[0] + m[1] * rhs[1] + m[2] * rhs[2];
        prop_assert!(dot.abs() < 1e-12, "m.dM/dt = {dot}");
    }
}

proptest! {
    /// The vector (cross-product) form and the expanded component form of
    /// the equation of motion agree for any state, rates, and closure.
    #[test]
    fn vector_and_component_forms_agree(
        m in arb_mag(),
        b in arb_field(),
        v in arb_coupling(),
        gamma in 0.0..0.4f64,
        n_b in 0.0..0.5f64,
        g_ratio in 0.0..0.2f64,
        alpha in 0.0..1.0f64,
        d in uniform3(-1.0..1.0f64),
        use_alpha in any::<bool>(),
    ) {
        let model = ChainModel::with_thermal_z_bath(1, b, v, gamma, n_b, g_ratio);
        let config = if use_alpha {
            MeanFieldConfig::ll_alpha(model, alpha, MfMode::Collective)
        } else {
            MeanFieldConfig::fixed_d(model, d, MfMode::Collective)
        };
        let vector_form = ll_rhs(m, &config).unwrap();
        let state = MagnetizationState::collective(m);
        let component_form = mf_rhs(&state, &config).unwrap()[0];
        for k in 0..3 {
            prop_assert!(
                (vector_form[k] - component_form[k]).abs() < 1e-12,
                "component {k}: {} vs {}",
                vector_form[k],
                component_form[k]
            );
        }
    }

    /// With D = alpha * B_eff and no relaxation, the equation reduces to the
    /// classical damped-precession form written directly in B_eff.
    #[test]
    fn alpha_closure_reduces_to_damped_precession(
        m in arb_mag(),
        b in arb_field(),
        v in arb_coupling(),
        alpha in 0.0..1.0f64,
    ) {
        let model = ChainModel::closed(1, b, v);
        let config = MeanFieldConfig::ll_alpha(model.clone(), alpha, MfMode::Collective);
        let rhs = ll_rhs(m, &config).unwrap();

        let mm = norm3(m);
        let be = spinchain::meanfield::effective_field(m, &model).unwrap();
        let prec = cross(m, be);
        let damp = cross(m, cross(m, be));
        let direct = [
            -prec[0] - alpha / mm * damp[0],
            -prec[1] - alpha / mm * damp[1],
            -prec[2] - alpha / mm * damp[2],
        ];
        for k in 0..3 {
            prop_assert!(
                (rhs[k] - direct[k]).abs() < 1e-12,
                "component {k}: {} vs {}",
                rhs[k],
                direct[k]
            );
        }
    }

    /// Dropping the constant relaxation offset changes the z component by
    /// exactly the total rate and nothing else (bitwise identity).
    #[test]
    fn relaxation_offset_is_exactly_constant(
        m in arb_mag(),
        b in arb_field(),
        v in arb_coupling(),
        gamma in 0.0..0.4f64,
        n_b in 0.0..0.5f64,
        alpha in 0.0..1.0f64,
    ) {
        let model = ChainModel::with_thermal_z_bath(1, b, v, gamma, n_b, 0.1);
        let total = model.gamma_total();
        let config = MeanFieldConfig::ll_alpha(model, alpha, MfMode::Collective);
        let full = ll_rhs(m, &config).unwrap();
        let trimmed = ll_rhs_no_offset(m, &config).unwrap();
        prop_assert_eq!(full[0], trimmed[0]);
        prop_assert_eq!(full[1], trimmed[1]);
        prop_assert_eq!(full[2], trimmed[2] - total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Row-major vectorization round-trips exactly.
    #[test]
    fn vectorization_roundtrip(
        dim in 2usize..=4,
        entries in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16),
    ) {
        let mut rho: CMat = Array2::zeros((dim, dim));
        let mut it = entries.iter().cycle();
        for r in 0..dim {
            for c in 0..dim {
                let (re, im) = it.next().unwrap();
                rho[(r, c)] = Complex64::new(*re, *im);
            }
        }
        let back = devectorize(&vectorize(&rho).unwrap()).unwrap();
        prop_assert_eq!(rho, back);
    }

    /// Trace preservation: the vectorized identity is a left null vector of
    /// the generator for any admissible rate table.
    #[test]
    fn trace_functional_annihilates_generator(
        n in 1usize..=2,
        b in arb_field(),
        v in arb_coupling(),
        gamma in 0.01..0.4f64,
        n_b in 0.0..0.5f64,
        ratio in 0.0..0.3f64,
        all_axes in any::<bool>(),
    ) {
        let model = if all_axes {
            ChainModel::with_thermal_all_axes_neighbours(n, b, v, gamma, n_b, ratio)
        } else {
            ChainModel::with_thermal_z_bath(n, b, v, gamma, n_b, ratio)
        };
        let lio = build_liouvillian(&model).unwrap();
        let dim = model.dim();
        // rows of L indexed by (r, c) of the output matrix; the trace picks
        // out rows with r == c.
        let side = dim * dim;
        for col in 0..side {
            let mut s = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                s += lio.matrix[(r * dim + r, col)];
            }
            prop_assert!(s.norm() < 1e-10, "column {col}: |sum| = {}", s.norm());
        }
    }

    /// Connected correlations vanish identically on product states.
    #[test]
    fn product_states_have_no_connected_correlations(
        angles in proptest::collection::vec((0.0..std::f64::consts::PI, 0.0..6.28f64), 3),
    ) {
        let amps: Vec<[Complex64; 2]> = angles
            .iter()
            .map(|(theta, phi)| tilted_spinor(*theta, *phi))
            .collect();
        let rho = pure_product_state(&amps).unwrap();
        for (a, b) in [
            (Axis3::X, Axis3::X),
            (Axis3::Z, Axis3::Z),
            (Axis3::X, Axis3::Z),
            (Axis3::Y, Axis3::X),
        ] {
            let c = two_point_correlation(&rho, 1, 3, a, b, 3).unwrap();
            prop_assert!(c.abs() < 1e-10, "axes {a:?}{b:?}: C = {c}");
        }
    }
}

#[cfg(feature = "lapack")]
mod entanglement {
    use super::*;
    use spinchain::observables::concurrence;

    fn random_pure(entries: &[(f64, f64)]) -> CMat {
        let mut psi = [Complex64::new(0.0, 0.0); 4];
        let mut norm = 0.0;
        for (k, (re, im)) in entries.iter().take(4).enumerate() {
            psi[k] = Complex64::new(*re, *im);
            norm += psi[k].norm_sqr();
        }
        let norm = norm.sqrt().max(1e-12);
        let mut rho: CMat = Array2::zeros((4, 4));
        for r in 0..4 {
            for c in 0..4 {
                rho[(r, c)] = psi[r] / norm * (psi[c] / norm).conj();
            }
        }
        rho
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Concurrence of any two-qubit mixture lies in [0, 1].
        #[test]
        fn concurrence_is_bounded(
            e1 in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
            e2 in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
            p in 0.0..1.0f64,
        ) {
            prop_assume!(e1.iter().any(|(re, im)| re.abs() + im.abs() > 0.1));
            prop_assume!(e2.iter().any(|(re, im)| re.abs() + im.abs() > 0.1));
            let rho = random_pure(&e1) * Complex64::new(p, 0.0)
                + random_pure(&e2) * Complex64::new(1.0 - p, 0.0);
            let c = concurrence(&rho).unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&c), "C = {c}");
        }
    }
}

/// Without relaxation the magnetization magnitude is an integral of motion;
/// a long fixed-step trajectory must preserve it to solver accuracy.
#[test]
fn magnitude_survives_a_long_closed_trajectory() {
    let model = ChainModel::closed(500, [0.3, -0.2, -1.5], [0.0, 0.0, 1.0]);
    let config = MeanFieldConfig::ll_alpha(model, 0.2, MfMode::Collective);
    let m0 = spinchain::meanfield::tilted_vector(0.4, 0.9);
    let state = MagnetizationState::collective(m0);
    let series = integrate(&config, &state, 1e3, 1e-3, 1000).unwrap();
    let target = norm3(m0);
    let mut worst = 0.0f64;
    for s in &series.states {
        worst = worst.max((norm3(s.vectors[0]) - target).abs());
    }
    assert!(worst < 1e-6, "max |M| drift over t in [0, 1e3]: {worst}");
    assert_eq!(series.times.len(), 1001);
}
