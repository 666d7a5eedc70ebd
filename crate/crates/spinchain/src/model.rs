//! Chain model: fields, couplings, and bath rate tables, plus the
//! Hamiltonian builder.
//!
//! The model describes N spin-1/2 sites with
//! H = Σ_j B·S^(j) + Σ_α Σ_{j<N} V_α S_α^(j) S_α^(j+1),
//! on-site dissipation rates γ_{α,±} and nearest-neighbour collective rates
//! g_{α,±}, each attached to the raising/lowering pair of jump operators
//! along axis α.

use crate::spin::{embed_site, spin_op, Axis3, CMat, Sign};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

/// Open spin-chain parameters. Rate tables are indexed `[axis][sign]`
/// with axis ∈ {x, y, z} and sign ∈ {+, −} (see [`Axis3::index`] and
/// [`Sign::index`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainModel {
    /// Number of sites N ≥ 1.
    pub n_sites: usize,
    /// Static field (B_x, B_y, B_z) coupling as Σ_j B·S^(j).
    pub b_field: [f64; 3],
    /// Exchange couplings (V_x, V_y, V_z) on nearest-neighbour bonds.
    pub v: [f64; 3],
    /// On-site rates γ_{α,±} ≥ 0.
    pub on_site_rates: [[f64; 2]; 3],
    /// Nearest-neighbour rates g_{α,±} ≥ 0.
    pub neighbour_rates: [[f64; 2]; 3],
    /// Mean thermal occupation of the bath.
    pub n_b: f64,
}

impl ChainModel {
    /// A closed chain: every dissipation rate zero, n_b = 0.
    pub fn closed(n_sites: usize, b_field: [f64; 3], v: [f64; 3]) -> Self {
        ChainModel {
            n_sites,
            b_field,
            v,
            on_site_rates: [[0.0; 2]; 3],
            neighbour_rates: [[0.0; 2]; 3],
            n_b: 0.0,
        }
    }

    /// Thermal pair (scale·n_b, scale·(n_b + 1)) in (+, −) order: absorption
    /// is proportional to the occupation, emission to occupation + 1.
    pub fn thermal_pair(scale: f64, n_b: f64) -> [f64; 2] {
        [scale * n_b, scale * (n_b + 1.0)]
    }

    /// Standard open chain: thermal z-axis on-site rates built from the
    /// total decay rate `gamma_total` (γ_{z,+} + γ_{z,−} = Γ), with
    /// nearest-neighbour z rates a fixed fraction `g_ratio` of the on-site
    /// ones. Other axes are closed.
    pub fn with_thermal_z_bath(
        n_sites: usize,
        b_field: [f64; 3],
        v: [f64; 3],
        gamma_total: f64,
        n_b: f64,
        g_ratio: f64,
    ) -> Self {
        let gamma0 = gamma_total / (2.0 * n_b + 1.0);
        let z = Self::thermal_pair(gamma0, n_b);
        let mut on_site = [[0.0; 2]; 3];
        on_site[Axis3::Z.index()] = z;
        let mut neighbour = [[0.0; 2]; 3];
        neighbour[Axis3::Z.index()] = [z[0] * g_ratio, z[1] * g_ratio];
        ChainModel {
            n_sites,
            b_field,
            v,
            on_site_rates: on_site,
            neighbour_rates: neighbour,
            n_b,
        }
    }

    /// Same on-site bath as [`ChainModel::with_thermal_z_bath`], but with
    /// thermal nearest-neighbour pairs on **all three** axes, each built
    /// from the scale Γ·`ratio` so that g_{α,−} − g_{α,+} = Γ·`ratio`
    /// exactly on every axis.
    pub fn with_thermal_all_axes_neighbours(
        n_sites: usize,
        b_field: [f64; 3],
        v: [f64; 3],
        gamma_total: f64,
        n_b: f64,
        ratio: f64,
    ) -> Self {
        let mut model = Self::with_thermal_z_bath(n_sites, b_field, v, gamma_total, n_b, 0.0);
        let pair = Self::thermal_pair(gamma_total * ratio, n_b);
        model.neighbour_rates = [pair, pair, pair];
        model
    }

    /// Validates counts and sign constraints.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::InvalidModel("n_sites must be at least 1".into()));
        }
        if self.n_b < 0.0 || !self.n_b.is_finite() {
            return Err(Error::InvalidModel(format!(
                "thermal occupation n_b must be finite and non-negative, got {}",
                self.n_b
            )));
        }
        for v in self.b_field.iter().chain(self.v.iter()) {
            if !v.is_finite() {
                return Err(Error::InvalidModel(
                    "fields and couplings must be finite".into(),
                ));
            }
        }
        for (name, table) in [
            ("on-site", &self.on_site_rates),
            ("neighbour", &self.neighbour_rates),
        ] {
            for ax in Axis3::ALL {
                for sign in Sign::ALL {
                    let r = table[ax.index()][sign.index()];
                    if r < 0.0 || !r.is_finite() {
                        return Err(Error::InvalidModel(format!(
                            "{name} rate for axis {}, sign {} must be finite and \
                             non-negative, got {r}",
                            ax.label(),
                            sign.label()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// Total on-site decay rate Γ = γ_{z,+} + γ_{z,−}.
    pub fn gamma_total(&self) -> f64 {
        let z = self.on_site_rates[Axis3::Z.index()];
        z[Sign::Plus.index()] + z[Sign::Minus.index()]
    }

    /// Net neighbour rate g_α = g_{α,−} − g_{α,+} for one axis.
    pub fn g_diff(&self, axis: Axis3) -> f64 {
        let pair = self.neighbour_rates[axis.index()];
        pair[Sign::Minus.index()] - pair[Sign::Plus.index()]
    }

    /// (g_x, g_y, g_z) from [`ChainModel::g_diff`].
    pub fn g_diff_vector(&self) -> [f64; 3] {
        [
            self.g_diff(Axis3::X),
            self.g_diff(Axis3::Y),
            self.g_diff(Axis3::Z),
        ]
    }

    /// True when every dissipation rate vanishes.
    pub fn is_closed(&self) -> bool {
        self.on_site_rates
            .iter()
            .chain(self.neighbour_rates.iter())
            .all(|pair| pair[0] == 0.0 && pair[1] == 0.0)
    }
}

/// Builds the chain Hamiltonian
/// H = Σ_j B·S^(j) + Σ_α Σ_{j=1}^{N−1} V_α S_α^(j) S_α^(j+1)
/// as a dense 2^N × 2^N matrix.
pub fn build_hamiltonian(model: &ChainModel) -> Result<CMat> {
    model.validate()?;
    let n = model.n_sites;
    let dim = model.dim();
    let mut h: CMat = Array2::zeros((dim, dim));

    for ax in Axis3::ALL {
        let b = model.b_field[ax.index()];
        let s = spin_op(ax);
        if b != 0.0 {
            for j in 1..=n {
                let emb = embed_site(&s, j, n)?;
                h = h + emb.mapv(|v| v * Complex64::new(b, 0.0));
            }
        }
        let vq = model.v[ax.index()];
        if vq != 0.0 {
            for j in 1..n {
                let left = embed_site(&s, j, n)?;
                let right = embed_site(&s, j + 1, n)?;
                let bond = left.dot(&right);
                h = h + bond.mapv(|v| v * Complex64::new(vq, 0.0));
            }
        }
    }
    Ok(h)
}
