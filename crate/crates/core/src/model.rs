//! Effective Kittel-mode model.
//!
//! The magnon mode is described by `H = ω₀ m†m + Ω(m² + h.c.) + χ m†m σ_z`.
//! Conditioned on the qubit state σ the Hamiltonian is diagonalised by a
//! Bogoliubov transformation, giving the eigenfrequency `ω_σ` and the
//! ground-state squeezing strength `r_σ`. This module maps physical inputs
//! to those quantities and gates everything on mode stability.
//!
//! Frequencies are stored as angular frequencies in rad/ns. Constructors that
//! take ordinary frequencies (GHz) multiply by 2π.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Magnitude of the gyromagnetic ratio in GHz/T.
pub const DEFAULT_GYROMAGNETIC_GHZ_PER_T: f64 = 28.0;

/// Default warning threshold for `sinh²r_σ / NS`.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.01;

/// Ordinary frequency (GHz) to angular frequency (rad/ns).
#[inline]
pub fn ghz_to_radns(f_ghz: f64) -> f64 {
    TAU * f_ghz
}

/// Angular frequency (rad/ns) to ordinary frequency (GHz).
#[inline]
pub fn radns_to_ghz(omega: f64) -> f64 {
    omega / TAU
}

/// Qubit basis state conditioning the magnon Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{field} must be {requirement}, got {value}")]
    Invalid {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("field grid must be monotone")]
    NonMonotoneGrid,
}

/// The qubit-conditioned mode is unstable: `ω_eff,σ ≤ 2Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("magnon mode unstable for qubit {branch:?}: omega_eff - 2*Omega = {margin} rad/ns")]
pub struct StabilityError {
    pub branch: Qubit,
    /// `ω_eff,σ − 2Ω` in rad/ns (non-positive).
    pub margin: f64,
}

/// Linear map from applied field to the bare Kittel frequency,
/// `ω₀ = 2π (gap + |γ| μ₀h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    /// Anisotropy gap `(2SK_z − SK_y)/2π` in GHz.
    pub anisotropy_gap_ghz: f64,
    /// `|γ|` in GHz/T.
    pub gyromagnetic_ghz_per_t: f64,
}

impl FieldMap {
    pub fn new(anisotropy_gap_ghz: f64) -> Self {
        FieldMap {
            anisotropy_gap_ghz,
            gyromagnetic_ghz_per_t: DEFAULT_GYROMAGNETIC_GHZ_PER_T,
        }
    }

    pub fn with_gyromagnetic(mut self, gyromagnetic_ghz_per_t: f64) -> Self {
        self.gyromagnetic_ghz_per_t = gyromagnetic_ghz_per_t;
        self
    }

    /// Kittel frequency in rad/ns at the given field (tesla).
    pub fn omega0(&self, field_t: f64) -> f64 {
        omega0_from_field(self.anisotropy_gap_ghz, field_t, self.gyromagnetic_ghz_per_t)
    }

    /// Field (tesla) at which the bare Kittel frequency equals `omega0` (rad/ns).
    pub fn field_for_omega0(&self, omega0: f64) -> f64 {
        (radns_to_ghz(omega0) - self.anisotropy_gap_ghz) / self.gyromagnetic_ghz_per_t
    }
}

/// Kittel frequency `2π (gap + |γ| h)` in rad/ns.
///
/// Negative fields are allowed; stability is checked separately.
pub fn omega0_from_field(anisotropy_gap_ghz: f64, field_t: f64, gyromagnetic_ghz_per_t: f64) -> f64 {
    ghz_to_radns(anisotropy_gap_ghz + gyromagnetic_ghz_per_t * field_t)
}

/// Physical inputs of the effective model. All frequencies in rad/ns, times in ns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    omega0: f64,
    pair_coupling: f64,
    dispersive: f64,
    t2star: Option<f64>,
    ns_product: Option<f64>,
}

fn require(ok: bool, field: &'static str, requirement: &'static str, value: f64) -> Result<(), ParamError> {
    if ok {
        Ok(())
    } else {
        Err(ParamError::Invalid {
            field,
            requirement,
            value,
        })
    }
}

impl SystemParams {
    /// `omega0`, `pair_coupling` (Ω) and `dispersive` (χ) in rad/ns.
    pub fn new(omega0: f64, pair_coupling: f64, dispersive: f64) -> Result<Self, ParamError> {
        require(omega0.is_finite(), "omega0", "finite", omega0)?;
        require(
            pair_coupling.is_finite() && pair_coupling >= 0.0,
            "Omega",
            "finite and >= 0",
            pair_coupling,
        )?;
        require(
            dispersive.is_finite() && dispersive >= 0.0,
            "chi",
            "finite and >= 0",
            dispersive,
        )?;
        Ok(SystemParams {
            omega0,
            pair_coupling,
            dispersive,
            t2star: None,
            ns_product: None,
        })
    }

    /// Same as [`SystemParams::new`] with ordinary frequencies in GHz.
    pub fn from_ghz(omega0_ghz: f64, pair_coupling_ghz: f64, dispersive_ghz: f64) -> Result<Self, ParamError> {
        Self::new(
            ghz_to_radns(omega0_ghz),
            ghz_to_radns(pair_coupling_ghz),
            ghz_to_radns(dispersive_ghz),
        )
    }

    /// Kittel frequency from the field map; couplings in GHz.
    pub fn from_field(
        map: &FieldMap,
        field_t: f64,
        pair_coupling_ghz: f64,
        dispersive_ghz: f64,
    ) -> Result<Self, ParamError> {
        require(
            map.gyromagnetic_ghz_per_t > 0.0,
            "gyromagnetic",
            "> 0",
            map.gyromagnetic_ghz_per_t,
        )?;
        Self::new(
            map.omega0(field_t),
            ghz_to_radns(pair_coupling_ghz),
            ghz_to_radns(dispersive_ghz),
        )
    }

    pub fn with_t2star(mut self, t2star_ns: f64) -> Result<Self, ParamError> {
        require(t2star_ns.is_finite() && t2star_ns > 0.0, "T2star", "> 0", t2star_ns)?;
        self.t2star = Some(t2star_ns);
        Ok(self)
    }

    pub fn with_ns_product(mut self, ns_product: f64) -> Result<Self, ParamError> {
        require(ns_product.is_finite() && ns_product > 0.0, "NS_product", "> 0", ns_product)?;
        self.ns_product = Some(ns_product);
        Ok(self)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Ω, the strength of the `m² + h.c.` term.
    pub fn pair_coupling(&self) -> f64 {
        self.pair_coupling
    }

    /// χ, the dispersive qubit–magnon coupling.
    pub fn dispersive(&self) -> f64 {
        self.dispersive
    }

    pub fn t2star(&self) -> Option<f64> {
        self.t2star
    }

    pub fn ns_product(&self) -> Option<f64> {
        self.ns_product
    }

    /// `ω₀ ± χ` for the given qubit state.
    pub fn omega_eff(&self, branch: Qubit) -> f64 {
        match branch {
            Qubit::Up => self.omega0 + self.dispersive,
            Qubit::Down => self.omega0 - self.dispersive,
        }
    }
}

/// Quantities derived from [`SystemParams`] by diagonalising each qubit branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub omega_eff_up: f64,
    pub omega_eff_down: f64,
    pub omega_up: f64,
    pub omega_down: f64,
    pub r_up: f64,
    pub r_down: f64,
    /// Relative squeezing `r_↓ − r_↑`.
    pub r: f64,
    /// Real magnons produced by the quench, `sinh²r`.
    pub n_bar: f64,
    pub theta_up: f64,
    pub theta_down: f64,
}

impl DerivedQuantities {
    pub fn omega(&self, branch: Qubit) -> f64 {
        match branch {
            Qubit::Up => self.omega_up,
            Qubit::Down => self.omega_down,
        }
    }

    pub fn squeezing(&self, branch: Qubit) -> f64 {
        match branch {
            Qubit::Up => self.r_up,
            Qubit::Down => self.r_down,
        }
    }
}

/// Checks `ω_eff,σ > 2Ω` for both branches and returns the binding margin
/// `ω₀ − χ − 2Ω` (rad/ns).
///
/// The `↓` branch always binds since χ ≥ 0.
pub fn check_stability(params: &SystemParams) -> Result<f64, StabilityError> {
    let two_omega = 2.0 * params.pair_coupling;
    let margin_down = params.omega_eff(Qubit::Down) - two_omega;
    let margin_up = params.omega_eff(Qubit::Up) - two_omega;
    if !(margin_down > 0.0) {
        return Err(StabilityError {
            branch: Qubit::Down,
            margin: margin_down,
        });
    }
    if !(margin_up > 0.0) {
        return Err(StabilityError {
            branch: Qubit::Up,
            margin: margin_up,
        });
    }
    Ok(margin_down)
}

/// `r_σ = ½ artanh(2Ω/ω_eff,σ)`.
fn squeezing_strength(omega_eff: f64, pair_coupling: f64) -> f64 {
    0.5 * (2.0 * pair_coupling / omega_eff).atanh()
}

/// `ω_σ = √(ω_eff,σ² − 4Ω²)`, factored to avoid cancellation near the boundary.
fn eigenfrequency(omega_eff: f64, pair_coupling: f64) -> f64 {
    let two_omega = 2.0 * pair_coupling;
    ((omega_eff - two_omega) * (omega_eff + two_omega)).sqrt()
}

pub fn derive_quantities(params: &SystemParams) -> Result<DerivedQuantities, StabilityError> {
    check_stability(params)?;
    let omega_eff_up = params.omega_eff(Qubit::Up);
    let omega_eff_down = params.omega_eff(Qubit::Down);
    let r_up = squeezing_strength(omega_eff_up, params.pair_coupling);
    let r_down = squeezing_strength(omega_eff_down, params.pair_coupling);
    let r = r_down - r_up;
    Ok(DerivedQuantities {
        omega_eff_up,
        omega_eff_down,
        omega_up: eigenfrequency(omega_eff_up, params.pair_coupling),
        omega_down: eigenfrequency(omega_eff_down, params.pair_coupling),
        r_up,
        r_down,
        r,
        n_bar: r.sinh().powi(2),
        theta_up: std::f64::consts::PI,
        theta_down: 0.0,
    })
}

/// Soft check that magnon nonlinearities stay negligible, `sinh²r_σ ≪ NS`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `max_σ sinh²r_σ / NS`.
    pub ratio: f64,
    pub threshold: f64,
    pub warning: bool,
}

pub fn nonlinearity_validity(
    q: &DerivedQuantities,
    ns_product: f64,
    threshold: f64,
) -> Result<ValidityReport, ParamError> {
    require(ns_product.is_finite() && ns_product > 0.0, "NS_product", "> 0", ns_product)?;
    let occupation = q.r_up.sinh().powi(2).max(q.r_down.sinh().powi(2));
    let ratio = occupation / ns_product;
    Ok(ValidityReport {
        ratio,
        threshold,
        warning: ratio > threshold,
    })
}

/// Material constants held fixed while the field is swept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub field_map: FieldMap,
    pub pair_coupling_ghz: f64,
    pub dispersive_ghz: f64,
}

impl SweepTemplate {
    pub fn params_at(&self, field_t: f64) -> Result<SystemParams, ParamError> {
        SystemParams::from_field(
            &self.field_map,
            field_t,
            self.pair_coupling_ghz,
            self.dispersive_ghz,
        )
    }

    /// Field (tesla) at which `ω_eff,↓ = 2Ω`; the mode is stable above it.
    pub fn instability_field(&self) -> f64 {
        let omega0 = ghz_to_radns(2.0 * self.pair_coupling_ghz + self.dispersive_ghz);
        self.field_map.field_for_omega0(omega0)
    }
}

/// One row of a field sweep. `derived` is `None` where the mode is unstable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSweepRow {
    pub field_t: f64,
    pub derived: Option<DerivedQuantities>,
}

impl FieldSweepRow {
    pub fn stable(&self) -> bool {
        self.derived.is_some()
    }
}

pub fn sweep_field(template: &SweepTemplate, fields: &[f64]) -> Result<Vec<FieldSweepRow>, ParamError> {
    let increasing = fields.windows(2).all(|w| w[0] < w[1]);
    let decreasing = fields.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) {
        return Err(ParamError::NonMonotoneGrid);
    }
    fields
        .iter()
        .map(|&field_t| {
            let params = template.params_at(field_t)?;
            Ok(FieldSweepRow {
                field_t,
                derived: derive_quantities(&params).ok(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn field_map_examples() {
        assert!(close(omega0_from_field(7.0, 0.18, 28.0), TAU * 12.04, 1e-12));
        assert_eq!(omega0_from_field(7.0, 0.0, 28.0), TAU * 7.0);
        assert!(close(omega0_from_field(2.0, 0.18, 28.0), TAU * 7.04, 1e-12));
        // Zeeman contribution of 180 mT
        assert!(close(radns_to_ghz(omega0_from_field(0.0, 0.18, 28.0)), 5.04, 1e-12));
    }

    #[test]
    fn derived_reference_point() {
        // reference values from a 30-digit evaluation
        let q = derive_quantities(&SystemParams::new(3.0, 0.5, 0.5).unwrap()).unwrap();
        assert_eq!(q.omega_eff_up, 3.5);
        assert_eq!(q.omega_eff_down, 2.5);
        assert!(close(q.omega_up, 3.354_101_966_249_684_5, 1e-14));
        assert!(close(q.omega_down, 2.291_287_847_477_920, 1e-14));
        assert!(close(q.r_up, 0.146_946_666_225_529_75, 1e-14));
        assert!(close(q.r_down, 0.211_824_465_096_800_9, 1e-14));
        assert!(close(q.r, 0.064_877_798_871_271_15, 1e-14));
        assert!(close(q.n_bar, 0.004_215_037_690_075_476, 1e-15));
        assert_eq!(q.theta_up, std::f64::consts::PI);
        assert_eq!(q.theta_down, 0.0);
    }

    #[test]
    fn no_pair_coupling_means_no_squeezing() {
        let q = derive_quantities(&SystemParams::new(3.0, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!((q.r_up, q.r_down, q.r, q.n_bar), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(q.omega_up, q.omega_eff_up);
        assert_eq!(q.omega_down, q.omega_eff_down);
    }

    #[test]
    fn no_dispersive_coupling_cancels_in_relative_squeezing() {
        let q = derive_quantities(&SystemParams::new(3.0, 0.5, 0.0).unwrap()).unwrap();
        assert_eq!(q.r_up, q.r_down);
        assert_eq!(q.r, 0.0);
        assert_eq!(q.n_bar, 0.0);
    }

    #[test]
    fn stability_examples() {
        assert!(check_stability(&SystemParams::new(3.0, 0.5, 0.5).unwrap()).is_ok());

        let err = check_stability(&SystemParams::new(1.4, 0.5, 0.5).unwrap()).unwrap_err();
        assert_eq!(err.branch, Qubit::Down);
        assert!(close(err.margin, -0.1, 1e-12));
        assert!(derive_quantities(&SystemParams::new(1.4, 0.5, 0.5).unwrap()).is_err());

        let eps = 1e-9;
        let margin = check_stability(&SystemParams::new(1.5 + eps, 0.5, 0.5).unwrap()).unwrap();
        assert!(close(margin, eps, 1e-15));

        // exactly on the boundary is unstable
        assert!(check_stability(&SystemParams::new(1.5, 0.5, 0.5).unwrap()).is_err());
        // negative effective frequency with no pair coupling
        let err = check_stability(&SystemParams::new(0.2, 0.0, 0.5).unwrap()).unwrap_err();
        assert_eq!(err.branch, Qubit::Down);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(SystemParams::new(3.0, -0.1, 0.5).is_err());
        assert!(SystemParams::new(3.0, 0.1, -0.5).is_err());
        assert!(SystemParams::new(f64::NAN, 0.1, 0.5).is_err());
        let p = SystemParams::new(3.0, 0.1, 0.5).unwrap();
        assert!(p.with_t2star(0.0).is_err());
        assert!(p.with_ns_product(-1.0).is_err());
        assert_eq!(p.with_t2star(100.0).unwrap().t2star(), Some(100.0));
    }

    #[test]
    fn validity_examples() {
        let q = derive_quantities(&SystemParams::new(3.0, 0.5, 0.5).unwrap()).unwrap();
        let rep = nonlinearity_validity(&q, 1e6, DEFAULT_VALIDITY_THRESHOLD).unwrap();
        assert!(close(rep.ratio, 4.554_472_558_998e-8, 1e-18));
        assert!(!rep.warning);

        let mut strong = q;
        strong.r_up = 0.0;
        strong.r_down = 2.0;
        let rep = nonlinearity_validity(&strong, 100.0, DEFAULT_VALIDITY_THRESHOLD).unwrap();
        assert!(close(rep.ratio, 0.131_541_164_180_082_4, 1e-14));
        assert!(rep.warning);

        let vac = derive_quantities(&SystemParams::new(3.0, 0.0, 0.5).unwrap()).unwrap();
        let rep = nonlinearity_validity(&vac, 10.0, DEFAULT_VALIDITY_THRESHOLD).unwrap();
        assert_eq!(rep.ratio, 0.0);
        assert!(!rep.warning);

        assert!(nonlinearity_validity(&q, 0.0, 0.01).is_err());
    }

    #[test]
    fn bogoliubov_identities_hold() {
        for &(w0, om, chi) in &[(3.0, 0.5, 0.5), (10.0, 4.9, 0.05), (1.01, 0.5, 0.0), (50.0, 0.1, 3.0)] {
            let q = derive_quantities(&SystemParams::new(w0, om, chi).unwrap()).unwrap();
            for b in [Qubit::Up, Qubit::Down] {
                let eff = if b == Qubit::Up { q.omega_eff_up } else { q.omega_eff_down };
                let (r, w) = (q.squeezing(b), q.omega(b));
                assert!(((2.0 * r).cosh() * w - eff).abs() <= 1e-12 * eff);
                if om > 0.0 {
                    assert!(((2.0 * r).sinh() * w - 2.0 * om).abs() <= 1e-12 * 2.0 * om);
                }
                assert!((w * w + 4.0 * om * om - eff * eff).abs() <= 1e-12 * eff * eff);
            }
        }
    }

    #[test]
    fn sweep_flags_unstable_points_and_rejects_unsorted_grids() {
        let template = SweepTemplate {
            field_map: FieldMap::new(7.0),
            pair_coupling_ghz: 0.5,
            dispersive_ghz: 0.5,
        };
        let boundary = template.instability_field();
        assert!(close(boundary, -5.5 / 28.0, 1e-12));
        let rows = sweep_field(&template, &[boundary - 0.01, boundary + 0.01, 0.2]).unwrap();
        assert!(!rows[0].stable());
        assert!(rows[1].stable() && rows[2].stable());
        assert!(rows[1].derived.unwrap().r > rows[2].derived.unwrap().r);

        assert_eq!(sweep_field(&template, &[0.1, 0.0, 0.2]), Err(ParamError::NonMonotoneGrid));
        assert!(sweep_field(&template, &[]).unwrap().is_empty());
    }
}
