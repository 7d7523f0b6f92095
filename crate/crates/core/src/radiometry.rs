//! Physical units: thermal photon density, effective radius and decoherence
//! rates for a dielectric sphere in blackbody light.
//!
//! Rates are evaluated in grouped dimensionless form. With the thermal
//! wavenumber `q = k_B T / ħc`,
//!
//! ```text
//! k_B⁹T⁹ / (c⁸ħ⁹) · ã⁶Δx² = c q (ãq)⁶ (Δx q)²
//! ```
//!
//! which keeps every intermediate within range even in `f32`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{lit, Scalar};
use crate::sky::{QuadratureOrder, SkyRegion};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Stefan–Boltzmann constant, W m⁻² K⁻⁴.
pub const STEFAN_BOLTZMANN: f64 = 5.670_374_419e-8;

pub const ZETA3: f64 = 1.202_056_903_159_594;
pub const ZETA4: f64 = 1.082_323_233_711_138;
pub const ZETA9: f64 = 1.002_008_392_826_082;

/// 8!
const FACT8: f64 = 40_320.0;

/// Thermal wavenumber `k_B T / ħc` in m⁻¹.
pub fn thermal_wavenumber<T: Scalar>(temperature: T) -> T {
    temperature * lit(K_B) / (lit::<T>(HBAR) * lit(C))
}

/// Clausius–Mossotti effective radius `ã = a·[(ε−1)/(ε+2)]^{1/3}`.
pub fn effective_radius<T: Scalar>(a: T, permittivity: T) -> Result<T> {
    effective_radius_with(a, permittivity, false)
}

/// [`effective_radius`] with an option to use the literal `(ε−1)/(ε−2)`
/// factor instead. That form is only defined for `ε > 2`.
pub fn effective_radius_with<T: Scalar>(a: T, permittivity: T, strict_literal: bool) -> Result<T> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(domain("a", a, "a > 0"));
    }
    if !(permittivity > T::one()) {
        return Err(domain("permittivity", permittivity, "epsilon > 1"));
    }
    if permittivity.is_infinite() {
        return Ok(a);
    }
    let two = lit::<T>(2.0);
    let ratio = if strict_literal {
        if !(permittivity > two) {
            return Err(domain("permittivity", permittivity, "epsilon > 2 for the literal (epsilon - 2) factor"));
        }
        (permittivity - T::one()) / (permittivity - two)
    } else {
        (permittivity - T::one()) / (permittivity + two)
    };
    Ok(a * ratio.cbrt())
}

/// Number density of blackbody photons arriving from a solid angle `Ω`:
/// `Ω ζ(3) (k_B T)³ / (2π³ ħ³c³)`, in m⁻³.
pub fn photon_number_density<T: Scalar>(temperature: T, solid_angle: T) -> Result<T> {
    if !(temperature > T::zero()) {
        return Err(domain("temperature", temperature, "T > 0"));
    }
    let four_pi = lit::<T>(4.0) * T::PI();
    if !(solid_angle >= T::zero() && solid_angle <= four_pi * lit(1.0 + 1e-12)) {
        return Err(domain("solid_angle", solid_angle, "[0, 4pi]"));
    }
    let q = thermal_wavenumber(temperature);
    let pi = T::PI();
    Ok(solid_angle * lit::<T>(ZETA3) * q * q * q / (lit::<T>(2.0) * pi * pi * pi))
}

/// Closed-form disk rate in units of `T_D⁻¹`:
/// `[40 − cos θ₀(51 − 33cos²χ) + cos³θ₀(11 − 33cos²χ)] / 80`.
pub fn disk_rate<T: Scalar>(theta0: T, chi: T) -> T {
    let c = theta0.cos();
    let cc = chi.cos();
    let c2 = cc * cc;
    let k = lit::<T>(33.0) * c2;
    (lit::<T>(40.0) - c * (lit::<T>(51.0) - k) + c * c * c * (lit::<T>(11.0) - k)) / lit(80.0)
}

/// `Γ = exp(−t/τ_D)`.
pub fn decoherence_factor<T: Scalar>(t: T, tau_d_inv: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(domain("t", t, "t >= 0"));
    }
    if !(tau_d_inv >= T::zero()) {
        return Err(domain("tau_D_inv", tau_d_inv, "rate >= 0"));
    }
    if tau_d_inv == T::zero() {
        return Ok(T::one());
    }
    Ok((-t * tau_d_inv).exp())
}

/// Physical parameters of the illuminated sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    /// Sphere radius `a` in metres.
    pub radius_m: T,
    /// Relative permittivity `ε`.
    pub permittivity: T,
    /// Branch separation `|Δx|` in metres.
    pub dx_m: T,
    pub temperature_k: T,
    pub region: SkyRegion<T>,
    /// Irradiance at normal incidence for point sources, W/m².
    pub irradiance_w_m2: Option<T>,
    /// Use the literal `(ε−2)` denominator in the effective radius.
    #[serde(default)]
    pub strict_literal_radius: bool,
}

/// Decoherence rate of a scenario, in SI and relative to the isotropic rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult<T> {
    /// `τ_D⁻¹` in s⁻¹.
    pub tau_d_inv: T,
    /// Isotropic reference `T_D⁻¹` in s⁻¹.
    pub td_inv: T,
    /// `τ_D⁻¹ / T_D⁻¹`.
    pub ratio: T,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(radius_m: T, permittivity: T, dx_m: T, temperature_k: T, region: SkyRegion<T>) -> Result<Self> {
        let s = Self {
            radius_m,
            permittivity,
            dx_m,
            temperature_k,
            region,
            irradiance_w_m2: None,
            strict_literal_radius: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_irradiance(mut self, irradiance: T) -> Result<Self> {
        if !(irradiance > T::zero()) || !irradiance.is_finite() {
            return Err(domain("irradiance", irradiance, "I > 0"));
        }
        self.irradiance_w_m2 = Some(irradiance);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(domain(name, v, "> 0"))
            }
        };
        positive("radius_m", self.radius_m)?;
        positive("dx_m", self.dx_m)?;
        positive("temperature_K", self.temperature_k)?;
        if !(self.permittivity > T::one()) {
            return Err(domain("permittivity", self.permittivity, "epsilon > 1"));
        }
        if let Some(i) = self.irradiance_w_m2 {
            positive("irradiance_W_m2", i)?;
        }
        Ok(())
    }

    pub fn effective_radius(&self) -> Result<T> {
        effective_radius_with(self.radius_m, self.permittivity, self.strict_literal_radius)
    }

    pub fn thermal_wavenumber(&self) -> T {
        thermal_wavenumber(self.temperature_k)
    }

    /// Messages for parameters outside the dipole regime, where the thermal
    /// wavelength should dominate both `a` and `Δx`. Each is also logged.
    pub fn dipole_warnings(&self) -> Vec<String> {
        let q = self.thermal_wavenumber();
        let mut out = Vec::new();
        for (name, v) in [("radius", self.radius_m), ("separation", self.dx_m)] {
            let x = v * q;
            if x >= T::one() {
                let msg = format!("{name} is not small against the thermal wavelength (k_th * {name} = {x})");
                log::warn!("{msg}");
                out.push(msg);
            }
        }
        out
    }

    /// `c q (ãq)⁶ (Δx q)²`, the common factor of every rate.
    fn rate_scale(&self) -> Result<T> {
        let q = self.thermal_wavenumber();
        let aq = self.effective_radius()? * q;
        let dq = self.dx_m * q;
        Ok(lit::<T>(C) * q * aq.powi(6) * dq * dq)
    }

    /// Isotropic rate `T_D⁻¹ = (16·8!ζ(9)/9π)·ã⁶Δx²k_B⁹T⁹/(c⁸ħ⁹)`.
    pub fn td_inv(&self) -> Result<T> {
        let k = lit::<T>(16.0 * FACT8 * ZETA9 / 9.0) / T::PI();
        Ok(k * self.rate_scale()?)
    }

    /// Decoherence rate for the scenario's region. Extended regions use the
    /// product rule at `order`; point regions need an irradiance and are
    /// forwarded to [`point_source_rate`](Self::point_source_rate).
    pub fn decoherence_rate(&self, order: QuadratureOrder) -> Result<RateResult<T>> {
        self.validate()?;
        let td_inv = self.td_inv()?;
        let ratio = match &self.region {
            SkyRegion::Point { direction } => {
                let tau = self.point_source_rate(direction.cos_theta.acos())?;
                return Ok(RateResult { tau_d_inv: tau, td_inv, ratio: tau / td_inv });
            }
            SkyRegion::Isotropic => T::one(),
            region => {
                let panels = region.panels(order)?;
                if panels.inside.is_empty() {
                    log::warn!("illuminated region is empty; decoherence rate is zero");
                }
                // ∫_B (3 + 11cos²θ) dΩ over its full-sphere value 80π/3.
                panels.inside.rate_moment() * lit(3.0) / (lit::<T>(80.0) * T::PI())
            }
        };
        Ok(RateResult { tau_d_inv: ratio * td_inv, td_inv, ratio })
    }

    /// Closed-form disk rate in s⁻¹.
    pub fn disk_rate_si(&self, theta0: T, chi: T) -> Result<T> {
        Ok(disk_rate(theta0, chi) * self.td_inv()?)
    }

    /// Point source at angle `theta` from `Δx̂` with irradiance `I`:
    /// `(4π/15)(8!ζ(9)/3!ζ(4))(3+11cos²θ)·I·ã⁶Δx²k_B⁵T⁵/(c⁶ħ⁶)`.
    pub fn point_source_rate(&self, theta: T) -> Result<T> {
        let irradiance = self.irradiance_w_m2.ok_or_else(|| Error::Config {
            key: "irradiance_W_m2".into(),
            message: "a point source needs an irradiance".into(),
        })?;
        let q = self.thermal_wavenumber();
        let aq = self.effective_radius()? * q;
        let dq = self.dx_m * q;
        let c = theta.cos();
        let angular = lit::<T>(3.0) + lit::<T>(11.0) * c * c;
        let k = lit::<T>(4.0 * FACT8 * ZETA9 / (15.0 * 6.0 * ZETA4)) * T::PI();
        Ok(k * angular * irradiance / (lit::<T>(HBAR) * lit(C)) * aq.powi(6) * dq * dq / (q * q * q))
    }

    /// Irradiance at normal incidence delivered by the region's solid angle
    /// for a small source, `Ω σ T⁴ / π`.
    pub fn matched_irradiance(&self, solid_angle: T) -> T {
        let t2 = self.temperature_k * self.temperature_k;
        solid_angle * lit::<T>(STEFAN_BOLTZMANN) * t2 * t2 / T::PI()
    }

    /// Photon number density of the scenario's region.
    pub fn photon_number_density(&self) -> Result<T> {
        photon_number_density(self.temperature_k, self.region.solid_angle())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn scenario(region: SkyRegion<f64>) -> Scenario<f64> {
        Scenario::new(1e-6, 4.0, 1e-6, 300.0, region).unwrap()
    }

    #[test]
    fn zeta_literals() {
        assert_relative_eq!(ZETA4, PI.powi(4) / 90.0, max_relative = 1e-15);
        let z3: f64 = (1..200_000).map(|n| (n as f64).powi(-3)).sum();
        assert_relative_eq!(z3, ZETA3, max_relative = 1e-10);
        let z9: f64 = (1..100).map(|n| (n as f64).powi(-9)).sum();
        assert_relative_eq!(z9, ZETA9, max_relative = 1e-15);
    }

    #[test]
    fn effective_radius_examples() {
        assert_relative_eq!(effective_radius(1e-6, 4.0).unwrap(), 0.5f64.cbrt() * 1e-6, max_relative = 1e-15);
        assert_relative_eq!(effective_radius(2.0, 1e12).unwrap(), 2.0, max_relative = 1e-11);
        assert_eq!(effective_radius(2.0, f64::INFINITY).unwrap(), 2.0);
        assert!(effective_radius(1.0, 1.0 + 1e-12).unwrap() < 1e-4);
        assert!(effective_radius(1.0, 1.0).is_err());
        assert!(effective_radius(1.0, 0.5).is_err());
        assert!(effective_radius_with(1.0, 1.5, true).is_err());
        assert_relative_eq!(effective_radius_with(1.0, 4.0, true).unwrap(), 1.5f64.cbrt());
    }

    #[test]
    fn cmb_photon_density() {
        let n = photon_number_density(2.725, 4.0 * PI).unwrap();
        assert!((n / 4.11e8 - 1.0).abs() < 0.01, "{n}");
        assert_eq!(photon_number_density(2.725, 0.0).unwrap(), 0.0);
        let half = photon_number_density(2.725, 2.0 * PI).unwrap();
        assert_relative_eq!(half * 2.0, n, max_relative = 1e-15);
        assert!(photon_number_density(-1.0, 1.0).is_err());
    }

    #[test]
    fn disk_rate_examples() {
        for chi in [0.0, 0.4, PI / 2.0, 2.0] {
            assert_relative_eq!(disk_rate(PI, chi), 1.0, epsilon = 1e-15);
            assert!(disk_rate(PI / 2.0, chi) - 0.5 < 1e-15);
            assert!(disk_rate(0.0, chi).abs() < 1e-15);
        }
        assert_relative_eq!(disk_rate(PI / 3.0, 0.0), 0.353_125, epsilon = 1e-15);
    }

    #[test]
    fn isotropic_rate_is_reference() {
        let s = scenario(SkyRegion::Isotropic);
        let r = s.decoherence_rate(QuadratureOrder::default()).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.tau_d_inv, r.td_inv);
        // Quadrature of a full-sphere disk agrees with the reference.
        let full = scenario(SkyRegion::disk(PI, 0.0).unwrap());
        let rf = full.decoherence_rate(QuadratureOrder::default()).unwrap();
        assert_relative_eq!(rf.ratio, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn td_inv_matches_ungrouped_formula() {
        let s = scenario(SkyRegion::Isotropic);
        let a = s.effective_radius().unwrap();
        let kt = K_B * 300.0;
        let direct = 16.0 * FACT8 * ZETA9 / (9.0 * PI) * a.powi(6) * 1e-12 * (kt / HBAR).powi(9)
            / C.powi(8);
        assert_relative_eq!(s.td_inv().unwrap(), direct, max_relative = 1e-12);
    }

    #[test]
    fn disk_quadrature_matches_closed_form() {
        for &(t, c) in &[(PI / 3.0, 0.0), (PI / 2.0, 0.0), (0.3, 1.2), (2.5, 0.7)] {
            let s = scenario(SkyRegion::disk(t, c).unwrap());
            let r = s.decoherence_rate(QuadratureOrder::default()).unwrap();
            assert_relative_eq!(r.ratio, disk_rate(t, c), max_relative = 1e-10);
        }
    }

    #[test]
    fn empty_disk_rate_is_zero() {
        let s = scenario(SkyRegion::disk(0.0, 0.0).unwrap());
        assert_eq!(s.decoherence_rate(QuadratureOrder::default()).unwrap().tau_d_inv, 0.0);
    }

    #[test]
    fn point_source_scalings() {
        let s = scenario(SkyRegion::point_at(0.0).unwrap()).with_irradiance(10.0).unwrap();
        let r0 = s.point_source_rate(0.0).unwrap();
        let r90 = s.point_source_rate(PI / 2.0).unwrap();
        assert_relative_eq!(r90 / r0, 3.0 / 14.0, max_relative = 1e-12);
        let s2 = s.clone().with_irradiance(20.0).unwrap();
        assert_relative_eq!(s2.point_source_rate(0.3).unwrap(), 2.0 * s.point_source_rate(0.3).unwrap(), max_relative = 1e-14);
        let rate = s.decoherence_rate(QuadratureOrder::default()).unwrap();
        assert_relative_eq!(rate.tau_d_inv, r0);
        assert!(scenario(SkyRegion::point_at(0.0).unwrap()).point_source_rate(0.0).is_err());
    }

    #[test]
    fn point_source_matches_small_disk() {
        let theta0 = 1f64.to_radians();
        for chi in [0.0, 0.8, PI / 2.0] {
            let disk = scenario(SkyRegion::disk(theta0, chi).unwrap());
            let general = disk.decoherence_rate(QuadratureOrder::default()).unwrap().tau_d_inv;
            let i = disk.matched_irradiance(disk.region.solid_angle());
            let point = disk.clone().with_irradiance(i).unwrap().point_source_rate(chi).unwrap();
            assert!((general / point - 1.0).abs() < 1e-3, "chi {chi}: {general} vs {point}");
        }
    }

    #[test]
    fn decoherence_factor_examples() {
        assert_eq!(decoherence_factor(0.0, 3.0).unwrap(), 1.0);
        assert_relative_eq!(decoherence_factor(2.0, 0.5).unwrap(), (-1.0f64).exp());
        assert_eq!(decoherence_factor(1e6, 1.0).unwrap(), 0.0);
        assert!(decoherence_factor(-1.0, 1.0).is_err());
    }

    #[test]
    fn invalid_scenarios_rejected() {
        assert!(Scenario::new(0.0, 4.0, 1e-6, 300.0, SkyRegion::Isotropic).is_err());
        assert!(Scenario::new(1e-6, 1.0, 1e-6, 300.0, SkyRegion::Isotropic).is_err());
        assert!(Scenario::new(1e-6, 4.0, -1.0, 300.0, SkyRegion::Isotropic).is_err());
        assert!(Scenario::new(1e-6, 4.0, 1e-6, 0.0, SkyRegion::Isotropic).is_err());
    }

    #[test]
    fn dipole_warnings_flag_large_objects() {
        assert!(scenario(SkyRegion::Isotropic).dipole_warnings().is_empty());
        let big = Scenario::new(1e-2, 4.0, 1e-6, 300.0, SkyRegion::Isotropic).unwrap();
        assert_eq!(big.dipole_warnings().len(), 1);
    }

    #[test]
    fn single_precision_rate() {
        let s = Scenario::<f32>::new(1e-6, 4.0, 1e-6, 300.0, SkyRegion::Isotropic).unwrap();
        let d = scenario(SkyRegion::Isotropic);
        let rel = (s.td_inv().unwrap() as f64 / d.td_inv().unwrap() - 1.0).abs();
        assert!(rel < 1e-4);
    }

    proptest! {
        #[test]
        fn disk_rate_complement(t in 0.0f64..=PI, c in 0.0f64..=PI) {
            prop_assert!((disk_rate(t, c) + disk_rate(PI - t, PI - c) - 1.0).abs() < 1e-14);
        }

        #[test]
        fn disk_rate_monotone(a in 0.0f64..=PI, b in 0.0f64..=PI, c in 0.0f64..=PI) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(disk_rate(lo, c) <= disk_rate(hi, c) + 1e-15);
        }

        #[test]
        fn mean_angular_factor_in_range(t in 0.01f64..=PI, c in 0.0f64..=PI) {
            let omega = 2.0 * PI * (1.0 - t.cos());
            let mean = disk_rate(t, c) * 80.0 * PI / 3.0 / omega;
            prop_assert!(mean >= 3.0 - 1e-9 && mean <= 14.0 + 1e-9);
        }
    }
}
