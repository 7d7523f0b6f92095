//! Receptivity of the photon environment and the redundancy rate.
//!
//! ```text
//! α = ∫_B dn ∫_B̄ dm g2(n, m)  /  ∫_B dn ∫_S dm g2(n, m)
//! ```
//!
//! Both pieces of the denominator are computed directly and summed, so the
//! ratio never exceeds one and no cancellation occurs when `B̄` is small.

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Result};
use crate::scalar::{lit, Scalar};
use crate::sky::{QuadratureOrder, SkyRegion};

/// Receptivity together with the integrals that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceptivityResult<T> {
    pub alpha: T,
    /// `∫_B ∫_B̄ g2`.
    pub numerator: T,
    /// `∫_B ∫_S g2`.
    pub denominator: T,
    /// Decoherence rate of the region in units of `T_D⁻¹`.
    pub rate_ratio: T,
    /// Redundancy rate `α τ_D⁻¹` in units of `T_D⁻¹`.
    pub tau_r_ratio: T,
}

/// Receptivity of a region by product quadrature. Regions with `Ω = 0`
/// return the point-source value 1, the full sky returns 0.
pub fn alpha_numeric<T: Scalar>(region: &SkyRegion<T>, order: QuadratureOrder) -> Result<ReceptivityResult<T>> {
    let panels = region.panels(order)?;
    let rate_ratio = panels.inside.rate_moment() * lit(3.0) / (lit::<T>(80.0) * T::PI());
    if panels.inside.is_empty() {
        return Ok(ReceptivityResult {
            alpha: T::one(),
            numerator: T::zero(),
            denominator: T::zero(),
            rate_ratio,
            tau_r_ratio: rate_ratio,
        });
    }
    let cross = panels.inside.g2_double_integral(&panels.outside);
    let own = panels.inside.g2_self_integral();
    let denominator = cross + own;
    let alpha = if denominator > T::zero() { cross / denominator } else { T::zero() };
    Ok(ReceptivityResult {
        alpha,
        numerator: cross,
        denominator,
        rate_ratio,
        tau_r_ratio: alpha * rate_ratio,
    })
}

/// Closed-form receptivity of a disk of half-angle `θ₀` tilted by `χ`.
pub fn alpha_disk<T: Scalar>(theta0: T, chi: T) -> Result<T> {
    check_closed("theta0", theta0, T::zero(), T::PI(), "[0, pi]")?;
    let c = theta0.cos();
    let cx = chi.cos();
    let (c2, x2) = (c * c, cx * cx);
    let (c4, c6) = (c2 * c2, c2 * c2 * c2);
    let l = lit::<T>;
    let num = (c + T::one())
        * (l(-117.0) * c6 + l(295.0) * c4 - l(575.0) * c2 + l(685.0)
            + l(6.0) * x2 * (l(21.0) * c6 - l(55.0) * c4 + l(135.0) * c2 + l(75.0)));
    let den = l(32.0) * (l(40.0) + l(11.0) * c * (T::one() + c) * (l(3.0) * x2 - T::one()));
    Ok(num / den)
}

/// `τ_R⁻¹ = α τ_D⁻¹`.
pub fn redundancy_rate<T: Scalar>(alpha: T, tau_d_inv: T) -> Result<T> {
    check_closed("alpha", alpha, T::zero(), T::one(), "[0, 1]")?;
    if !(tau_d_inv >= T::zero()) {
        return Err(domain("tau_D_inv", tau_d_inv, "rate >= 0"));
    }
    Ok(alpha * tau_d_inv)
}
