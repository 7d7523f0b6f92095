//! Entropies, mutual information and redundancy for the balanced two-branch
//! superposition.
//!
//! With `Γ` the decoherence factor, `α` the receptivity and `f` the fragment
//! fraction:
//!
//! ```text
//! H_S    = ln 2 − h(Γ)
//! ΔH_F   = ln 2 − h(Γ^{αf})
//! 𝓘(f)   = ln 2 + h(Γ^{1−f}) − h(Γ^{αf}) − h(Γ)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Error, Result};
use crate::scalar::{lit, Scalar};
use crate::series::{h_unchecked, Nats};

/// Decoherence factor `Γ ∈ [0, 1]`, stored as `ln Γ` so that factors such as
/// `e⁻¹⁰⁰⁰` remain distinct from zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DecoherenceFactor<T> {
    ln: T,
}

impl<T: Scalar> DecoherenceFactor<T> {
    /// From the value `Γ ∈ [0, 1]`.
    pub fn new(gamma: T) -> Result<Self> {
        check_closed("gamma", gamma, T::zero(), T::one(), "[0, 1]")?;
        Ok(Self { ln: gamma.ln() })
    }

    /// From `ln Γ ≤ 0`; `−∞` is allowed and means `Γ = 0`.
    pub fn from_ln(ln: T) -> Result<Self> {
        if ln.is_nan() || ln > T::zero() {
            return Err(domain("ln_gamma", ln, "(-inf, 0]"));
        }
        Ok(Self { ln })
    }

    /// `Γ = e^{−t/τ_D}` from the elapsed time in units of `τ_D`.
    pub fn from_time(t_over_tau: T) -> Result<Self> {
        if !(t_over_tau >= T::zero()) {
            return Err(domain("t_over_tauD", t_over_tau, "t >= 0"));
        }
        Ok(Self { ln: -t_over_tau })
    }

    pub fn one() -> Self {
        Self { ln: T::zero() }
    }

    pub fn zero() -> Self {
        Self { ln: T::neg_infinity() }
    }

    pub fn ln(self) -> T {
        self.ln
    }

    pub fn value(self) -> T {
        self.ln.exp()
    }

    /// `Γ^w` for `w ≥ 0`, with `Γ⁰ = 1` even when `Γ = 0`.
    pub fn pow(self, w: T) -> T {
        if w == T::zero() {
            T::one()
        } else {
            (w * self.ln).exp()
        }
    }

    /// `Γ^w` as a factor.
    pub fn powf(self, w: T) -> Self {
        if w == T::zero() {
            Self::one()
        } else {
            Self { ln: w * self.ln }
        }
    }
}

/// `(Γ, α, f)`, the dimensionless inputs of every information quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoParams<T> {
    pub gamma: DecoherenceFactor<T>,
    pub alpha: T,
    pub f: T,
}

impl<T: Scalar> InfoParams<T> {
    pub fn new(gamma: DecoherenceFactor<T>, alpha: T, f: T) -> Result<Self> {
        check_closed("alpha", alpha, T::zero(), T::one(), "[0, 1]")?;
        check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
        Ok(Self { gamma, alpha, f })
    }

    /// Parameters at elapsed time `t/τ_D`.
    pub fn at_time(t_over_tau: T, alpha: T, f: T) -> Result<Self> {
        Self::new(DecoherenceFactor::from_time(t_over_tau)?, alpha, f)
    }

    pub fn mutual_information(&self) -> Nats<T> {
        mi_unchecked(self.gamma, self.alpha, self.f)
    }

    pub fn fragment_entropy_change(&self) -> Nats<T> {
        Nats(T::LN_2() - h_unchecked(self.gamma.pow(self.alpha * self.f)))
    }
}

/// `H_S = ln 2 − h(Γ)`.
pub fn system_entropy<T: Scalar>(gamma: DecoherenceFactor<T>) -> Nats<T> {
    Nats(T::LN_2() - h_unchecked(gamma.value()))
}

/// `ΔH_F = ln 2 − h(Γ^{αf})`.
pub fn fragment_entropy_change<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, f: T) -> Result<Nats<T>> {
    Ok(InfoParams::new(gamma, alpha, f)?.fragment_entropy_change())
}

fn mi_unchecked<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, f: T) -> Nats<T> {
    let outside = h_unchecked(gamma.pow(T::one() - f));
    let whole = h_unchecked(gamma.value());
    let v = if alpha == T::zero() {
        outside - whole
    } else {
        T::LN_2() + outside - h_unchecked(gamma.pow(alpha * f)) - whole
    };
    Nats(v.max(T::zero()))
}

/// System–fragment mutual information `𝓘(S : F_f)`.
///
/// For `α = 0` this is evaluated as `h(Γ^{1−f}) − h(Γ)`, which avoids
/// subtracting `ln 2` from itself.
pub fn mutual_information<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, f: T) -> Result<Nats<T>> {
    Ok(InfoParams::new(gamma, alpha, f)?.mutual_information())
}

/// Leading-order form `ln 2 − Γ^{αf}/2`, valid for `0 < f < 1/2` and
/// `Γ^{αf} ≪ 1`. It does not vanish as `f → 0`.
pub fn mutual_information_approx<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, f: T) -> Result<Nats<T>> {
    let half = lit::<T>(0.5);
    if !(f > T::zero() && f < half) {
        return Err(domain("f", f, "(0, 1/2)"));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(domain("alpha", alpha, "(0, 1]"));
    }
    Ok(Nats(T::LN_2() - half * gamma.pow(alpha * f)))
}

/// Tolerance on the fragment fraction in [`redundancy_exact`].
pub const FRACTION_TOLERANCE: f64 = 1e-12;

/// Smallest fraction `f_δ ∈ (0, 1/2]` with `𝓘(f_δ) ≥ (1−δ) ln 2`, by
/// bisection; `None` when `f = 1/2` still falls short.
pub fn fragment_fraction<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, delta: T) -> Result<Option<T>> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(domain("delta", delta, "(0, 1)"));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(domain("alpha", alpha, "(0, 1]"));
    }
    let target = (T::one() - delta) * T::LN_2();
    let half = lit::<T>(0.5);
    let reached = |f: T| mi_unchecked(gamma, alpha, f).value() >= target;
    if !reached(half) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (T::zero(), half);
    let tol = lit::<T>(FRACTION_TOLERANCE).max(T::epsilon());
    while hi - lo > tol {
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(half * (lo + hi)))
}

/// Redundancy `R_δ = 1/f_δ`, or `None` before the fragment of half the
/// environment carries `(1−δ)` of the missing information.
pub fn redundancy_exact<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, delta: T) -> Result<Option<T>> {
    Ok(fragment_fraction(gamma, alpha, delta)?.map(|f| T::one() / f))
}

/// Largest deficit for which the linear estimate is meaningful, `1/(2 ln 2)`.
pub fn max_estimate_delta<T: Scalar>() -> T {
    T::one() / (lit::<T>(2.0) * T::LN_2())
}

/// Long-time estimate `R_δ ≈ α (t/τ_D) / ln(1/(2δ ln 2))`.
pub fn redundancy_estimate<T: Scalar>(t_over_tau: T, alpha: T, delta: T) -> Result<T> {
    if !(t_over_tau >= T::zero()) {
        return Err(domain("t_over_tauD", t_over_tau, "t >= 0"));
    }
    check_closed("alpha", alpha, T::zero(), T::one(), "[0, 1]")?;
    if !(delta > T::zero() && delta < max_estimate_delta()) {
        return Err(domain("delta", delta, "(0, 1/(2 ln 2))"));
    }
    if t_over_tau < lit(10.0) {
        log::warn!("redundancy estimate used at t/tau_D = {t_over_tau}, outside the long-time regime");
    }
    let denom = (T::one() / (lit::<T>(2.0) * delta * T::LN_2())).ln();
    Ok(alpha * t_over_tau / denom)
}

/// Conservative bound `(t/τ_D) / ln(1/(δ − Γ))` with `Γ = e^{−t/τ_D}` for
/// fully receptive environments. Requires `t/τ_D > ln(2/δ)`.
pub fn redundancy_lower_bound<T: Scalar>(t_over_tau: T, delta: T) -> Result<T> {
    redundancy_lower_bound_scaled(t_over_tau, T::one(), delta)
}

/// The bound for receptivity `α`: `α (t/τ_D) / ln(1/(δ − Γ))`.
///
/// It follows from `𝓘 ≥ ln 2 (1 − Γ^{αf} − Γ)`, so for `α < 1` the time
/// enters only through `αt` in the numerator.
pub fn redundancy_lower_bound_scaled<T: Scalar>(t_over_tau: T, alpha: T, delta: T) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(domain("delta", delta, "(0, 1)"));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(domain("alpha", alpha, "(0, 1]"));
    }
    let threshold = (lit::<T>(2.0) / delta).ln();
    if !(t_over_tau > threshold) {
        return Err(domain("t_over_tauD", t_over_tau, "t/tau_D > ln(2/delta)"));
    }
    let gap = delta - (-t_over_tau).exp();
    Ok(alpha * t_over_tau / (T::one() / gap).ln())
}

/// Mutual information sampled along `f` at fixed `(Γ, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipCurve<T> {
    pub ln_gamma: T,
    pub alpha: T,
    pub points: Vec<(T, Nats<T>)>,
}

/// Partial information plot on a sorted grid of fractions in `[0, 1]`.
pub fn pip_curve<T: Scalar>(gamma: DecoherenceFactor<T>, alpha: T, f_grid: &[T]) -> Result<PipCurve<T>> {
    check_closed("alpha", alpha, T::zero(), T::one(), "[0, 1]")?;
    if f_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Config { key: "f_grid".into(), message: "fractions must be sorted".into() });
    }
    let points = f_grid
        .iter()
        .map(|&f| {
            check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
            Ok((f, mi_unchecked(gamma, alpha, f)))
        })
        .collect::<Result<_>>()?;
    Ok(PipCurve { ln_gamma: gamma.ln(), alpha, points })
}
