//! Entropy kernels.
//!
//! Everything information-theoretic in this crate reduces to three functions:
//! the record function [`h`], the entropy of the two-level spectrum
//! `{(1 ± x)/2}` and the entropy of the `M`-level spectrum produced by a
//! uniform-coherence `M × M` density matrix.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Result};
use crate::scalar::{count, lit, Scalar};

/// Information measured in nats (natural logarithm units).
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats<T>(pub T);

impl<T: Scalar> Nats<T> {
    pub fn zero() -> Self {
        Nats(T::zero())
    }

    /// `ln 2`, one bit.
    pub fn one_bit() -> Self {
        Nats(T::LN_2())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn bits(self) -> T {
        self.0 / T::LN_2()
    }
}

impl<T: Scalar> Add for Nats<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Nats(self.0 + rhs.0)
    }
}

impl<T: Scalar> Sub for Nats<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Nats(self.0 - rhs.0)
    }
}

impl<T: Scalar> Neg for Nats<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Nats(-self.0)
    }
}

impl<T: Scalar> Sum for Nats<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        Nats(iter.map(|n| n.0).sum())
    }
}

impl<T: fmt::Display> fmt::Display for Nats<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// Below this argument [`h`] is summed as a power series.
const SERIES_CUTOFF: f64 = 1.0e-3;

/// `h(x) = √x·artanh(√x) + ln√(1−x) = Σₙ xⁿ / (2n(2n−1))` on `[0, 1]`.
///
/// Monotone, with `h(0) = 0`, `h(1) = ln 2` and `x/2 ≤ h(x) ≤ x·ln 2`.
/// The closed form is evaluated as `½[(1+s)ln(1+s) + (1−s)ln(1−s)]` with
/// `s = √x`, which has no cancellation between the two singular pieces as
/// `x → 1`. Below `1/4` the artanh form is used instead, and tiny arguments
/// use the series.
pub fn h<T: Scalar>(x: T) -> Result<Nats<T>> {
    check_closed("x", x, T::zero(), T::one(), "[0, 1]")?;
    Ok(Nats(h_unchecked(x)))
}

/// [`h`] without the domain check; callers guarantee `0 ≤ x ≤ 1`.
pub(crate) fn h_unchecked<T: Scalar>(x: T) -> T {
    if x == T::one() {
        return T::LN_2();
    }
    if x < lit(SERIES_CUTOFF) {
        return h_series_small(x);
    }
    let s = x.sqrt();
    let half = lit::<T>(0.5);
    if x < lit(0.25) {
        // The two terms differ in sign but only by a factor of about two.
        return s * s.atanh() + half * (-x).ln_1p();
    }
    half * ((T::one() + s) * s.ln_1p() + (T::one() - s) * (-s).ln_1p())
}

fn h_series_small<T: Scalar>(x: T) -> T {
    let mut sum = T::zero();
    let mut power = x;
    for n in 1..40 {
        let nn = count::<T>(n);
        let term = power / (lit::<T>(2.0) * nn * (lit::<T>(2.0) * nn - T::one()));
        sum = sum + term;
        if term <= sum * T::epsilon() * lit(0.25) {
            break;
        }
        power = power * x;
    }
    sum
}

/// Partial sum of the power series of [`h`] with `terms` terms, together with
/// the rigorous tail bound `x^(N+1) / ((2N+1)(2N+2)(1−x))`.
///
/// The true value lies in `[partial, partial + bound]`. For `x = 1` the bound
/// is infinite.
pub fn h_series_bracket<T: Scalar>(x: T, terms: usize) -> Result<(T, T)> {
    check_closed("x", x, T::zero(), T::one(), "[0, 1]")?;
    let mut sum = T::zero();
    let mut power = T::one();
    for n in 1..=terms {
        power = power * x;
        let nn = count::<T>(n);
        sum = sum + power / (lit::<T>(2.0) * nn * (lit::<T>(2.0) * nn - T::one()));
    }
    let n = count::<T>(terms);
    let two = lit::<T>(2.0);
    let bound = if x == T::one() {
        T::infinity()
    } else {
        power * x / ((two * n + T::one()) * (two * n + two) * (T::one() - x))
    };
    Ok((sum, bound))
}

/// `−p ln p` with the convention `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlnx_neg<T: Scalar>(p: T) -> T {
    if p <= T::zero() {
        T::zero()
    } else {
        -p * p.ln()
    }
}

/// Entropy of the spectrum `{(1+x)/2, (1−x)/2}`.
///
/// Identically `ln 2 − h(x²)`.
pub fn binary_entropy_from_gap<T: Scalar>(x: T) -> Result<Nats<T>> {
    check_closed("x", x, T::zero(), T::one(), "[0, 1]")?;
    let half = lit::<T>(0.5);
    Ok(Nats(xlnx_neg(half * (T::one() + x)) + xlnx_neg(half * (T::one() - x))))
}

/// Entropy of the `M × M` density matrix with diagonal `1/M` and every
/// off-diagonal entry equal to `x/M`.
///
/// Its spectrum is `(1+(M−1)x)/M` once and `(1−x)/M` with multiplicity
/// `M − 1`, so this is valid for every `x ∈ [0, 1]`.
pub fn m_spectrum_entropy<T: Scalar>(x: T, m: usize) -> Result<Nats<T>> {
    check_closed("x", x, T::zero(), T::one(), "[0, 1]")?;
    if m < 2 {
        return Err(domain("M", m as f64, "M >= 2"));
    }
    let mm = count::<T>(m);
    let top = (T::one() + (mm - T::one()) * x) / mm;
    let rest = (T::one() - x) / mm;
    Ok(Nats(xlnx_neg(top) + (mm - T::one()) * xlnx_neg(rest)))
}

/// Shannon entropy of a probability vector, in nats.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> Nats<T> {
    Nats(crate::scalar::compensated_sum(p.iter().map(|&q| xlnx_neg(q))))
}
