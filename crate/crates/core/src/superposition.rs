//! Unbalanced two-branch and balanced `M`-branch superpositions under a
//! point source, and weak/strong bounds for unequal decoherence factors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Error, Result};
use crate::information::{mutual_information, DecoherenceFactor};
use crate::scalar::{count, lit, Scalar};
use crate::series::{h_unchecked, m_spectrum_entropy, shannon_entropy, Nats};

/// Tolerance on `Σ p = 1`.
const NORMALIZATION_TOL: f64 = 1e-12;

/// Largest weak factor for which the interval bounds are asserted, `e⁻⁵`.
pub const BOUND_REGIME_LN: f64 = -5.0;

/// Symmetric matrix of pairwise decoherence factors `Γ_ab` with unit diagonal,
/// stored as `ln Γ_ab`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix<T> {
    m: usize,
    ln: Vec<T>,
}

impl<T: Scalar> GammaMatrix<T> {
    /// From row-major values `Γ_ab ∈ [0, 1]`.
    pub fn from_values(m: usize, values: &[T]) -> Result<Self> {
        if m < 2 {
            return Err(domain("M", m as f64, "M >= 2"));
        }
        if values.len() != m * m {
            return Err(Error::Config {
                key: "gamma".into(),
                message: format!("expected {m}x{m} entries"),
            });
        }
        let tol = lit::<T>(1e-12);
        for a in 0..m {
            if (values[a * m + a] - T::one()).abs() > tol {
                return Err(Error::Config {
                    key: "gamma".into(),
                    message: format!("diagonal entry {a} is not 1"),
                });
            }
            for b in 0..m {
                check_closed("gamma_ab", values[a * m + b], T::zero(), T::one(), "[0, 1]")?;
                let gap = (values[a * m + b] - values[b * m + a]).abs();
                if gap > tol {
                    return Err(Error::NotSymmetric {
                        row: a,
                        col: b,
                        gap: gap.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(Self { m, ln: values.iter().map(|v| v.ln()).collect() })
    }

    /// From row-major `ln Γ_ab ≤ 0`.
    pub fn from_ln(m: usize, ln: Vec<T>) -> Result<Self> {
        let values: Vec<T> = ln.iter().map(|l| l.exp()).collect();
        Self::from_values(m, &values)?;
        Ok(Self { m, ln })
    }

    /// Every off-diagonal factor equal to `gamma`.
    pub fn uniform(m: usize, gamma: DecoherenceFactor<T>) -> Result<Self> {
        if m < 2 {
            return Err(domain("M", m as f64, "M >= 2"));
        }
        let ln = (0..m * m)
            .map(|k| if k / m == k % m { T::zero() } else { gamma.ln() })
            .collect();
        Ok(Self { m, ln })
    }

    /// Parses `M` comma-separated rows of `M` values each.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut rows = 0;
        for (i, line) in text.lines().map(str::trim).enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for cell in line.split(',') {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Config {
                    key: format!("gamma line {}", i + 1),
                    message: format!("`{}` is not a number", cell.trim()),
                })?;
                values.push(lit::<T>(v));
            }
            rows += 1;
        }
        if rows * rows != values.len() {
            return Err(Error::Config {
                key: "gamma".into(),
                message: "matrix must be square".into(),
            });
        }
        Self::from_values(rows, &values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_csv(&text)
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> DecoherenceFactor<T> {
        DecoherenceFactor::from_ln(self.ln[a * self.m + b]).expect("stored ln is non-positive")
    }

    fn off_diagonal(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.m * self.m)
            .filter(move |k| k / self.m != k % self.m)
            .map(move |k| self.ln[k])
    }

    /// Weakest decoherence: the largest factor `Γ_W`.
    pub fn weak(&self) -> DecoherenceFactor<T> {
        let ln = self.off_diagonal().fold(T::neg_infinity(), T::max);
        DecoherenceFactor::from_ln(ln).expect("non-positive")
    }

    /// Strongest decoherence: the smallest factor `Γ_S`.
    pub fn strong(&self) -> DecoherenceFactor<T> {
        let ln = self.off_diagonal().fold(T::zero(), T::min);
        DecoherenceFactor::from_ln(ln).expect("non-positive")
    }
}

/// Initial branch structure of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatSpec<T> {
    pub probabilities: Vec<T>,
    pub gamma: Option<GammaMatrix<T>>,
}

impl<T: Scalar> CatSpec<T> {
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        validate_probabilities(&probabilities)?;
        Ok(Self { probabilities, gamma: None })
    }

    /// `M` equal branches.
    pub fn balanced(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain("M", m as f64, "M >= 2"));
        }
        Self::new(vec![T::one() / count::<T>(m); m])
    }

    /// Two branches with `μ = (p₁ − p₂)²`, taking `p₁ ≥ p₂`.
    pub fn unbalanced(mu: T) -> Result<Self> {
        check_closed("mu", mu, T::zero(), T::one(), "[0, 1]")?;
        let half = lit::<T>(0.5);
        let d = mu.sqrt();
        Self::new(vec![half * (T::one() + d), half * (T::one() - d)])
    }

    pub fn with_gamma(mut self, gamma: GammaMatrix<T>) -> Result<Self> {
        if gamma.size() != self.m() {
            return Err(Error::Config {
                key: "gamma".into(),
                message: format!("matrix is {0}x{0} but there are {1} branches", gamma.size(), self.m()),
            });
        }
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.probabilities.len()
    }

    /// `(p₁ − p₂)²` for two branches.
    pub fn mu(&self) -> Option<T> {
        match self.probabilities[..] {
            [a, b] => Some((a - b) * (a - b)),
            _ => None,
        }
    }

    pub fn is_balanced(&self) -> bool {
        let p0 = self.probabilities[0];
        self.probabilities.iter().all(|&p| p == p0)
    }
}

pub(crate) fn validate_probabilities<T: Scalar>(p: &[T]) -> Result<()> {
    if p.len() < 2 {
        return Err(domain("M", p.len() as f64, "M >= 2"));
    }
    for &q in p {
        check_closed("p", q, T::zero(), T::one(), "[0, 1]")?;
    }
    let total: T = crate::scalar::compensated_sum(p.iter().copied());
    if (total - T::one()).abs() > lit::<T>(NORMALIZATION_TOL).max(lit::<T>(8.0) * T::epsilon()) {
        return Err(Error::Unnormalized(total.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Plateau entropy `−Σ p ln p`.
pub fn max_entropy<T: Scalar>(p: &[T]) -> Result<Nats<T>> {
    validate_probabilities(p)?;
    Ok(shannon_entropy(p))
}

fn shifted_h<T: Scalar>(mu: T, x: T) -> T {
    h_unchecked((mu + (T::one() - mu) * x).min(T::one()))
}

/// Mutual information of an unbalanced two-branch superposition:
/// the balanced formula at `α = 1` with each `h(x)` replaced by
/// `h(μ + (1−μ)x)`.
pub fn mi_unbalanced<T: Scalar>(gamma: DecoherenceFactor<T>, f: T, mu: T) -> Result<Nats<T>> {
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    check_closed("mu", mu, T::zero(), T::one(), "[0, 1]")?;
    let v = T::LN_2() + shifted_h(mu, gamma.pow(T::one() - f)) - shifted_h(mu, gamma.pow(f))
        - shifted_h(mu, gamma.value());
    Ok(Nats(v.max(T::zero())))
}

/// `μ → 1` limit of `𝓘 / H̄`: `1 + Γ^{1−f} − Γ^f − Γ`.
pub fn mi_unbalanced_limit<T: Scalar>(gamma: DecoherenceFactor<T>, f: T) -> Result<T> {
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    Ok(T::one() + gamma.pow(T::one() - f) - gamma.pow(f) - gamma.value())
}

/// Mutual information of a balanced `M`-branch superposition with equal
/// factors: `E_M(Γ^{f/2}) + E_M(Γ^{1/2}) − E_M(Γ^{(1−f)/2})`.
pub fn mi_mway<T: Scalar>(gamma: DecoherenceFactor<T>, f: T, m: usize) -> Result<Nats<T>> {
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    let half = lit::<T>(0.5);
    let e = |w: T| m_spectrum_entropy(gamma.pow(half * w), m);
    let v = e(f)? + e(T::one())? - e(T::one() - f)?;
    Ok(Nats(v.value().max(T::zero())))
}

/// Power-series form of [`mi_mway`] truncated at `terms`:
/// `ln M + (1/M) Σ_{n≥2} [(M−1) + (1−M)ⁿ]/(n(n−1)) · (x_{1−f}ⁿ − x_fⁿ − x_1ⁿ)`
/// with `x_w = Γ^{w/2}`. Only convergent while `(M−1)·Γ^{min(f,1−f)/2} < 1`;
/// outside that radius this returns a domain error.
pub fn mi_mway_series<T: Scalar>(gamma: DecoherenceFactor<T>, f: T, m: usize, terms: usize) -> Result<T> {
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    if m < 2 {
        return Err(domain("M", m as f64, "M >= 2"));
    }
    let half = lit::<T>(0.5);
    let mm = count::<T>(m);
    let radius = (mm - T::one()) * gamma.pow(half * f.min(T::one() - f));
    if !(radius < T::one()) {
        return Err(domain("(M-1) sqrt(Gamma)^min(f,1-f)", radius, "< 1"));
    }
    let xs = [gamma.pow(half * (T::one() - f)), gamma.pow(half * f), gamma.pow(half)];
    let sign = [T::one(), -T::one(), -T::one()];
    // xⁿ and ((1−M)x)ⁿ per argument; (1−M)ⁿ alone would overflow.
    let mut plain = xs;
    let mut scaled = xs.map(|x| (T::one() - mm) * x);
    let mut sum = T::zero();
    for n in 2..=terms.max(2) {
        let nn = count::<T>(n);
        let mut term = T::zero();
        for k in 0..3 {
            plain[k] = plain[k] * xs[k];
            scaled[k] = scaled[k] * (T::one() - mm) * xs[k];
            term = term + sign[k] * ((mm - T::one()) * plain[k] + scaled[k]);
        }
        sum = sum + term / (nn * (nn - T::one()));
    }
    Ok(mm.ln() + sum / mm)
}

/// `M → ∞` limit of `𝓘 / ln M`: `1 + Γ^{(1−f)/2} − Γ^{f/2} − Γ^{1/2}`.
pub fn mi_mway_limit<T: Scalar>(gamma: DecoherenceFactor<T>, f: T) -> Result<T> {
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    let half = lit::<T>(0.5);
    Ok(T::one() + gamma.pow(half * (T::one() - f)) - gamma.pow(half * f) - gamma.pow(half))
}

/// Weak and strong mutual informations bracketing the exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalBounds<T> {
    /// All factors set to the largest, `Γ_W`.
    pub weak: Nats<T>,
    /// All factors set to the smallest, `Γ_S`.
    pub strong: Nats<T>,
    pub ln_gamma_weak: T,
    pub ln_gamma_strong: T,
    /// `Γ_W ≤ e⁻⁵`, where the ordering `𝓘_W ≤ 𝓘 ≤ 𝓘_S` is expected.
    pub in_regime: bool,
}

/// Mutual information with every pairwise factor replaced by `Γ_W` and by
/// `Γ_S`. Balanced branches use the closed form; otherwise the uniform
/// matrices are diagonalized.
pub fn mi_interval_bounds<T: Scalar>(gamma: &GammaMatrix<T>, p: &[T], f: T) -> Result<IntervalBounds<T>> {
    validate_probabilities(p)?;
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    if gamma.size() != p.len() {
        return Err(Error::Config { key: "gamma".into(), message: "size does not match the branch count".into() });
    }
    let weak = gamma.weak();
    let strong = gamma.strong();
    let m = p.len();
    let balanced = p.iter().all(|&q| q == p[0]);
    let eval = |g: DecoherenceFactor<T>| -> Result<Nats<T>> {
        if balanced {
            if m == 2 {
                mutual_information(g, T::one(), f)
            } else {
                mi_mway(g, f, m)
            }
        } else {
            crate::oracle::mi_exact_general(&GammaMatrix::uniform(m, g)?, p, f)
        }
    };
    let in_regime = weak.ln() <= lit(BOUND_REGIME_LN);
    if !in_regime {
        log::warn!("weak decoherence factor ln = {} is above -5; bounds are not guaranteed", weak.ln());
    }
    Ok(IntervalBounds {
        weak: eval(weak)?,
        strong: eval(strong)?,
        ln_gamma_weak: weak.ln(),
        ln_gamma_strong: strong.ln(),
        in_regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::h;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn g(t: f64) -> DecoherenceFactor<f64> {
        DecoherenceFactor::from_time(t).unwrap()
    }

    #[test]
    fn max_entropy_examples() {
        assert_abs_diff_eq!(max_entropy(&[0.5, 0.5]).unwrap().value(), LN_2);
        assert_eq!(max_entropy(&[1.0, 0.0]).unwrap().value(), 0.0);
        let cat = CatSpec::unbalanced(0.5).unwrap();
        let v = max_entropy(&cat.probabilities).unwrap().value();
        assert_abs_diff_eq!(v, LN_2 - h(0.5).unwrap().value(), epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.416_495_530_699_687_5, epsilon = 1e-12);
        assert!(max_entropy(&[0.5, 0.6]).is_err());
        assert!(max_entropy(&[1.0]).is_err());
    }

    #[test]
    fn unbalanced_examples() {
        let a = mi_unbalanced(g(10.0), 0.2, 0.0).unwrap().value();
        let b = mutual_information(g(10.0), 1.0, 0.2).unwrap().value();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        assert_eq!(mi_unbalanced(g(10.0), 0.2, 1.0).unwrap().value(), 0.0);
        let v = mi_unbalanced(g(10.0), 0.2, 0.5).unwrap().value();
        assert_abs_diff_eq!(v, 0.373_502_739_198_720_2, epsilon = 1e-12);
        // 2×2 eigenvalue route: λ± = (1 ± √(μ + (1−μ)x))/2 with x = Γ^w.
        let ent = |x: f64| {
            let r = (0.5 + 0.5 * x).sqrt();
            let l = [(1.0 + r) / 2.0, (1.0 - r) / 2.0];
            -l.iter().map(|p| if *p > 0.0 { p * p.ln() } else { 0.0 }).sum::<f64>()
        };
        let direct = ent((-2.0f64).exp()) + ent((-10.0f64).exp()) - ent((-8.0f64).exp());
        assert_abs_diff_eq!(v, direct, epsilon = 1e-12);
    }

    #[test]
    fn limits() {
        assert_eq!(mi_unbalanced_limit(g(0.0), 0.3).unwrap(), 0.0);
        assert_eq!(mi_unbalanced_limit(DecoherenceFactor::zero(), 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(
            mi_unbalanced_limit(g(10.0), 0.2).unwrap(),
            1.0 + (-8.0f64).exp() - (-2.0f64).exp() - (-10.0f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(mi_mway_limit(DecoherenceFactor::zero(), 0.3).unwrap(), 1.0);
        assert_eq!(mi_mway_limit(g(0.0), 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(mi_mway_limit(g(10.0), 0.2).unwrap(), 0.643_698_250_718_206_4, epsilon = 1e-12);
    }

    #[test]
    fn mway_examples() {
        for f in [0.0, 0.1, 0.2, 0.5, 0.9] {
            let a = mi_mway(g(10.0), f, 2).unwrap().value();
            let b = mutual_information(g(10.0), 1.0, f).unwrap().value();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(mi_mway(g(0.0), 0.3, 5).unwrap().value(), 0.0);
        let v = mi_mway(g(10.0), 0.2, 3).unwrap().value();
        assert_abs_diff_eq!(v, 0.973_134_098_875_598_8, epsilon = 1e-12);
        assert!(mi_mway(g(10.0), 0.2, 1).is_err());
        // Plateau at ln M.
        assert_abs_diff_eq!(mi_mway(g(1e4), 0.2, 7).unwrap().value(), 7f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn series_inside_radius_only() {
        let s = mi_mway_series(g(10.0), 0.2, 3, 200).unwrap();
        assert_abs_diff_eq!(s, mi_mway(g(10.0), 0.2, 3).unwrap().value(), epsilon = 1e-12);
        // (M−1)·e^{−0.1} > 1: outside the radius.
        assert!(mi_mway_series(g(1.0), 0.2, 3, 200).is_err());
    }

    #[test]
    fn gamma_matrix_validation() {
        let ok = GammaMatrix::from_values(2, &[1.0, 0.3, 0.3, 1.0]).unwrap();
        assert_abs_diff_eq!(ok.weak().value(), 0.3, epsilon = 1e-15);
        assert!(matches!(
            GammaMatrix::from_values(2, &[1.0, 0.3, 0.2, 1.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(GammaMatrix::from_values(2, &[0.9, 0.3, 0.3, 1.0]).is_err());
        assert!(GammaMatrix::from_values(2, &[1.0, 1.3, 1.3, 1.0]).is_err());
        let parsed = GammaMatrix::<f64>::parse_csv("1, 0.1, 0.2\n0.1, 1, 0.05\n0.2, 0.05, 1\n").unwrap();
        assert_eq!(parsed.size(), 3);
        assert_abs_diff_eq!(parsed.strong().value(), 0.05, epsilon = 1e-15);
        assert!(GammaMatrix::<f64>::parse_csv("1, 0.1\n0.1\n").is_err());
    }

    #[test]
    fn interval_bounds_degenerate() {
        let gm = GammaMatrix::uniform(3, g(6.0)).unwrap();
        let p = [1.0 / 3.0; 3];
        let b = mi_interval_bounds(&gm, &p, 0.3).unwrap();
        let v = mi_mway(g(6.0), 0.3, 3).unwrap();
        assert_eq!(b.weak, v);
        assert_eq!(b.strong, v);
        assert!(b.in_regime);
        let one = GammaMatrix::uniform(3, DecoherenceFactor::one()).unwrap();
        let b1 = mi_interval_bounds(&one, &p, 0.3).unwrap();
        assert_eq!((b1.weak.value(), b1.strong.value()), (0.0, 0.0));
        assert!(!b1.in_regime);
    }

    #[test]
    fn cat_spec() {
        let c = CatSpec::<f64>::unbalanced(0.36).unwrap();
        assert_abs_diff_eq!(c.mu().unwrap(), 0.36, epsilon = 1e-15);
        assert!(CatSpec::<f64>::balanced(4).unwrap().is_balanced());
        assert!(CatSpec::new(vec![0.5, 0.4]).is_err());
        let gm = GammaMatrix::uniform(3, g(1.0)).unwrap();
        assert!(CatSpec::<f64>::balanced(2).unwrap().with_gamma(gm).is_err());
    }

    proptest! {
        #[test]
        fn binary_identity(p in 0.0f64..=1.0) {
            let lhs = shannon_entropy(&[p, 1.0 - p]).value();
            let rhs = LN_2 - h((2.0 * p - 1.0).powi(2)).unwrap().value();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn mway_two_is_balanced(t in 0.0f64..300.0, f in 0.0f64..=1.0) {
            let a = mi_mway(g(t), f, 2).unwrap().value();
            let b = mutual_information(g(t), 1.0, f).unwrap().value();
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn renormalized_softening(t in 0.5f64..60.0, f in 0.01f64..0.49, m in 2usize..12) {
            let r = |m: usize| mi_mway(g(t), f, m).unwrap().value() / (m as f64).ln();
            prop_assert!(r(m + 1) <= r(m) + 1e-12);
            prop_assert!(r(m) >= mi_mway_limit(g(t), f).unwrap() - 1e-12);
        }

        #[test]
        fn unbalanced_plateau(mu in 0.0f64..=1.0, f in 0.05f64..0.95) {
            let v = mi_unbalanced(g(1e5), f, mu).unwrap().value();
            let hbar = LN_2 - h(mu).unwrap().value();
            prop_assert!((v - hbar).abs() < 1e-12);
        }

        #[test]
        fn series_matches_spectrum(t in 3.0f64..60.0, f in 0.2f64..0.8, m in 2usize..4) {
            prop_assume!((m as f64 - 1.0) * (-t * f.min(1.0 - f) / 2.0).exp() < 0.9);
            let s = mi_mway_series(g(t), f, m, 2000);
            if let Ok(s) = s {
                prop_assert!((s - mi_mway(g(t), f, m).unwrap().value()).abs() < 1e-9);
            }
        }
    }
}
