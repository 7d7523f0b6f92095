//! One-dimensional rules: Gauss–Legendre on an interval, the periodic
//! midpoint rule in azimuth, and a Planck-weighted rule on `[0, ∞)`.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Scalar};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are the roots of `P_n`, found by Newton iteration from the
/// Chebyshev-like initial guesses; weights are `2 / ((1−x²) P_n'(x)²)`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n < 2 {
        return Err(Error::Order(n));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    // Newton runs in f64 regardless of T; the nodes are then narrowed.
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = lit(-x);
        nodes[n - 1 - i] = lit(x);
        weights[i] = lit(w);
        weights[n - 1 - i] = lit(w);
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on<T: Scalar>(n: usize, a: T, b: T) -> Result<(Vec<T>, Vec<T>)> {
    let (x, w) = gauss_legendre::<T>(n)?;
    let half = lit::<T>(0.5) * (b - a);
    let mid = lit::<T>(0.5) * (b + a);
    Ok((
        x.into_iter().map(|x| mid + half * x).collect(),
        w.into_iter().map(|w| w * half).collect(),
    ))
}

/// Midpoint rule on the circle: `n` equally spaced azimuths offset by half a
/// step, each with weight `2π/n`. Exact for trigonometric polynomials of
/// degree below `n`.
pub fn azimuth_rule<T: Scalar>(n: usize) -> Result<(Vec<T>, T)> {
    if n < 2 {
        return Err(Error::Order(n));
    }
    let step = T::TAU() / count::<T>(n);
    let phis = (0..n)
        .map(|j| (count::<T>(j) + lit(0.5)) * step)
        .collect();
    Ok((phis, step))
}

/// Quadrature for thermal photon spectra.
///
/// Nodes are in the dimensionless energy `x = ħck / k_B T`; weights
/// integrate against the normalized Planck number distribution
/// `p(x) ∝ x² / (eˣ − 1)`. The half line is mapped onto `[0, 1)` by
/// `x = L·u/(1−u)` with `L = 8`, then Gauss–Legendre in `u`.
#[derive(Debug, Clone)]
pub struct PlanckRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

const PLANCK_MAP_SCALE: f64 = 8.0;

impl<T: Scalar> PlanckRule<T> {
    pub fn new(n: usize) -> Result<Self> {
        let (u, w) = gauss_legendre_on::<f64>(n, 0.0, 1.0)?;
        let mut nodes = Vec::with_capacity(n);
        let mut raw = Vec::with_capacity(n);
        for (&u, &w) in u.iter().zip(&w) {
            let x = PLANCK_MAP_SCALE * u / (1.0 - u);
            let jac = PLANCK_MAP_SCALE / ((1.0 - u) * (1.0 - u));
            let density = if x > 700.0 { 0.0 } else { x * x / x.exp_m1() };
            nodes.push(x);
            raw.push(w * jac * density);
        }
        let norm: f64 = raw.iter().sum();
        Ok(Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: raw.into_iter().map(|w| lit(w / norm)).collect(),
        })
    }

    /// Default 32-node rule.
    pub fn standard() -> Self {
        Self::new(32).expect("32 nodes is a valid order")
    }

    /// `⟨xᵖ⟩` under the normalized Planck number distribution.
    pub fn moment(&self, p: i32) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * x.powi(p))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
