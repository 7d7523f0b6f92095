//! Finite model of the photon environment used as ground truth for the
//! analytic formulas.
//!
//! Directions are discretized into cells of solid angle `ΔΩ_n`. A photon of
//! spectral node `k` scattering off the two branches has the per-photon
//! overlap matrix `S = S₂†S₁ = I + A` in the direction basis. From `A` follow
//! the discrete decoherence factor, the discrete receptivity
//!
//! ```text
//! z(k) = mean_{n∈B} [2 Re A_nn + Σ_{m∈B} |A_nm|²]
//! α    = Σ_k w_k z(k) / ln |Σ_k w_k mean_{n∈B} (1 + A_nn)|²
//! ```
//!
//! and, through the eigenvalues `b(j)` of the restricted matrix `B`, the exact
//! fragment spectrum.

pub mod battery;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Error, Result};
use crate::information::DecoherenceFactor;
use crate::linalg::{spectrum_entropy, symmetric_eigenvalues};
use crate::quadrature::PlanckRule;
use crate::radiometry::Scenario;
use crate::scalar::{compensated_sum, count, lit, CompensatedSum, Scalar};
use crate::series::{h_unchecked, xlnx_neg, Nats};
use crate::sky::{Direction, SkyRegion};
use crate::superposition::{validate_probabilities, GammaMatrix};

/// Default cap on `D_B^{fN}` for [`fragment_eigenvalues`].
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e7;

/// Default `ε` at `x = 1` for [`DipoleModel`]. The model is second order in
/// `ε`; the `O(ε⁴)` remainder in `z` carries the `x¹²` Planck moment, about
/// `10⁶` times the `x⁶` one, so `ε` must stay far below `10⁻³`.
pub const DEFAULT_DIPOLE_STRENGTH: f64 = 1e-9;

/// Tolerance on spectrum normalization.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// `|mean s|²` of diagonal overlaps `s` with nonnegative weights (over
/// directions in the region and spectral nodes jointly).
pub fn discrete_gamma<T: Scalar>(overlaps: &[Complex<T>], weights: &[T]) -> Result<T> {
    if overlaps.len() != weights.len() || overlaps.is_empty() {
        return Err(Error::Config {
            key: "overlaps".into(),
            message: "need one weight per overlap".into(),
        });
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    for (s, &w) in overlaps.iter().zip(weights) {
        if !(s.norm() <= T::one() + lit(1e-12)) {
            return Err(domain("|s_n|", s.norm(), "|s| <= 1"));
        }
        if !(w >= T::zero()) {
            return Err(domain("weight", w, ">= 0"));
        }
        re.add(w * s.re);
        im.add(w * s.im);
        total.add(w);
    }
    let total = total.value();
    if !(total > T::zero()) {
        return Err(Error::Undefined("all weights are zero"));
    }
    let (r, i) = (re.value() / total, im.value() / total);
    Ok(r * r + i * i)
}

/// First-order diagonal overlap `⟨n|S₂†S₁|n⟩` for a photon of wavenumber `k`
/// (m⁻¹) at angle `theta` from `Δx̂`, after time `t` (s) in a box of volume
/// `V` (m³):
/// `1 − (1/V)(2π/15)(3 + 11cos²θ) ã⁶Δx² t k⁶ c`.
pub fn matrix_element_diag<T: Scalar>(k: T, theta: T, t: T, scenario: &Scenario<T>, volume: T) -> Result<T> {
    Ok(T::one() - diag_deficit(k, theta, t, scenario, volume)?)
}

/// `1 − ⟨n|S₂†S₁|n⟩`, kept separate so tiny deficits survive.
fn diag_deficit<T: Scalar>(k: T, theta: T, t: T, scenario: &Scenario<T>, volume: T) -> Result<T> {
    if !(volume > T::zero()) {
        return Err(domain("V", volume, "V > 0"));
    }
    if !(t >= T::zero()) {
        return Err(domain("t", t, "t >= 0"));
    }
    let a = scenario.effective_radius()?;
    let c = theta.cos();
    let angular = lit::<T>(3.0) + lit::<T>(11.0) * c * c;
    let ak = a * k;
    let dk = scenario.dx_m * k;
    // ã⁶Δx²k⁶ = (ãk)⁶ (Δx k)² / k²
    Ok(lit::<T>(2.0) * T::PI() / lit(15.0) * angular * ak.powi(6) * dk * dk / (k * k) * t
        * lit(crate::radiometry::C)
        / volume)
}

/// Decoherence rate recovered from the discrete model: `γ^N` with `N = nV`
/// photons, where `γ = |mean s|²` averages [`matrix_element_diag`] over the
/// cells of `grid` inside the region and over the Planck spectrum. Returns
/// `−ln γ^N / t`.
///
/// The mean deficit `1 − mean s` is accumulated directly: with `V` large
/// enough that every overlap stays near one, `1 − d` itself would round
/// away the signal.
pub fn discrete_decoherence_rate<T: Scalar>(
    scenario: &Scenario<T>,
    grid: &SphereGrid<T>,
    planck: &PlanckRule<T>,
    t: T,
    volume: T,
) -> Result<T> {
    let q = scenario.thermal_wavenumber();
    let mut deficit = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    let mut omega = CompensatedSum::new();
    for n in grid.region_indices() {
        omega.add(grid.weights[n]);
        let theta = grid.directions[n].cos_theta.acos();
        for (&x, &wk) in planck.nodes.iter().zip(&planck.weights) {
            if wk == T::zero() {
                continue;
            }
            let d = diag_deficit(x * q, theta, t, scenario, volume)?;
            if !(d <= lit(2.0)) {
                return Err(domain("|s_n|", T::one() - d, "|s| <= 1"));
            }
            let w = wk * grid.weights[n];
            deficit.add(w * d);
            total.add(w);
        }
    }
    let total = total.value();
    if !(total > T::zero()) {
        return Err(Error::Undefined("region contains no directions"));
    }
    let ln_gamma = lit::<T>(2.0) * (-deficit.value() / total).ln_1p();
    let n_photons = crate::radiometry::photon_number_density(scenario.temperature_k, omega.value())? * volume;
    Ok(-n_photons * ln_gamma / t)
}

/// Discretized sphere: cell centres in the `Δx̂` frame, cell solid angles and
/// membership of the illuminated region.
#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    pub directions: Vec<Direction<T>>,
    pub weights: Vec<T>,
    pub inside: Vec<bool>,
}

impl<T: Scalar> SphereGrid<T> {
    /// Bands of equal `Δcos` in the frame of a disk (half-angle `θ₀`, tilt
    /// `χ`), split at the disk edge so every cell lies wholly inside or
    /// outside. `bands` are shared between the two zones in proportion to
    /// their areas; each band has `n_phi` cells.
    pub fn for_disk(theta0: T, chi: T, bands: usize, n_phi: usize) -> Result<Self> {
        if bands < 2 || n_phi < 1 {
            return Err(Error::Order(bands.min(n_phi)));
        }
        let edge = theta0.cos();
        let frac = (T::one() - edge) / lit(2.0);
        let mut n_in = (frac * count::<T>(bands)).round().to_usize().unwrap_or(0);
        if frac > T::zero() && n_in == 0 {
            n_in = 1;
        }
        if frac < T::one() && n_in == bands {
            n_in = bands - 1;
        }
        let n_out = bands - n_in;
        let (st, ct) = chi.sin_cos();
        let mut grid = Self { directions: Vec::new(), weights: Vec::new(), inside: Vec::new() };
        let dphi = T::TAU() / count::<T>(n_phi);
        let mut zone = |lo: T, hi: T, n: usize, inside: bool| {
            if n == 0 {
                return;
            }
            let dc = (hi - lo) / count::<T>(n);
            for b in 0..n {
                let c = lo + (count::<T>(b) + lit(0.5)) * dc;
                let s = (T::one() - c * c).max(T::zero()).sqrt();
                for j in 0..n_phi {
                    let phi = (count::<T>(j) + lit(0.5)) * dphi;
                    let (xp, yp, zp) = (s * phi.cos(), s * phi.sin(), c);
                    let v = [ct * xp + st * zp, yp, -st * xp + ct * zp];
                    grid.directions.push(Direction::from_vector(v).expect("unit vector"));
                    grid.weights.push(dc * dphi);
                    grid.inside.push(inside);
                }
            }
        };
        zone(edge, T::one(), n_in, true);
        zone(-T::one(), edge, n_out, false);
        Ok(grid)
    }

    /// Equal-`Δcos` bands about `Δx̂` with membership decided per cell centre.
    pub fn uniform(region: &SkyRegion<T>, bands: usize, n_phi: usize) -> Result<Self> {
        let mut grid = Self::for_disk(T::PI(), T::zero(), bands, n_phi)?;
        for (d, inside) in grid.directions.iter().zip(grid.inside.iter_mut()) {
            *inside = region.contains(*d);
        }
        Ok(grid)
    }

    /// Aligned grid for disks and the full sky; cell-centre membership for
    /// other regions.
    pub fn for_region(region: &SkyRegion<T>, bands: usize, n_phi: usize) -> Result<Self> {
        match region {
            SkyRegion::Disk(d) => Self::for_disk(d.theta0, d.chi, bands, n_phi),
            SkyRegion::Isotropic => Self::for_disk(T::PI(), T::zero(), bands, n_phi),
            other => Self::uniform(other, bands, n_phi),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn region_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&n| self.inside[n])
    }

    pub fn region_size(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }
}

/// A per-photon overlap model `S = I + A` on a finite direction set.
pub trait Overlap<T: Scalar> {
    /// Number of directions `D_S`.
    fn dimension(&self) -> usize;
    fn in_region(&self, n: usize) -> bool;
    /// Normalized spectral weights `w_k`.
    fn spectral_weights(&self) -> &[T];
    /// `A_nm = ⟨n|S₂†S₁|m⟩ − δ_nm` at spectral node `node`.
    fn deviation(&self, node: usize, n: usize, m: usize) -> Complex<T>;

    /// `Σ_{m∈B} |A_nm|²`.
    fn region_row_norm_sq(&self, node: usize, n: usize) -> T {
        compensated_sum(
            (0..self.dimension())
                .filter(|&m| self.in_region(m))
                .map(|m| self.deviation(node, n, m).norm_sqr()),
        )
    }
}

/// Discrete receptivity of an overlap model.
pub fn discrete_alpha<T: Scalar, O: Overlap<T> + ?Sized>(model: &O) -> Result<T> {
    let region: Vec<usize> = (0..model.dimension()).filter(|&n| model.in_region(n)).collect();
    if region.is_empty() {
        return Err(Error::Undefined("region contains no directions"));
    }
    let db = count::<T>(region.len());
    let mut z = CompensatedSum::new();
    let mut mean_re = CompensatedSum::new();
    let mut mean_im = CompensatedSum::new();
    for (node, &w) in model.spectral_weights().iter().enumerate() {
        let mut zk = CompensatedSum::new();
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for &n in &region {
            let a = model.deviation(node, n, n);
            zk.add(lit::<T>(2.0) * a.re + model.region_row_norm_sq(node, n));
            re.add(a.re);
            im.add(a.im);
        }
        z.add(w * zk.value() / db);
        mean_re.add(w * re.value() / db);
        mean_im.add(w * im.value() / db);
    }
    // |1 + ā|² with ā the weighted mean deviation; log1p keeps the digits.
    let (ar, ai) = (mean_re.value(), mean_im.value());
    let x = lit::<T>(2.0) * ar + ar * ar + ai * ai;
    if x == T::zero() {
        return Err(Error::Undefined("gamma = 1: no decoherence"));
    }
    Ok(z.value() / x.ln_1p())
}

/// Dipole-shaped overlap model on a [`SphereGrid`].
///
/// Off-diagonal `A_nm = ε_k K_nm` with the antisymmetric kernel
/// `K_nm = √(ΔΩ_n ΔΩ_m) √(1 + (n·m)²) (cos θ_n − cos θ_m)`, so that
/// `|A_nm|² ∝ g2(n, m)`. The diagonal `A_nn = −(ε_k²/2) Σ_m K_nm²` keeps
/// `S` unitary to second order. `ε_k = ε x_k³` on Planck nodes `x_k`.
#[derive(Debug, Clone)]
pub struct DipoleModel<T> {
    pub grid: SphereGrid<T>,
    planck: PlanckRule<T>,
    eps: Vec<T>,
    /// `Σ_{m∈S} K_nm²` per direction.
    row_all: Vec<T>,
    /// `Σ_{m∈B} K_nm²` per direction.
    row_region: Vec<T>,
}

impl<T: Scalar> DipoleModel<T> {
    /// `strength` is `ε` at `x = 1`.
    pub fn new(grid: SphereGrid<T>, planck: PlanckRule<T>, strength: T) -> Self {
        let eps = planck.nodes.iter().map(|&x| strength * x * x * x).collect();
        let d = grid.len();
        let vecs: Vec<[T; 3]> = grid.directions.iter().map(|d| d.to_vector()).collect();
        let sq: Vec<T> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let mut row_all = vec![T::zero(); d];
        let mut row_region = vec![T::zero(); d];
        for n in 0..d {
            if !grid.inside[n] {
                continue;
            }
            let mut all = CompensatedSum::new();
            let mut reg = CompensatedSum::new();
            for m in 0..d {
                let k = kernel(&vecs, &sq, n, m);
                let k2 = k * k;
                all.add(k2);
                if grid.inside[m] {
                    reg.add(k2);
                }
            }
            row_all[n] = all.value();
            row_region[n] = reg.value();
        }
        Self { grid, planck, eps, row_all, row_region }
    }

    fn kernel_nm(&self, n: usize, m: usize) -> T {
        let a = self.grid.directions[n].to_vector();
        let b = self.grid.directions[m].to_vector();
        let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        (self.grid.weights[n] * self.grid.weights[m]).sqrt() * (T::one() + c * c).sqrt() * (a[2] - b[2])
    }

    /// Restricted matrix `B = S_BB S_BBᵀ − I` at spectral node `node`, over
    /// the region's directions (row-major, `D_B × D_B`).
    pub fn b_matrix(&self, node: usize) -> Vec<T> {
        let idx: Vec<usize> = self.grid.region_indices().collect();
        let db = idx.len();
        let s = |i: usize, j: usize| {
            let d = self.deviation(node, idx[i], idx[j]).re;
            if i == j {
                T::one() + d
            } else {
                d
            }
        };
        let mut b = vec![T::zero(); db * db];
        for i in 0..db {
            for j in 0..db {
                let v = compensated_sum((0..db).map(|l| s(i, l) * s(j, l)));
                b[i * db + j] = if i == j { v - T::one() } else { v };
            }
        }
        b
    }

    /// Eigenvalues `b(j)` of [`b_matrix`](Self::b_matrix).
    pub fn b_eigenvalues(&self, node: usize) -> Result<Vec<T>> {
        let db = self.grid.region_size();
        symmetric_eigenvalues(&self.b_matrix(node), db)
    }

    pub fn planck(&self) -> &PlanckRule<T> {
        &self.planck
    }
}

#[inline]
fn kernel<T: Scalar>(v: &[[T; 3]], sq: &[T], n: usize, m: usize) -> T {
    let (a, b) = (v[n], v[m]);
    let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sq[n] * sq[m] * (T::one() + c * c).sqrt() * (a[2] - b[2])
}

impl<T: Scalar> Overlap<T> for DipoleModel<T> {
    fn dimension(&self) -> usize {
        self.grid.len()
    }

    fn in_region(&self, n: usize) -> bool {
        self.grid.inside[n]
    }

    fn spectral_weights(&self) -> &[T] {
        &self.planck.weights
    }

    fn deviation(&self, node: usize, n: usize, m: usize) -> Complex<T> {
        let e = self.eps[node];
        if n == m {
            let row = if self.grid.inside[n] { self.row_all[n] } else { self.full_row(n) };
            Complex::new(-lit::<T>(0.5) * e * e * row, T::zero())
        } else {
            Complex::new(e * self.kernel_nm(n, m), T::zero())
        }
    }

    fn region_row_norm_sq(&self, node: usize, n: usize) -> T {
        let e = self.eps[node];
        let d = self.deviation(node, n, n).norm_sqr();
        let off = if self.grid.inside[n] {
            self.row_region[n]
        } else {
            compensated_sum(self.grid.region_indices().map(|m| {
                let k = self.kernel_nm(n, m);
                k * k
            }))
        };
        e * e * off + d
    }
}

impl<T: Scalar> DipoleModel<T> {
    fn full_row(&self, n: usize) -> T {
        compensated_sum((0..self.grid.len()).map(|m| {
            let k = self.kernel_nm(n, m);
            k * k
        }))
    }
}

/// A spectrum with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub levels: Vec<T>,
    pub multiplicities: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn from_values(levels: Vec<T>) -> Self {
        let multiplicities = vec![T::one(); levels.len()];
        Self { levels, multiplicities }
    }

    pub fn total(&self) -> T {
        compensated_sum(self.levels.iter().zip(&self.multiplicities).map(|(&l, &m)| l * m))
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn dimension(&self) -> T {
        compensated_sum(self.multiplicities.iter().copied())
    }
}

/// Exact fragment spectrum `λ_{J,±} = [1 ± Π_i √(1 + b(j_i))] / (2 D_B^{fN})`
/// over all `J ∈ {1..D_B}^{fN}`, grouped by how often each `b(j)` occurs.
pub fn fragment_eigenvalues<T: Scalar>(b: &[T], fragment_photons: usize, cap: f64) -> Result<Spectrum<T>> {
    let d = b.len();
    if d == 0 {
        return Err(domain("D_B", 0.0, "D_B >= 1"));
    }
    if fragment_photons == 0 {
        return Err(domain("fN", 0.0, "fN >= 1"));
    }
    for &x in b {
        if !(x >= -T::one()) || !x.is_finite() {
            return Err(domain("b", x, "1 + b >= 0"));
        }
    }
    let requested = (d as f64).powi(fragment_photons as i32);
    if requested > cap {
        return Err(Error::ResourceCap { requested, cap });
    }
    let ln_root: Vec<T> = b.iter().map(|&x| lit::<T>(0.5) * x.ln_1p()).collect();
    let norm = T::one() / (lit::<T>(2.0) * count::<T>(d).powi(fragment_photons as i32));
    let ln_fact: Vec<f64> = (0..=fragment_photons)
        .scan(0.0f64, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut levels = Vec::new();
    let mut mults = Vec::new();
    let mut parts = vec![0usize; d];
    compositions(fragment_photons, 0, &mut parts, &mut |c| {
        let ln_prod: T = compensated_sum(c.iter().zip(&ln_root).filter(|(&k, _)| k > 0).map(|(&k, &l)| count::<T>(k) * l));
        let prod = ln_prod.exp();
        let ln_mult = ln_fact[fragment_photons] - c.iter().map(|&k| ln_fact[k]).sum::<f64>();
        let mult = lit::<T>(ln_mult.exp().round());
        levels.push(norm * (T::one() + prod));
        mults.push(mult);
        levels.push(norm * (T::one() - prod));
        mults.push(mult);
    });
    Ok(Spectrum { levels, multiplicities: mults })
}

fn compositions(remaining: usize, idx: usize, parts: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    if idx + 1 == parts.len() {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for k in (0..=remaining).rev() {
        parts[idx] = k;
        compositions(remaining - k, idx + 1, parts, visit);
    }
    parts[idx] = 0;
}

/// `−Σ λ ln λ` with multiplicities. Rejects spectra that do not sum to one
/// within `1e-10`.
pub fn fragment_entropy_exact<T: Scalar>(spectrum: &Spectrum<T>) -> Result<Nats<T>> {
    let total = spectrum.total();
    if !((total - T::one()).abs() <= lit(SPECTRUM_TOL)) {
        return Err(Error::Unnormalized(total.to_f64().unwrap_or(f64::NAN)));
    }
    if let Some(&min) = spectrum.levels.iter().min_by(|a, b| a.partial_cmp(b).expect("finite")) {
        if min < -lit::<T>(SPECTRUM_TOL) {
            return Err(Error::NotPositiveSemidefinite(min.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(Nats(compensated_sum(
        spectrum.levels.iter().zip(&spectrum.multiplicities).map(|(&l, &m)| m * xlnx_neg(l)),
    )))
}

/// Exact fragment entropy change `H − fN ln D_B` from the eigenvalues `b(j)`.
pub fn fragment_entropy_change_exact<T: Scalar>(b: &[T], fragment_photons: usize, cap: f64) -> Result<Nats<T>> {
    let spectrum = fragment_eigenvalues(b, fragment_photons, cap)?;
    let h = fragment_entropy_exact(&spectrum)?;
    Ok(Nats(h.value() - count::<T>(fragment_photons) * count::<T>(b.len()).ln()))
}

/// First-order prediction `ln 2 − h(e^{fN·z})` with `z = mean b(j) ≤ 0`.
pub fn fragment_entropy_change_analytic<T: Scalar>(b: &[T], fragment_photons: usize) -> Result<Nats<T>> {
    if b.is_empty() {
        return Err(domain("D_B", 0.0, "D_B >= 1"));
    }
    let z = compensated_sum(b.iter().copied()) / count::<T>(b.len());
    if z > T::zero() {
        return Err(domain("mean b", z, "<= 0"));
    }
    Ok(Nats(T::LN_2() - h_unchecked((count::<T>(fragment_photons) * z).exp())))
}

/// The finite environment: eigenvalues `b(j)` of `B` and the photon count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEnv<T> {
    pub b: Vec<T>,
    pub fragment_photons: usize,
}

impl<T: Scalar> DiscreteEnv<T> {
    pub fn new(b: Vec<T>, fragment_photons: usize) -> Result<Self> {
        if b.is_empty() {
            return Err(domain("D_B", 0.0, "D_B >= 1"));
        }
        if fragment_photons == 0 {
            return Err(domain("fN", 0.0, "fN >= 1"));
        }
        Ok(Self { b, fragment_photons })
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { b: self.b.iter().map(|&x| x * factor).collect(), fragment_photons: self.fragment_photons }
    }

    pub fn exact(&self, cap: f64) -> Result<Nats<T>> {
        fragment_entropy_change_exact(&self.b, self.fragment_photons, cap)
    }

    pub fn analytic(&self) -> Result<Nats<T>> {
        fragment_entropy_change_analytic(&self.b, self.fragment_photons)
    }

    pub fn discrepancy(&self, cap: f64) -> Result<T> {
        Ok((self.exact(cap)?.value() - self.analytic()?.value()).abs())
    }
}

/// Exact mutual information `E(f) + E(1) − E(1−f)` where `E(w)` is the entropy
/// of the matrix `[√(p_a p_b) Γ_ab^{w/2}]`.
///
/// The exponent `w/2` makes the two-branch case reproduce the spectrum
/// `(1 ± Γ^{w/2})/2`, i.e. entropy `ln 2 − h(Γ^w)`.
pub fn mi_exact_general<T: Scalar>(gamma: &GammaMatrix<T>, p: &[T], f: T) -> Result<Nats<T>> {
    validate_probabilities(p)?;
    check_closed("f", f, T::zero(), T::one(), "[0, 1]")?;
    let m = p.len();
    if gamma.size() != m {
        return Err(Error::Config { key: "gamma".into(), message: "size does not match the branch count".into() });
    }
    let half = lit::<T>(0.5);
    let entropy = |w: T| -> Result<T> {
        let mut a = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                let coherence = if i == j { T::one() } else { gamma.get(i, j).pow(half * w) };
                a[i * m + j] = (p[i] * p[j]).sqrt() * coherence;
            }
        }
        let eig = symmetric_eigenvalues(&a, m)?;
        Ok(spectrum_entropy(&eig, lit(1e-12))?.value())
    };
    let v = entropy(f)? + entropy(T::one())? - entropy(T::one() - f)?;
    Ok(Nats(v.max(T::zero())))
}

/// Convenience: exact MI for a uniform factor.
pub fn mi_exact_uniform<T: Scalar>(gamma: DecoherenceFactor<T>, p: &[T], f: T) -> Result<Nats<T>> {
    mi_exact_general(&GammaMatrix::uniform(p.len(), gamma)?, p, f)
}

/// Observed order `log(e₁/e₂)/log(h₁/h₂)` from two errors at two resolutions.
pub fn observed_order(e1: f64, e2: f64, refinement: f64) -> f64 {
    (e1 / e2).ln() / refinement.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::information::mutual_information;
    use crate::radiometry::photon_number_density;
    use crate::receptivity::alpha_disk;
    use crate::series::h;
    use crate::superposition::{mi_mway, mi_unbalanced};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn g(t: f64) -> DecoherenceFactor<f64> {
        DecoherenceFactor::from_time(t).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let ones = vec![Complex::new(1.0, 0.0); 4];
        assert_eq!(discrete_gamma(&ones, &[1.0; 4]).unwrap(), 1.0);
        let damp = vec![Complex::new(0.99, 0.0); 3];
        assert_abs_diff_eq!(discrete_gamma(&damp, &[0.2, 0.3, 0.5]).unwrap(), 0.9801, epsilon = 1e-15);
        assert!(discrete_gamma(&[Complex::new(1.5, 0.0)], &[1.0]).is_err());
        assert!(discrete_gamma(&ones, &[1.0]).is_err());
    }

    #[test]
    fn diagonal_element_properties() {
        let s = Scenario::new(1e-6, 4.0, 1e-6, 300.0, SkyRegion::Isotropic).unwrap();
        let k = s.thermal_wavenumber() * 3.0;
        let one: f64 = matrix_element_diag(k, 0.0, 1e-3, &s, 1e300).unwrap();
        assert!((1.0 - one).abs() < 1e-200);
        let v = 1e-9;
        let d0 = 1.0 - matrix_element_diag(k, 0.0, 1e-3, &s, v).unwrap();
        let d90 = 1.0 - matrix_element_diag(k, PI / 2.0, 1e-3, &s, v).unwrap();
        assert_abs_diff_eq!(d90 / d0, 3.0 / 14.0, epsilon = 1e-12);
        let d2 = 1.0 - matrix_element_diag(k, 0.0, 2e-3, &s, v).unwrap();
        assert_abs_diff_eq!(d2 / d0, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn discrete_gamma_reproduces_rate() {
        let region = SkyRegion::disk(1.0, 0.6).unwrap();
        let s = Scenario::new(1e-6, 4.0, 1e-6, 300.0, region.clone()).unwrap();
        let grid = SphereGrid::for_region(&region, 32, 64).unwrap();
        let planck = PlanckRule::standard();
        let tau = s.decoherence_rate(Default::default()).unwrap().tau_d_inv;
        let t = 1.0 / tau;
        let rate: f64 = discrete_decoherence_rate(&s, &grid, &planck, t, 1e6).unwrap();
        // The grid represents the region exactly in area but only to second
        // order in its angular weighting.
        assert!((rate / tau - 1.0).abs() < 1e-3, "{rate} vs {tau}");
        assert!(photon_number_density(300.0, region.solid_angle()).unwrap() > 0.0);
    }

    #[test]
    fn fragment_spectrum_trivial_cases() {
        let sp = fragment_eigenvalues(&[0.0, 0.0, 0.0], 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_abs_diff_eq!(sp.total(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sp.dimension(), 18.0);
        let hh = fragment_entropy_exact(&sp).unwrap().value();
        assert_abs_diff_eq!(hh, 2.0 * 3f64.ln(), epsilon = 1e-14);
        let env = DiscreteEnv::new(vec![0.0; 3], 2).unwrap();
        assert_abs_diff_eq!(env.exact(DEFAULT_ENUMERATION_CAP).unwrap().value(), 0.0, epsilon = 1e-14);

        let b1: f64 = -0.3;
        let sp = fragment_eigenvalues(&[b1, 0.0], 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let r = (1.0 + b1).sqrt();
        assert_abs_diff_eq!(sp.levels[0], (1.0 + r) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sp.levels[1], (1.0 - r) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn fragment_spectrum_matches_brute_force() {
        let b: [f64; 3] = [-0.02, -0.01, -0.005];
        let n = 3;
        let sp = fragment_eigenvalues(&b, n, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut brute = Vec::new();
        for i in 0..27usize {
            let j = [i % 3, (i / 3) % 3, i / 9];
            let p: f64 = j.iter().map(|&k| (1.0 + b[k]).sqrt()).product();
            brute.push((1.0 + p) / 54.0);
            brute.push((1.0 - p) / 54.0);
        }
        let e1 = fragment_entropy_exact(&sp).unwrap().value();
        let e2 = fragment_entropy_exact(&Spectrum::from_values(brute)).unwrap().value();
        assert_abs_diff_eq!(e1, e2, epsilon = 1e-13);
        assert_abs_diff_eq!(sp.dimension(), 54.0);
    }

    #[test]
    fn fragment_discrepancy_is_first_order() {
        let env = DiscreteEnv::new(vec![-0.02, -0.01, -0.005], 2).unwrap();
        let e: Vec<f64> = (0..5)
            .map(|k| env.scaled(0.5f64.powi(k)).discrepancy(DEFAULT_ENUMERATION_CAP).unwrap())
            .collect();
        assert_abs_diff_eq!(e[0], 2.28e-4, epsilon = 1e-5);
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.4..=2.1).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn uniform_b_has_no_discrepancy() {
        // Equal b(j): the exact spectrum is two-valued and matches exactly when
        // fN·ln(1+b) ≈ fN·b, i.e. to first order in b.
        let env = DiscreteEnv::new(vec![-1e-3; 4], 3).unwrap();
        let exact = env.exact(DEFAULT_ENUMERATION_CAP).unwrap().value();
        let expected = LN_2 - h((1.0f64 - 1e-3).powi(3)).unwrap().value();
        assert_abs_diff_eq!(exact, expected, epsilon = 1e-12);
    }

    #[test]
    fn enumeration_cap() {
        let b = vec![-0.01; 10];
        assert!(matches!(fragment_eigenvalues(&b, 8, DEFAULT_ENUMERATION_CAP), Err(Error::ResourceCap { .. })));
        assert!(fragment_eigenvalues(&b, 7, DEFAULT_ENUMERATION_CAP).is_ok());
        assert!(fragment_eigenvalues(&[-2.0], 1, DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        assert!(matches!(
            fragment_entropy_exact(&Spectrum::from_values(vec![0.5, 0.6])),
            Err(Error::Unnormalized(_))
        ));
        let uniform = Spectrum::from_values(vec![0.25; 4]);
        assert_abs_diff_eq!(fragment_entropy_exact(&uniform).unwrap().value(), 4f64.ln(), epsilon = 1e-15);
        assert_eq!(fragment_entropy_exact(&Spectrum::from_values(vec![1.0, 0.0])).unwrap().value(), 0.0);
    }

    #[test]
    fn mi_exact_reproduces_closed_forms() {
        for &(t, f) in &[(0.3, 0.2), (5.0, 0.7), (40.0, 0.1)] {
            let two = mi_exact_uniform(g(t), &[0.5, 0.5], f).unwrap().value();
            assert_abs_diff_eq!(two, mutual_information(g(t), 1.0, f).unwrap().value(), epsilon = 1e-10);
            let three = mi_exact_uniform(g(t), &[1.0 / 3.0; 3], f).unwrap().value();
            assert_abs_diff_eq!(three, mi_mway(g(t), f, 3).unwrap().value(), epsilon = 1e-10);
            let mu: f64 = 0.36;
            let p = [0.5 * (1.0 + mu.sqrt()), 0.5 * (1.0 - mu.sqrt())];
            let unb = mi_exact_uniform(g(t), &p, f).unwrap().value();
            assert_abs_diff_eq!(unb, mi_unbalanced(g(t), f, mu).unwrap().value(), epsilon = 1e-10);
        }
        assert_eq!(mi_exact_uniform(g(3.0), &[1.0, 0.0], 0.4).unwrap().value(), 0.0);
    }

    #[test]
    fn alpha_limits() {
        let planck = PlanckRule::standard();
        let full = DipoleModel::new(SphereGrid::for_disk(PI, 0.0, 8, 16).unwrap(), planck.clone(), DEFAULT_DIPOLE_STRENGTH);
        assert!(discrete_alpha(&full).unwrap().abs() < 1e-9);
        let mut single = SphereGrid::for_disk(PI, 0.0, 8, 16).unwrap();
        for (i, v) in single.inside.iter_mut().enumerate() {
            *v = i == 37;
        }
        let point = DipoleModel::new(single, planck.clone(), DEFAULT_DIPOLE_STRENGTH);
        assert_abs_diff_eq!(discrete_alpha(&point).unwrap(), 1.0, epsilon = 1e-6);
        let none = DipoleModel::new(SphereGrid::for_disk(1.0, 0.0, 8, 16).unwrap(), planck, 0.0);
        assert!(matches!(discrete_alpha(&none), Err(Error::Undefined(_))));
    }

    #[test]
    fn alpha_converges_for_hemisphere() {
        let planck = PlanckRule::standard();
        let exact = alpha_disk(PI / 2.0, 0.0).unwrap();
        let err = |bands: usize| {
            let grid = SphereGrid::for_disk(PI / 2.0, 0.0, bands, 2 * bands).unwrap();
            let a = discrete_alpha(&DipoleModel::new(grid, planck.clone(), DEFAULT_DIPOLE_STRENGTH)).unwrap();
            (a - exact).abs()
        };
        let (e1, e2) = (err(8), err(16));
        assert!(e2 < e1);
        assert!(observed_order(e1, e2, 4.0) >= 0.9, "{e1} {e2}");
    }

    #[test]
    fn b_matrix_trace_is_z() {
        let grid = SphereGrid::for_disk(1.2, 0.3, 6, 6).unwrap();
        let model = DipoleModel::new(grid, PlanckRule::new(8).unwrap(), 1e-3);
        let b = model.b_eigenvalues(2).unwrap();
        let db = b.len() as f64;
        let z: f64 = b.iter().sum::<f64>() / db;
        let direct: f64 = model
            .grid
            .region_indices()
            .map(|n| 2.0 * model.deviation(2, n, n).re + model.region_row_norm_sq(2, n))
            .sum::<f64>()
            / db;
        assert_relative_eq!(z, direct, max_relative = 1e-12);
        assert!(z < 0.0);
        assert!(b.iter().all(|&x| x <= 1e-15 && x >= -1.0), "{b:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn spectrum_normalized(b in prop::collection::vec(-0.5f64..0.0, 1..6), n in 1usize..5) {
            let sp = fragment_eigenvalues(&b, n, DEFAULT_ENUMERATION_CAP).unwrap();
            prop_assert!((sp.total() - 1.0).abs() < 1e-12);
        }
    }
}
