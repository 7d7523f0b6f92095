//! Sky regions and integration over the sphere of photon directions.
//!
//! Directions are expressed in a frame whose polar axis is the separation
//! direction `Δx̂`, so `cos θ` of a [`Direction`] is its projection onto
//! the separation. Disks carry their own tilt `χ` relative to that axis and
//! are integrated in their own frame, which keeps the disk edge on a
//! coordinate line of the product rule.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, Error, Result};
use crate::quadrature::{azimuth_rule, gauss_legendre_on};
use crate::scalar::{compensated_sum, count, lit, Scalar};

/// Unit vector on the sphere, stored as `(cos θ, φ)` about the `Δx̂` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction<T> {
    pub cos_theta: T,
    pub phi: T,
}

impl<T: Scalar> Direction<T> {
    pub fn new(cos_theta: T, phi: T) -> Result<Self> {
        check_closed("cos_theta", cos_theta, -T::one(), T::one(), "[-1, 1]")?;
        if !phi.is_finite() {
            return Err(crate::error::domain("phi", phi, "finite"));
        }
        Ok(Self { cos_theta, phi })
    }

    /// Direction at polar angle `theta` (radians) from `Δx̂`.
    pub fn from_angles(theta: T, phi: T) -> Result<Self> {
        Self::new(theta.cos(), phi)
    }

    /// The separation axis itself.
    pub fn axis() -> Self {
        Self { cos_theta: T::one(), phi: T::zero() }
    }

    pub fn from_vector(v: [T; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > T::zero()) {
            return Err(crate::error::domain("|v|", norm, "> 0"));
        }
        let c = (v[2] / norm).max(-T::one()).min(T::one());
        Ok(Self { cos_theta: c, phi: v[1].atan2(v[0]) })
    }

    pub fn to_vector(self) -> [T; 3] {
        let s = (T::one() - self.cos_theta * self.cos_theta).max(T::zero()).sqrt();
        [s * self.phi.cos(), s * self.phi.sin(), self.cos_theta]
    }

    pub fn dot(self, other: Self) -> T {
        let a = self.to_vector();
        let b = other.to_vector();
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn antipode(self) -> Self {
        Self { cos_theta: -self.cos_theta, phi: self.phi + T::PI() }
    }
}

/// Angular factor of the distinguishability kernel `|g(n̂, m̂)|²`:
/// `(1 + cos²θ_{n,m}) (cos θ_{Δx,n} − cos θ_{Δx,m})²`.
///
/// `dx` is the separation direction; in the crate's standard frame that is
/// [`Direction::axis`].
pub fn g2_weight<T: Scalar>(n: Direction<T>, m: Direction<T>, dx: Direction<T>) -> T {
    let nm = n.dot(m);
    let d = n.dot(dx) - m.dot(dx);
    (T::one() + nm * nm) * d * d
}

#[inline(always)]
fn g2_kernel<T: Scalar>(x1: T, y1: T, z1: T, x2: T, y2: T, z2: T) -> T {
    let c = x1 * x2 + y1 * y2 + z1 * z2;
    let d = z1 - z2;
    (T::one() + c * c) * d * d
}

/// Points per panel of the product rule: Gauss–Legendre in `cos θ` times the
/// midpoint rule in `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureOrder {
    pub n_cos: usize,
    pub n_phi: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        Self { n_cos: 64, n_phi: 128 }
    }
}

impl QuadratureOrder {
    pub fn new(n_cos: usize, n_phi: usize) -> Result<Self> {
        if n_cos < 2 {
            return Err(Error::Order(n_cos));
        }
        if n_phi < 2 {
            return Err(Error::Order(n_phi));
        }
        Ok(Self { n_cos, n_phi })
    }

    /// `n` points in `cos θ` and `2n` in `φ`.
    pub fn from_points(n: usize) -> Result<Self> {
        Self::new(n, 2 * n)
    }

    fn validate(self) -> Result<Self> {
        Self::new(self.n_cos, self.n_phi)
    }
}

/// Quadrature nodes as Cartesian unit vectors in the `Δx̂` frame, with weights.
#[derive(Debug, Clone, Default)]
pub struct NodeSet<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Scalar> NodeSet<T> {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    fn push(&mut self, v: [T; 3], w: T) {
        self.x.push(v[0]);
        self.y.push(v[1]);
        self.z.push(v[2]);
        self.w.push(w);
    }

    fn extend(&mut self, other: NodeSet<T>) {
        self.x.extend(other.x);
        self.y.extend(other.y);
        self.z.extend(other.z);
        self.w.extend(other.w);
    }

    pub fn total_weight(&self) -> T {
        compensated_sum(self.w.iter().copied())
    }

    pub fn direction(&self, i: usize) -> Direction<T> {
        Direction {
            cos_theta: self.z[i],
            phi: self.y[i].atan2(self.x[i]),
        }
    }

    /// `Σ w f(node)`.
    pub fn integrate<F: Fn(Direction<T>) -> T>(&self, f: F) -> T {
        compensated_sum((0..self.len()).map(|i| self.w[i] * f(self.direction(i))))
    }

    /// `Σ w (3 + 11 cos²θ)`, the decoherence-rate integrand.
    pub fn rate_moment(&self) -> T {
        let three = lit::<T>(3.0);
        let eleven = lit::<T>(11.0);
        compensated_sum(
            self.z
                .iter()
                .zip(&self.w)
                .map(|(&z, &w)| w * (three + eleven * z * z)),
        )
    }

    /// `∫_A dn ∫_B dm g2(n, m)` with `A = self`, `B = other`.
    pub fn g2_double_integral(&self, other: &NodeSet<T>) -> T {
        compensated_sum((0..self.len()).map(|i| {
            let (x1, y1, z1) = (self.x[i], self.y[i], self.z[i]);
            let mut inner = T::zero();
            for j in 0..other.len() {
                inner = inner + other.w[j] * g2_kernel(x1, y1, z1, other.x[j], other.y[j], other.z[j]);
            }
            self.w[i] * inner
        }))
    }

    /// `∫_A dn ∫_A dm g2(n, m)` using the symmetry of the kernel.
    pub fn g2_self_integral(&self) -> T {
        let two = lit::<T>(2.0);
        compensated_sum((0..self.len()).map(|i| {
            let (x1, y1, z1) = (self.x[i], self.y[i], self.z[i]);
            let mut inner = T::zero();
            for j in (i + 1)..self.len() {
                inner = inner + self.w[j] * g2_kernel(x1, y1, z1, self.x[j], self.y[j], self.z[j]);
            }
            two * self.w[i] * inner
        }))
    }
}

/// Product rule over the spherical cap `cos ϑ ∈ [c_lo, c_hi]` of a frame whose
/// polar axis makes angle `tilt` with `Δx̂` (rotation about the `y` axis).
fn cap_panel<T: Scalar>(c_lo: T, c_hi: T, tilt: T, order: QuadratureOrder) -> Result<NodeSet<T>> {
    let mut set = NodeSet::default();
    if !(c_hi > c_lo) {
        return Ok(set);
    }
    let (cs, wc) = gauss_legendre_on(order.n_cos, c_lo, c_hi)?;
    let (phis, wphi) = azimuth_rule::<T>(order.n_phi)?;
    let (st, ct) = tilt.sin_cos();
    let trig: Vec<(T, T)> = phis.iter().map(|p| p.sin_cos()).collect();
    for (&c, &w) in cs.iter().zip(&wc) {
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        for &(sp, cp) in &trig {
            let (xp, yp, zp) = (s * cp, s * sp, c);
            let v = [ct * xp + st * zp, yp, -st * xp + ct * zp];
            set.push(v, w * wphi);
        }
    }
    Ok(set)
}

/// The whole sphere as a single product-rule panel in the `Δx̂` frame.
pub fn sphere_nodes<T: Scalar>(order: QuadratureOrder) -> Result<NodeSet<T>> {
    cap_panel(-T::one(), T::one(), T::zero(), order.validate()?)
}

/// Integrates `f` over the whole sphere. Exact up to rounding for
/// polynomials in `cos θ` of degree below `2·n_cos`.
pub fn integrate_sphere<T: Scalar, F: Fn(Direction<T>) -> T>(f: F, order: QuadratureOrder) -> Result<T> {
    Ok(sphere_nodes(order)?.integrate(f))
}

/// Disk (spherical cap) of half-angle `theta0` centred on a direction at
/// angle `chi` from `Δx̂`. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk<T> {
    pub theta0: T,
    pub chi: T,
}

impl<T: Scalar> Disk<T> {
    pub fn new(theta0: T, chi: T) -> Result<Self> {
        check_closed("theta0", theta0, T::zero(), T::PI(), "[0, pi]")?;
        check_closed("chi", chi, T::zero(), T::PI(), "[0, pi]")?;
        Ok(Self { theta0, chi })
    }

    pub fn from_degrees(theta0: T, chi: T) -> Result<Self> {
        Self::new(theta0.to_radians(), chi.to_radians())
    }

    pub fn solid_angle(&self) -> T {
        T::TAU() * (T::one() - self.theta0.cos())
    }

    /// The complementary cap: centred on the antipode with half-angle `π − θ₀`.
    pub fn complement(&self) -> Self {
        Self { theta0: T::PI() - self.theta0, chi: T::PI() - self.chi }
    }

    pub fn contains(&self, d: Direction<T>) -> bool {
        let axis = Direction { cos_theta: self.chi.cos(), phi: T::zero() };
        d.dot(axis) >= self.theta0.cos()
    }
}

/// Indicator of a region sampled on a rectangular `(cos θ, φ)` grid.
///
/// Each sample stands for a cell of area `(2/rows)(2π/cols)`, so boundaries
/// are resolved only to first order in the grid spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomRegion<T> {
    cos_values: Vec<T>,
    phi_values: Vec<T>,
    /// Row-major `rows × cols` indicator.
    inside: Vec<bool>,
}

impl<T: Scalar> CustomRegion<T> {
    /// Builds a region from cell centres; `inside[r * cols + c]` is the value at
    /// `(cos_values[r], phi_values[c])`.
    pub fn new(cos_values: Vec<T>, phi_values: Vec<T>, inside: Vec<bool>) -> Result<Self> {
        if cos_values.is_empty() || phi_values.is_empty() {
            return Err(cfg_err("grid", "empty grid"));
        }
        if inside.len() != cos_values.len() * phi_values.len() {
            return Err(cfg_err("grid", "indicator length does not match rows × cols"));
        }
        if cos_values.iter().any(|c| !(c.abs() <= T::one())) {
            return Err(cfg_err("cos_theta", "values must lie in [-1, 1]"));
        }
        Ok(Self { cos_values, phi_values, inside })
    }

    /// Samples an indicator function on the midpoint grid with `rows × cols` cells.
    pub fn from_fn<F: Fn(Direction<T>) -> bool>(rows: usize, cols: usize, f: F) -> Result<Self> {
        let cos_values: Vec<T> = (0..rows)
            .map(|r| -T::one() + (count::<T>(r) + lit(0.5)) * lit::<T>(2.0) / count::<T>(rows))
            .collect();
        let phi_values: Vec<T> = (0..cols)
            .map(|c| (count::<T>(c) + lit(0.5)) * T::TAU() / count::<T>(cols))
            .collect();
        let mut inside = Vec::with_capacity(rows * cols);
        for &c in &cos_values {
            for &p in &phi_values {
                inside.push(f(Direction { cos_theta: c, phi: p }));
            }
        }
        Self::new(cos_values, phi_values, inside)
    }

    /// Parses the indicator file format: a header `# rows cols` followed by
    /// `rows × cols` lines `cos_theta phi value` with value `0` or `1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| cfg_err("header", "empty file"))?;
        let dims: Vec<usize> = header
            .strip_prefix('#')
            .ok_or_else(|| cfg_err("header", "expected `# rows cols`"))?
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| cfg_err("header", "expected `# rows cols`"))?;
        let [rows, cols] = dims[..] else {
            return Err(cfg_err("header", "expected `# rows cols`"));
        };
        if rows == 0 || cols == 0 {
            return Err(cfg_err("header", "rows and cols must be positive"));
        }
        let mut samples: Vec<(f64, f64, bool)> = Vec::with_capacity(rows * cols);
        for (idx, line) in lines {
            if line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || cfg_err(format!("line {}", idx + 1), "expected `cos_theta phi value`");
            if parts.len() != 3 {
                return Err(bad());
            }
            let c: f64 = parts[0].parse().map_err(|_| bad())?;
            let p: f64 = parts[1].parse().map_err(|_| bad())?;
            let v = match parts[2] {
                "0" => false,
                "1" => true,
                _ => return Err(cfg_err(format!("line {}", idx + 1), "value must be 0 or 1")),
            };
            samples.push((c, p, v));
        }
        if samples.len() != rows * cols {
            return Err(cfg_err(
                "grid",
                format!("expected {} samples, found {}", rows * cols, samples.len()),
            ));
        }
        let cos_values = distinct(samples.iter().map(|s| s.0));
        let phi_values = distinct(samples.iter().map(|s| s.1));
        if cos_values.len() != rows || phi_values.len() != cols {
            return Err(cfg_err("grid", "samples do not form the declared rectangular grid"));
        }
        let mut inside = vec![None; rows * cols];
        for (c, p, v) in samples {
            let r = nearest(&cos_values, c);
            let k = nearest(&phi_values, p);
            if inside[r * cols + k].replace(v).is_some() {
                return Err(cfg_err("grid", "duplicate grid point"));
            }
        }
        let inside = inside.into_iter().map(|v| v.unwrap_or(false)).collect();
        Self::new(
            cos_values.into_iter().map(lit).collect(),
            phi_values.into_iter().map(lit).collect(),
            inside,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Serializes back into the indicator file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {} {}\n", self.rows(), self.cols());
        for (r, c) in self.cos_values.iter().enumerate() {
            for (k, p) in self.phi_values.iter().enumerate() {
                let v = u8::from(self.inside[r * self.cols() + k]);
                out.push_str(&format!("{c} {p} {v}\n"));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.cos_values.len()
    }

    pub fn cols(&self) -> usize {
        self.phi_values.len()
    }

    fn cell_area(&self) -> T {
        lit::<T>(2.0) / count::<T>(self.rows()) * T::TAU() / count::<T>(self.cols())
    }

    pub fn complement(&self) -> Self {
        Self {
            cos_values: self.cos_values.clone(),
            phi_values: self.phi_values.clone(),
            inside: self.inside.iter().map(|v| !v).collect(),
        }
    }

    /// Value of the cell nearest to `d`.
    pub fn contains(&self, d: Direction<T>) -> bool {
        let r = nearest(&self.cos_values, d.cos_theta);
        let phi = wrap_tau(d.phi);
        // Azimuth is periodic: compare against each column modulo 2π.
        let mut best = 0;
        let mut best_gap = T::infinity();
        for (k, &p) in self.phi_values.iter().enumerate() {
            let mut gap = (wrap_tau(p) - phi).abs();
            gap = gap.min(T::TAU() - gap);
            if gap < best_gap {
                best_gap = gap;
                best = k;
            }
        }
        self.inside[r * self.cols() + best]
    }

    fn cells(&self, want: bool) -> NodeSet<T> {
        let mut set = NodeSet::default();
        let area = self.cell_area();
        for (r, &c) in self.cos_values.iter().enumerate() {
            for (k, &p) in self.phi_values.iter().enumerate() {
                if self.inside[r * self.cols() + k] == want {
                    set.push(Direction { cos_theta: c, phi: p }.to_vector(), area);
                }
            }
        }
        set
    }
}

fn cfg_err(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { key: key.into(), message: message.into() }
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite grid coordinates"));
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    v
}

fn wrap_tau<T: Scalar>(x: T) -> T {
    let r = x % T::TAU();
    if r < T::zero() { r + T::TAU() } else { r }
}

fn nearest<T: Scalar>(values: &[T], x: T) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if (v - x).abs() < (values[best] - x).abs() {
            best = i;
        }
    }
    best
}

/// The illuminated patch of sky.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkyRegion<T> {
    /// A single direction (solid angle zero).
    Point { direction: Direction<T> },
    Disk(Disk<T>),
    /// The whole sky.
    Isotropic,
    Custom(CustomRegion<T>),
}

/// Quadrature over a region and over its complement.
#[derive(Debug, Clone)]
pub struct RegionPanels<T> {
    pub inside: NodeSet<T>,
    pub outside: NodeSet<T>,
}

impl<T: Scalar> SkyRegion<T> {
    pub fn point_at(theta: T) -> Result<Self> {
        Ok(SkyRegion::Point { direction: Direction::from_angles(theta, T::zero())? })
    }

    pub fn disk(theta0: T, chi: T) -> Result<Self> {
        Ok(SkyRegion::Disk(Disk::new(theta0, chi)?))
    }

    /// Solid angle Ω in steradians. Custom regions are measured with their own
    /// cell quadrature.
    pub fn solid_angle(&self) -> T {
        match self {
            SkyRegion::Point { .. } => T::zero(),
            SkyRegion::Disk(d) => d.solid_angle(),
            SkyRegion::Isotropic => lit::<T>(4.0) * T::PI(),
            SkyRegion::Custom(c) => c.cells(true).total_weight(),
        }
    }

    pub fn contains(&self, d: Direction<T>) -> bool {
        match self {
            SkyRegion::Point { .. } => false,
            SkyRegion::Disk(disk) => disk.contains(d),
            SkyRegion::Isotropic => true,
            SkyRegion::Custom(c) => c.contains(d),
        }
    }

    /// Complementary region `𝕊 \ 𝔹` (up to sets of measure zero). The
    /// complement of the whole sky is the empty disk `θ₀ = 0`.
    pub fn complement(&self) -> Self {
        match self {
            SkyRegion::Point { .. } => SkyRegion::Isotropic,
            SkyRegion::Disk(d) => SkyRegion::Disk(d.complement()),
            SkyRegion::Isotropic => SkyRegion::Disk(Disk { theta0: T::zero(), chi: T::zero() }),
            SkyRegion::Custom(c) => SkyRegion::Custom(c.complement()),
        }
    }

    /// Product-rule nodes for the region and for its complement. Disks get one
    /// panel on each side of the edge `cos θ = cos θ₀` in their own frame.
    pub fn panels(&self, order: QuadratureOrder) -> Result<RegionPanels<T>> {
        let order = order.validate()?;
        Ok(match self {
            SkyRegion::Point { .. } => RegionPanels {
                inside: NodeSet::default(),
                outside: sphere_nodes(order)?,
            },
            SkyRegion::Isotropic => RegionPanels {
                inside: sphere_nodes(order)?,
                outside: NodeSet::default(),
            },
            SkyRegion::Disk(d) => {
                let edge = d.theta0.cos();
                RegionPanels {
                    inside: cap_panel(edge, T::one(), d.chi, order)?,
                    outside: cap_panel(-T::one(), edge, d.chi, order)?,
                }
            }
            SkyRegion::Custom(c) => RegionPanels {
                inside: c.cells(true),
                outside: c.cells(false),
            },
        })
    }

    /// All nodes of [`panels`](Self::panels) merged: a rule for the full sphere.
    pub fn sphere_from_panels(panels: &RegionPanels<T>) -> NodeSet<T> {
        let mut all = panels.inside.clone();
        all.extend(panels.outside.clone());
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_moments() {
        let order = QuadratureOrder::default();
        assert_relative_eq!(integrate_sphere(|_| 1.0, order).unwrap(), 4.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(
            integrate_sphere(|d: Direction<f64>| d.cos_theta.powi(2), order).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-13
        );
        let mean = integrate_sphere(|d: Direction<f64>| 3.0 + 11.0 * d.cos_theta.powi(2), order).unwrap() / (4.0 * PI);
        assert_relative_eq!(mean, 20.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn polynomial_exactness_at_low_order() {
        let order = QuadratureOrder::new(4, 4).unwrap();
        // Degree 6 in cos θ with n_cos = 4 is exact.
        let q = integrate_sphere(|d: Direction<f64>| d.cos_theta.powi(6), order).unwrap();
        assert_relative_eq!(q, 4.0 * PI / 7.0, max_relative = 1e-12);
    }

    #[test]
    fn order_below_two_rejected() {
        assert_eq!(QuadratureOrder::new(1, 8).unwrap_err(), Error::Order(1));
        assert!(integrate_sphere(|_| 1.0, QuadratureOrder { n_cos: 1, n_phi: 4 }).is_err());
    }

    #[test]
    fn solid_angles() {
        assert_relative_eq!(SkyRegion::disk(PI, 0.0).unwrap().solid_angle(), 4.0 * PI);
        assert_relative_eq!(SkyRegion::disk(PI / 2.0, 0.3).unwrap().solid_angle(), 2.0 * PI, max_relative = 1e-15);
        assert_eq!(SkyRegion::<f64>::point_at(0.4).unwrap().solid_angle(), 0.0);
        assert_relative_eq!(SkyRegion::<f64>::Isotropic.solid_angle(), 4.0 * PI);
    }

    #[test]
    fn disk_validation() {
        assert!(Disk::new(-0.1, 0.0).is_err());
        assert!(Disk::new(0.1, 3.2).is_err());
        assert!(Disk::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn g2_examples() {
        let ax = Direction::<f64>::axis();
        let n = Direction::from_angles(0.7, 1.1).unwrap();
        assert_eq!(g2_weight(n, n, ax), 0.0);
        // Antipodal pair along the separation: (1 + 1)(1 − (−1))² = 8.
        let up = Direction::new(1.0, 0.0).unwrap();
        let down = Direction::new(-1.0, 0.0).unwrap();
        assert_relative_eq!(g2_weight(up, down, ax), 8.0);
        // Both perpendicular to Δx̂.
        let a = Direction::new(0.0, 0.0).unwrap();
        let b = Direction::new(0.0, PI / 2.0).unwrap();
        assert!(g2_weight(a, b, ax).abs() < 1e-30);
    }

    #[test]
    fn custom_region_round_trip() {
        let disk = Disk::new(PI / 3.0, 0.0).unwrap();
        let region = CustomRegion::from_fn(40, 8, |d| disk.contains(d)).unwrap();
        let parsed = CustomRegion::<f64>::parse(&region.to_text()).unwrap();
        assert_eq!(parsed.inside, region.inside);
        assert_eq!(parsed.rows(), 40);
        assert_eq!(parsed.cols(), 8);
    }

    #[test]
    fn custom_region_parse_errors() {
        assert!(CustomRegion::<f64>::parse("").is_err());
        assert!(CustomRegion::<f64>::parse("2 2\n").is_err());
        let short = "# 2 1\n-0.5 0 1\n";
        assert!(matches!(CustomRegion::<f64>::parse(short), Err(Error::Config { .. })));
        let bad_value = "# 1 1\n0 0 2\n";
        assert!(CustomRegion::<f64>::parse(bad_value).is_err());
        let ok = "# 2 1\n-0.5 3.14 0\n0.5 3.14 1\n";
        let r = CustomRegion::<f64>::parse(ok).unwrap();
        assert_relative_eq!(SkyRegion::Custom(r).solid_angle(), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn custom_disk_area_is_first_order() {
        let disk = Disk::new(1.0, 0.0).unwrap();
        let exact = disk.solid_angle();
        let err = |rows| {
            let r = CustomRegion::<f64>::from_fn(rows, 16, |d| disk.contains(d)).unwrap();
            (SkyRegion::Custom(r).solid_angle() - exact).abs()
        };
        assert!(err(400) < 2.0 * PI * 2.0 / 400.0);
        assert!(err(400) <= err(25));
    }

    #[test]
    fn panels_cover_the_sphere() {
        for region in [
            SkyRegion::disk(0.9, 0.4).unwrap(),
            SkyRegion::disk(0.0, 0.0).unwrap(),
            SkyRegion::disk(PI, 1.0).unwrap(),
            SkyRegion::Isotropic,
            SkyRegion::point_at(0.2).unwrap(),
        ] {
            let p = region.panels(QuadratureOrder::new(16, 16).unwrap()).unwrap();
            assert_relative_eq!(p.inside.total_weight(), region.solid_angle(), epsilon = 1e-12);
            assert_relative_eq!(
                p.inside.total_weight() + p.outside.total_weight(),
                4.0 * PI,
                max_relative = 1e-13
            );
        }
    }

    proptest! {
        #[test]
        fn g2_is_symmetric(c1 in -1.0f64..=1.0, p1 in 0.0f64..6.3, c2 in -1.0f64..=1.0, p2 in 0.0f64..6.3) {
            let n = Direction::new(c1, p1).unwrap();
            let m = Direction::new(c2, p2).unwrap();
            let ax = Direction::axis();
            prop_assert_eq!(g2_weight(n, m, ax), g2_weight(m, n, ax));
            prop_assert!(g2_weight(n, m, ax) >= 0.0);
        }

        #[test]
        fn disk_indicator_integrates_to_cap_area(theta0 in 0.0f64..=PI, chi in 0.0f64..=PI) {
            let region = SkyRegion::disk(theta0, chi).unwrap();
            let p = region.panels(QuadratureOrder::new(8, 8).unwrap()).unwrap();
            prop_assert!((p.inside.total_weight() - 2.0 * PI * (1.0 - theta0.cos())).abs() < 1e-8);
        }
    }
}
