//! Decoherence, receptivity, mutual information and redundancy for a small
//! dielectric sphere in a superposition of two (or `M`) positions, illuminated
//! by blackbody radiation from an arbitrary patch of sky.
//!
//! The numerical core is generic over the scalar type ([`Scalar`], i.e. `f32`
//! or `f64`). Concrete `f64` aliases are provided at the crate root.
//!
//! Layers, bottom up:
//!
//! * [`series`]: the entropy kernel `h` and spectrum entropies.
//! * [`quadrature`], [`sky`]: one-dimensional rules, sky regions and
//!   product quadrature over the sphere.
//! * [`radiometry`]: SI rates for a [`Scenario`].
//! * [`receptivity`]: the receptivity `α` and redundancy rate.
//! * [`information`]: mutual information and redundancy of the two-branch
//!   superposition.
//! * [`superposition`]: unbalanced and `M`-branch superpositions.
//! * [`oracle`]: the finite directional model used as ground truth.

pub mod config;
pub mod error;
pub mod information;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod radiometry;
pub mod receptivity;
pub mod scalar;
pub mod series;
pub mod sky;
pub mod superposition;

pub use error::{Error, Result};
pub use information::{
    fragment_entropy_change, mutual_information, mutual_information_approx, pip_curve, redundancy_estimate,
    redundancy_exact, redundancy_lower_bound, redundancy_lower_bound_scaled, system_entropy, DecoherenceFactor,
    InfoParams, PipCurve,
};
pub use radiometry::{
    decoherence_factor, disk_rate, effective_radius, photon_number_density, RateResult, Scenario,
};
pub use receptivity::{alpha_disk, alpha_numeric, redundancy_rate, ReceptivityResult};
pub use scalar::Scalar;
pub use series::{binary_entropy_from_gap, h, m_spectrum_entropy, Nats};
pub use sky::{g2_weight, integrate_sphere, CustomRegion, Direction, Disk, QuadratureOrder, SkyRegion};
pub use superposition::{
    max_entropy, mi_interval_bounds, mi_mway, mi_mway_limit, mi_unbalanced, mi_unbalanced_limit, CatSpec,
    GammaMatrix, IntervalBounds,
};

pub type NatsF64 = Nats<f64>;
pub type DecoherenceFactorF64 = DecoherenceFactor<f64>;
pub type InfoParamsF64 = InfoParams<f64>;
pub type PipCurveF64 = PipCurve<f64>;
pub type DirectionF64 = Direction<f64>;
pub type DiskF64 = Disk<f64>;
pub type SkyRegionF64 = SkyRegion<f64>;
pub type CustomRegionF64 = CustomRegion<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type RateResultF64 = RateResult<f64>;
pub type ReceptivityResultF64 = ReceptivityResult<f64>;
pub type CatSpecF64 = CatSpec<f64>;
pub type GammaMatrixF64 = GammaMatrix<f64>;
pub type IntervalBoundsF64 = IntervalBounds<f64>;
pub type DiscreteEnvF64 = oracle::DiscreteEnv<f64>;
pub type SpectrumF64 = oracle::Spectrum<f64>;

pub type NatsF32 = Nats<f32>;
pub type DecoherenceFactorF32 = DecoherenceFactor<f32>;
pub type SkyRegionF32 = SkyRegion<f32>;
pub type ScenarioF32 = Scenario<f32>;
