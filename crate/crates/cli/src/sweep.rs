//! One-dimensional parameter grids.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    #[value(name = "t_over_tauD")]
    TOverTauD,
    #[value(name = "f")]
    F,
    #[value(name = "theta0")]
    Theta0,
    #[value(name = "chi")]
    Chi,
    #[value(name = "delta")]
    Delta,
    #[value(name = "mu")]
    Mu,
    #[value(name = "M")]
    M,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::TOverTauD => "t_over_tauD",
            Axis::F => "f",
            Axis::Theta0 => "theta0",
            Axis::Chi => "chi",
            Axis::Delta => "delta",
            Axis::Mu => "mu",
            Axis::M => "M",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A sampled range `start..=stop` with `count ≥ 2` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeError {
    pub key: &'static str,
    pub message: String,
}

impl Range {
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self, RangeError> {
        if count < 2 {
            return Err(RangeError { key: "count", message: format!("need at least 2 points, got {count}") });
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(RangeError { key: "start", message: "endpoints must be finite".into() });
        }
        if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
            return Err(RangeError { key: "spacing", message: "log spacing needs positive endpoints".into() });
        }
        Ok(Self { start, stop, count, spacing })
    }

    /// Grid values; the endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n {
                    return self.stop;
                }
                let s = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}
