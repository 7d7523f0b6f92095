//! Scenario files: `key = value` lines, `#` comments.
//!
//! ```text
//! radius_m        = 1e-6
//! permittivity    = 4
//! dx_m            = 1e-6
//! temperature_K   = 300
//! region          = disk:60:0        # or point:<deg> | isotropic | custom:<path>
//! irradiance_W_m2 = 10               # point sources only
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::radiometry::Scenario;
use crate::scalar::{lit, Scalar};
use crate::sky::{CustomRegion, Disk, SkyRegion};

const KEYS: [&str; 7] = [
    "radius_m",
    "permittivity",
    "dx_m",
    "temperature_K",
    "region",
    "irradiance_W_m2",
    "strict_literal_radius",
];

fn err(key: &str, message: impl Into<String>) -> Error {
    Error::Config { key: key.into(), message: message.into() }
}

/// Raw key–value pairs, rejecting unknown and duplicate keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(&format!("line {}", i + 1), "expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(err(k, "unknown key"));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(err(k, "given more than once"));
        }
    }
    Ok(out)
}

fn number<T: Scalar>(key: &str, value: &str) -> Result<T> {
    let v: f64 = value.parse().map_err(|_| err(key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(key, "must be finite"));
    }
    Ok(lit(v))
}

/// Parses a region string such as `disk:60:0`. Custom paths are resolved against `base`.
pub fn parse_region<T: Scalar>(spec: &str, base: Option<&Path>) -> Result<SkyRegion<T>> {
    let key = "region";
    let mut parts = spec.splitn(2, ':');
    let kind = parts.next().unwrap_or("").trim();
    let rest = parts.next().map(str::trim);
    match (kind, rest) {
        ("isotropic", None) => Ok(SkyRegion::Isotropic),
        ("disk", Some(args)) => {
            let v: Vec<&str> = args.split(':').map(str::trim).collect();
            let [t, c] = v[..] else {
                return Err(err(key, "expected disk:<theta0_deg>:<chi_deg>"));
            };
            let theta0: T = number(key, t)?;
            let chi: T = number(key, c)?;
            Disk::from_degrees(theta0, chi)
                .map(SkyRegion::Disk)
                .map_err(|e| err(key, e.to_string()))
        }
        ("point", Some(t)) => {
            let theta: T = number(key, t)?;
            if !(theta >= T::zero() && theta <= lit(180.0)) {
                return Err(err(key, "point angle must lie in [0, 180] degrees"));
            }
            SkyRegion::point_at(theta.to_radians()).map_err(|e| err(key, e.to_string()))
        }
        ("custom", Some(p)) if !p.is_empty() => {
            let path = PathBuf::from(p);
            let path = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path,
            };
            let region = CustomRegion::load(&path).map_err(|e| match e {
                Error::Config { key: k, message } => err(key, format!("{}: {k}: {message}", path.display())),
                other => err(key, other.to_string()),
            })?;
            Ok(SkyRegion::Custom(region))
        }
        _ => Err(err(key, format!("`{spec}` is not disk:<deg>:<deg>, point:<deg>, isotropic or custom:<path>"))),
    }
}

/// Parses a scenario from text. `base` resolves relative custom-region paths.
pub fn parse_scenario<T: Scalar>(text: &str, base: Option<&Path>) -> Result<Scenario<T>> {
    let pairs = parse_pairs(text)?;
    let get = |k: &str| pairs.get(k).ok_or_else(|| err(k, "missing"));
    let positive = |k: &str| -> Result<T> {
        let v: T = number(k, get(k)?)?;
        if v > T::zero() {
            Ok(v)
        } else {
            Err(err(k, "must be positive"))
        }
    };
    let radius = positive("radius_m")?;
    let dx = positive("dx_m")?;
    let temperature = positive("temperature_K")?;
    let permittivity: T = number("permittivity", get("permittivity")?)?;
    if !(permittivity > T::one()) {
        return Err(err("permittivity", "must exceed 1"));
    }
    let region = parse_region(get("region")?, base)?;
    let mut scenario = Scenario::new(radius, permittivity, dx, temperature, region)
        .map_err(|e| err("scenario", e.to_string()))?;
    if pairs.contains_key("irradiance_W_m2") {
        scenario = scenario
            .with_irradiance(positive("irradiance_W_m2")?)
            .map_err(|e| err("irradiance_W_m2", e.to_string()))?;
    }
    if let Some(v) = pairs.get("strict_literal_radius") {
        scenario.strict_literal_radius = match v.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(err("strict_literal_radius", "expected true or false")),
        };
        scenario.effective_radius().map_err(|e| err("strict_literal_radius", e.to_string()))?;
    }
    Ok(scenario)
}

/// Reads and parses a scenario file.
pub fn load_scenario<T: Scalar>(path: &Path) -> Result<Scenario<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, path.parent())
}
