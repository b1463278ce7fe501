//! Run configuration: defaults, flat `key = value` files, flag overrides.

use std::fs;
use std::path::Path;

use biharm_core::{ModelParams, Tier};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Immersion family for randomized identity sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Alternate quadratic and sine-bump graphs.
    Mixed,
    Quadratic,
    Sine,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixed" => Ok(Family::Mixed),
            "quadratic" => Ok(Family::Quadratic),
            "sine" => Ok(Family::Sine),
            _ => Err(format!("unknown family `{s}` (expected mixed, quadratic or sine)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub u: f64,
    pub v: f64,
    pub m: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub flat_limit: bool,
    /// Points per axis of the metric-check grid.
    pub grid: usize,
    /// Half-width of the metric-check box in every chart coordinate.
    pub domain: f64,
    pub seed: u64,
    /// Tier name or explicit number replacing every check tolerance.
    pub tol_tier: Option<String>,
    pub out: String,
    pub c_min: f64,
    pub c_max: f64,
    pub c_samples: usize,
    pub family: Family,
    pub immersions: usize,
    pub points: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub corrupt_jet: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            u: 1.0,
            v: 1.0,
            m: 2,
            t_min: None,
            t_max: None,
            flat_limit: false,
            grid: 10,
            domain: 2.0,
            seed: 0,
            tol_tier: None,
            out: "report.json".into(),
            c_min: 0.0,
            c_max: 2.0,
            c_samples: 400,
            family: Family::Mixed,
            immersions: 50,
            points: 20,
            corrupt_jet: 0.0,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("bad value `{value}` for `{key}`: {e}")))
}

impl RunConfig {
    pub const KEYS: [&'static str; 18] = [
        "u", "v", "m", "t_min", "t_max", "flat_limit", "grid", "domain", "seed", "tol_tier", "out", "c_min",
        "c_max", "c_samples", "family", "immersions", "points", "corrupt_jet",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "u" => self.u = parse(key, value)?,
            "v" => self.v = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "t_min" => self.t_min = Some(parse(key, value)?),
            "t_max" => self.t_max = Some(parse(key, value)?),
            "flat_limit" => self.flat_limit = parse(key, value)?,
            "grid" => self.grid = parse(key, value)?,
            "domain" => self.domain = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "tol_tier" => {
                tolerance_from(value)?;
                self.tol_tier = Some(value.to_string());
            }
            "out" => self.out = value.to_string(),
            "c_min" => self.c_min = parse(key, value)?,
            "c_max" => self.c_max = parse(key, value)?,
            "c_samples" => self.c_samples = parse(key, value)?,
            "family" => self.family = parse(key, value)?,
            "immersions" => self.immersions = parse(key, value)?,
            "points" => self.points = parse(key, value)?,
            "corrupt_jet" => self.corrupt_jet = parse(key, value)?,
            _ => return Err(CliError::config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.grid == 0 {
            return Err(CliError::config("grid must have at least one point per axis"));
        }
        if !(self.domain.is_finite() && self.domain > 0.0) {
            return Err(CliError::config("domain must be a positive half-width"));
        }
        if !(self.c_min < self.c_max) || self.c_samples == 0 {
            return Err(CliError::config("c-range must satisfy c_min < c_max with at least one sample"));
        }
        if self.immersions == 0 || self.points == 0 {
            return Err(CliError::config("immersions and points must be positive"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        let base = if self.flat_limit {
            ModelParams::flat_limit(self.u, self.v, self.m)
        } else {
            ModelParams::new(self.u, self.v, self.m)
        }?;
        match (self.t_min, self.t_max) {
            (None, None) => Ok(base),
            (lo, hi) => Ok(base.with_interval(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))?),
        }
    }

    /// Tolerance forced on every check, if any.
    pub fn tolerance_override(&self) -> Result<Option<f64>> {
        self.tol_tier.as_deref().map(tolerance_from).transpose()
    }

    pub fn tolerance(&self, default: f64) -> f64 {
        self.tolerance_override().ok().flatten().unwrap_or(default)
    }
}

/// A tier name or a positive number.
pub fn tolerance_from(s: &str) -> Result<f64> {
    if let Ok(t) = s.parse::<Tier>() {
        return Ok(t.tolerance());
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(CliError::config(format!(
            "bad tolerance `{s}` (expected analytic, one-layer, nested, loose or a positive number)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("u = 2\n# comment\nv=3 # trailing\nfamily = sine\ntol_tier = 1e-12\n").unwrap();
        assert_eq!((c.u, c.v, c.family), (2.0, 3.0, Family::Sine));
        assert_eq!(c.tolerance_override().unwrap(), Some(1e-12));
        assert_eq!(c.tolerance(1e-5), 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("u").is_err());
        assert!(c.set("tol_tier", "tight").is_err());
        c.v = 0.0;
        assert!(c.validate().is_err());
        c.flat_limit = true;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn tier_names_resolve() {
        assert_eq!(tolerance_from("nested").unwrap(), 1e-4);
        assert!(tolerance_from("-1").is_err());
    }
}
