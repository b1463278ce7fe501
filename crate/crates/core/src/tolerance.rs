//! Residual tolerance tiers, one per layer of numerical differentiation.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    /// Closed forms and analytic jets.
    Analytic,
    /// One finite-difference layer.
    OneLayer,
    /// Nested finite differences.
    Nested,
    /// Heights known only through samples.
    Loose,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::Analytic, Tier::OneLayer, Tier::Nested, Tier::Loose];

    pub fn tolerance(self) -> f64 {
        match self {
            Tier::Analytic => 1e-7,
            Tier::OneLayer => 1e-5,
            Tier::Nested => 1e-4,
            Tier::Loose => 1e-3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Analytic => "analytic",
            Tier::OneLayer => "one-layer",
            Tier::Nested => "nested",
            Tier::Loose => "loose",
        }
    }

    /// One tier looser, saturating at [`Tier::Loose`].
    pub fn relaxed(self) -> Tier {
        match self {
            Tier::Analytic => Tier::OneLayer,
            Tier::OneLayer => Tier::Nested,
            Tier::Nested | Tier::Loose => Tier::Loose,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tier::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown tolerance tier `{s}` (expected analytic, one-layer, nested or loose)"))
    }
}

/// Pass iff `residual` is finite and at most `tol`.
pub fn passes(residual: f64, tol: f64) -> bool {
    residual.is_finite() && residual <= tol
}

/// `|a − b| / max(|b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiers_are_ordered() {
        let tols: Vec<f64> = Tier::ALL.iter().map(|t| t.tolerance()).collect();
        assert!(tols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn names_round_trip() {
        for t in Tier::ALL {
            assert_eq!(t.name().parse::<Tier>().unwrap(), t);
        }
        assert!("tight".parse::<Tier>().is_err());
    }

    #[test]
    fn nan_never_passes() {
        assert!(!passes(f64::NAN, 1.0));
        assert!(passes(0.5, 1.0));
        assert!(!passes(1.5, 1.0));
    }
}
