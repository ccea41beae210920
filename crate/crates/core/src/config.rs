//! Numeric tolerances shared by every module.
//!
//! The characterizations are exact statements ("the gradient is zero",
//! "normalized gradients coincide"); each one is tested against one of the
//! thresholds below. Values can be overridden from a problem file, from a
//! config file named by `QCX_CONFIG`, or from CLI flags.

use serde::{Deserialize, Serialize};

/// Tolerance record. All values are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// `‖∇f(x)‖ <= eps_grad` means "the gradient is zero".
    pub eps_grad: f64,
    /// Cosine distance threshold for "normalized gradients are equal".
    pub eps_dir: f64,
    /// `|g_i(x)| <= eps_act` marks constraint `i` (or a set atom) active.
    pub eps_act: f64,
    /// Slack allowed on set membership and on (in)equalities of the
    /// characterizations.
    pub eps_feas: f64,
    /// Pivot and certificate tolerance of the linear feasibility kernel.
    pub eps_lp: f64,
    /// Optimality gap used by the brute-force oracle.
    pub eps_opt: f64,
    /// Central finite-difference step.
    pub h_fd: f64,
    /// Margin kept from the window boundary when sampling at random.
    pub delta_open: f64,
    /// Seed of every pseudo-random sampler.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps_grad: 1e-8,
            eps_dir: 1e-8,
            eps_act: 1e-9,
            eps_feas: 1e-9,
            eps_lp: 1e-9,
            eps_opt: 1e-9,
            h_fd: 1e-6,
            delta_open: 1e-9,
            seed: 42,
        }
    }
}

/// Partial config, used for layered overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_dir: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_act: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_feas: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_lp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_fd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_open: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ConfigOverrides::default()
    }
}

impl Config {
    /// Returns a copy with every `Some` field of `o` applied.
    pub fn with(mut self, o: &ConfigOverrides) -> Self {
        macro_rules! apply {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { self.$f = v; } )* };
        }
        apply!(eps_grad, eps_dir, eps_act, eps_feas, eps_lp, eps_opt, h_fd, delta_open, seed);
        self
    }

    /// Rejects non-positive or non-finite tolerances.
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("eps_grad", self.eps_grad),
            ("eps_dir", self.eps_dir),
            ("eps_act", self.eps_act),
            ("eps_feas", self.eps_feas),
            ("eps_lp", self.eps_lp),
            ("eps_opt", self.eps_opt),
            ("h_fd", self.h_fd),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be a positive finite number, got {v}"));
            }
        }
        if !(self.delta_open.is_finite() && self.delta_open >= 0.0) {
            return Err(format!("delta_open must be nonnegative, got {}", self.delta_open));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_field_by_field() {
        let o = ConfigOverrides { eps_grad: Some(1e-6), seed: Some(7), ..Default::default() };
        let c = Config::default().with(&o);
        assert_eq!(c.eps_grad, 1e-6);
        assert_eq!(c.seed, 7);
        assert_eq!(c.eps_dir, 1e-8);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: Config = serde_json::from_str(r#"{"eps_feas": 1e-7}"#).unwrap();
        assert_eq!(c.eps_feas, 1e-7);
        assert_eq!(c.h_fd, 1e-6);
        assert!(serde_json::from_str::<Config>(r#"{"eps_bogus": 1}"#).is_err());
    }

    #[test]
    fn validate_rejects_zero() {
        let c = Config { eps_lp: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        assert!(Config::default().validate().is_ok());
    }
}
