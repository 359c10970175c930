//! Controller parameters and their TOML file format.
//!
//! Every key is optional; omitted keys take the default listed below.
//! Unknown keys are rejected so that typos surface as errors.
//!
//! | key                  | unit  | default |
//! |----------------------|-------|---------|
//! | `d_thresh_out`       | m     | 0.09    |
//! | `d_thresh_forward`   | m     | 0.09    |
//! | `d_thresh_in`        | m     | 0.09    |
//! | `d_des_in`           | m     | 0.06    |
//! | `k_out`              | N/m   | 20      |
//! | `k_forward`          | N/m   | 30      |
//! | `k_in`               | N/m   | 12      |
//! | `d_near`             | m     | 0.05    |
//! | `d_far`              | m     | 0.09    |
//! | `d_occlude`          | m     | 0.04    |
//! | `gamma_a`            | rad   | 20 deg  |
//! | `r_power`            | m     | 0.03    |
//! | `gamma_v`            | m/s   | 0.2     |
//! | `gamma_f`            | N     | 0.5     |
//! | `t_fail`             | s     | 3.0     |
//! | `theta_close`        | rad   | 0.0     |
//! | `clearance_baseline` | m     | 0.010   |
//! | `antipodal_check`    | bool  | true    |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReflexConfig {
    pub d_thresh_out: f64,
    pub d_thresh_forward: f64,
    pub d_thresh_in: f64,
    pub d_des_in: f64,
    pub k_out: f64,
    pub k_forward: f64,
    pub k_in: f64,
    pub d_near: f64,
    pub d_far: f64,
    pub d_occlude: f64,
    pub gamma_a: f64,
    pub r_power: f64,
    pub gamma_v: f64,
    pub gamma_f: f64,
    pub t_fail: f64,
    /// Tip angle below which a fingertip counts as wrapped around the object.
    pub theta_close: f64,
    /// Extra gap between the baseline fingertips beyond the object diameter.
    pub clearance_baseline: f64,
    /// Require antipodal contact normals (within `gamma_a`) after a pinch re-grasp.
    pub antipodal_check: bool,
}

impl Default for ReflexConfig {
    fn default() -> Self {
        Self {
            d_thresh_out: 0.09,
            d_thresh_forward: 0.09,
            d_thresh_in: 0.09,
            d_des_in: 0.06,
            k_out: 20.0,
            k_forward: 30.0,
            k_in: 12.0,
            d_near: 0.05,
            d_far: 0.09,
            d_occlude: 0.04,
            gamma_a: 20f64.to_radians(),
            r_power: 0.03,
            gamma_v: 0.2,
            gamma_f: 0.5,
            t_fail: 3.0,
            theta_close: 0.0,
            clearance_baseline: 0.010,
            antipodal_check: true,
        }
    }
}

impl ReflexConfig {
    /// Check the ordering and sign constraints between parameters.
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("d_thresh_out", self.d_thresh_out),
            ("d_thresh_forward", self.d_thresh_forward),
            ("d_thresh_in", self.d_thresh_in),
            ("d_des_in", self.d_des_in),
            ("k_out", self.k_out),
            ("k_forward", self.k_forward),
            ("k_in", self.k_in),
            ("d_near", self.d_near),
            ("d_far", self.d_far),
            ("d_occlude", self.d_occlude),
            ("gamma_a", self.gamma_a),
            ("r_power", self.r_power),
            ("gamma_v", self.gamma_v),
            ("gamma_f", self.gamma_f),
            ("t_fail", self.t_fail),
            ("clearance_baseline", self.clearance_baseline),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be a positive finite number, got {value}"),
                });
            }
        }
        if !self.theta_close.is_finite() {
            return Err(Error::InvalidConfig {
                field: "theta_close",
                reason: "must be finite".into(),
            });
        }
        if self.d_des_in >= self.d_thresh_in {
            return Err(Error::InvalidConfig {
                field: "d_des_in",
                reason: format!("must be below d_thresh_in ({} >= {})", self.d_des_in, self.d_thresh_in),
            });
        }
        if self.d_near > self.d_far {
            return Err(Error::InvalidConfig {
                field: "d_near",
                reason: format!("must not exceed d_far ({} > {})", self.d_near, self.d_far),
            });
        }
        Ok(())
    }

    /// Parse and validate a config from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let cfg: ReflexConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }
}

/// Read a config file. An empty file yields the defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<ReflexConfig, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ReflexConfig::from_toml_str(&text).map_err(|e| match e {
        Error::ConfigParse(msg) => Error::ConfigParse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
