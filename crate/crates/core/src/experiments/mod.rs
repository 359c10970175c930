//! Simulated pick-and-place trials and the experiments built from them.

mod clutter;
mod contour;
mod grid;
pub mod report;
mod trial;

pub use clutter::{
    place_objects, run_clutter, ClassStats, ClutterAttempt, ClutterResult, ClutterSpec, CLUTTER_CLASSES,
};
pub use contour::{run_contour_following, ContourReport, ContourSample, ContourSpec};
pub use grid::{run_grid_sweep, GridCell, GridResult, GridSpec};
pub use trial::{measure_realtime_factor, run_trial, EventRow, Scene, SimParams, TrialRecord, TrialRun};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Baseline,
    Partial,
    Full,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [ControllerKind::Baseline, ControllerKind::Partial, ControllerKind::Full];

    pub fn label(self) -> &'static str {
        match self {
            ControllerKind::Baseline => "baseline",
            ControllerKind::Partial => "partial",
            ControllerKind::Full => "full",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Ok(ControllerKind::Baseline),
            "partial" => Ok(ControllerKind::Partial),
            "full" => Ok(ControllerKind::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown controller `{other}` (expected baseline, partial or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Succeeded,
    /// Nothing was in hand when transport began, or the controller gave up.
    Failed,
    /// The object was grasped but lost during transport.
    Dropped,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Succeeded => "SUCCEEDED",
            Outcome::Failed => "FAILED",
            Outcome::Dropped => "DROPPED",
        }
    }

    pub fn is_success(self) -> bool {
        self == Outcome::Succeeded
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

/// Independent per-trial seed from a base seed and a stream index.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controller_names_round_trip() {
        for k in ControllerKind::ALL {
            assert_eq!(k.label().parse::<ControllerKind>().unwrap(), k);
        }
        assert!("reflex".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }
}
