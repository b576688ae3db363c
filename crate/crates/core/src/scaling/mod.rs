//! Entropy profiles over `(eps, n)` grids and what is read off them.

mod fit;
mod profile;

pub use fit::{
    entropy_dimension, fit_class, slow_entropy, stability_check, AsymptoticClassReport, Candidate, CandidateFit,
    ClassLabel, DimensionRow, EntropyDimension, EpsFit, ScaleFamily, SlowEntropyRow, StabilityReport, Verdict,
};
pub use profile::{
    exp_profile, monotonicity_violations, phi_grid, subadditivity_violations, EntropyProfile, GridOptions, GridSource,
    ProfileRecord, PROFILE_SCHEMA,
};

use serde::{Deserialize, Serialize};

/// Every threshold used by the fitting and verdict rules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest spread across `eps` rows (max over min) still called stable.
    pub stability_ratio: f64,
    /// Slack, in log units, for subadditivity and for scales constant in `n`.
    pub subadditivity_slack: f64,
    /// Required success rate when recovering planted classes.
    pub calibration_rate: f64,
    /// Relative RMS error below which a constant fit wins outright.
    pub bounded_tol: f64,
    /// A runner-up within this factor of the best residual is a tie.
    pub tie_ratio: f64,
    /// Power fits with exponent in `[c, 2 - c]` count as linear.
    pub linear_exponent: f64,
    /// Tolerated decay slope in the slow-entropy proxy (none by default).
    pub slow_slope_tol: f64,
    pub min_points: usize,
    /// Window length for tail slopes.
    pub tail_window: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            stability_ratio: 10.0,
            subadditivity_slack: 2.0,
            calibration_rate: 0.95,
            bounded_tol: 0.05,
            tie_ratio: 1.1,
            linear_exponent: 0.95,
            slow_slope_tol: 0.0,
            min_points: 4,
            tail_window: 3,
        }
    }
}
