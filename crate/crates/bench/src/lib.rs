//! Shared fixtures for the criterion benches.

use entbase::imaging::{symmetric_grid, BaselinePlan, ObservationPlan, SkyModel};
use entbase::protocol::PhaseSettings;

/// Two equal sources 0.01 rad apart at unit wavelength, observed on
/// `count` baselines out to four times the resolving threshold.
pub fn two_source_fixture(count: usize, trials: u64) -> (SkyModel, BaselinePlan, ObservationPlan, Vec<f64>) {
    let sky = SkyModel::two_point(0.01, 1.0).unwrap();
    let plan = BaselinePlan::linear(200.0, count).unwrap();
    let obs = ObservationPlan { settings: PhaseSettings::default(), trials, seed: 7, r_e: 1.0 };
    let grid = symmetric_grid(0.03, 121).unwrap();
    (sky, plan, obs, grid)
}
