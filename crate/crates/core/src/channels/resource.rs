use serde::{Deserialize, Serialize};

use super::{
    normalized_rate, xstate_amplitude_damping, xstate_dephasing, xstate_depolarizing, BellSign,
    FiberLink, MemoryPair,
};
use crate::error::{check_positive, check_probability, Error, Result};
use crate::qcore::XState;

/// How the shared resource depends on the baseline it has to span.
///
/// Fiber-backed variants split the baseline into two equal arms of length
/// B/2; the remaining variants ignore the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResourceModel {
    Ideal,
    AmplitudeDamping { lambda_l: f64, lambda_r: f64 },
    LossyFiber { attenuation_length: f64 },
    Dephasing { mu_l: f64, mu_r: f64 },
    Depolarizing { kappa_l: f64, kappa_r: f64 },
    DepolarizingFiber { beta: f64 },
    MemorySwap { pair: MemoryPair },
    /// Tabulated normalized rate R_M/(R_E R_T) against baseline, linearly
    /// interpolated and held constant past either end. Pairs are delivered
    /// coherently (C = 1) with weight ξ = 2·rate.
    CustomRate { table: Vec<(f64, f64)> },
}

impl ResourceModel {
    pub fn name(&self) -> &'static str {
        match self {
            ResourceModel::Ideal => "ideal",
            ResourceModel::AmplitudeDamping { .. } | ResourceModel::LossyFiber { .. } => {
                "amplitude_damping"
            }
            ResourceModel::Dephasing { .. } => "dephasing",
            ResourceModel::Depolarizing { .. } | ResourceModel::DepolarizingFiber { .. } => {
                "depolarizing"
            }
            ResourceModel::MemorySwap { .. } => "memory_swap",
            ResourceModel::CustomRate { .. } => "custom_rate",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ResourceModel::Ideal => Ok(()),
            ResourceModel::AmplitudeDamping { lambda_l, lambda_r } => {
                xstate_amplitude_damping(*lambda_l, *lambda_r).map(drop)
            }
            ResourceModel::LossyFiber { attenuation_length } => {
                check_positive("L0", *attenuation_length).map(drop)
            }
            ResourceModel::Dephasing { mu_l, mu_r } => xstate_dephasing(*mu_l, *mu_r).map(drop),
            ResourceModel::Depolarizing { kappa_l, kappa_r } => {
                xstate_depolarizing(*kappa_l, *kappa_r).map(drop)
            }
            ResourceModel::DepolarizingFiber { beta } => check_positive("beta", *beta).map(drop),
            ResourceModel::MemorySwap { pair } => {
                MemoryPair::new(pair.t1, pair.t2, pair.tau_c, pair.sign).map(drop)
            }
            ResourceModel::CustomRate { table } => validate_table(table),
        }
    }

    /// The resource state delivered across `baseline`.
    pub fn resource_at(&self, baseline: f64) -> Result<XState> {
        match self {
            ResourceModel::Ideal => Ok(XState::bell(BellSign::Plus.phase())),
            ResourceModel::AmplitudeDamping { lambda_l, lambda_r } => {
                xstate_amplitude_damping(*lambda_l, *lambda_r)
            }
            ResourceModel::LossyFiber { attenuation_length } => {
                FiberLink::symmetric(baseline)?.amplitude_damped(*attenuation_length)
            }
            ResourceModel::Dephasing { mu_l, mu_r } => xstate_dephasing(*mu_l, *mu_r),
            ResourceModel::Depolarizing { kappa_l, kappa_r } => {
                xstate_depolarizing(*kappa_l, *kappa_r)
            }
            ResourceModel::DepolarizingFiber { beta } => {
                FiberLink::symmetric(baseline)?.depolarized(*beta)
            }
            ResourceModel::MemorySwap { pair } => pair.swapped(),
            ResourceModel::CustomRate { table } => {
                let xi = (2.0 * interpolate(table, baseline)?).min(1.0);
                XState::single_excitation(xi / 2.0, xi / 2.0, xi / 2.0, 0.0)
            }
        }
    }

    /// R_M / (R_E R_T) at `baseline`.
    pub fn normalized_rate_at(&self, baseline: f64) -> Result<f64> {
        match self {
            ResourceModel::CustomRate { table } => interpolate(table, baseline),
            _ => Ok(normalized_rate(self.resource_at(baseline)?.subspace_weight())),
        }
    }
}

fn validate_table(table: &[(f64, f64)]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::DegenerateGrid("custom rate table is empty"));
    }
    for &(b, r) in table {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidParameter {
                name: "rate_table.B",
                value: b,
                reason: "baselines must be finite and non-negative",
            });
        }
        if !(0.0..=0.5).contains(&r) {
            return Err(Error::InvalidParameter {
                name: "rate_table.rate",
                value: r,
                reason: "normalized rate R_M/(R_E R_T) must lie in [0, 1/2]",
            });
        }
    }
    if table.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateGrid("custom rate table baselines must be strictly increasing"));
    }
    Ok(())
}

fn interpolate(table: &[(f64, f64)], baseline: f64) -> Result<f64> {
    validate_table(table)?;
    let first = table[0];
    let last = table[table.len() - 1];
    if baseline <= first.0 {
        return check_probability("rate", first.1);
    }
    if baseline >= last.0 {
        return check_probability("rate", last.1);
    }
    let idx = table.partition_point(|&(b, _)| b <= baseline);
    let (b0, r0) = table[idx - 1];
    let (b1, r1) = table[idx];
    Ok(r0 + (r1 - r0) * (baseline - b0) / (b1 - b0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fiber_resource_tracks_baseline() {
        let model = ResourceModel::LossyFiber {
            attenuation_length: 2.0,
        };
        let x = model.resource_at(4.0).unwrap();
        assert_abs_diff_eq!(x.subspace_weight(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(x.concurrence_subspace().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn custom_rate_interpolates() {
        let model = ResourceModel::CustomRate {
            table: vec![(0.0, 0.5), (10.0, 0.25), (20.0, 0.05)],
        };
        model.validate().unwrap();
        assert_abs_diff_eq!(model.normalized_rate_at(5.0).unwrap(), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(model.normalized_rate_at(25.0).unwrap(), 0.05, epsilon = 1e-15);
        let x = model.resource_at(15.0).unwrap();
        assert_abs_diff_eq!(x.subspace_weight(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(x.concurrence_subspace().unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn custom_rate_rejects_bad_tables() {
        let bad = ResourceModel::CustomRate {
            table: vec![(0.0, 0.5), (0.0, 0.2)],
        };
        assert!(bad.validate().is_err());
        let bad = ResourceModel::CustomRate {
            table: vec![(0.0, 0.7)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn names() {
        assert_eq!(ResourceModel::Ideal.name(), "ideal");
        assert_eq!(
            ResourceModel::DepolarizingFiber { beta: 1.0 }.name(),
            "depolarizing"
        );
    }
}
