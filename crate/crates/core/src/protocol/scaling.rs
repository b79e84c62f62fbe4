use serde::{Deserialize, Serialize};

use crate::channels::depolarizing_x;
use crate::error::{check_positive, check_probability, Result};

/// Below this |1 - 4x| the depolarizing amplitude-error scale is reported
/// as diverged.
pub const DIVERGENCE_TOL: f64 = 1e-12;

/// Loss parameters for the per-channel error scalings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelParams {
    Ideal,
    AmplitudeDamping { lambda_l: f64, lambda_r: f64 },
    Dephasing { mu_l: f64, mu_r: f64 },
    Depolarizing { kappa_l: f64, kappa_r: f64 },
}

/// Proportionality factors for ΔV_a and ΔV_p (unspecified constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub dva_scale: f64,
    pub dvp_scale: f64,
    pub diverged: bool,
}

/// ΔV_a ∼ 1/(C √(ξ R)), ΔV_p ∼ 1/√(ξ R) for any resource.
pub fn generic_scaling(c: f64, xi: f64, r_x: f64) -> ScalingLaw {
    let base = 1.0 / (xi * r_x).sqrt();
    let diverged = c.abs() < DIVERGENCE_TOL || !base.is_finite();
    ScalingLaw {
        dva_scale: if diverged { f64::INFINITY } else { base / c.abs() },
        dvp_scale: base,
        diverged,
    }
}

/// Channel-specific error scalings written in the loss parameters.
pub fn scaling_laws(params: &ChannelParams, r_x: f64) -> Result<ScalingLaw> {
    let root = check_positive("R_X", r_x)?.sqrt();
    Ok(match *params {
        ChannelParams::Ideal => ScalingLaw {
            dva_scale: 1.0 / root,
            dvp_scale: 1.0 / root,
            diverged: false,
        },
        ChannelParams::AmplitudeDamping { lambda_l, lambda_r } => {
            let ll = check_probability("lambda_L", lambda_l)?;
            let lr = check_probability("lambda_R", lambda_r)?;
            let mean = 1.0 - 0.5 * (ll + lr);
            let coh = ((1.0 - ll) * (1.0 - lr)).sqrt();
            let diverged = coh < DIVERGENCE_TOL;
            ScalingLaw {
                dva_scale: if diverged { f64::INFINITY } else { mean.sqrt() / (root * coh) },
                dvp_scale: 1.0 / (root * mean.sqrt()),
                diverged,
            }
        }
        ChannelParams::Dephasing { mu_l, mu_r } => {
            let ml = check_probability("mu_L", mu_l)?;
            let mr = check_probability("mu_R", mu_r)?;
            let coh = (1.0 - ml) * (1.0 - mr);
            let diverged = coh < DIVERGENCE_TOL;
            ScalingLaw {
                dva_scale: if diverged { f64::INFINITY } else { 1.0 / (root * coh) },
                dvp_scale: 1.0 / root,
                diverged,
            }
        }
        ChannelParams::Depolarizing { kappa_l, kappa_r } => {
            let x = depolarizing_x(kappa_l, kappa_r)?;
            let gap = (1.0 - 4.0 * x).abs();
            let diverged = gap < DIVERGENCE_TOL;
            ScalingLaw {
                dva_scale: if diverged {
                    f64::INFINITY
                } else {
                    (1.0 - 2.0 * x).sqrt() / (root * gap)
                },
                dvp_scale: 1.0 / (root * (1.0 - 2.0 * x).sqrt()),
                diverged,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{xstate_amplitude_damping, xstate_dephasing, xstate_depolarizing};
    use approx::assert_relative_eq;

    #[test]
    fn lossless_limits() {
        for p in [
            ChannelParams::Ideal,
            ChannelParams::AmplitudeDamping { lambda_l: 0.0, lambda_r: 0.0 },
            ChannelParams::Dephasing { mu_l: 0.0, mu_r: 0.0 },
            ChannelParams::Depolarizing { kappa_l: 0.0, kappa_r: 0.0 },
        ] {
            let s = scaling_laws(&p, 4.0).unwrap();
            assert_relative_eq!(s.dva_scale, 0.5, max_relative = 1e-15);
            assert_relative_eq!(s.dvp_scale, 0.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn equal_arm_damping() {
        let s = scaling_laws(&ChannelParams::AmplitudeDamping { lambda_l: 0.36, lambda_r: 0.36 }, 1.0)
            .unwrap();
        assert_relative_eq!(s.dva_scale, 1.0 / 0.64f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn depolarizing_boundary_diverges() {
        let s = scaling_laws(&ChannelParams::Depolarizing { kappa_l: 0.75, kappa_r: 0.0 }, 1.0).unwrap();
        assert!(s.diverged);
        assert!(s.dva_scale.is_infinite());
    }

    #[test]
    fn channel_forms_match_generic() {
        let cases = [
            (
                ChannelParams::AmplitudeDamping { lambda_l: 0.2, lambda_r: 0.5 },
                xstate_amplitude_damping(0.2, 0.5).unwrap(),
            ),
            (
                ChannelParams::Dephasing { mu_l: 0.3, mu_r: 0.1 },
                xstate_dephasing(0.3, 0.1).unwrap(),
            ),
            (
                ChannelParams::Depolarizing { kappa_l: 0.2, kappa_r: 0.4 },
                xstate_depolarizing(0.2, 0.4).unwrap(),
            ),
        ];
        for (p, x) in cases {
            let a = scaling_laws(&p, 0.7).unwrap();
            let g = generic_scaling(x.concurrence_subspace().unwrap(), x.subspace_weight(), 0.7);
            assert_relative_eq!(a.dva_scale, g.dva_scale, max_relative = 1e-12);
            assert_relative_eq!(a.dvp_scale, g.dvp_scale, max_relative = 1e-12);
        }
    }
}
