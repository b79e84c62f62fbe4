use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probabilities::{postselect, raw_probabilities};
use super::sampling::{delta_p, derive_seed, sample_counts, DetectionCounts};
use crate::error::{Error, Result};
use crate::qcore::{wrap_phase, AstroVisibility, XState};

/// Smallest |sin(w2 - w1)| accepted for a pair of phase settings.
pub const MIN_SETTING_SEPARATION: f64 = 1e-6;

/// The two resource phases at which the fringe is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSettings {
    pub w1: f64,
    pub w2: f64,
}

impl Default for PhaseSettings {
    fn default() -> Self {
        Self { w1: 0.0, w2: FRAC_PI_2 }
    }
}

impl PhaseSettings {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        let ph = Self { w1, w2 };
        ph.check()?;
        Ok(ph)
    }

    pub fn determinant(&self) -> f64 {
        (self.w2 - self.w1).sin()
    }

    pub fn check(&self) -> Result<()> {
        let d = self.determinant();
        if !d.is_finite() || d.abs() < MIN_SETTING_SEPARATION {
            return Err(Error::DegeneratePhases(d));
        }
        Ok(())
    }

    /// Settings shifted by the resource's own phase.
    pub fn offset(&self, w_p: f64) -> Self {
        Self {
            w1: self.w1 + w_p,
            w2: self.w2 + w_p,
        }
    }
}

fn check_concurrence(c: f64) -> Result<()> {
    if !(c > 0.0) {
        return Err(Error::ZeroConcurrence(c));
    }
    Ok(())
}

/// (c, s) = V_a C (cos V_p, sin V_p) from the two fringe samples.
fn fringe_quadratures(dp1: f64, dp2: f64, ph: &PhaseSettings) -> (f64, f64) {
    let (s1, c1) = ph.w1.sin_cos();
    let (s2, c2) = ph.w2.sin_cos();
    let d = ph.determinant();
    ((dp1 * s2 - dp2 * s1) / d, (dp2 * c1 - dp1 * c2) / d)
}

/// Inverts δp_i = V_a C cos(V_p - w_i) for (V_a, V_p).
///
/// V_p is in (-π, π]; at zero amplitude it is reported as 0.
pub fn solve_visibility(dp1: f64, dp2: f64, ph: &PhaseSettings, c: f64) -> Result<(f64, f64)> {
    check_concurrence(c)?;
    ph.check()?;
    let (cq, sq) = fringe_quadratures(dp1, dp2, ph);
    let k = cq.hypot(sq);
    if k == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((k / c, wrap_phase(sq.atan2(cq))))
}

/// Analytic partial derivatives used by [`propagate_errors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPartials {
    pub dvp_ddp1: f64,
    pub dvp_ddp2: f64,
    /// Index (1 or 2) of the setting used for the amplitude, the one with
    /// the larger |cos(V_p - w_i)|.
    pub setting: u8,
    /// ∂V_a/∂δp_i for that setting, holding V_p fixed.
    pub dva_ddp: f64,
    /// ∂V_a/∂V_p for that setting, holding δp_i fixed.
    pub dva_dvp: f64,
}

/// Partials of V_p(δp1, δp2) and of V_a = δp_i / (C cos(V_p - w_i)).
pub fn error_partials(dp1: f64, dp2: f64, ph: &PhaseSettings, c: f64) -> Result<ErrorPartials> {
    let (_, v_p) = solve_visibility(dp1, dp2, ph, c)?;
    let (cq, sq) = fringe_quadratures(dp1, dp2, ph);
    let k2 = cq * cq + sq * sq;
    let d = ph.determinant();
    let (dvp_ddp1, dvp_ddp2) = if k2 > 0.0 {
        (-dp2 / (d * k2), dp1 / (d * k2))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let a1 = v_p - ph.w1;
    let a2 = v_p - ph.w2;
    let (setting, a, dp) = if a1.cos().abs() >= a2.cos().abs() {
        (1, a1, dp1)
    } else {
        (2, a2, dp2)
    };
    let cos_a = a.cos();
    Ok(ErrorPartials {
        dvp_ddp1,
        dvp_ddp2,
        setting,
        dva_ddp: 1.0 / (c * cos_a),
        dva_dvp: dp * a.sin() / (c * cos_a * cos_a),
    })
}

/// One-sigma statistical error of δp from N postselected events:
/// 2 σ_p / √N with σ_p evaluated at the add-one smoothed p_ac.
pub fn delta_p_error(dp: f64, trials: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let n = trials as f64;
    let n_ac = n * (1.0 + dp.clamp(-1.0, 1.0)) / 2.0;
    let p = (n_ac + 1.0) / (n + 2.0);
    Ok(2.0 * (p * (1.0 - p)).sqrt() / n.sqrt())
}

/// (ΔV_a, ΔV_p) from the binomial errors of both fringe samples.
///
/// ΔV_p is capped at π. At zero recovered amplitude ΔV_p = π and ΔV_a is
/// the larger sample error divided by C.
pub fn propagate_errors(
    dp1: f64,
    dp2: f64,
    trials: u64,
    ph: &PhaseSettings,
    c: f64,
) -> Result<(f64, f64)> {
    let e1 = delta_p_error(dp1, trials)?;
    let e2 = delta_p_error(dp2, trials)?;
    let (v_a, _) = solve_visibility(dp1, dp2, ph, c)?;
    if v_a == 0.0 {
        return Ok((e1.max(e2) / c, PI));
    }
    let p = error_partials(dp1, dp2, ph, c)?;
    let dv_p = (p.dvp_ddp1 * e1).hypot(p.dvp_ddp2 * e2).min(PI);
    let e = if p.setting == 1 { e1 } else { e2 };
    let dv_a = (p.dva_ddp * e).hypot(p.dva_dvp * dv_p);
    Ok((dv_a.abs(), dv_p))
}

/// Point estimate of the visibility with its error bars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityEstimate {
    pub v_a_hat: f64,
    pub v_p_hat: f64,
    pub dv_a: f64,
    pub dv_p: f64,
    pub n_used: u64,
    pub c_used: f64,
    pub xi_used: f64,
    /// Error bars too wide to constrain the visibility (ΔV_a ≥ 0.5 or
    /// ΔV_p ≥ π/2).
    pub low_confidence: bool,
}

impl VisibilityEstimate {
    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.v_a_hat, self.v_p_hat)
    }
}

/// Solves and propagates errors for measured fringe samples. `ph` holds
/// the effective phases, i.e. resource phase plus setting offset.
pub fn estimate_from_delta_p(
    dp1: f64,
    dp2: f64,
    trials: u64,
    ph: &PhaseSettings,
    c: f64,
    xi: f64,
) -> Result<VisibilityEstimate> {
    let (v_a_hat, v_p_hat) = solve_visibility(dp1, dp2, ph, c)?;
    let (dv_a, dv_p) = propagate_errors(dp1, dp2, trials, ph, c)?;
    Ok(VisibilityEstimate {
        v_a_hat,
        v_p_hat,
        dv_a,
        dv_p,
        n_used: trials,
        c_used: c,
        xi_used: xi,
        low_confidence: dv_a >= 0.5 || dv_p >= FRAC_PI_2,
    })
}

/// Fringe samples for both settings. Setting i draws from stream
/// `derive_seed(seed, i)`.
pub fn sample_fringes(
    v: &AstroVisibility,
    x: &XState,
    ph: &PhaseSettings,
    trials: u64,
    seed: u64,
) -> Result<[DetectionCounts; 2]> {
    let mut out = [DetectionCounts { n_c: 0, n_ac: 0, setting: 1 }; 2];
    for (i, w) in [ph.w1, ph.w2].into_iter().enumerate() {
        let shifted = x.with_phase_offset(w);
        let (p_c, _) = postselect(raw_probabilities(v, &shifted))?;
        let mut counts = sample_counts(p_c, trials, derive_seed(seed, i as u64 + 1))?;
        counts.setting = i as u8 + 1;
        out[i] = counts;
    }
    Ok(out)
}

/// Simulates the full two-setting measurement of `v_true` with resource `x`.
pub fn run_observation(
    v_true: &AstroVisibility,
    x: &XState,
    ph: &PhaseSettings,
    trials: u64,
    seed: u64,
) -> Result<VisibilityEstimate> {
    ph.check()?;
    let c = x.concurrence_subspace()?;
    check_concurrence(c)?;
    let [k1, k2] = sample_fringes(v_true, x, ph, trials, seed)?;
    estimate_from_delta_p(
        delta_p(&k1)?,
        delta_p(&k2)?,
        trials,
        &ph.offset(x.w_p),
        c,
        x.subspace_weight(),
    )
}

/// Root-mean-square error of (V_a_hat, V_p_hat) over `replicas` seeded runs.
/// Phase errors are wrapped into (-π, π] before squaring.
pub fn replicate_rmse(
    v_true: &AstroVisibility,
    x: &XState,
    ph: &PhaseSettings,
    trials: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<(f64, f64)> {
    if replicas == 0 {
        return Err(Error::ZeroTrials);
    }
    let sq: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let est = run_observation(v_true, x, ph, trials, derive_seed(master_seed, r))?;
            let ea = est.v_a_hat - v_true.amplitude();
            let ep = wrap_phase(est.v_p_hat - v_true.phase());
            Ok((ea * ea, ep * ep))
        })
        .collect::<Result<_>>()?;
    let n = replicas as f64;
    let (sa, sp) = sq.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    Ok(((sa / n).sqrt(), (sp / n).sqrt()))
}
