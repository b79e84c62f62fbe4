//! One-dimensional aperture synthesis: sky models, the forward visibility
//! transform, dirty-image reconstruction and the per-baseline pipeline.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{normalized_rate, ResourceModel};
use crate::error::{check_positive, Error, Result};
use crate::protocol::{derive_seed, generic_scaling, run_observation, PhaseSettings, VisibilityEstimate};
use crate::qcore::AstroVisibility;

/// Small-angle limit enforced on source offsets, in radians.
pub const MAX_THETA: f64 = 0.1;

/// Phase-limited when the resource concurrence reaches this value.
pub const PHASE_LIMITED_C: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub theta: f64,
    pub flux: f64,
}

/// Incoherent point sources observed at a single wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkyModel {
    sources: Vec<PointSource>,
    wavelength: f64,
}

impl SkyModel {
    pub fn new(sources: Vec<PointSource>, wavelength: f64) -> Result<Self> {
        check_positive("wavelength", wavelength)?;
        for s in &sources {
            if !s.theta.is_finite() || s.theta.abs() > MAX_THETA {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    value: s.theta,
                    reason: "source offsets must satisfy |theta| <= 0.1 rad",
                });
            }
            if !s.flux.is_finite() || s.flux < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "flux",
                    value: s.flux,
                    reason: "must be finite and non-negative",
                });
            }
        }
        let sky = Self { sources, wavelength };
        if !(sky.total_flux() > 0.0) {
            return Err(Error::ZeroFlux);
        }
        Ok(sky)
    }

    /// Two equal sources at ±separation/2.
    pub fn two_point(separation: f64, wavelength: f64) -> Result<Self> {
        Self::new(
            vec![
                PointSource { theta: -separation / 2.0, flux: 1.0 },
                PointSource { theta: separation / 2.0, flux: 1.0 },
            ],
            wavelength,
        )
    }

    pub fn sources(&self) -> &[PointSource] {
        &self.sources
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn total_flux(&self) -> f64 {
        self.sources.iter().map(|s| s.flux).sum()
    }
}

/// Strictly increasing positive baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePlan {
    baselines: Vec<f64>,
}

impl BaselinePlan {
    pub fn new(baselines: Vec<f64>) -> Result<Self> {
        if baselines.is_empty() {
            return Err(Error::DegenerateGrid("baseline plan is empty"));
        }
        if baselines.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(Error::DegenerateGrid("baselines must be positive and finite"));
        }
        if baselines.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid("baselines must be strictly increasing"));
        }
        Ok(Self { baselines })
    }

    /// `count` baselines B_m·k/count, k = 1..=count.
    pub fn linear(b_max: f64, count: usize) -> Result<Self> {
        check_positive("B_max", b_max)?;
        Self::new((1..=count).map(|k| b_max * k as f64 / count as f64).collect())
    }

    pub fn baselines(&self) -> &[f64] {
        &self.baselines
    }

    pub fn b_max(&self) -> f64 {
        *self.baselines.last().expect("plan is nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilitySample {
    pub b: f64,
    pub v: Complex64,
    pub dv_a: f64,
    pub dv_p: f64,
}

impl VisibilitySample {
    pub fn exact(b: f64, v: Complex64) -> Self {
        Self { b, v, dv_a: 0.0, dv_p: 0.0 }
    }
}

/// V(B) = Σ I_k e^{-2πi B θ_k / λ} / Σ I_k.
pub fn true_visibility(sky: &SkyModel, b: f64) -> Complex64 {
    let k = -TAU * b / sky.wavelength;
    let sum: Complex64 = sky
        .sources
        .iter()
        .map(|s| Complex64::from_polar(s.flux, k * s.theta))
        .sum();
    sum / sky.total_flux()
}

/// Angular resolution λ / (2 B_m).
pub fn resolution(b_max: f64, wavelength: f64) -> Result<f64> {
    Ok(check_positive("wavelength", wavelength)? / (2.0 * check_positive("B_max", b_max)?))
}

/// Trapezoid weights for the positive nodes of the symmetric set
/// {-B_n, ..., -B_1, 0, B_1, ..., B_n}; element 0 is the weight of B = 0.
fn trapezoid_weights(b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let node = |k: usize| if k == 0 { 0.0 } else { b[k - 1] };
    let mut w = Vec::with_capacity(n + 1);
    w.push(b[0]);
    for k in 1..=n {
        let next = if k == n { node(k) } else { node(k + 1) };
        w.push((next - node(k - 1)) / 2.0);
    }
    w
}

fn check_inputs(samples: &[VisibilitySample], theta_grid: &[f64], wavelength: f64) -> Result<()> {
    check_positive("wavelength", wavelength)?;
    if samples.len() < 2 {
        return Err(Error::DegenerateGrid("need at least two visibility samples"));
    }
    if samples.windows(2).any(|w| !(w[1].b > w[0].b)) || !(samples[0].b > 0.0) {
        return Err(Error::DegenerateGrid("sample baselines must be positive and increasing"));
    }
    if theta_grid.len() < 2 || theta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateGrid("theta grid must have two or more increasing points"));
    }
    Ok(())
}

fn normalize<T>(values: Vec<T>, re: impl Fn(&T) -> f64, scale: impl Fn(T, f64) -> T) -> Result<Vec<T>> {
    let total: f64 = values.iter().map(&re).sum();
    if !(total.abs() > f64::MIN_POSITIVE) || !total.is_finite() {
        return Err(Error::DegenerateGrid("reconstruction sums to zero on this grid"));
    }
    Ok(values.into_iter().map(|v| scale(v, total)).collect())
}

/// Dirty image on `theta_grid`, normalized to unit sum.
///
/// Truncated inverse transform over [-B_m, B_m] with V(0) = 1 and
/// V(-B) = V*(B); sidelobes of the truncation are left in place.
pub fn reconstruct_intensity(
    samples: &[VisibilitySample],
    theta_grid: &[f64],
    wavelength: f64,
) -> Result<Vec<f64>> {
    check_inputs(samples, theta_grid, wavelength)?;
    let bs: Vec<f64> = samples.iter().map(|s| s.b).collect();
    let w = trapezoid_weights(&bs);
    let raw = theta_grid
        .iter()
        .map(|&theta| {
            let k = TAU * theta / wavelength;
            w[0] + 2.0
                * samples
                    .iter()
                    .zip(&w[1..])
                    .map(|(s, wk)| wk * (s.v * Complex64::from_polar(1.0, k * s.b)).re)
                    .sum::<f64>()
        })
        .collect();
    normalize(raw, |v| *v, |v, t| v / t)
}

/// As [`reconstruct_intensity`], but sums both half-planes explicitly in
/// complex arithmetic; the imaginary part measures Hermitian consistency.
pub fn reconstruct_intensity_complex(
    samples: &[VisibilitySample],
    theta_grid: &[f64],
    wavelength: f64,
) -> Result<Vec<Complex64>> {
    check_inputs(samples, theta_grid, wavelength)?;
    let bs: Vec<f64> = samples.iter().map(|s| s.b).collect();
    let w = trapezoid_weights(&bs);
    let raw = theta_grid
        .iter()
        .map(|&theta| {
            let k = TAU * theta / wavelength;
            let mut acc = Complex64::new(w[0], 0.0);
            for (s, wk) in samples.iter().zip(&w[1..]) {
                acc += *wk * s.v * Complex64::from_polar(1.0, k * s.b);
                acc += *wk * s.v.conj() * Complex64::from_polar(1.0, -k * s.b);
            }
            acc
        })
        .collect();
    normalize(raw, |v| v.re, |v, t| v / t)
}

/// Indices of interior local maxima whose value is at least `rel` times
/// the global maximum.
pub fn find_peaks(values: &[f64], rel: f64) -> Vec<usize> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= rel * max)
        .collect()
}

/// The true sky dropped into the nearest grid cell, unit sum.
pub fn bin_sky(sky: &SkyModel, theta_grid: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; theta_grid.len()];
    for s in &sky.sources {
        let idx = theta_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - s.theta).abs().total_cmp(&(b.1 - s.theta).abs()))
            .map(|(i, _)| i);
        if let Some(i) = idx {
            out[i] += s.flux / sky.total_flux();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    PhaseLimited,
    AmplitudeLimited,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::PhaseLimited => "phase-limited",
            Regime::AmplitudeLimited => "amplitude-limited",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityError {
    /// √(ΔV_a² + ΔV_p²).
    pub d_i: f64,
    /// √(C² + 1) / (C √ξ); infinite at C = 0.
    pub scale: f64,
    pub regime: Regime,
}

pub fn intensity_error(dv_a: f64, dv_p: f64, c: f64, xi: f64) -> IntensityError {
    let scale = if c > 0.0 && xi > 0.0 {
        (c * c + 1.0).sqrt() / (c * xi.sqrt())
    } else {
        f64::INFINITY
    };
    IntensityError {
        d_i: dv_a.hypot(dv_p),
        scale,
        regime: if c >= PHASE_LIMITED_C {
            Regime::PhaseLimited
        } else {
            Regime::AmplitudeLimited
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub b: f64,
    pub v_true: Complex64,
    pub estimate: VisibilityEstimate,
    pub xi: f64,
    pub c: f64,
    /// R_M / (R_E R_T).
    pub r_m_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityRow {
    pub theta: f64,
    /// Reconstruction from the exact visibilities.
    pub exact: f64,
    /// Reconstruction from the estimated visibilities.
    pub estimated: f64,
    pub sky: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagingReport {
    pub baselines: Vec<BaselineRow>,
    pub intensity: Vec<IntensityRow>,
    pub resolution: f64,
    /// Resource at the longest baseline.
    pub xi: f64,
    pub c: f64,
    pub r_m_norm: f64,
    pub dva_scale: f64,
    pub dvp_scale: f64,
    pub intensity_error: IntensityError,
    pub low_confidence: usize,
}

/// Observation settings shared by every baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationPlan {
    pub settings: PhaseSettings,
    /// Postselected events per phase setting and baseline.
    pub trials: u64,
    pub seed: u64,
    /// Entangled photons per astronomical mode, for the error scalings.
    pub r_e: f64,
}

/// Full pipeline: forward transform, per-baseline measurement with the
/// resource the network delivers at that baseline, and reconstruction.
///
/// Baseline k uses master seed `derive_seed(seed, k)`; results do not
/// depend on the number of worker threads.
pub fn observe_and_image(
    sky: &SkyModel,
    plan: &BaselinePlan,
    resource: &ResourceModel,
    obs: &ObservationPlan,
    theta_grid: &[f64],
) -> Result<ImagingReport> {
    obs.settings.check()?;
    let rows: Vec<BaselineRow> = plan
        .baselines
        .par_iter()
        .enumerate()
        .map(|(k, &b)| {
            let v_true = true_visibility(sky, b);
            let x = resource.resource_at(b)?;
            let xi = x.subspace_weight();
            let c = x.concurrence_subspace()?;
            let v = AstroVisibility::from_complex(v_true)?;
            let estimate = run_observation(&v, &x, &obs.settings, obs.trials, derive_seed(obs.seed, k as u64))?;
            Ok(BaselineRow {
                b,
                v_true,
                estimate,
                xi,
                c,
                r_m_norm: normalized_rate(xi),
            })
        })
        .collect::<Result<_>>()?;

    let exact: Vec<VisibilitySample> = rows.iter().map(|r| VisibilitySample::exact(r.b, r.v_true)).collect();
    let estimated: Vec<VisibilitySample> = rows
        .iter()
        .map(|r| VisibilitySample {
            b: r.b,
            v: r.estimate.to_complex(),
            dv_a: r.estimate.dv_a,
            dv_p: r.estimate.dv_p,
        })
        .collect();
    let i_exact = reconstruct_intensity(&exact, theta_grid, sky.wavelength)?;
    let i_est = reconstruct_intensity(&estimated, theta_grid, sky.wavelength)?;
    let binned = bin_sky(sky, theta_grid);
    let intensity = theta_grid
        .iter()
        .enumerate()
        .map(|(j, &theta)| IntensityRow {
            theta,
            exact: i_exact[j],
            estimated: i_est[j],
            sky: binned[j],
        })
        .collect();

    let last = rows.last().expect("plan is nonempty");
    let scaling = generic_scaling(last.c, last.xi, obs.r_e);
    let dva_max = rows.iter().map(|r| r.estimate.dv_a).fold(0.0, f64::max);
    let dvp_max = rows.iter().map(|r| r.estimate.dv_p).fold(0.0, f64::max);
    Ok(ImagingReport {
        resolution: resolution(plan.b_max(), sky.wavelength)?,
        xi: last.xi,
        c: last.c,
        r_m_norm: last.r_m_norm,
        dva_scale: scaling.dva_scale,
        dvp_scale: scaling.dvp_scale,
        intensity_error: intensity_error(dva_max, dvp_max, last.c, last.xi),
        low_confidence: rows.iter().filter(|r| r.estimate.low_confidence).count(),
        baselines: rows,
        intensity,
    })
}

/// `points` evenly spaced angles on [-half_width, half_width].
pub fn symmetric_grid(half_width: f64, points: usize) -> Result<Vec<f64>> {
    check_positive("half_width", half_width)?;
    if points < 2 {
        return Err(Error::DegenerateGrid("theta grid needs at least two points"));
    }
    let step = 2.0 * half_width / (points - 1) as f64;
    Ok((0..points).map(|j| -half_width + step * j as f64).collect())
}
