use std::fs;
use std::path::{Path, PathBuf};

use entbase::imaging::{observe_and_image, true_visibility, ImagingReport};
use entbase::protocol::replicate_rmse;
use entbase::{AstroVisibility, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::output::{self, SweepRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct Summary {
    pub channel: &'static str,
    pub xi: f64,
    pub C: f64,
    pub R_M_norm: f64,
    pub R_M: f64,
    pub dVa_scale: f64,
    pub dVp_scale: f64,
    pub dI_scale: f64,
    pub dI: f64,
    pub regime: &'static str,
    pub resolution: f64,
    pub B_max: f64,
    pub baselines: usize,
    pub N_per_setting: u64,
    pub seed: u64,
    pub low_confidence: usize,
}

impl Summary {
    pub fn new(scenario: &Scenario, report: &ImagingReport) -> Self {
        Self {
            channel: scenario.channel.name(),
            xi: report.xi,
            C: report.c,
            R_M_norm: report.r_m_norm,
            R_M: report.r_m_norm * scenario.rates.r_e() * scenario.rates.r_t(),
            dVa_scale: report.dva_scale,
            dVp_scale: report.dvp_scale,
            dI_scale: report.intensity_error.scale,
            dI: report.intensity_error.d_i,
            regime: report.intensity_error.regime.as_str(),
            resolution: report.resolution,
            B_max: scenario.plan.b_max(),
            baselines: scenario.plan.baselines().len(),
            N_per_setting: scenario.obs.trials,
            seed: scenario.obs.seed,
            low_confidence: report.low_confidence,
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Runs the imaging pipeline and writes the three report files. Returns
/// the output directory.
pub fn cmd_run(config: &Path, out: Option<&Path>, gnuplot: bool) -> Result<PathBuf, CliError> {
    let scenario = ScenarioConfig::load(config)?.validate()?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| scenario.output.clone());
    let report = observe_and_image(
        &scenario.sky,
        &scenario.plan,
        &scenario.resource,
        &scenario.obs,
        &scenario.theta_grid,
    )?;
    prepare_dir(&dir)?;
    output::write_visibility_csv(&dir.join(output::VISIBILITY_CSV), &report)?;
    output::write_intensity_csv(&dir.join(output::INTENSITY_CSV), &report)?;
    output::write_json(&dir.join(output::SUMMARY_JSON), &Summary::new(&scenario, &report))?;
    if gnuplot {
        let path = dir.join(output::GNUPLOT_SCRIPT);
        fs::write(&path, output::run_gnuplot_script()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(dir)
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::config("--values", format!("`{s}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::config("--values", "no values given"));
    }
    Ok(values)
}

fn is_baseline(param: &str) -> bool {
    matches!(param, "B" | "L")
}

fn sweep_point(scenario: &Scenario, baseline: f64, value: f64) -> Result<SweepRow, CliError> {
    if !(baseline.is_finite() && baseline >= 0.0) {
        return Err(CliError::config("--values", format!("baseline must be non-negative, got {baseline}")));
    }
    let x = scenario.resource.resource_at(baseline)?;
    let xi = x.subspace_weight();
    let c = match x.concurrence_subspace() {
        Ok(c) => c,
        Err(Error::DegenerateResource) => f64::NAN,
        Err(e) => return Err(e.into()),
    };
    let r_m_norm = scenario.resource.normalized_rate_at(baseline)?;
    let r_m = r_m_norm * scenario.rates.r_e() * scenario.rates.r_t();
    let rmse = match scenario.replicas {
        None => None,
        Some(replicas) => {
            let v = AstroVisibility::from_complex(true_visibility(&scenario.sky, baseline))?;
            match replicate_rmse(&v, &x, &scenario.obs.settings, scenario.obs.trials, replicas, scenario.obs.seed) {
                Ok(r) => Some(r),
                Err(Error::ZeroConcurrence(_)) | Err(Error::DegenerateResource) => Some((f64::NAN, f64::NAN)),
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(SweepRow {
        value,
        xi,
        c,
        r_m_norm,
        ln_rate: r_m.ln(),
        log10_rate: r_m.log10(),
        rmse,
    })
}

/// Evaluates one row per value. `B` (alias `L`) sets the baseline; any
/// other parameter overrides the config and is evaluated at the longest
/// planned baseline.
pub fn sweep_rows(config: &ScenarioConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let base = if is_baseline(param) { Some(config.validate()?) } else { None };
    values
        .par_iter()
        .map(|&value| match &base {
            Some(scenario) => sweep_point(scenario, value, value),
            None => {
                let mut cfg = config.clone();
                cfg.set_param(param, value)?;
                let scenario = cfg.validate()?;
                sweep_point(&scenario, scenario.plan.b_max(), value)
            }
        })
        .collect()
}

pub fn cmd_sweep(
    config: &Path,
    param: &str,
    values: &str,
    out: Option<&Path>,
    gnuplot: bool,
) -> Result<PathBuf, CliError> {
    let cfg = ScenarioConfig::load(config)?;
    let values = parse_values(values)?;
    let rows = sweep_rows(&cfg, param, &values)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => cfg.validate()?.output,
    };
    prepare_dir(&dir)?;
    output::write_sweep_csv(&dir.join(output::SWEEP_CSV), param, &rows)?;
    if gnuplot {
        let path = dir.join(output::GNUPLOT_SCRIPT);
        let script = output::sweep_gnuplot_script(param, rows.iter().any(|r| r.rmse.is_some()));
        fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(dir)
}
