//! Scenario configuration: JSON schema, validation and sweep overrides.
//!
//! Every validation failure names the offending key as a dotted path
//! (`channel.kappa_L`, `sky.sources[1].theta`).

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use entbase::channels::{BellSign, MemoryPair, RateModel, ResourceModel};
use entbase::imaging::{resolution, symmetric_grid, BaselinePlan, ObservationPlan, PointSource, SkyModel, MAX_THETA};
use entbase::protocol::{PhaseSettings, MIN_SETTING_SEPARATION};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const DEFAULT_GRID_POINTS: usize = 241;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sky: SkySpec,
    pub baselines: BaselineSpec,
    pub channel: ChannelSpec,
    #[serde(default)]
    pub phase_settings: PhaseSpec,
    #[serde(rename = "N_per_setting")]
    pub n_per_setting: u64,
    #[serde(default)]
    pub rates: RatesSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkySpec {
    pub wavelength: f64,
    pub sources: Vec<SourceSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub theta: f64,
    pub flux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaselineSpec {
    List(Vec<f64>),
    Range(BaselineRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineRange {
    #[serde(rename = "B_max")]
    pub b_max: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Ideal,
    AmplitudeDamping,
    Dephasing,
    Depolarizing,
    MemorySwap,
    CustomRate,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Ideal => "ideal",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::MemorySwap => "memory_swap",
            ChannelKind::CustomRate => "custom_rate",
        }
    }
}

/// Flat channel block; which keys are required depends on `kind`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_L: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_R: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub L0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_L: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_R: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_L: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_R: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_table: Option<Vec<[f64; 2]>>,
}

impl ChannelSpec {
    pub fn ideal() -> Self {
        Self {
            kind: ChannelKind::Ideal,
            lambda_L: None,
            lambda_R: None,
            L0: None,
            mu_L: None,
            mu_R: None,
            kappa_L: None,
            kappa_R: None,
            beta: None,
            t1: None,
            t2: None,
            tau_c: None,
            sign: None,
            rate_table: None,
        }
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut push = |name, present: bool| {
            if present {
                keys.push(name);
            }
        };
        push("lambda_L", self.lambda_L.is_some());
        push("lambda_R", self.lambda_R.is_some());
        push("L0", self.L0.is_some());
        push("mu_L", self.mu_L.is_some());
        push("mu_R", self.mu_R.is_some());
        push("kappa_L", self.kappa_L.is_some());
        push("kappa_R", self.kappa_R.is_some());
        push("beta", self.beta.is_some());
        push("t1", self.t1.is_some());
        push("t2", self.t2.is_some());
        push("tau_c", self.tau_c.is_some());
        push("sign", self.sign.is_some());
        push("rate_table", self.rate_table.is_some());
        keys
    }

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "lambda_L" => &mut self.lambda_L,
            "lambda_R" => &mut self.lambda_R,
            "L0" => &mut self.L0,
            "mu_L" => &mut self.mu_L,
            "mu_R" => &mut self.mu_R,
            "kappa_L" => &mut self.kappa_L,
            "kappa_R" => &mut self.kappa_R,
            "beta" => &mut self.beta,
            "t1" => &mut self.t1,
            "t2" => &mut self.t2,
            "tau_c" => &mut self.tau_c,
            _ => return None,
        })
    }

    /// Checks the keys allowed for `kind` and builds the resource model.
    pub fn to_resource(&self) -> Result<ResourceModel, CliError> {
        let present = self.present_keys();
        let allowed: &[&[&str]] = match self.kind {
            ChannelKind::Ideal => &[&[]],
            ChannelKind::AmplitudeDamping => &[&["lambda_L", "lambda_R"], &["L0"]],
            ChannelKind::Dephasing => &[&["mu_L", "mu_R"]],
            ChannelKind::Depolarizing => &[&["kappa_L", "kappa_R"], &["beta"]],
            ChannelKind::MemorySwap => &[&["t1", "t2", "tau_c", "sign"]],
            ChannelKind::CustomRate => &[&["rate_table"]],
        };
        // Pick the parameter set sharing a key with the config, else the first.
        let set = allowed
            .iter()
            .find(|s| s.iter().any(|k| present.contains(k)))
            .unwrap_or(&allowed[0]);
        if let Some(extra) = present.iter().find(|k| !set.contains(k)) {
            return Err(CliError::config(
                format!("channel.{extra}"),
                format!("not a parameter of channel kind `{}` with keys {:?}", self.kind.name(), set),
            ));
        }
        if let Some(missing) = set.iter().find(|k| !present.contains(k)) {
            return Err(CliError::config(
                format!("channel.{missing}"),
                format!("required by channel kind `{}`", self.kind.name()),
            ));
        }

        let get = |key: &str, v: Option<f64>| (format!("channel.{key}"), v.unwrap_or(f64::NAN));
        let prob = |key: &str, v: Option<f64>| {
            let (path, x) = get(key, v);
            probability(&path, x)
        };
        let pos = |key: &str, v: Option<f64>| {
            let (path, x) = get(key, v);
            positive(&path, x)
        };
        let nonneg = |key: &str, v: Option<f64>| {
            let (path, x) = get(key, v);
            non_negative(&path, x)
        };

        Ok(match self.kind {
            ChannelKind::Ideal => ResourceModel::Ideal,
            ChannelKind::AmplitudeDamping => match self.L0 {
                Some(_) => ResourceModel::LossyFiber {
                    attenuation_length: pos("L0", self.L0)?,
                },
                None => ResourceModel::AmplitudeDamping {
                    lambda_l: prob("lambda_L", self.lambda_L)?,
                    lambda_r: prob("lambda_R", self.lambda_R)?,
                },
            },
            ChannelKind::Dephasing => ResourceModel::Dephasing {
                mu_l: prob("mu_L", self.mu_L)?,
                mu_r: prob("mu_R", self.mu_R)?,
            },
            ChannelKind::Depolarizing => match self.beta {
                Some(_) => ResourceModel::DepolarizingFiber {
                    beta: pos("beta", self.beta)?,
                },
                None => ResourceModel::Depolarizing {
                    kappa_l: prob("kappa_L", self.kappa_L)?,
                    kappa_r: prob("kappa_R", self.kappa_R)?,
                },
            },
            ChannelKind::MemorySwap => {
                let sign = match self.sign {
                    Some(1) => BellSign::Plus,
                    Some(-1) => BellSign::Minus,
                    other => {
                        return Err(CliError::config(
                            "channel.sign",
                            format!("must be +1 or -1, got {other:?}"),
                        ))
                    }
                };
                let pair = MemoryPair::new(
                    nonneg("t1", self.t1)?,
                    nonneg("t2", self.t2)?,
                    pos("tau_c", self.tau_c)?,
                    sign,
                )?;
                ResourceModel::MemorySwap { pair }
            }
            ChannelKind::CustomRate => {
                let table: Vec<(f64, f64)> = self
                    .rate_table
                    .as_deref()
                    .unwrap_or_default()
                    .iter()
                    .map(|r| (r[0], r[1]))
                    .collect();
                let model = ResourceModel::CustomRate { table };
                model
                    .validate()
                    .map_err(|e| CliError::config("channel.rate_table", e.to_string()))?;
                model
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    pub w1: f64,
    pub w2: f64,
}

impl Default for PhaseSpec {
    fn default() -> Self {
        Self { w1: 0.0, w2: FRAC_PI_2 }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSpec {
    pub R_E: f64,
    pub R_T: f64,
}

impl Default for RatesSpec {
    fn default() -> Self {
        Self { R_E: 1.0, R_T: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub replicas: u64,
}

fn probability(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be a probability in [0, 1], got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be non-negative and finite, got {v}")))
    }
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub sky: SkyModel,
    pub plan: BaselinePlan,
    pub resource: ResourceModel,
    pub channel: ChannelKind,
    pub obs: ObservationPlan,
    pub rates: RateModel,
    pub theta_grid: Vec<f64>,
    pub replicas: Option<u64>,
    pub output: PathBuf,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "(root)".to_string() } else { path }, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("(file)", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn sky_model(&self) -> Result<SkyModel, CliError> {
        let wavelength = positive("sky.wavelength", self.sky.wavelength)?;
        if self.sky.sources.is_empty() {
            return Err(CliError::config("sky.sources", "at least one source is required"));
        }
        let mut sources = Vec::with_capacity(self.sky.sources.len());
        for (i, s) in self.sky.sources.iter().enumerate() {
            if !s.theta.is_finite() || s.theta.abs() > MAX_THETA {
                return Err(CliError::config(
                    format!("sky.sources[{i}].theta"),
                    format!("must satisfy |theta| <= {MAX_THETA} rad, got {}", s.theta),
                ));
            }
            sources.push(PointSource {
                theta: s.theta,
                flux: non_negative(&format!("sky.sources[{i}].flux"), s.flux)?,
            });
        }
        SkyModel::new(sources, wavelength).map_err(|e| CliError::config("sky.sources", e.to_string()))
    }

    pub fn baseline_plan(&self) -> Result<BaselinePlan, CliError> {
        match &self.baselines {
            BaselineSpec::List(list) => {
                if list.len() < 2 {
                    return Err(CliError::config("baselines", "need at least two baselines"));
                }
                for (i, b) in list.iter().enumerate() {
                    positive(&format!("baselines[{i}]"), *b)?;
                }
                BaselinePlan::new(list.clone()).map_err(|e| CliError::config("baselines", e.to_string()))
            }
            BaselineSpec::Range(r) => {
                let b_max = positive("baselines.B_max", r.b_max)?;
                if r.count < 2 {
                    return Err(CliError::config("baselines.count", "need at least two baselines"));
                }
                BaselinePlan::linear(b_max, r.count).map_err(|e| CliError::config("baselines", e.to_string()))
            }
        }
    }

    pub fn phase_settings(&self) -> Result<PhaseSettings, CliError> {
        let w1 = self.phase_settings.w1;
        let w2 = self.phase_settings.w2;
        if !w1.is_finite() {
            return Err(CliError::config("phase_settings.w1", "must be finite"));
        }
        PhaseSettings::new(w1, w2).map_err(|_| {
            CliError::config(
                "phase_settings.w2",
                format!("|sin(w2 - w1)| must be at least {MIN_SETTING_SEPARATION:e}"),
            )
        })
    }

    pub fn rate_model(&self) -> Result<RateModel, CliError> {
        let r_e = probability("rates.R_E", self.rates.R_E)?;
        let r_t = positive("rates.R_T", self.rates.R_T)?;
        Ok(RateModel::new(r_e, r_t)?)
    }

    pub fn validate(&self) -> Result<Scenario, CliError> {
        let sky = self.sky_model()?;
        let plan = self.baseline_plan()?;
        let resource = self.channel.to_resource()?;
        let settings = self.phase_settings()?;
        let rates = self.rate_model()?;
        if self.n_per_setting == 0 {
            return Err(CliError::config("N_per_setting", "must be at least 1"));
        }
        let theta_grid = match self.theta_grid {
            Some(g) => {
                let hw = positive("theta_grid.half_width", g.half_width)?;
                if g.points < 2 {
                    return Err(CliError::config("theta_grid.points", "need at least two points"));
                }
                symmetric_grid(hw, g.points).map_err(|e| CliError::config("theta_grid", e.to_string()))?
            }
            None => {
                let extent = sky.sources().iter().map(|s| s.theta.abs()).fold(0.0, f64::max);
                let beam = resolution(plan.b_max(), sky.wavelength())?;
                symmetric_grid(1.5 * extent + 4.0 * beam, DEFAULT_GRID_POINTS)?
            }
        };
        let replicas = match self.monte_carlo {
            Some(m) if m.replicas == 0 => {
                return Err(CliError::config("monte_carlo.replicas", "must be at least 1"))
            }
            Some(m) => Some(m.replicas),
            None => None,
        };
        Ok(Scenario {
            obs: ObservationPlan {
                settings,
                trials: self.n_per_setting,
                seed: self.seed,
                r_e: rates.r_e(),
            },
            sky,
            plan,
            resource,
            channel: self.channel.kind,
            rates,
            theta_grid,
            replicas,
            output: self.output.clone().unwrap_or_else(|| PathBuf::from("entbase-out")),
        })
    }

    /// Overrides one numeric parameter for a sweep point. `B` and `L` are
    /// handled by the sweep itself and rejected here.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        let integer = |key: &str| -> Result<u64, CliError> {
            if value.is_finite() && value >= 0.0 && value.fract() == 0.0 {
                Ok(value as u64)
            } else {
                Err(CliError::config(key, format!("must be a non-negative integer, got {value}")))
            }
        };
        match name {
            "N_per_setting" => self.n_per_setting = integer("N_per_setting")?,
            "seed" => self.seed = integer("seed")?,
            "replicas" => {
                self.monte_carlo = Some(MonteCarloSpec {
                    replicas: integer("monte_carlo.replicas")?,
                })
            }
            "R_E" => self.rates.R_E = value,
            "R_T" => self.rates.R_T = value,
            "w1" => self.phase_settings.w1 = value,
            "w2" => self.phase_settings.w2 = value,
            "wavelength" => self.sky.wavelength = value,
            "lambda" | "mu" | "kappa" => {
                for arm in ["L", "R"] {
                    self.set_param(&format!("{name}_{arm}"), value)?;
                }
            }
            "sign" => {
                self.channel.sign = Some(if value == 1.0 {
                    1
                } else if value == -1.0 {
                    -1
                } else {
                    return Err(CliError::config("channel.sign", format!("must be +1 or -1, got {value}")));
                })
            }
            other => match self.channel.slot(other) {
                Some(slot) => *slot = Some(value),
                None => {
                    return Err(CliError::config(
                        "--param",
                        format!("`{other}` is not a sweepable parameter"),
                    ))
                }
            },
        }
        Ok(())
    }
}
