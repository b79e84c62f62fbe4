//! Physical decoherence scenarios for the entanglement-distribution network.
//!
//! Closed-form X-states for lossy, dephasing and depolarizing arms, the
//! fiber and memory parameter maps, entanglement swapping of
//! memory-dephased pairs, and the measurement-rate model. The closed forms
//! here are cross-checked against Kraus composition in `qcore`.

mod resource;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, check_probability, Error, Result};
use crate::qcore::{
    extract_xstate, make_bell_psi, DensityMatrix4, KrausChannel, XState,
};

pub use resource::ResourceModel;

/// Fiber arms from the network source to the two telescopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberLink {
    pub left: f64,
    pub right: f64,
}

impl FiberLink {
    /// Equal arms of length `baseline / 2`.
    pub fn symmetric(baseline: f64) -> Result<Self> {
        let b = check_non_negative("B", baseline)?;
        Ok(Self {
            left: b / 2.0,
            right: b / 2.0,
        })
    }

    pub fn new(left: f64, right: f64) -> Result<Self> {
        Ok(Self {
            left: check_non_negative("L_L", left)?,
            right: check_non_negative("L_R", right)?,
        })
    }

    /// Amplitude-damped Bell pair for attenuation length `l0`.
    pub fn amplitude_damped(&self, l0: f64) -> Result<XState> {
        xstate_amplitude_damping(fiber_loss_prob(self.left, l0)?, fiber_loss_prob(self.right, l0)?)
    }

    /// Depolarized Bell pair for inverse depolarization length `beta`;
    /// each arm of length ℓ depolarizes with probability 1 - e^{-βℓ}.
    pub fn depolarized(&self, beta: f64) -> Result<XState> {
        xstate_depolarizing(
            depol_prob(2.0 * self.left, beta)?,
            depol_prob(2.0 * self.right, beta)?,
        )
    }
}

/// Heralded Bell-measurement outcome, ψ+ or ψ-.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellSign {
    Plus,
    Minus,
}

impl BellSign {
    pub fn phase(self) -> f64 {
        match self {
            BellSign::Plus => 0.0,
            BellSign::Minus => std::f64::consts::PI,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BellSign::Plus => BellSign::Minus,
            BellSign::Minus => BellSign::Plus,
        }
    }
}

/// Two memory-stored halves awaiting an entanglement swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryPair {
    pub t1: f64,
    pub t2: f64,
    pub tau_c: f64,
    pub sign: BellSign,
}

impl MemoryPair {
    pub fn new(t1: f64, t2: f64, tau_c: f64, sign: BellSign) -> Result<Self> {
        Ok(Self {
            t1: check_non_negative("t1", t1)?,
            t2: check_non_negative("t2", t2)?,
            tau_c: check_positive("tau_c", tau_c)?,
            sign,
        })
    }

    pub fn swapped(&self) -> Result<XState> {
        swap_memories(self.t1, self.t2, self.tau_c, self.sign)
    }
}

/// Entangled-photon supply `r_e` (per incoming astronomical mode) and
/// target photon flux `r_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    r_e: f64,
    r_t: f64,
}

impl RateModel {
    pub fn new(r_e: f64, r_t: f64) -> Result<Self> {
        Ok(Self {
            r_e: check_probability("R_E", r_e)?,
            r_t: check_positive("R_T", r_t)?,
        })
    }

    pub fn r_e(&self) -> f64 {
        self.r_e
    }

    pub fn r_t(&self) -> f64 {
        self.r_t
    }

    /// R_M^(0) = R_E R_T / 2, the rate with an undecohered resource.
    pub fn max_measurement_rate(&self) -> f64 {
        self.r_e * self.r_t / 2.0
    }
}

/// Amplitude damping with loss probabilities `lambda_l`, `lambda_r` on ψ+.
pub fn xstate_amplitude_damping(lambda_l: f64, lambda_r: f64) -> Result<XState> {
    let ll = check_probability("lambda_L", lambda_l)?;
    let lr = check_probability("lambda_R", lambda_r)?;
    Ok(XState {
        a: (ll + lr) / 2.0,
        g: (1.0 - lr) / 2.0,
        f: (1.0 - ll) / 2.0,
        h: 0.0,
        w_a: ((1.0 - ll) * (1.0 - lr)).sqrt() / 2.0,
        w_p: 0.0,
        z_a: 0.0,
        z_p: 0.0,
    })
}

/// Dephasing with probabilities `mu_l`, `mu_r` on ψ+.
pub fn xstate_dephasing(mu_l: f64, mu_r: f64) -> Result<XState> {
    let ml = check_probability("mu_L", mu_l)?;
    let mr = check_probability("mu_R", mu_r)?;
    Ok(XState {
        a: 0.0,
        g: 0.5,
        f: 0.5,
        h: 0.0,
        w_a: (1.0 - ml) * (1.0 - mr) / 2.0,
        w_p: 0.0,
        z_a: 0.0,
        z_p: 0.0,
    })
}

/// x = (κ_L + κ_R)/3 - 4 κ_L κ_R / 9, always within [0, 1/3].
pub fn depolarizing_x(kappa_l: f64, kappa_r: f64) -> Result<f64> {
    let kl = check_probability("kappa_L", kappa_l)?;
    let kr = check_probability("kappa_R", kappa_r)?;
    Ok((kl + kr) / 3.0 - 4.0 * kl * kr / 9.0)
}

/// True when the depolarized coherence ½ - 2x has turned negative (x > ¼),
/// which [`xstate_depolarizing`] represents with `w_p = π`.
pub fn depolarizing_coherence_inverted(kappa_l: f64, kappa_r: f64) -> Result<bool> {
    Ok(0.5 - 2.0 * depolarizing_x(kappa_l, kappa_r)? < 0.0)
}

/// Depolarization with probabilities `kappa_l`, `kappa_r` on ψ+.
pub fn xstate_depolarizing(kappa_l: f64, kappa_r: f64) -> Result<XState> {
    let x = depolarizing_x(kappa_l, kappa_r)?;
    let coherence = 0.5 - 2.0 * x;
    Ok(XState {
        a: x,
        g: 0.5 - x,
        f: 0.5 - x,
        h: x,
        w_a: coherence.abs(),
        w_p: if coherence < 0.0 { std::f64::consts::PI } else { 0.0 },
        z_a: 0.0,
        z_p: 0.0,
    })
}

/// Photon-loss probability 1 - e^{-L/L0} of a fiber of length `length`.
pub fn fiber_loss_prob(length: f64, l0: f64) -> Result<f64> {
    let length = check_non_negative("L", length)?;
    let l0 = check_positive("L0", l0)?;
    Ok(-(-length / l0).exp_m1())
}

/// Per-arm depolarization probability 1 - e^{-βL/2} for a link of total
/// length `length`.
pub fn depol_prob(length: f64, beta: f64) -> Result<f64> {
    let length = check_non_negative("L", length)?;
    let beta = check_positive("beta", beta)?;
    Ok(-(-beta * length / 2.0).exp_m1())
}

/// p(t) = (1 + e^{-t/τ_c}) / 2, the weight kept on the stored Bell state.
pub fn bell_persistence(t: f64, tau_c: f64) -> Result<f64> {
    let t = check_non_negative("t", t)?;
    let tau_c = check_positive("tau_c", tau_c)?;
    Ok((1.0 + (-t / tau_c).exp()) / 2.0)
}

/// Single-memory dephasing Γ_t: Pauli-Z with probability 1 - p(t/2).
pub fn memory_dephasing_channel(t: f64, tau_c: f64) -> Result<KrausChannel> {
    KrausChannel::phase_flip(1.0 - bell_persistence(t / 2.0, tau_c)?)
}

/// Bell pair ψ± after both halves sat in memory for time `t`.
pub fn memory_xstate(t: f64, tau_c: f64, sign: BellSign) -> Result<XState> {
    let t = check_non_negative("t", t)?;
    let tau_c = check_positive("tau_c", tau_c)?;
    Ok(XState {
        w_a: 0.5 * (-t / tau_c).exp(),
        ..XState::bell(sign.phase())
    })
}

/// Entanglement swap of two memory-dephased pairs stored for `t1` and `t2`.
///
/// Builds the Bell-diagonal mixture p(t1+t2) ρ^{ψ±} + (1 - p(t1+t2)) ρ^{ψ∓}
/// for the heralded sign and reads it back as an X-state.
pub fn swap_memories(t1: f64, t2: f64, tau_c: f64, outcome: BellSign) -> Result<XState> {
    let t1 = check_non_negative("t1", t1)?;
    let t2 = check_non_negative("t2", t2)?;
    let p = bell_persistence(t1 + t2, tau_c)?;
    let kept = make_bell_psi(outcome.phase());
    let flipped = make_bell_psi(outcome.flipped().phase());
    let mix = kept.matrix() * num_complex::Complex64::new(p, 0.0)
        + flipped.matrix() * num_complex::Complex64::new(1.0 - p, 0.0);
    let rho = DensityMatrix4::new(mix)?;
    extract_xstate(&rho, 1e-12)
}

/// R_M / (R_E R_T) = ξ / 2.
pub fn normalized_rate(xi: f64) -> f64 {
    xi / 2.0
}

/// R_M = ξ R_E R_T / 2.
pub fn measurement_rate(xi: f64, rates: &RateModel) -> f64 {
    xi * rates.max_measurement_rate()
}

/// Postselected events collected in the time an ideal resource would
/// deliver `ideal_events`: round(ξ · ideal_events), at least one.
pub fn postselected_events(xi: f64, ideal_events: u64) -> u64 {
    ((xi * ideal_events as f64).round() as u64).max(1)
}

/// ln R_M for equal fiber arms over baseline `baseline`:
/// ln(R_E R_T / 2) - B / (2 L0).
pub fn log_rate_fiber(baseline: f64, l0: f64, rates: &RateModel) -> Result<f64> {
    let b = check_non_negative("B", baseline)?;
    let l0 = check_positive("L0", l0)?;
    Ok(rates.max_measurement_rate().ln() - b / (2.0 * l0))
}

/// Large-length expansion of the depolarizing-fiber rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolRateApprox {
    pub ln_rate: f64,
    /// e^{-βL} ≤ 0.01, where the expansion is meant to be used.
    pub in_regime: bool,
}

/// ln R_M ≈ ln(R_E R_T / 2) + ln(5/9) - 0.8 e^{-βL/2}.
///
/// With κ = 1 - e^{-βL/2} on both arms, ξ = (5 - 4e + 8e²)/9 where
/// e = e^{-βL/2}, so the first-order correction to ln(5/9) is -0.8 e.
pub fn log_rate_depol_approx(length: f64, beta: f64, rates: &RateModel) -> Result<DepolRateApprox> {
    let length = check_non_negative("L", length)?;
    let beta = check_positive("beta", beta)?;
    let e = (-beta * length / 2.0).exp();
    Ok(DepolRateApprox {
        ln_rate: rates.max_measurement_rate().ln() + (5.0f64 / 9.0).ln() - 0.8 * e,
        in_regime: (-beta * length).exp() <= 0.01,
    })
}

/// ln R_M for a resource with subspace weight `xi`.
pub fn log_rate_exact(xi: f64, rates: &RateModel) -> Result<f64> {
    if xi <= 0.0 {
        return Err(Error::DegenerateResource);
    }
    Ok(measurement_rate(xi, rates).ln())
}
