use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{wrap_phase, DensityMatrix4};
use crate::error::{Error, Result};

/// Slack on the normalization and positivity constraints of [`XState`].
pub const XSTATE_TOL: f64 = 1e-9;

/// Two-qubit X-state:
///
/// ```text
/// ⎛ a                0               0              e^{-i z_p} z_a ⎞
/// ⎜ 0                g               e^{-i w_p} w_a 0              ⎟
/// ⎜ 0                e^{i w_p} w_a   f              0              ⎟
/// ⎝ e^{i z_p} z_a    0               0              h              ⎠
/// ```
///
/// Fields are public for convenience; [`XState::validated`] checks the
/// normalization and positivity constraints and should be used whenever a
/// state is assembled by hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub a: f64,
    pub g: f64,
    pub f: f64,
    pub h: f64,
    pub w_a: f64,
    pub w_p: f64,
    pub z_a: f64,
    pub z_p: f64,
}

impl XState {
    /// The ideal |ψ⟩ resource with coherence phase `w_p` (ψ+ at 0, ψ- at π).
    pub fn bell(w_p: f64) -> Self {
        Self {
            a: 0.0,
            g: 0.5,
            f: 0.5,
            h: 0.0,
            w_a: 0.5,
            w_p: wrap_phase(w_p),
            z_a: 0.0,
            z_p: 0.0,
        }
    }

    /// A state supported on |00⟩ and the single-excitation block only
    /// (`h = 0`, `z_a = 0`, `a = 1 - g - f`).
    pub fn single_excitation(g: f64, f: f64, w_a: f64, w_p: f64) -> Result<Self> {
        Self {
            a: 1.0 - g - f,
            g,
            f,
            h: 0.0,
            w_a,
            w_p: wrap_phase(w_p),
            z_a: 0.0,
            z_p: 0.0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let fields = [
            self.a, self.g, self.f, self.h, self.w_a, self.w_p, self.z_a, self.z_p,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("X-state has a non-finite parameter".into()));
        }
        for (name, p) in [("a", self.a), ("g", self.g), ("f", self.f), ("h", self.h)] {
            if !(-XSTATE_TOL..=1.0 + XSTATE_TOL).contains(&p) {
                return Err(Error::InvalidState(format!(
                    "population {name} = {p} outside [0, 1]"
                )));
            }
        }
        let total = self.a + self.g + self.f + self.h;
        if (total - 1.0).abs() > XSTATE_TOL {
            return Err(Error::InvalidState(format!(
                "populations sum to {total}, not 1"
            )));
        }
        if self.w_a < 0.0 || self.z_a < 0.0 {
            return Err(Error::InvalidState(
                "coherence magnitudes must be non-negative".into(),
            ));
        }
        let w_max = (self.g.max(0.0) * self.f.max(0.0)).sqrt();
        if self.w_a > w_max + XSTATE_TOL {
            return Err(Error::InvalidState(format!(
                "w_a = {} exceeds √(g f) = {w_max}",
                self.w_a
            )));
        }
        let z_max = (self.a.max(0.0) * self.h.max(0.0)).sqrt();
        if self.z_a > z_max + XSTATE_TOL {
            return Err(Error::InvalidState(format!(
                "z_a = {} exceeds √(a h) = {z_max}",
                self.z_a
            )));
        }
        Ok(self)
    }

    pub fn to_density(&self) -> DensityMatrix4 {
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = Complex64::new(self.a, 0.0);
        m[(1, 1)] = Complex64::new(self.g, 0.0);
        m[(2, 2)] = Complex64::new(self.f, 0.0);
        m[(3, 3)] = Complex64::new(self.h, 0.0);
        m[(1, 2)] = Complex64::from_polar(self.w_a, -self.w_p);
        m[(2, 1)] = Complex64::from_polar(self.w_a, self.w_p);
        m[(0, 3)] = Complex64::from_polar(self.z_a, -self.z_p);
        m[(3, 0)] = Complex64::from_polar(self.z_a, self.z_p);
        DensityMatrix4::from_matrix_unchecked(m)
    }

    /// ξ = g + f, the weight in the single-excitation subspace.
    pub fn subspace_weight(&self) -> f64 {
        self.g + self.f
    }

    /// C = 2 w_a / (g + f), the concurrence of the resource restricted to
    /// the single-excitation subspace. This is the quantity that sets the
    /// fringe contrast after postselection.
    pub fn concurrence_subspace(&self) -> Result<f64> {
        let xi = self.subspace_weight();
        if xi <= 0.0 {
            return Err(Error::DegenerateResource);
        }
        Ok(2.0 * self.w_a / xi)
    }

    /// Full two-qubit X-state concurrence,
    /// 2 max(0, w_a - √(a h), z_a - √(g f)).
    pub fn concurrence_wootters(&self) -> f64 {
        let a = self.w_a - (self.a.max(0.0) * self.h.max(0.0)).sqrt();
        let b = self.z_a - (self.g.max(0.0) * self.f.max(0.0)).sqrt();
        2.0 * a.max(b).max(0.0)
    }

    /// Same state with the single-excitation coherence phase shifted by
    /// `delta`; magnitudes are untouched.
    pub fn with_phase_offset(&self, delta: f64) -> Self {
        Self {
            w_p: wrap_phase(self.w_p + delta),
            ..*self
        }
    }
}

/// Reads the X-state parameters out of a density matrix.
///
/// Fails with [`Error::NotXForm`] if any entry off the main and
/// anti-diagonal exceeds `tol`. Phases are taken from the lower-left
/// entries, (|10⟩,|01⟩) for `w_p` and (|11⟩,|00⟩) for `z_p`.
pub fn extract_xstate(rho: &DensityMatrix4, tol: f64) -> Result<XState> {
    let off = rho.max_off_x_entry();
    if off > tol {
        return Err(Error::NotXForm(off));
    }
    let split = |z: Complex64| {
        let mag = z.norm();
        let phase = if mag == 0.0 { 0.0 } else { wrap_phase(z.arg()) };
        (mag, phase)
    };
    let (w_a, w_p) = split(rho.entry(2, 1));
    let (z_a, z_p) = split(rho.entry(3, 0));
    Ok(XState {
        a: rho.entry(0, 0).re,
        g: rho.entry(1, 1).re,
        f: rho.entry(2, 2).re,
        h: rho.entry(3, 3).re,
        w_a,
        w_p,
        z_a,
        z_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_independent_channels, kraus_dephasing, make_bell_psi};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn extract_from_dephased_bell() {
        let ch = kraus_dephasing(0.5).unwrap();
        let rho = apply_independent_channels(&make_bell_psi(0.0), &ch, &ch);
        let x = extract_xstate(&rho, 1e-12).unwrap();
        assert_abs_diff_eq!(x.w_a, 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(x.g, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x.f, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x.a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.h, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.concurrence_subspace().unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn extract_bell_phase_matches_delta() {
        for delta in [0.0, 0.4, -2.0, PI] {
            let x = extract_xstate(&make_bell_psi(delta), 1e-12).unwrap();
            assert_abs_diff_eq!(x.w_a, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(x.w_p, wrap_phase(delta), epsilon = 1e-12);
        }
    }

    #[test]
    fn extract_rejects_non_x() {
        let mut m = *make_bell_psi(0.0).matrix();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        m[(1, 0)] = Complex64::new(0.1, 0.0);
        let rho = DensityMatrix4::from_matrix_unchecked(m);
        match extract_xstate(&rho, 1e-12) {
            Err(Error::NotXForm(mag)) => assert_abs_diff_eq!(mag, 0.1, epsilon = 1e-15),
            other => panic!("expected NotXForm, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_through_density() {
        let x = XState {
            a: 0.1,
            g: 0.35,
            f: 0.3,
            h: 0.25,
            w_a: 0.2,
            w_p: -1.3,
            z_a: 0.12,
            z_p: 2.2,
        }
        .validated()
        .unwrap();
        let rho = x.to_density();
        rho.validate().unwrap();
        let back = extract_xstate(&rho, 1e-14).unwrap();
        assert!(back.to_density().max_abs_diff(&rho) <= 1e-15);
        assert_abs_diff_eq!(back.w_p, x.w_p, epsilon = 1e-14);
        assert_abs_diff_eq!(back.z_p, x.z_p, epsilon = 1e-14);
    }

    #[test]
    fn concurrences() {
        let bell = XState::bell(0.0);
        assert_eq!(bell.concurrence_subspace().unwrap(), 1.0);
        assert_abs_diff_eq!(bell.concurrence_wootters(), 1.0, epsilon = 1e-15);
        assert_eq!(bell.subspace_weight(), 1.0);

        let dephased = XState::single_excitation(0.5, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(dephased.concurrence_wootters(), 0.0);

        // Depolarized Bell pair with x = 0.1: g = f = 0.4, w_a = 0.3, a = h = 0.1.
        let depol = XState {
            a: 0.1,
            g: 0.4,
            f: 0.4,
            h: 0.1,
            w_a: 0.3,
            w_p: 0.0,
            z_a: 0.0,
            z_p: 0.0,
        };
        assert_abs_diff_eq!(depol.concurrence_wootters(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(depol.concurrence_subspace().unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn wootters_matches_subspace_when_ah_vanishes() {
        let x = XState::single_excitation(0.3, 0.45, 0.2, 0.9).unwrap();
        let c = x.concurrence_subspace().unwrap();
        assert_abs_diff_eq!(x.concurrence_wootters(), c * x.subspace_weight(), epsilon = 1e-15);
    }

    #[test]
    fn degenerate_resource() {
        let x = XState::single_excitation(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(x.concurrence_subspace(), Err(Error::DegenerateResource));
    }

    #[test]
    fn validation_failures() {
        assert!(XState::single_excitation(0.5, 0.5, 0.6, 0.0).is_err());
        assert!(XState::single_excitation(0.7, 0.5, 0.1, 0.0).is_err());
        let mut x = XState::bell(0.0);
        x.z_a = 0.01;
        assert!(x.validated().is_err());
    }
}
