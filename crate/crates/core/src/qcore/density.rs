use std::f64::consts::{PI, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-10;

/// Wraps an angle into the canonical range (-π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p > PI {
        p - TAU
    } else {
        p
    }
}

/// Two-mode single-photon density matrix in the basis |00⟩, |01⟩, |10⟩, |11⟩.
///
/// The first slot is the left arm, the second the right arm, and the left
/// occupation is the most significant bit of the row index. Construction
/// through [`DensityMatrix4::new`] checks Hermiticity, unit trace and
/// positivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl DensityMatrix4 {
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|r, c| rows[r][c]))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<Complex64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entrywise deviation from Hermiticity, max |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.0.adjoint();
        (0..16)
            .map(|i| (self.0[i] - adj[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = herm.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }

    /// Largest magnitude among entries off both the main and the anti-diagonal.
    pub fn max_off_x_entry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                if r != c && r + c != 3 {
                    worst = worst.max(self.0[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix4) -> f64 {
        (0..16)
            .map(|i| (self.0[i] - other.0[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = self.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < PSD_FLOOR {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min_ev:e})"
            )));
        }
        Ok(())
    }

    /// Nested `[re, im]` pairs, row-major, for JSON reports.
    pub fn to_pairs(&self) -> [[[f64; 2]; 4]; 4] {
        let mut out = [[[0.0; 2]; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let z = self.0[(r, c)];
                *cell = [z.re, z.im];
            }
        }
        out
    }
}

/// Complex visibility V_a e^{i V_p} of the astronomical photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AstroVisibility {
    amplitude: f64,
    phase: f64,
}

impl AstroVisibility {
    /// Amplitudes up to 1 + 1e-12 are clamped to 1 to absorb rounding in
    /// flux-normalized sums; anything larger is an unphysical coherence.
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !amplitude.is_finite() || !(0.0..=1.0 + 1e-12).contains(&amplitude) {
            return Err(Error::InvalidParameter {
                name: "V_a",
                value: amplitude,
                reason: "visibility amplitude must lie in [0, 1]",
            });
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                name: "V_p",
                value: phase,
                reason: "visibility phase must be finite",
            });
        }
        Ok(Self {
            amplitude: amplitude.min(1.0),
            phase: wrap_phase(phase),
        })
    }

    pub fn from_complex(v: Complex64) -> Result<Self> {
        let amp = v.norm();
        let phase = if amp == 0.0 { 0.0 } else { v.arg() };
        Self::new(amp, phase)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Bell resource ½(|01⟩ + e^{iδ}|10⟩)(h.c.), with e^{-iδ} at (|01⟩, |10⟩).
pub fn make_bell_psi(delta: f64) -> DensityMatrix4 {
    let mut m = Matrix4::zeros();
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(2, 2)] = Complex64::new(0.5, 0.0);
    m[(1, 2)] = Complex64::from_polar(0.5, -delta);
    m[(2, 1)] = Complex64::from_polar(0.5, delta);
    DensityMatrix4::from_matrix_unchecked(m)
}

/// Astronomical single-photon state: populations ½ on |01⟩, |10⟩ and
/// coherence ½ V_a e^{i V_p} at (|01⟩, |10⟩).
pub fn make_astro_state(v: &AstroVisibility) -> DensityMatrix4 {
    let mut m = Matrix4::zeros();
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(2, 2)] = Complex64::new(0.5, 0.0);
    m[(1, 2)] = Complex64::from_polar(0.5 * v.amplitude, v.phase);
    m[(2, 1)] = Complex64::from_polar(0.5 * v.amplitude, -v.phase);
    DensityMatrix4::from_matrix_unchecked(m)
}
