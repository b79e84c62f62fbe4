use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{AstroVisibility, DensityMatrix4, XState};

/// Unnormalized click probabilities for one trial: `q_c` for correlated
/// detector pairs (L1R1, L2R2), `q_ac` for anti-correlated ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawProbabilities {
    pub q_c: f64,
    pub q_ac: f64,
}

impl RawProbabilities {
    /// Probability that the trial survives postselection, ξ/2.
    pub fn total(&self) -> f64 {
        self.q_c + self.q_ac
    }
}

/// Closed form: q_{c,ac} = (ξ ∓ 2 V_a w_a cos(V_p - w_p)) / 4.
pub fn raw_probabilities(v: &AstroVisibility, x: &XState) -> RawProbabilities {
    let xi = x.subspace_weight();
    let fringe = 2.0 * v.amplitude() * x.w_a * (v.phase() - x.w_p).cos();
    RawProbabilities {
        q_c: 0.25 * (xi - fringe),
        q_ac: 0.25 * (xi + fringe),
    }
}

type Mat16 = SMatrix<Complex64, 16, 16>;
type Vec16 = SVector<Complex64, 16>;

/// Brute-force click probabilities from the 16-mode product state.
///
/// `rho_a ⊗ rho_x` is built over the mode order (A^L, A^R, X^L, X^R), then
/// permuted to telescope-major order (A^L, X^L, A^R, X^R) so that each
/// telescope's projector acts on an adjacent pair of modes. Two orientation
/// conventions are fixed here: the astronomical coherence enters conjugated
/// (baseline measured right to left), and the right beam splitter is
/// mirror-mounted, so its "+" port projects onto (|1_A 0_X⟩ - |0_A 1_X⟩)/√2.
/// With these, the traces reproduce [`raw_probabilities`] exactly.
pub fn raw_probabilities_oracle(rho_a: &DensityMatrix4, rho_x: &DensityMatrix4) -> RawProbabilities {
    let a = rho_a.matrix().map(|z| z.conj());
    let product: Mat16 = a.kronecker(rho_x.matrix());

    // bit 3 = A^L, 2 = A^R, 1 = X^L, 0 = X^R  ->  bit 3 = A^L, 2 = X^L, 1 = A^R, 0 = X^R
    let permute = |i: usize| {
        let (al, ar, xl, xr) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        (al << 3) | (xl << 2) | (ar << 1) | xr
    };
    let mut rho = Mat16::zeros();
    for i in 0..16 {
        for j in 0..16 {
            rho[(permute(i), permute(j))] = product[(i, j)];
        }
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Pair basis |a x⟩ with a as the high bit: |1_A 0_X⟩ = 2, |0_A 1_X⟩ = 1.
    let port = |sign: f64| {
        let mut v = SVector::<Complex64, 4>::zeros();
        v[2] = Complex64::new(s, 0.0);
        v[1] = Complex64::new(sign * s, 0.0);
        v
    };
    let left = [port(1.0), port(-1.0)];
    let right = [port(-1.0), port(1.0)];

    let expect = |l: usize, r: usize| {
        let psi: Vec16 = left[l].kronecker(&right[r]);
        (psi.adjoint() * rho * psi)[(0, 0)].re
    };
    RawProbabilities {
        q_c: expect(0, 0) + expect(1, 1),
        q_ac: expect(0, 1) + expect(1, 0),
    }
}

/// Normalized probabilities (p_c, p_ac) conditioned on one click per telescope.
pub fn postselect(raw: RawProbabilities) -> Result<(f64, f64)> {
    let total = raw.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateResource);
    }
    let p_c = (raw.q_c / total).clamp(0.0, 1.0);
    Ok((p_c, 1.0 - p_c))
}

/// p_ac - p_c = V_a C cos(V_p - w_p), the noise-free fringe.
pub fn analytic_delta_p(v: &AstroVisibility, x: &XState) -> Result<f64> {
    let (p_c, p_ac) = postselect(raw_probabilities(v, x))?;
    Ok(p_ac - p_c)
}
