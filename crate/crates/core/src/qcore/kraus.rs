use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix4;
use crate::error::{check_probability, Error, Result};

/// Completeness tolerance, max entry of Σ K†K - I.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    AmplitudeDamping,
    Dephasing,
    Depolarizing,
    Custom,
}

/// Single-arm decoherence channel given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kind: ChannelKind,
    param: f64,
    operators: Vec<Matrix2<Complex64>>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0), -Complex64::i(), Complex64::i(), c(0.0))
}

fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

impl KrausChannel {
    /// Builds a channel from arbitrary operators, rejecting sets that are
    /// not trace preserving.
    pub fn custom(operators: Vec<Matrix2<Complex64>>, param: f64) -> Result<Self> {
        let ch = Self {
            kind: ChannelKind::Custom,
            param,
            operators,
        };
        let defect = ch.completeness_defect();
        if ch.operators.is_empty() || defect > COMPLETENESS_TOL {
            return Err(Error::InvalidState(format!(
                "Kraus operators are not complete (max |ΣK†K - I| = {defect:e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self {
            kind: ChannelKind::Custom,
            param: 0.0,
            operators: vec![Matrix2::identity()],
        }
    }

    /// Pauli-Z applied with probability `q`; `{√(1-q) I, √q Z}`.
    pub fn phase_flip(q: f64) -> Result<Self> {
        let q = check_probability("q", q)?;
        Ok(Self {
            kind: ChannelKind::Custom,
            param: q,
            operators: vec![
                Matrix2::identity() * c((1.0 - q).sqrt()),
                pauli_z() * c(q.sqrt()),
            ],
        })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn operators(&self) -> &[Matrix2<Complex64>] {
        &self.operators
    }

    pub fn completeness_defect(&self) -> f64 {
        let sum: Matrix2<Complex64> = self
            .operators
            .iter()
            .map(|k| k.adjoint() * k)
            .fold(Matrix2::zeros(), |acc, m| acc + m);
        let diff = sum - Matrix2::identity();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Applies the channel to a single-qubit density matrix.
    pub fn apply(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.operators
            .iter()
            .map(|k| k * rho * k.adjoint())
            .fold(Matrix2::zeros(), |acc, m| acc + m)
    }
}

/// Photon loss with probability `lambda`:
/// `A1 = |0⟩⟨0| + √(1-λ)|1⟩⟨1|`, `A2 = √λ |0⟩⟨1|`.
pub fn kraus_amplitude_damping(lambda: f64) -> Result<KrausChannel> {
    let lambda = check_probability("lambda", lambda)?;
    Ok(KrausChannel {
        kind: ChannelKind::AmplitudeDamping,
        param: lambda,
        operators: vec![
            Matrix2::new(c(1.0), c(0.0), c(0.0), c((1.0 - lambda).sqrt())),
            Matrix2::new(c(0.0), c(lambda.sqrt()), c(0.0), c(0.0)),
        ],
    })
}

/// Dephasing with probability `mu`:
/// `P1 = √(1-μ) I`, `P2 = √μ |0⟩⟨0|`, `P3 = √μ |1⟩⟨1|`.
pub fn kraus_dephasing(mu: f64) -> Result<KrausChannel> {
    let mu = check_probability("mu", mu)?;
    let s = c(mu.sqrt());
    Ok(KrausChannel {
        kind: ChannelKind::Dephasing,
        param: mu,
        operators: vec![
            Matrix2::identity() * c((1.0 - mu).sqrt()),
            Matrix2::new(s, c(0.0), c(0.0), c(0.0)),
            Matrix2::new(c(0.0), c(0.0), c(0.0), s),
        ],
    })
}

/// Depolarization with probability `kappa`:
/// `M1 = √(1-κ) I`, `M2..M4 = √(κ/3) σ_{x,y,z}`.
pub fn kraus_depolarizing(kappa: f64) -> Result<KrausChannel> {
    let kappa = check_probability("kappa", kappa)?;
    let s = c((kappa / 3.0).sqrt());
    Ok(KrausChannel {
        kind: ChannelKind::Depolarizing,
        param: kappa,
        operators: vec![
            Matrix2::identity() * c((1.0 - kappa).sqrt()),
            pauli_x() * s,
            pauli_y() * s,
            pauli_z() * s,
        ],
    })
}

/// ρ_o = Σ_ij (K_i^L ⊗ K_j^R) ρ (K_i^L ⊗ K_j^R)†, left arm as the most
/// significant tensor factor.
pub fn apply_independent_channels(
    rho: &DensityMatrix4,
    left: &KrausChannel,
    right: &KrausChannel,
) -> DensityMatrix4 {
    let input = rho.matrix();
    let mut out = Matrix4::<Complex64>::zeros();
    for kl in left.operators() {
        for kr in right.operators() {
            let k: Matrix4<Complex64> = kl.kronecker(kr);
            out += k * input * k.adjoint();
        }
    }
    DensityMatrix4::from_matrix_unchecked(out)
}
