//! Quantum-assisted optical interferometry with imperfect entanglement.
//!
//! `qcore` holds the two-qubit algebra, `channels` the decoherence models
//! of the distribution network, `protocol` the local-detection measurement
//! and visibility estimator, and `imaging` the aperture-synthesis pipeline.

mod error;

pub mod channels;
pub mod imaging;
pub mod protocol;
pub mod qcore;

pub use channels::{BellSign, FiberLink, MemoryPair, RateModel, ResourceModel};
pub use error::{Error, Result};
pub use imaging::{
    observe_and_image, BaselinePlan, ImagingReport, ObservationPlan, PointSource, SkyModel,
};
pub use protocol::{run_observation, PhaseSettings, VisibilityEstimate};
pub use qcore::{AstroVisibility, DensityMatrix4, KrausChannel, XState};
