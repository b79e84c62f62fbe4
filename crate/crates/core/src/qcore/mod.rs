//! Exact two-qubit density-matrix algebra for the network resource and the
//! astronomical photon: constructors, Kraus channels, X-form extraction and
//! the concurrence and subspace-weight summaries the protocol depends on.

mod density;
mod kraus;
mod xstate;

pub use density::{
    make_astro_state, make_bell_psi, wrap_phase, AstroVisibility, DensityMatrix4,
    HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL,
};
pub use kraus::{
    apply_independent_channels, kraus_amplitude_damping, kraus_dephasing, kraus_depolarizing,
    ChannelKind, KrausChannel, COMPLETENESS_TOL,
};
pub use xstate::{extract_xstate, XState, XSTATE_TOL};
