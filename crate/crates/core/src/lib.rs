//! Geometric measure of entanglement for pure states with nonnegative
//! amplitudes, computed through Z-eigenvalues of nonnegative tensors.
//!
//! * [`tensor`]: dense symmetric and general tensors, contractions, symmetric embedding.
//! * [`poly`]: univariate polynomials, nonnegative root isolation, Sylvester resultants.
//! * [`elim`]: complete nonnegative Z-spectra for dimensions 2 and 3.
//! * [`shopm`]: shifted symmetric higher-order power method with restarts.
//! * [`states`]: pure states, named builders and the geometric measure.
//! * [`format`]: JSON input formats for tensors and states.

pub mod elim;
pub mod error;
pub mod format;
pub mod poly;
pub mod shopm;
pub mod states;
pub mod tensor;

pub use elim::{qubit_spectrum, qutrit_spectrum, radius_elim, z_spectrum, z_spectrum_with_tol, ZSpectrum};
pub use error::{Error, Result};
pub use shopm::{gap_estimate, restart_radius, shopm, GapEstimate, RestartConfig, ShopmConfig};
pub use states::{geometric_measure, singular_radius, MeasureOptions, MeasureResult, Method, PureState, Route};
pub use tensor::{AnyTensor, GenTensor, SingularTuple, SymTensor, ZEigenpair};
