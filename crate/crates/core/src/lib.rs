//! Transient models of active readout-resonator depletion.
//!
//! Classical and coherent-state descriptions of a series-LC resonator that is
//! emptied by a short current pulse, the discretized feedline that carries the
//! pulse, and the photon content of wide-band Gaussian pulses.

pub mod classical;
pub mod error;
pub mod line;
pub mod numeric;
pub mod ode;
pub mod photons;
pub mod pulse;
pub mod quadrature;
pub mod quantum;
pub mod tridiag;

pub use classical::{FillState, MatchingSolution, OutputFormula, QubitState, ResonatorParams};
pub use error::{ModelError, Result};
pub use line::{LineEigensystem, LineParams};
pub use photons::{GaussianPulseSpec, PhotonFormula};
pub use pulse::{ComplexFrequency, Pulse, Waveform};
pub use quantum::{CouplingSet, ModeAmplitudes, ModeSet, Regularization, ResonatorAmplitude};
