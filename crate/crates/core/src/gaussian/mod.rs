//! Exact Gaussian dynamics of the detector and a finite set of field modes.

mod channel;
mod evolve;
mod hamiltonian;
mod protocol;
mod state;
mod step;

pub use channel::{field_variances, PassChannel};
pub use evolve::{evolve, step_grid, EvolveOptions, Evolution, SeriesPoint};
pub use hamiltonian::{CouplingSchedule, HamiltonianFrame, MeanField, Modulation, System};
pub use protocol::{occupation_series, repeat_protocol, FieldReset, PassRecord, ProtocolOptions, ProtocolResult};
pub use state::{
    detector_occupation, min_uncertainty_eigenvalue, symplectic_eigenvalues, thermal_occupation, DetectorState,
    GaussianState, InvariantReport,
};
