//! Numerical laboratory for acceleration radiation seen by an "atom dot"
//! detector immersed in the phonon field of a Bose-Einstein condensate.
//!
//! The detector is a harmonic oscillator coupled bilinearly to a finite set
//! of Bogoliubov modes. Two independent routes are provided:
//!
//! * [`perturbation`]: first-order transition amplitudes evaluated by
//!   oscillatory quadrature, together with their closed forms;
//! * [`gaussian`]: exact covariance-matrix dynamics of detector and field,
//!   including the repeated-pass protocol used to reach a steady state.
//!
//! Everything internal is expressed in natural units with `hbar = k_B = 1`;
//! [`units`] handles the conversion boundary.

pub mod bogoliubov;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod output;
pub mod perturbation;
pub mod presets;
pub mod quadrature;
pub mod scenario;
pub mod switching;
pub mod thermometry;
pub mod trajectory;
pub mod units;

pub use error::{Error, Result};
