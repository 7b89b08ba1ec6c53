//! Finite-volume spectra and shape-resonance extraction for a 1D
//! delta-shell potential bounded by an infinite wall.
//!
//! The potential is a delta shell of dimensionless strength `G` at the
//! origin with a hard wall one shell radius to its left; confining it in a
//! box of dimensionless size `c` turns the scattering problem into a
//! discrete spectrum `E_N(c)`. Everything is expressed in units
//! `hbar = 2m = a = 1`, so energies are `E = q^2` with `q` the
//! dimensionless momentum, in units of `hbar^2 / (2 m a^2)`.
//!
//! Sweeping the box size produces a stabilization diagram in which
//! quasi-bound states show up as plateaus connected by avoided crossings.
//! Three independent methods read a resonance position `E_r` and width
//! `Gamma` off that diagram:
//!
//! - a tan-model fit across one plateau ([`extract::extract_plateau_fit`]),
//! - a Lorentzian fit to the finite-volume density of states
//!   ([`extract::extract_dos`]),
//! - a Lorentzian fit to the quasi-bound probability ratio of a single
//!   level ([`extract::extract_qbp`]).
//!
//! Because the shell potential is exactly solvable, every result can be
//! benchmarked against the S-matrix poles in [`oracle`]; the [`bench`]
//! module wires the full pipelines for the reference couplings
//! `G in {+-5, +-10, +-20}`.
//!
//! ```
//! use shellstab::model::ShellModel;
//! use shellstab::spectrum::solve_levels;
//!
//! // The ten lowest levels of a strong repulsive shell in a box c = 5.
//! let model = ShellModel::new(20.0);
//! let levels = solve_levels(&model, 5.0, 10).unwrap();
//! assert_eq!(levels.len(), 10);
//! assert!(levels.windows(2).all(|w| w[0].e < w[1].e));
//! ```

pub mod bench;
pub mod diagram;
pub mod extract;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod spectrum;

pub use model::{BoxGrid, ShellModel};
pub use num_complex::Complex64;
