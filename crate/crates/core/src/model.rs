//! Physical model and grid types.
//!
//! Everything in this crate works in dimensionless internal units with
//! `hbar = 2m = a = 1`: momenta are `q = k a`, box sizes are `c = L / a`,
//! and energies are quoted in `hbar^2 / (2 m a^2)`, so `E = q^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised by model-level validation.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A [`BoxGrid`] violated one of its invariants.
    #[error("invalid box grid: {0}")]
    InvalidGrid(String),
}

/// A delta-shell potential `U a delta(x)` at the origin, bounded on the left
/// by an infinite wall at `x = -a`.
///
/// The single physical parameter is the dimensionless coupling
/// `G = 2 m U a / hbar^2`; its sign selects a repulsive barrier (`G > 0`)
/// or an attractive well (`G < 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellModel {
    /// Dimensionless shell strength `G = 2 m U a / hbar^2` (signed).
    pub g: f64,
    /// Shell radius; the length unit of the problem (fixed to 1).
    pub a: f64,
}

impl ShellModel {
    /// Model with coupling `g` in internal units (`a = 1`).
    pub fn new(g: f64) -> Self {
        Self { g, a: 1.0 }
    }
}

/// Uniform grid of dimensionless box sizes `c = L / a`.
///
/// Invariants: `c_min > 0`, `c_max > c_min`, `steps >= 2`. The spacing is
/// `(c_max - c_min) / (steps - 1)` and both endpoints are grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub c_min: f64,
    pub c_max: f64,
    pub steps: usize,
}

impl BoxGrid {
    /// Validated constructor.
    pub fn new(c_min: f64, c_max: f64, steps: usize) -> Result<Self, ModelError> {
        if !c_min.is_finite() || c_min <= 0.0 {
            return Err(ModelError::InvalidGrid(format!(
                "c_min must be positive and finite, got {c_min}"
            )));
        }
        if !c_max.is_finite() || c_max <= c_min {
            return Err(ModelError::InvalidGrid(format!(
                "c_max must exceed c_min, got c_min={c_min}, c_max={c_max}"
            )));
        }
        if steps < 2 {
            return Err(ModelError::InvalidGrid(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self {
            c_min,
            c_max,
            steps,
        })
    }

    /// Grid spacing `(c_max - c_min) / (steps - 1)`.
    pub fn spacing(&self) -> f64 {
        (self.c_max - self.c_min) / (self.steps - 1) as f64
    }

    /// The `i`-th grid point; the last point is exactly `c_max`.
    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i < self.steps);
        if i == self.steps - 1 {
            self.c_max
        } else {
            self.c_min + i as f64 * self.spacing()
        }
    }

    /// All grid points in ascending order.
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Free dispersion relation `E = q^2` (internal units).
pub fn energy_from_q(q: f64) -> f64 {
    q * q
}

/// Complex continuation of the dispersion relation, used when mapping
/// resonance poles `q` in the lower half plane to complex energies.
pub fn energy_from_q_complex(q: Complex64) -> Complex64 {
    q * q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn energy_is_square_of_momentum() {
        assert_relative_eq!(energy_from_q(PI), PI * PI, max_relative = 1e-15);
        assert_eq!(energy_from_q(0.0), 0.0);
        let e = energy_from_q(2.99578);
        assert_relative_eq!(e, 8.974698, epsilon = 1e-4);
    }

    #[test]
    fn complex_energy_matches_real_on_axis() {
        let q = 1.7;
        let ec = energy_from_q_complex(Complex64::new(q, 0.0));
        assert_relative_eq!(ec.re, energy_from_q(q), max_relative = 1e-15);
        assert_eq!(ec.im, 0.0);
        // A lower-half-plane pole maps to Im E < 0, i.e. a positive width.
        let ep = energy_from_q_complex(Complex64::new(3.0, -0.02));
        assert!(ep.im < 0.0);
    }

    #[test]
    fn grid_invariants_are_enforced() {
        assert!(BoxGrid::new(0.0, 5.0, 10).is_err());
        assert!(BoxGrid::new(-1.0, 5.0, 10).is_err());
        assert!(BoxGrid::new(2.0, 2.0, 10).is_err());
        assert!(BoxGrid::new(5.0, 2.0, 10).is_err());
        assert!(BoxGrid::new(1.0, 2.0, 1).is_err());
        assert!(BoxGrid::new(1.0, 2.0, 2).is_ok());
    }

    #[test]
    fn grid_values_are_uniform_with_exact_endpoints() {
        let grid = BoxGrid::new(0.5, 14.0, 541).unwrap();
        let cs = grid.values();
        assert_eq!(cs.len(), 541);
        assert_eq!(cs[0], 0.5);
        assert_eq!(*cs.last().unwrap(), 14.0);
        assert_relative_eq!(grid.spacing(), 0.025, max_relative = 1e-15);
        for w in cs.windows(2) {
            assert_relative_eq!(w[1] - w[0], 0.025, epsilon = 1e-12);
        }
    }
}
