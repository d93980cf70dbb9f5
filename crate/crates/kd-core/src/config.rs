use crate::error::{KdError, Result};

/// Numerical knobs shared across the crate.
///
/// All tolerances are absolute. Nothing in the crate hard-codes a tolerance;
/// anything that judges "equal enough" or "admissible" reads it from here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Tolerance for validating constructed objects (Hermiticity, trace,
    /// positivity, orthonormality, Kraus completeness).
    pub validation_tol: f64,
    /// Smallest admissible |<a'_{i'}|a_i>|. Pairs below this are rejected
    /// outright: dual-frame entries scale as the inverse overlap and would
    /// silently destroy precision.
    pub overlap_floor: f64,
    /// Tolerance used by the nonnegativity certifier on both -Re and |Im|.
    pub nonneg_tol: f64,
    /// Cap on any Hilbert-space dimension handled by this process. Channel
    /// representations are dense d^2 x d^2 matrices, so this guards memory.
    pub max_dim: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            validation_tol: 1e-9,
            overlap_floor: 1e-8,
            nonneg_tol: 1e-9,
            max_dim: 64,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("validation_tol", self.validation_tol),
            ("overlap_floor", self.overlap_floor),
            ("nonneg_tol", self.nonneg_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KdError::InvalidConfig {
                    msg: format!("{name} must be positive and finite, got {v}"),
                });
            }
        }
        if self.max_dim < 2 {
            return Err(KdError::InvalidConfig {
                msg: format!("max_dim must be at least 2, got {}", self.max_dim),
            });
        }
        Ok(())
    }

    /// Reject dimensions beyond the configured cap (or zero).
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(KdError::InvalidConfig {
                msg: "dimension must be at least 1".into(),
            });
        }
        if dim > self.max_dim {
            return Err(KdError::DimensionTooLarge {
                dim,
                max: self.max_dim,
            });
        }
        Ok(())
    }
}
