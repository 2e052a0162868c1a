use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parameters shared by every stage of the construction.
///
/// `y0` is where `λ` sends the top of its cylinder and `z0` is the point
/// missed by `λ'`. Both are the centers of their boxes because the
/// concentric disc-to-square map sends the disc center to the box center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub n: usize,
    pub c: f64,
    pub r: f64,
    pub y0: [f64; 2],
    pub z0: [f64; 2],
    pub fd_step: f64,
    pub tol_symp: f64,
    /// Pointwise differential checks skip points this close to a singular locus.
    pub singular_margin: f64,
}

impl EmbeddingConfig {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("n = {n}, need n >= 2")));
        }
        if !(c.is_finite() && c >= 1.0) {
            return Err(Error::Config(format!("c = {c}, need finite c >= 1")));
        }
        Ok(EmbeddingConfig {
            n,
            c,
            r: PI.sqrt().recip(),
            y0: [0.5, 0.5],
            z0: [0.5, 0.5 * c],
            fd_step: 1e-6,
            tol_symp: 1e-8,
            singular_margin: 1e-4,
        })
    }

    /// Configuration for the ball embedding with section hull bound `a`, i.e. `c = 1/a`.
    pub fn for_hull_bound(n: usize, a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Config(format!("a = {a}, need 0 < a <= 1")));
        }
        Self::new(n, 1.0 / a)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Dimension of the section parameter `z`.
    pub fn z_dim(&self) -> usize {
        2 * self.n - 2
    }

    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.n, self.c)?;
        if (self.r * self.r * PI - 1.0).abs() > 1e-14 {
            return Err(Error::Config("r must equal pi^(-1/2)".into()));
        }
        if self.y0 != fresh.y0 || self.z0 != fresh.z0 {
            return Err(Error::Config("puncture points must be the box centers".into()));
        }
        if !(self.fd_step > 0.0 && self.tol_symp > 0.0 && self.singular_margin >= 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        let cfg = EmbeddingConfig::new(2, 2.0).unwrap();
        assert!((cfg.r * cfg.r * PI - 1.0).abs() < 1e-15);
        assert_eq!(cfg.y0, [0.5, 0.5]);
        assert_eq!(cfg.z0, [0.5, 1.0]);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EmbeddingConfig::new(1, 2.0).is_err());
        assert!(EmbeddingConfig::new(2, 0.5).is_err());
        assert!(EmbeddingConfig::new(2, f64::INFINITY).is_err());
        assert!(EmbeddingConfig::for_hull_bound(2, 0.0).is_err());
        assert!(EmbeddingConfig::for_hull_bound(2, 1.5).is_err());
        assert_eq!(EmbeddingConfig::for_hull_bound(2, 0.25).unwrap().c, 4.0);
    }
}
