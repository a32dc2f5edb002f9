//! Tolerances and fitting parameters shared by every diagnostic and solver.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Scale-aware zero threshold `tau = abs + rel * norm * dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ZeroTol {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
        }
    }
}

impl ZeroTol {
    pub fn threshold(&self, norm: f64, dim: usize) -> f64 {
        self.abs + self.rel * norm * dim as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub ztol: ZeroTol,
    /// Compatibility tolerance, relative to the block data norm.
    pub compat_tol: f64,
    /// Minimum principal angle (radians) for a transversal operator switch.
    pub angle_min: f64,
    /// Relative defect accepted by normality and commutation checks.
    pub structure_tol: f64,
    /// Fraction of the fit axis used as tail window.
    pub tail_fraction: f64,
    /// Degree above which a windowed slope counts as super-polynomial.
    pub n_probe: f64,
    pub min_samples: usize,
    /// Final fraction of blocks that must be free of kernel blocks.
    pub z_tail_fraction: f64,
    /// Largest tolerated growth rate of the cumulative kernel-block count.
    pub z_slope_max: f64,
    pub seed: u64,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ztol: ZeroTol::default(),
            compat_tol: 1e-9,
            angle_min: 1e-6,
            structure_tol: 1e-9,
            tail_fraction: 0.5,
            n_probe: 10.0,
            min_samples: 8,
            z_tail_fraction: 0.25,
            z_slope_max: 0.1,
            seed: 0,
            strict: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ztol.abs", self.ztol.abs),
            ("ztol.rel", self.ztol.rel),
            ("compat_tol", self.compat_tol),
            ("angle_min", self.angle_min),
            ("structure_tol", self.structure_tol),
            ("n_probe", self.n_probe),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(Error::Precondition(format!(
                "tail_fraction must lie in (0,1), got {}",
                self.tail_fraction
            )));
        }
        if !(self.z_tail_fraction > 0.0 && self.z_tail_fraction <= 1.0) {
            return Err(Error::Precondition(format!(
                "z_tail_fraction must lie in (0,1], got {}",
                self.z_tail_fraction
            )));
        }
        if self.min_samples < 2 {
            return Err(Error::Precondition("min_samples must be at least 2".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, embedded in every artifact.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex_digest(&bytes)
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_hash_is_stable() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.hash(), RunConfig::default().hash());
        let mut d = c.clone();
        d.seed = 7;
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn rejects_bad_tail() {
        let c = RunConfig {
            tail_fraction: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
