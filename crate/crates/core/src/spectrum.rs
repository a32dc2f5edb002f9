//! The fixed elliptic operator, given as its distinct eigenvalues and their
//! multiplicities, truncated to finitely many blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub index: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub label: Option<String>,
}

/// Eigenvalue/multiplicity data of a positive elliptic operator of order
/// `elliptic_order` on a manifold of dimension `manifold_dim`.
///
/// Blocks are validated on construction: eigenvalues are nonnegative and
/// strictly increasing (ties are rejected with zero tolerance, since
/// eigenvalues are counted without multiplicity) and every multiplicity is
/// at least one. The model is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    manifold_dim: usize,
    elliptic_order: f64,
    blocks: Vec<BlockInfo>,
}

impl SpectrumModel {
    pub fn new(
        manifold_dim: usize,
        elliptic_order: f64,
        blocks: impl IntoIterator<Item = (f64, usize, Option<String>)>,
    ) -> Result<Self> {
        if manifold_dim == 0 {
            return Err(Error::InvalidSpectrum {
                index: 0,
                reason: "manifold dimension must be positive".into(),
            });
        }
        if !(elliptic_order > 0.0 && elliptic_order.is_finite()) {
            return Err(Error::InvalidSpectrum {
                index: 0,
                reason: format!("elliptic order must be positive, got {elliptic_order}"),
            });
        }
        let mut out: Vec<BlockInfo> = Vec::new();
        for (index, (eigenvalue, multiplicity, label)) in blocks.into_iter().enumerate() {
            if !eigenvalue.is_finite() || eigenvalue < 0.0 {
                return Err(Error::InvalidSpectrum {
                    index,
                    reason: format!("eigenvalue must be finite and nonnegative, got {eigenvalue}"),
                });
            }
            if multiplicity == 0 {
                return Err(Error::InvalidSpectrum {
                    index,
                    reason: "multiplicity must be at least 1".into(),
                });
            }
            if let Some(prev) = out.last() {
                if eigenvalue <= prev.eigenvalue {
                    return Err(Error::InvalidSpectrum {
                        index,
                        reason: format!(
                            "eigenvalues must be strictly increasing ({} after {})",
                            eigenvalue, prev.eigenvalue
                        ),
                    });
                }
            }
            out.push(BlockInfo {
                index,
                eigenvalue,
                multiplicity,
                label,
            });
        }
        Ok(Self {
            manifold_dim,
            elliptic_order,
            blocks: out,
        })
    }

    pub fn manifold_dim(&self) -> usize {
        self.manifold_dim
    }

    pub fn elliptic_order(&self) -> f64 {
        self.elliptic_order
    }

    pub fn blocks(&self) -> &[BlockInfo] {
        &self.blocks
    }

    /// Number of stored blocks `K`.
    pub fn truncation(&self) -> usize {
        self.blocks.len()
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.blocks[k].eigenvalue
    }

    pub fn multiplicity(&self, k: usize) -> usize {
        self.blocks[k].multiplicity
    }

    /// Total dimension `sum d_k` of the truncated coefficient space.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.blocks.len() {
            return Err(Error::BlockOutOfRange {
                index: k,
                truncation: self.blocks.len(),
            });
        }
        Ok(())
    }

    /// `(1 + lambda_k)^(s/nu)`.
    pub fn sobolev_weight(&self, k: usize, s: f64) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.weight_unchecked(k, s))
    }

    pub(crate) fn weight_unchecked(&self, k: usize, s: f64) -> f64 {
        (1.0 + self.blocks[k].eigenvalue).powf(s / self.elliptic_order)
    }

    /// `log(1 + lambda_k)`, the abscissa of every log-log fit.
    pub fn log_scale(&self, k: usize) -> f64 {
        self.blocks[k].eigenvalue.ln_1p()
    }

    /// Empirical constant of `d_k <= C (1 + lambda_k)^(d/nu)` over the stored
    /// blocks, with the first index attaining it. `None` for an empty model.
    pub fn multiplicity_growth_constant(&self) -> Option<(f64, usize)> {
        let exponent = self.manifold_dim as f64 / self.elliptic_order;
        let mut best: Option<(f64, usize)> = None;
        for b in &self.blocks {
            let ratio = b.multiplicity as f64 / (1.0 + b.eigenvalue).powf(exponent);
            if best.is_none_or(|(c, _)| ratio > c) {
                best = Some((ratio, b.index));
            }
        }
        best
    }

    /// Partial sum `sum_{k<K} d_k (1 + lambda_k)^(-q)`.
    pub fn summability_partial(&self, q: f64) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity as f64 * (1.0 + b.eigenvalue).powf(-q))
            .sum()
    }

    /// The model restricted to its first `k` blocks.
    pub fn prefix(&self, k: usize) -> SpectrumModel {
        SpectrumModel {
            manifold_dim: self.manifold_dim,
            elliptic_order: self.elliptic_order,
            blocks: self.blocks[..k.min(self.blocks.len())].to_vec(),
        }
    }

    /// SHA-256 of the canonical file encoding; fields and symbols carry it.
    pub fn hash(&self) -> String {
        crate::io::spectrum_hash(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(k: usize) -> SpectrumModel {
        SpectrumModel::new(
            2,
            2.0,
            (0..k).map(|k| ((k * (k + 1)) as f64, 2 * k + 1, None)),
        )
        .unwrap()
    }

    #[test]
    fn weights() {
        let m = SpectrumModel::new(2, 2.0, [(0.0, 1, None), (3.0, 1, None)]).unwrap();
        assert_eq!(m.sobolev_weight(1, 1.0).unwrap(), 2.0);
        assert_eq!(m.sobolev_weight(0, 5.0).unwrap(), 1.0);
        assert!(matches!(
            m.sobolev_weight(2, 1.0),
            Err(Error::BlockOutOfRange { index: 2, .. })
        ));
        let s = sphere(5);
        assert!((s.sobolev_weight(3, 2.0).unwrap() - 13.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_ties_and_bad_multiplicity() {
        let e = SpectrumModel::new(1, 2.0, [(0.0, 1, None), (0.0, 2, None)]).unwrap_err();
        assert!(matches!(e, Error::InvalidSpectrum { index: 1, .. }));
        let e = SpectrumModel::new(1, 2.0, [(0.0, 0, None)]).unwrap_err();
        assert!(matches!(e, Error::InvalidSpectrum { index: 0, .. }));
        let e = SpectrumModel::new(1, 2.0, [(1.0, 1, None), (-1.0, 1, None)]).unwrap_err();
        assert!(matches!(e, Error::InvalidSpectrum { index: 1, .. }));
        // lambda_0 > 0 is allowed
        SpectrumModel::new(1, 2.0, [(1.0, 1, None)]).unwrap();
    }

    #[test]
    fn sphere_growth_constant() {
        // independent oracle: maximize (2k+1)/(k^2+k+1) directly
        let mut best = (0.0f64, 0usize);
        for k in 0..50usize {
            let r = (2 * k + 1) as f64 / ((k * k + k + 1) as f64);
            if r > best.0 {
                best = (r, k);
            }
        }
        assert_eq!(best, (1.0, 0));
        let (c, k) = sphere(50).multiplicity_growth_constant().unwrap();
        assert_eq!((c, k), best);
        let single = SpectrumModel::new(2, 2.0, [(0.0, 1, None)]).unwrap();
        assert_eq!(single.multiplicity_growth_constant(), Some((1.0, 0)));
    }

    #[test]
    fn summability() {
        let one = SpectrumModel::new(3, 2.0, [(0.0, 4, None)]).unwrap();
        assert_eq!(one.summability_partial(7.5), 4.0);
        let s = sphere(40);
        assert_eq!(s.summability_partial(0.0), (0..40).map(|k| 2 * k + 1).sum::<usize>() as f64);
        // increments shrink like k^-3
        let mut prev = 0.0;
        let mut incs = Vec::new();
        for k in 1..=40 {
            let p = s.prefix(k).summability_partial(2.0);
            incs.push(p - prev);
            prev = p;
        }
        for k in 10..40 {
            let kk = k as f64;
            let ratio = incs[k] * kk.powi(3);
            assert!(ratio > 1.0 && ratio < 3.0, "k={k} ratio={ratio}");
        }
        assert!(incs.windows(2).skip(1).all(|w| w[1] < w[0]));
    }

    #[test]
    fn prefix_constant_never_exceeds_full() {
        let s = sphere(30);
        let full = s.multiplicity_growth_constant().unwrap().0;
        for k in 1..30 {
            assert!(s.prefix(k).multiplicity_growth_constant().unwrap().0 <= full);
        }
    }

    #[test]
    fn weight_properties() {
        let s = sphere(20);
        for k in 0..20 {
            assert_eq!(s.sobolev_weight(k, 0.0).unwrap(), 1.0);
            for (a, b) in [(1.0, 2.5), (-1.5, 0.25), (3.0, -3.0)] {
                let lhs = s.sobolev_weight(k, a + b).unwrap();
                let rhs = s.sobolev_weight(k, a).unwrap() * s.sobolev_weight(k, b).unwrap();
                assert!(((lhs - rhs) / lhs).abs() < 1e-12);
            }
        }
    }
}
