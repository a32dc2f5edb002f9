//! Functions and distributions in coefficient space: one complex vector per
//! eigenspace, `u_hat(k)` of length `d_k`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::linalg::{vec_norm, CVec, C64};
use crate::spectrum::SpectrumModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    spectrum: Arc<SpectrumModel>,
    blocks: Vec<CVec>,
}

pub(crate) fn same_spectrum(a: &Arc<SpectrumModel>, b: &Arc<SpectrumModel>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl CoefficientField {
    /// Builds a field, checking that every block has length `d_k`, that the
    /// full truncation is present and that all entries are finite.
    pub fn new(spectrum: Arc<SpectrumModel>, blocks: Vec<CVec>) -> Result<Self> {
        if blocks.len() != spectrum.truncation() {
            return Err(Error::ShapeMismatch {
                index: blocks.len().min(spectrum.truncation()),
                expected: format!("{} blocks", spectrum.truncation()),
                found: format!("{} blocks", blocks.len()),
            });
        }
        for (k, b) in blocks.iter().enumerate() {
            let d = spectrum.multiplicity(k);
            if b.len() != d {
                return Err(Error::ShapeMismatch {
                    index: k,
                    expected: format!("length {d}"),
                    found: format!("length {}", b.len()),
                });
            }
            if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(Self { spectrum, blocks })
    }

    pub fn zeros(spectrum: Arc<SpectrumModel>) -> Self {
        let blocks = spectrum
            .blocks()
            .iter()
            .map(|b| CVec::zeros(b.multiplicity))
            .collect();
        Self { spectrum, blocks }
    }

    /// Field with `u_hat(k) = f(k, d_k)`.
    pub fn from_fn(spectrum: Arc<SpectrumModel>, mut f: impl FnMut(usize, usize) -> CVec) -> Result<Self> {
        let blocks = (0..spectrum.truncation())
            .map(|k| f(k, spectrum.multiplicity(k)))
            .collect();
        Self::new(spectrum, blocks)
    }

    pub(crate) fn from_blocks_unchecked(spectrum: Arc<SpectrumModel>, blocks: Vec<CVec>) -> Self {
        Self { spectrum, blocks }
    }

    pub fn spectrum(&self) -> &Arc<SpectrumModel> {
        &self.spectrum
    }

    pub fn blocks(&self) -> &[CVec] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CVec {
        &self.blocks[k]
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(vec_norm).collect()
    }

    /// Plancherel norm `(sum_k |u_hat(k)|^2)^(1/2)`, summed in block order.
    pub fn l2_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// `[sum_k (1+lambda_k)^(2s/nu) |u_hat(k)|^2]^(1/2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let w = self.spectrum.weight_unchecked(k, 2.0 * s);
                w * b.iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Blockwise `alpha * a + beta * b`.
    pub fn combine(a: &Self, alpha: C64, b: &Self, beta: C64) -> Result<Self> {
        if !same_spectrum(&a.spectrum, &b.spectrum) {
            return Err(Error::SpectrumMismatch("fields live on different spectra".into()));
        }
        let blocks = a
            .blocks
            .iter()
            .zip(&b.blocks)
            .map(|(x, y)| x * alpha + y * beta)
            .collect();
        Ok(Self {
            spectrum: a.spectrum.clone(),
            blocks,
        })
    }

    /// Least-squares decay fit of `log |u_hat(k)|` against `log(1+lambda_k)`
    /// over the last `tail_fraction` of blocks, with the shrinking-window
    /// test for rapid decay.
    pub fn decay_classify(&self, tail_fraction: f64, n_probe: f64, min_samples: usize) -> DecayReport {
        let norms = self.block_norms();
        let tail = tail_blocks(norms.len(), tail_fraction);
        let samples: Vec<(f64, f64)> = tail
            .clone()
            .filter(|&k| norms[k] > 0.0)
            .map(|k| (self.spectrum.log_scale(k), norms[k].ln()))
            .collect();
        if samples.is_empty() {
            return DecayReport {
                slope: f64::NEG_INFINITY,
                intercept: 0.0,
                residual: 0.0,
                samples: 0,
                windowed_slopes: Vec::new(),
                class: DecayClass::RapidDecay,
            };
        }
        if samples.len() < min_samples {
            return DecayReport {
                slope: f64::NAN,
                intercept: f64::NAN,
                residual: f64::NAN,
                samples: samples.len(),
                windowed_slopes: Vec::new(),
                class: DecayClass::Inconclusive,
            };
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        let (slope, intercept, residual) = least_squares(&xs, &ys);
        let mut windowed = vec![slope];
        let mut frac = tail_fraction / 2.0;
        while windowed.len() < 4 {
            let (xs, ys): (Vec<f64>, Vec<f64>) = tail_blocks(norms.len(), frac)
                .filter(|&k| norms[k] > 0.0)
                .map(|k| (self.spectrum.log_scale(k), norms[k].ln()))
                .unzip();
            if xs.len() < min_samples {
                break;
            }
            windowed.push(least_squares(&xs, &ys).0);
            frac /= 2.0;
        }
        let last = *windowed.last().expect("nonempty");
        let class = if windowed.windows(2).all(|w| w[1] < w[0]) && last <= -n_probe {
            DecayClass::RapidDecay
        } else if windowed.windows(2).all(|w| w[1] > w[0]) && last >= n_probe {
            DecayClass::NonTempered
        } else {
            DecayClass::PolynomialOrder(slope)
        };
        DecayReport {
            slope,
            intercept,
            residual,
            samples: samples.len(),
            windowed_slopes: windowed,
            class,
        }
    }
}

fn tail_blocks(k: usize, fraction: f64) -> std::ops::Range<usize> {
    let count = ((k as f64) * fraction).ceil() as usize;
    k.saturating_sub(count.min(k))..k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "order", rename_all = "snake_case")]
pub enum DecayClass {
    RapidDecay,
    /// Coefficients behave like `(1+lambda)^N` with the fitted `N`.
    PolynomialOrder(f64),
    NonTempered,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub samples: usize,
    pub windowed_slopes: Vec<f64>,
    pub class: DecayClass,
}

impl DecayReport {
    pub fn is_rapid(&self) -> bool {
        self.class == DecayClass::RapidDecay
    }
}
