//! Log-log regression of gains and coefficient norms against `1 + lambda_k`.
//!
//! A polynomial lower bound `g(k) >= C (1 + lambda_k)^gamma` is fitted as the
//! lower supporting line of the points `(log(1+lambda_k), log g(k))` that
//! stays closest to the cloud on average (a two-variable linear program whose
//! optimum is the lower-hull edge above the mean abscissa). An ordinary
//! least-squares slope is reported alongside for reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One gain observation: block index, eigenvalue, gain.
pub type GainSample = (usize, f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyBoundFit {
    /// Largest constant with `C (1+lambda)^gamma <= g` on the window.
    pub c: f64,
    /// Signed exponent of the lower bound.
    pub gamma: f64,
    /// Ordinary least-squares slope over the same window.
    pub ls_gamma: f64,
    /// RMS of the least-squares residual in log space.
    pub residual: f64,
    /// First and last block index in the window.
    pub window: (usize, usize),
    pub samples: usize,
    /// Envelope exponents on successively halved tail windows.
    pub windowed_gammas: Vec<f64>,
    /// Windowed exponents steepen and pass `-n_probe`.
    pub super_polynomial: bool,
}

impl PolyBoundFit {
    /// A polynomial bound of some real exponent is supported by the data.
    pub fn passes(&self) -> bool {
        !self.super_polynomial
    }
}

/// `(slope, intercept, rms residual)` of the least-squares line.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Lower supporting line `(slope, intercept)` maximizing its value at the
/// mean abscissa. Abscissae must be distinct.
pub fn lower_envelope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    if hull.len() == 1 {
        return (0.0, hull[0].1);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let mut seg = hull.len() - 2;
    for i in 0..hull.len() - 1 {
        if hull[i].0 <= mean && mean < hull[i + 1].0 {
            seg = i;
            break;
        }
    }
    let (a, b) = (hull[seg], hull[seg + 1]);
    let slope = (b.1 - a.1) / (b.0 - a.0);
    (slope, a.1 - slope * a.0)
}

/// Samples whose `log(1+lambda)` lies in the upper `tail` fraction of the
/// abscissa range spanned by `all`.
fn tail_window<'a>(all: &[GainSample], usable: &'a [GainSample], tail: f64) -> Vec<&'a GainSample> {
    let (lo, hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        let x = s.1.ln_1p();
        (lo.min(x), hi.max(x))
    });
    let cut = hi - tail * (hi - lo);
    usable.iter().filter(|s| s.1.ln_1p() >= cut).collect()
}

/// Polynomial lower-bound fit over the tail window of a gain curve. Zero and
/// infinite gains are excluded; at least `min_samples` usable tail samples
/// are required.
pub fn fit_poly_bound(
    samples: &[GainSample],
    tail: f64,
    n_probe: f64,
    min_samples: usize,
) -> Result<PolyBoundFit> {
    let usable: Vec<GainSample> = samples
        .iter()
        .copied()
        .filter(|s| s.2 > 0.0 && s.2.is_finite())
        .collect();
    let window = tail_window(samples, &usable, tail);
    if window.len() < min_samples {
        return Err(Error::InsufficientSamples {
            needed: min_samples,
            found: window.len(),
        });
    }
    let xs: Vec<f64> = window.iter().map(|s| s.1.ln_1p()).collect();
    let ys: Vec<f64> = window.iter().map(|s| s.2.ln()).collect();
    let (gamma, _) = lower_envelope(&xs, &ys);
    let (ls_gamma, _, residual) = least_squares(&xs, &ys);
    let c = window
        .iter()
        .map(|s| s.2 / (1.0 + s.1).powf(gamma))
        .fold(f64::INFINITY, f64::min);

    let mut windowed = vec![gamma];
    let mut frac = tail / 2.0;
    while windowed.len() < 4 {
        let w = tail_window(samples, &usable, frac);
        if w.len() < min_samples {
            break;
        }
        let xs: Vec<f64> = w.iter().map(|s| s.1.ln_1p()).collect();
        let ys: Vec<f64> = w.iter().map(|s| s.2.ln()).collect();
        windowed.push(lower_envelope(&xs, &ys).0);
        frac /= 2.0;
    }
    let steepening = windowed.windows(2).all(|w| w[1] < w[0]);
    let last = *windowed.last().expect("nonempty");
    Ok(PolyBoundFit {
        c,
        gamma,
        ls_gamma,
        residual,
        window: (window[0].0, window[window.len() - 1].0),
        samples: window.len(),
        windowed_gammas: windowed,
        super_polynomial: steepening && last <= -n_probe,
    })
}
