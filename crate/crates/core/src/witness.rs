//! Explicit counterexample distributions.
//!
//! A bundle holds the constructed field `u`, the images `P_j u` recomputed
//! from the symbols, independent decay classifications of both, and a log of
//! which blocks were selected and why.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::diagnostics::{diagnose_gs_single, diagnose_system, Verdict};
use crate::error::{Error, Result};
use crate::field::{CoefficientField, DecayReport};
use crate::linalg::{CVec, Svd, C64};
use crate::symbol::{InvariantSymbol, SystemSymbol};

/// One selected block: the probe degree `n` it was selected under, the block
/// index and the gain there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub n: f64,
    pub k: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessBundle {
    pub u: CoefficientField,
    pub images: Vec<CoefficientField>,
    pub u_decay: DecayReport,
    pub image_decay: Vec<DecayReport>,
    pub construction_log: Vec<LogEntry>,
}

/// JSON-friendly part of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessLog {
    pub kind: String,
    pub construction_log: Vec<LogEntry>,
    pub u_decay: DecayReport,
    pub image_decay: Vec<DecayReport>,
    pub config_hash: String,
}

impl WitnessBundle {
    fn build(s: &SystemSymbol, u: CoefficientField, log: Vec<LogEntry>, cfg: &RunConfig) -> Result<Self> {
        let images = s.operators().iter().map(|op| op.apply(&u)).collect::<Result<Vec<_>>>()?;
        let classify = |f: &CoefficientField| f.decay_classify(cfg.tail_fraction, cfg.n_probe, cfg.min_samples);
        Ok(Self {
            u_decay: classify(&u),
            image_decay: images.iter().map(classify).collect(),
            images,
            u,
            construction_log: log,
        })
    }

    pub fn log(&self, kind: &str, cfg: &RunConfig) -> WitnessLog {
        WitnessLog {
            kind: kind.to_string(),
            construction_log: self.construction_log.clone(),
            u_decay: self.u_decay.clone(),
            image_decay: self.image_decay.clone(),
            config_hash: cfg.hash(),
        }
    }
}

/// `u(k)` is the first canonical unit vector of the joint kernel on every
/// block that has one, and zero elsewhere; every image vanishes.
pub fn kernel_witness(s: &SystemSymbol, cfg: &RunConfig) -> Result<WitnessBundle> {
    let spectrum = s.spectrum();
    let picks: Vec<Option<CVec>> = (0..spectrum.truncation())
        .into_par_iter()
        .map(|k| {
            let kernel = s.joint_kernel(k, &cfg.ztol).expect("index in range");
            (kernel.ncols() > 0).then(|| kernel.column(0).into_owned())
        })
        .collect();
    if picks.iter().all(Option::is_none) {
        return Err(Error::Precondition("no block has a nontrivial joint kernel".into()));
    }
    let mut log = Vec::new();
    let blocks = picks
        .into_iter()
        .enumerate()
        .map(|(k, p)| match p {
            Some(v) => {
                log.push(LogEntry { n: f64::INFINITY, k, gain: 0.0 });
                v
            }
            None => CVec::zeros(spectrum.multiplicity(k)),
        })
        .collect();
    let u = CoefficientField::new(spectrum.clone(), blocks)?;
    WitnessBundle::build(s, u, log, cfg)
}

/// Growth exponent `N` with `gain = (1+lambda)^(-N)`; undefined at
/// `lambda = 0`.
fn effective_exponent(gain: f64, lambda: f64) -> Option<f64> {
    let l = lambda.ln_1p();
    (l > 0.0).then(|| -gain.ln() / l)
}

/// Unit vectors on the `count` blocks where the unrestricted stacked gain is
/// smallest relative to polynomial scales (largest effective exponent, zero
/// gains first, later blocks first on ties). The image decays at the gain's rate while `|u(k_N)| = 1`.
pub fn gh_failure_witness(s: &SystemSymbol, count: usize, cfg: &RunConfig) -> Result<WitnessBundle> {
    if count == 0 {
        return Err(Error::Precondition("count must be positive".into()));
    }
    let report = diagnose_system(s, false, cfg);
    if report.verdict == Verdict::GhConsistent {
        return Err(Error::NoDecayingSubsequence(format!(
            "stacked gains satisfy a polynomial bound at truncation K={}",
            s.spectrum().truncation()
        )));
    }
    let spectrum = s.spectrum();
    let scored: Vec<(usize, f64, f64, CVec)> = (0..spectrum.truncation())
        .into_par_iter()
        .filter_map(|k| {
            let blocks = s.blocks_at(k);
            let svd = Svd::of_stack(&blocks);
            let tau = s.stacked_threshold(&svd, k, &cfg.ztol);
            let d = spectrum.multiplicity(k);
            let smallest = svd.s.last().copied().unwrap_or(0.0);
            if smallest <= tau {
                let phi = s.joint_kernel(k, &cfg.ztol).expect("index in range").column(0).into_owned();
                return Some((k, f64::INFINITY, smallest, phi));
            }
            let phi = svd.v.column(d - 1).into_owned();
            effective_exponent(smallest, spectrum.eigenvalue(k)).map(|n| (k, n, smallest, phi))
        })
        .collect();
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[b].1.total_cmp(&scored[a].1).then(scored[b].0.cmp(&scored[a].0)));
    order.truncate(count);
    order.sort_by_key(|&i| scored[i].0);
    let mut blocks: Vec<CVec> = (0..spectrum.truncation()).map(|k| CVec::zeros(spectrum.multiplicity(k))).collect();
    let mut log = Vec::with_capacity(order.len());
    for i in order {
        let (k, n, gain, phi) = &scored[i];
        blocks[*k] = phi.clone();
        log.push(LogEntry { n: *n, k: *k, gain: *gain });
    }
    let u = CoefficientField::new(spectrum.clone(), blocks)?;
    WitnessBundle::build(s, u, log, cfg)
}

/// Distribution `u` with `P u` smooth that stays away from every smooth
/// preimage: on blocks `k_l` where the restricted gain drops below
/// `(1+lambda)^(-N)` for escalating `N = 1, 2, ...`, `u(k_l)` is
/// `(1+lambda_{k_l})^(-(s+rho/2)/nu)` times the unit vector orthogonal to
/// the kernel that attains the gain. Since `u` is orthogonal to every
/// kernel, `|u(k) + v(k)| >= |u(k)|` for any kernel field `v`.
pub fn agh_failure_witness(p: &InvariantSymbol, s: f64, rho: f64, count: usize, cfg: &RunConfig) -> Result<WitnessBundle> {
    let spectrum = p.spectrum();
    let dim = spectrum.manifold_dim() as f64;
    if rho <= dim {
        return Err(Error::Precondition(format!("rho = {rho} must exceed the manifold dimension {dim}")));
    }
    if count == 0 {
        return Err(Error::Precondition("count must be positive".into()));
    }
    let report = diagnose_gs_single(p, cfg);
    if report.gs_test == Some(true) {
        return Err(Error::NoDecayingSubsequence(format!(
            "restricted gains satisfy a polynomial bound at truncation K={}",
            spectrum.truncation()
        )));
    }
    let candidates: Vec<Option<(f64, CVec)>> = (0..spectrum.truncation())
        .into_par_iter()
        .map(|k| {
            let svd = Svd::of(p.block(k));
            let tau = cfg.ztol.threshold(svd.s.first().copied().unwrap_or(0.0), spectrum.multiplicity(k));
            let r = svd.rank(tau);
            (r > 0).then(|| (svd.s[r - 1], svd.v.column(r - 1).into_owned()))
        })
        .collect();
    let nu = spectrum.elliptic_order();
    let mut blocks: Vec<CVec> = (0..spectrum.truncation()).map(|k| CVec::zeros(spectrum.multiplicity(k))).collect();
    let mut log = Vec::new();
    let mut n = 1.0;
    for (k, cand) in candidates.into_iter().enumerate() {
        if log.len() == count {
            break;
        }
        let Some((gain, phi)) = cand else { continue };
        let lambda = spectrum.eigenvalue(k);
        if gain < (1.0 + lambda).powf(-n) {
            let amp = (1.0 + lambda).powf(-(s + rho / 2.0) / nu);
            blocks[k] = phi * C64::new(amp, 0.0);
            log.push(LogEntry { n, k, gain });
            n += 1.0;
        }
    }
    if log.is_empty() {
        return Err(Error::NoDecayingSubsequence(
            "no stored block has a restricted gain below (1+lambda)^-1".into(),
        ));
    }
    let u = CoefficientField::new(spectrum.clone(), blocks)?;
    WitnessBundle::build(&SystemSymbol::single(p.clone()), u, log, cfg)
}
