//! Finite-truncation tests for global hypoellipticity (GH) and global
//! solvability (GS).
//!
//! Every diagnostic samples a gain per block, fits a polynomial lower bound
//! over the tail, takes a census of blocks with nontrivial (joint) kernel and
//! combines the evidence into a [`Verdict`]. Verdicts only speak about the
//! stored blocks; the report's `truncation_note` says so.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fit::{self, fit_poly_bound, GainSample, PolyBoundFit};
use crate::linalg::{spectral_norm, Svd};
use crate::spectrum::SpectrumModel;
use crate::symbol::{InvariantSymbol, SystemSymbol};

fn ser_gain<S: Serializer>(g: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if g.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*g)
    }
}

fn de_gain<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid gain {t:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainPoint {
    pub k: usize,
    pub lambda: f64,
    /// `+inf` when no nonzero singular value or eigenvalue exists.
    #[serde(serialize_with = "ser_gain", deserialize_with = "de_gain")]
    pub gain: f64,
    pub kernel_dim: usize,
    /// Gain is at or below the zero threshold.
    pub zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCurve {
    pub samples: Vec<GainPoint>,
    pub zero_blocks: Vec<usize>,
}

impl GainCurve {
    fn new(samples: Vec<GainPoint>) -> Self {
        let zero_blocks = samples.iter().filter(|p| p.zero).map(|p| p.k).collect();
        Self { samples, zero_blocks }
    }

    /// Fit input; thresholded zeros enter as exact zeros.
    pub fn fit_samples(&self) -> Vec<GainSample> {
        self.samples
            .iter()
            .map(|p| (p.k, p.lambda, if p.zero { 0.0 } else { p.gain }))
            .collect()
    }

    pub fn gains(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.gain).collect()
    }

    /// Rows `k,lambda,gain,kernel_dim`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda,gain,kernel_dim\n");
        for p in &self.samples {
            let gain = if p.gain.is_infinite() { "inf".to_string() } else { format!("{:e}", p.gain) };
            writeln!(out, "{},{},{},{}", p.k, p.lambda, gain, p.kernel_dim).expect("string write");
        }
        out
    }
}

/// Blocks whose (joint) kernel is nontrivial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZCensus {
    pub members: Vec<usize>,
    pub kernel_dims: Vec<usize>,
    /// Least-squares slope of `|Z ∩ [0,k]|` against `k` over the tail blocks.
    pub density_trend: f64,
    /// Members among the final `z_tail_fraction` of blocks.
    pub tail_members: usize,
    pub finite_at_truncation: bool,
}

impl ZCensus {
    fn from_kernel_dims(dims: &[usize], cfg: &RunConfig) -> Self {
        let kk = dims.len();
        let members: Vec<usize> = (0..kk).filter(|&k| dims[k] > 0).collect();
        let kernel_dims = members.iter().map(|&k| dims[k]).collect();
        let z_start = kk - ((kk as f64 * cfg.z_tail_fraction).ceil() as usize).min(kk);
        let tail_members = members.iter().filter(|&&k| k >= z_start).count();
        let start = kk - ((kk as f64 * cfg.tail_fraction).ceil() as usize).min(kk);
        let mut count = members.iter().filter(|&&k| k < start).count() as f64;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (start..kk)
            .map(|k| {
                if dims[k] > 0 {
                    count += 1.0;
                }
                (k as f64, count)
            })
            .unzip();
        let density_trend = if xs.len() >= 2 { fit::least_squares(&xs, &ys).0 } else { 0.0 };
        Self {
            members,
            kernel_dims,
            density_trend,
            tail_members,
            finite_at_truncation: tail_members == 0 && density_trend < cfg.z_slope_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "GH_consistent")]
    GhConsistent,
    #[serde(rename = "GS_not_GH_consistent")]
    GsNotGhConsistent,
    #[serde(rename = "not_GS_consistent")]
    NotGsConsistent,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    /// Combines the two partial tests; `None` means undecided.
    pub fn from_tests(gh: Option<bool>, gs: Option<bool>) -> Self {
        match (gh, gs) {
            (Some(true), _) => Verdict::GhConsistent,
            (_, Some(false)) => Verdict::NotGsConsistent,
            (Some(false), Some(true)) => Verdict::GsNotGhConsistent,
            _ => Verdict::Inconclusive,
        }
    }

    /// CLI contract: 0 GH, 1 GS only, 2 not GS, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::GhConsistent => 0,
            Verdict::GsNotGhConsistent => 1,
            Verdict::NotGsConsistent => 2,
            Verdict::Inconclusive => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::GhConsistent => "GH_consistent",
            Verdict::GsNotGhConsistent => "GS_not_GH_consistent",
            Verdict::NotGsConsistent => "not_GS_consistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    GhSingle,
    GsSingle,
    System,
    SystemRestricted,
    NormalSystem,
    Commuting,
}

/// A gain curve with its fit, or the reason no fit was made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub curve: GainCurve,
    pub fit: Option<PolyBoundFit>,
    pub fit_note: Option<String>,
}

impl Evidence {
    fn new(curve: GainCurve, cfg: &RunConfig) -> Self {
        match fit_poly_bound(&curve.fit_samples(), cfg.tail_fraction, cfg.n_probe, cfg.min_samples) {
            Ok(f) => Self { curve, fit: Some(f), fit_note: None },
            Err(e) => Self { curve, fit: None, fit_note: Some(e.to_string()) },
        }
    }

    /// `Some(true)` when a polynomial bound is supported, `Some(false)` when
    /// the tail decays super-polynomially, `None` without enough samples.
    fn bound_test(&self) -> Option<bool> {
        self.fit.as_ref().map(PolyBoundFit::passes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub kind: DiagnosticKind,
    pub curve: GainCurve,
    pub fit: Option<PolyBoundFit>,
    pub fit_note: Option<String>,
    /// The complementary curve (unrestricted for GS runs, restricted for GH
    /// runs) when the verdict depends on it.
    pub secondary: Option<Evidence>,
    pub z_census: ZCensus,
    pub gh_test: Option<bool>,
    pub gs_test: Option<bool>,
    pub verdict: Verdict,
    pub truncation_note: String,
    pub config_hash: String,
}

impl DiagnosticReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: DiagnosticKind,
        spectrum: &SpectrumModel,
        primary: Evidence,
        secondary: Option<Evidence>,
        z_census: ZCensus,
        gh_test: Option<bool>,
        gs_test: Option<bool>,
        cfg: &RunConfig,
    ) -> Self {
        let verdict = Verdict::from_tests(gh_test, gs_test);
        let kk = spectrum.truncation();
        let truncation_note = format!(
            "{} at truncation K={kk} (lambda_max={}); fits use the last {} of the log(1+lambda) range; \
             kernel census has {} member(s), {} in the final {} of blocks; no statement beyond stored blocks",
            verdict.as_str(),
            spectrum.eigenvalue(kk - 1),
            cfg.tail_fraction,
            z_census.members.len(),
            z_census.tail_members,
            cfg.z_tail_fraction,
        );
        Self {
            kind,
            curve: primary.curve,
            fit: primary.fit,
            fit_note: primary.fit_note,
            secondary,
            z_census,
            gh_test,
            gs_test,
            verdict,
            truncation_note,
            config_hash: cfg.hash(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        self.curve.to_csv()
    }
}

/// Kernel blocks falling inside the fit's tail window.
fn members_in_window(census: &ZCensus, spectrum: &SpectrumModel, tail: f64) -> bool {
    let kk = spectrum.truncation();
    let lo = spectrum.log_scale(0);
    let hi = spectrum.log_scale(kk - 1);
    let cut = hi - tail * (hi - lo);
    census.members.iter().any(|&k| spectrum.log_scale(k) >= cut)
}

fn gh_test(unrestricted: &Evidence, census: &ZCensus, spectrum: &SpectrumModel, cfg: &RunConfig) -> Option<bool> {
    if !census.finite_at_truncation || members_in_window(census, spectrum, cfg.tail_fraction) {
        return Some(false);
    }
    unrestricted.bound_test()
}

/// Stacked gains of every block, both unrestricted and restricted.
fn stacked_curves(s: &SystemSymbol, cfg: &RunConfig) -> (GainCurve, GainCurve) {
    let spectrum = s.spectrum();
    let points: Vec<(GainPoint, GainPoint)> = (0..spectrum.truncation())
        .into_par_iter()
        .map(|k| {
            let lambda = spectrum.eigenvalue(k);
            let svd = Svd::of_stack(&s.blocks_at(k));
            let tau = s.stacked_threshold(&svd, k, &cfg.ztol);
            let kernel_dim = svd.s.iter().filter(|&&x| x <= tau).count();
            let smallest = svd.s.last().copied().unwrap_or(0.0);
            let restricted = svd.s.iter().copied().filter(|&x| x > tau).fold(f64::INFINITY, f64::min);
            (
                GainPoint { k, lambda, gain: smallest, kernel_dim, zero: kernel_dim > 0 },
                GainPoint { k, lambda, gain: restricted, kernel_dim, zero: false },
            )
        })
        .collect();
    let (full, restricted): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    (GainCurve::new(full), GainCurve::new(restricted))
}

/// Stacked-gain diagnostic of a system; `restricted` selects the GS-type
/// curve (smallest nonzero singular value) as the reported one. Both curves
/// are always computed: GH needs the unrestricted curve and a finite kernel
/// census, GS needs the restricted curve.
pub fn diagnose_system(s: &SystemSymbol, restricted: bool, cfg: &RunConfig) -> DiagnosticReport {
    let kind = if restricted { DiagnosticKind::SystemRestricted } else { DiagnosticKind::System };
    stacked_report(s, kind, restricted, cfg)
}

fn stacked_report(s: &SystemSymbol, kind: DiagnosticKind, restricted: bool, cfg: &RunConfig) -> DiagnosticReport {
    let spectrum = s.spectrum();
    let (full, restr) = stacked_curves(s, cfg);
    let dims: Vec<usize> = full.samples.iter().map(|p| p.kernel_dim).collect();
    let census = ZCensus::from_kernel_dims(&dims, cfg);
    let full = Evidence::new(full, cfg);
    let restr = Evidence::new(restr, cfg);
    let gh = gh_test(&full, &census, spectrum, cfg);
    let gs = restr.bound_test();
    let (primary, secondary) = if restricted { (restr, full) } else { (full, restr) };
    DiagnosticReport::assemble(kind, spectrum, primary, Some(secondary), census, gh, gs, cfg)
}

/// Smallest singular value per block against a polynomial lower bound.
pub fn diagnose_gh_single(p: &InvariantSymbol, cfg: &RunConfig) -> DiagnosticReport {
    stacked_report(&SystemSymbol::single(p.clone()), DiagnosticKind::GhSingle, false, cfg)
}

/// Smallest nonzero singular value per block against a polynomial lower
/// bound; blocks where the symbol vanishes carry `+inf` and pass vacuously.
pub fn diagnose_gs_single(p: &InvariantSymbol, cfg: &RunConfig) -> DiagnosticReport {
    stacked_report(&SystemSymbol::single(p.clone()), DiagnosticKind::GsSingle, true, cfg)
}

fn require_normal(s: &SystemSymbol, cfg: &RunConfig) -> Result<()> {
    for op in s.operators() {
        let check = op.is_normal(cfg.structure_tol);
        if let Some(k) = check.per_block.iter().position(|&b| !b) {
            return Err(Error::NonNormal(k));
        }
    }
    Ok(())
}

fn eigen_report(
    s: &SystemSymbol,
    kind: DiagnosticKind,
    points: Vec<GainPoint>,
    cfg: &RunConfig,
) -> DiagnosticReport {
    let spectrum = s.spectrum();
    let dims: Vec<usize> = points.iter().map(|p| p.kernel_dim).collect();
    let census = ZCensus::from_kernel_dims(&dims, cfg);
    let evidence = Evidence::new(GainCurve::new(points), cfg);
    let gs = evidence.bound_test();
    let gh = if !census.finite_at_truncation || members_in_window(&census, spectrum, cfg.tail_fraction) {
        Some(false)
    } else {
        gs
    };
    DiagnosticReport::assemble(kind, spectrum, evidence, None, census, gh, gs, cfg)
}

/// Normal systems: the gain is the smallest nonzero eigenvalue modulus over
/// all operators of the block. GS needs a polynomial bound on it, GH in
/// addition a finite joint-kernel census.
pub fn diagnose_normal_system(s: &SystemSymbol, cfg: &RunConfig) -> Result<DiagnosticReport> {
    require_normal(s, cfg)?;
    let spectrum = s.spectrum();
    let points: Vec<GainPoint> = (0..spectrum.truncation())
        .into_par_iter()
        .map(|k| {
            let d = spectrum.multiplicity(k);
            let mut gain = f64::INFINITY;
            for op in s.operators() {
                let f = op.factor_normal_block(k, cfg.structure_tol).expect("normality checked");
                let tau = cfg.ztol.threshold(spectral_norm(op.block(k)), d);
                for mu in &f.mu {
                    let m = mu.norm();
                    if m > tau {
                        gain = gain.min(m);
                    }
                }
            }
            let kernel_dim = SystemSymbol::stacked_of(&s.blocks_at(k), false, &cfg.ztol).kernel_dim;
            GainPoint { k, lambda: spectrum.eigenvalue(k), gain, kernel_dim, zero: false }
        })
        .collect();
    Ok(eigen_report(s, DiagnosticKind::NormalSystem, points, cfg))
}

/// Commuting normal systems: per shared eigendirection the score is the
/// largest eigenvalue modulus across operators; the gain is the smallest
/// nonzero score and directions with zero score form the joint kernel.
pub fn diagnose_commuting(s: &SystemSymbol, cfg: &RunConfig) -> Result<DiagnosticReport> {
    require_normal(s, cfg)?;
    let spectrum = s.spectrum();
    let points: Vec<Result<GainPoint>> = (0..spectrum.truncation())
        .into_par_iter()
        .map(|k| {
            let jf = s.joint_factor_commuting(k, cfg.structure_tol)?;
            let d = spectrum.multiplicity(k);
            let norm = s.operators().iter().map(|op| spectral_norm(op.block(k))).fold(0.0, f64::max);
            let tau = cfg.ztol.threshold(norm, d);
            let mut gain = f64::INFINITY;
            let mut kernel_dim = 0;
            for l in 0..d {
                let score = jf.mu.iter().map(|row| row[l].norm()).fold(0.0, f64::max);
                if score > tau {
                    gain = gain.min(score);
                } else {
                    kernel_dim += 1;
                }
            }
            Ok(GainPoint { k, lambda: spectrum.eigenvalue(k), gain, kernel_dim, zero: false })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(eigen_report(s, DiagnosticKind::Commuting, points, cfg))
}
