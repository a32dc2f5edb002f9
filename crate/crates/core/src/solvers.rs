//! Per-block solvers for `P u = f` and systems `P_j u = f_j`.
//!
//! All solvers return the solution component orthogonal to the computed
//! (joint) kernel, record data that cannot be reached as compatibility
//! failures, and report the per-block residual against every equation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::{same_spectrum, CoefficientField};
use crate::linalg::{self, line_subspace_angle, spectral_norm, vec_norm, CMat, CVec, Svd, C64};
use crate::symbol::{InvariantSymbol, SystemSymbol};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: CoefficientField,
    /// `( sum_j |sigma_j(k) u(k) - f_j(k)|^2 )^(1/2)` per block.
    pub residual: Vec<f64>,
    /// `(k, deficit)`: norm of the data that no solution can reach.
    pub compat_failures: Vec<(usize, f64)>,
    /// `(k, reason)`: blocks where the requested algorithm could not run.
    pub structural_failures: Vec<(usize, String)>,
    /// Dimension of the (joint) kernel per block; the solution has no
    /// component in it.
    pub kernel_dims: Vec<usize>,
    /// Blocks solved by the stacked least-squares fallback because the
    /// operator-switching equations were ill-conditioned.
    pub fallback_blocks: Vec<usize>,
}

impl SolveOutcome {
    pub fn solution(&self) -> &CoefficientField {
        &self.solution
    }

    /// Everything except the solution field, for a JSON log.
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            max_residual: self.max_residual(),
            compat_failures: self.compat_failures.clone(),
            structural_failures: self.structural_failures.clone(),
            kernel_dims: self.kernel_dims.clone(),
            fallback_blocks: self.fallback_blocks.clone(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_clean(&self) -> bool {
        self.compat_failures.is_empty() && self.structural_failures.is_empty()
    }

    /// Rows `k,lambda,residual,kernel_dim`.
    pub fn residual_csv(&self) -> String {
        use std::fmt::Write as _;
        let spectrum = self.solution().spectrum();
        let mut out = String::from("k,lambda,residual,kernel_dim\n");
        for (k, r) in self.residual.iter().enumerate() {
            writeln!(out, "{k},{},{r:e},{}", spectrum.eigenvalue(k), self.kernel_dims[k]).expect("string write");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub max_residual: f64,
    pub compat_failures: Vec<(usize, f64)>,
    pub structural_failures: Vec<(usize, String)>,
    pub kernel_dims: Vec<usize>,
    pub fallback_blocks: Vec<usize>,
}

#[derive(Default)]
struct BlockOutcome {
    u: CVec,
    compat: Option<f64>,
    structural: Option<String>,
    kernel_dim: usize,
    fallback: bool,
}

fn check_data(s: &SystemSymbol, f: &[CoefficientField]) -> Result<()> {
    if f.len() != s.len() {
        return Err(Error::ShapeMismatch {
            index: 0,
            expected: format!("{} data fields", s.len()),
            found: format!("{} data fields", f.len()),
        });
    }
    for fj in f {
        if !same_spectrum(fj.spectrum(), s.spectrum()) {
            return Err(Error::SpectrumMismatch("data field and symbol use different spectra".into()));
        }
    }
    Ok(())
}

fn stack_data(f: &[CoefficientField], k: usize) -> CVec {
    let parts: Vec<&CVec> = f.iter().map(|fj| fj.block(k)).collect();
    let len = parts.iter().map(|p| p.len()).sum();
    CVec::from_iterator(len, parts.into_iter().flat_map(|p| p.iter().copied()))
}

fn assemble(s: &SystemSymbol, f: &[CoefficientField], blocks: Vec<BlockOutcome>) -> SolveOutcome {
    let mut compat_failures = Vec::new();
    let mut structural_failures = Vec::new();
    let mut fallback_blocks = Vec::new();
    let mut kernel_dims = Vec::with_capacity(blocks.len());
    let mut us = Vec::with_capacity(blocks.len());
    for (k, b) in blocks.into_iter().enumerate() {
        if let Some(d) = b.compat {
            compat_failures.push((k, d));
        }
        if let Some(r) = b.structural {
            structural_failures.push((k, r));
        }
        if b.fallback {
            fallback_blocks.push(k);
        }
        kernel_dims.push(b.kernel_dim);
        us.push(b.u);
    }
    let solution = CoefficientField::from_blocks_unchecked(s.spectrum().clone(), us);
    SolveOutcome {
        residual: residual_unchecked(s, &solution, f),
        solution,
        compat_failures,
        structural_failures,
        kernel_dims,
        fallback_blocks,
    }
}

/// Minimal-norm least-squares solve of the stacked block system.
fn lsq_block(blocks: &[&CMat], data: &CVec, cfg: &RunConfig) -> BlockOutcome {
    let d = blocks[0].ncols();
    let svd = Svd::of_stack(blocks);
    let tau = cfg.ztol.threshold(svd.s.first().copied().unwrap_or(0.0), d);
    let proj = svd.project_range(data, tau);
    let deficit = vec_norm(&(data - proj));
    let compat = (deficit > cfg.compat_tol * vec_norm(data).max(1.0)).then_some(deficit);
    BlockOutcome {
        u: svd.solve_min_norm(data, tau),
        compat,
        kernel_dim: d - svd.rank(tau),
        ..Default::default()
    }
}

/// `P u = f` blockwise: `u(k)` is the minimal-norm preimage of the
/// projection of `f(k)` onto the range of `sigma(k)`.
pub fn solve_single(p: &InvariantSymbol, f: &CoefficientField, cfg: &RunConfig) -> Result<SolveOutcome> {
    solve_system_lsq(&SystemSymbol::single(p.clone()), std::slice::from_ref(f), cfg)
}

/// Minimal-norm least-squares solution of the stacked system per block.
pub fn solve_system_lsq(s: &SystemSymbol, f: &[CoefficientField], cfg: &RunConfig) -> Result<SolveOutcome> {
    check_data(s, f)?;
    let blocks: Vec<BlockOutcome> = (0..s.spectrum().truncation())
        .into_par_iter()
        .map(|k| lsq_block(&s.blocks_at(k), &stack_data(f, k), cfg))
        .collect();
    Ok(assemble(s, f, blocks))
}

/// Eigen-data of one normal operator on one block.
struct Factored {
    q: CMat,
    mu: Vec<C64>,
    nonzero: Vec<bool>,
}

impl Factored {
    fn new(m: &CMat, cfg: &RunConfig) -> Self {
        let e = linalg::normal_eigen(m);
        let tau = cfg.ztol.threshold(spectral_norm(m), m.nrows());
        let nonzero = e.mu.iter().map(|z| z.norm() > tau).collect();
        Self { q: e.q, mu: e.mu, nonzero }
    }

    fn rank(&self) -> usize {
        self.nonzero.iter().filter(|&&b| b).count()
    }

    /// Orthonormal kernel basis (columns).
    fn kernel(&self) -> CMat {
        let idx: Vec<usize> = (0..self.mu.len()).filter(|&l| !self.nonzero[l]).collect();
        let v = self.q.adjoint();
        CMat::from_fn(v.nrows(), idx.len(), |i, c| v[(i, idx[c])])
    }
}

enum Switch {
    Solved(CVec),
    Structural(String),
    IllConditioned,
}

/// Operator-switching solve on a block whose joint kernel is trivial.
///
/// With `sigma_j = Q_j^* diag(mu_j) Q_j` and `w_j = Q_j u`, the coordinates
/// `w_j(m)` with `mu_j(m) != 0` are `g_j(m) / mu_j(m)`. For a zero
/// eigenvalue direction `psi_m` an operator `j_m` whose kernel is
/// transversal to `psi_m` is used: `w_j(m) = sum_l c_ml w_{j_m}(l)` with
/// `c = Q_j Q_{j_m}^*`. The coordinates `w_{j_m}(l)` on the kernel of
/// `sigma_{j_m}` are themselves expansions of `w_j`, which leaves a small
/// linear system in the unknown coordinates of `w_j`.
fn switching_block(blocks: &[CMat], data: &[CVec], cfg: &RunConfig) -> Switch {
    let d = blocks[0].nrows();
    let facs: Vec<Factored> = blocks.iter().map(|b| Factored::new(b, cfg)).collect();
    let j = (0..facs.len())
        .max_by(|&a, &b| facs[a].rank().cmp(&facs[b].rank()).then(b.cmp(&a)))
        .expect("nonempty system");
    let fj = &facs[j];
    let g: Vec<CVec> = facs.iter().zip(data).map(|(f, x)| &f.q * x).collect();
    let zj: Vec<usize> = (0..d).filter(|&m| !fj.nonzero[m]).collect();
    let mut w = CVec::zeros(d);
    for m in 0..d {
        if fj.nonzero[m] {
            w[m] = g[j][m] / fj.mu[m];
        }
    }
    if zj.is_empty() {
        return Switch::Solved(fj.q.adjoint() * w);
    }
    let kernels: Vec<CMat> = facs.iter().map(Factored::kernel).collect();
    let nz = zj.len();
    let mut a = CMat::identity(nz, nz);
    let mut r = CVec::zeros(nz);
    for (row, &m) in zj.iter().enumerate() {
        let psi = fj.q.row(m).adjoint();
        let Some(jm) = (0..facs.len()).find(|&i| i != j && line_subspace_angle(&psi, &kernels[i]) > cfg.angle_min) else {
            return Switch::Structural(format!("no operator is transversal to zero direction {m} of operator {j}"));
        };
        let fm = &facs[jm];
        let c = &fj.q * fm.q.adjoint();
        for l in 0..d {
            if fm.nonzero[l] {
                r[row] += c[(m, l)] * g[jm][l] / fm.mu[l];
            } else {
                // w_{jm}(l) = sum_{m'} conj(c_{m'l}) w_j(m')
                for mp in 0..d {
                    let coeff = c[(m, l)] * c[(mp, l)].conj();
                    if fj.nonzero[mp] {
                        r[row] += coeff * w[mp];
                    } else {
                        let col = zj.iter().position(|&x| x == mp).expect("zero index");
                        a[(row, col)] -= coeff;
                    }
                }
            }
        }
    }
    let svd = Svd::of(&a);
    let smax = svd.s[0];
    let smin = *svd.s.last().expect("nonempty");
    if smin <= 1e-8 * smax.max(1.0) {
        return Switch::IllConditioned;
    }
    let x = svd.solve_min_norm(&r, 0.0);
    for (row, &m) in zj.iter().enumerate() {
        w[m] = x[row];
    }
    Switch::Solved(fj.q.adjoint() * w)
}

fn normal_block(s: &SystemSymbol, f: &[CoefficientField], k: usize, cfg: &RunConfig) -> BlockOutcome {
    let blocks = s.blocks_at(k);
    let data: Vec<CVec> = f.iter().map(|x| x.block(k).clone()).collect();
    let d = blocks[0].nrows();
    if d == 0 {
        return BlockOutcome { u: CVec::zeros(0), ..Default::default() };
    }
    let svd = Svd::of_stack(&blocks);
    let tau = s.stacked_threshold(&svd, k, &cfg.ztol);
    let rank = svd.rank(tau);
    let kernel_dim = d - rank;
    // compress to the complement of the joint kernel, where the restricted
    // blocks are again normal and share no kernel vector
    let (reduced, reduced_data, basis, compat) = if kernel_dim > 0 {
        let b = svd.co_kernel(tau);
        let bs = b.adjoint();
        let mut deficit2 = 0.0;
        let mut total2 = 0.0;
        let mut rd = Vec::with_capacity(data.len());
        for x in &data {
            let y = &bs * x;
            deficit2 += vec_norm(&(x - &b * &y)).powi(2);
            total2 += vec_norm(x).powi(2);
            rd.push(y);
        }
        let deficit = deficit2.sqrt();
        let compat = (deficit > cfg.compat_tol * total2.sqrt().max(1.0)).then_some(deficit);
        let rb: Vec<CMat> = blocks.iter().map(|m| &bs * *m * &b).collect();
        (rb, rd, Some(b), compat)
    } else {
        (blocks.iter().map(|m| (*m).clone()).collect(), data.clone(), None, None)
    };
    let lift = |u: CVec| match &basis {
        Some(b) => b * u,
        None => u,
    };
    if rank == 0 {
        return BlockOutcome { u: CVec::zeros(d), compat, kernel_dim, ..Default::default() };
    }
    match switching_block(&reduced, &reduced_data, cfg) {
        Switch::Solved(u) => BlockOutcome { u: lift(u), compat, kernel_dim, ..Default::default() },
        Switch::Structural(reason) => {
            let mut out = lsq_block(&blocks, &stack_data(f, k), cfg);
            out.structural = Some(reason);
            out.compat = compat;
            out
        }
        Switch::IllConditioned => {
            let mut out = lsq_block(&blocks, &stack_data(f, k), cfg);
            out.fallback = true;
            out.compat = compat;
            out
        }
    }
}

/// Systems of normal operators, solved block by block in the eigenbases of a
/// working operator (the one with most nonzero eigenvalues, lowest index on
/// ties), switching to a transversal operator for each zero eigenvalue
/// direction. Blocks with a nontrivial joint kernel are solved on its
/// orthogonal complement.
pub fn solve_system_normal(s: &SystemSymbol, f: &[CoefficientField], cfg: &RunConfig) -> Result<SolveOutcome> {
    check_data(s, f)?;
    for op in s.operators() {
        if let Some(k) = op.is_normal(cfg.structure_tol).per_block.iter().position(|&b| !b) {
            return Err(Error::NonNormal(k));
        }
    }
    let blocks: Vec<BlockOutcome> = (0..s.spectrum().truncation())
        .into_par_iter()
        .map(|k| normal_block(s, f, k, cfg))
        .collect();
    Ok(assemble(s, f, blocks))
}

/// Commuting normal systems: in the joint eigenbasis each direction is
/// divided by the operator with the largest eigenvalue modulus there;
/// directions where every eigenvalue vanishes get component 0.
pub fn solve_system_commuting(s: &SystemSymbol, f: &[CoefficientField], cfg: &RunConfig) -> Result<SolveOutcome> {
    check_data(s, f)?;
    let blocks: Vec<Result<BlockOutcome>> = (0..s.spectrum().truncation())
        .into_par_iter()
        .map(|k| {
            let jf = s.joint_factor_commuting(k, cfg.structure_tol)?;
            let d = s.spectrum().multiplicity(k);
            let norm = s.operators().iter().map(|op| spectral_norm(op.block(k))).fold(0.0, f64::max);
            let tau = cfg.ztol.threshold(norm, d);
            let g: Vec<CVec> = f.iter().map(|x| &jf.q * x.block(k)).collect();
            let total = vec_norm(&stack_data(f, k));
            let mut w = CVec::zeros(d);
            let mut deficit2 = 0.0;
            let mut kernel_dim = 0;
            for l in 0..d {
                let (jstar, best) = jf
                    .mu
                    .iter()
                    .enumerate()
                    .map(|(j, row)| (j, row[l].norm()))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                if best > tau {
                    w[l] = g[jstar][l] / jf.mu[jstar][l];
                } else {
                    kernel_dim += 1;
                    deficit2 += g.iter().map(|gj| gj[l].norm_sqr()).sum::<f64>();
                }
            }
            let deficit = deficit2.sqrt();
            Ok(BlockOutcome {
                u: jf.q.adjoint() * w,
                compat: (deficit > cfg.compat_tol * total.max(1.0)).then_some(deficit),
                kernel_dim,
                ..Default::default()
            })
        })
        .collect();
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(assemble(s, f, blocks))
}

fn residual_unchecked(s: &SystemSymbol, u: &CoefficientField, f: &[CoefficientField]) -> Vec<f64> {
    (0..s.spectrum().truncation())
        .into_par_iter()
        .map(|k| {
            s.operators()
                .iter()
                .zip(f)
                .map(|(op, fj)| vec_norm(&(op.block(k) * u.block(k) - fj.block(k))).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `( sum_j |sigma_j(k) u(k) - f_j(k)|^2 )^(1/2)` per block.
pub fn residual(s: &SystemSymbol, u: &CoefficientField, f: &[CoefficientField]) -> Result<Vec<f64>> {
    check_data(s, f)?;
    if !same_spectrum(u.spectrum(), s.spectrum()) {
        return Err(Error::SpectrumMismatch("solution and symbol use different spectra".into()));
    }
    Ok(residual_unchecked(s, u, f))
}

/// Largest blockwise deviation `|u(k) - v(k)| / max(1, |v(k)|)`.
pub fn max_block_deviation(u: &CoefficientField, v: &CoefficientField) -> f64 {
    u.blocks()
        .iter()
        .zip(v.blocks())
        .map(|(a, b)| vec_norm(&(a - b)) / vec_norm(b).max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::spectrum::SpectrumModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn one_block(d: usize) -> Arc<SpectrumModel> {
        Arc::new(SpectrumModel::new(1, 2.0, [(0.0, d, None)]).unwrap())
    }

    fn sym(s: &Arc<SpectrumModel>, m: CMat) -> InvariantSymbol {
        InvariantSymbol::new(s.clone(), vec![m]).unwrap()
    }

    fn field(s: &Arc<SpectrumModel>, v: &[f64]) -> CoefficientField {
        CoefficientField::new(s.clone(), vec![CVec::from_iterator(v.len(), v.iter().map(|&x| c(x)))]).unwrap()
    }

    fn mat(rows: &[&[f64]]) -> CMat {
        CMat::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    #[test]
    fn single_examples() {
        let s = one_block(2);
        let p = sym(&s, mat(&[&[2.0, 0.0], &[0.0, 0.0]]));
        let cfg = RunConfig::default();
        let out = solve_single(&p, &field(&s, &[4.0, 0.0]), &cfg).unwrap();
        assert_eq!(out.solution().block(0)[0], c(2.0));
        assert_eq!(out.solution().block(0)[1], c(0.0));
        assert!(out.compat_failures.is_empty());
        assert_eq!(out.kernel_dims, vec![1]);
        let out = solve_single(&p, &field(&s, &[4.0, 1.0]), &cfg).unwrap();
        assert_eq!(out.compat_failures, vec![(0, 1.0)]);
        assert_eq!(out.solution().block(0)[0], c(2.0));
        assert_eq!(out.residual, vec![1.0]);
    }

    #[test]
    fn single_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = RunConfig::default();
        for d in 1..=6 {
            let s = one_block(d);
            let m = CMat::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let f = CVec::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let inv = m.clone().try_inverse().unwrap() * &f;
            let out = solve_single(&sym(&s, m), &CoefficientField::new(s.clone(), vec![f]).unwrap(), &cfg).unwrap();
            assert!(vec_norm(&(out.solution().block(0) - inv)) < 1e-10);
        }
    }

    #[test]
    fn diagonal_pair_switches_operator() {
        let s = one_block(2);
        let sys = SystemSymbol::new(vec![
            sym(&s, mat(&[&[0.0, 0.0], &[0.0, 3.0]])),
            sym(&s, mat(&[&[5.0, 0.0], &[0.0, 0.0]])),
        ])
        .unwrap();
        let f = [field(&s, &[0.0, 6.0]), field(&s, &[10.0, 0.0])];
        let cfg = RunConfig::default();
        for out in [
            solve_system_normal(&sys, &f, &cfg).unwrap(),
            solve_system_commuting(&sys, &f, &cfg).unwrap(),
            solve_system_lsq(&sys, &f, &cfg).unwrap(),
        ] {
            let u = out.solution().block(0);
            assert!((u[0] - c(2.0)).norm() < 1e-14 && (u[1] - c(2.0)).norm() < 1e-14, "{u}");
            assert!(out.is_clean());
        }
    }

    #[test]
    fn planted_non_commuting_pair() {
        let s = one_block(2);
        let sys = SystemSymbol::new(vec![
            sym(&s, mat(&[&[0.0, 0.0], &[0.0, 1.0]])),
            sym(&s, mat(&[&[1.0, -1.0], &[-1.0, 1.0]])),
        ])
        .unwrap();
        let f = [field(&s, &[0.0, 4.0]), field(&s, &[-1.0, 1.0])];
        let cfg = RunConfig::default();
        let out = solve_system_normal(&sys, &f, &cfg).unwrap();
        let u = out.solution().block(0);
        assert!((u[0] - c(3.0)).norm() < 1e-12 && (u[1] - c(4.0)).norm() < 1e-12, "{u}");
        assert!(out.fallback_blocks.is_empty());
        assert!(out.max_residual() < 1e-12);
        let lsq = solve_system_lsq(&sys, &f, &cfg).unwrap();
        assert!(max_block_deviation(out.solution(), lsq.solution()) < 1e-12);
        assert!(solve_system_commuting(&sys, &f, &cfg).is_err());
    }

    #[test]
    fn invertible_working_operator_is_plain_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = one_block(4);
        let q = random_unitary(4, &mut rng);
        let mu = CVec::from_fn(4, |i, _| C64::new(1.0 + i as f64, 0.5));
        let m = q.adjoint() * CMat::from_diagonal(&mu) * &q;
        let f = CVec::from_fn(4, |i, _| c(i as f64 - 1.0));
        let expect = m.clone().try_inverse().unwrap() * &f;
        let sys = SystemSymbol::new(vec![sym(&s, CMat::zeros(4, 4)), sym(&s, m)]).unwrap();
        let data = [CoefficientField::zeros(s.clone()), CoefficientField::new(s.clone(), vec![f]).unwrap()];
        let out = solve_system_normal(&sys, &data, &RunConfig::default()).unwrap();
        assert!(vec_norm(&(out.solution().block(0) - expect)) < 1e-12);
    }

    #[test]
    fn joint_kernel_blocks_are_compressed() {
        let s = one_block(3);
        // both operators kill e_3; on span{e_1,e_2} they form the planted pair
        let a = mat(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b = mat(&[&[1.0, -1.0, 0.0], &[-1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let sys = SystemSymbol::new(vec![sym(&s, a), sym(&s, b)]).unwrap();
        let cfg = RunConfig::default();
        let f = [field(&s, &[0.0, 4.0, 0.0]), field(&s, &[-1.0, 1.0, 0.0])];
        let out = solve_system_normal(&sys, &f, &cfg).unwrap();
        let u = out.solution().block(0);
        assert!((u - CVec::from_vec(vec![c(3.0), c(4.0), c(0.0)])).norm() < 1e-12);
        assert_eq!(out.kernel_dims, vec![1]);
        assert!(out.is_clean());
        let bad = [field(&s, &[0.0, 4.0, 2.0]), field(&s, &[-1.0, 1.0, 0.0])];
        let out = solve_system_normal(&sys, &bad, &cfg).unwrap();
        assert_eq!(out.compat_failures.len(), 1);
        assert!((out.compat_failures[0].1 - 2.0).abs() < 1e-12);
        assert_eq!(out.solution().block(0)[2], c(0.0));
    }

    #[test]
    fn commuting_zero_directions() {
        let s = one_block(2);
        let sys = SystemSymbol::new(vec![
            sym(&s, mat(&[&[2.0, 0.0], &[0.0, 0.0]])),
            sym(&s, mat(&[&[1.0, 0.0], &[0.0, 0.0]])),
        ])
        .unwrap();
        let cfg = RunConfig::default();
        let out = solve_system_commuting(&sys, &[field(&s, &[4.0, 0.0]), field(&s, &[2.0, 0.0])], &cfg).unwrap();
        assert!(out.is_clean());
        assert_eq!(out.solution().block(0)[1], c(0.0));
        assert_eq!(out.solution().block(0)[0], c(2.0));
        let out = solve_system_commuting(&sys, &[field(&s, &[4.0, 1.0]), field(&s, &[2.0, 0.0])], &cfg).unwrap();
        assert_eq!(out.compat_failures, vec![(0, 1.0)]);
    }

    #[test]
    fn residual_examples() {
        let s = one_block(2);
        let m = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let sys = SystemSymbol::single(sym(&s, m));
        let f = [field(&s, &[3.0, 4.0])];
        let r = residual(&sys, &CoefficientField::zeros(s.clone()), &f).unwrap();
        assert_eq!(r, vec![5.0]);
        let out = solve_system_lsq(&sys, &f, &RunConfig::default()).unwrap();
        assert!(out.max_residual() < 1e-12);
        let eps = 1e-3;
        let pert = CoefficientField::combine(out.solution(), c(1.0), &field(&s, &[1.0, 0.0]), c(eps)).unwrap();
        let r1 = residual(&sys, &pert, &f).unwrap()[0];
        let pert2 = CoefficientField::combine(out.solution(), c(1.0), &field(&s, &[1.0, 0.0]), c(2.0 * eps)).unwrap();
        let r2 = residual(&sys, &pert2, &f).unwrap()[0];
        assert!((r2 / r1 - 2.0).abs() < 1e-6);
        assert!(residual(&sys, &CoefficientField::zeros(s.clone()), &[]).is_err());
    }

    #[test]
    fn idempotent_resolve() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = one_block(5);
        let q = random_unitary(5, &mut rng);
        let mu = CVec::from_vec(vec![c(0.0), c(1.0), C64::new(0.0, 2.0), c(0.0), c(-3.0)]);
        let m = q.adjoint() * CMat::from_diagonal(&mu) * &q;
        let p = sym(&s, m);
        let f = CoefficientField::new(s.clone(), vec![CVec::from_fn(5, |i, _| c(i as f64))]).unwrap();
        let cfg = RunConfig::default();
        let u = solve_single(&p, &f, &cfg).unwrap().solution().clone();
        let again = solve_single(&p, &p.apply(&u).unwrap(), &cfg).unwrap();
        assert!(max_block_deviation(again.solution(), &u) < 1e-10);
        let kernel = SystemSymbol::single(p).joint_kernel(0, &cfg.ztol).unwrap();
        assert!(vec_norm(&(kernel.adjoint() * u.block(0))) < 1e-10);
    }
}
