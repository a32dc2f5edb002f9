//! Matrix symbols of strongly invariant operators and of systems of them.
//!
//! An operator commuting with the elliptic operator maps each eigenspace to
//! itself, so it is stored as one `d_k x d_k` complex matrix per block, in
//! the same orthonormal basis the fields use. All gains below are singular
//! values and therefore independent of that basis choice; the eigenvector
//! matrices of the normal factorizations are not.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ZeroTol;
use crate::error::{Error, Result};
use crate::field::{same_spectrum, CoefficientField};
use crate::fit::least_squares;
use crate::linalg::{self, all_finite, spectral_norm, CMat, CVec, Svd, C64};
use crate::spectrum::SpectrumModel;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSymbol {
    spectrum: Arc<SpectrumModel>,
    blocks: Vec<CMat>,
}

/// `sigma(k) = q^* diag(mu) q` with `q` unitary.
#[derive(Debug, Clone)]
pub struct NormalBlockFactorization {
    pub k: usize,
    pub q: CMat,
    pub mu: Vec<C64>,
}

impl NormalBlockFactorization {
    /// Eigenvector of `mu[l]`, i.e. row `l` of `q` conjugated.
    pub fn eigenvector(&self, l: usize) -> CVec {
        self.q.row(l).adjoint()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityCheck {
    pub per_block: Vec<bool>,
    pub all: bool,
}

impl InvariantSymbol {
    pub fn new(spectrum: Arc<SpectrumModel>, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != spectrum.truncation() {
            return Err(Error::ShapeMismatch {
                index: blocks.len().min(spectrum.truncation()),
                expected: format!("{} blocks", spectrum.truncation()),
                found: format!("{} blocks", blocks.len()),
            });
        }
        for (k, b) in blocks.iter().enumerate() {
            let d = spectrum.multiplicity(k);
            if b.shape() != (d, d) {
                return Err(Error::ShapeMismatch {
                    index: k,
                    expected: format!("{d}x{d}"),
                    found: format!("{}x{}", b.nrows(), b.ncols()),
                });
            }
            if !all_finite(b) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(Self { spectrum, blocks })
    }

    pub fn from_fn(spectrum: Arc<SpectrumModel>, mut f: impl FnMut(usize, usize) -> CMat) -> Result<Self> {
        let blocks = (0..spectrum.truncation())
            .map(|k| f(k, spectrum.multiplicity(k)))
            .collect();
        Self::new(spectrum, blocks)
    }

    /// Diagonal symbol with the given per-block diagonal entries.
    pub fn diagonal(spectrum: Arc<SpectrumModel>, mut f: impl FnMut(usize, usize) -> Vec<C64>) -> Result<Self> {
        Self::from_fn(spectrum, |k, d| CMat::from_diagonal(&CVec::from_vec(f(k, d))))
    }

    pub fn identity(spectrum: Arc<SpectrumModel>) -> Self {
        let blocks = spectrum
            .blocks()
            .iter()
            .map(|b| CMat::identity(b.multiplicity, b.multiplicity))
            .collect();
        Self { spectrum, blocks }
    }

    pub fn zeros(spectrum: Arc<SpectrumModel>) -> Self {
        let blocks = spectrum
            .blocks()
            .iter()
            .map(|b| CMat::zeros(b.multiplicity, b.multiplicity))
            .collect();
        Self { spectrum, blocks }
    }

    pub fn spectrum(&self) -> &Arc<SpectrumModel> {
        &self.spectrum
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    fn check_same(&self, other: &Arc<SpectrumModel>) -> Result<()> {
        if same_spectrum(&self.spectrum, other) {
            Ok(())
        } else {
            Err(Error::SpectrumMismatch("operands live on different spectra".into()))
        }
    }

    /// Blockwise `sigma(k) u_hat(k)`.
    pub fn apply(&self, u: &CoefficientField) -> Result<CoefficientField> {
        self.check_same(u.spectrum())?;
        let blocks = self
            .blocks
            .iter()
            .zip(u.blocks())
            .map(|(s, v)| s * v)
            .collect();
        Ok(CoefficientField::from_blocks_unchecked(self.spectrum.clone(), blocks))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Self> {
        self.check_same(&other.spectrum)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self {
            spectrum: self.spectrum.clone(),
            blocks,
        })
    }

    /// Symbol of `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            spectrum: self.spectrum.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b - b * a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            spectrum: self.spectrum.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    /// Spectral norm of `sigma(k)`.
    pub fn block_norm(&self, k: usize) -> f64 {
        spectral_norm(&self.blocks[k])
    }

    /// Largest block norm over the truncation.
    pub fn max_norm(&self) -> f64 {
        self.blocks.par_iter().map(spectral_norm).reduce(|| 0.0, f64::max)
    }

    pub fn is_normal_block(&self, k: usize, tol: f64) -> bool {
        let s = &self.blocks[k];
        if linalg::is_diagonal(s) {
            return true;
        }
        let adj = s.adjoint();
        let defect = spectral_norm(&(s * &adj - &adj * s));
        let norm = spectral_norm(s);
        defect <= tol * norm.powi(2).max(1.0)
    }

    /// Block `k` passes iff `|sigma sigma^* - sigma^* sigma| <= tol * max(1, |sigma|^2)`.
    pub fn is_normal(&self, tol: f64) -> NormalityCheck {
        let per_block: Vec<bool> = (0..self.blocks.len())
            .into_par_iter()
            .map(|k| self.is_normal_block(k, tol))
            .collect();
        let all = per_block.iter().all(|&b| b);
        NormalityCheck { per_block, all }
    }

    /// Order estimate: least-squares slope of `log |sigma(k)|` against
    /// `log(1+lambda_k)` over the last `tail_fraction` of blocks, times `nu`.
    pub fn estimate_order(&self, tail_fraction: f64, min_samples: usize) -> Result<f64> {
        let kk = self.blocks.len();
        let count = ((kk as f64) * tail_fraction).ceil() as usize;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (kk.saturating_sub(count)..kk)
            .filter_map(|k| {
                let n = self.block_norm(k);
                (n > 0.0).then(|| (self.spectrum.log_scale(k), n.ln()))
            })
            .unzip();
        if xs.len() < min_samples {
            return Err(Error::InsufficientSamples {
                needed: min_samples,
                found: xs.len(),
            });
        }
        Ok(least_squares(&xs, &ys).0 * self.spectrum.elliptic_order())
    }

    /// Smallest singular value of `sigma(k)`: the minimum of `|sigma(k) phi|`
    /// over unit vectors of the eigenspace.
    pub fn full_gain(&self, k: usize) -> Result<f64> {
        self.spectrum.check_index(k)?;
        Ok(Svd::of(&self.blocks[k]).s.last().copied().unwrap_or(0.0))
    }

    /// Smallest singular value above the zero threshold (the minimum over the
    /// orthogonal complement of the kernel); `+inf` when `sigma(k)` vanishes.
    pub fn restricted_gain(&self, k: usize, ztol: &ZeroTol) -> Result<f64> {
        self.spectrum.check_index(k)?;
        Ok(SystemSymbol::stacked_of(&[&self.blocks[k]], true, ztol).gain)
    }

    /// Deterministic unitary diagonalization of a normal block.
    pub fn factor_normal_block(&self, k: usize, tol: f64) -> Result<NormalBlockFactorization> {
        self.spectrum.check_index(k)?;
        if !self.is_normal_block(k, tol) {
            return Err(Error::NonNormal(k));
        }
        let e = linalg::normal_eigen(&self.blocks[k]);
        Ok(NormalBlockFactorization { k, q: e.q, mu: e.mu })
    }
}

/// Ordered family of symbols over one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSymbol {
    operators: Vec<InvariantSymbol>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackedGain {
    pub gain: f64,
    /// Dimension of the joint kernel `∩_j ker sigma_j(k)`.
    pub kernel_dim: usize,
}

/// Shared eigenbasis of a commuting normal block family.
#[derive(Debug, Clone)]
pub struct JointFactorization {
    pub k: usize,
    /// `q sigma_j(k) q^*` is diagonal for every `j`.
    pub q: CMat,
    /// `mu[j][l]`: eigenvalue of operator `j` along direction `l`.
    pub mu: Vec<Vec<C64>>,
}

impl SystemSymbol {
    pub fn new(operators: Vec<InvariantSymbol>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Precondition("a system needs at least one operator".into()));
        };
        for op in &operators[1..] {
            if !same_spectrum(first.spectrum(), op.spectrum()) {
                return Err(Error::SpectrumMismatch("system operators live on different spectra".into()));
            }
        }
        Ok(Self { operators })
    }

    pub fn single(op: InvariantSymbol) -> Self {
        Self { operators: vec![op] }
    }

    pub fn operators(&self) -> &[InvariantSymbol] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn spectrum(&self) -> &Arc<SpectrumModel> {
        self.operators[0].spectrum()
    }

    pub fn blocks_at(&self, k: usize) -> Vec<&CMat> {
        self.operators.iter().map(|op| op.block(k)).collect()
    }

    pub fn with_operator(&self, op: InvariantSymbol) -> Result<Self> {
        let mut ops = self.operators.clone();
        ops.push(op);
        Self::new(ops)
    }

    pub(crate) fn stacked_of(blocks: &[&CMat], restricted: bool, ztol: &ZeroTol) -> StackedGain {
        let d = blocks[0].ncols();
        let svd = Svd::of_stack(blocks);
        let norm = svd.s.first().copied().unwrap_or(0.0);
        let tau = ztol.threshold(norm, d);
        let kernel_dim = svd.s.iter().filter(|&&s| s <= tau).count();
        let gain = if restricted {
            svd.s
                .iter()
                .copied()
                .filter(|&s| s > tau)
                .fold(f64::INFINITY, f64::min)
        } else {
            svd.s.last().copied().unwrap_or(0.0)
        };
        StackedGain { gain, kernel_dim }
    }

    /// Smallest singular value of the stacked `(n d_k) x d_k` matrix, or the
    /// smallest one above the zero threshold when `restricted`.
    pub fn stacked_gain(&self, k: usize, restricted: bool, ztol: &ZeroTol) -> Result<StackedGain> {
        self.spectrum().check_index(k)?;
        Ok(Self::stacked_of(&self.blocks_at(k), restricted, ztol))
    }

    pub(crate) fn stacked_threshold(&self, svd: &Svd, k: usize, ztol: &ZeroTol) -> f64 {
        ztol.threshold(svd.s.first().copied().unwrap_or(0.0), self.spectrum().multiplicity(k))
    }

    /// Orthonormal basis of the joint kernel at block `k`, in canonical form.
    pub fn joint_kernel(&self, k: usize, ztol: &ZeroTol) -> Result<CMat> {
        self.spectrum().check_index(k)?;
        let svd = Svd::of_stack(&self.blocks_at(k));
        let tau = self.stacked_threshold(&svd, k, ztol);
        Ok(linalg::canonical_basis(&svd.kernel(tau)))
    }

    pub fn all_normal(&self, tol: f64) -> bool {
        self.operators.iter().all(|op| op.is_normal(tol).all)
    }

    /// First non-commuting pair `(i, j)` at block `k`, if any.
    pub fn commutation_defect(&self, k: usize, tol: f64) -> Option<(usize, usize)> {
        let n = self.operators.len();
        for i in 0..n {
            for j in i + 1..n {
                let a = self.operators[i].block(k);
                let b = self.operators[j].block(k);
                if linalg::is_diagonal(a) && linalg::is_diagonal(b) {
                    continue;
                }
                let defect = spectral_norm(&(a * b - b * a));
                let scale = (spectral_norm(a) * spectral_norm(b)).max(1.0);
                if defect > tol * scale {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn all_commuting(&self, tol: f64) -> bool {
        (0..self.spectrum().truncation())
            .into_par_iter()
            .all(|k| self.commutation_defect(k, tol).is_none())
    }

    /// One unitary diagonalizing every operator's block `k`.
    pub fn joint_factor_commuting(&self, k: usize, tol: f64) -> Result<JointFactorization> {
        self.spectrum().check_index(k)?;
        for op in &self.operators {
            if !op.is_normal_block(k, tol) {
                return Err(Error::NonNormal(k));
            }
        }
        if let Some((left, right)) = self.commutation_defect(k, tol) {
            return Err(Error::NonCommuting { index: k, left, right });
        }
        let mats: Vec<CMat> = self.operators.iter().map(|op| op.block(k).clone()).collect();
        let j = linalg::joint_eigen(&mats);
        Ok(JointFactorization { k, q: j.q, mu: j.mu })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            operators: self.operators.iter().map(|op| op.scale(c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, off_diagonal_mass, random_unitary};
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one_block(d: usize) -> Arc<SpectrumModel> {
        Arc::new(SpectrumModel::new(1, 2.0, [(0.0, d, None)]).unwrap())
    }

    fn sym(m: CMat) -> InvariantSymbol {
        InvariantSymbol::new(one_block(m.nrows()), vec![m]).unwrap()
    }

    fn diag(v: &[C64]) -> CMat {
        CMat::from_diagonal(&CVec::from_vec(v.to_vec()))
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn apply_cases() {
        let p = sym(diag(&[c(2.0, 0.0), c(0.0, 0.0)]));
        let u = CoefficientField::new(p.spectrum().clone(), vec![CVec::from_vec(vec![c(1.0, 0.0), c(5.0, 0.0)])]).unwrap();
        assert_eq!(p.apply(&u).unwrap().block(0), &CVec::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]));
        let id = InvariantSymbol::identity(p.spectrum().clone());
        assert_eq!(id.apply(&u).unwrap(), u);
    }

    #[test]
    fn apply_twice_is_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(4, &mut rng);
        let p = sym(m.clone());
        let u = CoefficientField::new(
            p.spectrum().clone(),
            vec![CVec::from_fn(4, |_, _| c(rng.random_range(-1.0..1.0), 0.3))],
        )
        .unwrap();
        let twice = p.apply(&p.apply(&u).unwrap()).unwrap();
        let direct = (&m * &m) * u.block(0);
        assert!(linalg::vec_norm(&(twice.block(0) - direct)) < 1e-13);
        let sq = p.compose(&p).unwrap();
        assert!(frobenius(&(sq.block(0) - &m * &m)) < 1e-14);
    }

    #[test]
    fn algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = sym(random_matrix(3, &mut rng));
        assert_eq!(frobenius(p.commutator(&p).unwrap().block(0)), 0.0);
        let a = sym(diag(&[c(1.0, 2.0), c(3.0, 0.0)]));
        let b = sym(diag(&[c(0.0, 1.0), c(-1.0, 0.0)]));
        let b = InvariantSymbol::new(a.spectrum().clone(), b.blocks().to_vec()).unwrap();
        assert_eq!(frobenius(a.commutator(&b).unwrap().block(0)), 0.0);
        assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn normality() {
        assert!(sym(diag(&[c(1.0, 1.0), c(0.0, 0.0)])).is_normal(1e-12).all);
        let jordan = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let j = sym(jordan);
        assert!(!j.is_normal(1e-12).all);
        assert!(matches!(j.factor_normal_block(0, 1e-12), Err(Error::NonNormal(0))));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let q = random_unitary(5, &mut rng);
        let d = diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, -1.0), c(0.0, 0.0), c(3.0, 0.5)]);
        assert!(sym(q.adjoint() * d * &q).is_normal(1e-10).all);
    }

    #[test]
    fn order_estimates() {
        let sp = Arc::new(SpectrumModel::new(2, 2.0, (0..60).map(|k| ((k * (k + 1)) as f64, 2, None))).unwrap());
        let p = InvariantSymbol::diagonal(sp.clone(), |k, d| vec![c(1.0 + sp.eigenvalue(k), 0.0); d]).unwrap();
        assert!((p.estimate_order(0.5, 8).unwrap() - 2.0).abs() < 0.05);
        let id = InvariantSymbol::identity(sp.clone());
        assert!(id.estimate_order(0.5, 8).unwrap().abs() < 1e-12);
        assert!(InvariantSymbol::zeros(sp).estimate_order(0.5, 8).is_err());
    }

    #[test]
    fn gains() {
        let z = ZeroTol::default();
        let p = sym(diag(&[c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]));
        assert_eq!(p.full_gain(0).unwrap(), 0.0);
        assert_eq!(p.restricted_gain(0, &z).unwrap(), 2.0);
        let p = sym(CMat::identity(3, 3) * c(2.0, 0.0));
        assert_eq!(p.full_gain(0).unwrap(), 2.0);
        assert_eq!(sym(CMat::zeros(4, 4)).restricted_gain(0, &z).unwrap(), f64::INFINITY);
        assert!(p.full_gain(1).is_err());
    }

    #[test]
    fn full_gain_matches_hermitian_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let m = random_matrix(5, &mut rng);
            let p = sym(m.clone());
            let gram = m.adjoint() * &m;
            let eig = SymmetricEigen::new(gram);
            let oracle = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min).max(0.0).sqrt();
            let g = p.full_gain(0).unwrap();
            assert!((g - oracle).abs() < 1e-10 * (1.0 + oracle), "{g} vs {oracle}");
        }
    }

    #[test]
    fn stacked_examples() {
        let z = ZeroTol::default();
        let s1 = diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let s2 = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        let sp = one_block(2);
        let sys = SystemSymbol::new(vec![
            InvariantSymbol::new(sp.clone(), vec![s1]).unwrap(),
            InvariantSymbol::new(sp, vec![s2]).unwrap(),
        ])
        .unwrap();
        let g = sys.stacked_gain(0, false, &z).unwrap();
        assert_eq!(g.kernel_dim, 0);
        assert!(g.gain > 0.1);
        // n = 1 reduces to the single-operator gains
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let p = sym(random_matrix(4, &mut rng));
        let single = SystemSymbol::single(p.clone());
        assert!((single.stacked_gain(0, false, &z).unwrap().gain - p.full_gain(0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn factor_examples() {
        let p = sym(diag(&[c(0.0, 5.0), c(-2.0, 0.0)]));
        let f = p.factor_normal_block(0, 1e-12).unwrap();
        assert_eq!(f.mu, vec![c(-2.0, 0.0), c(0.0, 5.0)]);
        let h = sym(CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]));
        let f = h.factor_normal_block(0, 1e-12).unwrap();
        assert!(f.mu[0].norm() < 1e-14 && (f.mu[1] - c(2.0, 0.0)).norm() < 1e-14);
        let v = f.eigenvector(1);
        let s = 0.5f64.sqrt();
        assert!((v[0] - c(s, 0.0)).norm() < 1e-14 && (v[1] + c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn joint_factor_examples() {
        let sp = one_block(3);
        let d1 = diag(&[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let d2 = diag(&[c(0.0, 1.0), c(0.0, 0.0), c(5.0, 0.0)]);
        let sys = SystemSymbol::new(vec![
            InvariantSymbol::new(sp.clone(), vec![d1]).unwrap(),
            InvariantSymbol::new(sp.clone(), vec![d2]).unwrap(),
        ])
        .unwrap();
        let j = sys.joint_factor_commuting(0, 1e-10).unwrap();
        // permutation of the identity
        assert!(j.q.iter().all(|z| *z == c(0.0, 0.0) || *z == c(1.0, 0.0)));

        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let q0 = random_unitary(3, &mut rng);
        let a = q0.adjoint() * diag(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]) * &q0;
        let b = q0.adjoint() * diag(&[c(0.0, 1.0), c(3.0, 0.0), c(3.0, 0.0)]) * &q0;
        let sys = SystemSymbol::new(vec![
            InvariantSymbol::new(sp.clone(), vec![a.clone()]).unwrap(),
            InvariantSymbol::new(sp.clone(), vec![b.clone()]).unwrap(),
        ])
        .unwrap();
        let j = sys.joint_factor_commuting(0, 1e-10).unwrap();
        for m in [&a, &b] {
            assert!(off_diagonal_mass(&(&j.q * m * j.q.adjoint())) < 1e-9);
        }

        // identity imposes nothing: q must diagonalize the second operator
        let e = q0.adjoint() * diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(4.0, 0.0)]) * &q0;
        let sys = SystemSymbol::new(vec![
            InvariantSymbol::identity(sp.clone()),
            InvariantSymbol::new(sp.clone(), vec![e.clone()]).unwrap(),
        ])
        .unwrap();
        let j = sys.joint_factor_commuting(0, 1e-10).unwrap();
        assert!(off_diagonal_mass(&(&j.q * &e * j.q.adjoint())) < 1e-9);

        let jordan = CMat::from_row_slice(3, 3, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let sys = SystemSymbol::new(vec![InvariantSymbol::new(sp.clone(), vec![jordan]).unwrap()]).unwrap();
        assert!(matches!(sys.joint_factor_commuting(0, 1e-10), Err(Error::NonNormal(0))));
        let x = CMat::from_row_slice(3, 3, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let sys = SystemSymbol::new(vec![
            InvariantSymbol::new(sp.clone(), vec![x]).unwrap(),
            InvariantSymbol::new(sp, vec![diag(&[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)])]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(sys.joint_factor_commuting(0, 1e-10), Err(Error::NonCommuting { .. })));
    }
}
