//! Built-in spectra and symbols: flat tori with constant-coefficient
//! vector fields, the round sphere with its rotation field, and seeded
//! synthetic symbols for oracle tests.

pub mod diophantine;
mod synthetic;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use diophantine::DiophantineCoefficient;
pub use synthetic::{synthetic_symbol, Profile, Recipe, SyntheticSymbol};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::spectrum::SpectrumModel;
use crate::symbol::InvariantSymbol;

/// Lattice bookkeeping for the flat torus `T^dim` with `E = -Laplacian`:
/// one block per attained value `m = |xi|^2 <= radius_sq_max`, the basis of
/// block `m` being the exponentials `e^{i xi x}` with `|xi|^2 = m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusModel {
    pub dim: usize,
    pub radius_sq_max: u64,
    /// Per block, lattice points in lexicographic order.
    pub block_basis: Vec<Vec<Vec<i64>>>,
}

impl TorusModel {
    /// Block index holding `|xi|^2 = m`, if stored.
    pub fn block_of_norm(&self, m: u64) -> Option<usize> {
        self.block_basis
            .binary_search_by_key(&m, |pts| pts[0].iter().map(|x| (x * x) as u64).sum())
            .ok()
    }

    /// Position of lattice point `xi` inside its block.
    pub fn locate(&self, xi: &[i64]) -> Option<(usize, usize)> {
        let m = xi.iter().map(|x| (x * x) as u64).sum();
        let k = self.block_of_norm(m)?;
        let pos = self.block_basis[k].binary_search_by(|p| p.as_slice().cmp(xi)).ok()?;
        Some((k, pos))
    }
}

fn lattice_label(points: &[Vec<i64>]) -> String {
    points
        .iter()
        .map(|p| {
            let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            format!("({})", coords.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Spectrum of `-Laplacian` on `T^dim` truncated at `|xi|^2 <= radius_sq`.
pub fn torus_spectrum(dim: usize, radius_sq: u64) -> Result<(Arc<SpectrumModel>, TorusModel)> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Precondition(format!("torus dimension must be 1, 2 or 3, got {dim}")));
    }
    let r = (radius_sq as f64).sqrt().floor() as i64;
    let mut by_norm: BTreeMap<u64, Vec<Vec<i64>>> = BTreeMap::new();
    let mut point = vec![-r; dim];
    loop {
        let m: u64 = point.iter().map(|x| (x * x) as u64).sum();
        if m <= radius_sq {
            by_norm.entry(m).or_default().push(point.clone());
        }
        // odometer over [-r, r]^dim in lexicographic order
        let mut i = dim;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if point[i] < r {
                point[i] += 1;
                break;
            }
            point[i] = -r;
        }
        if point.iter().all(|&x| x == -r) {
            break;
        }
    }
    let block_basis: Vec<Vec<Vec<i64>>> = by_norm.values().cloned().collect();
    let spectrum = SpectrumModel::new(
        dim,
        2.0,
        by_norm
            .iter()
            .map(|(m, pts)| (*m as f64, pts.len(), Some(lattice_label(pts)))),
    )?;
    Ok((
        Arc::new(spectrum),
        TorusModel {
            dim,
            radius_sq_max: radius_sq,
            block_basis,
        },
    ))
}

/// Symbol of the constant vector field `sum_j a_j d/dx_j`: diagonal with
/// entries `i (a . xi)`. The inner product is formed in exact rational
/// arithmetic and rounded once.
pub fn torus_vector_field(
    spectrum: &Arc<SpectrumModel>,
    model: &TorusModel,
    a: &[DiophantineCoefficient],
) -> Result<InvariantSymbol> {
    if a.len() != model.dim {
        return Err(Error::ShapeMismatch {
            index: 0,
            expected: format!("{} coefficients", model.dim),
            found: format!("{} coefficients", a.len()),
        });
    }
    InvariantSymbol::diagonal(spectrum.clone(), |k, _| {
        model.block_basis[k]
            .iter()
            .map(|xi| C64::new(0.0, dot_exact(a, xi)))
            .collect()
    })
}

pub(crate) fn dot_exact(a: &[DiophantineCoefficient], xi: &[i64]) -> f64 {
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for (c, &x) in a.iter().zip(xi) {
        if x != 0 {
            acc += c.value() * BigRational::from_integer(BigInt::from(x));
        }
    }
    acc.to_f64().unwrap_or(f64::NAN)
}

/// Blocks holding the lattice point `(-p, q)` for the continued-fraction
/// convergents `p/q` of `alpha`, where the field `(1, alpha)` has its
/// smallest divisors `|q alpha - p|`. Returns `(k, p, q)` for stored blocks.
pub fn convergent_blocks(model: &TorusModel, alpha: &DiophantineCoefficient) -> Vec<(usize, i64, i64)> {
    if model.dim != 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (p, q) in diophantine::convergents(alpha.value(), 64) {
        let (Some(p), Some(q)) = (p.to_i64(), q.to_i64()) else {
            break;
        };
        if q == 0 {
            continue;
        }
        let Some((k, _)) = model.locate(&[-p, q]) else {
            if (p * p + q * q) as u64 > model.radius_sq_max {
                break;
            }
            continue;
        };
        out.push((k, p, q));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereModel {
    pub degree_max: usize,
}

/// Spectrum of the Laplace-Beltrami operator on `S^2`: `lambda_k = k(k+1)`,
/// `d_k = 2k+1`, for `k = 0..=degree_max`; block `k` is labelled by the
/// azimuthal orders `m = -k..=k` in ascending order.
pub fn sphere_spectrum(degree_max: usize) -> Result<(Arc<SpectrumModel>, SphereModel)> {
    if degree_max < 1 {
        return Err(Error::Precondition("sphere degree_max must be at least 1".into()));
    }
    let spectrum = SpectrumModel::new(
        2,
        2.0,
        (0..=degree_max).map(|k| ((k * (k + 1)) as f64, 2 * k + 1, Some(format!("m=-{k}..{k}")))),
    )?;
    Ok((Arc::new(spectrum), SphereModel { degree_max }))
}

/// Rotation field `d/dphi`: diagonal `i m`, `m = -k..=k`.
pub fn sphere_rotation_field(spectrum: &Arc<SpectrumModel>) -> Result<InvariantSymbol> {
    InvariantSymbol::diagonal(spectrum.clone(), |k, _| {
        let k = k as i64;
        (-k..=k).map(|m| C64::new(0.0, m as f64)).collect()
    })
}
