//! Seeded synthetic symbols with known gains.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_unitary, CMat, C64};
use crate::spectrum::SpectrumModel;
use crate::symbol::InvariantSymbol;

/// Scalar profile evaluated per block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `coefficient (1 + lambda)^exponent`
    Power { coefficient: f64, exponent: f64 },
    /// `exp(-rate lambda)`
    Exponential { rate: f64 },
    /// `(1 + lambda_k)^(-k)`
    SuperPolynomial,
}

impl Profile {
    pub fn eval(&self, k: usize, lambda: f64) -> f64 {
        match *self {
            Profile::Power { coefficient, exponent } => coefficient * (1.0 + lambda).powf(exponent),
            Profile::Exponential { rate } => (-rate * lambda).exp(),
            Profile::SuperPolynomial => (1.0 + lambda).powf(-(k as f64)),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Power { coefficient, exponent } => {
                coefficient.is_finite() && coefficient != 0.0 && exponent.is_finite()
            }
            Profile::Exponential { rate } => rate.is_finite() && rate >= 0.0,
            Profile::SuperPolynomial => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRecipe(format!("bad profile {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case")]
pub enum Recipe {
    /// `g(lambda_k) I`
    ScalarProfile { profile: Profile },
    /// `Q^* diag(mu) Q` with Haar-like `Q`, entries of `mu` uniform in the
    /// unit square and each zeroed with probability `zero_fraction`.
    RandomNormal { zero_fraction: f64 },
    /// Independent entries uniform in the unit square.
    RandomGeneral,
    /// `U diag(s) V^*` with random unitaries and singular values
    /// `s_i = g(lambda_k) (1 + i)`, so the smallest one is `g(lambda_k)`.
    PlantedGain { profile: Profile },
}

#[derive(Debug, Clone)]
pub struct SyntheticSymbol {
    pub symbol: InvariantSymbol,
    /// Exact smallest singular value per block, for planted recipes.
    pub planted_gains: Option<Vec<f64>>,
}

fn unit_square<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Deterministic in `(spectrum, recipe, seed)`.
pub fn synthetic_symbol(spectrum: &Arc<SpectrumModel>, recipe: &Recipe, seed: u64) -> Result<SyntheticSymbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = |k: usize| spectrum.eigenvalue(k);
    match *recipe {
        Recipe::ScalarProfile { profile } => {
            profile.validate()?;
            let symbol = InvariantSymbol::diagonal(spectrum.clone(), |k, d| {
                vec![C64::new(profile.eval(k, lambda(k)), 0.0); d]
            })?;
            Ok(SyntheticSymbol { symbol, planted_gains: None })
        }
        Recipe::RandomNormal { zero_fraction } => {
            if !(0.0..=1.0).contains(&zero_fraction) {
                return Err(Error::InvalidRecipe(format!("zero_fraction {zero_fraction} outside [0,1]")));
            }
            let symbol = InvariantSymbol::from_fn(spectrum.clone(), |_, d| {
                let q = random_unitary(d, &mut rng);
                let mu: Vec<C64> = (0..d)
                    .map(|_| {
                        let z = unit_square(&mut rng);
                        if rng.random::<f64>() < zero_fraction {
                            C64::new(0.0, 0.0)
                        } else {
                            z
                        }
                    })
                    .collect();
                q.adjoint() * CMat::from_diagonal(&mu.into()) * q
            })?;
            Ok(SyntheticSymbol { symbol, planted_gains: None })
        }
        Recipe::RandomGeneral => {
            let symbol = InvariantSymbol::from_fn(spectrum.clone(), |_, d| {
                CMat::from_fn(d, d, |_, _| unit_square(&mut rng))
            })?;
            Ok(SyntheticSymbol { symbol, planted_gains: None })
        }
        Recipe::PlantedGain { profile } => {
            profile.validate()?;
            let mut gains = Vec::with_capacity(spectrum.truncation());
            let symbol = InvariantSymbol::from_fn(spectrum.clone(), |k, d| {
                let g = profile.eval(k, lambda(k)).abs();
                gains.push(g);
                let u = random_unitary(d, &mut rng);
                let v = random_unitary(d, &mut rng);
                let s = CMat::from_fn(d, d, |i, j| {
                    if i == j {
                        C64::new(g * (1 + i) as f64, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                u * s * v.adjoint()
            })?;
            Ok(SyntheticSymbol {
                symbol,
                planted_gains: Some(gains),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ZeroTol;

    fn sphere(k: usize) -> Arc<SpectrumModel> {
        Arc::new(SpectrumModel::new(2, 2.0, (0..k).map(|k| ((k * (k + 1)) as f64, 2 * k + 1, None))).unwrap())
    }

    #[test]
    fn scalar_profile_has_order_nu() {
        let s = sphere(101);
        let p = Profile::Power { coefficient: 1.0, exponent: 1.0 };
        let sym = synthetic_symbol(&s, &Recipe::ScalarProfile { profile: p }, 0).unwrap().symbol;
        assert_eq!(sym.block(3)[(0, 0)], C64::new(13.0, 0.0));
        let order = sym.estimate_order(0.5, 8).unwrap();
        assert!((order - 2.0).abs() < 0.05, "{order}");
    }

    #[test]
    fn planted_gains_are_realized() {
        let s = sphere(20);
        let p = Profile::Power { coefficient: 1.0, exponent: -1.0 };
        let out = synthetic_symbol(&s, &Recipe::PlantedGain { profile: p }, 7).unwrap();
        let gains = out.planted_gains.unwrap();
        for k in 0..20 {
            let g = out.symbol.full_gain(k).unwrap();
            assert!((g - gains[k]).abs() <= 1e-12 * gains[k].max(1e-300) * 10.0 + 1e-15, "{k}");
            assert!((gains[k] - 1.0 / (1.0 + (k * (k + 1)) as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let s = sphere(6);
        let r = Recipe::RandomNormal { zero_fraction: 0.3 };
        let a = synthetic_symbol(&s, &r, 42).unwrap().symbol;
        let b = synthetic_symbol(&s, &r, 42).unwrap().symbol;
        let c = synthetic_symbol(&s, &r, 43).unwrap().symbol;
        assert_eq!(crate::io::symbol_to_json(&a), crate::io::symbol_to_json(&b));
        assert_ne!(a, c);
        assert!(a.is_normal(1e-12).all);
        let ztol = ZeroTol::default();
        assert!(a.restricted_gain(5, &ztol).unwrap() > 0.0);
    }

    #[test]
    fn invalid_recipes() {
        let s = sphere(2);
        assert!(synthetic_symbol(&s, &Recipe::RandomNormal { zero_fraction: 1.5 }, 0).is_err());
        let bad = Profile::Power { coefficient: 0.0, exponent: 1.0 };
        assert!(synthetic_symbol(&s, &Recipe::PlantedGain { profile: bad }, 0).is_err());
        let bad = Profile::Exponential { rate: f64::NAN };
        assert!(synthetic_symbol(&s, &Recipe::ScalarProfile { profile: bad }, 0).is_err());
    }
}
