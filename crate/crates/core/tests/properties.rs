use std::sync::Arc;

use invariant_ops::io;
use invariant_ops::linalg::{frobenius, random_unitary, vec_norm, Svd};
use invariant_ops::solvers::{residual, solve_system_lsq, solve_system_normal};
use invariant_ops::{CMat, CVec, CoefficientField, InvariantSymbol, RunConfig, SpectrumModel, SystemSymbol, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spectrum(dims: &[usize]) -> Arc<SpectrumModel> {
    Arc::new(SpectrumModel::new(2, 2.0, dims.iter().enumerate().map(|(k, &d)| ((k * (k + 1)) as f64, d, None))).unwrap())
}

fn cz<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_normal<R: Rng>(d: usize, zeros: f64, rng: &mut R) -> CMat {
    let q = random_unitary(d, rng);
    let mu = CVec::from_fn(d, |_, _| if rng.random::<f64>() < zeros { C64::new(0.0, 0.0) } else { cz(rng) });
    q.adjoint() * CMat::from_diagonal(&mu) * q
}

fn random_field<R: Rng>(sp: &Arc<SpectrumModel>, rng: &mut R) -> CoefficientField {
    CoefficientField::from_fn(sp.clone(), |_, d| CVec::from_fn(d, |_, _| cz(rng))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_stacks(seed in any::<u64>(), d in 1usize..7, n in 1usize..4, zeros in 0.0f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<CMat> = (0..n).map(|_| random_normal(d, zeros, &mut rng)).collect();
        let refs: Vec<&CMat> = mats.iter().collect();
        let svd = Svd::of_stack(&refs);
        let mut stack = CMat::zeros(n * d, d);
        for (j, m) in mats.iter().enumerate() {
            stack.view_mut((j * d, 0), (d, d)).copy_from(m);
        }
        let k = svd.s.len();
        let s = CMat::from_diagonal(&CVec::from_iterator(k, svd.s.iter().map(|&x| C64::new(x, 0.0))));
        let rec = svd.u.columns(0, k) * s * svd.v.columns(0, k).adjoint();
        prop_assert!(frobenius(&(rec - &stack)) < 1e-11);
        prop_assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        let gram = svd.v.adjoint() * &svd.v - CMat::identity(d, d);
        prop_assert!(frobenius(&gram) < 1e-12);
    }

    #[test]
    fn solutions_are_orthogonal_to_joint_kernel(seed in any::<u64>(), zeros in 0.0f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = spectrum(&[1, 3, 4, 6]);
        let ops: Vec<InvariantSymbol> = (0..2)
            .map(|_| InvariantSymbol::from_fn(sp.clone(), |_, d| random_normal(d, zeros, &mut rng)).unwrap())
            .collect();
        let s = SystemSymbol::new(ops).unwrap();
        let u0 = random_field(&sp, &mut rng);
        let f: Vec<_> = s.operators().iter().map(|op| op.apply(&u0).unwrap()).collect();
        let cfg = RunConfig::default();
        for out in [solve_system_lsq(&s, &f, &cfg).unwrap(), solve_system_normal(&s, &f, &cfg).unwrap()] {
            prop_assert!(out.max_residual() < 1e-9, "{}", out.max_residual());
            for k in 0..sp.truncation() {
                let ker = s.joint_kernel(k, &cfg.ztol).unwrap();
                let u = out.solution().block(k);
                let proj = ker.adjoint() * u;
                prop_assert!(vec_norm(&proj) <= 1e-10 * vec_norm(u).max(1.0));
            }
        }
    }

    #[test]
    fn resolving_own_image_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = spectrum(&[2, 3, 5]);
        let ops: Vec<InvariantSymbol> = (0..3)
            .map(|_| InvariantSymbol::from_fn(sp.clone(), |_, d| random_normal(d, 0.4, &mut rng)).unwrap())
            .collect();
        let s = SystemSymbol::new(ops).unwrap();
        let f: Vec<_> = (0..3).map(|_| random_field(&sp, &mut rng)).collect();
        let cfg = RunConfig::default();
        let first = solve_system_lsq(&s, &f, &cfg).unwrap();
        let image: Vec<_> = s.operators().iter().map(|op| op.apply(first.solution()).unwrap()).collect();
        let second = solve_system_lsq(&s, &image, &cfg).unwrap();
        for k in 0..sp.truncation() {
            let a = first.solution().block(k);
            let b = second.solution().block(k);
            prop_assert!(vec_norm(&(a - b)) <= 1e-10 * vec_norm(a).max(1.0));
        }
        let r = residual(&s, second.solution(), &image).unwrap();
        prop_assert!(r.iter().all(|&x| x < 1e-10));
    }

    #[test]
    fn files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = spectrum(&[1, 2, 4]);
        let text = io::spectrum_to_json(&sp);
        let back = Arc::new(io::spectrum_from_json(&text).unwrap());
        prop_assert_eq!(back.hash(), sp.hash());
        let u = random_field(&sp, &mut rng);
        let u2 = io::field_from_json(&io::field_to_json(&u), back.clone()).unwrap();
        prop_assert_eq!(u.blocks(), u2.blocks());
        let p = InvariantSymbol::from_fn(sp.clone(), |_, d| CMat::from_fn(d, d, |_, _| cz(&mut rng))).unwrap();
        let p2 = io::symbol_from_json(&io::symbol_to_json(&p), back.clone()).unwrap();
        prop_assert_eq!(p.blocks(), p2.blocks());
        // recomputed outputs are bit-identical after reload
        let (a, b) = (p.apply(&u).unwrap(), p2.apply(&u2).unwrap());
        prop_assert_eq!(a.blocks(), b.blocks());
    }

    #[test]
    fn residual_is_linear_in_perturbation(seed in any::<u64>(), eps in 1e-6f64..1e-2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = spectrum(&[3, 4]);
        let p = InvariantSymbol::from_fn(sp.clone(), |_, d| CMat::from_fn(d, d, |_, _| cz(&mut rng))).unwrap();
        let s = SystemSymbol::single(p.clone());
        let u = random_field(&sp, &mut rng);
        let e = random_field(&sp, &mut rng);
        let f = vec![p.apply(&u).unwrap()];
        let pert = CoefficientField::combine(&u, C64::new(1.0, 0.0), &e, C64::new(eps, 0.0)).unwrap();
        let r = residual(&s, &pert, &f).unwrap();
        let pe = p.apply(&e).unwrap();
        for (k, rk) in r.iter().enumerate() {
            let expected = eps * vec_norm(pe.block(k));
            prop_assert!((rk - expected).abs() <= 1e-12 + 1e-9 * expected);
        }
    }
}
