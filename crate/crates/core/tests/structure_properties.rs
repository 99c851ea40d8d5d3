use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmodule::ore::OreMatrix;
use tmodule::sample;
use tmodule::structure::{abelian_scan, degree_sequence, pattern_closure, rank_report, AbelianVerdict, OrePattern};
use tmodule::tmodule::TModule;
use tmodule::{linalg, Field, FiniteField, FunctionField, Matrix, RationalFunctionField};

type K = RationalFunctionField;

fn k(p: u32) -> K {
    RationalFunctionField::new(FiniteField::prime(p).unwrap())
}

/// `a_0 = T I + N` with `a_1` random. When `lower` is set, `N` and `a_1` are
/// both strictly lower triangular; otherwise `N` is strictly upper triangular.
fn random_module<R: Rng>(f: &K, rng: &mut R, m: usize, lower: bool) -> TModule<K> {
    let fq = f.fq().clone();
    let a0 = Matrix::from_fn(m, m, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => f.t(),
        std::cmp::Ordering::Less if !lower => f.from_fq(sample::fq_element(rng, &fq)),
        std::cmp::Ordering::Greater if lower => f.from_fq(sample::fq_element(rng, &fq)),
        _ => f.zero(),
    });
    loop {
        let a1 = Matrix::from_fn(m, m, |r, c| {
            if lower && r <= c {
                f.zero()
            } else {
                f.from_poly(&sample::poly(rng, &fq, 1))
            }
        });
        if !linalg::is_zero(f, &a1) {
            return TModule::new(f.clone(), vec![a0, a1]).unwrap();
        }
    }
}

fn leading_invertible(f: &K, a: &OreMatrix<<K as Field>::Elem>) -> bool {
    a.leading().is_some_and(|l| linalg::rank(f, l).unwrap() == l.rows())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iterate_supports_follow_pattern_powers(seed in any::<u64>(), lower in any::<bool>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(2..=3);
        let module = random_module(&f, &mut rng, m, lower);
        let step = OrePattern::support(&f, module.phi());
        let closure = pattern_closure(&step, 64);
        let mut bound = step.clone();
        for (j, power) in module.powers(6).iter().enumerate() {
            let support = OrePattern::support(&f, power);
            prop_assert!(bound.dominates(&support), "j = {}", j + 1);
            if let Some(c) = &closure {
                prop_assert!(c.dominates(&support));
            }
            bound = step.compose(&bound);
        }
        if lower {
            prop_assert!(closure.is_some());
        }
    }

    #[test]
    fn nonabelian_degrees_stay_bounded(seed in any::<u64>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let module = random_module(&f, &mut rng, 3, true);
        let cap = 4;
        match abelian_scan(&module, 4, cap).verdict {
            AbelianVerdict::Nonabelian(p) => {
                let d = p.degree().unwrap();
                prop_assert!(degree_sequence(&module, 3 * cap).iter().all(|&e| e <= d));
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn certificates_are_exclusive(seed in any::<u64>(), lower in any::<bool>()) {
        let f = k(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let module = random_module(&f, &mut rng, 2, lower);
        let invertible_somewhere = module.powers(4).iter().any(|p| leading_invertible(&f, p));
        let bounded = pattern_closure(&OrePattern::support(&f, module.phi()), 16).is_some();
        prop_assert!(!(invertible_somewhere && bounded));
        let verdict = abelian_scan(&module, 4, 16).verdict;
        prop_assert_eq!(matches!(verdict, AbelianVerdict::Abelian { .. }), invertible_somewhere);
        prop_assert_eq!(matches!(verdict, AbelianVerdict::Nonabelian(_)), !invertible_somewhere && bounded);
    }

    #[test]
    fn generator_count_ignores_coordinate_order(seed in any::<u64>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 3;
        let a0 = Matrix::from_fn(m, m, |r, c| if r == c { f.t() } else if c == r + 1 { f.one() } else { f.zero() });
        let a1 = sample::invertible_matrix(&f, &mut rng, m, 1);
        let module = TModule::new(f.clone(), vec![a0, a1]).unwrap();
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let permuted = module.permute(&perm).unwrap();
        let r = rank_report(&module, 1).unwrap();
        prop_assert_eq!(r.generators, m);
        prop_assert_eq!(rank_report(&permuted, 1).unwrap(), r);
        prop_assert_eq!(abelian_scan(&permuted, 2, 4).verdict, abelian_scan(&module, 2, 4).verdict);
    }
}
