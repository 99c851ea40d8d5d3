use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmodule::sample::{self, RandomElement};
use tmodule::tmodule::{drinfeld, TModule};
use tmodule::torsion::{
    apply, degree1_kernel, is_torsion, root_curve_point, root_identity_at, root_identity_holds, sqrt_t_tower,
    torsion_order_search, verify_transcript, OrderSearch, TorsionVerdict,
};
use tmodule::{Field, FiniteField, FrobeniusField, FunctionField, Poly, PolyRing, Tower, TowerElem};

fn tpoly(fq: &FiniteField, c: &[i64]) -> Poly {
    Poly::from_coeffs(c.iter().map(|&x| fq.from_int(x)).collect())
}

/// `Φ(T) = T + cτ` over F_3 on a tower holding `U` with `Φ(T)(U) = 0` and
/// `V` with `Φ(T + 1)(V) = 0`.
fn two_torsion_setup(c: &[i64]) -> (TModule<Tower>, TowerElem, TowerElem) {
    let base = Tower::over(FiniteField::prime(3).unwrap());
    let fq = base.fq().clone();
    let c = base.from_poly(&tpoly(&fq, c));
    let first = degree1_kernel(&base, &base.t(), &c, "U").unwrap();
    let u = first.theta.unwrap();
    let tower = first.tower;
    let c = tower.lift(&base, &c).unwrap();
    let t1 = tower.add(&tower.t(), &tower.one());
    let second = degree1_kernel(&tower, &t1, &c, "V").unwrap();
    let v = second.theta.unwrap();
    let top = second.tower;
    let u = top.lift(&tower, &u).unwrap();
    let c = top.lift(&tower, &c).unwrap();
    let module = drinfeld(top, &[c]).unwrap();
    (module, u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn torsion_points_form_a_submodule(seed in any::<u64>(), which in 0usize..3) {
        let cs: [&[i64]; 3] = [&[1], &[2], &[0, 1]];
        let (module, u, v) = two_torsion_setup(cs[which]);
        let f = module.field().clone();
        let fq = f.fq().clone();
        let ring = PolyRing::new(fq.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let killer = tpoly(&fq, &[0, 1, 1]);
        let a = sample::poly(&mut rng, &fq, 3);
        let b = sample::poly(&mut rng, &fq, 3);
        let x = apply(&module, &a, std::slice::from_ref(&u)).unwrap();
        let y = apply(&module, &b, std::slice::from_ref(&v)).unwrap();
        let sum = vec![f.add(&x[0], &y[0])];
        for point in [&x, &y, &sum] {
            match is_torsion(&module, point, &killer).unwrap() {
                TorsionVerdict::Certified(cert) => prop_assert!(verify_transcript(&module, &cert)),
                TorsionVerdict::Refuted(value) => prop_assert!(false, "{:?}", value),
            }
        }
        let c = sample::poly(&mut rng, &fq, 2);
        if !c.is_zero() {
            let multiple = ring.mul(&killer, &c);
            prop_assert!(matches!(is_torsion(&module, &sum, &multiple).unwrap(), TorsionVerdict::Certified(_)));
        }
        let moved = apply(&module, &c, &sum).unwrap();
        prop_assert!(matches!(is_torsion(&module, &moved, &killer).unwrap(), TorsionVerdict::Certified(_)));
        match torsion_order_search(&module, &sum, 2).unwrap() {
            OrderSearch::Found(cert) => {
                prop_assert!(ring.div_rem(&killer, &cert.annihilator).1.is_zero());
                prop_assert!(verify_transcript(&module, &cert));
            }
            OrderSearch::NoneUpTo(_) => prop_assert!(false, "a divisor of T^2 + T kills the point"),
        }
    }

    #[test]
    fn degree_one_kernels_have_q_elements(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let base = Tower::over(FiniteField::prime(p).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 = base.random_nonzero(&mut rng, 2);
        let c1 = base.random_nonzero(&mut rng, 2);
        let kernel = degree1_kernel(&base, &c0, &c1, "W").unwrap();
        let ext = &kernel.tower;
        prop_assert_eq!(kernel.elements.len(), p as usize);
        let (c0, c1) = (ext.lift(&base, &c0).unwrap(), ext.lift(&base, &c1).unwrap());
        for (i, x) in kernel.elements.iter().enumerate() {
            prop_assert!(kernel.elements[..i].iter().all(|y| y != x));
            let value = ext.add(&ext.mul(&c0, x), &ext.mul(&c1, &ext.pow(x, ext.q())));
            prop_assert!(ext.is_zero(&value));
        }
    }

    #[test]
    fn transcripts_reproduce_and_detect_tampering(seed in any::<u64>()) {
        let (module, u, v) = two_torsion_setup(&[1]);
        let f = module.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = f.from_fq(sample::fq_element(&mut rng, f.fq()));
        let point = vec![f.add(&u, &f.mul(&alpha, &v))];
        let killer = tpoly(f.fq(), &[0, 1, 1]);
        let TorsionVerdict::Certified(cert) = is_torsion(&module, &point, &killer).unwrap() else {
            panic!("point is killed by T^2 + T");
        };
        prop_assert!(verify_transcript(&module, &cert));
        prop_assert_eq!(cert.transcript.len(), 3);
        let mut tampered = cert.clone();
        let k = rng.gen_range(0..tampered.transcript.len());
        tampered.transcript[k].push(' ');
        prop_assert!(!verify_transcript(&module, &tampered));
        let mut wrong = cert.clone();
        wrong.annihilator = tpoly(f.fq(), &[1, 1]);
        prop_assert!(!verify_transcript(&module, &wrong));
    }
}

#[test]
fn root_identity_on_random_squares() {
    let tower = sqrt_t_tower("U").unwrap();
    assert!(root_identity_holds(&tower).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let w = tower.random(&mut rng, 3);
        let z = tower.mul(&w, &w);
        assert!(root_identity_at(&tower, &z).unwrap(), "z = {}", tower.format(&z));
    }
}

#[test]
fn root_curve_points_lie_on_the_curve() {
    let tower = sqrt_t_tower("U").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let w = tower.random(&mut rng, 2);
        let z = tower.mul(&w, &w);
        let point = root_curve_point(&tower, &z, 0).unwrap();
        assert!(point.on_curve);
        assert_eq!(point.point[1], w);
    }
}
