use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmodule::exponential::ExpSeries;
use tmodule::ore::{self, OreMatrix};
use tmodule::sample::{self, RandomElement};
use tmodule::tmodule::{carlitz, carlitz_tensor, TModule};
use tmodule::{
    linalg, Field, FiniteField, FrobeniusField, FunctionField, Matrix, Poly, PolyRing, RationalFunctionField,
};

type K = RationalFunctionField;

fn k(p: u32) -> K {
    RationalFunctionField::new(FiniteField::prime(p).unwrap())
}

fn random_module<R: Rng>(f: &K, rng: &mut R, m: usize) -> TModule<K> {
    let fq = f.fq().clone();
    let a0 = Matrix::from_fn(m, m, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => f.t(),
        std::cmp::Ordering::Less => f.from_fq(sample::fq_element(rng, &fq)),
        std::cmp::Ordering::Greater => f.zero(),
    });
    loop {
        let a1 = Matrix::from_fn(m, m, |_, _| f.from_poly(&sample::poly(rng, &fq, 1)));
        if !linalg::is_zero(f, &a1) {
            return TModule::new(f.clone(), vec![a0, a1]).unwrap();
        }
    }
}

/// Strips from `den` every factor shared with `l`; the rest must be 1.
fn supported_on(ring: &PolyRing, den: &Poly, l: &Poly) -> bool {
    let mut rest = den.clone();
    loop {
        let g = ring.gcd(&rest, l);
        if g.is_one() {
            return rest.degree() == Some(0);
        }
        rest = ring.div_rem(&rest, &g).0;
    }
}

fn check_denominators(f: &K, series: &ExpSeries<K>) -> bool {
    let ring = f.ring();
    let q = f.q() as usize;
    let t = Poly::t();
    let mut l = Poly::one();
    for (j, e) in series.coeffs().iter().enumerate().skip(1) {
        let tq = ring.pow(&t, q.pow(j as u32) as u64);
        l = ring.mul(&l, &ring.sub(&tq, &t));
        if !e.entries().iter().all(|x| supported_on(ring, x.denominator(), &l)) {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn denominators_divide_powers_of_frobenius_differences(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
        let f = k(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=2);
        let module = random_module(&f, &mut rng, m);
        let series = ExpSeries::compute(&module, 3).unwrap();
        prop_assert!(check_denominators(&f, &series));
    }

    #[test]
    fn functional_equation_by_expansion(seed in any::<u64>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let module = random_module(&f, &mut rng, 2);
        let order = 3;
        let series = ExpSeries::compute(&module, order).unwrap();
        prop_assert!(series.verify_functional_equation());
        let e = OreMatrix::from_coeffs(&f, 2, 2, series.coeffs().to_vec()).unwrap();
        let a0 = OreMatrix::constant(&f, module.coeffs()[0].clone());
        let lhs = ore::compose(&f, &e, &a0).unwrap();
        let rhs = ore::compose(&f, module.phi(), &e).unwrap();
        for i in 0..=order {
            prop_assert_eq!(lhs.coeff(&f, i), rhs.coeff(&f, i));
        }
        prop_assert_eq!(&series.coeffs()[0], &linalg::identity(&f, 2));
    }

    #[test]
    fn evaluation_is_additive(seed in any::<u64>()) {
        let f = k(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let module = random_module(&f, &mut rng, 2);
        let series = ExpSeries::compute(&module, 2).unwrap();
        let x: Vec<_> = (0..2).map(|_| f.random(&mut rng, 1)).collect();
        let y: Vec<_> = (0..2).map(|_| f.random(&mut rng, 1)).collect();
        let c = f.from_fq(sample::fq_element(&mut rng, f.fq()));
        let sum: Vec<_> = x.iter().zip(&y).map(|(a, b)| f.add(a, b)).collect();
        let expected: Vec<_> = series.evaluate(&x).iter().zip(series.evaluate(&y)).map(|(a, b)| f.add(a, &b)).collect();
        prop_assert_eq!(series.evaluate(&sum), expected);
        let scaled: Vec<_> = x.iter().map(|a| f.mul(&c, a)).collect();
        let expected: Vec<_> = series.evaluate(&x).iter().map(|a| f.mul(&c, a)).collect();
        prop_assert_eq!(series.evaluate(&scaled), expected);
    }

    #[test]
    fn longer_series_extend_shorter_ones(seed in any::<u64>(), order in 0usize..4) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let module = random_module(&f, &mut rng, 2);
        let short = ExpSeries::compute(&module, order).unwrap();
        let long = ExpSeries::compute(&module, order + 1).unwrap();
        prop_assert_eq!(&long.coeffs()[..=order], short.coeffs());
    }
}

#[test]
fn carlitz_and_tensor_denominators() {
    for p in [2, 3] {
        let f = k(p);
        assert!(check_denominators(
            &f,
            &ExpSeries::compute(&carlitz(f.clone()), 4).unwrap()
        ));
        assert!(check_denominators(
            &f,
            &ExpSeries::compute(&carlitz_tensor(f.clone(), 2).unwrap(), 3).unwrap()
        ));
    }
}

#[test]
fn carlitz_coefficients_match_product_formula() {
    // E_i = 1 / Π_{k<i} (T^{q^i} - T^{q^k})
    let f = k(3);
    let ring = f.ring();
    let q = 3usize;
    let series = ExpSeries::compute(&carlitz(f.clone()), 3).unwrap();
    for (i, e) in series.coeffs().iter().enumerate() {
        let mut den = Poly::one();
        for j in 0..i {
            let a = Poly::monomial(f.fq().one(), q.pow(i as u32));
            let b = Poly::monomial(f.fq().one(), q.pow(j as u32));
            den = ring.mul(&den, &ring.sub(&a, &b));
        }
        let expected = f.fraction(&Poly::one(), &den).unwrap();
        assert_eq!(e.get(0, 0), &expected, "E_{i}");
    }
}
