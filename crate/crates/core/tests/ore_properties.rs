use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tmodule::ore::{self, scalar, OreMatrix, OrePoly, Witness};
use tmodule::sample::{self, RandomElement};
use tmodule::{linalg, Field, FiniteField, FunctionField, Matrix, RationalFunctionField, Tower};

fn k(p: u32) -> RationalFunctionField {
    RationalFunctionField::new(FiniteField::prime(p).unwrap())
}

fn sqrt_t_tower() -> Tower {
    let k = Tower::over(FiniteField::prime(2).unwrap());
    k.extend("U", &[k.neg(&k.t()), k.zero(), k.one()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_ring_axioms(seed in any::<u64>()) {
        let f = k(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::ore_poly(&f, &mut rng, 2, 2);
        let b = sample::ore_poly(&f, &mut rng, 2, 2);
        let c = sample::ore_poly(&f, &mut rng, 1, 2);
        let one = OrePoly::constant(&f, f.one());
        prop_assert_eq!(
            scalar::compose(&f, &scalar::compose(&f, &a, &b), &c),
            scalar::compose(&f, &a, &scalar::compose(&f, &b, &c))
        );
        prop_assert_eq!(
            scalar::compose(&f, &a, &scalar::add(&f, &b, &c)),
            scalar::add(&f, &scalar::compose(&f, &a, &b), &scalar::compose(&f, &a, &c))
        );
        prop_assert_eq!(
            scalar::compose(&f, &scalar::add(&f, &b, &c), &a),
            scalar::add(&f, &scalar::compose(&f, &b, &a), &scalar::compose(&f, &c, &a))
        );
        prop_assert_eq!(scalar::compose(&f, &a, &one), a.clone());
        prop_assert_eq!(scalar::compose(&f, &one, &a), a);
    }

    #[test]
    fn matrix_ring_axioms(seed in any::<u64>()) {
        let f = sqrt_t_tower();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::ore_matrix(&f, &mut rng, 2, 2, 1, 1);
        let b = sample::ore_matrix(&f, &mut rng, 2, 2, 1, 1);
        let c = sample::ore_matrix(&f, &mut rng, 2, 1, 1, 1);
        let id = OreMatrix::identity(&f, 2);
        let ab_c = ore::compose(&f, &ore::compose(&f, &a, &b).unwrap(), &c).unwrap();
        let a_bc = ore::compose(&f, &a, &ore::compose(&f, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let lhs = ore::compose(&f, &ore::add(&f, &a, &b).unwrap(), &c).unwrap();
        let rhs = ore::add(&f, &ore::compose(&f, &a, &c).unwrap(), &ore::compose(&f, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(ore::compose(&f, &a, &id).unwrap(), a.clone());
        prop_assert_eq!(ore::compose(&f, &id, &a).unwrap(), a);
    }

    #[test]
    fn twist_is_multiplicative(seed in any::<u64>()) {
        let f = sqrt_t_tower();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::matrix(&f, &mut rng, 2, 3, 1);
        let b = sample::matrix(&f, &mut rng, 3, 2, 1);
        let i = rng.gen_range(0..3);
        prop_assert_eq!(
            linalg::twist(&f, &linalg::mul(&f, &a, &b), i),
            linalg::mul(&f, &linalg::twist(&f, &a, i), &linalg::twist(&f, &b, i))
        );
    }

    #[test]
    fn evaluation_is_a_module_action(seed in any::<u64>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::ore_matrix(&f, &mut rng, 2, 2, 2, 1);
        let b = sample::ore_matrix(&f, &mut rng, 2, 2, 1, 1);
        let u: Vec<_> = (0..2).map(|_| f.random(&mut rng, 2)).collect();
        let v: Vec<_> = (0..2).map(|_| f.random(&mut rng, 2)).collect();
        let ab = ore::compose(&f, &a, &b).unwrap();
        prop_assert_eq!(ore::eval(&f, &ab, &u).unwrap(), ore::eval(&f, &a, &ore::eval(&f, &b, &u).unwrap()).unwrap());
        let sum: Vec<_> = u.iter().zip(&v).map(|(x, y)| f.add(x, y)).collect();
        let lhs = ore::eval(&f, &a, &sum).unwrap();
        let rhs: Vec<_> = ore::eval(&f, &a, &u).unwrap().iter().zip(ore::eval(&f, &a, &v).unwrap()).map(|(x, y)| f.add(x, &y)).collect();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(ore::eval(&f, &a, &[f.zero(), f.zero()]).unwrap().iter().all(|x| f.is_zero(x)));
    }

    #[test]
    fn witnesses_reverify(seed in any::<u64>()) {
        let f = k(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample::ore_matrix(&f, &mut rng, 1, 2, 1, 1);
        let q = sample::ore_matrix(&f, &mut rng, 1, 1, 1, 1);
        let g = ore::compose(&f, &q, &p).unwrap();
        let bound = g.degree().unwrap_or(0);
        match ore::left_multiple_witness(&f, &p, &g, bound).unwrap() {
            Witness::Found(w) => prop_assert_eq!(ore::compose(&f, &w, &p).unwrap(), g),
            Witness::NoneUpTo(_) => prop_assert!(false, "a left multiple has a witness"),
        }
    }
}

fn scalar_division_case<F: RandomElement + tmodule::FrobeniusField>(f: &F, rng: &mut ChaCha8Rng) {
    let g = loop {
        let deg = rng.gen_range(0..3);
        let g = sample::ore_poly(f, rng, deg, 2);
        if !g.is_zero() {
            break g;
        }
    };
    let deg = rng.gen_range(0..5);
    let a = sample::ore_poly(f, rng, deg, 2);
    let d = scalar::right_divide(f, &a, &g).unwrap();
    let back = scalar::add(f, &scalar::compose(f, &d.quotient, &g), &d.remainder);
    assert_eq!(back, a);
    assert!(d.remainder.degree().is_none_or(|r| r < g.degree().unwrap()));
    // any other split (q + h, r - h∘g) leaves a remainder of too high degree
    let h = loop {
        let deg = rng.gen_range(0..2);
        let h = sample::ore_poly(f, rng, deg, 1);
        if !h.is_zero() {
            break h;
        }
    };
    let other = scalar::sub(f, &d.remainder, &scalar::compose(f, &h, &g));
    assert!(other.degree().unwrap() >= g.degree().unwrap());
}

fn matrix_division_case(f: &RationalFunctionField, rng: &mut ChaCha8Rng) {
    let dg = rng.gen_range(0..3);
    let mut coeffs: Vec<Matrix<_>> = (0..dg).map(|_| sample::matrix(f, rng, 2, 2, 1)).collect();
    coeffs.push(sample::invertible_matrix(f, rng, 2, 1));
    let g = OreMatrix::from_coeffs(f, 2, 2, coeffs).unwrap();
    let rows = rng.gen_range(1..3);
    let deg = rng.gen_range(0..5);
    let a = sample::ore_matrix(f, rng, rows, 2, deg, 1);
    let d = ore::right_divide(f, &a, &g).unwrap();
    let back = ore::add(f, &ore::compose(f, &d.quotient, &g).unwrap(), &d.remainder).unwrap();
    assert_eq!(back, a);
    assert!(d.remainder.degree().is_none_or(|r| r < dg));
    let h = loop {
        let deg = rng.gen_range(0..2);
        let h = sample::ore_matrix(f, rng, rows, 2, deg, 1);
        if !h.is_zero() {
            break h;
        }
    };
    let other = ore::sub(f, &d.remainder, &ore::compose(f, &h, &g).unwrap()).unwrap();
    assert!(other.degree().unwrap() >= dg);
}

#[test]
fn right_division_round_trip_scalar() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let f2 = k(2);
    let f3 = k(3);
    for i in 0..500 {
        if i % 2 == 0 {
            scalar_division_case(&f2, &mut rng);
        } else {
            scalar_division_case(&f3, &mut rng);
        }
    }
}

#[test]
fn right_division_round_trip_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let f = k(2);
    for _ in 0..500 {
        matrix_division_case(&f, &mut rng);
    }
}

#[test]
fn tensor_square_t_squared_by_expansion() {
    let f = k(2);
    let t = f.t();
    let a0 = Matrix::from_rows(vec![vec![t.clone(), f.one()], vec![f.zero(), t.clone()]]).unwrap();
    let a1 = Matrix::from_rows(vec![vec![f.zero(), f.zero()], vec![f.one(), f.zero()]]).unwrap();
    let phi = OreMatrix::from_coeffs(&f, 2, 2, vec![a0, a1]).unwrap();
    let sq = ore::compose(&f, &phi, &phi).unwrap();
    assert_eq!(ore::format(&f, &sq), "[[T^2, 0], [0, T^2]] + [[1, 0], [T^2 + T, 1]]*τ");
}

#[test]
fn sub_module_witness_example() {
    let f = k(2);
    let t = f.t();
    let t2 = f.mul(&t, &t);
    let tau = |c| OrePoly::from_coeffs(&f, c);
    let p = OreMatrix::from_entries(&f, &[vec![tau(vec![f.one(), f.one()]), tau(vec![f.one()])]]).unwrap();
    let phi = OreMatrix::from_entries(
        &f,
        &[
            vec![tau(vec![t.clone(), t.clone()]), OrePoly::zero()],
            vec![OrePoly::zero(), tau(vec![t.clone(), t2.clone()])],
        ],
    )
    .unwrap();
    let g = ore::compose(&f, &p, &phi).unwrap();
    let q = match ore::left_multiple_witness(&f, &p, &g, g.degree().unwrap()).unwrap() {
        Witness::Found(q) => q,
        other => panic!("{other:?}"),
    };
    // the witness is Φ_2(T) = T + T^2 τ
    assert_eq!(q, OreMatrix::from_entries(&f, &[vec![tau(vec![t, t2])]]).unwrap());
}
