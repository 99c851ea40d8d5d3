//! Random elements for property tests and randomized checks.

use rand::Rng;

use crate::field::Field;
use crate::fields::{FiniteField, Fq, Poly, RatFunc, RationalFunctionField, Tower, TowerElem};
use crate::linalg::Matrix;
use crate::ore::{OreMatrix, OrePoly};

/// A field whose elements can be drawn at random with bounded size.
pub trait RandomElement: Field {
    /// An element whose polynomial parts have degree at most `max_degree`.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> Self::Elem;

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> Self::Elem {
        loop {
            let x = self.random(rng, max_degree);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

pub fn fq_element<R: Rng + ?Sized>(rng: &mut R, fq: &FiniteField) -> Fq {
    fq.element(rng.gen_range(0..fq.order()))
}

pub fn poly<R: Rng + ?Sized>(rng: &mut R, fq: &FiniteField, max_degree: usize) -> Poly {
    Poly::from_coeffs((0..=max_degree).map(|_| fq_element(rng, fq)).collect())
}

pub fn monic_poly<R: Rng + ?Sized>(rng: &mut R, fq: &FiniteField, degree: usize) -> Poly {
    let mut c: Vec<Fq> = (0..degree).map(|_| fq_element(rng, fq)).collect();
    c.push(fq.one());
    Poly::from_coeffs(c)
}

impl RandomElement for FiniteField {
    fn random<R: Rng + ?Sized>(&self, rng: &mut R, _max_degree: usize) -> Fq {
        fq_element(rng, self)
    }
}

impl RandomElement for RationalFunctionField {
    /// Polynomials half of the time, proper fractions otherwise.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> RatFunc {
        let fq = self.ring().fq();
        let num = poly(rng, fq, max_degree);
        if rng.gen_bool(0.5) {
            return RatFunc::from_poly(num);
        }
        let degree = rng.gen_range(0..=max_degree.max(1));
        let den = monic_poly(rng, fq, degree);
        self.fraction(&num, &den).expect("monic denominator")
    }
}

impl RandomElement for Tower {
    fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_degree: usize) -> TowerElem {
        let coords = (0..self.degree())
            .map(|_| self.base().random(rng, max_degree))
            .collect();
        self.from_coords(coords).expect("length matches")
    }
}

pub fn matrix<F: RandomElement, R: Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    rows: usize,
    cols: usize,
    max_degree: usize,
) -> Matrix<F::Elem> {
    Matrix::from_fn(rows, cols, |_, _| f.random(rng, max_degree))
}

pub fn ore_poly<F: RandomElement, R: Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    tau_degree: usize,
    max_degree: usize,
) -> OrePoly<F::Elem> {
    OrePoly::from_coeffs(f, (0..=tau_degree).map(|_| f.random(rng, max_degree)).collect())
}

pub fn ore_matrix<F: RandomElement, R: Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    rows: usize,
    cols: usize,
    tau_degree: usize,
    max_degree: usize,
) -> OreMatrix<F::Elem> {
    let coeffs = (0..=tau_degree)
        .map(|_| matrix(f, rng, rows, cols, max_degree))
        .collect();
    OreMatrix::from_coeffs(f, rows, cols, coeffs).expect("shapes agree")
}

/// An invertible matrix, found by rejection.
pub fn invertible_matrix<F: RandomElement, R: Rng + ?Sized>(
    f: &F,
    rng: &mut R,
    n: usize,
    max_degree: usize,
) -> Matrix<F::Elem> {
    loop {
        let m = matrix(f, rng, n, n, max_degree);
        if crate::linalg::rank(f, &m).map(|r| r == n).unwrap_or(false) {
            return m;
        }
    }
}
