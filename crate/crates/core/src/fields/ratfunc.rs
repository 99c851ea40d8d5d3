use super::fq::{FiniteField, Fq};
use super::poly::{Poly, PolyRing};
use crate::field::{Field, FieldError, FrobeniusField, FunctionField};

/// An element of `k = F_q(T)` in canonical form: coprime numerator and
/// denominator, denominator monic, zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }
}

/// The rational function field `k = F_q(T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionField {
    ring: PolyRing,
}

impl RationalFunctionField {
    pub fn new(fq: FiniteField) -> Self {
        RationalFunctionField {
            ring: PolyRing::new(fq),
        }
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    /// Canonical `num/den`.
    pub fn fraction(&self, num: &Poly, den: &Poly) -> Result<RatFunc, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.reduce(num.clone(), den.clone()))
    }

    fn reduce(&self, num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let r = &self.ring;
        let g = r.gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (r.div_rem(&num, &g).0, r.div_rem(&den, &g).0)
        };
        if !den.is_monic() {
            let inv = r.fq().inv(den.leading()).expect("nonzero denominator");
            num = r.scale(&num, inv);
            den = r.scale(&den, inv);
        }
        RatFunc { num, den }
    }

    /// The unique `y` with `y^p = x`, if it exists in `k`.
    ///
    /// Writes `x = n d^(p-1) / d^p` and succeeds iff `n d^(p-1)` has only
    /// exponents divisible by `p`.
    pub fn pth_root(&self, x: &RatFunc) -> Option<RatFunc> {
        let r = &self.ring;
        let p = r.fq().p() as u64;
        let cleared = r.mul(&x.num, &r.pow(&x.den, p - 1));
        let root = r.pth_root(&cleared)?;
        Some(self.reduce(root, x.den.clone()))
    }

    /// The unique `r_0, .., r_{p-1}` in `k` with `x = sum_j T^j r_j^p`.
    pub fn p_components(&self, x: &RatFunc) -> Vec<RatFunc> {
        let r = &self.ring;
        let p = r.fq().p() as u64;
        let cleared = r.mul(&x.num, &r.pow(&x.den, p - 1));
        r.p_components(&cleared)
            .into_iter()
            .map(|c| self.reduce(c, x.den.clone()))
            .collect()
    }

    pub fn pth_power(&self, x: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.ring.pth_power(&x.num),
            den: self.ring.pth_power(&x.den),
        }
    }
}

impl Field for RationalFunctionField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }

    fn one(&self) -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let r = &self.ring;
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            return self.reduce(r.add(&a.num, &b.num), a.den.clone());
        }
        let g = r.gcd(&a.den, &b.den);
        let (ad, bd) = if g.is_one() {
            (a.den.clone(), b.den.clone())
        } else {
            (r.div_rem(&a.den, &g).0, r.div_rem(&b.den, &g).0)
        };
        let num = r.add(&r.mul(&a.num, &bd), &r.mul(&b.num, &ad));
        let den = r.mul(&a.den, &bd);
        self.reduce(num, den)
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.ring.neg(&a.num),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let r = &self.ring;
        if a.is_polynomial() && b.is_polynomial() {
            return RatFunc::from_poly(r.mul(&a.num, &b.num));
        }
        // cross-cancel before multiplying
        let g1 = r.gcd(&a.num, &b.den);
        let g2 = r.gcd(&b.num, &a.den);
        let an = r.div_rem(&a.num, &g1).0;
        let bd = r.div_rem(&b.den, &g1).0;
        let bn = r.div_rem(&b.num, &g2).0;
        let ad = r.div_rem(&a.den, &g2).0;
        self.reduce(r.mul(&an, &bn), r.mul(&ad, &bd))
    }

    fn inv(&self, a: &RatFunc) -> Result<RatFunc, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.reduce(a.den.clone(), a.num.clone()))
    }

    fn from_int(&self, n: i64) -> RatFunc {
        RatFunc::from_poly(Poly::constant(self.ring.fq().from_int(n)))
    }

    fn characteristic(&self) -> u32 {
        self.ring.fq().p()
    }

    fn format(&self, a: &RatFunc) -> String {
        let n = self.ring.format(&a.num);
        if a.den.is_one() {
            return n;
        }
        let d = self.ring.format(&a.den);
        let n = if n.contains('+') { format!("({n})") } else { n };
        let d = if d.contains('+') || d.contains('*') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

impl FrobeniusField for RationalFunctionField {
    fn q(&self) -> u64 {
        self.ring.fq().order() as u64
    }

    fn frobenius(&self, a: &RatFunc, i: u32) -> RatFunc {
        // injective ring map: coprimality and monicity are preserved
        RatFunc {
            num: self.ring.frobenius(&a.num, i),
            den: self.ring.frobenius(&a.den, i),
        }
    }
}

impl FunctionField for RationalFunctionField {
    fn fq(&self) -> &FiniteField {
        self.ring.fq()
    }

    fn from_poly(&self, a: &Poly) -> RatFunc {
        RatFunc::from_poly(a.clone())
    }

    fn from_fq(&self, c: Fq) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u32) -> RationalFunctionField {
        RationalFunctionField::new(FiniteField::prime(p).unwrap())
    }

    fn poly(f: &RationalFunctionField, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| f.fq().from_int(x)).collect())
    }

    #[test]
    fn sum_over_common_denominator_collapses() {
        let f = k(2);
        let t1 = poly(&f, &[1, 1]);
        let a = f.fraction(&Poly::t(), &t1).unwrap();
        let b = f.fraction(&Poly::one(), &t1).unwrap();
        assert_eq!(f.add(&a, &b), f.one());
    }

    #[test]
    fn t_times_inverse_is_one() {
        let f = k(5);
        let t = f.t();
        assert_eq!(f.mul(&t, &f.inv(&t).unwrap()), f.one());
    }

    #[test]
    fn gcd_cancellation() {
        let f = k(2);
        let x = f.fraction(&poly(&f, &[0, 1, 1]), &Poly::t()).unwrap();
        assert_eq!(x, f.from_poly(&poly(&f, &[1, 1])));
    }

    #[test]
    fn denominator_is_monic() {
        let f = k(3);
        let x = f.fraction(&poly(&f, &[1]), &poly(&f, &[1, 2])).unwrap();
        assert!(x.denominator().is_monic());
        assert_eq!(f.mul(&x, &f.from_poly(&poly(&f, &[1, 2]))), f.one());
        assert_eq!(f.inv(&f.zero()), Err(FieldError::DivisionByZero));
        assert!(f.fraction(&Poly::one(), &Poly::zero()).is_err());
    }

    #[test]
    fn frobenius_squares_in_characteristic_two() {
        let f = k(2);
        let x = f.from_poly(&poly(&f, &[1, 1]));
        assert_eq!(f.frobenius(&x, 1), f.from_poly(&poly(&f, &[1, 0, 1])));
        assert_eq!(f.frobenius(&x, 0), x);
    }

    #[test]
    fn pth_roots() {
        let f = k(2);
        assert_eq!(f.pth_root(&f.t()), None);
        assert_eq!(f.pth_root(&f.one()), Some(f.one()));
        let x = f.fraction(&poly(&f, &[1, 1]), &poly(&f, &[0, 1, 1, 1])).unwrap();
        let sq = f.mul(&x, &x);
        assert_eq!(f.pth_root(&sq), Some(x));
    }

    #[test]
    fn formatting_parenthesizes_compound_parts() {
        let f = k(2);
        let x = f.fraction(&Poly::one(), &poly(&f, &[0, 1, 1])).unwrap();
        assert_eq!(f.format(&x), "1/(T^2 + T)");
        let y = f.fraction(&poly(&f, &[1, 1]), &poly(&f, &[0, 0, 1])).unwrap();
        assert_eq!(f.format(&y), "(T + 1)/T^2");
    }
}
