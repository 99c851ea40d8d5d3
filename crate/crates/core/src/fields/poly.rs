use super::fq::{FiniteField, Fq};

/// A dense polynomial in `T` over `F_q`, lowest coefficient first and with
/// no trailing zeros (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last() == Some(&Fq(0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Fq) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fq(1)] }
    }

    /// `c T^n`.
    pub fn monomial(c: Fq, n: usize) -> Self {
        let mut coeffs = vec![Fq(0); n + 1];
        coeffs[n] = c;
        Self::from_coeffs(coeffs)
    }

    /// The polynomial `T`.
    pub fn t() -> Self {
        Self::monomial(Fq(1), 1)
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fq(1)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fq(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
}

/// Arithmetic in `A = F_q[T]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    fq: FiniteField,
}

impl PolyRing {
    pub fn new(fq: FiniteField) -> Self {
        PolyRing { fq }
    }

    pub fn fq(&self) -> &FiniteField {
        &self.fq
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut out = long.coeffs.clone();
        for (o, &s) in out.iter_mut().zip(&short.coeffs) {
            *o = self.fq.add(*o, s);
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly {
            coeffs: a.coeffs.iter().map(|&c| self.fq.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: Fq) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.fq.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let n = a.coeffs.len() + b.coeffs.len() - 1;
        if self.fq.e() == 1 {
            // accumulate integer products and reduce once; p <= 13 keeps this far from overflow
            let p = self.fq.p() as u64;
            let mut acc = vec![0u64; n];
            for (i, &x) in a.coeffs.iter().enumerate() {
                if x.0 == 0 {
                    continue;
                }
                let x = x.0 as u64;
                for (slot, &y) in acc[i..].iter_mut().zip(&b.coeffs) {
                    *slot += x * y.0 as u64;
                }
            }
            return Poly::from_coeffs(acc.into_iter().map(|v| Fq((v % p) as u16)).collect());
        }
        let mut out = vec![Fq(0); n];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.fq.add(out[i + j], self.fq.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, a: &Poly, mut n: u64) -> Poly {
        let mut base = a.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("polynomial division by zero");
        let inv_lead = self.fq.inv(b.leading()).expect("nonzero leading coefficient");
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return (Poly::zero(), a.clone());
        }
        let mut quot = vec![Fq(0); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = rem[k + db];
            if c.0 == 0 {
                continue;
            }
            let f = self.fq.mul(c, inv_lead);
            quot[k] = f;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                rem[k + j] = self.fq.sub(rem[k + j], self.fq.mul(f, bj));
            }
        }
        rem.truncate(db);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() || a.is_monic() {
            return a.clone();
        }
        let inv = self.fq.inv(a.leading()).expect("nonzero leading coefficient");
        self.scale(a, inv)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_one() || b.is_one() {
            return Poly::one();
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.div_rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `a(T)^(q^i)`, which equals `a(T^(q^i))` because the coefficients lie in `F_q`.
    pub fn frobenius(&self, a: &Poly, i: u32) -> Poly {
        if i == 0 || a.is_constant() {
            return a.clone();
        }
        let step = (self.fq.order() as usize).pow(i);
        self.spread(a, step)
    }

    /// `a(T^k)` for a positive integer `k`.
    pub fn spread(&self, a: &Poly, k: usize) -> Poly {
        let Some(d) = a.degree() else { return Poly::zero() };
        let mut out = vec![Fq(0); d * k + 1];
        for (i, &c) in a.coeffs.iter().enumerate() {
            out[i * k] = c;
        }
        Poly::from_coeffs(out)
    }

    /// `a(T)^p` (coefficients are raised to the `p`-th power as well).
    pub fn pth_power(&self, a: &Poly) -> Poly {
        let p = self.fq.p() as u64;
        let raised = Poly::from_coeffs(a.coeffs.iter().map(|&c| self.fq.pow(c, p)).collect());
        self.spread(&raised, p as usize)
    }

    /// `p`-th root when every exponent is divisible by `p`.
    pub fn pth_root(&self, a: &Poly) -> Option<Poly> {
        let mut parts = self.p_components(a);
        if parts[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(parts.swap_remove(0))
    }

    /// The unique `r_0, .., r_{p-1}` with `a = sum_j T^j r_j^p`.
    pub fn p_components(&self, a: &Poly) -> Vec<Poly> {
        let p = self.fq.p() as usize;
        let mut parts = vec![Vec::new(); p];
        for (i, &c) in a.coeffs.iter().enumerate() {
            let (k, j) = (i / p, i % p);
            if c.0 != 0 {
                let slot = &mut parts[j];
                if slot.len() <= k {
                    slot.resize(k + 1, Fq(0));
                }
                slot[k] = self.fq.pth_root(c);
            }
        }
        parts.into_iter().map(Poly::from_coeffs).collect()
    }

    /// `a(b(T))`.
    pub fn compose(&self, a: &Poly, b: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for &c in a.coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, b), &Poly::constant(c));
        }
        acc
    }

    pub fn eval(&self, a: &Poly, x: Fq) -> Fq {
        a.coeffs
            .iter()
            .rev()
            .fold(Fq(0), |acc, &c| self.fq.add(self.fq.mul(acc, x), c))
    }

    /// Render with variable `T`, highest degree first.
    pub fn format(&self, a: &Poly) -> String {
        self.format_in(a, "T")
    }

    pub fn format_in(&self, a: &Poly, var: &str) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.coeffs.iter().enumerate().rev() {
            if c.0 == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = self.fq.format_elem(c);
            terms.push(if i == 0 {
                if cs.contains('+') {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if c.0 == 1 {
                mono
            } else if cs.contains('+') {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            });
        }
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32) -> PolyRing {
        PolyRing::new(FiniteField::prime(p).unwrap())
    }

    fn poly(r: &PolyRing, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| r.fq().from_int(x)).collect())
    }

    #[test]
    fn degree_is_additive() {
        let r = ring(3);
        let a = poly(&r, &[1, 2, 0, 1]);
        let b = poly(&r, &[2, 1]);
        assert_eq!(r.mul(&a, &b).degree(), Some(4));
        assert_eq!(Poly::from_coeffs(vec![Fq(0), Fq(0)]).degree(), None);
    }

    #[test]
    fn division_and_gcd() {
        let r = ring(2);
        // (T^2 + T) = T (T + 1)
        let a = poly(&r, &[0, 1, 1]);
        let t = Poly::t();
        let (q, rem) = r.div_rem(&a, &t);
        assert_eq!(q, poly(&r, &[1, 1]));
        assert!(rem.is_zero());
        assert_eq!(r.gcd(&a, &poly(&r, &[0, 0, 1])), t);
    }

    #[test]
    fn frobenius_spreads_exponents() {
        let r = ring(2);
        let a = poly(&r, &[1, 1]);
        assert_eq!(r.frobenius(&a, 1), poly(&r, &[1, 0, 1]));
        assert_eq!(r.frobenius(&a, 1), r.mul(&a, &a));
        let r3 = ring(3);
        let b = poly(&r3, &[2, 1, 1]);
        assert_eq!(r3.frobenius(&b, 2), r3.pow(&b, 9));
    }

    #[test]
    fn p_components_reassemble() {
        let f = FiniteField::new(3, 2).unwrap();
        let r = PolyRing::new(f.clone());
        let a = Poly::from_coeffs((0..11).map(|i| f.element((i * 5 + 1) % 9)).collect());
        let parts = r.p_components(&a);
        let mut acc = Poly::zero();
        for (j, part) in parts.iter().enumerate() {
            acc = r.add(&acc, &r.mul(&Poly::monomial(f.one(), j), &r.pth_power(part)));
        }
        assert_eq!(acc, a);
        assert_eq!(r.pth_root(&r.pth_power(&a)), Some(a.clone()));
        assert_eq!(r.pth_root(&Poly::t()), None);
    }

    #[test]
    fn compose_and_format() {
        let r = ring(2);
        let a = poly(&r, &[0, 1, 1]);
        assert_eq!(r.compose(&a, &poly(&r, &[0, 0, 1])), poly(&r, &[0, 0, 1, 0, 1]));
        assert_eq!(r.format(&a), "T^2 + T");
        let r5 = ring(5);
        assert_eq!(r5.format(&poly(&r5, &[3, 0, 4])), "4*T^2 + 3");
    }
}
