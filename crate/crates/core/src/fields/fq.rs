use std::fmt;
use std::sync::Arc;

use crate::field::{Field, FieldError, FrobeniusField};

/// Default bound on the characteristic accepted by [`FiniteField::new`].
pub const DEFAULT_MAX_P: u32 = 13;
/// Default bound on the extension degree accepted by [`FiniteField::new`].
pub const DEFAULT_MAX_E: u32 = 4;

/// An element of `F_q`, encoded as `sum c_i p^i` where `c_0 + c_1 g + ...`
/// is its representative in the polynomial basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub(crate) u16);

impl Fq {
    pub fn index(self) -> u32 {
        self.0 as u32
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.0)
    }
}

/// Size limits for finite field construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldLimits {
    pub max_p: u32,
    pub max_e: u32,
}

impl Default for FieldLimits {
    fn default() -> Self {
        FieldLimits {
            max_p: DEFAULT_MAX_P,
            max_e: DEFAULT_MAX_E,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct FqData {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over `F_p`, low to high, length `e + 1`.
    modulus: Vec<u32>,
    generator: String,
    /// Discrete log tables, populated only when `e > 1`.
    exp: Vec<u16>,
    log: Vec<u16>,
}

/// The finite field `F_q`, `q = p^e`, in a polynomial basis over `F_p`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    inner: Arc<FqData>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Remainder of `a` modulo the monic `m` over `F_p`.
fn fp_poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let shift = a.len() - dm;
            for (j, &mj) in m[..dm].iter().enumerate() {
                a[shift + j] = (a[shift + j] + (p - lead) * mj) % p;
            }
        }
    }
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    // trial division by every monic polynomial of degree 1..=deg/2
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push(c % p);
                c /= p;
            }
            divisor.push(1);
            if fp_poly_rem(m.to_vec(), &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// `F_p` for a prime `p`.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    /// `F_{p^e}` with the first monic irreducible modulus in the order of the
    /// integer encoding of its low coefficients.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        Self::with_limits(p, e, None, "g", FieldLimits::default())
    }

    /// `F_{p^e}` with an explicit modulus (low to high, monic, over `F_p`) and
    /// a generator name used when printing elements.
    pub fn with_modulus(p: u32, modulus: Vec<u32>, generator: &str) -> Result<Self, FieldError> {
        let e = modulus.len().saturating_sub(1) as u32;
        Self::with_limits(p, e, Some(modulus), generator, FieldLimits::default())
    }

    pub fn with_limits(
        p: u32,
        e: u32,
        modulus: Option<Vec<u32>>,
        generator: &str,
        limits: FieldLimits,
    ) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(FieldError::InvalidField("extension degree must be at least 1".into()));
        }
        if p > limits.max_p || e > limits.max_e {
            return Err(FieldError::InvalidField(format!(
                "p = {p}, e = {e} exceeds the configured limits p <= {}, e <= {}",
                limits.max_p, limits.max_e
            )));
        }
        let q = p.pow(e);
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u32> = m.into_iter().map(|c| c % p).collect();
                if m.len() != e as usize + 1 || m[e as usize] != 1 {
                    return Err(FieldError::InvalidField("modulus must be monic of degree e".into()));
                }
                if !fp_irreducible(&m, p) {
                    return Err(FieldError::InvalidField("modulus is reducible over F_p".into()));
                }
                m
            }
            None => Self::first_irreducible(p, e),
        };
        let mut data = FqData {
            p,
            e,
            q,
            modulus,
            generator: generator.to_string(),
            exp: Vec::new(),
            log: Vec::new(),
        };
        if e > 1 {
            data.build_tables();
        }
        Ok(FiniteField { inner: Arc::new(data) })
    }

    fn first_irreducible(p: u32, e: u32) -> Vec<u32> {
        if e == 1 {
            return vec![0, 1];
        }
        let count = p.pow(e);
        (0..count)
            .map(|code| {
                let mut m = Vec::with_capacity(e as usize + 1);
                let mut c = code;
                for _ in 0..e {
                    m.push(c % p);
                    c /= p;
                }
                m.push(1);
                m
            })
            .find(|m| fp_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists")
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn generator_name(&self) -> &str {
        &self.inner.generator
    }

    /// The class of the polynomial variable, i.e. the generator `g`
    /// (equal to the integer 0 when `e = 1`, where no generator is needed).
    pub fn generator(&self) -> Fq {
        if self.inner.e == 1 {
            Fq(0)
        } else {
            Fq(self.inner.p as u16)
        }
    }

    pub fn element(&self, index: u32) -> Fq {
        assert!(index < self.inner.q, "element index out of range");
        Fq(index as u16)
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.inner.q).map(|i| Fq(i as u16))
    }

    /// The element with the given `F_p` digits (low to high).
    pub fn from_digits(&self, digits: &[u32]) -> Fq {
        let reduced = fp_poly_rem(
            digits.iter().map(|d| d % self.inner.p).collect(),
            &self.inner.modulus,
            self.inner.p,
        );
        self.encode(&reduced)
    }

    pub fn digits(&self, a: Fq) -> Vec<u32> {
        let p = self.inner.p;
        let mut v = a.0 as u32;
        (0..self.inner.e)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    fn encode(&self, digits: &[u32]) -> Fq {
        let p = self.inner.p;
        Fq(digits.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        let d = &*self.inner;
        if d.e == 1 {
            return Fq(((a.0 as u32 + b.0 as u32) % d.p) as u16);
        }
        if d.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let (mut out, mut scale) = (0u32, 1u32);
        for _ in 0..d.e {
            out += ((x % d.p + y % d.p) % d.p) * scale;
            x /= d.p;
            y /= d.p;
            scale *= d.p;
        }
        Fq(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        let d = &*self.inner;
        if d.p == 2 {
            return a;
        }
        if d.e == 1 {
            return Fq(((d.p - a.0 as u32) % d.p) as u16);
        }
        let digits: Vec<u32> = self.digits(a).into_iter().map(|x| (d.p - x) % d.p).collect();
        self.encode(&digits)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let d = &*self.inner;
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        if d.e == 1 {
            return Fq(((a.0 as u32 * b.0 as u32) % d.p) as u16);
        }
        let qm1 = d.q - 1;
        let s = (d.log[a.0 as usize] as u32 + d.log[b.0 as usize] as u32) % qm1;
        Fq(d.exp[s as usize])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let d = &*self.inner;
        if d.e == 1 {
            return Ok(Fq(pow_mod(a.0 as u32, d.p - 2, d.p) as u16));
        }
        let qm1 = d.q - 1;
        let l = d.log[a.0 as usize] as u32;
        Ok(Fq(d.exp[((qm1 - l) % qm1) as usize]))
    }

    pub fn pow(&self, a: Fq, n: u64) -> Fq {
        if n == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let d = &*self.inner;
        if d.e == 1 {
            let e = (n % (d.p as u64 - 1)) as u32;
            return Fq(pow_mod(a.0 as u32, e, d.p) as u16);
        }
        let qm1 = (d.q - 1) as u64;
        let s = (d.log[a.0 as usize] as u64 * (n % qm1)) % qm1;
        Fq(d.exp[s as usize])
    }

    /// The unique `y` with `y^p = a` (`F_q` is perfect).
    pub fn pth_root(&self, a: Fq) -> Fq {
        // x -> x^(q/p) inverts x -> x^p
        self.pow(a, (self.inner.q / self.inner.p) as u64)
    }

    pub fn from_int(&self, n: i64) -> Fq {
        let p = self.inner.p as i64;
        Fq(n.rem_euclid(p) as u16)
    }

    pub fn zero(&self) -> Fq {
        Fq(0)
    }

    pub fn one(&self) -> Fq {
        Fq(1)
    }

    /// `true` when the element lies in the prime field.
    pub fn is_prime_field_element(&self, a: Fq) -> bool {
        (a.0 as u32) < self.inner.p
    }

    pub fn format_elem(&self, a: Fq) -> String {
        if self.inner.e == 1 || self.is_prime_field_element(a) {
            return a.0.to_string();
        }
        let g = &self.inner.generator;
        let digits = self.digits(a);
        let mut terms = Vec::new();
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => g.clone(),
                _ => format!("{g}^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join(" + ")
    }
}

fn pow_mod(mut b: u32, mut e: u32, m: u32) -> u32 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl FqData {
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let da: Vec<u32> = digits_of(a, p, self.e);
        let db: Vec<u32> = digits_of(b, p, self.e);
        let mut prod = vec![0u32; 2 * self.e as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let r = fp_poly_rem(prod, &self.modulus, p);
        r.iter().rev().fold(0u32, |acc, &d| acc * p + d)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        for g in 2..q {
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut x = 1u32;
            loop {
                exp.push(x as u16);
                x = self.slow_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == q as usize - 1 {
                let mut log = vec![0u16; q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u16;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }
}

fn digits_of(mut v: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

impl Field for FiniteField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq(0)
    }
    fn one(&self) -> Fq {
        Fq(1)
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        FiniteField::add(self, *a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        FiniteField::neg(self, *a)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        FiniteField::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fq) -> Result<Fq, FieldError> {
        FiniteField::inv(self, *a)
    }
    fn from_int(&self, n: i64) -> Fq {
        FiniteField::from_int(self, n)
    }
    fn characteristic(&self) -> u32 {
        self.inner.p
    }
    fn format(&self, a: &Fq) -> String {
        self.format_elem(*a)
    }
    fn pow(&self, a: &Fq, n: u64) -> Fq {
        FiniteField::pow(self, *a, n)
    }
}

impl FrobeniusField for FiniteField {
    fn q(&self) -> u64 {
        self.inner.q as u64
    }
    fn frobenius(&self, a: &Fq, _i: u32) -> Fq {
        *a
    }
}
