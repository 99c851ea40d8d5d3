//! Explicit finite extension towers `k = K_0 ⊂ K_1 ⊂ .. ⊂ K_L` with
//! `K_l = K_{l-1}[U_l] / (f_l(U_l))`.
//!
//! Elements are stored flattened as coordinates over `k` in the monomial
//! basis `U_1^{j_1} .. U_L^{j_L}` (`j_l < deg f_l`), with `U_1` varying
//! fastest. An element of level `l` occupies the first `n_l` coordinates of
//! the flattened vector, so embedding from a lower level is zero padding.
//! Defining polynomials are not checked for irreducibility: arithmetic is
//! quotient-ring arithmetic, and inversion of a zero divisor fails with a
//! witness.

use std::fmt;
use std::sync::Arc;

use super::fq::{FiniteField, Fq};
use super::poly::Poly;
use super::ratfunc::{RatFunc, RationalFunctionField};
use crate::field::{Field, FieldError, FrobeniusField, FunctionField};
use crate::linalg::{self, Matrix};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TowerElem {
    coords: Vec<RatFunc>,
}

impl TowerElem {
    /// Coordinates over `k` in the flattened monomial basis.
    pub fn coords(&self) -> &[RatFunc] {
        &self.coords
    }
}

#[derive(Debug, PartialEq, Eq)]
struct TowerStep {
    name: String,
    degree: usize,
    /// `c_0 .. c_{d-1}` of the monic defining polynomial, each at the previous level.
    modulus: Vec<Vec<RatFunc>>,
    /// `(U^q)^j` for `j < degree`, at this level.
    frob: Vec<Vec<RatFunc>>,
}

#[derive(Debug, PartialEq, Eq)]
struct TowerData {
    base: RationalFunctionField,
    steps: Vec<TowerStep>,
    /// `sizes[l]` is the dimension of level `l` over `k`.
    sizes: Vec<usize>,
}

/// A tower of explicit extensions of `F_q(T)`; cheap to clone.
#[derive(Clone, PartialEq, Eq)]
pub struct Tower {
    inner: Arc<TowerData>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower(F_{}(T)", self.fq().order())?;
        for s in &self.inner.steps {
            write!(f, ", {}^{}", s.name, s.degree)?;
        }
        write!(f, ")")
    }
}

fn all_zero(k: &RationalFunctionField, xs: &[RatFunc]) -> bool {
    xs.iter().all(|x| k.is_zero(x))
}

impl Tower {
    /// The trivial tower: `k` itself.
    pub fn new(base: RationalFunctionField) -> Self {
        Tower {
            inner: Arc::new(TowerData {
                base,
                steps: Vec::new(),
                sizes: vec![1],
            }),
        }
    }

    pub fn over(fq: FiniteField) -> Self {
        Self::new(RationalFunctionField::new(fq))
    }

    pub fn base(&self) -> &RationalFunctionField {
        &self.inner.base
    }

    /// Number of extension steps above `k`.
    pub fn height(&self) -> usize {
        self.inner.steps.len()
    }

    /// Dimension over `k`.
    pub fn degree(&self) -> usize {
        *self.inner.sizes.last().unwrap()
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.inner.steps.iter().map(|s| s.name.as_str())
    }

    /// Adjoins a root `name` of the monic polynomial whose coefficients
    /// (lowest first, leading `1` included) are elements of this tower.
    pub fn extend(&self, name: &str, defining: &[TowerElem]) -> Result<Tower, FieldError> {
        let k = &self.inner.base;
        let d = defining.len().saturating_sub(1);
        if d < 2 {
            return Err(FieldError::InvalidField(format!(
                "defining polynomial of {name} must have degree at least 2"
            )));
        }
        if !self.is_one(&defining[d]) {
            return Err(FieldError::InvalidField(format!(
                "defining polynomial of {name} must be monic"
            )));
        }
        if name == "T" || self.variable_names().any(|n| n == name) || name.is_empty() {
            return Err(FieldError::InvalidField(format!(
                "variable name {name:?} is already in use"
            )));
        }
        let n = self.degree();
        if defining.iter().any(|c| c.coords.len() != n) {
            return Err(FieldError::InvalidField("coefficient from a different tower".into()));
        }
        let mut sizes = self.inner.sizes.clone();
        sizes.push(n * d);
        let mut steps: Vec<TowerStep> = self
            .inner
            .steps
            .iter()
            .map(|s| TowerStep {
                name: s.name.clone(),
                degree: s.degree,
                modulus: s.modulus.clone(),
                frob: s.frob.clone(),
            })
            .collect();
        steps.push(TowerStep {
            name: name.to_string(),
            degree: d,
            modulus: defining[..d].iter().map(|c| c.coords.clone()).collect(),
            frob: Vec::new(),
        });
        let mut tower = Tower {
            inner: Arc::new(TowerData {
                base: k.clone(),
                steps,
                sizes,
            }),
        };
        let level = tower.height();
        let u = tower.generator(level);
        let uq = tower.pow(&u, tower.q());
        let mut powers = Vec::with_capacity(d);
        let mut acc = tower.one();
        for _ in 0..d {
            powers.push(acc.coords.clone());
            acc = tower.mul(&acc, &uq);
        }
        Arc::get_mut(&mut tower.inner).expect("fresh tower").steps[level - 1].frob = powers;
        Ok(tower)
    }

    /// The adjoined variable of level `level` (1-based).
    pub fn generator(&self, level: usize) -> TowerElem {
        assert!(level >= 1 && level <= self.height(), "no such tower level");
        let mut coords = vec![self.inner.base.zero(); self.degree()];
        coords[self.inner.sizes[level - 1]] = self.inner.base.one();
        TowerElem { coords }
    }

    pub fn variable(&self, name: &str) -> Option<TowerElem> {
        self.inner
            .steps
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.generator(i + 1))
    }

    pub fn from_ratfunc(&self, x: &RatFunc) -> TowerElem {
        let mut coords = vec![self.inner.base.zero(); self.degree()];
        coords[0] = x.clone();
        TowerElem { coords }
    }

    /// Builds an element from its flattened coordinates.
    pub fn from_coords(&self, coords: Vec<RatFunc>) -> Result<TowerElem, FieldError> {
        if coords.len() != self.degree() {
            return Err(FieldError::InvalidField(
                "coordinate vector has the wrong length".into(),
            ));
        }
        Ok(TowerElem { coords })
    }

    /// The element as a member of `k`, when it lies there.
    pub fn as_ratfunc(&self, x: &TowerElem) -> Option<RatFunc> {
        self.is_base(x).then(|| x.coords[0].clone())
    }

    fn is_base(&self, x: &TowerElem) -> bool {
        all_zero(&self.inner.base, &x.coords[1..])
    }

    /// `true` when `sub` is an initial segment of this tower.
    pub fn extends(&self, sub: &Tower) -> bool {
        let (a, b) = (&*self.inner, &*sub.inner);
        a.base == b.base
            && b.steps.len() <= a.steps.len()
            && a.steps
                .iter()
                .zip(&b.steps)
                .all(|(x, y)| x.name == y.name && x.modulus == y.modulus)
    }

    /// Embeds an element of the initial segment `sub` into this tower.
    pub fn lift(&self, sub: &Tower, x: &TowerElem) -> Result<TowerElem, FieldError> {
        if !self.extends(sub) {
            return Err(FieldError::InvalidField(
                "tower is not an extension of the source".into(),
            ));
        }
        let mut coords = x.coords.clone();
        coords.resize(self.degree(), self.inner.base.zero());
        Ok(TowerElem { coords })
    }

    fn mul_at(&self, level: usize, a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
        let k = &self.inner.base;
        if level == 0 {
            return vec![k.mul(&a[0], &b[0])];
        }
        let step = &self.inner.steps[level - 1];
        let c = self.inner.sizes[level - 1];
        let d = step.degree;
        let mut prod = vec![vec![k.zero(); c]; 2 * d - 1];
        for i in 0..d {
            let ai = &a[i * c..(i + 1) * c];
            if all_zero(k, ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * c..(j + 1) * c];
                if all_zero(k, bj) {
                    continue;
                }
                let p = self.mul_at(level - 1, ai, bj);
                for (slot, v) in prod[i + j].iter_mut().zip(&p) {
                    *slot = k.add(slot, v);
                }
            }
        }
        for top in (d..2 * d - 1).rev() {
            let lead = std::mem::take(&mut prod[top]);
            if all_zero(k, &lead) {
                continue;
            }
            for (j, m) in step.modulus.iter().enumerate() {
                if all_zero(k, m) {
                    continue;
                }
                let p = self.mul_at(level - 1, &lead, m);
                for (slot, v) in prod[top - d + j].iter_mut().zip(&p) {
                    *slot = k.sub(slot, v);
                }
            }
        }
        prod.truncate(d);
        prod.into_iter().flatten().collect()
    }

    /// One application of `x -> x^q` at `level`.
    fn frob_at(&self, level: usize, a: &[RatFunc]) -> Vec<RatFunc> {
        let k = &self.inner.base;
        if level == 0 {
            return vec![k.frobenius(&a[0], 1)];
        }
        let step = &self.inner.steps[level - 1];
        let c = self.inner.sizes[level - 1];
        let mut out = vec![k.zero(); self.inner.sizes[level]];
        for j in 0..step.degree {
            let cj = &a[j * c..(j + 1) * c];
            if all_zero(k, cj) {
                continue;
            }
            let fj = self.frob_at(level - 1, cj);
            let w = &step.frob[j];
            for i in 0..step.degree {
                let wi = &w[i * c..(i + 1) * c];
                if all_zero(k, wi) {
                    continue;
                }
                let p = self.mul_at(level - 1, &fj, wi);
                for (slot, v) in out[i * c..(i + 1) * c].iter_mut().zip(&p) {
                    *slot = k.add(slot, v);
                }
            }
        }
        out
    }

    /// The unique `y` with `y^p = x` in this tower, if it exists.
    ///
    /// Each coordinate of `x` and of the `p`-th powers of the basis
    /// monomials is split along the `p`-basis `1, T, .., T^{p-1}` of `k`
    /// over `k^p`; the root's coordinates then solve a linear system over `k`.
    pub fn pth_root(&self, x: &TowerElem) -> Option<TowerElem> {
        let k = &self.inner.base;
        let p = self.characteristic() as usize;
        if self.height() == 0 || (self.is_base(x) && k.pth_root(&x.coords[0]).is_some()) {
            let r = k.pth_root(&x.coords[0])?;
            return Some(self.from_ratfunc(&r));
        }
        let n = self.degree();
        let mut system = linalg::zeros(k, n * p, n);
        for j in 0..n {
            let mut e = vec![k.zero(); n];
            e[j] = k.one();
            let v = self.pow(&TowerElem { coords: e }, p as u64);
            for (jj, c) in v.coords.iter().enumerate() {
                for (a, comp) in k.p_components(c).into_iter().enumerate() {
                    system.set(jj * p + a, j, comp);
                }
            }
        }
        let rhs: Vec<RatFunc> = x.coords.iter().flat_map(|c| k.p_components(c)).collect();
        let y = linalg::solve(k, &system, &rhs).ok()??;
        let y = TowerElem { coords: y };
        (self.pow(&y, p as u64) == *x).then_some(y)
    }

    fn monomial_name(&self, index: usize) -> String {
        let mut rem = index;
        let mut parts = Vec::new();
        for s in &self.inner.steps {
            let e = rem % s.degree;
            rem /= s.degree;
            match e {
                0 => {}
                1 => parts.push(s.name.clone()),
                _ => parts.push(format!("{}^{}", s.name, e)),
            }
        }
        parts.join("*")
    }
}

impl Field for Tower {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        TowerElem {
            coords: vec![self.inner.base.zero(); self.degree()],
        }
    }

    fn one(&self) -> TowerElem {
        self.from_ratfunc(&self.inner.base.one())
    }

    fn is_zero(&self, a: &TowerElem) -> bool {
        all_zero(&self.inner.base, &a.coords)
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let k = &self.inner.base;
        TowerElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| k.add(x, y)).collect(),
        }
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        let k = &self.inner.base;
        TowerElem {
            coords: a.coords.iter().map(|x| k.neg(x)).collect(),
        }
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let k = &self.inner.base;
        TowerElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| k.sub(x, y)).collect(),
        }
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let k = &self.inner.base;
        if self.is_base(a) {
            return TowerElem {
                coords: b.coords.iter().map(|y| k.mul(&a.coords[0], y)).collect(),
            };
        }
        if self.is_base(b) {
            return TowerElem {
                coords: a.coords.iter().map(|x| k.mul(x, &b.coords[0])).collect(),
            };
        }
        TowerElem {
            coords: self.mul_at(self.height(), &a.coords, &b.coords),
        }
    }

    fn inv(&self, a: &TowerElem) -> Result<TowerElem, FieldError> {
        let k = &self.inner.base;
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        if self.is_base(a) {
            return Ok(self.from_ratfunc(&k.inv(&a.coords[0])?));
        }
        // column j of the multiplication-by-a matrix is a * e_j
        let n = self.degree();
        let columns: Vec<Vec<RatFunc>> = (0..n)
            .map(|j| {
                let mut e = vec![k.zero(); n];
                e[j] = k.one();
                self.mul_at(self.height(), &a.coords, &e)
            })
            .collect();
        let m = Matrix::from_fn(n, n, |r, c| columns[c][r].clone());
        let mut rhs = vec![k.zero(); n];
        rhs[0] = k.one();
        match linalg::solve(k, &m, &rhs)? {
            Some(y) => Ok(TowerElem { coords: y }),
            None => {
                let ker = linalg::kernel(k, &m)?;
                let witness = TowerElem {
                    coords: ker.into_iter().next().expect("singular matrix"),
                };
                Err(FieldError::ZeroDivisor {
                    element: self.format(a),
                    annihilator: self.format(&witness),
                })
            }
        }
    }

    fn from_int(&self, n: i64) -> TowerElem {
        self.from_ratfunc(&self.inner.base.from_int(n))
    }

    fn characteristic(&self) -> u32 {
        self.fq().p()
    }

    fn format(&self, a: &TowerElem) -> String {
        let k = &self.inner.base;
        let mut terms = Vec::new();
        for (j, c) in a.coords.iter().enumerate().rev() {
            if k.is_zero(c) {
                continue;
            }
            let mono = self.monomial_name(j);
            let cs = k.format(c);
            terms.push(if mono.is_empty() {
                if cs.contains('+') && a.coords.len() > 1 {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if k.is_one(c) {
                mono
            } else if cs.contains('+') {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl FrobeniusField for Tower {
    fn q(&self) -> u64 {
        self.fq().order() as u64
    }

    fn frobenius(&self, a: &TowerElem, i: u32) -> TowerElem {
        if i == 0 {
            return a.clone();
        }
        if self.is_base(a) {
            return self.from_ratfunc(&self.inner.base.frobenius(&a.coords[0], i));
        }
        let mut coords = a.coords.clone();
        for _ in 0..i {
            coords = self.frob_at(self.height(), &coords);
        }
        TowerElem { coords }
    }
}

impl FunctionField for Tower {
    fn fq(&self) -> &FiniteField {
        self.inner.base.fq()
    }

    fn from_poly(&self, a: &Poly) -> TowerElem {
        self.from_ratfunc(&RatFunc::from_poly(a.clone()))
    }

    fn from_fq(&self, c: Fq) -> TowerElem {
        self.from_poly(&Poly::constant(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Tower {
        Tower::over(FiniteField::prime(2).unwrap())
    }

    /// `k(U)` with `U^2 = T`.
    fn sqrt_t() -> Tower {
        let k = k2();
        let minus_t = k.neg(&k.t());
        k.extend("U", &[minus_t, k.zero(), k.one()]).unwrap()
    }

    #[test]
    fn frobenius_of_square_root_of_t() {
        let f = sqrt_t();
        let u = f.variable("U").unwrap();
        assert_eq!(f.frobenius(&u, 1), f.t());
        assert_eq!(f.frobenius(&u, 0), u);
        assert_eq!(f.frobenius(&u, 3), f.pow(&u, 8));
    }

    #[test]
    fn frobenius_of_t_plus_one() {
        let f = k2();
        let x = f.add(&f.t(), &f.one());
        assert_eq!(f.frobenius(&x, 1), f.add(&f.mul(&f.t(), &f.t()), &f.one()));
    }

    #[test]
    fn pth_roots_in_tower() {
        let f = sqrt_t();
        let u = f.variable("U").unwrap();
        assert_eq!(f.pth_root(&f.t()), Some(u.clone()));
        assert_eq!(f.pth_root(&f.one()), Some(f.one()));
        assert_eq!(k2().pth_root(&k2().t()), None);
        // T + U^2 T^3 ... arbitrary element squared
        let y = f.add(&f.mul(&u, &f.t()), &f.from_int(1));
        assert_eq!(f.pth_root(&f.mul(&y, &y)), Some(y));
        // U itself is not a square in k(U)
        assert_eq!(f.pth_root(&u), None);
    }

    #[test]
    fn inversion_in_tower() {
        let f = sqrt_t();
        let u = f.variable("U").unwrap();
        let x = f.add(&u, &f.t());
        let inv = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &inv), f.one());
    }

    #[test]
    fn reducible_step_reports_zero_divisor() {
        let k = k2();
        // V^2 + 1 = (V + 1)^2 in characteristic 2
        let f = k.extend("V", &[k.one(), k.zero(), k.one()]).unwrap();
        let v = f.variable("V").unwrap();
        let x = f.add(&v, &f.one());
        match f.inv(&x) {
            Err(FieldError::ZeroDivisor { annihilator, .. }) => assert_eq!(annihilator, "V + 1"),
            other => panic!("expected zero divisor, got {other:?}"),
        }
    }

    #[test]
    fn two_level_tower() {
        let f3 = Tower::over(FiniteField::prime(3).unwrap());
        // U^2 = T, then V^2 = U
        let a = f3.extend("U", &[f3.neg(&f3.t()), f3.zero(), f3.one()]).unwrap();
        let u = a.variable("U").unwrap();
        let b = a.extend("V", &[a.neg(&u), a.zero(), a.one()]).unwrap();
        let v = b.variable("V").unwrap();
        assert_eq!(b.pow(&v, 4), b.t());
        let x = b.add(&b.mul(&v, &b.lift(&a, &u).unwrap()), &b.from_int(2));
        assert_eq!(b.frobenius(&x, 1), b.pow(&x, 3));
        assert_eq!(b.frobenius(&x, 2), b.pow(&x, 9));
        assert_eq!(b.mul(&x, &b.inv(&x).unwrap()), b.one());
        assert_eq!(b.pth_root(&b.pow(&x, 3)), Some(x.clone()));
        assert_eq!(b.format(&v), "V");
        assert_eq!(b.format(&b.mul(&u_lift(&a, &b), &v)), "U*V");
    }

    fn u_lift(a: &Tower, b: &Tower) -> TowerElem {
        b.lift(a, &a.variable("U").unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_steps() {
        let k = k2();
        assert!(k.extend("U", &[k.t(), k.one()]).is_err());
        assert!(k.extend("U", &[k.t(), k.zero(), k.t()]).is_err());
        assert!(k.extend("T", &[k.t(), k.zero(), k.one()]).is_err());
    }
}
