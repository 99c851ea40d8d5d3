//! Torsion points: certification, minimal annihilators, kernels of
//! `c_0 x + c_1 x^q`, and the square-root curve in `C × C_(2)`.
//!
//! `C_(2)` is the Drinfeld module `T + (T^{1/2} + T) τ + τ^2` over `q = 2`.
//! It satisfies `τ ∘ C_(2)(T) = C(T^2) ∘ τ`, so `z ↦ (z, √z)` sends Carlitz
//! torsion to torsion of `C × C_(2)`, all lying on the curve `x = y^2`.

use thiserror::Error;

use crate::field::{Field, FieldError, FrobeniusField, FunctionField};
use crate::fields::{Poly, Tower, TowerElem};
use crate::linalg;
use crate::ore::{self, OreError, OreMatrix, OrePoly};
use crate::subgroups::KernelSubgroup;
use crate::tmodule::{self, ModuleError, TModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error("the zero polynomial is not an annihilator")]
    ZeroAnnihilator,
    #[error("the coefficient of x^q must be nonzero")]
    ZeroLeading,
    #[error("point has {got} coordinates, the module has dimension {expected}")]
    Shape { expected: usize, got: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("{0} has no square root in this tower; adjoin one, e.g. U with U^2 = T")]
    MissingRoot(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `Φ(a)(v) = 0`, with the iterates `Φ(t^k)(v)` that reproduce it.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionCertificate<E> {
    pub point: Vec<E>,
    pub annihilator: Poly,
    /// `Φ(t^k)(v)` for `k = 0..=deg a`, rendered.
    pub transcript: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorsionVerdict<E> {
    Certified(TorsionCertificate<E>),
    /// `Φ(a)(v)`, which is nonzero.
    Refuted(Vec<E>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrderSearch<E> {
    Found(TorsionCertificate<E>),
    NoneUpTo(usize),
}

fn render_point<F: Field>(f: &F, v: &[F::Elem]) -> String {
    let parts: Vec<String> = v.iter().map(|x| f.format(x)).collect();
    format!("({})", parts.join(", "))
}

fn check_dimension<F: FunctionField>(module: &TModule<F>, v: &[F::Elem]) -> Result<(), TorsionError> {
    if v.len() != module.dimension() {
        return Err(TorsionError::Shape {
            expected: module.dimension(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `v, Φ(t)(v), .., Φ(t^count)(v)`.
fn iterates<F: FunctionField>(module: &TModule<F>, v: &[F::Elem], count: usize) -> Vec<Vec<F::Elem>> {
    let mut out = vec![v.to_vec()];
    for _ in 0..count {
        let next = ore::eval(module.field(), module.phi(), out.last().unwrap()).expect("dimension checked");
        out.push(next);
    }
    out
}

/// `Σ a_k x_k`.
fn combine<F: FunctionField>(f: &F, a: &Poly, xs: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let mut acc = vec![f.zero(); xs[0].len()];
    for (c, x) in a.coeffs().iter().zip(xs) {
        let c = f.from_fq(*c);
        for (s, y) in acc.iter_mut().zip(x) {
            *s = f.add(s, &f.mul(&c, y));
        }
    }
    acc
}

fn certificate<F: FunctionField>(
    module: &TModule<F>,
    v: &[F::Elem],
    a: &Poly,
    xs: &[Vec<F::Elem>],
) -> TorsionCertificate<F::Elem> {
    let f = module.field();
    TorsionCertificate {
        point: v.to_vec(),
        annihilator: a.clone(),
        transcript: xs[..=a.degree().unwrap_or(0)]
            .iter()
            .map(|x| render_point(f, x))
            .collect(),
    }
}

/// Evaluates `Φ(a)(v)`; certifies torsion when it vanishes.
pub fn is_torsion<F: FunctionField>(
    module: &TModule<F>,
    v: &[F::Elem],
    a: &Poly,
) -> Result<TorsionVerdict<F::Elem>, TorsionError> {
    if a.is_zero() {
        return Err(TorsionError::ZeroAnnihilator);
    }
    check_dimension(module, v)?;
    let f = module.field();
    let value = ore::eval(f, &module.act(a), v)?;
    if !value.iter().all(|x| f.is_zero(x)) {
        return Ok(TorsionVerdict::Refuted(value));
    }
    let xs = iterates(module, v, a.degree().unwrap_or(0));
    assert!(
        combine(f, a, &xs).iter().all(|x| f.is_zero(x)),
        "iterate expansion disagrees with the composed action"
    );
    Ok(TorsionVerdict::Certified(certificate(module, v, a, &xs)))
}

/// Recomputes the iterates from scratch and checks both the rendered
/// transcript and `Σ a_k Φ(t^k)(v) = 0`.
pub fn verify_transcript<F: FunctionField>(module: &TModule<F>, cert: &TorsionCertificate<F::Elem>) -> bool {
    let f = module.field();
    if cert.annihilator.is_zero() || cert.point.len() != module.dimension() {
        return false;
    }
    let xs = iterates(module, &cert.point, cert.annihilator.degree().unwrap_or(0));
    let rendered: Vec<String> = xs.iter().map(|x| render_point(f, x)).collect();
    rendered == cert.transcript && combine(f, &cert.annihilator, &xs).iter().all(|x| f.is_zero(x))
}

/// The monic annihilator of least degree `≤ max_degree`.
///
/// Candidates are tried by degree, then by their coefficient digits
/// `(c_{d-1}, .., c_0)` in increasing order. Annihilators form an ideal,
/// so the first hit is its monic generator.
pub fn torsion_order_search<F: FunctionField>(
    module: &TModule<F>,
    v: &[F::Elem],
    max_degree: usize,
) -> Result<OrderSearch<F::Elem>, TorsionError> {
    check_dimension(module, v)?;
    let f = module.field();
    let fq = module.fq();
    let q = fq.order() as u64;
    let xs = iterates(module, v, max_degree);
    for d in 0..=max_degree {
        for code in 0..q.pow(d as u32) {
            let mut coeffs = vec![fq.zero(); d + 1];
            let mut rest = code;
            for c in coeffs[..d].iter_mut() {
                *c = fq.element((rest % q) as u32);
                rest /= q;
            }
            coeffs[d] = fq.one();
            let a = Poly::from_coeffs(coeffs);
            if combine(f, &a, &xs).iter().all(|x| f.is_zero(x)) {
                return Ok(OrderSearch::Found(certificate(module, v, &a, &xs)));
            }
        }
    }
    Ok(OrderSearch::NoneUpTo(max_degree))
}

/// Kernel of `x ↦ c_0 x + c_1 x^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Degree1Kernel {
    pub tower: Tower,
    /// `θ` with `θ^{q-1} = -c_0/c_1`; absent when `c_0 = 0`.
    pub theta: Option<TowerElem>,
    /// `c θ` for every `c ∈ F_q`, each verified by evaluation.
    pub elements: Vec<TowerElem>,
}

/// Computes the kernel, adjoining `name` with `name^{q-1} = -c_0/c_1` when
/// `q > 2`; for `q = 2`, `θ = -c_0/c_1` already lies in the tower.
pub fn degree1_kernel(
    tower: &Tower,
    c0: &TowerElem,
    c1: &TowerElem,
    name: &str,
) -> Result<Degree1Kernel, TorsionError> {
    if tower.is_zero(c1) {
        return Err(TorsionError::ZeroLeading);
    }
    if tower.is_zero(c0) {
        return Ok(Degree1Kernel {
            tower: tower.clone(),
            theta: None,
            elements: vec![tower.zero()],
        });
    }
    let r = tower.neg(&tower.div(c0, c1)?);
    let q = tower.q() as usize;
    let (ext, theta) = if q == 2 {
        (tower.clone(), r)
    } else {
        let mut defining = vec![tower.zero(); q];
        defining[0] = tower.neg(&r);
        defining[q - 1] = tower.one();
        let ext = tower.extend(name, &defining)?;
        let theta = ext.variable(name).expect("just adjoined");
        (ext, theta)
    };
    let c0 = ext.lift(tower, c0)?;
    let c1 = ext.lift(tower, c1)?;
    let elements: Vec<TowerElem> = tower
        .fq()
        .elements()
        .map(|c| ext.mul(&ext.from_fq(c), &theta))
        .collect();
    for x in &elements {
        let value = ext.add(&ext.mul(&c0, x), &ext.mul(&c1, &ext.frobenius(x, 1)));
        assert!(ext.is_zero(&value), "kernel element failed evaluation");
    }
    Ok(Degree1Kernel {
        tower: ext,
        theta: Some(theta),
        elements,
    })
}

fn require_char_two(tower: &Tower) -> Result<(), TorsionError> {
    if tower.q() != 2 {
        return Err(TorsionError::Unsupported(
            "the square-root construction needs q = 2".into(),
        ));
    }
    Ok(())
}

fn sqrt_t(tower: &Tower) -> Result<TowerElem, TorsionError> {
    tower
        .pth_root(&tower.t())
        .ok_or_else(|| TorsionError::MissingRoot("T".into()))
}

/// `C_(2)(T) = T + (T^{1/2} + T) τ + τ^2`.
pub fn half_carlitz(tower: &Tower) -> Result<TModule<Tower>, TorsionError> {
    require_char_two(tower)?;
    let root = sqrt_t(tower)?;
    let t = tower.t();
    Ok(tmodule::drinfeld(tower.clone(), &[tower.add(&root, &t), tower.one()])?)
}

/// `C × C_(2)`.
pub fn root_curve_module(tower: &Tower) -> Result<TModule<Tower>, TorsionError> {
    let c = tmodule::carlitz(tower.clone());
    Ok(tmodule::product(&[c, half_carlitz(tower)?])?)
}

/// The curve `x = y^2` as the kernel of `[1, -τ]` in `C × C_(2)`.
pub fn root_curve(tower: &Tower) -> Result<KernelSubgroup<Tower>, TorsionError> {
    let module = root_curve_module(tower)?;
    let row = vec![
        OrePoly::constant(tower, tower.one()),
        OrePoly::from_coeffs(tower, vec![tower.zero(), tower.neg(&tower.one())]),
    ];
    let p = OreMatrix::from_entries(tower, &[row])?;
    KernelSubgroup::new(module, p).map_err(|e| TorsionError::Unsupported(e.to_string()))
}

/// `τ ∘ C_(2)(T) = C(T^2) ∘ τ`, checked by expansion.
pub fn root_identity_holds(tower: &Tower) -> Result<bool, TorsionError> {
    let half = half_carlitz(tower)?;
    let carlitz = tmodule::carlitz(tower.clone());
    let tau = OreMatrix::from_coeffs(
        tower,
        1,
        1,
        vec![linalg::zeros(tower, 1, 1), linalg::identity(tower, 1)],
    )?;
    let t2 = Poly::monomial(tower.fq().one(), 2);
    let lhs = ore::compose(tower, &tau, half.phi())?;
    let rhs = ore::compose(tower, &carlitz.act(&t2), &tau)?;
    Ok(lhs == rhs)
}

/// `C_(2)(T)(√z) = √(C(T^2)(z))` for a square `z`, by evaluation.
pub fn root_identity_at(tower: &Tower, z: &TowerElem) -> Result<bool, TorsionError> {
    let root = tower
        .pth_root(z)
        .ok_or_else(|| TorsionError::MissingRoot(tower.format(z)))?;
    let half = half_carlitz(tower)?;
    let carlitz = tmodule::carlitz(tower.clone());
    let t2 = Poly::monomial(tower.fq().one(), 2);
    let lhs = ore::eval(tower, half.phi(), &[root])?;
    let inner = ore::eval(tower, &carlitz.act(&t2), std::slice::from_ref(z))?;
    let rhs = tower
        .pth_root(&inner[0])
        .ok_or_else(|| TorsionError::MissingRoot(tower.format(&inner[0])))?;
    Ok(lhs[0] == rhs)
}

/// The point `(z, √z)` of `C × C_(2)` with its curve membership and the
/// minimal annihilator found up to `max_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCurvePoint {
    pub point: Vec<TowerElem>,
    pub on_curve: bool,
    pub order: OrderSearch<TowerElem>,
}

pub fn root_curve_point(tower: &Tower, z: &TowerElem, max_degree: usize) -> Result<RootCurvePoint, TorsionError> {
    let root = tower
        .pth_root(z)
        .ok_or_else(|| TorsionError::MissingRoot(tower.format(z)))?;
    let curve = root_curve(tower)?;
    let point = vec![z.clone(), root];
    let on_curve = curve
        .contains(&point)
        .map_err(|e| TorsionError::Unsupported(e.to_string()))?;
    let order = torsion_order_search(curve.module(), &point, max_degree)?;
    Ok(RootCurvePoint { point, on_curve, order })
}

/// The tower `k(U)` with `U^2 = T` over `F_2`.
pub fn sqrt_t_tower(name: &str) -> Result<Tower, TorsionError> {
    let k = Tower::over(crate::fields::FiniteField::prime(2)?);
    let minus_t = k.neg(&k.t());
    Ok(k.extend(name, &[minus_t, k.zero(), k.one()])?)
}

/// `Φ(a)` applied to a point, as a convenience for callers holding a
/// polynomial in `T` rather than in the module variable.
pub fn apply<F: FunctionField>(module: &TModule<F>, a: &Poly, v: &[F::Elem]) -> Result<Vec<F::Elem>, TorsionError> {
    check_dimension(module, v)?;
    Ok(ore::eval(module.field(), &module.act(a), v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FiniteField;

    fn k(p: u32) -> Tower {
        Tower::over(FiniteField::prime(p).unwrap())
    }

    #[test]
    fn carlitz_torsion_at_t() {
        let f = k(2);
        let c = tmodule::carlitz(f.clone());
        match is_torsion(&c, &[f.t()], &Poly::t()).unwrap() {
            TorsionVerdict::Certified(cert) => assert!(verify_transcript(&c, &cert)),
            other => panic!("expected certificate, got {other:?}"),
        }
        assert!(matches!(
            is_torsion(&c, &[f.one()], &Poly::t()).unwrap(),
            TorsionVerdict::Refuted(_)
        ));
        assert!(matches!(
            is_torsion(&c, &[f.zero()], &Poly::t()).unwrap(),
            TorsionVerdict::Certified(_)
        ));
        assert_eq!(
            is_torsion(&c, &[f.t()], &Poly::zero()),
            Err(TorsionError::ZeroAnnihilator)
        );
    }

    #[test]
    fn order_search() {
        let f = k(2);
        let c = tmodule::carlitz(f.clone());
        match torsion_order_search(&c, &[f.t()], 3).unwrap() {
            OrderSearch::Found(cert) => assert_eq!(cert.annihilator, Poly::t()),
            other => panic!("{other:?}"),
        }
        // over F_2 the point 1 is killed by T^2 + T: C(T)(1) = T + 1, C(T + 1)(1) = T
        match torsion_order_search(&c, &[f.one()], 3).unwrap() {
            OrderSearch::Found(cert) => assert_eq!(
                cert.annihilator,
                Poly::from_coeffs(vec![f.fq().zero(), f.fq().one(), f.fq().one()])
            ),
            other => panic!("{other:?}"),
        }
        let g = k(3);
        let c3 = tmodule::carlitz(g.clone());
        assert_eq!(
            torsion_order_search(&c3, &[g.one()], 3).unwrap(),
            OrderSearch::NoneUpTo(3)
        );
    }

    #[test]
    fn degree_one_kernels() {
        let f = k(2);
        let ker = degree1_kernel(&f, &f.t(), &f.one(), "W").unwrap();
        assert_eq!(ker.theta, Some(f.t()));
        assert_eq!(ker.tower.height(), 0);
        assert_eq!(ker.elements.len(), 2);
        let g = k(3);
        let ker = degree1_kernel(&g, &g.t(), &g.one(), "W").unwrap();
        let theta = ker.theta.clone().unwrap();
        assert_eq!(ker.tower.mul(&theta, &theta), ker.tower.neg(&ker.tower.t()));
        assert_eq!(ker.elements.len(), 3);
        let zero = degree1_kernel(&g, &g.zero(), &g.one(), "W").unwrap();
        assert_eq!(zero.elements, vec![g.zero()]);
        assert_eq!(
            degree1_kernel(&g, &g.t(), &g.zero(), "W").err(),
            Some(TorsionError::ZeroLeading)
        );
    }

    #[test]
    fn root_curve_family() {
        let tower = sqrt_t_tower("U").unwrap();
        assert!(root_identity_holds(&tower).unwrap());
        let pt = root_curve_point(&tower, &tower.t(), 3).unwrap();
        assert!(pt.on_curve);
        assert!(matches!(pt.order, OrderSearch::Found(ref c) if c.annihilator == Poly::t()));
        let zero = root_curve_point(&tower, &tower.zero(), 3).unwrap();
        assert!(matches!(zero.order, OrderSearch::Found(ref c) if c.annihilator == Poly::one()));
        assert!(matches!(half_carlitz(&k(2)), Err(TorsionError::MissingRoot(_))));
    }
}
