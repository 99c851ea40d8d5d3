//! Anderson T-modules: `G_a^m` with `Φ(t) = a_0 + a_1 τ + .. + a_d τ^d`,
//! `a_0 = θ I + N`, `N` nilpotent.
//!
//! `θ` is the image of the module variable `t` in `A = F_q[T]`. It is `T`
//! for modules built from a definition, and `a(T)` after restricting the
//! action to the subring `F_q[a(T)]`.

use thiserror::Error;

use crate::field::{Field, FunctionField};
use crate::fields::{FiniteField, Poly, PolyRing};
use crate::linalg::{self, Matrix};
use crate::ore::{self, OreError, OreMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("a_0 - {parameter}*I is not nilpotent")]
    NotNilpotent { parameter: String },
    #[error("the leading coefficient matrix is zero")]
    ZeroLeading,
    #[error("modules are defined over different fields")]
    FieldMismatch,
    #[error("malformed module: {0}")]
    Malformed(String),
    #[error(transparent)]
    Ore(#[from] OreError),
}

/// A validated T-module.
#[derive(Clone, Debug, PartialEq)]
pub struct TModule<F: Field> {
    field: F,
    phi: OreMatrix<F::Elem>,
    parameter: Poly,
    nilpotency: usize,
}

/// Summary returned by validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub dimension: usize,
    pub degree: usize,
    pub nilpotency_order: usize,
}

/// The exponent `j(A)` for which `dΦ(t^j)` is scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JBound {
    pub nilpotency_order: usize,
    pub p: u32,
    /// Smallest `r` with `p^r ≥ n(A)`.
    pub r: u32,
    pub j: u64,
    /// `p^(floor(log_p n(A)) + 1)`, which exceeds `j` when `n(A)` is a power of `p`.
    pub log_formula_j: u64,
    /// `dΦ(t^j) = θ^j I` was recomputed and holds.
    pub differential_is_scalar: bool,
}

fn nilpotency_order<F: Field>(f: &F, n: &Matrix<F::Elem>) -> Option<usize> {
    let mut power = n.clone();
    for k in 1..=n.rows().max(1) {
        if linalg::is_zero(f, &power) {
            return Some(k);
        }
        power = linalg::mul(f, &power, n);
    }
    None
}

impl<F: FunctionField> TModule<F> {
    /// A T-module from `a_0, .., a_d` (module variable mapped to `T`).
    pub fn new(field: F, coeffs: Vec<Matrix<F::Elem>>) -> Result<Self, ModuleError> {
        Self::with_parameter(field, coeffs, Poly::t())
    }

    /// A module whose variable acts through `a_0 = θ I + N` with `θ = parameter`.
    pub fn with_parameter(field: F, coeffs: Vec<Matrix<F::Elem>>, parameter: Poly) -> Result<Self, ModuleError> {
        let m = coeffs.first().map_or(0, Matrix::rows);
        if m == 0 {
            return Err(ModuleError::Malformed("no coefficient matrices".into()));
        }
        if coeffs.iter().any(|c| c.rows() != m || c.cols() != m) {
            return Err(ModuleError::Malformed(format!("coefficients must all be {m}x{m}")));
        }
        if coeffs.len() > 1 && linalg::is_zero(&field, coeffs.last().unwrap()) {
            return Err(ModuleError::ZeroLeading);
        }
        let ring = PolyRing::new(field.fq().clone());
        if parameter.is_constant() {
            return Err(ModuleError::Malformed(
                "the module variable must map to a nonconstant polynomial".into(),
            ));
        }
        let theta = field.from_poly(&parameter);
        let n = linalg::sub(&field, &coeffs[0], &linalg::scalar(&field, m, &theta));
        let nilpotency = nilpotency_order(&field, &n).ok_or_else(|| ModuleError::NotNilpotent {
            parameter: ring.format(&parameter),
        })?;
        if coeffs.len() < 2 {
            return Err(ModuleError::Malformed("Φ(t) must have positive τ-degree".into()));
        }
        let phi = OreMatrix::from_coeffs(&field, m, m, coeffs)?;
        Ok(TModule {
            field,
            phi,
            parameter,
            nilpotency,
        })
    }

    pub fn validate(&self) -> ValidityReport {
        ValidityReport {
            dimension: self.dimension(),
            degree: self.degree(),
            nilpotency_order: self.nilpotency,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn fq(&self) -> &FiniteField {
        self.field.fq()
    }

    pub fn dimension(&self) -> usize {
        self.phi.rows()
    }

    /// `τ`-degree `d` of `Φ(t)`.
    pub fn degree(&self) -> usize {
        self.phi.degree().unwrap_or(0)
    }

    /// The coefficient matrices `a_0, .., a_d`.
    pub fn coeffs(&self) -> &[Matrix<F::Elem>] {
        self.phi.coeffs()
    }

    /// `Φ(t)` as a twisted polynomial matrix.
    pub fn phi(&self) -> &OreMatrix<F::Elem> {
        &self.phi
    }

    /// The image `θ ∈ A` of the module variable.
    pub fn parameter(&self) -> &Poly {
        &self.parameter
    }

    /// `N = a_0 - θ I`.
    pub fn nilpotent_part(&self) -> Matrix<F::Elem> {
        let theta = self.field.from_poly(&self.parameter);
        linalg::sub(
            &self.field,
            &self.coeffs()[0],
            &linalg::scalar(&self.field, self.dimension(), &theta),
        )
    }

    /// Least `n` with `N^n = 0`.
    pub fn nilpotency_order(&self) -> usize {
        self.nilpotency
    }

    /// `Φ(a)` for `a` a polynomial in the module variable, by Horner's rule.
    pub fn act(&self, a: &Poly) -> OreMatrix<F::Elem> {
        let f = &self.field;
        let m = self.dimension();
        let mut acc = OreMatrix::zero(m, m);
        for c in a.coeffs().iter().rev() {
            acc = ore::compose(f, &self.phi, &acc).expect("square");
            let shift = OreMatrix::constant(f, linalg::scalar(f, m, &f.from_fq(*c)));
            acc = ore::add(f, &acc, &shift).expect("square");
        }
        acc
    }

    /// `Φ(t), Φ(t^2), .., Φ(t^count)`.
    pub fn powers(&self, count: usize) -> Vec<OreMatrix<F::Elem>> {
        let mut out: Vec<OreMatrix<F::Elem>> = Vec::with_capacity(count);
        for _ in 0..count {
            let next = match out.last() {
                None => self.phi.clone(),
                Some(prev) => ore::compose(&self.field, &self.phi, prev).expect("square"),
            };
            out.push(next);
        }
        out
    }

    /// `dΦ(a) = a(a_0)`.
    pub fn differential(&self, a: &Poly) -> Matrix<F::Elem> {
        let f = &self.field;
        let m = self.dimension();
        let a0 = &self.coeffs()[0];
        let mut acc = linalg::zeros(f, m, m);
        for c in a.coeffs().iter().rev() {
            acc = linalg::mul(f, &acc, a0);
            acc = linalg::add(f, &acc, &linalg::scalar(f, m, &f.from_fq(*c)));
        }
        acc
    }

    pub fn j_bound(&self) -> JBound {
        let n = self.nilpotency as u64;
        let p = self.fq().p();
        let (mut r, mut j) = (0u32, 1u64);
        while j < n {
            r += 1;
            j *= p as u64;
        }
        let mut log_formula_j = p as u64;
        while log_formula_j <= n {
            log_formula_j *= p as u64;
        }
        let ring = PolyRing::new(self.fq().clone());
        let t_j = Poly::monomial(self.fq().one(), j as usize);
        let theta_j = self.field.from_poly(&ring.pow(&self.parameter, j));
        let differential_is_scalar = self.differential(&t_j) == linalg::scalar(&self.field, self.dimension(), &theta_j);
        JBound {
            nilpotency_order: self.nilpotency,
            p,
            r,
            j,
            log_formula_j,
            differential_is_scalar,
        }
    }

    /// The same module viewed over `F_q[a(T)]`: `Ψ(t) = Φ(a)`.
    pub fn restrict(&self, a: &Poly) -> Result<Self, ModuleError> {
        let ring = PolyRing::new(self.fq().clone());
        let parameter = ring.compose(a, &self.parameter);
        let phi = self.act(a);
        Self::with_parameter(self.field.clone(), phi.coeffs().to_vec(), parameter)
    }

    /// Conjugates by the coordinate permutation `x_i -> x_{perm[i]}`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, ModuleError> {
        let m = self.dimension();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&i| i >= m || std::mem::replace(&mut seen[i], true)) {
            return Err(ModuleError::Malformed("not a permutation".into()));
        }
        let coeffs = self
            .coeffs()
            .iter()
            .map(|a| Matrix::from_fn(m, m, |r, c| a.get(perm[r], perm[c]).clone()))
            .collect();
        Self::with_parameter(self.field.clone(), coeffs, self.parameter.clone())
    }
}

/// The Carlitz module `Φ(T) = T + τ`.
pub fn carlitz<F: FunctionField>(field: F) -> TModule<F> {
    let coeffs = vec![linalg::scalar(&field, 1, &field.t()), linalg::identity(&field, 1)];
    TModule::new(field, coeffs).expect("Carlitz module is valid")
}

/// The Drinfeld module `Φ(T) = T + c_1 τ + .. + c_d τ^d`.
pub fn drinfeld<F: FunctionField>(field: F, higher: &[F::Elem]) -> Result<TModule<F>, ModuleError> {
    let mut coeffs = vec![linalg::scalar(&field, 1, &field.t())];
    coeffs.extend(higher.iter().map(|c| linalg::scalar(&field, 1, c)));
    TModule::new(field, coeffs)
}

/// The `n`-th tensor power of the Carlitz module: `a_0 = T I + N` with ones
/// on the superdiagonal, `a_1` a single one in the lower-left corner.
pub fn carlitz_tensor<F: FunctionField>(field: F, n: usize) -> Result<TModule<F>, ModuleError> {
    if n == 0 {
        return Err(ModuleError::Malformed("tensor power must be at least 1".into()));
    }
    let t = field.t();
    let a0 = Matrix::from_fn(n, n, |r, c| {
        if r == c {
            t.clone()
        } else if c == r + 1 {
            field.one()
        } else {
            field.zero()
        }
    });
    let a1 = Matrix::from_fn(n, n, |r, c| {
        if r == n - 1 && c == 0 {
            field.one()
        } else {
            field.zero()
        }
    });
    TModule::new(field, vec![a0, a1])
}

/// Block-diagonal product; its degree is the largest factor degree.
pub fn product<F: FunctionField>(factors: &[TModule<F>]) -> Result<TModule<F>, ModuleError> {
    let first = factors
        .first()
        .ok_or_else(|| ModuleError::Malformed("empty product".into()))?;
    let field = first.field.clone();
    if factors.iter().any(|m| m.field != field) {
        return Err(ModuleError::FieldMismatch);
    }
    if factors.iter().any(|m| m.parameter != first.parameter) {
        return Err(ModuleError::Malformed(
            "factors act through different parameters".into(),
        ));
    }
    let d = factors.iter().map(TModule::degree).max().unwrap();
    let coeffs = (0..=d)
        .map(|i| {
            let blocks: Vec<_> = factors.iter().map(|m| m.phi.coeff(&field, i)).collect();
            linalg::block_diagonal(&field, &blocks)
        })
        .collect();
    TModule::with_parameter(field, coeffs, first.parameter.clone())
}

/// The diagonal power `D^n`.
pub fn power<F: FunctionField>(module: &TModule<F>, n: usize) -> Result<TModule<F>, ModuleError> {
    product(&vec![module.clone(); n])
}
