//! Truncated exponential `e(z) = Σ E_i z^{(i)}` of a T-module, the formal
//! solution of `e(dΦ(t) z) = Φ(t)(e(z))` with `E_0 = I`.
//!
//! Comparing coefficients of `τ^i` gives the Sylvester equation
//! `E_i a_0^{(i)} - a_0 E_i = Σ_{j=1}^{min(i,d)} a_j E_{i-j}^{(j)}`, uniquely
//! solvable because `a_0` and `a_0^{(i)}` have the disjoint spectra
//! `{θ}` and `{θ^{q^i}}`.

use thiserror::Error;

use crate::field::{Field, FieldError, FunctionField};
use crate::fields::Poly;
use crate::linalg::{self, Matrix};
use crate::ore::{self, OreMatrix};
use crate::subgroups::KernelSubgroup;
use crate::tmodule::TModule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpError {
    #[error("the Sylvester system for E_{0} is singular")]
    SingularSylvester(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSeries<F: Field> {
    module: TModule<F>,
    coeffs: Vec<Matrix<F::Elem>>,
}

/// Solves `X b - a X = rhs` for square `a`, `b`, `rhs` of the same size.
pub fn solve_sylvester<F: Field>(
    f: &F,
    a: &Matrix<F::Elem>,
    b: &Matrix<F::Elem>,
    rhs: &Matrix<F::Elem>,
) -> Result<Option<Matrix<F::Elem>>, FieldError> {
    let m = a.rows();
    let n = m * m;
    // unknown X[r][c] sits at r*m + c; equation (r, c) at r*m + c
    let mut system = linalg::zeros(f, n, n);
    for r in 0..m {
        for c in 0..m {
            let var = r * m + c;
            for c2 in 0..m {
                let eq = r * m + c2;
                let v = f.add(system.get(eq, var), b.get(c, c2));
                system.set(eq, var, v);
            }
            for r2 in 0..m {
                let eq = r2 * m + c;
                let v = f.sub(system.get(eq, var), a.get(r2, r));
                system.set(eq, var, v);
            }
        }
    }
    if linalg::rank(f, &system)? < n {
        return Ok(None);
    }
    let x = linalg::solve(f, &system, rhs.entries())?.expect("full rank system is consistent");
    Ok(Some(Matrix::from_fn(m, m, |r, c| x[r * m + c].clone())))
}

impl<F: FunctionField> ExpSeries<F> {
    /// `E_0, .., E_order`.
    pub fn compute(module: &TModule<F>, order: usize) -> Result<Self, ExpError> {
        let f = module.field();
        let m = module.dimension();
        let a = module.coeffs();
        let mut coeffs = vec![linalg::identity(f, m)];
        for i in 1..=order {
            let mut rhs = linalg::zeros(f, m, m);
            for j in 1..=i.min(a.len() - 1) {
                let term = linalg::mul(f, &a[j], &linalg::twist(f, &coeffs[i - j], j as u32));
                rhs = linalg::add(f, &rhs, &term);
            }
            let twisted_a0 = linalg::twist(f, &a[0], i as u32);
            let e = solve_sylvester(f, &a[0], &twisted_a0, &rhs)?.ok_or(ExpError::SingularSylvester(i))?;
            coeffs.push(e);
        }
        Ok(ExpSeries {
            module: module.clone(),
            coeffs,
        })
    }

    /// A series with given coefficients, for checking candidates.
    pub fn from_coeffs(module: &TModule<F>, coeffs: Vec<Matrix<F::Elem>>) -> Self {
        ExpSeries {
            module: module.clone(),
            coeffs,
        }
    }

    pub fn module(&self) -> &TModule<F> {
        &self.module
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Matrix<F::Elem>] {
        &self.coeffs
    }

    fn as_ore(&self) -> OreMatrix<F::Elem> {
        let m = self.module.dimension();
        OreMatrix::from_coeffs(self.module.field(), m, m, self.coeffs.clone()).expect("square coefficients")
    }

    /// Expands `e ∘ a_0` and `Φ(t) ∘ e` and compares them through `τ^order`.
    pub fn verify_functional_equation(&self) -> bool {
        let f = self.module.field();
        let e = self.as_ore();
        let a0 = OreMatrix::constant(f, self.module.coeffs()[0].clone());
        let lhs = ore::compose(f, &e, &a0).expect("square");
        let rhs = ore::compose(f, self.module.phi(), &e).expect("square");
        let k = self.order();
        lhs.truncate(f, k) == rhs.truncate(f, k)
    }

    /// `Σ_{i ≤ order} E_i z^{(i)}`.
    pub fn evaluate(&self, z: &[F::Elem]) -> Vec<F::Elem> {
        ore::eval(self.module.field(), &self.as_ore(), z).expect("point dimension matches")
    }

    /// Truncated check that `e(Lie(B)) ⊆ B` for a subgroup cut out by
    /// vanishing coordinates: every `E_i` must map the free coordinates to
    /// zero in the fixed ones.
    pub fn restriction_check(&self, subgroup: &KernelSubgroup<F>, a: &Poly) -> RestrictionCheck {
        let f = self.module.field();
        match subgroup.tangent_stability(a) {
            Ok(true) => {}
            _ => return RestrictionCheck::Unchecked("the differential does not preserve the tangent space".into()),
        }
        if !differential_is_scalar_on_lie(subgroup, a) {
            return RestrictionCheck::Unchecked("the differential is not scalar on the tangent space".into());
        }
        let Some(shape) = subgroup.coordinate_shape() else {
            return RestrictionCheck::Unchecked("the subgroup is not cut out by vanishing coordinates".into());
        };
        for (i, e) in self.coeffs.iter().enumerate() {
            for &r in &shape.fixed {
                for &c in &shape.free {
                    if !f.is_zero(e.get(r, c)) {
                        return RestrictionCheck::Fails { i, row: r, col: c };
                    }
                }
            }
        }
        RestrictionCheck::Holds {
            fixed: shape.fixed,
            free: shape.free,
        }
    }
}

fn differential_is_scalar_on_lie<F: FunctionField>(subgroup: &KernelSubgroup<F>, a: &Poly) -> bool {
    let module = subgroup.module();
    let f = module.field();
    let d = module.differential(a);
    let dp = subgroup.presentation().coeff(f, 0);
    let basis = if linalg::is_zero(f, &dp) {
        (0..module.dimension())
            .map(|i| {
                (0..module.dimension())
                    .map(|j| if i == j { f.one() } else { f.zero() })
                    .collect()
            })
            .collect()
    } else {
        match linalg::kernel(f, &dp) {
            Ok(b) => b,
            Err(_) => return false,
        }
    };
    let mut lambda: Option<F::Elem> = None;
    for v in &basis {
        let image = linalg::mul_vec(f, &d, v);
        let k = v.iter().position(|x| !f.is_zero(x)).expect("basis vectors are nonzero");
        let l = match f.div(&image[k], &v[k]) {
            Ok(l) => l,
            Err(_) => return false,
        };
        if lambda.as_ref().is_some_and(|x| *x != l) {
            return false;
        }
        if image.iter().zip(v).any(|(y, x)| *y != f.mul(&l, x)) {
            return false;
        }
        lambda = Some(l);
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RestrictionCheck {
    /// `(E_i)_{fixed, free} = 0` for every computed `i`.
    Holds {
        fixed: Vec<usize>,
        free: Vec<usize>,
    },
    Fails {
        i: usize,
        row: usize,
        col: usize,
    },
    Unchecked(String),
}

impl RestrictionCheck {
    pub fn holds(&self) -> bool {
        matches!(self, RestrictionCheck::Holds { .. })
    }
}
