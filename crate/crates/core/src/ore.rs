//! Twisted polynomials `Σ c_i τ^i` with `τ c = c^q τ`, with scalar and
//! matrix coefficients.
//!
//! Composition `f ∘ g` means "apply `g`, then `f`", so that
//! `Φ(ab) = Φ(a) ∘ Φ(b)`; on coefficients
//! `(A τ^i) ∘ (B τ^j) = A B^{(i)} τ^{i+j}`.

use thiserror::Error;

use crate::field::{Field, FieldError, FrobeniusField};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OreError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("leading coefficient of the divisor is not invertible")]
    SingularLeading,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A scalar twisted polynomial, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct OrePoly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone> OrePoly<E> {
    pub fn zero() -> Self {
        OrePoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs<F: Field<Elem = E>>(f: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        OrePoly { coeffs }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::from_coeffs(f, vec![c])
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeff<F: Field<Elem = E>>(&self, f: &F, i: usize) -> E {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }
}

/// An `s × m` matrix with twisted-polynomial entries, stored as the list of
/// its `τ`-coefficient matrices with trailing zero matrices trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OreMatrix<E> {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix<E>>,
}

impl<E: Clone> OreMatrix<E> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        OreMatrix {
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    pub fn from_coeffs<F: Field<Elem = E>>(
        f: &F,
        rows: usize,
        cols: usize,
        mut coeffs: Vec<Matrix<E>>,
    ) -> Result<Self, OreError> {
        if let Some(bad) = coeffs.iter().find(|c| c.rows() != rows || c.cols() != cols) {
            return Err(OreError::ShapeMismatch(format!(
                "coefficient is {}x{}, expected {rows}x{cols}",
                bad.rows(),
                bad.cols()
            )));
        }
        while coeffs.last().is_some_and(|c| linalg::is_zero(f, c)) {
            coeffs.pop();
        }
        Ok(OreMatrix { rows, cols, coeffs })
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, m: Matrix<E>) -> Self {
        let (r, c) = (m.rows(), m.cols());
        Self::from_coeffs(f, r, c, vec![m]).expect("shape is consistent")
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        Self::constant(f, linalg::identity(f, n))
    }

    /// Builds a matrix from scalar twisted polynomials, row-major.
    pub fn from_entries<F: Field<Elem = E>>(f: &F, entries: &[Vec<OrePoly<E>>]) -> Result<Self, OreError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(OreError::ShapeMismatch("ragged rows".into()));
        }
        let len = entries.iter().flatten().map(|e| e.coeffs.len()).max().unwrap_or(0);
        let coeffs = (0..len)
            .map(|i| Matrix::from_fn(rows, cols, |r, c| entries[r][c].coeff(f, i)))
            .collect();
        Self::from_coeffs(f, rows, cols, coeffs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coeffs(&self) -> &[Matrix<E>] {
        &self.coeffs
    }

    /// The coefficient of `τ^i` (zero beyond the degree).
    pub fn coeff<F: Field<Elem = E>>(&self, f: &F, i: usize) -> Matrix<E> {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| linalg::zeros(f, self.rows, self.cols))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Matrix<E>> {
        self.coeffs.last()
    }

    pub fn entry<F: Field<Elem = E>>(&self, f: &F, r: usize, c: usize) -> OrePoly<E> {
        OrePoly::from_coeffs(f, self.coeffs.iter().map(|m| m.get(r, c).clone()).collect())
    }

    /// The sub-matrix made of the given rows and columns.
    pub fn select<F: Field<Elem = E>>(&self, f: &F, rows: &[usize], cols: &[usize]) -> Self {
        let coeffs = self.coeffs.iter().map(|m| m.select(rows, cols)).collect();
        Self::from_coeffs(f, rows.len(), cols.len(), coeffs).expect("shape is consistent")
    }

    /// Drops every coefficient of `τ`-degree above `k`.
    pub fn truncate<F: Field<Elem = E>>(&self, f: &F, k: usize) -> Self {
        let coeffs = self.coeffs.iter().take(k + 1).cloned().collect();
        Self::from_coeffs(f, self.rows, self.cols, coeffs).expect("shape is consistent")
    }
}

fn check_same_shape<E>(a: &OreMatrix<E>, b: &OreMatrix<E>) -> Result<(), OreError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(OreError::ShapeMismatch(format!(
            "{}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

pub fn add<F: Field>(f: &F, a: &OreMatrix<F::Elem>, b: &OreMatrix<F::Elem>) -> Result<OreMatrix<F::Elem>, OreError> {
    check_same_shape(a, b)?;
    let n = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..n)
        .map(|i| match (a.coeffs.get(i), b.coeffs.get(i)) {
            (Some(x), Some(y)) => linalg::add(f, x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    OreMatrix::from_coeffs(f, a.rows, a.cols, coeffs)
}

pub fn neg<F: Field>(f: &F, a: &OreMatrix<F::Elem>) -> OreMatrix<F::Elem> {
    OreMatrix {
        rows: a.rows,
        cols: a.cols,
        coeffs: a.coeffs.iter().map(|m| linalg::neg(f, m)).collect(),
    }
}

pub fn sub<F: Field>(f: &F, a: &OreMatrix<F::Elem>, b: &OreMatrix<F::Elem>) -> Result<OreMatrix<F::Elem>, OreError> {
    add(f, a, &neg(f, b))
}

/// Left multiplication of every coefficient by a constant matrix.
pub fn scale<F: Field>(f: &F, c: &Matrix<F::Elem>, a: &OreMatrix<F::Elem>) -> Result<OreMatrix<F::Elem>, OreError> {
    if c.cols() != a.rows {
        return Err(OreError::ShapeMismatch("scalar matrix does not fit".into()));
    }
    let coeffs = a.coeffs.iter().map(|m| linalg::mul(f, c, m)).collect();
    OreMatrix::from_coeffs(f, c.rows(), a.cols, coeffs)
}

/// `f ∘ g`: the coefficient of `τ^n` is `Σ_{i+j=n} A_i B_j^{(i)}`.
pub fn compose<F: FrobeniusField>(
    f: &F,
    a: &OreMatrix<F::Elem>,
    b: &OreMatrix<F::Elem>,
) -> Result<OreMatrix<F::Elem>, OreError> {
    if a.cols != b.rows {
        return Err(OreError::ShapeMismatch(format!(
            "cannot compose {}x{} with {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    if a.is_zero() || b.is_zero() {
        return Ok(OreMatrix::zero(a.rows, b.cols));
    }
    let mut out = vec![linalg::zeros(f, a.rows, b.cols); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, ai) in a.coeffs.iter().enumerate() {
        if linalg::is_zero(f, ai) {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            if linalg::is_zero(f, bj) {
                continue;
            }
            let term = linalg::mul(f, ai, &linalg::twist(f, bj, i as u32));
            out[i + j] = linalg::add(f, &out[i + j], &term);
        }
    }
    OreMatrix::from_coeffs(f, a.rows, b.cols, out)
}

/// The additive map `v ↦ Σ A_i v^{(i)}`.
pub fn eval<F: FrobeniusField>(f: &F, a: &OreMatrix<F::Elem>, v: &[F::Elem]) -> Result<Vec<F::Elem>, OreError> {
    if v.len() != a.cols {
        return Err(OreError::ShapeMismatch(format!(
            "point has {} coordinates, map expects {}",
            v.len(),
            a.cols
        )));
    }
    let mut out = vec![f.zero(); a.rows];
    let mut twisted = v.to_vec();
    for (i, ai) in a.coeffs.iter().enumerate() {
        if i > 0 {
            twisted = twisted.iter().map(|x| f.frobenius(x, 1)).collect();
        }
        for (o, y) in out.iter_mut().zip(linalg::mul_vec(f, ai, &twisted)) {
            *o = f.add(o, &y);
        }
    }
    Ok(out)
}

/// Quotient and remainder of a right division `f = q ∘ g + r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Division<T> {
    pub quotient: T,
    pub remainder: T,
}

/// Right division by `g` with invertible leading coefficient: returns `q, r`
/// with `f = q ∘ g + r` and `deg r < deg g`.
pub fn right_divide<F: FrobeniusField>(
    f: &F,
    dividend: &OreMatrix<F::Elem>,
    g: &OreMatrix<F::Elem>,
) -> Result<Division<OreMatrix<F::Elem>>, OreError> {
    if !g.is_square() || dividend.cols != g.rows {
        return Err(OreError::ShapeMismatch(format!(
            "cannot divide {}x{} by {}x{}",
            dividend.rows, dividend.cols, g.rows, g.cols
        )));
    }
    let dg = g.degree().ok_or(OreError::ZeroDivisor)?;
    let lead_inv = linalg::inverse(f, g.leading().unwrap())?.ok_or(OreError::SingularLeading)?;
    let mut quotient = vec![linalg::zeros(f, dividend.rows, g.cols); dividend.coeffs.len().saturating_sub(dg)];
    let mut rem = dividend.clone();
    while let Some(dr) = rem.degree().filter(|&d| d >= dg) {
        let delta = dr - dg;
        let u = linalg::mul(f, rem.leading().unwrap(), &linalg::twist(f, &lead_inv, delta as u32));
        let mut term = vec![linalg::zeros(f, u.rows(), u.cols()); delta + 1];
        term[delta] = u.clone();
        let term = OreMatrix::from_coeffs(f, u.rows(), u.cols(), term)?;
        rem = sub(f, &rem, &compose(f, &term, g)?)?;
        quotient[delta] = linalg::add(f, &quotient[delta], &u);
    }
    Ok(Division {
        quotient: OreMatrix::from_coeffs(f, dividend.rows, g.cols, quotient)?,
        remainder: rem,
    })
}

impl<E> OreMatrix<E> {
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// Outcome of the left-multiple search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness<T> {
    /// `Q` with `Q ∘ P = G`, re-verified by expansion.
    Found(T),
    /// No `Q` of `τ`-degree at most the bound exists.
    NoneUpTo(usize),
}

/// Searches `Q` (`s × s`, `deg_τ Q ≤ bound`) with `Q ∘ P = G`.
///
/// For each row of `Q` the unknowns `(Q_i)_{r,c}` enter the coefficient of
/// `τ^n` in `Q ∘ P` linearly, through the known twists `P_{n-i}^{(i)}`.
pub fn left_multiple_witness<F: FrobeniusField>(
    f: &F,
    p: &OreMatrix<F::Elem>,
    g: &OreMatrix<F::Elem>,
    bound: usize,
) -> Result<Witness<OreMatrix<F::Elem>>, OreError> {
    check_same_shape(p, g)?;
    let (s, m) = (p.rows, p.cols);
    let deg_p = p.coeffs.len();
    let top = (bound + deg_p).max(g.coeffs.len());
    let twisted: Vec<Vec<Matrix<F::Elem>>> = (0..=bound)
        .map(|i| p.coeffs.iter().map(|c| linalg::twist(f, c, i as u32)).collect())
        .collect();
    let unknowns = (bound + 1) * s;
    let system = Matrix::from_fn(top * m, unknowns, |eq, var| {
        let (n, col) = (eq / m, eq % m);
        let (i, c) = (var / s, var % s);
        match n.checked_sub(i).and_then(|j| twisted[i].get(j)) {
            Some(pj) => pj.get(c, col).clone(),
            None => f.zero(),
        }
    });
    let mut q_rows = Vec::with_capacity(s);
    for r in 0..s {
        let rhs: Vec<F::Elem> = (0..top * m)
            .map(|eq| match g.coeffs.get(eq / m) {
                Some(gn) => gn.get(r, eq % m).clone(),
                None => f.zero(),
            })
            .collect();
        match linalg::solve(f, &system, &rhs)? {
            Some(x) => q_rows.push(x),
            None => return Ok(Witness::NoneUpTo(bound)),
        }
    }
    let coeffs = (0..=bound)
        .map(|i| Matrix::from_fn(s, s, |r, c| q_rows[r][i * s + c].clone()))
        .collect();
    let q = OreMatrix::from_coeffs(f, s, s, coeffs)?;
    assert!(compose(f, &q, p)? == *g, "left-multiple witness failed re-expansion");
    Ok(Witness::Found(q))
}

/// `A_0 + A_1*τ + A_2*τ^2`, each `A_i` written as a nested list.
pub fn format<F: Field>(f: &F, a: &OreMatrix<F::Elem>) -> String {
    if a.is_zero() {
        return linalg::format(f, &linalg::zeros(f, a.rows, a.cols));
    }
    let terms: Vec<String> = a
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, m)| !linalg::is_zero(f, m))
        .map(|(i, m)| format!("{}{}", linalg::format(f, m), tau_suffix(i)))
        .collect();
    terms.join(" + ")
}

fn tau_suffix(i: usize) -> String {
    match i {
        0 => String::new(),
        1 => "*τ".into(),
        _ => format!("*τ^{i}"),
    }
}

impl<E: Clone> OrePoly<E> {
    /// The 1×1 matrix with this entry.
    pub fn to_matrix<F: Field<Elem = E>>(&self, f: &F) -> OreMatrix<E> {
        OreMatrix::from_entries(f, &[vec![self.clone()]]).expect("1x1")
    }
}

pub mod scalar {
    //! Scalar twisted polynomials `F{τ}`.

    use super::*;

    pub fn add<F: Field>(f: &F, a: &OrePoly<F::Elem>, b: &OrePoly<F::Elem>) -> OrePoly<F::Elem> {
        let n = a.coeffs.len().max(b.coeffs.len());
        OrePoly::from_coeffs(f, (0..n).map(|i| f.add(&a.coeff(f, i), &b.coeff(f, i))).collect())
    }

    pub fn sub<F: Field>(f: &F, a: &OrePoly<F::Elem>, b: &OrePoly<F::Elem>) -> OrePoly<F::Elem> {
        let n = a.coeffs.len().max(b.coeffs.len());
        OrePoly::from_coeffs(f, (0..n).map(|i| f.sub(&a.coeff(f, i), &b.coeff(f, i))).collect())
    }

    pub fn compose<F: FrobeniusField>(f: &F, a: &OrePoly<F::Elem>, b: &OrePoly<F::Elem>) -> OrePoly<F::Elem> {
        if a.is_zero() || b.is_zero() {
            return OrePoly::zero();
        }
        let mut out = vec![f.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, &f.frobenius(y, i as u32)));
            }
        }
        OrePoly::from_coeffs(f, out)
    }

    pub fn eval<F: FrobeniusField>(f: &F, a: &OrePoly<F::Elem>, x: &F::Elem) -> F::Elem {
        let mut acc = f.zero();
        let mut xi = x.clone();
        for (i, c) in a.coeffs.iter().enumerate() {
            if i > 0 {
                xi = f.frobenius(&xi, 1);
            }
            acc = f.add(&acc, &f.mul(c, &xi));
        }
        acc
    }

    pub fn right_divide<F: FrobeniusField>(
        f: &F,
        a: &OrePoly<F::Elem>,
        g: &OrePoly<F::Elem>,
    ) -> Result<Division<OrePoly<F::Elem>>, OreError> {
        let dg = g.degree().ok_or(OreError::ZeroDivisor)?;
        let lead_inv = f.inv(g.leading().unwrap())?;
        let mut quotient = vec![f.zero(); a.coeffs.len().saturating_sub(dg)];
        let mut rem = a.clone();
        while let Some(dr) = rem.degree().filter(|&d| d >= dg) {
            let delta = dr - dg;
            let u = f.mul(rem.leading().unwrap(), &f.frobenius(&lead_inv, delta as u32));
            let mut term = vec![f.zero(); delta + 1];
            term[delta] = u.clone();
            rem = sub(f, &rem, &compose(f, &OrePoly::from_coeffs(f, term), g));
            quotient[delta] = f.add(&quotient[delta], &u);
        }
        Ok(Division {
            quotient: OrePoly::from_coeffs(f, quotient),
            remainder: rem,
        })
    }

    /// `c_0 + c_1*τ + ..`, coefficients parenthesized when compound.
    pub fn format<F: Field>(f: &F, a: &OrePoly<F::Elem>) -> String {
        let terms: Vec<String> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| {
                let s = f.format(c);
                if i == 0 {
                    s
                } else if f.is_one(c) {
                    tau_suffix(i)[1..].to_string()
                } else if s.contains(' ') {
                    format!("({s}){}", tau_suffix(i))
                } else {
                    format!("{s}{}", tau_suffix(i))
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}
