//! Dense matrices over a [`Field`] and exact Gaussian elimination.

use crate::field::{Field, FieldError, FrobeniusField};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<E>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<G: Clone>(&self, f: impl FnMut(&E) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Submatrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix {
        rows,
        cols,
        data: vec![f.zero(); rows * cols],
    }
}

pub fn scalar<F: Field>(f: &F, n: usize, x: &F::Elem) -> Matrix<F::Elem> {
    Matrix::from_fn(n, n, |r, c| if r == c { x.clone() } else { f.zero() })
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    scalar(f, n, &f.one())
}

pub fn is_zero<F: Field>(f: &F, m: &Matrix<F::Elem>) -> bool {
    m.data.iter().all(|x| f.is_zero(x))
}

pub fn add<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "matrix shape mismatch");
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f.add(x, y)).collect(),
    }
}

pub fn sub<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "matrix shape mismatch");
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f.sub(x, y)).collect(),
    }
}

pub fn neg<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    a.map(|x| f.neg(x))
}

pub fn scale<F: Field>(f: &F, c: &F::Elem, a: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    a.map(|x| f.mul(c, x))
}

pub fn mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "matrix shape mismatch");
    let mut out = zeros(f, a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(r, k);
            if f.is_zero(x) {
                continue;
            }
            for c in 0..b.cols {
                let y = b.get(k, c);
                if f.is_zero(y) {
                    continue;
                }
                let idx = r * out.cols + c;
                out.data[idx] = f.add(&out.data[idx], &f.mul(x, y));
            }
        }
    }
    out
}

pub fn mul_vec<F: Field>(f: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len(), "matrix-vector shape mismatch");
    (0..a.rows)
        .map(|r| {
            a.row(r).iter().zip(v).fold(f.zero(), |acc, (x, y)| {
                if f.is_zero(x) || f.is_zero(y) {
                    acc
                } else {
                    f.add(&acc, &f.mul(x, y))
                }
            })
        })
        .collect()
}

/// Entrywise `q^i`-power Frobenius, written `X^(i)`.
pub fn twist<F: FrobeniusField>(f: &F, a: &Matrix<F::Elem>, i: u32) -> Matrix<F::Elem> {
    if i == 0 {
        return a.clone();
    }
    a.map(|x| if f.is_zero(x) { x.clone() } else { f.frobenius(x, i) })
}

pub fn block_diagonal<F: Field>(f: &F, blocks: &[Matrix<F::Elem>]) -> Matrix<F::Elem> {
    let rows = blocks.iter().map(|b| b.rows).sum();
    let cols = blocks.iter().map(|b| b.cols).sum();
    let mut out = zeros(f, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for r in 0..b.rows {
            for c in 0..b.cols {
                out.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    out
}

/// Reduced row echelon form and the pivot columns.
pub fn rref<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<(Matrix<F::Elem>, Vec<usize>), FieldError> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !f.is_zero(a.get(r, col))) else {
            continue;
        };
        if p != row {
            for c in 0..a.cols {
                a.data.swap(p * a.cols + c, row * a.cols + c);
            }
        }
        let inv = f.inv(a.get(row, col))?;
        for c in col..a.cols {
            let v = f.mul(&inv, a.get(row, c));
            a.set(row, c, v);
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for c in col..a.cols {
                let pv = a.get(row, c);
                if f.is_zero(pv) {
                    continue;
                }
                let v = f.sub(a.get(r, c), &f.mul(&factor, pv));
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Ok((a, pivots))
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<usize, FieldError> {
    Ok(rref(f, m)?.1.len())
}

pub fn determinant<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<F::Elem, FieldError> {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut det = f.one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !f.is_zero(a.get(r, col))) else {
            return Ok(f.zero());
        };
        if p != col {
            for c in 0..n {
                a.data.swap(p * n + c, col * n + c);
            }
            det = f.neg(&det);
        }
        let pivot = a.get(col, col).clone();
        det = f.mul(&det, &pivot);
        let inv = f.inv(&pivot)?;
        for r in col + 1..n {
            let factor = f.mul(a.get(r, col), &inv);
            if f.is_zero(&factor) {
                continue;
            }
            for c in col..n {
                let v = f.sub(a.get(r, c), &f.mul(&factor, a.get(col, c)));
                a.set(r, c, v);
            }
        }
    }
    Ok(det)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>, FieldError> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.rows;
    let aug = Matrix::from_fn(n, 2 * n, |r, c| {
        if c < n {
            m.get(r, c).clone()
        } else if c - n == r {
            f.one()
        } else {
            f.zero()
        }
    });
    let (red, pivots) = rref(f, &aug)?;
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Ok(None);
    }
    Ok(Some(Matrix::from_fn(n, n, |r, c| red.get(r, n + c).clone())))
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>, FieldError> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let n = a.cols;
    let aug = Matrix::from_fn(
        a.rows,
        n + 1,
        |r, c| {
            if c < n {
                a.get(r, c).clone()
            } else {
                b[r].clone()
            }
        },
    );
    let (red, pivots) = rref(f, &aug)?;
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![f.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = red.get(r, n).clone();
    }
    Ok(Some(x))
}

/// A basis of the right kernel `{x : m x = 0}`.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<Vec<Vec<F::Elem>>, FieldError> {
    let (red, pivots) = rref(f, m)?;
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); m.cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red.get(r, fc));
            }
            v
        })
        .collect())
}

/// `[[a, b], [c, d]]`.
pub fn format<F: Field>(f: &F, m: &Matrix<F::Elem>) -> String {
    let rows: Vec<String> = (0..m.rows)
        .map(|r| {
            let cells: Vec<String> = m.row(r).iter().map(|x| f.format(x)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FiniteField, RationalFunctionField};
    use crate::FunctionField;

    fn k2() -> RationalFunctionField {
        RationalFunctionField::new(FiniteField::prime(2).unwrap())
    }

    #[test]
    fn inverse_round_trip() {
        let f = k2();
        let t = f.t();
        let m = Matrix::from_rows(vec![vec![t.clone(), f.one()], vec![f.zero(), t.clone()]]).unwrap();
        let inv = inverse(&f, &m).unwrap().unwrap();
        assert_eq!(mul(&f, &m, &inv), identity(&f, 2));
        assert_eq!(determinant(&f, &m).unwrap(), f.mul(&t, &t));
    }

    #[test]
    fn singular_matrix_has_kernel() {
        let f = k2();
        let t = f.t();
        let m = Matrix::from_rows(vec![vec![t.clone(), f.one()], vec![f.mul(&t, &t), t.clone()]]).unwrap();
        assert_eq!(inverse(&f, &m).unwrap(), None);
        assert!(f.is_zero(&determinant(&f, &m).unwrap()));
        let ker = kernel(&f, &m).unwrap();
        assert_eq!(ker.len(), 1);
        assert!(mul_vec(&f, &m, &ker[0]).iter().all(|x| f.is_zero(x)));
    }

    #[test]
    fn inconsistent_system() {
        let f = k2();
        let m = Matrix::from_rows(vec![vec![f.one()], vec![f.one()]]).unwrap();
        assert_eq!(solve(&f, &m, &[f.one(), f.zero()]).unwrap(), None);
        assert_eq!(solve(&f, &m, &[f.one(), f.one()]).unwrap(), Some(vec![f.one()]));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(vec![vec![1], vec![1, 2]]).is_none());
    }
}
