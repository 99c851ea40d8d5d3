//! Abelianness and rank.
//!
//! If the leading matrix of some `Φ(t^i)` is invertible, right division by
//! `Φ(t^i)` splits `F{τ}^m` into `m·d(i)` classes, which generate
//! `Hom(A, G_a)` over `F[t]`. Conversely, if the supports of all iterates
//! `Φ(t^j)` stay inside a pattern of bounded `τ`-degree, the degree argument
//! for nilpotent leading terms shows the module is not finitely generated.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FunctionField};
use crate::linalg;
use crate::ore::OreMatrix;
use crate::tmodule::TModule;

/// Boolean support of a twisted polynomial matrix, one `rows × cols`
/// matrix per `τ`-degree, trailing empty degrees trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrePattern {
    rows: usize,
    cols: usize,
    coeffs: Vec<Vec<bool>>,
}

impl OrePattern {
    fn trimmed(rows: usize, cols: usize, mut coeffs: Vec<Vec<bool>>) -> Self {
        while coeffs.last().is_some_and(|c| !c.iter().any(|&b| b)) {
            coeffs.pop();
        }
        OrePattern { rows, cols, coeffs }
    }

    pub fn support<F: Field>(f: &F, a: &OreMatrix<F::Elem>) -> Self {
        let coeffs = a
            .coeffs()
            .iter()
            .map(|m| m.entries().iter().map(|x| !f.is_zero(x)).collect())
            .collect();
        Self::trimmed(a.rows(), a.cols(), coeffs)
    }

    /// From explicit `(degree, row, col)` positions.
    pub fn from_positions(rows: usize, cols: usize, positions: &[(usize, usize, usize)]) -> Self {
        let len = positions.iter().map(|p| p.0 + 1).max().unwrap_or(0);
        let mut coeffs = vec![vec![false; rows * cols]; len];
        for &(d, r, c) in positions {
            coeffs[d][r * cols + c] = true;
        }
        Self::trimmed(rows, cols, coeffs)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn get(&self, degree: usize, r: usize, c: usize) -> bool {
        self.coeffs.get(degree).is_some_and(|m| m[r * self.cols + c])
    }

    /// Support bound for `f ∘ g`: degrees add, matrices multiply as booleans.
    pub fn compose(&self, other: &OrePattern) -> OrePattern {
        assert_eq!(self.cols, other.rows, "pattern shapes do not compose");
        let (rows, cols, inner) = (self.rows, other.cols, self.cols);
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut out = vec![vec![false; rows * cols]; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                for r in 0..rows {
                    for c in 0..cols {
                        if (0..inner).any(|k| a[r * inner + k] && b[k * cols + c]) {
                            out[i + j][r * cols + c] = true;
                        }
                    }
                }
            }
        }
        Self::trimmed(rows, cols, out)
    }

    pub fn union(&self, other: &OrePattern) -> OrePattern {
        let len = self.coeffs.len().max(other.coeffs.len());
        let size = self.rows * self.cols;
        let coeffs = (0..len)
            .map(|d| {
                (0..size)
                    .map(|k| self.coeffs.get(d).is_some_and(|m| m[k]) || other.coeffs.get(d).is_some_and(|m| m[k]))
                    .collect()
            })
            .collect();
        Self::trimmed(self.rows, self.cols, coeffs)
    }

    /// Every position set in `other` is also set here.
    pub fn dominates(&self, other: &OrePattern) -> bool {
        other.coeffs.iter().enumerate().all(|(d, m)| {
            m.iter()
                .enumerate()
                .all(|(k, &b)| !b || self.coeffs.get(d).is_some_and(|s| s[k]))
        })
    }
}

impl fmt::Display for OrePattern {
    /// `τ^0: [[1, 0], [0, 1]]; τ^1: [[0, 0], [1, 0]]`, empty degrees omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, m) in self.coeffs.iter().enumerate() {
            if !m.iter().any(|&b| b) {
                continue;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            let rows: Vec<String> = (0..self.rows)
                .map(|r| {
                    let row: Vec<&str> = (0..self.cols)
                        .map(|c| if m[r * self.cols + c] { "1" } else { "0" })
                        .collect();
                    format!("[{}]", row.join(", "))
                })
                .collect();
            write!(f, "τ^{d}: [{}]", rows.join(", "))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanStep {
    pub i: usize,
    /// `τ`-degree of `Φ(t^i)`.
    pub degree: usize,
    pub leading_invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbelianVerdict {
    /// The leading matrix of `Φ(t^i)` is invertible; `Hom(A, G_a)` is generated by `generators` elements.
    Abelian {
        i: usize,
        generators: usize,
    },
    /// All iterates have support inside this closed pattern.
    Nonabelian(OrePattern),
    Inconclusive {
        max_i: usize,
        cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianScanReport {
    pub steps: Vec<ScanStep>,
    pub verdict: AbelianVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("the leading matrix of the {i}-th iterate is not invertible")]
    SingularLeading { i: usize },
    #[error("the iterate index must be at least 1")]
    ZeroIndex,
}

fn leading_invertible<F: Field>(f: &F, a: &OreMatrix<F::Elem>) -> bool {
    a.leading()
        .is_some_and(|m| linalg::rank(f, m).map(|r| r == m.rows()).unwrap_or(false))
}

/// Smallest pattern containing `Φ(t)`'s support and closed under left
/// composition with it, if its `τ`-degree stays within `cap`.
pub fn pattern_closure(step: &OrePattern, cap: usize) -> Option<OrePattern> {
    let mut closed = step.clone();
    loop {
        if closed.degree().unwrap_or(0) > cap {
            return None;
        }
        let next = closed.union(&step.compose(&closed));
        if next == closed {
            return Some(closed);
        }
        closed = next;
    }
}

/// Looks for an invertible leading matrix among `Φ(t^i)`, `i ≤ max_i`, and
/// otherwise for a bounded closed support pattern of `τ`-degree at most `cap`.
pub fn abelian_scan<F: FunctionField>(module: &TModule<F>, max_i: usize, cap: usize) -> AbelianScanReport {
    let f = module.field();
    let m = module.dimension();
    let mut steps = Vec::new();
    let mut power = OreMatrix::identity(f, m);
    for i in 1..=max_i {
        power = crate::ore::compose(f, module.phi(), &power).expect("square");
        let invertible = leading_invertible(f, &power);
        let degree = power.degree().unwrap_or(0);
        steps.push(ScanStep {
            i,
            degree,
            leading_invertible: invertible,
        });
        if invertible {
            return AbelianScanReport {
                steps,
                verdict: AbelianVerdict::Abelian {
                    i,
                    generators: m * degree,
                },
            };
        }
    }
    let verdict = match pattern_closure(&OrePattern::support(f, module.phi()), cap) {
        Some(p) => AbelianVerdict::Nonabelian(p),
        None => AbelianVerdict::Inconclusive { max_i, cap },
    };
    AbelianScanReport { steps, verdict }
}

/// Generator count of `Hom(A, G_a)` over `F[t^i]`.
///
/// Equals `m·d(i)`, which is the rank wherever that count is known to be
/// minimal; it is reported as a generator count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub i: usize,
    pub dimension: usize,
    pub degree: usize,
    pub generators: usize,
}

pub fn rank_report<F: FunctionField>(module: &TModule<F>, i: usize) -> Result<RankReport, StructureError> {
    if i == 0 {
        return Err(StructureError::ZeroIndex);
    }
    let f = module.field();
    let power = module.powers(i).pop().expect("i >= 1");
    if !leading_invertible(f, &power) {
        return Err(StructureError::SingularLeading { i });
    }
    let degree = power.degree().unwrap_or(0);
    let dimension = module.dimension();
    Ok(RankReport {
        i,
        dimension,
        degree,
        generators: dimension * degree,
    })
}

/// `deg_τ Φ(t^j)` for `j = 1..=count`.
pub fn degree_sequence<F: FunctionField>(module: &TModule<F>, count: usize) -> Vec<usize> {
    module.powers(count).iter().map(|p| p.degree().unwrap_or(0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FiniteField, Poly, RationalFunctionField};
    use crate::linalg::Matrix;
    use crate::tmodule::{carlitz, carlitz_tensor};

    fn k2() -> RationalFunctionField {
        RationalFunctionField::new(FiniteField::prime(2).unwrap())
    }

    fn lower_left_module() -> TModule<RationalFunctionField> {
        let f = k2();
        let a0 = linalg::scalar(&f, 2, &f.t());
        let a1 = Matrix::from_fn(2, 2, |r, c| if (r, c) == (1, 0) { f.one() } else { f.zero() });
        TModule::new(f, vec![a0, a1]).unwrap()
    }

    #[test]
    fn lower_left_module_is_nonabelian() {
        let m = lower_left_module();
        assert_eq!(degree_sequence(&m, 20), vec![1; 20]);
        let report = abelian_scan(&m, 8, 16);
        let expected = OrePattern::from_positions(2, 2, &[(0, 0, 0), (0, 1, 1), (1, 1, 0)]);
        assert_eq!(report.verdict, AbelianVerdict::Nonabelian(expected.clone()));
        assert_eq!(expected.to_string(), "τ^0: [[1, 0], [0, 1]]; τ^1: [[0, 0], [1, 0]]");
    }

    #[test]
    fn carlitz_is_abelian() {
        let m = carlitz(k2());
        assert_eq!(
            abelian_scan(&m, 4, 4).verdict,
            AbelianVerdict::Abelian { i: 1, generators: 1 }
        );
        assert_eq!(degree_sequence(&m, 5), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn tensor_square_over_t_squared() {
        let m = carlitz_tensor(k2(), 2).unwrap();
        assert_eq!(degree_sequence(&m, 4), vec![1, 1, 2, 2]);
        let over = m.restrict(&Poly::monomial(m.fq().one(), 2)).unwrap();
        assert_eq!(
            abelian_scan(&over, 4, 4).verdict,
            AbelianVerdict::Abelian { i: 1, generators: 2 }
        );
        assert_eq!(rank_report(&over, 1).unwrap().generators, 2);
        assert_eq!(rank_report(&m, 1), Err(StructureError::SingularLeading { i: 1 }));
    }

    #[test]
    fn closure_gives_up_past_the_cap() {
        let full = OrePattern::from_positions(1, 1, &[(0, 0, 0), (1, 0, 0)]);
        assert_eq!(pattern_closure(&full, 5), None);
    }
}
