//! Algebraic subgroups `B = ker P` of a T-module, given by an `s × m`
//! twisted polynomial matrix `P`, and their stability under `Φ(a)`.
//!
//! `B` is stable under `Φ(a)` when `P ∘ Φ(a) = Q ∘ P` for some `Q`; such a
//! `Q` is searched by linear algebra up to a `τ`-degree bound. Failing to
//! find one is not a proof of instability, so the verdict is three-valued.
//! Reducedness and connectedness of `ker P` are not checked.

use thiserror::Error;

use crate::field::{Field, FunctionField};
use crate::fields::Poly;
use crate::linalg::{self, Matrix};
use crate::ore::{self, OreError, OreMatrix, Witness};
use crate::tmodule::{ModuleError, TModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("presentation has {got} columns, the module has dimension {expected}")]
    Shape { expected: usize, got: usize },
    #[error("the acting polynomial must be nonconstant")]
    ConstantAction,
    #[error("the subgroup is not cut out by vanishing coordinates")]
    NotCoordinate,
    #[error("the subgroup is not stable under the module variable")]
    NotStable,
    #[error("the point is not annihilated by the given polynomial")]
    NotTorsion,
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stability<E> {
    /// `Q` with `Q ∘ P = P ∘ Φ(a)`, verified by expansion.
    Stable(OreMatrix<E>),
    /// No `Q` of `τ`-degree at most the bound; stability remains undecided.
    NoWitnessUpTo(usize),
    /// A structural argument shows `Φ(a)(B) ⊄ B`.
    ProvablyUnstable(String),
}

impl<E> Stability<E> {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable(_))
    }
}

/// Result of a stability test together with the composed map `P ∘ Φ(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCheck<E> {
    pub image: OreMatrix<E>,
    pub bound: usize,
    pub verdict: Stability<E>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MinimalJ<E> {
    Found { j: usize, witness: OreMatrix<E> },
    NoneUpTo(usize),
}

/// Outcome of a scan over `Φ(t^j)`, `j = 1, 2, ..`.
#[derive(Clone, Debug, PartialEq)]
pub struct JScan<E> {
    /// Verdict for every tested `j`, in order.
    pub verdicts: Vec<(usize, Stability<E>)>,
    pub result: MinimalJ<E>,
}

/// A subgroup cut out by the vanishing of some coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateShape {
    /// Coordinates forced to vanish.
    pub fixed: Vec<usize>,
    /// Coordinates left free.
    pub free: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSubgroup<F: Field> {
    module: TModule<F>,
    presentation: OreMatrix<F::Elem>,
}

impl<F: FunctionField> KernelSubgroup<F> {
    /// `ker P` inside `module`. A zero `P` presents the whole module.
    pub fn new(module: TModule<F>, presentation: OreMatrix<F::Elem>) -> Result<Self, SubgroupError> {
        if presentation.cols() != module.dimension() {
            return Err(SubgroupError::Shape {
                expected: module.dimension(),
                got: presentation.cols(),
            });
        }
        Ok(KernelSubgroup { module, presentation })
    }

    /// The whole module.
    pub fn full(module: TModule<F>) -> Self {
        let m = module.dimension();
        KernelSubgroup {
            module,
            presentation: OreMatrix::zero(1, m),
        }
    }

    /// The zero subgroup.
    pub fn trivial(module: TModule<F>) -> Self {
        let p = OreMatrix::identity(module.field(), module.dimension());
        KernelSubgroup {
            module,
            presentation: p,
        }
    }

    /// The subgroup where the listed coordinates vanish.
    pub fn coordinate(module: TModule<F>, fixed: &[usize]) -> Result<Self, SubgroupError> {
        let f = module.field().clone();
        let m = module.dimension();
        if let Some(&bad) = fixed.iter().find(|&&c| c >= m) {
            return Err(SubgroupError::Shape {
                expected: m,
                got: bad + 1,
            });
        }
        if fixed.is_empty() {
            return Ok(Self::full(module));
        }
        let rows = Matrix::from_fn(fixed.len(), m, |r, c| if fixed[r] == c { f.one() } else { f.zero() });
        Self::new(module, OreMatrix::constant(&f, rows))
    }

    pub fn module(&self) -> &TModule<F> {
        &self.module
    }

    pub fn presentation(&self) -> &OreMatrix<F::Elem> {
        &self.presentation
    }

    /// `P ∘ Φ(a)`.
    pub fn image(&self, a: &Poly) -> OreMatrix<F::Elem> {
        ore::compose(self.module.field(), &self.presentation, &self.module.act(a)).expect("shapes agree")
    }

    /// Tests `Φ(a)(B) ⊆ B`; the bound defaults to `deg_τ (P ∘ Φ(a))`.
    pub fn stability(&self, a: &Poly, bound: Option<usize>) -> Result<StabilityCheck<F::Elem>, SubgroupError> {
        if a.is_constant() {
            return Err(SubgroupError::ConstantAction);
        }
        Ok(self.check_image(self.image(a), bound))
    }

    fn check_image(&self, image: OreMatrix<F::Elem>, bound: Option<usize>) -> StabilityCheck<F::Elem> {
        let f = self.module.field();
        let bound = bound.unwrap_or_else(|| image.degree().unwrap_or(0));
        if let Some(reason) = self.zero_column_obstruction(&image) {
            return StabilityCheck {
                image,
                bound,
                verdict: Stability::ProvablyUnstable(reason),
            };
        }
        let verdict = match ore::left_multiple_witness(f, &self.presentation, &image, bound).expect("shapes agree") {
            Witness::Found(q) => Stability::Stable(q),
            Witness::NoneUpTo(d) => Stability::NoWitnessUpTo(d),
        };
        StabilityCheck { image, bound, verdict }
    }

    /// If column `c` of `P` vanishes, the whole `x_c` axis lies in `B`; if
    /// column `c` of `P ∘ Φ(a)` does not, the image of that axis leaves `B`
    /// at all but finitely many points.
    fn zero_column_obstruction(&self, image: &OreMatrix<F::Elem>) -> Option<String> {
        let f = self.module.field();
        (0..self.presentation.cols()).find_map(|c| {
            let p_zero = (0..self.presentation.rows()).all(|r| self.presentation.entry(f, r, c).is_zero());
            let g_zero = (0..image.rows()).all(|r| image.entry(f, r, c).is_zero());
            (p_zero && !g_zero).then(|| {
                format!(
                    "column {} of the presentation vanishes, so the coordinate axis x{} lies in the subgroup, \
                     but column {} of the composed map is nonzero",
                    c + 1,
                    c + 1,
                    c + 1
                )
            })
        })
    }

    /// Tests `Φ(t^j)` for `j = 1..=max_j`, stopping at the first witness.
    pub fn minimal_j_scan(&self, max_j: usize, bound: Option<usize>) -> JScan<F::Elem> {
        let f = self.module.field();
        let phi = self.module.phi();
        let mut power = OreMatrix::identity(f, self.module.dimension());
        let mut verdicts = Vec::new();
        for j in 1..=max_j {
            power = ore::compose(f, phi, &power).expect("square");
            let image = ore::compose(f, &self.presentation, &power).expect("shapes agree");
            let check = self.check_image(image, bound);
            if let Stability::Stable(q) = &check.verdict {
                let witness = q.clone();
                verdicts.push((j, check.verdict));
                return JScan {
                    verdicts,
                    result: MinimalJ::Found { j, witness },
                };
            }
            verdicts.push((j, check.verdict));
        }
        JScan {
            verdicts,
            result: MinimalJ::NoneUpTo(max_j),
        }
    }

    /// Whether `dΦ(a)` preserves `Lie(B) = ker dP`, `dP` the `τ^0` coefficient.
    pub fn tangent_stability(&self, a: &Poly) -> Result<bool, SubgroupError> {
        let f = self.module.field();
        let dp = self.presentation.coeff(f, 0);
        if linalg::is_zero(f, &dp) {
            return Ok(true);
        }
        let basis = linalg::kernel(f, &dp).map_err(OreError::from)?;
        let d = self.module.differential(a);
        Ok(basis.iter().all(|v| {
            let image = linalg::mul_vec(f, &d, v);
            linalg::mul_vec(f, &dp, &image).iter().all(|x| f.is_zero(x))
        }))
    }

    pub fn contains(&self, v: &[F::Elem]) -> Result<bool, SubgroupError> {
        let f = self.module.field();
        Ok(ore::eval(f, &self.presentation, v)?.iter().all(|x| f.is_zero(x)))
    }

    /// The vanishing coordinates when `P` is constant with rows that each
    /// select a single coordinate.
    pub fn coordinate_shape(&self) -> Option<CoordinateShape> {
        let f = self.module.field();
        if self.presentation.degree().unwrap_or(0) > 0 {
            return None;
        }
        let p = self.presentation.coeff(f, 0);
        let mut fixed = Vec::new();
        for r in 0..p.rows() {
            let support: Vec<usize> = (0..p.cols()).filter(|&c| !f.is_zero(p.get(r, c))).collect();
            match support[..] {
                [] => {}
                [c] => fixed.push(c),
                _ => return None,
            }
        }
        fixed.sort_unstable();
        fixed.dedup();
        let free = (0..p.cols()).filter(|c| !fixed.contains(c)).collect();
        Some(CoordinateShape { fixed, free })
    }

    /// The T-module structure that a stable coordinate subgroup inherits.
    pub fn induced_module(&self) -> Result<TModule<F>, SubgroupError> {
        let shape = self.coordinate_shape().ok_or(SubgroupError::NotCoordinate)?;
        if shape.free.is_empty() {
            return Err(SubgroupError::NotCoordinate);
        }
        let f = self.module.field();
        let leaks = self.module.coeffs().iter().any(|a| {
            shape
                .fixed
                .iter()
                .any(|&r| shape.free.iter().any(|&c| !f.is_zero(a.get(r, c))))
        });
        if leaks {
            return Err(SubgroupError::NotStable);
        }
        let coeffs = self
            .module
            .coeffs()
            .iter()
            .map(|a| a.select(&shape.free, &shape.free))
            .collect();
        Ok(TModule::with_parameter(
            f.clone(),
            coeffs,
            self.module.parameter().clone(),
        )?)
    }
}

/// A translate `x + B` of a subgroup stable under `Φ(a)` by a torsion point.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionSubvariety<F: Field> {
    point: Vec<F::Elem>,
    subgroup: KernelSubgroup<F>,
    generator: Poly,
    witness: OreMatrix<F::Elem>,
}

impl<F: FunctionField> TorsionSubvariety<F> {
    /// Checks that `annihilator` kills `point` and that `B` is stable under
    /// `Φ(generator)` with a witness of `τ`-degree at most the default bound.
    pub fn new(
        subgroup: KernelSubgroup<F>,
        point: Vec<F::Elem>,
        annihilator: &Poly,
        generator: Poly,
    ) -> Result<Self, SubgroupError> {
        let module = subgroup.module();
        let f = module.field();
        if annihilator.is_zero() {
            return Err(SubgroupError::NotTorsion);
        }
        let image = ore::eval(f, &module.act(annihilator), &point)?;
        if !image.iter().all(|x| f.is_zero(x)) {
            return Err(SubgroupError::NotTorsion);
        }
        match subgroup.stability(&generator, None)?.verdict {
            Stability::Stable(witness) => Ok(TorsionSubvariety {
                point,
                subgroup,
                generator,
                witness,
            }),
            _ => Err(SubgroupError::NotStable),
        }
    }

    pub fn point(&self) -> &[F::Elem] {
        &self.point
    }

    pub fn subgroup(&self) -> &KernelSubgroup<F> {
        &self.subgroup
    }

    pub fn generator(&self) -> &Poly {
        &self.generator
    }

    pub fn witness(&self) -> &OreMatrix<F::Elem> {
        &self.witness
    }

    pub fn contains(&self, v: &[F::Elem]) -> Result<bool, SubgroupError> {
        let f = self.subgroup.module().field();
        if v.len() != self.point.len() {
            return Err(SubgroupError::Shape {
                expected: self.point.len(),
                got: v.len(),
            });
        }
        let diff: Vec<F::Elem> = v.iter().zip(&self.point).map(|(a, b)| f.sub(a, b)).collect();
        self.subgroup.contains(&diff)
    }
}
