//! Exact arithmetic for Anderson T-modules over `F_q(T)`: twisted
//! polynomials, sub-module stability, abelianness, truncated exponentials
//! and torsion.
//!
//! Every algorithm is generic over a [`FunctionField`] context; the aliases
//! below fix the coefficient field to an explicit [`Tower`] over `F_q(T)`.

pub mod exponential;
pub mod field;
pub mod fields;
pub mod linalg;
pub mod ore;
pub mod sample;
pub mod structure;
pub mod subgroups;
pub mod tmodule;
pub mod torsion;

pub use field::{Field, FieldError, FrobeniusField, FunctionField};
pub use fields::{FieldLimits, FiniteField, Fq, Poly, PolyRing, RatFunc, RationalFunctionField, Tower, TowerElem};
pub use linalg::Matrix;

pub type TowerMatrix = Matrix<TowerElem>;
pub type TowerOrePoly = ore::OrePoly<TowerElem>;
pub type TowerOreMatrix = ore::OreMatrix<TowerElem>;
pub type TowerModule = tmodule::TModule<Tower>;
pub type TowerSubgroup = subgroups::KernelSubgroup<Tower>;
pub type TowerExpSeries = exponential::ExpSeries<Tower>;
pub type TowerTorsionCertificate = torsion::TorsionCertificate<TowerElem>;
