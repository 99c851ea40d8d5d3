//! Coefficient domains: `F_q`, `A = F_q[T]`, `k = F_q(T)` and explicit
//! extension towers of `k`.

mod fq;
mod poly;
mod ratfunc;
mod tower;

pub use fq::{FieldLimits, FiniteField, Fq};
pub use poly::{Poly, PolyRing};
pub use ratfunc::{RatFunc, RationalFunctionField};
pub use tower::{Tower, TowerElem};
