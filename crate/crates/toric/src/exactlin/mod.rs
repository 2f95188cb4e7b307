//! Exact integer and rational linear algebra, polyhedral feasibility and
//! lattice point enumeration. Everything downstream reduces to the
//! primitives in here; no floating point appears anywhere.

mod exterior;
mod field;
mod fm;
mod lp;
mod mat;

pub use exterior::{contract, exterior_basis, ExteriorError};
pub use field::{FieldOps, FieldSel, FpOps, QOps};
pub use fm::{feasible, lattice_points, Feasibility, IneqRow, IneqSystem, PolyhedronError, Rel};
pub use lp::lp_feasible_point;
pub use mat::{rank_over, smith_normal_form, IMat, SnfResult};

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Lattice vector, length equal to the ambient rank.
pub type IntVec = Vec<Int>;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn ivec(coords: &[i64]) -> IntVec {
    coords.iter().map(|&c| Int::from(c)).collect()
}

/// ⟨m, v⟩ for integer vectors of equal length.
pub fn dot(a: &[Int], b: &[Int]) -> Int {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Int]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * Rat::from(y.clone())).sum()
}
