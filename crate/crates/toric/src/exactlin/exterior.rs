//! The exterior algebra ∧^• M_Q in its standard subset basis, and interior
//! products against lattice vectors of N. Cuts out the graded pieces of the
//! log-differential sheaves.

use num_traits::Zero;

use super::mat::IMat;
use super::{Int, IntVec};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("form degree {a} out of range for rank {n}")]
    DegreeOutOfRange { a: usize, n: usize },
}

/// Basis index sets of ∧^a of an n-dimensional space, lexicographic.
pub fn exterior_basis(n: usize, a: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, a: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == a {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, a, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, a, 0, &mut cur, &mut out);
    out
}

/// Matrix of the interior product ι_v : ∧^a M → ∧^{a−1} M in subset bases.
///
/// ι_v(e_{s_0}∧…∧e_{s_{a−1}}) = Σ_t (−1)^t v_{s_t} e_{S∖{s_t}}.
pub fn contract(v: &IntVec, a: usize) -> Result<IMat, ExteriorError> {
    let n = v.len();
    if a > n {
        return Err(ExteriorError::DegreeOutOfRange { a, n });
    }
    if a == 0 {
        // zero map into the zero space
        return Ok(IMat::zero(0, 1));
    }
    let src = exterior_basis(n, a);
    let dst = exterior_basis(n, a - 1);
    let index: std::collections::HashMap<Vec<usize>, usize> =
        dst.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = IMat::zero(dst.len(), src.len());
    for (col, s) in src.iter().enumerate() {
        for (t, &st) in s.iter().enumerate() {
            if v[st].is_zero() {
                continue;
            }
            let mut rest = s.clone();
            rest.remove(t);
            let row = index[&rest];
            let sign = if t % 2 == 0 { 1 } else { -1 };
            m[(row, col)] += Int::from(sign) * &v[st];
        }
    }
    Ok(m)
}
