//! Exact rational LP feasibility (phase-1 simplex, Bland's rule).
//!
//! Used where the variable count makes Fourier–Motzkin impractical, e.g.
//! the strict-convexity (projectivity) test over one coefficient per ray.

use num_traits::{One, Signed, Zero};

use super::Rat;

/// A feasible point of {ineq_lhs · x ≥ ineq_rhs, eq_lhs · x = eq_rhs},
/// or None if the system is infeasible.
pub fn lp_feasible_point(
    nvars: usize,
    ineqs: &[(Vec<Rat>, Rat)],
    eqs: &[(Vec<Rat>, Rat)],
) -> Option<Vec<Rat>> {
    // standard form: split x = x+ - x-, add slacks s >= 0 for inequalities
    // (lhs·x - s = rhs), then artificials per row; minimize sum of artificials.
    let nrows = ineqs.len() + eqs.len();
    let nx = 2 * nvars;
    let nslack = ineqs.len();
    let ncols = nx + nslack + nrows; // + artificials
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(nrows);
    let mut b: Vec<Rat> = Vec::with_capacity(nrows);
    for (r, (lhs, rhs)) in ineqs.iter().chain(eqs.iter()).enumerate() {
        assert_eq!(lhs.len(), nvars);
        let mut row = vec![Rat::zero(); ncols];
        for j in 0..nvars {
            row[2 * j] = lhs[j].clone();
            row[2 * j + 1] = -&lhs[j];
        }
        if r < ineqs.len() {
            row[nx + r] = -Rat::one(); // slack: lhs·x - s = rhs
        }
        let mut rhs = rhs.clone();
        if rhs.is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
            rhs = -rhs;
        }
        row[nx + nslack + r] = Rat::one(); // artificial
        a.push(row);
        b.push(rhs);
    }

    // objective: minimize sum of artificials; track as maximization of -sum
    let mut basis: Vec<usize> = (0..nrows).map(|r| nx + nslack + r).collect();
    // reduced cost row for objective c_j = 1 on artificials:
    // z_j - c_j computed on the fly; use explicit objective row instead
    let mut obj = vec![Rat::zero(); ncols];
    let mut obj_val = Rat::zero();
    for j in 0..ncols {
        // start: obj row = -sum of constraint rows restricted to non-artificial
        let mut s = Rat::zero();
        for r in 0..nrows {
            s += &a[r][j];
        }
        let is_art = j >= nx + nslack;
        obj[j] = if is_art { Rat::zero() } else { -s };
    }
    for r in 0..nrows {
        obj_val -= &b[r];
    }

    loop {
        // Bland: smallest index with negative reduced cost
        let Some(pivot_col) = (0..ncols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        // ratio test, Bland tie-break on basis variable index
        let mut pivot_row: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for r in 0..nrows {
            if a[r][pivot_col].is_positive() {
                let ratio = &b[r] / &a[r][pivot_col];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur
                            || (ratio == *cur
                                && basis[r] < basis[pivot_row.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(r);
                }
            }
        }
        let Some(pr) = pivot_row else {
            // unbounded in phase 1 cannot happen (objective bounded below by 0)
            unreachable!("phase-1 objective unbounded");
        };
        // pivot
        let piv = a[pr][pivot_col].clone();
        for j in 0..ncols {
            a[pr][j] = &a[pr][j] / &piv;
        }
        b[pr] = &b[pr] / &piv;
        for r in 0..nrows {
            if r != pr && !a[r][pivot_col].is_zero() {
                let f = a[r][pivot_col].clone();
                for j in 0..ncols {
                    let d = &f * &a[pr][j];
                    a[r][j] -= d;
                }
                let d = &f * &b[pr];
                b[r] -= d;
            }
        }
        if !obj[pivot_col].is_zero() {
            let f = obj[pivot_col].clone();
            for j in 0..ncols {
                let d = &f * &a[pr][j];
                obj[j] -= d;
            }
            let d = &f * &b[pr];
            obj_val -= d;
        }
        basis[pr] = pivot_col;
    }

    if !obj_val.is_zero() {
        return None; // artificials cannot all be driven to zero
    }
    let mut x = vec![Rat::zero(); nvars];
    for (r, &bv) in basis.iter().enumerate() {
        if bv < nx {
            let var = bv / 2;
            if bv % 2 == 0 {
                x[var] += &b[r];
            } else {
                x[var] -= &b[r];
            }
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn r(p: i64) -> Rat {
        rat(p, 1)
    }

    #[test]
    fn finds_point_in_triangle() {
        // x >= 1, y >= 1, -x - y >= -10
        let x = lp_feasible_point(
            2,
            &[
                (vec![r(1), r(0)], r(1)),
                (vec![r(0), r(1)], r(1)),
                (vec![r(-1), r(-1)], r(-10)),
            ],
            &[],
        )
        .unwrap();
        assert!(x[0] >= r(1) && x[1] >= r(1) && &x[0] + &x[1] <= r(10));
    }

    #[test]
    fn detects_infeasibility() {
        // x >= 1 and -x >= 0
        let x = lp_feasible_point(1, &[(vec![r(1)], r(1)), (vec![r(-1)], r(0))], &[]);
        assert!(x.is_none());
    }

    #[test]
    fn respects_equalities() {
        // x + y = 3, x >= 2, y >= 0
        let x = lp_feasible_point(
            2,
            &[(vec![r(1), r(0)], r(2)), (vec![r(0), r(1)], r(0))],
            &[(vec![r(1), r(1)], r(3))],
        )
        .unwrap();
        assert_eq!(&x[0] + &x[1], r(3));
        assert!(x[0] >= r(2));
    }

    #[test]
    fn negative_coordinates_allowed() {
        // -x >= 2 forces x <= -2
        let x = lp_feasible_point(1, &[(vec![r(-1)], r(2))], &[]).unwrap();
        assert!(x[0] <= r(-2));
    }
}
