//! Rational Fourier–Motzkin elimination: feasibility classification and
//! exact lattice point enumeration for small systems.

use num_traits::{One, Signed, Zero};

use super::{Int, IntVec, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Rel {
    Ge,
    Gt,
    Eq,
}

/// One constraint ⟨normal, x⟩ + offset {≥, >, =} 0.
#[derive(Clone, Debug)]
pub struct IneqRow {
    pub normal: IntVec,
    pub offset: Rat,
    pub rel: Rel,
}

/// A finite system of linear constraints in M_Q of a fixed rank.
#[derive(Clone, Debug)]
pub struct IneqSystem {
    pub rank: usize,
    pub rows: Vec<IneqRow>,
}

impl IneqSystem {
    pub fn new(rank: usize, rows: Vec<IneqRow>) -> Self {
        assert!(rows.iter().all(|r| r.normal.len() == rank));
        IneqSystem { rank, rows }
    }

    pub fn row_i64(rank: usize, normal: &[i64], offset: Rat, rel: Rel) -> IneqRow {
        assert_eq!(normal.len(), rank);
        IneqRow { normal: super::ivec(normal), offset, rel }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Empty,
    Bounded,
    Unbounded,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyhedronError {
    #[error("solution region is unbounded; refusing to enumerate lattice points")]
    UnboundedRegion,
}

// internal working row: Σ c_i x_i + off  rel  0, rationals throughout
#[derive(Clone, Debug, PartialEq)]
struct Row {
    c: Vec<Rat>,
    off: Rat,
    rel: Rel,
}

impl Row {
    fn normalize(&mut self) {
        // scale to integer entries with content 1
        let mut lcm = self.off.denom().abs();
        for x in &self.c {
            lcm = num_integer::lcm(lcm, x.denom().abs());
        }
        let mut gcd = (self.off.numer() * (&lcm / self.off.denom())).abs();
        for x in &self.c {
            gcd = num_integer::gcd(gcd, (x.numer() * (&lcm / x.denom())).abs());
        }
        if gcd.is_zero() {
            return;
        }
        let scale = Rat::new(lcm, gcd);
        for x in self.c.iter_mut() {
            *x *= &scale;
        }
        self.off *= &scale;
    }
}

fn to_rows(sys: &IneqSystem) -> Vec<Row> {
    sys.rows
        .iter()
        .map(|r| Row {
            c: r.normal.iter().map(|x| Rat::from(x.clone())).collect(),
            off: r.offset.clone(),
            rel: r.rel,
        })
        .collect()
}

/// Eliminate variable `j`, returning a system over the remaining variables
/// (column j removed). Equalities are split into two inequalities first.
fn eliminate_var(rows: &[Row], j: usize) -> Vec<Row> {
    let mut ineqs: Vec<Row> = Vec::new();
    for r in rows {
        match r.rel {
            Rel::Eq => {
                ineqs.push(Row { c: r.c.clone(), off: r.off.clone(), rel: Rel::Ge });
                ineqs.push(Row {
                    c: r.c.iter().map(|x| -x).collect(),
                    off: -&r.off,
                    rel: Rel::Ge,
                });
            }
            _ => ineqs.push(r.clone()),
        }
    }
    let mut lower = Vec::new(); // coefficient at j positive
    let mut upper = Vec::new(); // negative
    let mut out = Vec::new();
    for r in ineqs {
        if r.c[j].is_zero() {
            let mut s = r.clone();
            s.c.remove(j);
            out.push(s);
        } else if r.c[j].is_positive() {
            lower.push(r);
        } else {
            upper.push(r);
        }
    }
    for lo in &lower {
        for up in &upper {
            // scale so the j coefficients cancel
            let a = &lo.c[j];
            let b = -&up.c[j];
            let mut c = Vec::with_capacity(lo.c.len() - 1);
            for k in 0..lo.c.len() {
                if k == j {
                    continue;
                }
                c.push(&lo.c[k] * &b + &up.c[k] * a);
            }
            let off = &lo.off * &b + &up.off * a;
            let rel = if lo.rel == Rel::Gt || up.rel == Rel::Gt { Rel::Gt } else { Rel::Ge };
            let mut row = Row { c, off, rel };
            row.normalize();
            if !out.contains(&row) {
                out.push(row);
            }
        }
    }
    out
}

/// Feasibility of a system with no variables left: constant constraints.
fn constants_ok(rows: &[Row]) -> bool {
    rows.iter().all(|r| match r.rel {
        Rel::Ge => !r.off.is_negative(),
        Rel::Gt => r.off.is_positive(),
        Rel::Eq => r.off.is_zero(),
    })
}

fn rows_feasible(mut rows: Vec<Row>, mut nvars: usize) -> bool {
    while nvars > 0 {
        rows = eliminate_var(&rows, 0);
        nvars -= 1;
    }
    constants_ok(&rows)
}

/// Exact classification of the rational solution set.
pub fn feasible(sys: &IneqSystem) -> Feasibility {
    let rows = to_rows(sys);
    if !rows_feasible(rows.clone(), sys.rank) {
        return Feasibility::Empty;
    }
    // recession cone: homogeneous relaxation; unbounded iff it has a
    // nonzero point, i.e. some coordinate can be made strictly positive
    // or strictly negative
    let homog: Vec<Row> = rows
        .iter()
        .map(|r| Row {
            c: r.c.clone(),
            off: Rat::zero(),
            rel: if r.rel == Rel::Eq { Rel::Eq } else { Rel::Ge },
        })
        .collect();
    for i in 0..sys.rank {
        for sign in [1i64, -1] {
            let mut c = vec![Rat::zero(); sys.rank];
            c[i] = Rat::from(Int::from(sign));
            let mut probe = homog.clone();
            probe.push(Row { c, off: Rat::zero(), rel: Rel::Gt });
            if rows_feasible(probe, sys.rank) {
                return Feasibility::Unbounded;
            }
        }
    }
    Feasibility::Bounded
}

/// All integer points of a bounded system, in lexicographic order.
pub fn lattice_points(sys: &IneqSystem) -> Result<Vec<IntVec>, PolyhedronError> {
    match feasible(sys) {
        Feasibility::Unbounded => return Err(PolyhedronError::UnboundedRegion),
        Feasibility::Empty => return Ok(Vec::new()),
        Feasibility::Bounded => {}
    }
    let rows = to_rows(sys);
    let mut acc = Vec::new();
    enumerate(&rows, sys.rank, &mut Vec::new(), &mut acc);
    Ok(acc)
}

fn enumerate(rows: &[Row], nvars: usize, prefix: &mut Vec<Int>, acc: &mut Vec<IntVec>) {
    if nvars == 0 {
        if constants_ok(rows) {
            acc.push(prefix.clone());
        }
        return;
    }
    // project away every variable except the first to bound it
    let mut proj = rows.to_vec();
    for _ in 1..nvars {
        proj = eliminate_var(&proj, 1);
    }
    let mut lo: Option<Int> = None;
    let mut hi: Option<Int> = None;
    let mut range_empty = false;
    for r in &proj {
        let rels: &[Rel] = if r.rel == Rel::Eq { &[Rel::Ge] } else { &[r.rel] };
        let variants: Vec<(Rat, Rel)> = if r.rel == Rel::Eq {
            vec![
                (r.c[0].clone(), Rel::Ge),
                (-&r.c[0], Rel::Ge), // with negated offset handled below
            ]
        } else {
            vec![(r.c[0].clone(), rels[0])]
        };
        for (idx, (coef, rel)) in variants.iter().enumerate() {
            let off = if idx == 1 { -&r.off } else { r.off.clone() };
            if coef.is_zero() {
                let ok = match rel {
                    Rel::Gt => off.is_positive(),
                    _ => !off.is_negative(),
                };
                if !ok {
                    range_empty = true;
                }
                continue;
            }
            let bound = -&off / coef;
            if coef.is_positive() {
                // x >= bound (or >)
                let b = if *rel == Rel::Gt && bound.is_integer() {
                    bound.to_integer() + Int::one()
                } else {
                    bound.ceil().to_integer()
                };
                lo = Some(match lo {
                    Some(cur) => cur.max(b),
                    None => b,
                });
            } else {
                // x <= bound (or <)
                let b = if *rel == Rel::Gt && bound.is_integer() {
                    bound.to_integer() - Int::one()
                } else {
                    bound.floor().to_integer()
                };
                hi = Some(match hi {
                    Some(cur) => cur.min(b),
                    None => b,
                });
            }
        }
    }
    if range_empty {
        return;
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        // bounded precondition guarantees both bounds exist unless the
        // projection is already inconsistent
        return;
    };
    let mut v = lo;
    while v <= hi {
        let sub: Vec<Row> = rows
            .iter()
            .map(|r| {
                let mut c = r.c.clone();
                let first = c.remove(0);
                Row { c, off: &r.off + first * Rat::from(v.clone()), rel: r.rel }
            })
            .collect();
        prefix.push(v.clone());
        enumerate(&sub, nvars - 1, prefix, acc);
        prefix.pop();
        v += Int::one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{ivec, rat};

    fn sys(rank: usize, rows: Vec<(&[i64], (i64, i64), Rel)>) -> IneqSystem {
        IneqSystem::new(
            rank,
            rows.into_iter()
                .map(|(n, (p, q), rel)| IneqRow { normal: ivec(n), offset: rat(p, q), rel })
                .collect(),
        )
    }

    #[test]
    fn interval_is_bounded() {
        let s = sys(
            1,
            vec![
                (&[1], (0, 1), Rel::Ge),
                (&[1], (-1, 1), Rel::Ge),
                (&[-1], (2, 1), Rel::Ge),
            ],
        );
        assert_eq!(feasible(&s), Feasibility::Bounded);
    }

    #[test]
    fn contradiction_is_empty() {
        let s = sys(1, vec![(&[1], (0, 1), Rel::Gt), (&[-1], (0, 1), Rel::Gt)]);
        assert_eq!(feasible(&s), Feasibility::Empty);
    }

    #[test]
    fn half_line_is_unbounded() {
        let s = sys(1, vec![(&[1], (0, 1), Rel::Ge)]);
        assert_eq!(feasible(&s), Feasibility::Unbounded);
        assert_eq!(lattice_points(&s), Err(PolyhedronError::UnboundedRegion));
    }

    #[test]
    fn unit_square_points() {
        let s = sys(
            2,
            vec![
                (&[1, 0], (0, 1), Rel::Ge),
                (&[-1, 0], (1, 1), Rel::Ge),
                (&[0, 1], (0, 1), Rel::Ge),
                (&[0, -1], (1, 1), Rel::Ge),
            ],
        );
        let pts = lattice_points(&s).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], ivec(&[0, 0]));
        assert_eq!(pts[3], ivec(&[1, 1]));
    }

    #[test]
    fn dilated_simplex_count() {
        // {x>=0, y>=0, x+y<=2} has C(4,2)=6 integer points
        let s = sys(
            2,
            vec![
                (&[1, 0], (0, 1), Rel::Ge),
                (&[0, 1], (0, 1), Rel::Ge),
                (&[-1, -1], (2, 1), Rel::Ge),
            ],
        );
        assert_eq!(lattice_points(&s).unwrap().len(), 6);
    }

    #[test]
    fn open_unit_interval_has_no_integers() {
        let s = sys(1, vec![(&[1], (0, 1), Rel::Gt), (&[-1], (1, 1), Rel::Gt)]);
        assert_eq!(feasible(&s), Feasibility::Bounded);
        assert!(lattice_points(&s).unwrap().is_empty());
    }

    #[test]
    fn equality_slice() {
        // x = y, 0 <= x <= 3
        let s = sys(
            2,
            vec![
                (&[1, -1], (0, 1), Rel::Eq),
                (&[1, 0], (0, 1), Rel::Ge),
                (&[-1, 0], (3, 1), Rel::Ge),
            ],
        );
        let pts = lattice_points(&s).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p[0] == p[1]));
    }

    #[test]
    fn matches_brute_force_box_scan() {
        use num_traits::Zero;
        let cases = vec![
            sys(
                2,
                vec![
                    (&[2, 3], (5, 1), Rel::Ge),
                    (&[-1, 1], (7, 2), Rel::Ge),
                    (&[-1, -2], (9, 1), Rel::Ge),
                    (&[1, -1], (4, 1), Rel::Ge),
                ],
            ),
            sys(
                2,
                vec![
                    (&[1, 0], (3, 1), Rel::Gt),
                    (&[-1, 0], (3, 1), Rel::Ge),
                    (&[0, 1], (1, 3), Rel::Ge),
                    (&[0, -1], (5, 2), Rel::Gt),
                    (&[1, 1], (0, 1), Rel::Ge),
                ],
            ),
        ];
        for s in cases {
            if feasible(&s) == Feasibility::Unbounded {
                panic!("test case should be bounded");
            }
            let got = lattice_points(&s).unwrap();
            let mut expect = Vec::new();
            for x in -10i64..=10 {
                for y in -10i64..=10 {
                    let p = ivec(&[x, y]);
                    let ok = s.rows.iter().all(|r| {
                        let lhs: Rat = r
                            .normal
                            .iter()
                            .zip(&p)
                            .map(|(a, b)| Rat::from(a * b))
                            .sum::<Rat>()
                            + r.offset.clone();
                        match r.rel {
                            Rel::Ge => !lhs.is_negative(),
                            Rel::Gt => lhs.is_positive(),
                            Rel::Eq => lhs.is_zero(),
                        }
                    });
                    if ok {
                        expect.push(p);
                    }
                }
            }
            assert_eq!(got, expect);
        }
    }
}
