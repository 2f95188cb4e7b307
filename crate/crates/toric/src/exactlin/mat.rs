//! Dense integer matrices, Smith normal form and exact rank.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::FieldSel;
use super::{Int, IntVec};

/// Dense matrix with arbitrary-precision integer entries, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<IntVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        IMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| super::ivec(r)).collect())
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let c = self.cols;
            self.data.swap(a * c + j, b * c + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let c = self.cols;
            self.data.swap(i * c + a, i * c + b);
        }
    }

    /// row a -= q * row b
    fn row_sub(&mut self, a: usize, b: usize, q: &Int) {
        for j in 0..self.cols {
            let d = q * &self[(b, j)];
            self[(a, j)] -= d;
        }
    }

    /// col a -= q * col b
    fn col_sub(&mut self, a: usize, b: usize, q: &Int) {
        for i in 0..self.rows {
            let d = q * &self[(i, b)];
            self[(i, a)] -= d;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

/// U · A · V = S with U, V unimodular and S diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IMat,
    pub s: IMat,
    pub v: IMat,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }
}

pub fn smith_normal_form(a: &IMat) -> SnfResult {
    let mut s = a.clone();
    let mut u = IMat::identity(a.rows);
    let mut v = IMat::identity(a.cols);
    let n = a.rows.min(a.cols);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    if !s[(i, j)].is_zero()
                        && pivot.map_or(true, |(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, s, v, t);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..s.rows {
                if !s[(i, t)].is_zero() {
                    let q = s[(i, t)].div_floor(&s[(t, t)]);
                    s.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                    if !s[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..s.cols {
                if !s[(t, j)].is_zero() {
                    let q = s[(t, j)].div_floor(&s[(t, t)]);
                    s.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                    if !s[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // pivot divides the rest of the block, else fold an offender in
            let mut offender = None;
            'scan: for i in t + 1..s.rows {
                for j in t + 1..s.cols {
                    if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = Int::one();
                    s.row_sub(t, i, &-&one);
                    u.row_sub(t, i, &-&one);
                }
                None => break,
            }
        }
    }
    finish(u, s, v, n)
}

fn finish(mut u: IMat, mut s: IMat, v: IMat, filled: usize) -> SnfResult {
    for t in 0..filled {
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, s, v }
}

/// Rank of an integer matrix over Q (fraction-free Bareiss) or over F_p.
pub fn rank_over(a: &IMat, field: FieldSel) -> usize {
    match field {
        FieldSel::Rationals => bareiss_rank(a),
        FieldSel::PrimeField(p) => modp_rank(a, p),
    }
}

fn bareiss_rank(a: &IMat) -> usize {
    let mut m = a.clone();
    let mut prev = Int::one();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..m.cols {
        let pivot = (row..m.rows).find(|&i| !m[(i, col)].is_zero());
        let Some(p) = pivot else { continue };
        m.swap_rows(row, p);
        for i in row + 1..m.rows {
            for j in col + 1..m.cols {
                let num = &m[(row, col)] * &m[(i, j)] - &m[(i, col)] * &m[(row, j)];
                m[(i, j)] = num / &prev;
            }
            m[(i, col)] = Int::zero();
        }
        prev = m[(row, col)].clone();
        rank += 1;
        row += 1;
        if row == m.rows {
            break;
        }
    }
    rank
}

fn modp_rank(a: &IMat, p: u32) -> usize {
    let p64 = p as i64;
    let mut m: Vec<Vec<i64>> = (0..a.rows)
        .map(|i| a.row(i).iter().map(|x| reduce_mod(x, p64)).collect())
        .collect();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..a.cols {
        let Some(pi) = (row..a.rows).find(|&i| m[i][col] != 0) else { continue };
        m.swap(row, pi);
        let inv = mod_inverse(m[row][col], p64);
        for i in row + 1..a.rows {
            if m[i][col] == 0 {
                continue;
            }
            let factor = m[i][col] * inv % p64;
            for j in col..a.cols {
                m[i][j] = (m[i][j] - factor * m[row][j]).rem_euclid(p64);
            }
        }
        rank += 1;
        row += 1;
        if row == a.rows {
            break;
        }
    }
    rank
}

fn reduce_mod(x: &Int, p: i64) -> i64 {
    use num_traits::ToPrimitive;
    let r = x % Int::from(p);
    let r = r.to_i64().expect("residue fits i64");
    r.rem_euclid(p)
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    // extended Euclid; p prime, a not ≡ 0
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p, a.rem_euclid(p));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p)
}
