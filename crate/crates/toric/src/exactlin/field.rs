//! Coefficient fields: Q and F_p behind one interface, so the Čech
//! machinery is written once and runs in any characteristic.

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::mat::{rank_over, IMat};
use super::{Int, Rat};

/// Selects the coefficient field for rank and cohomology computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FieldSel {
    Rationals,
    PrimeField(u32),
}

impl FieldSel {
    pub fn prime(p: u32) -> Result<FieldSel, FieldError> {
        if p < 2 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSel::PrimeField(p))
    }

    pub fn label(&self) -> String {
        match self {
            FieldSel::Rationals => "Q".to_string(),
            FieldSel::PrimeField(p) => format!("F{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<FieldSel, FieldError> {
        if s == "Q" {
            return Ok(FieldSel::Rationals);
        }
        let p = s
            .strip_prefix('F')
            .and_then(|t| t.parse::<u32>().ok())
            .ok_or_else(|| FieldError::BadLabel(s.to_string()))?;
        FieldSel::prime(p)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime < 2^31")]
    NotPrime(u32),
    #[error("unrecognized field label {0:?} (expected Q or Fp)")]
    BadLabel(String),
}

fn is_prime(p: u32) -> bool {
    if p < 2 || p >= 1 << 31 {
        return false;
    }
    let mut d = 2u64;
    let p = p as u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic context for a field with runtime data (the prime for F_p).
pub trait FieldOps {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, x: &Int) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// Rank of a matrix given as rows.
    fn rank(&self, m: &[Vec<Self::Elem>]) -> usize;

    /// Basis of the null space {x : M x = 0}, as column vectors.
    fn kernel_basis(&self, m: &[Vec<Self::Elem>], cols: usize) -> Vec<Vec<Self::Elem>> {
        let (rref, pivots) = self.rref(m, cols);
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![self.zero(); cols];
            v[free] = self.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = self.neg(&rref[r][free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Solve M x = b for each column b of `rhs`; None if inconsistent.
    fn solve(
        &self,
        m: &[Vec<Self::Elem>],
        cols: usize,
        rhs: &[Vec<Self::Elem>],
    ) -> Option<Vec<Vec<Self::Elem>>> {
        // augment, reduce, read off
        let aug: Vec<Vec<Self::Elem>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend(rhs.iter().map(|col| col[i].clone()));
                r
            })
            .collect();
        let total = cols + rhs.len();
        let (rref, pivots) = self.rref(&aug, total);
        if pivots.iter().any(|&p| p >= cols) {
            return None;
        }
        let mut out = Vec::new();
        for k in 0..rhs.len() {
            let mut x = vec![self.zero(); cols];
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = rref[r][cols + k].clone();
            }
            out.push(x);
        }
        Some(out)
    }

    /// Reduced row echelon form; returns (rows, pivot columns).
    fn rref(&self, m: &[Vec<Self::Elem>], cols: usize) -> (Vec<Vec<Self::Elem>>, Vec<usize>) {
        let mut rows: Vec<Vec<Self::Elem>> = m.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(pi) = (r..rows.len()).find(|&i| !self.is_zero(&rows[i][c])) else {
                continue;
            };
            rows.swap(r, pi);
            let inv = self.inv(&rows[r][c]);
            for j in 0..cols.max(rows[r].len()) {
                if j < rows[r].len() {
                    rows[r][j] = self.mul(&rows[r][j], &inv);
                }
            }
            for i in 0..rows.len() {
                if i == r || self.is_zero(&rows[i][c]) {
                    continue;
                }
                let f = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let d = self.mul(&f, &rows[r][j]);
                    rows[i][j] = self.sub(&rows[i][j], &d);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        (rows, pivots)
    }
}

/// The rationals.
pub struct QOps;

impl FieldOps for QOps {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn from_int(&self, x: &Int) -> Rat {
        Rat::from(x.clone())
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn inv(&self, a: &Rat) -> Rat {
        a.recip()
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }

    fn rank(&self, m: &[Vec<Rat>]) -> usize {
        // clear denominators row-wise and hand off to fraction-free Bareiss
        if m.is_empty() {
            return 0;
        }
        let cols = m[0].len();
        let rows: Vec<Vec<Int>> = m
            .iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(Int::one(), |acc, x| num_integer::lcm(acc, x.denom().abs()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect();
        let _ = cols;
        rank_over(&IMat::from_rows(rows), FieldSel::Rationals)
    }
}

/// The prime field F_p with p < 2^31; elements are canonical residues.
pub struct FpOps {
    p: i64,
}

impl FpOps {
    pub fn new(p: u32) -> Self {
        FpOps { p: p as i64 }
    }
}

impl FieldOps for FpOps {
    type Elem = i64;

    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn from_int(&self, x: &Int) -> i64 {
        let r = x % Int::from(self.p);
        r.to_i64().unwrap().rem_euclid(self.p)
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &i64, b: &i64) -> i64 {
        (a - b).rem_euclid(self.p)
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a * b % self.p
    }
    fn neg(&self, a: &i64) -> i64 {
        (-a).rem_euclid(self.p)
    }
    fn inv(&self, a: &i64) -> i64 {
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (self.p, a.rem_euclid(self.p));
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        assert_eq!(r, 1, "not invertible mod {}", self.p);
        t.rem_euclid(self.p)
    }

    fn rank(&self, m: &[Vec<i64>]) -> usize {
        if m.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<Int>> = m
            .iter()
            .map(|row| row.iter().map(|&x| Int::from(x)).collect())
            .collect();
        rank_over(&IMat::from_rows(rows), FieldSel::PrimeField(self.p as u32))
    }
}
