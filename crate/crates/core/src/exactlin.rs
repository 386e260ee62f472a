//! Exact linear algebra over the rationals, plus a fast prime-field mirror.
//!
//! Everything rank-critical in this crate runs through [`ExactMatrix`]:
//! rank is computed by fraction-free (Bareiss) elimination on an integerized
//! copy, and kernels / solves go through rational Gauss-Jordan.  No floating
//! point anywhere, so a reported rank is a theorem about the input matrix,
//! not an estimate.
//!
//! [`PrimeFieldMatrix`] holds the same data reduced mod [`PRIME`].  Rank mod
//! a prime is a lower bound on the rational rank (specializing can only kill
//! minors), which is exactly the right one-sided error for randomized generic
//! rank computation: the maximum over random samples never overshoots.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Modulus for the fast path: `2^62 - 57`, the largest prime below `2^62`
/// minus a little headroom so products fit comfortably in `u128`.
pub const PRIME: u64 = 4_611_686_018_427_387_847;

/// `a * b mod PRIME` without overflow.
pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

/// `a^e mod PRIME` by binary exponentiation.
pub fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    a %= PRIME;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse mod [`PRIME`]; `a` must not be divisible by it.
pub fn invmod(a: u64) -> u64 {
    debug_assert!(a % PRIME != 0, "zero has no inverse");
    powmod(a, PRIME - 2)
}

/// Dense matrix of arbitrary-precision rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    /// Build from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nrows = rows.len();
        ExactMatrix { rows: nrows, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mat_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Rank by fraction-free elimination.
    ///
    /// Each row is first scaled by the lcm of its denominators (rank is
    /// unchanged), then Bareiss one-step elimination runs on the integer
    /// matrix: every interior division by the previous pivot is exact, which
    /// `debug_assert`s verify.  Pivots are chosen with minimal absolute value
    /// to slow coefficient growth.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integerize(self.row(i))).collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            // smallest |nonzero| entry in column c at or below row r
            let pivot = (r..rows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by_key(|&i| m[i][c].abs());
            let Some(p) = pivot else { continue };
            m.swap(r, p);
            for i in (r + 1)..rows {
                if m[i][c].is_zero() {
                    // still need the Bareiss rescale on the rest of the row
                    for j in (c + 1)..cols {
                        let t = &m[r][c] * &m[i][j];
                        debug_assert!((&t % &prev).is_zero(), "inexact division in elimination");
                        m[i][j] = t / &prev;
                    }
                    continue;
                }
                for j in (c + 1)..cols {
                    let t = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    debug_assert!((&t % &prev).is_zero(), "inexact division in elimination");
                    m[i][j] = t / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            r += 1;
        }
        r
    }

    /// Reduced row echelon form and the pivot columns, by rational
    /// Gauss-Jordan.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            for j in 0..m.cols {
                let a = m.get(r, j).clone();
                let b = m.get(p, j).clone();
                m.set(r, j, b);
                m.set(p, j, a);
            }
            let inv = m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j) / &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right kernel `{x : Ax = 0}`.  One vector per free
    /// column, in ascending free-column order.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (rr, pivots) = self.rref();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut x = vec![BigRational::zero(); self.cols];
            x[f] = BigRational::one();
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = -rr.get(i, f).clone();
            }
            basis.push(x);
        }
        basis
    }

    /// Basis of the left kernel `{w : wA = 0}`.
    pub fn cokernel(&self) -> Vec<Vec<BigRational>> {
        self.transpose().nullspace()
    }

    /// Any solution of `Ax = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = ExactMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (rr, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = rr.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Reduce every entry mod [`PRIME`].  `None` if a denominator vanishes
    /// mod the prime (cannot happen for the coordinate sizes this crate
    /// samples, but the caller decides how rude to be).
    pub fn to_prime_field(&self) -> Option<PrimeFieldMatrix> {
        let mut m = PrimeFieldMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = self.get(i, j);
                let num = bigint_mod_p(r.numer());
                let den = bigint_mod_p(r.denom());
                if den == 0 {
                    return None;
                }
                m.set(i, j, mulmod(num, invmod(den)));
            }
        }
        Some(m)
    }
}

/// Scale a rational row to integers by the lcm of its denominators.
fn integerize(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, r| num::integer::lcm(acc, r.denom().clone()));
    row.iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect()
}

fn bigint_mod_p(x: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let m = ((x % &p) + &p) % &p;
    m.to_u64().expect("residue fits in u64")
}

/// Rank of a list of row vectors (empty list has rank 0).
pub fn rank_of_rows(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(rows.to_vec()).rank()
}

/// Is `v` in the linear span of `basis`?
pub fn in_span(v: &[BigRational], basis: &[Vec<BigRational>]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut rows = basis.to_vec();
    let r0 = rank_of_rows(&rows);
    rows.push(v.to_vec());
    rank_of_rows(&rows) == r0
}

/// Dense matrix over the field of [`PRIME`] elements.
#[derive(Clone, Debug)]
pub struct PrimeFieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl PrimeFieldMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        PrimeFieldMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % PRIME;
    }

    /// Rank by plain Gaussian elimination over the field.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |d: &[u64], i: usize, j: usize| d[i * cols + j];
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| at(&m, i, c) != 0) else { continue };
            m.swap_rows(rows, cols, r, p);
            let inv = invmod(at(&m, r, c));
            for i in (r + 1)..rows {
                let f = at(&m, i, c);
                if f == 0 {
                    continue;
                }
                let f = mulmod(f, inv);
                for j in c..cols {
                    let sub = mulmod(f, at(&m, r, j));
                    let idx = i * cols + j;
                    m[idx] = (m[idx] + PRIME - sub) % PRIME;
                }
            }
            r += 1;
        }
        r
    }
}

trait SwapRows {
    fn swap_rows(&mut self, rows: usize, cols: usize, a: usize, b: usize);
}

impl SwapRows for Vec<u64> {
    fn swap_rows(&mut self, _rows: usize, cols: usize, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..cols {
            self.swap(a * cols + j, b * cols + j);
        }
    }
}

/// Convenience: a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience: a rational from an integer.
pub fn rat_int(num: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(num))
}
