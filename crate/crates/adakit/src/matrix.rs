//! Dense exact matrices over [`Scalar`], with row-vector convention.
//!
//! A linear map f: U -> V is a `dim U x dim V` matrix A acting by v |-> v*A,
//! so composition in diagram order is plain matrix multiplication. All rank,
//! kernel and solving routines are exact Gaussian elimination; a u64 modular
//! shadow (`ModMatrix`) serves as a fast certified-zero prefilter.

use crate::scalar::{FieldSpec, Scalar};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            field,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>, cols: usize, field: FieldSpec) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            field,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, field: FieldSpec, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Matrix::zeros(rows, cols, field);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch in mul");
        let mut out = Matrix::zeros(self.rows, rhs.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, &cur + &(a * b));
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = &out.data[i] + &rhs.data[i];
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = &out.data[i] - &rhs.data[i];
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = &*v * c;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            field: self.field,
            data,
        }
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form. Returns pivot columns in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // pick the shortest nonzero entry as pivot to limit coefficient growth
            let mut best: Option<(usize, usize)> = None;
            for i in r..self.rows {
                let v = self.get(i, c);
                if !v.is_zero() {
                    let h = v.abs_height();
                    if best.map_or(true, |(_, bh)| h < bh) {
                        best = Some((i, h));
                    }
                }
            }
            let Some((pi, _)) = best else { continue };
            self.swap_rows(r, pi);
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j).clone();
                self.set(r, j, &v * &inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = &self.get(i, j).clone() - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the left kernel {x : x*A = 0}, one solution per row.
    pub fn kernel_rows(&self) -> Matrix {
        // reduce [A | I]; rows where the A-part vanished carry kernel combos
        let aug = self.hstack(&Matrix::identity(self.rows, self.field));
        let mut m = aug;
        // eliminate only within the first `cols` columns
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, usize)> = None;
            for i in r..m.rows {
                let v = m.get(i, c);
                if !v.is_zero() {
                    let h = v.abs_height();
                    if best.map_or(true, |(_, bh)| h < bh) {
                        best = Some((i, h));
                    }
                }
            }
            let Some((pi, _)) = best else { continue };
            m.swap_rows(r, pi);
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                let v = m.get(r, j).clone();
                m.set(r, j, &v * &inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = &m.get(i, j).clone() - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            r += 1;
        }
        let mut out_rows = Vec::new();
        for i in 0..m.rows {
            let a_zero = (0..self.cols).all(|j| m.get(i, j).is_zero());
            if a_zero {
                out_rows.push(m.row(i)[self.cols..].to_vec());
            }
        }
        Matrix::from_rows(out_rows, self.rows, self.field)
    }

    /// Basis of {x column : A*x = 0}, returned as rows of the result.
    pub fn kernel_cols(&self) -> Matrix {
        self.transpose().kernel_rows()
    }

    /// Row-space basis in RREF.
    pub fn row_basis(&self) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref();
        let rk = pivots.len();
        let mut rows = Vec::with_capacity(rk);
        for i in 0..rk {
            rows.push(m.row(i).to_vec());
        }
        Matrix::from_rows(rows, self.cols, self.field)
    }

    /// Solves X * basis = targets, expressing each target row in the given
    /// row family. None if some row is outside the span.
    pub fn express_rows(basis: &Matrix, targets: &Matrix) -> Option<Matrix> {
        assert_eq!(basis.cols, targets.cols);
        // reduce [basis | I], then eliminate targets against the reduced rows
        let aug = basis.hstack(&Matrix::identity(basis.rows, basis.field));
        let mut m = aug;
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut r = 0;
        for c in 0..basis.cols {
            if r == m.rows {
                break;
            }
            let mut sel = None;
            for i in r..m.rows {
                if !m.get(i, c).is_zero() {
                    sel = Some(i);
                    break;
                }
            }
            let Some(pi) = sel else { continue };
            m.swap_rows(r, pi);
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                let v = m.get(r, j).clone();
                m.set(r, j, &v * &inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = &m.get(i, j).clone() - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        let mut out = Matrix::zeros(targets.rows, basis.rows, basis.field);
        for t in 0..targets.rows {
            let mut residual: Vec<Scalar> = targets.row(t).to_vec();
            let mut combo = vec![basis.field.zero(); basis.rows];
            for &(pr, pc) in &pivots {
                let f = residual[pc].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..basis.cols {
                    residual[j] = &residual[j] - &(&f * m.get(pr, j));
                }
                for j in 0..basis.rows {
                    combo[j] = &combo[j] + &(&f * m.get(pr, basis.cols + j));
                }
            }
            if residual.iter().any(|v| !v.is_zero()) {
                return None;
            }
            for j in 0..basis.rows {
                out.set(t, j, combo[j].clone());
            }
        }
        Some(out)
    }

    /// Exact inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = Matrix::express_rows(self, &Matrix::identity(self.rows, self.field))?;
        Some(x)
    }

    /// Unit row vector of length n.
    pub fn unit_row(n: usize, i: usize, field: FieldSpec) -> Matrix {
        let mut m = Matrix::zeros(1, n, field);
        m.set(0, i, field.one());
        m
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Fast u64 matrix over F_p used to prefilter ranks. A reduction failure
/// (denominator divisible by p) is reported so the caller can change primes.
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<u64>,
}

/// Primes used for modular prefilters, largest first. All below 2^31 so that
/// products fit in u64 via u128 widening.
pub const PREFILTER_PRIMES: [u64; 3] = [2_147_483_629, 2_147_483_587, 1_073_741_789];

impl ModMatrix {
    pub fn reduce(m: &Matrix, p: u64) -> Option<ModMatrix> {
        let mut data = Vec::with_capacity(m.rows * m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                data.push(m.get(i, j).reduce_mod(p)?);
            }
        }
        Some(ModMatrix {
            rows: m.rows,
            cols: m.cols,
            p,
            data,
        })
    }

    pub fn rank(&mut self) -> usize {
        let p = self.p as u128;
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let mut piv = None;
            for i in rank..self.rows {
                if self.data[i * self.cols + c] != 0 {
                    piv = Some(i);
                    break;
                }
            }
            let Some(pi) = piv else { continue };
            if pi != rank {
                for j in 0..self.cols {
                    self.data.swap(pi * self.cols + j, rank * self.cols + j);
                }
            }
            let inv = {
                let mut b = self.data[rank * self.cols + c];
                let mut e = self.p - 2;
                let mut acc: u64 = 1;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = (acc as u128 * b as u128 % p) as u64;
                    }
                    b = (b as u128 * b as u128 % p) as u64;
                    e >>= 1;
                }
                acc
            };
            for j in c..self.cols {
                self.data[rank * self.cols + j] =
                    (self.data[rank * self.cols + j] as u128 * inv as u128 % p) as u64;
            }
            for i in 0..self.rows {
                if i == rank {
                    continue;
                }
                let f = self.data[i * self.cols + c];
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let sub = f as u128 * self.data[rank * self.cols + j] as u128 % p;
                    let cur = self.data[i * self.cols + j] as u128;
                    self.data[i * self.cols + j] = ((cur + p - sub) % p) as u64;
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        FieldSpec::Rationals.from_i64(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect(),
            rows[0].len(),
            FieldSpec::Rationals,
        )
    }

    #[test]
    fn rank_and_kernel() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_rows();
        assert_eq!(k.rows, 1);
        // kernel row x satisfies x*M = 0
        assert!(k.mul(&m).is_zero());
    }

    #[test]
    fn kernel_cols_solves_right_nullspace() {
        let m = mat(&[&[1, 1], &[1, 1]]);
        let k = m.kernel_cols();
        assert_eq!(k.rows, 1);
        assert!(m.mul(&k.transpose()).is_zero());
    }

    #[test]
    fn express_and_inverse() {
        let basis = mat(&[&[1, 0, 1], &[0, 1, 1]]);
        let targets = mat(&[&[2, 3, 5]]);
        let x = Matrix::express_rows(&basis, &targets).unwrap();
        assert_eq!(x.mul(&basis), targets);
        assert!(Matrix::express_rows(&basis, &mat(&[&[1, 0, 0]])).is_none());

        let a = mat(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2, FieldSpec::Rationals));
    }

    #[test]
    fn modular_rank_matches_exact_on_generic_input() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(m.rank(), 3);
        for p in PREFILTER_PRIMES {
            let mut mm = ModMatrix::reduce(&m, p).unwrap();
            assert_eq!(mm.rank(), 3);
        }
    }

    #[test]
    fn rref_is_canonical() {
        let mut a = mat(&[&[0, 2, 4], &[1, 1, 1]]);
        let piv = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(a, mat(&[&[1, 0, -1], &[0, 1, 2]]));
    }
}

/// Sparse row-major F_p matrix for fast rank computation on the large,
/// extremely sparse intertwining systems. Rows hold sorted (col, val) pairs.
pub struct SparseMod {
    pub p: u64,
    pub ncols: usize,
    pub rows: Vec<Vec<(u32, u64)>>,
}

impl SparseMod {
    pub fn new(ncols: usize, p: u64) -> Self {
        SparseMod {
            p,
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, mut row: Vec<(u32, u64)>) {
        row.retain(|&(_, v)| v % self.p != 0);
        row.sort_unstable_by_key(|&(c, _)| c);
        // merge duplicate columns
        let mut merged: Vec<(u32, u64)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => {
                    *lv = (*lv + v) % self.p;
                }
                _ => merged.push((c, v % self.p)),
            }
        }
        merged.retain(|&(_, v)| v != 0);
        if !merged.is_empty() {
            self.rows.push(merged);
        }
    }

    fn axpy(p: u64, target: &[(u32, u64)], factor: u64, source: &[(u32, u64)]) -> Vec<(u32, u64)> {
        // target - factor * source, merged over sorted columns
        let mut out = Vec::with_capacity(target.len() + source.len());
        let (mut i, mut j) = (0, 0);
        while i < target.len() || j < source.len() {
            let tc = target.get(i).map(|&(c, _)| c);
            let sc = source.get(j).map(|&(c, _)| c);
            match (tc, sc) {
                (Some(a), Some(b)) if a == b => {
                    let sub = factor as u128 * source[j].1 as u128 % p as u128;
                    let v = ((target[i].1 as u128 + p as u128 - sub) % p as u128) as u64;
                    if v != 0 {
                        out.push((a, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    out.push(target[i]);
                    i += 1;
                    let _ = b;
                }
                (Some(_), Some(_)) | (None, Some(_)) => {
                    let sub = factor as u128 * source[j].1 as u128 % p as u128;
                    let v = ((p as u128 - sub) % p as u128) as u64;
                    if v != 0 {
                        out.push((source[j].0, v));
                    }
                    j += 1;
                }
                (Some(_), None) => {
                    out.push(target[i]);
                    i += 1;
                }
                (None, None) => break,
            }
        }
        out
    }

    /// Rank by elimination with a lightest-row pivot heuristic to limit
    /// fill-in.
    pub fn rank(&mut self) -> usize {
        let p = self.p;
        let mut rank = 0;
        let mut active: Vec<Vec<(u32, u64)>> = std::mem::take(&mut self.rows);
        // index: column -> active row ids holding it (rebuilt lazily)
        while !active.is_empty() {
            // choose the sparsest row
            let (idx, _) = active
                .iter()
                .enumerate()
                .min_by_key(|(_, r)| r.len())
                .unwrap();
            let piv_row = active.swap_remove(idx);
            if piv_row.is_empty() {
                continue;
            }
            rank += 1;
            let (pc, pv) = piv_row[0];
            let pv_inv = {
                let mut b = pv;
                let mut e = p - 2;
                let mut acc = 1u64;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = (acc as u128 * b as u128 % p as u128) as u64;
                    }
                    b = (b as u128 * b as u128 % p as u128) as u64;
                    e >>= 1;
                }
                acc
            };
            let mut next = Vec::with_capacity(active.len());
            for row in active {
                if let Ok(pos) = row.binary_search_by_key(&pc, |&(c, _)| c) {
                    let f = (row[pos].1 as u128 * pv_inv as u128 % p as u128) as u64;
                    let new = Self::axpy(p, &row, f, &piv_row);
                    if !new.is_empty() {
                        next.push(new);
                    }
                } else {
                    next.push(row);
                }
            }
            active = next;
        }
        rank
    }
}

#[cfg(test)]
mod sparse_tests {
    use super::*;
    use crate::scalar::FieldSpec;

    #[test]
    fn sparse_rank_matches_dense() {
        let field = FieldSpec::Rationals;
        let m = Matrix::from_fn(6, 7, field, |i, j| {
            field.from_i64((((i * 7 + j * 3) % 5) as i64) - 2)
        });
        let p = PREFILTER_PRIMES[0];
        let mut sp = SparseMod::new(7, p);
        for i in 0..6 {
            let mut row = Vec::new();
            for j in 0..7 {
                let v = m.get(i, j).reduce_mod(p).unwrap();
                if v != 0 {
                    row.push((j as u32, v));
                }
            }
            sp.push_row(row);
        }
        assert_eq!(sp.rank(), m.rank());
    }
}
