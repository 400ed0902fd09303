//! Dense matrices and row spaces over GF(q).
//!
//! Vectors are rows unless a function says otherwise. Subspaces keep their
//! basis in reduced row-echelon form, so equal subspaces compare equal.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Felt>,
    field: Field,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<u32> = self.row(i).iter().map(|x| x.0).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

fn mismatch(what: &str, a: (usize, usize), b: (usize, usize)) -> Error {
    Error::DimensionMismatch(format!("{what}: {}x{} vs {}x{}", a.0, a.1, b.0, b.1))
}

/// The i-th standard unit vector of length n.
pub fn unit(n: usize, i: usize) -> Vec<Felt> {
    let mut v = vec![Felt::ZERO; n];
    v[i] = Felt::ONE;
    v
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Felt::ZERO; rows * cols], field: field.clone() }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Felt::ONE;
        }
        m
    }

    /// Builds a matrix from rows of equal length. An empty list needs `cols`.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<Felt>]) -> Result<Mat> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(mismatch("ragged rows", (rows.len(), cols), (1, r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Mat { rows: rows.len(), cols, data, field: field.clone() })
    }

    /// Parses a row-major grid of canonical integers.
    pub fn from_grid(field: &Field, grid: &[Vec<u32>]) -> Result<Mat> {
        let cols = grid.first().map_or(0, Vec::len);
        let rows = grid
            .iter()
            .map(|r| r.iter().map(|&v| field.elem(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Mat::from_rows(field, cols, &rows)
    }

    pub fn to_grid(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.0).collect()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Felt {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Felt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Felt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Felt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch("operands over different fields".into()));
        }
        Ok(())
    }

    pub fn mul(&self, b: &Mat) -> Result<Mat> {
        self.check_field(b)?;
        if self.cols != b.rows {
            return Err(mismatch("mul", (self.rows, self.cols), (b.rows, b.cols)));
        }
        let mut out = Mat::zeros(&self.field, self.rows, b.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                self.field.add_scaled(dst, b.row(k), a);
            }
        }
        Ok(out)
    }

    fn zip_with(&self, b: &Mat, what: &str, f: impl Fn(Felt, Felt) -> Felt) -> Result<Mat> {
        self.check_field(b)?;
        if (self.rows, self.cols) != (b.rows, b.cols) {
            return Err(mismatch(what, (self.rows, self.cols), (b.rows, b.cols)));
        }
        let data = self.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data, field: self.field.clone() })
    }

    pub fn add(&self, b: &Mat) -> Result<Mat> {
        self.zip_with(b, "add", |x, y| self.field.add(x, y))
    }

    pub fn sub(&self, b: &Mat) -> Result<Mat> {
        self.zip_with(b, "sub", |x, y| self.field.sub(x, y))
    }

    pub fn scale(&self, c: Felt) -> Mat {
        let mut out = self.clone();
        self.field.scale(&mut out.data, c);
        out
    }

    pub fn pow(&self, mut e: u64) -> Result<Mat> {
        if !self.is_square() {
            return Err(mismatch("pow", (self.rows, self.cols), (self.cols, self.rows)));
        }
        let mut acc = Mat::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, x: &[Felt]) -> Result<Vec<Felt>> {
        if x.len() != self.cols {
            return Err(mismatch("mul_vec", (self.rows, self.cols), (x.len(), 1)));
        }
        Ok((0..self.rows).map(|i| self.field.dot(self.row(i), x)).collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, x: &[Felt]) -> Result<Vec<Felt>> {
        if x.len() != self.rows {
            return Err(mismatch("vec_mul", (1, x.len()), (self.rows, self.cols)));
        }
        let mut out = vec![Felt::ZERO; self.cols];
        for (i, &c) in x.iter().enumerate() {
            self.field.add_scaled(&mut out, self.row(i), c);
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&Mat]) -> Result<Mat> {
        let first = parts.first().ok_or_else(|| Error::DimensionMismatch("empty vstack".into()))?;
        let mut out = Mat::zeros(&first.field, 0, first.cols);
        for p in parts {
            first.check_field(p)?;
            if p.cols != first.cols {
                return Err(mismatch("vstack", (first.rows, first.cols), (p.rows, p.cols)));
            }
            out.data.extend_from_slice(&p.data);
            out.rows += p.rows;
        }
        Ok(out)
    }

    /// Assembles a block matrix; `blocks[i][j]` fills block row i, block column j.
    pub fn block(blocks: &[Vec<&Mat>]) -> Result<Mat> {
        let field = blocks
            .first()
            .and_then(|r| r.first())
            .map(|m| m.field.clone())
            .ok_or_else(|| Error::DimensionMismatch("empty block matrix".into()))?;
        let heights: Vec<usize> = blocks.iter().map(|r| r[0].rows).collect();
        let widths: Vec<usize> = blocks[0].iter().map(|m| m.cols).collect();
        let total_rows = heights.iter().sum();
        let total_cols = widths.iter().sum();
        let mut out = Mat::zeros(&field, total_rows, total_cols);
        let mut r0 = 0;
        for (bi, brow) in blocks.iter().enumerate() {
            if brow.len() != widths.len() {
                return Err(Error::DimensionMismatch("ragged block rows".into()));
            }
            let mut c0 = 0;
            for (bj, m) in brow.iter().enumerate() {
                if m.rows != heights[bi] || m.cols != widths[bj] || m.field != field {
                    return Err(mismatch("block", (heights[bi], widths[bj]), (m.rows, m.cols)));
                }
                for i in 0..m.rows {
                    let start = (r0 + i) * total_cols + c0;
                    out.data[start..start + m.cols].copy_from_slice(m.row(i));
                }
                c0 += widths[bj];
            }
            r0 += heights[bi];
        }
        Ok(out)
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        (m, pivots)
    }

    // Gauss(-Jordan) in place; returns pivot columns. Pivot rows end up on top.
    fn eliminate(&mut self, reduce_above: bool) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut pivot_row = vec![Felt::ZERO; cols];
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if src != r {
                for j in 0..cols {
                    self.data.swap(src * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            f.scale(self.row_mut(r), inv);
            pivot_row.copy_from_slice(self.row(r));
            let start = if reduce_above { 0 } else { r + 1 };
            for i in start..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if !factor.is_zero() {
                    f.sub_scaled(&mut self.data[i * cols + c..(i + 1) * cols], &pivot_row[c..], factor);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(false).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn invert(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(mismatch("invert", (self.rows, self.cols), (self.cols, self.rows)));
        }
        let n = self.rows;
        let id = Mat::identity(&self.field, n);
        let aug = Mat::block(&[vec![self, &id]])?;
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut out = Mat::zeros(&self.field, n, n);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&red.row(i)[n..]);
        }
        Ok(out)
    }

    /// Solves `self · x = b` for a square invertible matrix and column vector b.
    pub fn solve(&self, b: &[Felt]) -> Result<Vec<Felt>> {
        if !self.is_square() || b.len() != self.rows {
            return Err(mismatch("solve", (self.rows, self.cols), (b.len(), 1)));
        }
        let n = self.rows;
        let col = Mat::from_rows(&self.field, 1, &b.iter().map(|&x| vec![x]).collect::<Vec<_>>())?;
        let aug = Mat::block(&[vec![self, &col]])?;
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok((0..n).map(|i| red.get(i, n)).collect())
    }

    /// Indices of columns containing at least one nonzero entry.
    pub fn support_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&j| (0..self.rows).any(|i| !self.get(i, j).is_zero())).collect()
    }
}

/// A row space in canonical reduced echelon form.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Mat,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient())?;
        self.basis.fmt(f)
    }
}

impl Subspace {
    /// Row span of a matrix.
    pub fn span(rows: &Mat) -> Subspace {
        let (red, pivots) = rows.rref();
        let mut basis = Mat::zeros(rows.field(), pivots.len(), rows.cols());
        for i in 0..pivots.len() {
            basis.row_mut(i).copy_from_slice(red.row(i));
        }
        Subspace { basis, pivots }
    }

    pub fn from_vectors(field: &Field, ambient: usize, vectors: &[Vec<Felt>]) -> Result<Subspace> {
        Ok(Subspace::span(&Mat::from_rows(field, ambient, vectors)?))
    }

    /// Span of standard unit vectors.
    pub fn of_units(field: &Field, ambient: usize, indices: &[usize]) -> Subspace {
        let rows: Vec<Vec<Felt>> = indices.iter().map(|&i| unit(ambient, i)).collect();
        Subspace::from_vectors(field, ambient, &rows).expect("unit vectors have the ambient length")
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!("ambient {} vs {}", self.ambient(), other.ambient())));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::span(&Mat::vstack(&[&self.basis, &other.basis])?))
    }

    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize> {
        Ok(self.dim() + other.dim() - self.sum(other)?.dim())
    }

    /// The subspace `{ s·a : s ∈ self }`.
    pub fn image_mul(&self, a: &Mat) -> Result<Subspace> {
        Ok(Subspace::span(&self.basis.mul(a)?))
    }

    pub fn is_unit_vector_basis(&self) -> bool {
        (0..self.dim()).all(|i| self.basis.row(i).iter().filter(|x| !x.is_zero()).count() == 1)
    }

    /// Coordinates of v in the canonical basis, or None if v is outside.
    pub fn coords(&self, v: &[Felt]) -> Option<Vec<Felt>> {
        if v.len() != self.ambient() {
            return None;
        }
        let c: Vec<Felt> = self.pivots.iter().map(|&p| v[p]).collect();
        let back = self.basis.vec_mul(&c).ok()?;
        (back == v).then_some(c)
    }

    pub fn contains(&self, v: &[Felt]) -> bool {
        self.coords(v).is_some()
    }
}
