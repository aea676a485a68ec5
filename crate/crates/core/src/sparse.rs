//! Sparse operators in canonical coordinate form.
//!
//! Entries are kept sorted by (row, col), duplicate-free, with exact zeros
//! dropped — so structurally equal operators compare equal entry-for-entry.
//! Dimensions here are a few hundred at most, so the algebra favors
//! determinism and clarity over asymptotics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T: Real> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, C<T>)>,
}

impl<T: Real> SparseOperator<T> {
    /// Builds an operator from triplets, merging duplicates and dropping
    /// zeros. Errors on out-of-range indices.
    pub fn new(nrows: usize, ncols: usize, triplets: Vec<(usize, usize, C<T>)>) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r >= nrows {
                return Err(Error::InvalidSite { site: r, sites: nrows });
            }
            if c >= ncols {
                return Err(Error::InvalidSite { site: c, sites: ncols });
            }
        }
        let mut op = Self { nrows, ncols, entries: triplets };
        op.canonicalize();
        Ok(op)
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { nrows: n, ncols: n, entries: (0..n).map(|i| (i, i, cr(T::one()))).collect() }
    }

    fn canonicalize(&mut self) {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C<T>)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != C::new(T::zero(), T::zero()));
        self.entries = merged;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, C<T>)] {
        &self.entries
    }

    /// Element-wise sum; dimensions must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { left: self.nrows, right: other.nrows });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        let mut op = Self { nrows: self.nrows, ncols: self.ncols, entries };
        op.canonicalize();
        Ok(op)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(cr(-T::one())))
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: C<T>) -> Self {
        let mut op = self.clone();
        for e in &mut op.entries {
            e.2 *= factor;
        }
        op.canonicalize();
        op
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let entries = self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        let mut op = Self { nrows: self.ncols, ncols: self.nrows, entries };
        op.canonicalize();
        op
    }

    /// Operator composition self ∘ other (matrix product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch { left: self.ncols, right: other.nrows });
        }
        // Row offsets into other's canonical entry list.
        let mut row_start = vec![other.entries.len(); other.nrows + 1];
        for (pos, &(r, _, _)) in other.entries.iter().enumerate().rev() {
            row_start[r] = pos;
        }
        for r in (0..other.nrows).rev() {
            if row_start[r] > row_start[r + 1] {
                row_start[r] = row_start[r + 1];
            }
        }
        let mut entries = Vec::new();
        let mut row_acc: std::collections::BTreeMap<usize, C<T>> = std::collections::BTreeMap::new();
        let mut i = 0;
        while i < self.entries.len() {
            let row = self.entries[i].0;
            row_acc.clear();
            while i < self.entries.len() && self.entries[i].0 == row {
                let (_, k, a) = self.entries[i];
                for &(_, j, b) in &other.entries[row_start[k]..row_start[k + 1]] {
                    *row_acc.entry(j).or_insert_with(|| cr(T::zero())) += a * b;
                }
                i += 1;
            }
            entries.extend(row_acc.iter().map(|(&j, &v)| (row, j, v)));
        }
        let mut op = Self { nrows: self.nrows, ncols: other.ncols, entries };
        op.canonicalize();
        Ok(op)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &DVector<C<T>>) -> Result<DVector<C<T>>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { left: self.ncols, right: x.len() });
        }
        let mut y = DVector::zeros(self.nrows);
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        Ok(y)
    }

    /// ⟨x|A|x⟩ for a square operator.
    pub fn expectation(&self, x: &DVector<C<T>>) -> Result<C<T>> {
        if !self.is_square() {
            return Err(Error::Unsupported("expectation of a rectangular operator"));
        }
        Ok(x.dotc(&self.apply(x)?))
    }

    pub fn to_dense(&self) -> DMatrix<C<T>> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C<T>>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != C::new(T::zero(), T::zero()) {
                    entries.push((r, c, v));
                }
            }
        }
        let mut op = Self { nrows: m.nrows(), ncols: m.ncols(), entries };
        op.canonicalize();
        op
    }

    /// Largest |entry| of (A − A†); zero iff Hermitian (up to rounding).
    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::max_value().unwrap_or_else(T::one);
        }
        self.sub(&self.adjoint()).map(|d| d.max_abs_entry()).unwrap_or_else(|_| T::one())
    }

    pub fn max_abs_entry(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, &(_, _, v)| {
            let a = crate::scalar::cmod(v);
            if a > m { a } else { m }
        })
    }

    /// Restriction to the given row/column index subsets (in order). Used to
    /// slice number-sector blocks and rectangular sector maps out of
    /// operators built on the unrestricted basis.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let row_map = index_map(self.nrows, rows)?;
        let col_map = index_map(self.ncols, cols)?;
        let entries = self
            .entries
            .iter()
            .filter_map(|&(r, c, v)| match (row_map[r], col_map[c]) {
                (Some(nr), Some(nc)) => Some((nr, nc, v)),
                _ => None,
            })
            .collect();
        let mut op = Self { nrows: rows.len(), ncols: cols.len(), entries };
        op.canonicalize();
        Ok(op)
    }
}

fn index_map(full: usize, keep: &[usize]) -> Result<Vec<Option<usize>>> {
    let mut map = vec![None; full];
    for (new, &old) in keep.iter().enumerate() {
        if old >= full {
            return Err(Error::InvalidSite { site: old, sites: full });
        }
        map[old] = Some(new);
    }
    Ok(map)
}

impl<T: Real> std::ops::Add for &SparseOperator<T> {
    type Output = SparseOperator<T>;
    fn add(self, rhs: Self) -> SparseOperator<T> {
        SparseOperator::add(self, rhs).expect("operator sum dimension mismatch")
    }
}

impl<T: Real> std::ops::Sub for &SparseOperator<T> {
    type Output = SparseOperator<T>;
    fn sub(self, rhs: Self) -> SparseOperator<T> {
        SparseOperator::sub(self, rhs).expect("operator difference dimension mismatch")
    }
}

impl<T: Real> std::ops::Mul for &SparseOperator<T> {
    type Output = SparseOperator<T>;
    fn mul(self, rhs: Self) -> SparseOperator<T> {
        SparseOperator::mul(self, rhs).expect("operator product dimension mismatch")
    }
}
