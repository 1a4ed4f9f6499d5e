//! Gaussian elimination over an exact field on rectangular systems.
//!
//! Pivoting always takes the first row with a nonzero entry in the current
//! column, so results are deterministic.

use crate::field::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Rect {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

impl Rect {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Rect {
        Rect {
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    /// Rows given as vectors of equal length.
    pub fn from_rows(field: &Field, rows: &[Vec<Elem>], cols: usize) -> Rect {
        let mut r = Rect::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), cols);
            r.data[i * cols..(i + 1) * cols].clone_from_slice(row);
        }
        r
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Reduces `m` to reduced row echelon form in place and returns the pivot
/// columns, considering only the first `limit` columns as pivot candidates.
pub(crate) fn rref_limited(field: &Field, m: &mut Rect, limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..limit {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !field.is_zero(m.at(r, col))) else {
            continue;
        };
        m.swap_rows(row, p);
        let inv = field.inv(m.at(row, col)).expect("pivot is nonzero");
        if !field.is_one(&inv) {
            for j in col..m.cols {
                let v = field.mul(m.at(row, j), &inv);
                m.set(row, j, v);
            }
        }
        for r in 0..m.rows {
            if r == row || field.is_zero(m.at(r, col)) {
                continue;
            }
            let factor = m.at(r, col).clone();
            for j in col..m.cols {
                if field.is_zero(m.at(row, j)) {
                    continue;
                }
                let v = field.sub(m.at(r, j), &field.mul(&factor, m.at(row, j)));
                m.set(r, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub(crate) fn rref(field: &Field, m: &mut Rect) -> Vec<usize> {
    let limit = m.cols;
    rref_limited(field, m, limit)
}

pub(crate) fn rank(field: &Field, m: &Rect) -> usize {
    let mut w = m.clone();
    rref(field, &mut w).len()
}

/// Basis of the right null space. One vector per free column, with that
/// column set to one and the other free columns to zero.
pub(crate) fn kernel(field: &Field, m: &Rect) -> Vec<Vec<Elem>> {
    let mut w = m.clone();
    let pivots = rref(field, &mut w);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![field.zero(); m.cols];
        v[free] = field.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = field.neg(w.at(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `m x = rhs` with every free variable set to zero, or
/// `None` when the system is inconsistent.
pub(crate) fn solve(field: &Field, m: &Rect, rhs: &[Elem]) -> Option<Vec<Elem>> {
    debug_assert_eq!(rhs.len(), m.rows);
    let cols = m.cols + 1;
    let mut aug = Rect::zeros(field, m.rows, cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.at(i, j).clone());
        }
        aug.set(i, m.cols, rhs[i].clone());
    }
    let pivots = rref_limited(field, &mut aug, m.cols);
    let consistent = (pivots.len()..m.rows).all(|r| field.is_zero(aug.at(r, m.cols)));
    if !consistent {
        return None;
    }
    let mut x = vec![field.zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug.at(r, m.cols).clone();
    }
    Some(x)
}

/// Rank of a family of vectors of common length.
pub(crate) fn vectors_rank(field: &Field, vs: &[Vec<Elem>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    rank(field, &Rect::from_rows(field, vs, vs[0].len()))
}
