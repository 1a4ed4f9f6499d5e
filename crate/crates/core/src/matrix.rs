//! Dense square matrices over an exact field, with the structural probes the
//! decomposition machinery needs: trace form, kernels, characteristic and
//! minimal polynomials, cyclicity, centralizers, membership in the image of
//! `ad_M`, Hessenberg structure and basis construction.
//!
//! Indices are zero-based throughout. Vectors are columns, stored as plain
//! `Vec<Elem>`; bases are packed column-wise into invertible matrices.

use std::collections::BTreeSet;
use std::fmt;
use std::ops;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field, Scalar};
use crate::linalg::{self, Rect};
use crate::poly::Poly;

/// Column vector.
pub type Vector = Vec<Elem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    n: usize,
    data: Vec<Elem>,
}

/// Subdiagonal structure of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HessenbergProfile {
    /// Whether `a[i][j] = 0` whenever `i > j + 1`.
    pub is_hessenberg: bool,
    /// Zero-based `j` with `a[j + 1][j] != 0`.
    pub support: BTreeSet<usize>,
}

impl Mat {
    pub fn zeros(field: &Field, n: usize) -> Mat {
        assert!(n >= 1, "matrices have dimension at least 1");
        Mat {
            field: field.clone(),
            n,
            data: vec![field.zero(); n * n],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat {
        Mat::scalar(field, n, field.one())
    }

    pub fn scalar(field: &Field, n: usize, c: Elem) -> Mat {
        let mut m = Mat::zeros(field, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    /// Matrix unit with a one at `(i, j)`.
    pub fn unit(field: &Field, n: usize, i: usize, j: usize) -> Mat {
        let mut m = Mat::zeros(field, n);
        m.data[i * n + j] = field.one();
        m
    }

    /// Nilpotent Jordan block: ones on the superdiagonal.
    pub fn jordan(field: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n);
        for i in 0..n.saturating_sub(1) {
            m.data[i * n + i + 1] = field.one();
        }
        m
    }

    pub fn diag(field: &Field, entries: &[Elem]) -> Mat {
        let n = entries.len();
        let mut m = Mat::zeros(field, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = field.canonicalize(e);
        }
        m
    }

    pub fn from_fn(field: &Field, n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Mat {
        let mut m = Mat::zeros(field, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = field.canonicalize(&f(i, j));
            }
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Result<Mat> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(row.len(), n));
            }
            for e in row {
                if !field.contains(&e) {
                    return Err(Error::MixedFields);
                }
                data.push(field.canonicalize(&e));
            }
        }
        Ok(Mat {
            field: field.clone(),
            n,
            data,
        })
    }

    /// Integer entries mapped into the field. Panics unless square.
    pub fn from_i64(field: &Field, rows: &[&[i64]]) -> Mat {
        let n = rows.len();
        Mat::from_fn(field, n, |i, j| {
            assert_eq!(rows[i].len(), n, "matrix must be square");
            field.from_i64(rows[i][j])
        })
    }

    /// Columns given as vectors of length `n`.
    pub fn from_columns(field: &Field, cols: &[Vector]) -> Result<Mat> {
        let n = cols.len();
        if n == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        if let Some(c) = cols.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(c.len(), n));
        }
        Ok(Mat::from_fn(field, n, |i, j| cols[j][i].clone()))
    }

    /// Companion matrix of a monic polynomial of degree `n >= 1`: ones on the
    /// subdiagonal and `-c_i` in the last column.
    pub fn companion(poly: &Poly) -> Result<Mat> {
        let f = poly.field();
        let n = poly.degree().filter(|&d| d >= 1).ok_or(Error::Precondition(
            "companion matrix needs degree >= 1".into(),
        ))?;
        if !poly.is_monic() {
            return Err(Error::Precondition("companion matrix needs a monic polynomial".into()));
        }
        let mut m = Mat::zeros(f, n);
        for i in 1..n {
            m.data[i * n + i - 1] = f.one();
        }
        for i in 0..n {
            m.data[i * n + n - 1] = f.neg(&poly.coeffs()[i]);
        }
        Ok(m)
    }

    /// Uniformly random entries (integers in `-3..=3` over the rationals).
    pub fn random<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Mat {
        Mat::from_fn(field, n, |_, _| field.random(rng))
    }

    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Mat {
        loop {
            let p = Mat::random(field, n, rng);
            if p.rank() == n {
                return p;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.n + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        Scalar::new(&self.field, self.get(i, j).clone())
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.n + j] = self.field.canonicalize(&v);
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    fn check(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    fn zip(&self, other: &Mat, op: impl Fn(&Elem, &Elem) -> Elem) -> Mat {
        Mat {
            field: self.field.clone(),
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| self.field.add(a, b)))
    }

    pub fn try_sub(&self, other: &Mat) -> Result<Mat> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| self.field.sub(a, b)))
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        self.check(other)?;
        let f = &self.field;
        let n = self.n;
        let mut out = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !f.is_zero(b) {
                        out[i * n + j] = f.add(&out[i * n + j], &f.mul(a, b));
                    }
                }
            }
        }
        Ok(Mat {
            field: f.clone(),
            n,
            data: out,
        })
    }

    pub fn scale(&self, c: &Elem) -> Mat {
        let f = &self.field;
        Mat {
            field: f.clone(),
            n: self.n,
            data: self.data.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    pub fn try_scale(&self, c: &Scalar) -> Result<Mat> {
        if c.field() != &self.field {
            return Err(Error::MixedFields);
        }
        Ok(self.scale(c.elem()))
    }

    pub fn neg(&self) -> Mat {
        let f = &self.field;
        Mat {
            field: f.clone(),
            n: self.n,
            data: self.data.iter().map(|a| f.neg(a)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Elem, other: &Mat) -> Mat {
        self.zip(other, |a, b| self.field.add(a, &self.field.mul(c, b)))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.n, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Elem {
        let f = &self.field;
        (0..self.n).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    pub fn pow(&self, k: usize) -> Mat {
        let mut acc = Mat::identity(&self.field, self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.field.is_zero(a))
    }

    /// `Some(c)` when the matrix equals `c I`.
    pub fn scalar_value(&self) -> Option<Elem> {
        let c = self.get(0, 0).clone();
        let f = &self.field;
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { &c } else { &f.zero() };
                if self.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.field.is_zero(self.get(i, j))))
    }

    pub fn mul_vec(&self, x: &[Elem]) -> Vector {
        let f = &self.field;
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(f.zero(), |acc, j| {
                    f.add(&acc, &f.mul(self.get(i, j), &x[j]))
                })
            })
            .collect()
    }

    /// `MN - NM`.
    pub fn commutator(&self, other: &Mat) -> Result<Mat> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// The symmetric bilinear form `tr(MN)`.
    pub fn trace_form(&self, other: &Mat) -> Result<Elem> {
        self.check(other)?;
        Ok(self.trace_form_unchecked(other))
    }

    pub(crate) fn trace_form_unchecked(&self, other: &Mat) -> Elem {
        let f = &self.field;
        let n = self.n;
        let mut acc = f.zero();
        for i in 0..n {
            for j in 0..n {
                let a = &self.data[i * n + j];
                if !f.is_zero(a) {
                    acc = f.add(&acc, &f.mul(a, &other.data[j * n + i]));
                }
            }
        }
        acc
    }

    fn as_rect(&self) -> Rect {
        Rect {
            rows: self.n,
            cols: self.n,
            data: self.data.clone(),
        }
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vector> {
        linalg::kernel(&self.field, &self.as_rect())
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.field, &self.as_rect())
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let f = &self.field;
        let mut aug = Rect::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        let pivots = linalg::rref_limited(f, &mut aug, n);
        if pivots.len() < n {
            return Err(Error::Singular);
        }
        Ok(Mat::from_fn(f, n, |i, j| aug.at(i, n + j).clone()))
    }

    /// Row-major flattening, used to treat matrices as vectors.
    pub fn vectorize(&self) -> Vector {
        self.data.clone()
    }

    /// Characteristic polynomial `det(tI - M)`, by fraction-free elimination
    /// over the polynomial ring.
    pub fn char_poly(&self) -> Poly {
        let f = &self.field;
        let n = self.n;
        let mut m: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = Poly::constant(f, f.neg(self.get(i, j)));
                        if i == j {
                            c.add(&Poly::monomial(f, 1))
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        let mut negate = false;
        let mut prev = Poly::one(f);
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Poly::zero(f);
                };
                m.swap(k, r);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    let (q, r) = num.div_rem(&prev).expect("previous pivot is nonzero");
                    debug_assert!(r.is_zero(), "Bareiss division is exact");
                    m[i][j] = q;
                }
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        if negate {
            det.neg()
        } else {
            det
        }
    }

    /// Monic generator of `{q : q(M) = 0}`.
    pub fn min_poly(&self) -> Poly {
        let f = &self.field;
        let mut powers = vec![Mat::identity(f, self.n)];
        loop {
            let next = powers.last().unwrap() * self;
            if let Some(c) = solve_linear(&powers, &next) {
                return annihilator_from(f, &c);
            }
            powers.push(next);
        }
    }

    /// Whether the minimal polynomial has degree `n`.
    pub fn is_cyclic(&self) -> bool {
        self.min_poly().degree() == Some(self.n)
    }

    /// Monic `p_x` of least degree with `p_x(M) x = 0`.
    pub fn local_min_poly(&self, x: &[Elem]) -> Result<Poly> {
        let f = &self.field;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(x.len(), self.n));
        }
        if x.iter().all(|e| f.is_zero(e)) {
            return Err(Error::ZeroVector);
        }
        let mut chain: Vec<Vector> = vec![x.to_vec()];
        loop {
            let next = self.mul_vec(chain.last().unwrap());
            let cols = Rect {
                rows: self.n,
                cols: chain.len(),
                data: (0..self.n)
                    .flat_map(|i| chain.iter().map(move |v| v[i].clone()))
                    .collect(),
            };
            if let Some(c) = linalg::solve(f, &cols, &next) {
                return Ok(annihilator_from(f, &c));
            }
            chain.push(next);
        }
    }

    /// Matrix of `X -> MX - XM` acting on row-major flattened `X`.
    pub(crate) fn ad_rect(&self) -> Rect {
        let f = &self.field;
        let n = self.n;
        let mut r = Rect::zeros(f, n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let row = i * n + j;
                for k in 0..n {
                    let a = self.get(i, k);
                    if !f.is_zero(a) {
                        let v = f.add(r.at(row, k * n + j), a);
                        r.set(row, k * n + j, v);
                    }
                    let b = self.get(k, j);
                    if !f.is_zero(b) {
                        let v = f.sub(r.at(row, i * n + k), b);
                        r.set(row, i * n + k, v);
                    }
                }
            }
        }
        r
    }

    /// Basis of `{X : MX = XM}`.
    pub fn centralizer_basis(&self) -> Vec<Mat> {
        let f = &self.field;
        linalg::kernel(f, &self.ad_rect())
            .into_iter()
            .map(|v| Mat {
                field: f.clone(),
                n: self.n,
                data: v,
            })
            .collect()
    }

    /// Whether `N` lies in the image of `ad_M`, i.e. is trace-orthogonal to
    /// the centralizer of `M`.
    pub fn in_image_ad(&self, other: &Mat) -> Result<bool> {
        self.check(other)?;
        let f = &self.field;
        Ok(self
            .centralizer_basis()
            .iter()
            .all(|c| f.is_zero(&c.trace_form_unchecked(other))))
    }

    /// Image test for cyclic `M`: `tr(M^k N) = 0` for `k = 0..n`.
    pub fn in_image_ad_cyclic(&self, other: &Mat) -> Result<bool> {
        self.check(other)?;
        if !self.is_cyclic() {
            return Err(Error::Precondition("matrix is not cyclic".into()));
        }
        let f = &self.field;
        let mut power = Mat::identity(f, self.n);
        for _ in 0..self.n {
            if !f.is_zero(&power.trace_form_unchecked(other)) {
                return Ok(false);
            }
            power = &power * self;
        }
        Ok(true)
    }

    /// Some `X` with `MX - XM = A` (free unknowns zero, row-major order), or
    /// `None` when `A` is outside the image of `ad_M`.
    pub fn solve_commutator_equation(&self, target: &Mat) -> Option<Mat> {
        if self.check(target).is_err() {
            return None;
        }
        let f = &self.field;
        linalg::solve(f, &self.ad_rect(), &target.data).map(|x| Mat {
            field: f.clone(),
            n: self.n,
            data: x,
        })
    }

    /// `P^{-1} M P` for `P = self`.
    pub fn conjugate(&self, m: &Mat) -> Result<Mat> {
        self.check(m)?;
        let inv = self.inverse()?;
        Ok(&(&inv * m) * self)
    }

    /// `P M P^{-1}` for `P = self`.
    pub fn conjugate_back(&self, m: &Mat) -> Result<Mat> {
        self.check(m)?;
        let inv = self.inverse()?;
        Ok(&(self * m) * &inv)
    }

    pub fn hessenberg_profile(&self) -> HessenbergProfile {
        let f = &self.field;
        let n = self.n;
        let is_hessenberg = (0..n).all(|i| (0..i.saturating_sub(1)).all(|j| f.is_zero(self.get(i, j))));
        let support = (0..n.saturating_sub(1))
            .filter(|&j| !f.is_zero(self.get(j + 1, j)))
            .collect();
        HessenbergProfile {
            is_hessenberg,
            support,
        }
    }

    pub fn is_hessenberg(&self) -> bool {
        self.hessenberg_profile().is_hessenberg
    }

    /// Membership in the image of `ad_{J_n}` for a Hessenberg matrix: trace
    /// zero and subdiagonal summing to zero.
    pub fn hessenberg_in_image_jn(&self) -> Result<bool> {
        if !self.is_hessenberg() {
            return Err(Error::NotHessenberg);
        }
        let f = &self.field;
        let sub = (0..self.n - 1).fold(f.zero(), |acc, j| f.add(&acc, self.get(j + 1, j)));
        Ok(f.is_zero(&self.trace()) && f.is_zero(&sub))
    }

    /// Invertible `P` whose first columns are `seeds`, completed by
    /// `x_k = A x_{k-1}` while that stays independent and otherwise by the
    /// first standard basis vector outside the current span.
    pub fn hessenberg_basis_from(&self, seeds: &[Vector]) -> Result<Mat> {
        let f = &self.field;
        let n = self.n;
        if seeds.is_empty() || seeds.len() > n {
            return Err(Error::Precondition("need between 1 and n seeds".into()));
        }
        if let Some(s) = seeds.iter().find(|s| s.len() != n) {
            return Err(Error::DimensionMismatch(s.len(), n));
        }
        if linalg::vectors_rank(f, seeds) < seeds.len() {
            return Err(Error::DependentSeeds);
        }
        let mut basis: Vec<Vector> = seeds.to_vec();
        while basis.len() < n {
            let next = self.mul_vec(basis.last().unwrap());
            basis.push(next);
            if linalg::vectors_rank(f, &basis) < basis.len() {
                basis.pop();
                let e = (0..n)
                    .map(|i| unit_vector(f, n, i))
                    .find(|e| {
                        let mut trial = basis.clone();
                        trial.push(e.clone());
                        linalg::vectors_rank(f, &trial) == trial.len()
                    })
                    .expect("a proper subspace misses some standard basis vector");
                basis.push(e);
            }
        }
        Mat::from_columns(f, &basis)
    }

    /// Whether `x` is an eigenvector (`x, Mx` dependent). `x` must be nonzero.
    pub fn is_eigenvector(&self, x: &[Elem]) -> bool {
        linalg::vectors_rank(&self.field, &[x.to_vec(), self.mul_vec(x)]) < 2
    }

    /// Two independent vectors that are not eigenvectors, or `None` exactly
    /// when the matrix is scalar (or the field is too small to provide them).
    pub fn two_noneigenvectors(&self) -> Option<(Vector, Vector)> {
        let f = &self.field;
        let n = self.n;
        if self.scalar_value().is_some() {
            return None;
        }
        let mut candidates: Vec<Vector> = (0..n).map(|i| unit_vector(f, n, i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = unit_vector(f, n, i);
                v[j] = f.one();
                candidates.push(v);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut v = unit_vector(f, n, i);
                v[j] = f.neg(&f.one());
                candidates.push(v);
            }
        }
        let first = candidates.iter().find(|v| !self.is_eigenvector(v))?.clone();
        let independent = |v: &Vector| linalg::vectors_rank(f, &[first.clone(), v.clone()]) == 2;
        if let Some(second) = candidates
            .iter()
            .find(|v| independent(v) && !self.is_eigenvector(v))
        {
            return Some((first, second.clone()));
        }
        // At most two lines of span(x, Mx) are stable.
        let mx = self.mul_vec(&first);
        let mut scalars = vec![f.zero()];
        match f.elements() {
            Ok(els) => scalars.extend(els.into_iter().skip(1)),
            Err(_) => scalars.extend((1..=3).map(|c| f.from_i64(c))),
        }
        for c in scalars {
            let v: Vector = if f.is_zero(&c) {
                mx.clone()
            } else {
                first.iter().zip(&mx).map(|(a, b)| f.add(a, &f.mul(&c, b))).collect()
            };
            if independent(&v) && !self.is_eigenvector(&v) {
                return Some((first, v));
            }
        }
        None
    }
}

/// Coefficients expressing `target` as a combination of `mats`, or `None`
/// when it lies outside their span. Free coefficients are zero.
pub fn solve_linear(mats: &[Mat], target: &Mat) -> Option<Vec<Elem>> {
    let f = target.field();
    if mats.iter().any(|m| m.check(target).is_err()) {
        return None;
    }
    if mats.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    let rows = target.n * target.n;
    let mut r = Rect::zeros(f, rows, mats.len());
    for (c, m) in mats.iter().enumerate() {
        for (i, e) in m.data.iter().enumerate() {
            r.set(i, c, e.clone());
        }
    }
    linalg::solve(f, &r, &target.data)
}

/// Dimension of the span of a family of matrices.
pub fn span_dimension(mats: &[Mat]) -> usize {
    match mats.first() {
        None => 0,
        Some(m0) => {
            let vs: Vec<Vector> = mats.iter().map(|m| m.data.clone()).collect();
            linalg::vectors_rank(m0.field(), &vs)
        }
    }
}

/// Rank of a family of vectors.
pub fn vector_rank(field: &Field, vs: &[Vector]) -> usize {
    linalg::vectors_rank(field, vs)
}

pub fn unit_vector(field: &Field, n: usize, i: usize) -> Vector {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// `t^d - sum c_i t^i` from a dependency `M^d = sum c_i M^i`.
fn annihilator_from(field: &Field, c: &[Elem]) -> Poly {
    let mut coeffs: Vec<Elem> = c.iter().map(|e| field.neg(e)).collect();
    coeffs.push(field.one());
    Poly::new(field, coeffs)
}

/// Evaluates a polynomial at a matrix.
pub fn eval_poly(poly: &Poly, m: &Mat) -> Mat {
    let f = m.field();
    let id = Mat::identity(f, m.n());
    poly.coeffs()
        .iter()
        .rev()
        .fold(Mat::zeros(f, m.n()), |acc, c| (&acc * m).add_scaled(c, &id))
}

macro_rules! binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl ops::$tr<&Mat> for &Mat {
            type Output = Mat;
            /// Panics on dimension or field mismatch.
            fn $method(self, rhs: &Mat) -> Mat {
                self.$call(rhs).expect("matrix operands must match")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl ops::Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat::neg(self)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|e| self.field.format_elem(e)).collect();
            writeln!(out, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn e(f: &Field, n: usize, i: usize, j: usize) -> Mat {
        Mat::unit(f, n, i - 1, j - 1)
    }

    #[test]
    fn basic_ops() {
        let f = gf(5);
        assert_eq!(&e(&f, 2, 1, 2) * &e(&f, 2, 2, 1), e(&f, 2, 1, 1));
        assert!(Mat::jordan(&f, 3).scale(&f.zero()).is_zero());
        let two = Mat::scalar(&f, 2, f.from_i64(2));
        let three = Mat::scalar(&f, 2, f.from_i64(3));
        assert_eq!(&two * &three, Mat::identity(&f, 2));
        let g = gf(7);
        assert_eq!(
            Mat::identity(&f, 2).try_add(&Mat::identity(&g, 2)),
            Err(Error::MixedFields)
        );
        assert_eq!(
            Mat::identity(&f, 2).try_mul(&Mat::identity(&f, 3)),
            Err(Error::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn commutator_examples() {
        let f = gf(5);
        let c = e(&f, 3, 1, 2).commutator(&e(&f, 3, 2, 3)).unwrap();
        assert_eq!(c, e(&f, 3, 1, 3));
        let m = Mat::from_i64(&f, &[&[1, 2, 3], &[4, 0, 1], &[2, 2, 2]]);
        assert!(m.commutator(&m).unwrap().is_zero());
        let c = e(&f, 2, 1, 2).commutator(&e(&f, 2, 2, 1)).unwrap();
        assert_eq!(c, &e(&f, 2, 1, 1) - &e(&f, 2, 2, 2));
    }

    #[test]
    fn trace_form_examples() {
        let f = gf(5);
        assert_eq!(e(&f, 2, 1, 2).trace_form(&e(&f, 2, 2, 1)).unwrap(), f.one());
        assert_eq!(e(&f, 2, 1, 2).trace_form(&e(&f, 2, 1, 2)).unwrap(), f.zero());
        let j = Mat::jordan(&f, 3);
        assert_eq!(j.trace_form(&j.transpose()).unwrap(), f.from_i64(2));
    }

    #[test]
    fn trace_form_nondegenerate() {
        let f = gf(3);
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let u = Mat::unit(&f, n, i, j);
                let partner = (0..n * n)
                    .map(|k| Mat::unit(&f, n, k / n, k % n))
                    .find(|v| f.is_one(&u.trace_form(v).unwrap()));
                assert_eq!(partner, Some(Mat::unit(&f, n, j, i)));
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let f = gf(5);
        assert!(Mat::identity(&f, 4).kernel().is_empty());
        let k = Mat::jordan(&f, 3).kernel();
        assert_eq!(k, vec![unit_vector(&f, 3, 0)]);
        assert_eq!(Mat::jordan(&f, 3).rank(), 2);
        assert_eq!(Mat::zeros(&f, 2).kernel().len(), 2);
    }

    #[test]
    fn solve_linear_examples() {
        let f = gf(5);
        let i2 = Mat::identity(&f, 2);
        let e11 = e(&f, 2, 1, 1);
        let target = &e11 - &e(&f, 2, 2, 2);
        // a I + b E11 = diag(1, -1): a = -1, b = 2
        let c = solve_linear(&[i2.clone(), e11.clone()], &target).unwrap();
        assert_eq!(c, vec![f.from_i64(-1), f.from_i64(2)]);
        assert_eq!(
            solve_linear(&[i2.clone(), e11.clone()], &Mat::zeros(&f, 2)).unwrap(),
            vec![f.zero(), f.zero()]
        );
        assert_eq!(
            solve_linear(&[i2.clone(), e11.clone()], &i2).unwrap(),
            vec![f.one(), f.zero()]
        );
        assert!(solve_linear(&[i2], &e(&f, 2, 1, 2)).is_none());
    }

    #[test]
    fn char_poly_examples() {
        let f = gf(5);
        assert_eq!(Mat::jordan(&f, 3).char_poly(), Poly::monomial(&f, 3));
        let d = Mat::diag(&f, &[f.from_i64(1), f.from_i64(2)]);
        assert_eq!(d.char_poly(), Poly::from_i64(&f, &[2, 2, 1]));
        let p = Poly::from_i64(&f, &[3, 0, 4, 1, 1]);
        assert_eq!(Mat::companion(&p).unwrap().char_poly(), p);
        // zero leading pivot forces a row swap
        let m = Mat::from_i64(&f, &[&[0, 1], &[1, 0]]);
        assert_eq!(m.char_poly(), Poly::from_i64(&f, &[-1, 0, 1]));
    }

    #[test]
    fn min_poly_examples() {
        let f = gf(5);
        assert_eq!(Mat::identity(&f, 3).min_poly(), Poly::from_i64(&f, &[-1, 1]));
        assert_eq!(Mat::jordan(&f, 4).min_poly(), Poly::monomial(&f, 4));
        let d = Mat::diag(&f, &[f.from_i64(1), f.from_i64(1), f.from_i64(2)]);
        assert_eq!(d.min_poly(), Poly::from_i64(&f, &[2, 2, 1]));
    }

    #[test]
    fn cyclicity() {
        let f = gf(5);
        assert!(Mat::jordan(&f, 4).is_cyclic());
        assert!(!Mat::identity(&f, 2).is_cyclic());
        // nilpotent of rank n - 1
        let m = Mat::from_i64(&f, &[&[0, 2, 1], &[0, 0, 3], &[0, 0, 0]]);
        assert_eq!(m.rank(), 2);
        assert!(m.is_cyclic());
    }

    #[test]
    fn local_min_poly_examples() {
        let f = gf(5);
        let j = Mat::jordan(&f, 3);
        assert_eq!(j.local_min_poly(&unit_vector(&f, 3, 2)).unwrap(), Poly::monomial(&f, 3));
        assert_eq!(j.local_min_poly(&unit_vector(&f, 3, 0)).unwrap(), Poly::monomial(&f, 1));
        let x = vec![f.from_i64(1), f.from_i64(4), f.from_i64(2)];
        assert_eq!(
            Mat::identity(&f, 3).local_min_poly(&x).unwrap(),
            Poly::from_i64(&f, &[-1, 1])
        );
        assert_eq!(j.local_min_poly(&vec![f.zero(); 3]), Err(Error::ZeroVector));
    }

    #[test]
    fn centralizer_examples() {
        let f = gf(5);
        assert_eq!(Mat::identity(&f, 3).centralizer_basis().len(), 9);
        let j = Mat::jordan(&f, 3);
        let c = j.centralizer_basis();
        assert_eq!(c.len(), 3);
        let powers = vec![Mat::identity(&f, 3), j.clone(), j.pow(2)];
        for m in &c {
            assert!(solve_linear(&powers, m).is_some());
        }
        let d = Mat::diag(&f, &[f.from_i64(1), f.from_i64(2), f.from_i64(3)]);
        let c = d.centralizer_basis();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|m| m.scalar_value().is_some() || (0..3).all(|i| (0..3)
            .all(|k| i == k || f.is_zero(m.get(i, k))))));
    }

    #[test]
    fn image_membership_examples() {
        let f = gf(5);
        let id = Mat::identity(&f, 3);
        assert!(id.in_image_ad(&Mat::zeros(&f, 3)).unwrap());
        assert!(!id.in_image_ad(&e(&f, 3, 1, 2)).unwrap());
        let j = Mat::jordan(&f, 3);
        assert!(j.in_image_ad(&e(&f, 3, 1, 3)).unwrap());
        assert!(j.in_image_ad_cyclic(&e(&f, 3, 1, 3)).unwrap());
        assert!(!j.in_image_ad(&e(&f, 3, 3, 1)).unwrap());
        assert!(!j.in_image_ad_cyclic(&e(&f, 3, 3, 1)).unwrap());
        assert!(id.in_image_ad_cyclic(&e(&f, 3, 1, 3)).is_err());
    }

    #[test]
    fn commutator_equation_examples() {
        let f = gf(5);
        let target = &e(&f, 2, 1, 1) - &e(&f, 2, 2, 2);
        let x = e(&f, 2, 1, 2).solve_commutator_equation(&target).unwrap();
        assert_eq!(e(&f, 2, 1, 2).commutator(&x).unwrap(), target);
        assert_eq!(
            e(&f, 2, 1, 2).commutator(&e(&f, 2, 2, 1)).unwrap(),
            target
        );
        let j = Mat::jordan(&f, 3);
        let x = j.solve_commutator_equation(&e(&f, 3, 1, 3)).unwrap();
        assert_eq!(j.commutator(&x).unwrap(), e(&f, 3, 1, 3));
        assert_eq!(j.commutator(&e(&f, 3, 2, 3)).unwrap(), e(&f, 3, 1, 3));
        assert!(Mat::identity(&f, 3)
            .solve_commutator_equation(&e(&f, 3, 1, 2))
            .is_none());
    }

    #[test]
    fn conjugation_examples() {
        let f = gf(5);
        let m = Mat::from_i64(&f, &[&[1, 2], &[3, 4]]);
        assert_eq!(Mat::identity(&f, 2).conjugate(&m).unwrap(), m);
        let swap = Mat::from_i64(&f, &[&[0, 1], &[1, 0]]);
        let j = Mat::jordan(&f, 2);
        assert_eq!(swap.conjugate(&j).unwrap(), j.transpose());
        assert_eq!(Mat::zeros(&f, 2).conjugate(&m), Err(Error::Singular));
    }

    #[test]
    fn hessenberg_profiles() {
        let f = gf(5);
        let p = Mat::jordan(&f, 3).transpose().hessenberg_profile();
        assert!(p.is_hessenberg);
        assert_eq!(p.support, BTreeSet::from([0, 1]));
        let p = e(&f, 3, 3, 1).hessenberg_profile();
        assert!(!p.is_hessenberg);
        assert!(p.support.is_empty());
        let p = Mat::from_i64(&f, &[&[1, 2, 3], &[0, 4, 1], &[0, 0, 2]]).hessenberg_profile();
        assert!(p.is_hessenberg);
        assert!(p.support.is_empty());
    }

    #[test]
    fn jn_image_for_hessenberg() {
        let f = gf(5);
        let a = &(&e(&f, 3, 2, 1) - &e(&f, 3, 3, 2)) + &e(&f, 3, 1, 3);
        assert!(a.hessenberg_in_image_jn().unwrap());
        assert!(!e(&f, 3, 2, 1).hessenberg_in_image_jn().unwrap());
        let d = Mat::diag(&f, &[f.from_i64(1), f.from_i64(-1), f.zero()]);
        assert!(d.hessenberg_in_image_jn().unwrap());
        assert_eq!(e(&f, 3, 3, 1).hessenberg_in_image_jn(), Err(Error::NotHessenberg));
        let j = Mat::jordan(&f, 3);
        for m in [a, e(&f, 3, 2, 1), d] {
            assert_eq!(m.hessenberg_in_image_jn().unwrap(), j.in_image_ad(&m).unwrap());
        }
    }

    #[test]
    fn hessenberg_basis_examples() {
        let f = gf(5);
        let j = Mat::jordan(&f, 3);
        let p = j.hessenberg_basis_from(&[unit_vector(&f, 3, 2)]).unwrap();
        assert_eq!(
            p.columns(),
            vec![unit_vector(&f, 3, 2), unit_vector(&f, 3, 1), unit_vector(&f, 3, 0)]
        );
        let conj = p.conjugate(&j).unwrap();
        assert_eq!(conj, &e(&f, 3, 2, 1) + &e(&f, 3, 3, 2));
        assert_eq!(conj.hessenberg_profile().support, BTreeSet::from([0, 1]));

        let p = Mat::identity(&f, 3)
            .hessenberg_basis_from(&[unit_vector(&f, 3, 0)])
            .unwrap();
        assert!(p.conjugate(&Mat::identity(&f, 3)).unwrap().is_hessenberg());

        assert_eq!(
            j.hessenberg_basis_from(&[unit_vector(&f, 3, 0), unit_vector(&f, 3, 0)]),
            Err(Error::DependentSeeds)
        );
    }

    #[test]
    fn interleaved_chain_seeds() {
        // A = J_2 (+) J_2 on GF(5)^4: x = e2, Ax = e1, z = e4, Az = e3.
        let f = gf(5);
        let a = &e(&f, 4, 1, 2) + &e(&f, 4, 3, 4);
        let x = unit_vector(&f, 4, 1);
        let z = unit_vector(&f, 4, 3);
        let seeds = vec![x.clone(), a.mul_vec(&x), z.clone(), a.mul_vec(&z)];
        let p = a.hessenberg_basis_from(&seeds).unwrap();
        let conj = p.conjugate(&a).unwrap();
        let prof = conj.hessenberg_profile();
        assert!(prof.is_hessenberg);
        assert!(prof.support.contains(&0) && prof.support.contains(&2));
    }

    #[test]
    fn noneigenvector_examples() {
        let f = gf(5);
        assert!(Mat::scalar(&f, 3, f.from_i64(3)).two_noneigenvectors().is_none());
        let (x, y) = Mat::jordan(&f, 2).two_noneigenvectors().unwrap();
        assert_eq!(x, vec![f.zero(), f.one()]);
        assert_eq!(y, vec![f.one(), f.one()]);
        let d = Mat::diag(&f, &[f.from_i64(1), f.from_i64(2)]);
        let (x, y) = d.two_noneigenvectors().unwrap();
        assert_eq!(x, vec![f.one(), f.one()]);
        assert_eq!(y, vec![f.one(), f.from_i64(-1)]);
        for v in [&x, &y] {
            assert!(!d.is_eigenvector(v));
        }
    }
}
