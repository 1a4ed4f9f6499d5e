//! Hyperplanes `{M : tr(BM) = 0}` of the square matrices, given by a nonzero
//! normal `B`, and the three moves the solver relies on: landing a solution
//! line inside the hyperplane, shifting the normal by a multiple of the
//! target, and transporting everything along a change of basis.

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{self, Rect};
use crate::matrix::{span_dimension, Mat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    normal: Mat,
    contains_identity: bool,
}

impl Hyperplane {
    pub fn new(normal: Mat) -> Result<Hyperplane> {
        if normal.is_zero() {
            return Err(Error::ZeroNormal);
        }
        let contains_identity = normal.field().is_zero(&normal.trace());
        Ok(Hyperplane {
            normal,
            contains_identity,
        })
    }

    /// The trace-zero hyperplane `sl_n`.
    pub fn trace_zero(field: &Field, n: usize) -> Hyperplane {
        Hyperplane::new(Mat::identity(field, n)).expect("identity is nonzero")
    }

    pub fn normal(&self) -> &Mat {
        &self.normal
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn n(&self) -> usize {
        self.normal.n()
    }

    pub fn field(&self) -> &Field {
        self.normal.field()
    }

    /// `tr(BM)`.
    pub fn pairing(&self, m: &Mat) -> Result<Elem> {
        self.normal.trace_form(m)
    }

    pub fn contains(&self, m: &Mat) -> Result<bool> {
        Ok(self.field().is_zero(&self.pairing(m)?))
    }

    /// The unique point of `X + K C` inside the hyperplane.
    pub fn land_on(&self, x: &Mat, c: &Mat) -> Result<Mat> {
        let f = self.field();
        let bc = self.pairing(c)?;
        if f.is_zero(&bc) {
            return Err(Error::NoUniqueLanding);
        }
        let t = f.neg(&f.div(&self.pairing(x)?, &bc)?);
        Ok(x.add_scaled(&t, c))
    }

    /// Hyperplane with normal `B - lambda A`. A pair with commutator `A`
    /// lies in one hyperplane iff it lies in the other.
    pub fn shift_normal(&self, a: &Mat, lambda: &Elem) -> Result<Hyperplane> {
        let shifted = self.normal.try_sub(&a.scale(lambda))?;
        Hyperplane::new(shifted)
    }

    /// Hyperplane with normal `P^{-1} B P`: solving the instance
    /// `(P^{-1} A P, P^{-1} B P)` and conjugating the pair back by `P`
    /// solves `(A, B)`.
    pub fn conjugate(&self, p: &Mat) -> Result<Hyperplane> {
        Hyperplane::new(p.conjugate(&self.normal)?)
    }

    /// Adds scalar matrices to both members so they land in the hyperplane,
    /// leaving their commutator unchanged.
    pub fn scalar_adjust_pair(&self, a1: &Mat, a2: &Mat) -> Result<(Mat, Mat)> {
        if self.contains_identity {
            return Err(Error::IdentityInHyperplane);
        }
        let f = self.field();
        let tr_b = self.normal.trace();
        let id = Mat::identity(f, self.n());
        let shift = |m: &Mat| -> Result<Mat> {
            let lambda = f.neg(&f.div(&self.pairing(m)?, &tr_b)?);
            Ok(m.add_scaled(&lambda, &id))
        };
        Ok((shift(a1)?, shift(a2)?))
    }

    /// Basis of the hyperplane (`n^2 - 1` matrices).
    pub fn basis(&self) -> Vec<Mat> {
        let f = self.field();
        let n = self.n();
        let functional: Vec<Elem> = (0..n * n)
            .map(|k| self.normal.get(k % n, k / n).clone())
            .collect();
        let r = Rect::from_rows(f, &[functional], n * n);
        linalg::kernel(f, &r)
            .into_iter()
            .map(|v| Mat::from_fn(f, n, |i, j| v[i * n + j].clone()))
            .collect()
    }

    /// Same subset of matrices, i.e. proportional normals.
    pub fn same_as(&self, other: &Hyperplane) -> bool {
        self.normal.field() == other.normal.field()
            && self.n() == other.n()
            && span_dimension(&[self.normal.clone(), other.normal.clone()]) == 1
    }
}
