//! Local linear dependence of `(I, A, B)`: `x, Ax, Bx` dependent for every
//! vector `x`.
//!
//! Over fields with more than two elements this happens exactly when
//! `I, A, B` are linearly dependent, or when `A - lambda I` and `B - mu I`
//! both have rank one with the same range.

use crate::error::Result;
use crate::field::{Elem, Field};
use crate::matrix::{span_dimension, vector_rank, Mat, Vector};

/// Beyond this many vectors the definition is not checked exhaustively.
const EXHAUSTIVE_VECTORS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LldMode {
    LinearlyDependentTriple,
    /// `im(A - lambda I) = im(B - mu I) = K direction`.
    RankOneStructure {
        lambda: Elem,
        mu: Elem,
        direction: Vector,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LldReport {
    pub is_lld: bool,
    /// Structural classification, computed algebraically.
    pub mode: LldMode,
    /// Whether `is_lld` came from checking every vector.
    pub exhaustive: bool,
}

/// The scalar `lambda` with `rank(M - lambda I) = 1`, if any (`n >= 3`).
///
/// All 2x2 minors of `M - lambda I` vanish. With an off-diagonal entry
/// `m[j][k] != 0` and `i` outside `{j, k}`, the minor on rows `{i, j}` and
/// columns `{i, k}` pins `lambda = m[i][i] - m[i][k] m[j][i] / m[j][k]`.
pub(crate) fn rank_one_shift(m: &Mat) -> Option<Elem> {
    let f = m.field();
    let n = m.n();
    let off = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .find(|&(j, k)| j != k && !f.is_zero(m.get(j, k)));
    let candidates: Vec<Elem> = match off {
        Some((j, k)) if n >= 3 => {
            let i = (0..n).find(|&i| i != j && i != k).unwrap();
            let t = f.div(&f.mul(m.get(i, k), m.get(j, i)), m.get(j, k)).ok()?;
            vec![f.sub(m.get(i, i), &t)]
        }
        Some(_) => m.char_poly().roots().ok()?,
        None => {
            let mut d: Vec<Elem> = (0..n).map(|i| m.get(i, i).clone()).collect();
            d.sort();
            d.dedup();
            d
        }
    };
    candidates.into_iter().find(|l| {
        m.try_sub(&Mat::scalar(f, n, l.clone()))
            .map(|s| s.rank() == 1)
            .unwrap_or(false)
    })
}

fn first_nonzero_column(m: &Mat) -> Option<Vector> {
    let f = m.field();
    m.columns().into_iter().find(|c| c.iter().any(|e| !f.is_zero(e)))
}

fn classify(a: &Mat, b: &Mat) -> LldMode {
    let f = a.field();
    let n = a.n();
    let id = Mat::identity(f, n);
    if span_dimension(&[id, a.clone(), b.clone()]) < 3 {
        return LldMode::LinearlyDependentTriple;
    }
    let (Some(lambda), Some(mu)) = (rank_one_shift(a), rank_one_shift(b)) else {
        return LldMode::None;
    };
    let da = a.try_sub(&Mat::scalar(f, n, lambda.clone())).unwrap();
    let db = b.try_sub(&Mat::scalar(f, n, mu.clone())).unwrap();
    let (ca, cb) = (first_nonzero_column(&da).unwrap(), first_nonzero_column(&db).unwrap());
    if vector_rank(f, &[ca.clone(), cb]) == 1 {
        LldMode::RankOneStructure {
            lambda,
            mu,
            direction: ca,
        }
    } else {
        LldMode::None
    }
}

/// Checks `rank(x, Ax, Bx) <= 2` on one representative of every line.
pub(crate) fn lld_by_definition(a: &Mat, b: &Mat) -> Option<bool> {
    let f = a.field();
    let n = a.n();
    let q = f.cardinality()?;
    if q.checked_pow(n as u32).is_none_or(|v| v > EXHAUSTIVE_VECTORS) {
        return None;
    }
    let els = f.elements().ok()?;
    let all = projective_points(f, &els, n).all(|x| {
        let ax = a.mul_vec(&x);
        let bx = b.mul_vec(&x);
        vector_rank(f, &[x, ax, bx]) <= 2
    });
    Some(all)
}

/// Vectors whose first nonzero coordinate is one.
fn projective_points<'a>(f: &'a Field, els: &'a [Elem], n: usize) -> impl Iterator<Item = Vector> + 'a {
    let q = els.len();
    (0..n).flat_map(move |lead| {
        let tail = n - lead - 1;
        (0..q.pow(tail as u32)).map(move |mut code| {
            let mut v = vec![f.zero(); n];
            v[lead] = f.one();
            for i in (lead + 1..n).rev() {
                v[i] = els[code % q].clone();
                code /= q;
            }
            v
        })
    })
}

/// Decides local linear dependence of `(I, A, B)`, exhaustively when the
/// field and dimension are small, and reports the structural mode.
pub fn detect_lld(a: &Mat, b: &Mat) -> Result<LldReport> {
    a.trace_form(b)?;
    let mode = classify(a, b);
    Ok(match lld_by_definition(a, b) {
        Some(is_lld) => LldReport {
            is_lld,
            mode,
            exhaustive: true,
        },
        None => LldReport {
            is_lld: mode != LldMode::None,
            mode,
            exhaustive: false,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(f: &Field, n: usize, i: usize, j: usize) -> Mat {
        Mat::unit(f, n, i - 1, j - 1)
    }

    #[test]
    fn examples() {
        let f = Field::prime(5).unwrap();
        let r = detect_lld(&e(&f, 3, 1, 2), &e(&f, 3, 1, 3)).unwrap();
        assert!(r.is_lld && r.exhaustive);
        assert_eq!(
            r.mode,
            LldMode::RankOneStructure {
                lambda: f.zero(),
                mu: f.zero(),
                direction: vec![f.one(), f.zero(), f.zero()],
            }
        );
        let j = Mat::jordan(&f, 3);
        let r = detect_lld(&j, &j.pow(2)).unwrap();
        assert!(!r.is_lld);
        assert_eq!(r.mode, LldMode::None);
        let b = j.scale(&f.from_i64(2)).add_scaled(&f.from_i64(3), &Mat::identity(&f, 3));
        let r = detect_lld(&j, &b).unwrap();
        assert!(r.is_lld);
        assert_eq!(r.mode, LldMode::LinearlyDependentTriple);
    }

    #[test]
    fn rank_one_shift_matches_eigenvalue_search() {
        let f = Field::parse("gf 2 2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            // Plant rank-one perturbations of scalars half of the time.
            let m = if rng.gen_bool(0.5) {
                let u: Vector = (0..3).map(|_| f.random(&mut rng)).collect();
                let v: Vector = (0..3).map(|_| f.random(&mut rng)).collect();
                let c = f.random(&mut rng);
                Mat::from_fn(&f, 3, |i, j| {
                    let d = if i == j { c.clone() } else { f.zero() };
                    f.add(&d, &f.mul(&u[i], &v[j]))
                })
            } else {
                Mat::random(&f, 3, &mut rng)
            };
            let by_roots = m
                .char_poly()
                .roots()
                .unwrap()
                .into_iter()
                .find(|l| m.try_sub(&Mat::scalar(&f, 3, l.clone())).unwrap().rank() == 1);
            assert_eq!(rank_one_shift(&m), by_roots);
        }
    }

    #[test]
    fn rationals_use_the_algebraic_route() {
        let q = Field::rationals();
        let a = Mat::from_i64(&q, &[&[1, 2, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = Mat::from_i64(&q, &[&[3, 5, 1], &[0, 3, 0], &[0, 0, 3]]);
        let r = detect_lld(&a, &b).unwrap();
        assert!(!r.exhaustive);
        assert!(r.is_lld);
        assert!(matches!(r.mode, LldMode::RankOneStructure { .. }));
    }

    use rand::Rng;
}
