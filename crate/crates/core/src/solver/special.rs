//! `n = 3` and `A` similar to `lambda I + E23`, the one shape the reduction
//! to triangular and Hessenberg witnesses cannot reach.
//!
//! Work happens in a normal basis where `A0 = lambda (I + E23)` (or `E23`
//! when `lambda = 0`). First the triangular construction runs on the bases
//! that keep `A0` triangular; then explicit cyclic witnesses are tried
//! against every conjugate of the normal by the group of matrices commuting
//! with `A0`.

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::hyperplane::Hyperplane;
use crate::matrix::{span_dimension, unit_vector, vector_rank, Mat, Vector};

use super::lld::rank_one_shift;
use super::witness::{sweep_triangular, try_cyclic_witness, WitnessResult};
use super::{check_instance, search, Decomposition, Search, Strategy, DEFAULT_BUDGET};

/// Enumerate `(alpha, beta)` and the commuting family up to these sizes.
const PAIR_LIMIT: u64 = 4096;
const FAMILY_LIMIT: u64 = 100_000;
/// Random draws used instead when the sets are larger.
const SAMPLES: usize = 64;

/// `Some(lambda)` exactly when `n = 3`, `rank(A - lambda I) = 1` and
/// `(A - lambda I)^2 = 0`, i.e. `A` is similar to `lambda I + E23`.
pub fn special_form(a: &Mat) -> Option<Elem> {
    if a.n() != 3 {
        return None;
    }
    let lambda = rank_one_shift(a)?;
    let nil = a.try_sub(&Mat::scalar(a.field(), 3, lambda.clone())).ok()?;
    nil.pow(2).is_zero().then_some(lambda)
}

/// Basis `P` with `P^{-1} A P = lambda (I + E23)`, or `E23` if `lambda = 0`.
pub(crate) fn normal_basis(a: &Mat, lambda: &Elem) -> Result<Mat> {
    let f = a.field();
    let nil = a.try_sub(&Mat::scalar(f, 3, lambda.clone()))?;
    let e3 = (0..3)
        .map(|i| unit_vector(f, 3, i))
        .find(|v| nil.mul_vec(v).iter().any(|x| !f.is_zero(x)))
        .ok_or_else(|| Error::Precondition("A is scalar".into()))?;
    let mut e2 = nil.mul_vec(&e3);
    if !f.is_zero(lambda) {
        let inv = f.inv(lambda)?;
        e2.iter_mut().for_each(|x| *x = f.mul(x, &inv));
    }
    let e1 = nil
        .kernel()
        .into_iter()
        .find(|v| vector_rank(f, &[v.clone(), e2.clone()]) == 2)
        .ok_or_else(|| Error::Precondition("A is not of the special shape".into()))?;
    Mat::from_columns(f, &[e1, e2, e3])
}

/// Decomposes `A` similar to `lambda I + E23` inside `h`, with the default
/// budget and seed zero.
pub fn special3_decompose(a: &Mat, h: &Hyperplane) -> Result<Option<Decomposition>> {
    check_instance(a, h)?;
    if special_form(a).is_none() {
        return Err(Error::Precondition("A must be similar to lambda I + E23".into()));
    }
    let mut s = Search::new(DEFAULT_BUDGET, 0);
    special3_inner(a, h, &mut s)
}

fn mat(f: &Field, rows: &[&[i64]]) -> Mat {
    Mat::from_i64(f, rows)
}

/// `[[0,1,0],[alpha,0,1],[beta,0,0]]`, cyclic for every `alpha, beta`.
pub(crate) fn companion_witness(f: &Field, alpha: &Elem, beta: &Elem) -> Mat {
    let mut c = mat(f, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
    c.set(1, 0, alpha.clone());
    c.set(2, 0, beta.clone());
    c
}

/// The witness used after the basis change `(e3, e1, e2)`, written back in
/// the normal basis.
pub(crate) fn rotated_witness(f: &Field) -> Mat {
    let r = Mat::from_columns(f, &[unit_vector(f, 3, 2), unit_vector(f, 3, 0), unit_vector(f, 3, 1)]).unwrap();
    r.conjugate_back(&mat(f, &[&[1, 0, 1], &[1, 1, 0], &[0, 1, 0]])).unwrap()
}

pub(crate) fn final_witness(f: &Field) -> Mat {
    mat(f, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, -1]])
}

fn scalars(f: &Field, limit: u64, s: &mut Search) -> Vec<(Elem, Elem)> {
    match f.elements() {
        Ok(els) if (els.len() as u64).pow(2) <= limit => els
            .iter()
            .flat_map(|x| els.iter().map(move |y| (x.clone(), y.clone())))
            .collect(),
        _ => (0..SAMPLES).map(|_| (f.random(&mut s.rng), f.random(&mut s.rng))).collect(),
    }
}

/// `[[q11,0,q13],[q21,q22,q23],[0,0,q22]]` with `q11, q22` nonzero: exactly
/// the invertible matrices commuting with `E23`, identity first.
fn commuting_family(f: &Field, s: &mut Search) -> Vec<Mat> {
    let build = |v: [Elem; 5]| {
        let [q11, q22, q13, q21, q23] = v;
        let mut q = Mat::zeros(f, 3);
        q.set(0, 0, q11);
        q.set(0, 2, q13);
        q.set(1, 0, q21);
        q.set(1, 1, q22.clone());
        q.set(1, 2, q23);
        q.set(2, 2, q22);
        q
    };
    let id = Mat::identity(f, 3);
    let mut out = vec![id.clone()];
    let size = f.cardinality().and_then(|q| (q - 1).checked_pow(2)?.checked_mul(q.checked_pow(3)?));
    match size {
        Some(size) if size <= FAMILY_LIMIT => {
            let units = f.nonzero_elements().unwrap();
            let els = f.elements().unwrap();
            for a in &units {
                for b in &units {
                    for c in &els {
                        for d in &els {
                            for e in &els {
                                let q = build([a.clone(), b.clone(), c.clone(), d.clone(), e.clone()]);
                                if q != id {
                                    out.push(q);
                                }
                            }
                        }
                    }
                }
            }
        }
        _ => {
            for _ in 0..SAMPLES {
                let v = [
                    f.random_nonzero(&mut s.rng),
                    f.random_nonzero(&mut s.rng),
                    f.random(&mut s.rng),
                    f.random(&mut s.rng),
                    f.random(&mut s.rng),
                ];
                out.push(build(v));
            }
        }
    }
    out
}

pub(crate) fn special3_inner(a: &Mat, h: &Hyperplane, s: &mut Search) -> Result<Option<Decomposition>> {
    let f = a.field();
    let Some(lambda) = special_form(a) else {
        return Ok(None);
    };
    if span_dimension(&[a.clone(), h.normal().clone()]) == 1 {
        // B is a multiple of A: every pair with commutator A is orthogonal to A.
        if let Some((a1, a2)) = search::unconstrained_pair(a, s)? {
            return Ok(Some(s.finish(a, h, a1, a2, Strategy::Special3)?));
        }
        return Ok(None);
    }
    let p0 = normal_basis(a, &lambda)?;
    let a0 = p0.conjugate(a)?;
    let e: Vec<Vector> = (0..3).map(|i| unit_vector(f, 3, i)).collect();

    // Bases keeping A0 upper-triangular.
    let mut bases: Vec<Vec<Vector>> = vec![
        vec![e[1].clone(), e[0].clone(), e[2].clone()],
        vec![e[1].clone(), e[2].clone(), e[0].clone()],
    ];
    let shears: Vec<Elem> = match f.elements() {
        Ok(els) if els.len() as u64 <= PAIR_LIMIT => els,
        _ => (0..SAMPLES).map(|_| f.random(&mut s.rng)).collect(),
    };
    for c in shears {
        let v: Vector = e[0].iter().zip(&e[1]).map(|(x, y)| f.add(x, &f.mul(&c, y))).collect();
        bases.push(vec![v, e[1].clone(), e[2].clone()]);
    }
    for basis in bases {
        if s.remaining() == 0 {
            return Ok(None);
        }
        let p = p0.try_mul(&Mat::from_columns(f, &basis)?)?;
        if let Some(d) = sweep_triangular(a, h, &p, s, Strategy::Special3)? {
            return Ok(Some(d));
        }
    }

    let mut witnesses: Vec<Mat> = scalars(f, PAIR_LIMIT, s)
        .iter()
        .map(|(al, be)| companion_witness(f, al, be))
        .collect();
    witnesses.push(rotated_witness(f));
    witnesses.push(final_witness(f));
    let mut witnesses: Vec<Mat> = witnesses
        .into_iter()
        .filter(|c| c.in_image_ad(&a0).unwrap_or(false))
        .collect();
    witnesses.dedup();
    let zero_pair = f
        .is_zero(&lambda)
        .then(|| (Mat::unit(f, 3, 1, 0), Mat::unit(f, 3, 0, 2)));

    for q in commuting_family(f, s) {
        if !s.spend() {
            return Ok(None);
        }
        let p = p0.try_mul(&q)?;
        let hq = h.conjugate(&p)?;
        if let Some((x, y)) = &zero_pair {
            if hq.contains(x)? && hq.contains(y)? {
                let (a1, a2) = (p.conjugate_back(x)?, p.conjugate_back(y)?);
                return Ok(Some(s.finish(a, h, a1, a2, Strategy::Special3)?));
            }
        }
        for c in &witnesses {
            if !hq.contains(c)? {
                continue;
            }
            if let WitnessResult::Found { a1, a2 } = try_cyclic_witness(&a0, &hq, c)? {
                let (a1, a2) = (p.conjugate_back(&a1)?, p.conjugate_back(&a2)?);
                return Ok(Some(s.finish(a, h, a1, a2, Strategy::Special3)?));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf9() -> Field {
        Field::parse("gf 3 2").unwrap()
    }

    fn e(f: &Field, i: usize, j: usize) -> Mat {
        Mat::unit(f, 3, i - 1, j - 1)
    }

    fn tr(x: &Mat, y: &Mat) -> Elem {
        x.trace_form(y).unwrap()
    }

    /// `I + E23` and a normal `[[a,0,d],[b,-a,e],[0,0,0]]`.
    fn shape(f: &Field, a: &Elem, b: &Elem, d: &Elem, e_: &Elem) -> (Mat, Mat) {
        let am = &Mat::identity(f, 3) + &e(f, 2, 3);
        let mut bm = Mat::zeros(f, 3);
        bm.set(0, 0, a.clone());
        bm.set(0, 2, d.clone());
        bm.set(1, 0, b.clone());
        bm.set(1, 1, f.neg(a));
        bm.set(1, 2, e_.clone());
        (am, bm)
    }

    #[test]
    fn companion_witness_traces() {
        // For every normal in the shape with b = 1: tr(AC) = 0,
        // tr(BC) = beta d + 1, tr(AC^2) = beta - alpha, tr(BC^2) = e beta.
        let f = gf9();
        let els = f.elements().unwrap();
        for a in &els {
            for d in &els {
                for e_ in &els {
                    let (am, bm) = shape(&f, a, &f.one(), d, e_);
                    for al in &els {
                        for be in &els {
                            let c = companion_witness(&f, al, be);
                            let c2 = c.pow(2);
                            assert!(f.is_zero(&tr(&am, &c)));
                            assert_eq!(tr(&bm, &c), f.add(&f.mul(be, d), &f.one()));
                            assert_eq!(tr(&am, &c2), f.sub(be, al));
                            assert_eq!(tr(&bm, &c2), f.mul(e_, be));
                        }
                    }
                    if !f.is_zero(d) {
                        // beta = alpha = -1/d puts C in H with A in the image of ad_C.
                        let be = f.neg(&f.inv(d).unwrap());
                        let c = companion_witness(&f, &be, &be);
                        assert!(f.is_zero(&tr(&bm, &c)));
                        assert!(c.is_cyclic());
                        assert!(c.in_image_ad(&am).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn rotated_witness_traces() {
        let f = gf9();
        let a = mat(&f, &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1]]);
        let b = e(&f, 3, 2);
        let c = mat(&f, &[&[1, 0, 1], &[1, 1, 0], &[0, 1, 0]]);
        let c2 = c.pow(2);
        assert_eq!(c2, mat(&f, &[&[1, 1, 1], &[-1, 1, 1], &[1, 1, 0]]));
        assert!(c.is_cyclic());
        for m in [&c, &c2] {
            assert!(f.is_zero(&tr(&a, m)));
        }
        assert!(f.is_zero(&a.trace()));
        assert!(f.is_zero(&tr(&b, &c)));
        assert!(!f.is_zero(&tr(&b, &c2)));
        // Back in the normal basis the same witness serves I + E23.
        let a0 = &Mat::identity(&f, 3) + &e(&f, 2, 3);
        assert!(rotated_witness(&f).in_image_ad(&a0).unwrap());
    }

    #[test]
    fn final_witness_traces() {
        let f = gf9();
        let a = &Mat::identity(&f, 3) + &e(&f, 2, 3);
        let b = e(&f, 1, 3);
        let c = final_witness(&f);
        let c2 = c.pow(2);
        assert_eq!(c2, mat(&f, &[&[0, 0, 0], &[0, 0, 0], &[1, -1, 1]]));
        assert!(c.is_cyclic());
        assert!(f.is_zero(&a.trace()));
        assert!(f.is_zero(&tr(&a, &c)));
        assert!(f.is_zero(&tr(&a, &c2)));
        assert!(f.is_zero(&tr(&b, &c)));
        assert!(f.is_one(&tr(&b, &c2)));
        let h = Hyperplane::new(b).unwrap();
        assert!(matches!(
            try_cyclic_witness(&a, &h, &c).unwrap(),
            WitnessResult::Found { .. }
        ));
        let d = special3_decompose(&a, &h).unwrap().unwrap();
        assert_eq!(d.strategy(), Strategy::Special3);
    }

    #[test]
    fn detector_matches_conjugates_of_the_normal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [gf9(), Field::prime(5).unwrap(), Field::rationals()] {
            for lambda in f.elements().unwrap_or_else(|_| vec![f.zero(), f.from_i64(2)]) {
                let n0 = &Mat::scalar(&f, 3, lambda.clone()) + &e(&f, 2, 3);
                for _ in 0..10 {
                    let p = Mat::random_invertible(&f, 3, &mut rng);
                    let a = p.conjugate(&n0).unwrap();
                    assert_eq!(special_form(&a), Some(lambda.clone()));
                    let basis = normal_basis(&a, &lambda).unwrap();
                    let scale = if f.is_zero(&lambda) { f.one() } else { lambda.clone() };
                    let expect = &Mat::scalar(&f, 3, lambda.clone()) + &e(&f, 2, 3).scale(&scale);
                    assert_eq!(basis.conjugate(&a).unwrap(), expect);
                }
            }
            assert_eq!(special_form(&Mat::jordan(&f, 3)), None);
            assert_eq!(special_form(&Mat::identity(&f, 3)), None);
            assert_eq!(special_form(&(&e(&f, 1, 2) + &e(&f, 1, 3))), Some(f.zero()));
            assert_eq!(special_form(&Mat::diag(&f, &[f.one(), f.one(), f.zero()])), None);
        }
    }

    #[test]
    fn zero_lambda_upper_triangular_normal() {
        let f = gf9();
        let a = e(&f, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = Mat::from_fn(&f, 3, |i, j| if i <= j { f.random(&mut rng) } else { f.zero() });
            if b.is_zero() {
                continue;
            }
            let h = Hyperplane::new(b).unwrap();
            let d = special3_decompose(&a, &h).unwrap().unwrap();
            assert_eq!(d.strategy(), Strategy::Special3);
        }
    }

    #[test]
    fn char3_all_trace_zero_normals_sampled() {
        let f = gf9();
        let a = &Mat::identity(&f, 3) + &e(&f, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let mut b = Mat::random(&f, 3, &mut rng);
            let t = b.trace();
            b.set(2, 2, f.sub(b.get(2, 2), &t));
            if b.is_zero() {
                continue;
            }
            let h = Hyperplane::new(b).unwrap();
            assert!(special3_decompose(&a, &h).unwrap().is_some());
        }
        assert!(special3_decompose(&Mat::jordan(&f, 3), &Hyperplane::trace_zero(&f, 3)).is_err());
    }
}
