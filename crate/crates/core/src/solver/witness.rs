//! Nilpotent witnesses of rank `n - 1` and the search over bases that makes
//! them applicable.
//!
//! If `M` lies in `H`, `A` lies in the image of `ad_M` and some element of
//! the centralizer of `M` is outside `H`, then a solution `X` of
//! `MX - XM = A` can be slid along that centralizer element into `H`, and
//! `(M, X)` decomposes `A`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::hyperplane::Hyperplane;
use crate::matrix::{unit_vector, vector_rank, Mat, Vector};

use super::{Decomposition, Search, Strategy};

/// Vectors of `(K*)^m` are swept exhaustively up to this many points of `K^m`.
const SWEEP_LIMIT: u64 = 4096;
/// Random `x`-vectors drawn when the sweep would be too large.
const SAMPLED_X: usize = 64;
/// Random probe vectors added when `K^n` is too large to enumerate.
const SAMPLED_PROBES: usize = 64;
/// Random triangularizing bases tried after the deterministic one.
const RANDOM_FLAGS: usize = 48;
/// Partner vectors `z` tried for each vector `x` of order 2.
const PARTNERS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessResult {
    Found { a1: Mat, a2: Mat },
    /// `A` is not in the image of `ad_M`.
    NotInImage,
    /// The whole centralizer of `M` lies in `H`, so no landing direction.
    CentralizerInside,
}

/// Turns a witness `M` in `H` into a decomposition when possible.
pub fn try_cyclic_witness(a: &Mat, h: &Hyperplane, m: &Mat) -> Result<WitnessResult> {
    if !h.contains(m)? {
        return Err(Error::Precondition("witness must lie in the hyperplane".into()));
    }
    a.trace_form(m)?;
    let Some(x) = m.solve_commutator_equation(a) else {
        return Ok(WitnessResult::NotInImage);
    };
    for c in m.centralizer_basis() {
        if !h.contains(&c)? {
            return Ok(WitnessResult::Found {
                a1: m.clone(),
                a2: h.land_on(&x, &c)?,
            });
        }
    }
    Ok(WitnessResult::CentralizerInside)
}

/// Nonzero entry `(l, l')` of `b` maximizing `l - l'`, provided `l - l' >= 2`.
/// Ties go to the smallest `l'`.
pub fn corner_entry(b: &Mat) -> Option<(usize, usize)> {
    let f = b.field();
    let n = b.n();
    (2..n)
        .rev()
        .find_map(|d| (0..n - d).find(|&c| !f.is_zero(b.get(c + d, c))).map(|c| (c + d, c)))
}

fn check_nonzero(f: &Field, x: &[Elem], len: usize) -> Result<()> {
    if x.len() != len {
        return Err(Error::DimensionMismatch(x.len(), len));
    }
    if x.iter().any(|v| f.is_zero(v)) {
        return Err(Error::Precondition("x-vector entries must be nonzero".into()));
    }
    Ok(())
}

/// For upper-triangular trace-zero `A` and a normal `B` that is not
/// Hessenberg: `M = sum x_k E_{k,k+1} - beta E_{l',l}`, nilpotent of rank
/// `n - 1`, in `H`, with `A` in the image of `ad_M`.
pub fn construct_strict_upper_witness(a: &Mat, h: &Hyperplane, x: &[Elem]) -> Result<Mat> {
    let f = a.field();
    let n = a.n();
    let b = h.normal();
    a.trace_form(b)?;
    if !a.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    if !f.is_zero(&a.trace()) {
        return Err(Error::NonZeroTrace);
    }
    check_nonzero(f, x, n - 1)?;
    let (l, lp) = corner_entry(b).ok_or_else(|| Error::Precondition("normal is Hessenberg".into()))?;
    let num = (0..n - 1).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(b.get(k + 1, k), &x[k])));
    let beta = f.div(&num, b.get(l, lp))?;
    let mut m = Mat::zeros(f, n);
    for (k, xk) in x.iter().enumerate() {
        m.set(k, k + 1, xk.clone());
    }
    m.set(lp, l, f.neg(&beta));
    Ok(m)
}

/// For Hessenberg `A` with `a[1][0] = 1` and `b[j][0] != 0` (`j >= 2`,
/// zero-based): `M = -alpha E_{1,2} + sum x_k E_{k+1,k+2} + beta E_{l',l}`.
/// `None` when `alpha` vanishes, since `M` is then not cyclic.
pub fn construct_hessenberg_witness(a: &Mat, h: &Hyperplane, j: usize, x: &[Elem]) -> Result<Option<Mat>> {
    let f = a.field();
    let n = a.n();
    let b = h.normal();
    a.trace_form(b)?;
    if !a.is_hessenberg() {
        return Err(Error::NotHessenberg);
    }
    if n < 3 || !f.is_one(a.get(1, 0)) {
        return Err(Error::Precondition("a[1][0] must equal 1".into()));
    }
    if j < 2 || j >= n || f.is_zero(b.get(j, 0)) {
        return Err(Error::Precondition(format!("b[{j}][0] must be a nonzero entry below the subdiagonal")));
    }
    check_nonzero(f, x, n - 2)?;
    let alpha = (0..n - 2).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(a.get(k + 2, k + 1), &x[k])));
    if f.is_zero(&alpha) {
        return Ok(None);
    }
    let (l, lp) = corner_entry(b).expect("b[j][0] != 0 with j >= 2");
    let tail = (0..n - 2).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&x[k], b.get(k + 2, k + 1))));
    let beta = f.div(&f.sub(&f.mul(&alpha, b.get(1, 0)), &tail), b.get(l, lp))?;
    let mut m = Mat::zeros(f, n);
    m.set(0, 1, f.neg(&alpha));
    for (k, xk) in x.iter().enumerate() {
        m.set(k + 1, k + 2, xk.clone());
    }
    let v = f.add(m.get(lp, l), &beta);
    m.set(lp, l, v);
    Ok(Some(m))
}

/// The `x`-vectors to try: all of `(K*)^m` in odometer order (last
/// coordinate fastest) when `q^m` is small, otherwise seeded samples.
pub(crate) fn x_vectors(f: &Field, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let small = f
        .cardinality()
        .and_then(|q| q.checked_pow(m as u32))
        .is_some_and(|v| v <= SWEEP_LIMIT);
    if !small {
        return (0..SAMPLED_X)
            .map(|_| (0..m).map(|_| f.random_nonzero(rng)).collect())
            .collect();
    }
    let units = f.nonzero_elements().expect("finite field");
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        out.push(idx.iter().map(|&i| units[i].clone()).collect());
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < units.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Candidate vectors: one nonzero vector per line (leading entry one) when
/// `K^n` is small, otherwise standard vectors, pairwise sums and random
/// samples. Everything downstream depends only on the line.
pub(crate) fn probe_vectors(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let small = f
        .cardinality()
        .and_then(|q| q.checked_pow(n as u32))
        .is_some_and(|v| v <= SWEEP_LIMIT);
    if small {
        let els = f.elements().expect("finite field");
        let q = els.len();
        let total = q.pow(n as u32);
        return (1..total)
            .map(|mut code| {
                let mut v = vec![f.zero(); n];
                for i in (0..n).rev() {
                    v[i] = els[code % q].clone();
                    code /= q;
                }
                v
            })
            .filter(|v| v.iter().find(|e| !f.is_zero(e)).is_some_and(|e| f.is_one(e)))
            .collect();
    }
    let mut out: Vec<Vector> = (0..n).map(|i| unit_vector(f, n, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = unit_vector(f, n, i);
            v[j] = f.one();
            out.push(v);
        }
    }
    for _ in 0..SAMPLED_PROBES {
        let v: Vector = (0..n).map(|_| f.random(rng)).collect();
        if v.iter().any(|e| !f.is_zero(e)) {
            out.push(v);
        }
    }
    out
}

/// Extends independent vectors to a basis with standard vectors.
pub(crate) fn complete_basis(f: &Field, n: usize, vs: &[Vector]) -> Vec<Vector> {
    let mut basis = vs.to_vec();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        basis.push(unit_vector(f, n, i));
        if vector_rank(f, &basis) < basis.len() {
            basis.pop();
        }
    }
    basis
}

fn random_combination(f: &Field, vs: &[Vector], rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let mut out = vec![f.zero(); vs[0].len()];
        for v in vs {
            let c = f.random(rng);
            for (o, e) in out.iter_mut().zip(v) {
                *o = f.add(o, &f.mul(&c, e));
            }
        }
        if out.iter().any(|e| !f.is_zero(e)) {
            return out;
        }
    }
}

/// Basis `P` extending `prefix` with `P^{-1} A P` upper-triangular, picking
/// an eigenvector of each successive quotient. `prefix` must already span
/// an `A`-stable flag. Random choices when `rng` is given; `None` when some
/// quotient has no eigenvalue in the field.
pub(crate) fn flag_basis(a: &Mat, prefix: &[Vector], mut rng: Option<&mut ChaCha8Rng>) -> Option<Mat> {
    let f = a.field();
    let n = a.n();
    let mut basis = prefix.to_vec();
    while basis.len() < n {
        let k = basis.len();
        let p = Mat::from_columns(f, &complete_basis(f, n, &basis)).ok()?;
        let ap = p.conjugate(a).ok()?;
        let m = n - k;
        let block = Mat::from_fn(f, m, |i, j| ap.get(k + i, k + j).clone());
        let roots = block.char_poly().roots().ok()?;
        if roots.is_empty() {
            return None;
        }
        let lambda = match rng.as_deref_mut() {
            Some(r) => roots[r.gen_range(0..roots.len())].clone(),
            None => roots[0].clone(),
        };
        let shifted = block.try_sub(&Mat::scalar(f, m, lambda)).ok()?;
        let kernel = shifted.kernel();
        let y = match rng.as_deref_mut() {
            Some(r) => random_combination(f, &kernel, r),
            None => kernel[0].clone(),
        };
        let mut lifted = vec![f.zero(); k];
        lifted.extend(y);
        basis.push(p.mul_vec(&lifted));
    }
    Mat::from_columns(f, &basis).ok()
}

/// Runs the strict upper-triangular construction in the basis `p`, which
/// must triangularize `a`. `None` if the conjugated normal is Hessenberg or
/// no `x` works within budget.
pub(crate) fn sweep_triangular(
    a: &Mat,
    h: &Hyperplane,
    p: &Mat,
    s: &mut Search,
    tag: Strategy,
) -> Result<Option<Decomposition>> {
    let ap = p.conjugate(a)?;
    debug_assert!(ap.is_upper_triangular());
    let hp = h.conjugate(p)?;
    if hp.normal().is_hessenberg() {
        return Ok(None);
    }
    for x in x_vectors(a.field(), a.n() - 1, &mut s.rng) {
        if !s.spend() {
            return Ok(None);
        }
        let m = construct_strict_upper_witness(&ap, &hp, &x)?;
        if let WitnessResult::Found { a1, a2 } = try_cyclic_witness(&ap, &hp, &m)? {
            let a1 = p.conjugate_back(&a1)?;
            let a2 = p.conjugate_back(&a2)?;
            return Ok(Some(s.finish(a, h, a1, a2, tag)?));
        }
    }
    Ok(None)
}

/// A basis in which `A` is Hessenberg with `a[1][0] = 1` and the normal has
/// a usable entry `b[j][0]`, together with the transported instance.
pub(crate) struct HessenbergFrame {
    pub p: Mat,
    pub a: Mat,
    pub h: Hyperplane,
    pub j: usize,
}

/// Checks the Hessenberg hypotheses in the basis `p` and rescales the
/// second basis vector so that the first subdiagonal entry becomes one.
pub(crate) fn hessenberg_frame(a: &Mat, h: &Hyperplane, p: &Mat) -> Result<Option<HessenbergFrame>> {
    let f = a.field();
    let n = a.n();
    let ap = p.conjugate(a)?;
    let prof = ap.hessenberg_profile();
    if !prof.is_hessenberg || !prof.support.contains(&0) {
        return Ok(None);
    }
    let bp = p.conjugate(h.normal())?;
    let Some(j) = (2..n).find(|&j| {
        !f.is_zero(bp.get(j, 0)) && prof.support.iter().any(|&i| i >= 1 && i != j)
    }) else {
        return Ok(None);
    };
    let mut diag = vec![f.one(); n];
    diag[1] = ap.get(1, 0).clone();
    let p2 = p.try_mul(&Mat::diag(f, &diag))?;
    Ok(Some(HessenbergFrame {
        a: p2.conjugate(a)?,
        h: h.conjugate(&p2)?,
        p: p2,
        j,
    }))
}

fn sweep_hessenberg(a: &Mat, h: &Hyperplane, p: &Mat, s: &mut Search) -> Result<Option<Decomposition>> {
    let Some(fr) = hessenberg_frame(a, h, p)? else {
        return Ok(None);
    };
    for x in x_vectors(a.field(), a.n() - 2, &mut s.rng) {
        if !s.spend() {
            return Ok(None);
        }
        let Some(m) = construct_hessenberg_witness(&fr.a, &fr.h, fr.j, &x)? else {
            continue;
        };
        if let WitnessResult::Found { a1, a2 } = try_cyclic_witness(&fr.a, &fr.h, &m)? {
            let a1 = fr.p.conjugate_back(&a1)?;
            let a2 = fr.p.conjugate_back(&a2)?;
            return Ok(Some(s.finish(a, h, a1, a2, Strategy::HessenbergWitness)?));
        }
    }
    Ok(None)
}

/// The structured stage: triangularizing bases, Hessenberg bases grown from
/// vectors `x` with `x, Ax, Bx` independent, then random triangularizing
/// bases.
pub(crate) fn structured(a: &Mat, h: &Hyperplane, s: &mut Search) -> Result<Option<Decomposition>> {
    let f = a.field();
    let n = a.n();
    let b = h.normal();
    if let Some(p) = flag_basis(a, &[], None) {
        if let Some(d) = sweep_triangular(a, h, &p, s, Strategy::TriangularWitness)? {
            return Ok(Some(d));
        }
    }
    let probes = probe_vectors(f, n, &mut s.rng);
    for x in &probes {
        if s.remaining() == 0 {
            return Ok(None);
        }
        let ax = a.mul_vec(x);
        let bx = b.mul_vec(x);
        if vector_rank(f, &[x.clone(), ax.clone(), bx]) < 3 {
            continue;
        }
        let a2x = a.mul_vec(&ax);
        if vector_rank(f, &[x.clone(), ax.clone(), a2x]) == 3 {
            let p = a.hessenberg_basis_from(std::slice::from_ref(x))?;
            if let Some(d) = sweep_hessenberg(a, h, &p, s)? {
                return Ok(Some(d));
            }
        } else if n >= 4 {
            let mut tried = 0;
            for z in &probes {
                if tried == PARTNERS {
                    break;
                }
                let az = a.mul_vec(z);
                if vector_rank(f, &[x.clone(), ax.clone(), z.clone(), az]) < 4 {
                    continue;
                }
                tried += 1;
                // Charged even when no frame exists, so that matrices
                // without usable partners cannot stall the scan.
                if !s.spend() {
                    return Ok(None);
                }
                let p = a.hessenberg_basis_from(&[x.clone(), ax.clone(), z.clone()])?;
                if let Some(d) = sweep_hessenberg(a, h, &p, s)? {
                    return Ok(Some(d));
                }
            }
        }
    }
    for _ in 0..RANDOM_FLAGS {
        if s.remaining() == 0 {
            break;
        }
        let Some(p) = flag_basis(a, &[], Some(&mut s.rng)) else {
            break;
        };
        if let Some(d) = sweep_triangular(a, h, &p, s, Strategy::TriangularWitness)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}
