//! Commutator pairs without a hyperplane constraint, trace-zero pairs, and
//! the seeded randomized witness search.

use rand::Rng;

use crate::error::Result;
use crate::field::{Elem, Field};
use crate::hyperplane::Hyperplane;
use crate::matrix::{unit_vector, Mat, Vector};
use crate::poly::Poly;

use super::witness::{construct_strict_upper_witness, flag_basis, structured, try_cyclic_witness, x_vectors, WitnessResult};
use super::{check_instance, n2, pipeline, Decomposition, Search, SolveOutcome, Stages, Strategy};

/// Random seeds tried for the chain-basis construction.
const RANDOM_CHAINS: usize = 16;
/// Random witnesses tried by [`unconstrained_pair`] and [`thompson_inner`].
const RANDOM_WITNESSES: u64 = 2_000;
/// Random normals handed to the structured stage by [`unconstrained_pair`].
const AUXILIARY_HYPERPLANES: usize = 4;

/// Scalings `s` of the chain positions: all nonzero with zero sum.
fn chain_scalings(f: &Field, m: usize) -> Option<Vec<Elem>> {
    match m {
        0 => return Some(Vec::new()),
        1 => return None,
        _ => {}
    }
    let base = f.from_i64(m as i64 - 2);
    let cs: Vec<Elem> = match f.nonzero_elements() {
        Ok(els) => els,
        Err(_) => (1..=3).map(|c| f.from_i64(c)).collect(),
    };
    let c = cs.into_iter().find(|c| !f.is_zero(&f.add(c, &base)))?;
    let mut s = vec![f.one(); m];
    s[m - 1] = f.neg(&f.add(&c, &base));
    s[0] = c;
    Some(s)
}

/// Albert and Muckenhoupt: a basis in which `A` is Hessenberg with
/// subdiagonal summing to zero puts `A` in the image of `ad_{J_n}`. Any
/// Hessenberg basis `p` works as a start: replacing the vector after each
/// nonzero subdiagonal position by a rescaled image keeps the flag, so the
/// support is unchanged and the subdiagonal takes the chosen scalings.
/// `None` when exactly one position is nonzero.
fn albert_in_basis(a: &Mat, p: &Mat) -> Option<(Mat, Mat)> {
    let f = a.field();
    let n = a.n();
    let prof = p.conjugate(a).ok()?.hessenberg_profile();
    if !prof.is_hessenberg {
        return None;
    }
    let scal = chain_scalings(f, prof.support.len())?;
    let mut basis = p.columns();
    let mut it = scal.iter();
    for k in 0..n - 1 {
        if prof.support.contains(&k) {
            let inv = f.inv(it.next().unwrap()).ok()?;
            basis[k + 1] = a.mul_vec(&basis[k]).iter().map(|x| f.mul(x, &inv)).collect();
        }
    }
    let p = Mat::from_columns(f, &basis).ok()?;
    let ap = p.conjugate(a).ok()?;
    let j = Mat::jordan(f, n);
    let x = j.solve_commutator_equation(&ap)?;
    Some((p.conjugate_back(&j).ok()?, p.conjugate_back(&x).ok()?))
}

/// [`albert_in_basis`] on the chain basis grown from `seed`.
pub(crate) fn albert_pair(a: &Mat, seed: &Vector) -> Option<(Mat, Mat)> {
    let p = a.hessenberg_basis_from(std::slice::from_ref(seed)).ok()?;
    albert_in_basis(a, &p)
}

fn random_vector(f: &Field, n: usize, s: &mut Search) -> Vector {
    loop {
        let v: Vector = (0..n).map(|_| f.random(&mut s.rng)).collect();
        if v.iter().any(|e| !f.is_zero(e)) {
            return v;
        }
    }
}

/// Pairs `(J', X)` from the `J_n` construction: standard chain seeds, a
/// triangularizing basis, then random chain seeds. A matrix whose minimal
/// polynomial has small degree can have exactly one nonzero subdiagonal
/// entry in every chain basis, which is why the flag is in the list.
fn albert_candidates<'a>(a: &'a Mat, s: &'a mut Search) -> impl Iterator<Item = (Mat, Mat)> + 'a {
    let f = a.field().clone();
    let n = a.n();
    let standard = (0..n).map(move |i| Some(unit_vector(&f, n, i)));
    let flag = std::iter::once(None);
    let random = (0..RANDOM_CHAINS).map(|_| Some(Vec::new()));
    standard.chain(flag).chain(random).filter_map(move |seed| match seed {
        Some(v) if v.is_empty() => albert_pair(a, &random_vector(a.field(), n, s)),
        Some(v) => albert_pair(a, &v),
        None => albert_in_basis(a, &flag_basis(a, &[], None)?),
    })
}

/// Some `(X, Y)` with `[X, Y] = A`, ignoring any hyperplane. After the
/// `J_n` construction, the structured witnesses are run against random
/// auxiliary hyperplanes (any pair they return is a commutator pair), and
/// finally random matrices are tried.
pub(crate) fn unconstrained_pair(a: &Mat, s: &mut Search) -> Result<Option<(Mat, Mat)>> {
    let f = a.field();
    let n = a.n();
    if let Some(pair) = albert_candidates(a, s).next() {
        return Ok(Some(pair));
    }
    for _ in 0..AUXILIARY_HYPERPLANES {
        if s.remaining() == 0 {
            return Ok(None);
        }
        let b = Mat::random(f, n, &mut s.rng);
        let Ok(aux) = Hyperplane::new(b) else {
            continue;
        };
        if let Some(d) = structured(a, &aux, s)? {
            return Ok(Some(d.into_pair()));
        }
    }
    for _ in 0..RANDOM_WITNESSES {
        if !s.spend() {
            return Ok(None);
        }
        let m = Mat::random(f, n, &mut s.rng);
        if let Some(x) = m.solve_commutator_equation(a) {
            return Ok(Some((m, x)));
        }
    }
    Ok(None)
}

/// Makes both members trace-zero. Shifting by multiples of `I` keeps the
/// commutator; when `n` vanishes in the field only pairs that are already
/// trace-zero survive.
fn trace_free(m: &Mat, x: &Mat) -> Option<(Mat, Mat)> {
    let f = m.field();
    let n = m.n();
    let dim = f.from_i64(n as i64);
    if f.is_zero(&dim) {
        return (f.is_zero(&m.trace()) && f.is_zero(&x.trace())).then(|| (m.clone(), x.clone()));
    }
    let id = Mat::identity(f, n);
    let shift = |y: &Mat| f.div(&y.trace(), &dim).map(|c| y.add_scaled(&f.neg(&c), &id));
    Some((shift(m).ok()?, shift(x).ok()?))
}

/// A pair of trace-zero matrices with commutator `A`.
pub(crate) fn thompson_inner(a: &Mat, s: &mut Search) -> Result<Option<(Mat, Mat)>> {
    let f = a.field();
    let n = a.n();
    if !f.is_zero(&f.from_i64(n as i64)) {
        return Ok(unconstrained_pair(a, s)?.and_then(|(m, x)| trace_free(&m, &x)));
    }
    if let Some(pair) = albert_candidates(a, s).find_map(|(m, x)| trace_free(&m, &x)) {
        return Ok(Some(pair));
    }
    let sl = Hyperplane::trace_zero(f, n);
    for round in 0..RANDOM_WITNESSES as usize {
        if !s.spend() {
            break;
        }
        let Some(m) = project(&sl, random_candidate(a, &sl, round, s)?)? else {
            continue;
        };
        if let WitnessResult::Found { a1, a2 } = try_cyclic_witness(a, &sl, &m)? {
            return Ok(Some((a1, a2)));
        }
    }
    Ok(None)
}

/// Decomposes `A` inside the trace-zero matrices.
pub fn thompson_decompose(a: &Mat, budget: u64, seed: u64) -> Result<SolveOutcome> {
    let f = a.field();
    let n = a.n();
    let h = Hyperplane::trace_zero(f, n);
    check_instance(a, &h)?;
    let mut s = Search::new(budget, seed);
    if a.is_zero() || n == 1 {
        let z = Mat::zeros(f, n);
        return Ok(SolveOutcome::Decomposed(s.finish(a, &h, z.clone(), z, Strategy::Trivial)?));
    }
    if n == 2 {
        return n2::decompose_n2(a, &h, &mut s);
    }
    if let Some((a1, a2)) = thompson_inner(a, &mut s)? {
        return Ok(SolveOutcome::Decomposed(s.finish(a, &h, a1, a2, Strategy::HessenbergWitness)?));
    }
    s.note("chain bases: no trace-zero pair");
    let stages = Stages {
        lld_span: false,
        ..Stages::ALL
    };
    pipeline(a, &h, &stages, &mut s)
}

fn random_monic(f: &Field, n: usize, s: &mut Search) -> Poly {
    let mut c: Vec<Elem> = (0..n).map(|_| f.random(&mut s.rng)).collect();
    c.push(f.one());
    Poly::new(f, c)
}

/// A candidate witness from the family selected by `round`.
fn random_candidate(a: &Mat, h: &Hyperplane, round: usize, s: &mut Search) -> Result<Mat> {
    let f = a.field();
    let n = a.n();
    match round % 4 {
        1 => {
            let p = Mat::random_invertible(f, n, &mut s.rng);
            p.conjugate_back(&Mat::jordan(f, n))
        }
        2 => {
            let c = Mat::companion(&random_monic(f, n, s))?;
            Mat::random_invertible(f, n, &mut s.rng).conjugate_back(&c)
        }
        3 => {
            if let Some(p) = flag_basis(a, &[], Some(&mut s.rng)) {
                let hp = h.conjugate(&p)?;
                if !hp.normal().is_hessenberg() {
                    let ap = p.conjugate(a)?;
                    let xs = x_vectors(f, n - 1, &mut s.rng);
                    let x = &xs[s.rng.gen_range(0..xs.len())];
                    let m = construct_strict_upper_witness(&ap, &hp, x)?;
                    return p.conjugate_back(&m);
                }
            }
            Ok(Mat::random(f, n, &mut s.rng))
        }
        _ => Ok(Mat::random(f, n, &mut s.rng)),
    }
}

/// Moves `m` into `h` along `I` or a power of `m`, keeping the centralizer
/// (or at least the cyclic structure) where possible.
fn project(h: &Hyperplane, m: Mat) -> Result<Option<Mat>> {
    if h.contains(&m)? {
        return Ok(Some(m));
    }
    let f = m.field();
    let n = m.n();
    let id = Mat::identity(f, n);
    if !h.contains(&id)? {
        return h.land_on(&m, &id).map(Some);
    }
    for k in 2..n {
        let c = m.pow(k);
        if !h.contains(&c)? {
            return h.land_on(&m, &c).map(Some);
        }
    }
    Ok(None)
}

pub(crate) fn cyclic_search_inner(
    a: &Mat,
    h: &Hyperplane,
    s: &mut Search,
    share: u64,
) -> Result<Option<Decomposition>> {
    let start = s.attempts;
    let mut round = 0usize;
    while s.attempts - start < share && s.spend() {
        let candidate = random_candidate(a, h, round, s)?;
        round += 1;
        let Some(m) = project(h, candidate)? else {
            continue;
        };
        if let WitnessResult::Found { a1, a2 } = try_cyclic_witness(a, h, &m)? {
            return Ok(Some(s.finish(a, h, a1, a2, Strategy::CyclicSearch)?));
        }
    }
    Ok(None)
}

/// Seeded randomized witness search: conjugates of `J_n`, companion
/// matrices of random monic polynomials, triangular constructions over
/// random bases and random elements of `h`, each moved into `h` and tried
/// as a cyclic witness. `None` once `budget` candidates have failed.
pub fn cyclic_search(a: &Mat, h: &Hyperplane, budget: u64, seed: u64) -> Result<Option<Decomposition>> {
    check_instance(a, h)?;
    let mut s = Search::new(budget, seed);
    cyclic_search_inner(a, h, &mut s, budget)
}
