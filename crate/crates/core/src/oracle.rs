//! Brute-force ground truth and the sweep harness.
//!
//! Fixing `A1` turns `[A1, X] = A`, `tr(B X) = 0` into a linear system in
//! `X`, so enumerating `A1` over `H` decides representability outright on
//! small fields.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::hyperplane::Hyperplane;
use crate::linalg::{self, Rect};
use crate::matrix::{span_dimension, Mat};
use crate::solver::{self, check_instance, Decomposition, SolveOutcome, SolverConfig, Stages, Strategy};
use crate::textio::Instance;

/// Largest `|H|` the exhaustive mode will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
/// Largest `|H|^2` the bracket-set enumeration accepts.
pub const BRACKET_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// Every element of `H` in coordinate order.
    Exhaustive,
    /// Seeded random elements of `H`.
    Sampled,
}

/// The first equation a claimed decomposition violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyFailure {
    Shape(String),
    Commutator { expected: Mat, found: Mat },
    FirstNotInHyperplane(Elem),
    SecondNotInHyperplane(Elem),
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            VerifyFailure::Commutator { .. } => write!(f, "A1 A2 - A2 A1 != A"),
            VerifyFailure::FirstNotInHyperplane(v) => write!(f, "tr(B A1) = {v:?}, expected 0"),
            VerifyFailure::SecondNotInHyperplane(v) => write!(f, "tr(B A2) = {v:?}, expected 0"),
        }
    }
}

impl std::error::Error for VerifyFailure {}

/// Checks `[A1, A2] = A`, `tr(B A1) = 0` and `tr(B A2) = 0`, in that order.
pub fn verify_decomposition(a: &Mat, h: &Hyperplane, a1: &Mat, a2: &Mat) -> std::result::Result<(), VerifyFailure> {
    let shape = |e: Error| VerifyFailure::Shape(e.to_string());
    a.trace_form(h.normal()).map_err(shape)?;
    let found = a1.commutator(a2).map_err(shape)?;
    a.trace_form(&found).map_err(shape)?;
    if &found != a {
        return Err(VerifyFailure::Commutator {
            expected: a.clone(),
            found,
        });
    }
    let f = a.field();
    let t1 = h.pairing(a1).map_err(shape)?;
    if !f.is_zero(&t1) {
        return Err(VerifyFailure::FirstNotInHyperplane(t1));
    }
    let t2 = h.pairing(a2).map_err(shape)?;
    if !f.is_zero(&t2) {
        return Err(VerifyFailure::SecondNotInHyperplane(t2));
    }
    Ok(())
}

/// `ad_{A1}` with the row `X -> tr(B X)` appended.
fn oracle_system(a1: &Mat, b: &Mat) -> Rect {
    let n = a1.n();
    let mut r = a1.ad_rect();
    r.rows += 1;
    for k in 0..n * n {
        r.data.push(b.get(k % n, k / n).clone());
    }
    r
}

fn combine(f: &Field, basis: &[Mat], coords: &[Elem]) -> Mat {
    let n = basis[0].n();
    let mut m = Mat::zeros(f, n);
    for (c, b) in coords.iter().zip(basis) {
        if !f.is_zero(c) {
            m = m.add_scaled(c, b);
        }
    }
    m
}

fn size_of_h(f: &Field, n: usize) -> Option<u64> {
    f.cardinality()?.checked_pow((n * n - 1) as u32)
}

/// Searches `A1` over `H` and solves for `A2`. Returns the pair found (if
/// any) and the number of `A1` tried. Exhaustive mode fails with
/// [`Error::OutOfBudget`] when `budget` stops it before the end of `H`.
pub fn oracle_search(
    a: &Mat,
    h: &Hyperplane,
    mode: OracleMode,
    budget: u64,
    seed: u64,
) -> Result<(Option<(Mat, Mat)>, u64)> {
    check_instance(a, h)?;
    let f = a.field();
    let n = a.n();
    let basis = h.basis();
    let mut rhs = a.entries().to_vec();
    rhs.push(f.zero());
    let attempt = |a1: Mat| -> Option<(Mat, Mat)> {
        let sys = oracle_system(&a1, h.normal());
        let x = linalg::solve(f, &sys, &rhs)?;
        let a2 = Mat::from_rows(f, x.chunks(n).map(|r| r.to_vec()).collect()).ok()?;
        Some((a1, a2))
    };
    match mode {
        OracleMode::Exhaustive => {
            let size = size_of_h(f, n).ok_or(Error::NotEnumerable)?;
            if size > EXHAUSTIVE_LIMIT {
                return Err(Error::Precondition(format!(
                    "|H| = {size} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}"
                )));
            }
            let els = f.elements()?;
            let q = els.len();
            let mut idx = vec![0usize; basis.len()];
            let mut used = 0u64;
            loop {
                if used >= budget {
                    return Err(Error::OutOfBudget(format!("exhaustive search stopped after {used} of {size}")));
                }
                used += 1;
                let coords: Vec<Elem> = idx.iter().map(|&i| els[i].clone()).collect();
                if let Some(pair) = attempt(combine(f, &basis, &coords)) {
                    return Ok((Some(pair), used));
                }
                let mut k = idx.len();
                loop {
                    if k == 0 {
                        return Ok((None, used));
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < q {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        OracleMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for used in 1..=budget {
                let coords: Vec<Elem> = basis.iter().map(|_| f.random(&mut rng)).collect();
                if let Some(pair) = attempt(combine(f, &basis, &coords)) {
                    return Ok((Some(pair), used));
                }
            }
            Ok((None, budget))
        }
    }
}

/// [`oracle_search`] wrapped into a verified decomposition tagged
/// `exhaustive`.
pub fn oracle_decompose(
    a: &Mat,
    h: &Hyperplane,
    mode: OracleMode,
    budget: u64,
    seed: u64,
) -> Result<Option<Decomposition>> {
    match oracle_search(a, h, mode, budget, seed)? {
        (Some((a1, a2)), used) => Ok(Some(Decomposition::new(a, h, a1, a2, Strategy::Exhaustive, used, seed)?)),
        (None, _) => Ok(None),
    }
}

/// `{[M, N] : M, N in H}` for `n = 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketSet {
    pub members: Vec<Mat>,
    /// Dimension of the linear span of the members.
    pub span_dimension: usize,
    /// Whether the members exhaust their span.
    pub fills_span: bool,
}

pub fn enumerate_bracket_set(h: &Hyperplane) -> Result<BracketSet> {
    if h.n() != 2 {
        return Err(Error::Precondition("bracket sets are enumerated for n = 2".into()));
    }
    let f = h.field();
    let size = size_of_h(f, 2).ok_or(Error::NotEnumerable)?;
    if size.checked_mul(size).is_none_or(|v| v > BRACKET_LIMIT) {
        return Err(Error::OutOfBudget(format!("|H|^2 = {size}^2 exceeds {BRACKET_LIMIT}")));
    }
    let els = f.elements()?;
    let basis = h.basis();
    let members_h: Vec<Mat> = (0..size as usize)
        .map(|mut code| {
            let coords: Vec<Elem> = (0..basis.len())
                .map(|_| {
                    let e = els[code % els.len()].clone();
                    code /= els.len();
                    e
                })
                .collect();
            combine(f, &basis, &coords)
        })
        .collect();
    let mut set = BTreeSet::new();
    for m in &members_h {
        for n in &members_h {
            set.insert(m.commutator(n)?.entries().to_vec());
        }
    }
    let members: Vec<Mat> = set
        .into_iter()
        .map(|e| Mat::from_rows(f, e.chunks(2).map(|r| r.to_vec()).collect()))
        .collect::<Result<_>>()?;
    let span = span_dimension(&members);
    let fills_span = (members.len() as u64) == (els.len() as u64).pow(span as u32);
    Ok(BracketSet {
        members,
        span_dimension: span,
        fills_span,
    })
}

/// A uniformly random trace-zero `A` and nonzero `B`; with
/// `trace_zero_normal`, `B` is trace-zero too so that `I` lies in `H`.
pub fn random_instance<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R, trace_zero_normal: bool) -> Instance {
    let trace_free = |rng: &mut R| {
        let mut m = Mat::random(field, n, rng);
        let t = m.trace();
        let last = field.sub(m.get(n - 1, n - 1), &t);
        m.set(n - 1, n - 1, last);
        m
    };
    let a = trace_free(rng);
    let b = loop {
        let b = if trace_zero_normal {
            trace_free(rng)
        } else {
            Mat::random(field, n, rng)
        };
        if !b.is_zero() {
            break b;
        }
    };
    Instance { a, b }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub field: Field,
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    /// Draw trace-zero normals, forcing `I` into `H`.
    pub force_identity_in_h: bool,
    pub budget: u64,
    pub stages: Stages,
}

impl SweepConfig {
    pub fn new(field: Field, n: usize, count: u64, seed: u64) -> SweepConfig {
        SweepConfig {
            field,
            n,
            count,
            seed,
            force_identity_in_h: false,
            budget: solver::DEFAULT_BUDGET,
            stages: Stages::ALL,
        }
    }

    /// The instance with the given index, as the sweep generates it.
    pub fn instance(&self, index: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        random_instance(&self.field, self.n, &mut rng, self.force_identity_in_h)
    }

    fn solver_config(&self, index: u64) -> SolverConfig {
        SolverConfig {
            budget: self.budget,
            seed: self.seed.wrapping_add(index),
            stages: self.stages,
        }
    }
}

/// A failed instance, with enough data to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub index: u64,
    pub solver_seed: u64,
    pub status: String,
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
    /// What the oracle says about the same instance.
    pub oracle: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub field: String,
    pub n: usize,
    pub count: u64,
    pub successes: u64,
    pub strategy_histogram: BTreeMap<String, u64>,
    pub failures: Vec<SweepFailure>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn rows(m: &Mat) -> Vec<Vec<String>> {
    let f = m.field();
    m.rows().iter().map(|r| r.iter().map(|e| f.format_elem(e)).collect()).collect()
}

fn cross_check(a: &Mat, h: &Hyperplane, budget: u64, seed: u64) -> String {
    let f = a.field();
    let exhaustive = size_of_h(f, a.n()).is_some_and(|s| s <= EXHAUSTIVE_LIMIT);
    let (mode, budget) = if exhaustive {
        (OracleMode::Exhaustive, EXHAUSTIVE_LIMIT)
    } else {
        (OracleMode::Sampled, budget)
    };
    match oracle_decompose(a, h, mode, budget, seed) {
        Ok(Some(_)) => "decomposed".into(),
        Ok(None) if exhaustive => "no_pair_exists".into(),
        Ok(None) => "nothing_found".into(),
        Err(e) => format!("error: {e}"),
    }
}

enum Outcome {
    Success(Strategy),
    Failure(SweepFailure),
}

fn run_one(config: &SweepConfig, index: u64) -> Outcome {
    let inst = config.instance(index);
    let sc = config.solver_config(index);
    let h = Hyperplane::new(inst.b.clone()).expect("generated normals are nonzero");
    let failure = |status: &str, detail: String| {
        Outcome::Failure(SweepFailure {
            index,
            solver_seed: sc.seed,
            status: status.into(),
            a: rows(&inst.a),
            b: rows(&inst.b),
            oracle: cross_check(&inst.a, &h, config.budget, sc.seed),
            detail,
        })
    };
    match solver::decompose(&inst.a, &h, &sc) {
        Ok(SolveOutcome::Decomposed(d)) => Outcome::Success(d.strategy()),
        Ok(SolveOutcome::NotRepresentable { .. }) => failure("not_representable", String::new()),
        Ok(SolveOutcome::Exhausted { log, .. }) => failure("exhausted", log.join("; ")),
        Err(e) => failure("error", e.to_string()),
    }
}

/// Runs the solver on `count` seeded instances in parallel. The report does
/// not depend on scheduling; only `elapsed_ms` varies between runs.
pub fn sweep(config: &SweepConfig) -> SweepReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..config.count)
        .into_par_iter()
        .map(|i| run_one(config, i))
        .collect();
    let mut histogram = BTreeMap::new();
    let mut failures = Vec::new();
    let mut successes = 0;
    for o in outcomes {
        match o {
            Outcome::Success(s) => {
                successes += 1;
                *histogram.entry(s.tag().to_string()).or_insert(0) += 1;
            }
            Outcome::Failure(f) => failures.push(f),
        }
    }
    SweepReport {
        field: config.field.descriptor(),
        n: config.n,
        count: config.count,
        successes,
        strategy_histogram: histogram,
        failures,
        seed: config.seed,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: &Field, n: usize, i: usize, j: usize) -> Mat {
        Mat::unit(f, n, i - 1, j - 1)
    }

    #[test]
    fn verify_examples() {
        let f = Field::prime(5).unwrap();
        let h = Hyperplane::new(e(&f, 3, 3, 1)).unwrap();
        let a = e(&f, 3, 1, 3);
        assert_eq!(verify_decomposition(&a, &h, &e(&f, 3, 1, 2), &e(&f, 3, 2, 3)), Ok(()));
        let id = Mat::identity(&f, 3);
        let err = verify_decomposition(&a, &h, &id, &id).unwrap_err();
        assert!(matches!(err, VerifyFailure::Commutator { .. }));
        assert!(err.to_string().contains("A1 A2 - A2 A1"));
        // Right commutator, first member outside H.
        let a1 = &e(&f, 3, 1, 2) + &e(&f, 3, 1, 3);
        let err = verify_decomposition(&a, &h, &a1, &e(&f, 3, 2, 3)).unwrap_err();
        assert!(matches!(err, VerifyFailure::FirstNotInHyperplane(_)));
        assert!(err.to_string().contains("tr(B A1)"));
        let a2 = &e(&f, 3, 2, 3) + &e(&f, 3, 1, 3);
        let err = verify_decomposition(&a, &h, &e(&f, 3, 1, 2), &a2).unwrap_err();
        assert!(matches!(err, VerifyFailure::SecondNotInHyperplane(_)));
        let small = Mat::zeros(&f, 2);
        assert!(matches!(
            verify_decomposition(&a, &h, &small, &small),
            Err(VerifyFailure::Shape(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        let f = Field::parse("gf 2 2").unwrap();
        let z = Mat::zeros(&f, 3);
        let h = Hyperplane::new(e(&f, 3, 1, 2)).unwrap();
        let (pair, used) = oracle_search(&z, &h, OracleMode::Exhaustive, 10, 0).unwrap();
        assert_eq!(pair, Some((z.clone(), z.clone())));
        assert_eq!(used, 1);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let inst = random_instance(&f, 3, &mut rng, true);
            let h = Hyperplane::new(inst.b).unwrap();
            let d = oracle_decompose(&inst.a, &h, OracleMode::Exhaustive, EXHAUSTIVE_LIMIT, 0).unwrap();
            assert!(d.is_some());
        }
        let a = Mat::jordan(&f, 3);
        assert!(matches!(
            oracle_search(&a, &Hyperplane::trace_zero(&f, 3), OracleMode::Exhaustive, 0, 0),
            Err(Error::OutOfBudget(_))
        ));
        let q = Field::rationals();
        assert_eq!(
            oracle_search(&Mat::jordan(&q, 3), &Hyperplane::trace_zero(&q, 3), OracleMode::Exhaustive, 10, 0),
            Err(Error::NotEnumerable)
        );
    }

    #[test]
    fn gf2_identity_normal_outcome() {
        // Over GF(2) with B = I, [H, H] is a line; record what enumeration says
        // about E12 and check the solver agrees.
        let f = Field::prime(2).unwrap();
        let h = Hyperplane::new(Mat::identity(&f, 2)).unwrap();
        let a = e(&f, 2, 1, 2);
        let set = enumerate_bracket_set(&h).unwrap();
        let exists = set.members.contains(&a);
        let (pair, _) = oracle_search(&a, &h, OracleMode::Exhaustive, EXHAUSTIVE_LIMIT, 0).unwrap();
        assert_eq!(pair.is_some(), exists);
        let out = solver::decompose(&a, &h, &SolverConfig::default()).unwrap();
        assert_eq!(out.decomposition().is_some(), exists);
    }

    #[test]
    fn bracket_set_examples() {
        let f5 = Field::prime(5).unwrap();
        let full = enumerate_bracket_set(&Hyperplane::new(Mat::identity(&f5, 2)).unwrap()).unwrap();
        assert_eq!(full.span_dimension, 3);
        let line = enumerate_bracket_set(&Hyperplane::new(e(&f5, 2, 1, 2)).unwrap()).unwrap();
        assert_eq!(line.span_dimension, 1);
        assert!(line.fills_span);
        let f4 = Field::parse("gf 2 2").unwrap();
        let line = enumerate_bracket_set(&Hyperplane::new(e(&f4, 2, 1, 2)).unwrap()).unwrap();
        assert_eq!(line.span_dimension, 1);
        assert!(enumerate_bracket_set(&Hyperplane::trace_zero(&f5, 3)).is_err());
    }

    #[test]
    fn random_instances_have_the_requested_traces() {
        let f = Field::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for flag in [false, true] {
            for _ in 0..50 {
                let inst = random_instance(&f, 4, &mut rng, flag);
                assert!(f.is_zero(&inst.a.trace()));
                assert!(!inst.b.is_zero());
                if flag {
                    assert!(f.is_zero(&inst.b.trace()));
                }
            }
        }
    }

    #[test]
    fn sweep_reports() {
        let f = Field::prime(5).unwrap();
        let empty = sweep(&SweepConfig::new(f.clone(), 3, 0, 1));
        assert_eq!((empty.count, empty.successes), (0, 0));
        assert!(empty.failures.is_empty());

        let mut config = SweepConfig::new(f, 3, 25, 7);
        config.force_identity_in_h = true;
        let mut one = sweep(&config);
        let mut two = sweep(&config);
        one.elapsed_ms = 0;
        two.elapsed_ms = 0;
        assert_eq!(one, two);
        assert_eq!(one.successes, 25);
        let json: serde_json::Value = serde_json::from_str(&one.to_json()).unwrap();
        let keys: BTreeSet<&str> = json.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(
            keys,
            BTreeSet::from(["field", "n", "count", "successes", "strategy_histogram", "failures", "seed", "elapsed_ms"])
        );
    }
}
