//! The decomposition pipeline.
//!
//! Stages, in order: scalar shift when `I` is outside the hyperplane; the
//! normal form `lambda I + E23` for `n = 3`; Thompson pairs when `B` lies in
//! `span(I, A)`; explicit nilpotent witnesses built on triangular or
//! Hessenberg bases; a seeded randomized witness search; and finally the
//! brute-force oracle. Every result is re-verified before it is returned.

mod lld;
mod n2;
mod search;
mod special;
mod witness;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperplane::Hyperplane;
use crate::matrix::{span_dimension, Mat};
use crate::oracle::{self, OracleMode};

pub use lld::{detect_lld, LldMode, LldReport};
pub use n2::{analyze_n2, N2Structure};
pub use search::{cyclic_search, thompson_decompose};
pub use special::{special3_decompose, special_form};
pub use witness::{
    construct_hessenberg_witness, construct_strict_upper_witness, corner_entry, try_cyclic_witness,
    WitnessResult,
};

pub const DEFAULT_BUDGET: u64 = 100_000;

/// How a decomposition was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `A = 0` or `n = 1`: the zero pair.
    Trivial,
    EasyShift,
    LldSpan,
    TriangularWitness,
    HessenbergWitness,
    Special3,
    CyclicSearch,
    Exhaustive,
    /// `n = 2` with `I` in the hyperplane and `A` on the bracket line.
    BracketLine,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::Trivial,
        Strategy::EasyShift,
        Strategy::LldSpan,
        Strategy::TriangularWitness,
        Strategy::HessenbergWitness,
        Strategy::Special3,
        Strategy::CyclicSearch,
        Strategy::Exhaustive,
        Strategy::BracketLine,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::Trivial => "trivial",
            Strategy::EasyShift => "easy_shift",
            Strategy::LldSpan => "lld_span",
            Strategy::TriangularWitness => "triangular_witness",
            Strategy::HessenbergWitness => "hessenberg_witness",
            Strategy::Special3 => "special3",
            Strategy::CyclicSearch => "cyclic_search",
            Strategy::Exhaustive => "exhaustive",
            Strategy::BracketLine => "bracket_line",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A verified pair `(A1, A2)` in `H^2` with `[A1, A2] = A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    a1: Mat,
    a2: Mat,
    strategy: Strategy,
    attempts: u64,
    seed: u64,
}

impl Decomposition {
    /// Fails with [`Error::Unverified`] unless the pair really decomposes `a`
    /// inside `h`.
    pub fn new(
        a: &Mat,
        h: &Hyperplane,
        a1: Mat,
        a2: Mat,
        strategy: Strategy,
        attempts: u64,
        seed: u64,
    ) -> Result<Decomposition> {
        oracle::verify_decomposition(a, h, &a1, &a2)
            .map_err(|e| Error::Unverified(format!("{strategy}: {e}")))?;
        Ok(Decomposition {
            a1,
            a2,
            strategy,
            attempts,
            seed,
        })
    }

    pub fn a1(&self) -> &Mat {
        &self.a1
    }

    pub fn a2(&self) -> &Mat {
        &self.a2
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Candidate witnesses tried before this pair was found.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn into_pair(self) -> (Mat, Mat) {
        (self.a1, self.a2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Decomposed(Decomposition),
    /// Proven impossible. For `n = 2` the generator of the bracket line is
    /// attached; for tiny fields the exhaustive oracle found nothing.
    NotRepresentable { line_generator: Option<Mat> },
    /// Budget ran out. `log` lists the stages that were tried.
    Exhausted { attempts: u64, log: Vec<String> },
}

impl SolveOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::Decomposed(_) => "decomposed",
            SolveOutcome::NotRepresentable { .. } => "not_representable",
            SolveOutcome::Exhausted { .. } => "exhausted",
        }
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match self {
            SolveOutcome::Decomposed(d) => Some(d),
            _ => None,
        }
    }

    pub fn into_decomposition(self) -> Option<Decomposition> {
        match self {
            SolveOutcome::Decomposed(d) => Some(d),
            _ => None,
        }
    }
}

/// Which pipeline stages may run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stages {
    pub easy_shift: bool,
    pub lld_span: bool,
    pub structured: bool,
    pub special3: bool,
    pub cyclic_search: bool,
    pub exhaustive: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        easy_shift: true,
        lld_span: true,
        structured: true,
        special3: true,
        cyclic_search: true,
        exhaustive: true,
    };
}

impl Default for Stages {
    fn default() -> Self {
        Stages::ALL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of candidate witnesses.
    pub budget: u64,
    pub seed: u64,
    pub stages: Stages,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            budget: DEFAULT_BUDGET,
            seed: 0,
            stages: Stages::ALL,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Default::default()
        }
    }
}

/// Shared search state: RNG, attempt counter and a short log.
pub(crate) struct Search {
    pub rng: ChaCha8Rng,
    pub budget: u64,
    pub attempts: u64,
    pub seed: u64,
    pub log: Vec<String>,
}

const LOG_LIMIT: usize = 64;

impl Search {
    pub fn new(budget: u64, seed: u64) -> Search {
        Search {
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget,
            attempts: 0,
            seed,
            log: Vec::new(),
        }
    }

    /// Counts one candidate; false once the budget is used up.
    pub fn spend(&mut self) -> bool {
        if self.attempts >= self.budget {
            return false;
        }
        self.attempts += 1;
        true
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.attempts)
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        if self.log.len() < LOG_LIMIT {
            self.log.push(msg.into());
        }
    }

    pub fn finish(&self, a: &Mat, h: &Hyperplane, a1: Mat, a2: Mat, strategy: Strategy) -> Result<Decomposition> {
        Decomposition::new(a, h, a1, a2, strategy, self.attempts, self.seed)
    }
}

pub(crate) fn check_instance(a: &Mat, h: &Hyperplane) -> Result<()> {
    if a.field() != h.field() {
        return Err(Error::MixedFields);
    }
    if a.n() != h.n() {
        return Err(Error::DimensionMismatch(a.n(), h.n()));
    }
    if !a.field().is_zero(&a.trace()) {
        return Err(Error::NonZeroTrace);
    }
    Ok(())
}

/// Decomposes `a` inside `h`, a pure function of its inputs and `config`.
pub fn decompose(a: &Mat, h: &Hyperplane, config: &SolverConfig) -> Result<SolveOutcome> {
    check_instance(a, h)?;
    let mut s = Search::new(config.budget, config.seed);
    if a.is_zero() || a.n() == 1 {
        let z = Mat::zeros(a.field(), a.n());
        return Ok(SolveOutcome::Decomposed(s.finish(a, h, z.clone(), z, Strategy::Trivial)?));
    }
    if a.n() == 2 {
        return n2::decompose_n2(a, h, &mut s);
    }
    pipeline(a, h, &config.stages, &mut s)
}

pub(crate) fn pipeline(a: &Mat, h: &Hyperplane, stages: &Stages, s: &mut Search) -> Result<SolveOutcome> {
    let f = a.field();
    let decomposed = |d: Decomposition| Ok(SolveOutcome::Decomposed(d));

    if stages.easy_shift && !h.contains_identity() {
        if let Some((x, y)) = search::unconstrained_pair(a, s)? {
            let (a1, a2) = h.scalar_adjust_pair(&x, &y)?;
            return decomposed(s.finish(a, h, a1, a2, Strategy::EasyShift)?);
        }
        s.note("easy_shift: no unconstrained pair found");
    }

    // Below the field-size hypothesis only the searches are meaningful.
    let tiny = h.contains_identity() && f.cardinality().is_some_and(|q| q <= 3);
    if !tiny {
        if stages.special3 && special::special_form(a).is_some() {
            if let Some(d) = special::special3_inner(a, h, s)? {
                return decomposed(d);
            }
            s.note("special3: no candidate succeeded");
        }
        if stages.lld_span {
            if let Some(d) = lld_span(a, h, s)? {
                return decomposed(d);
            }
        }
        if stages.structured {
            if let Some(d) = witness::structured(a, h, s)? {
                return decomposed(d);
            }
            s.note("structured witnesses: none succeeded");
        }
    } else {
        s.note("field has at most 3 elements and I lies in H: searching only");
    }

    let exhaustive_ok = stages.exhaustive && f.is_finite();
    if stages.cyclic_search {
        // Leave half of what remains to the exhaustive fallback.
        let share = if exhaustive_ok { s.remaining() / 2 } else { s.remaining() };
        if let Some(d) = search::cyclic_search_inner(a, h, s, share)? {
            return decomposed(d);
        }
        s.note("cyclic_search: budget share used up");
    }
    if exhaustive_ok {
        let q = f.cardinality().unwrap();
        let dim = (a.n() * a.n() - 1) as u32;
        let size = q.checked_pow(dim).filter(|&v| v <= oracle::EXHAUSTIVE_LIMIT);
        let mode = if size.is_some() {
            OracleMode::Exhaustive
        } else {
            OracleMode::Sampled
        };
        let budget = match size {
            Some(v) => v,
            None => s.remaining(),
        };
        let seed = s.seed;
        match oracle::oracle_search(a, h, mode, budget, seed)? {
            (Some((a1, a2)), used) => {
                s.attempts += used;
                return decomposed(s.finish(a, h, a1, a2, Strategy::Exhaustive)?);
            }
            (None, used) => {
                s.attempts += used;
                if mode == OracleMode::Exhaustive {
                    s.note("exhaustive: no pair exists");
                    return Ok(SolveOutcome::NotRepresentable { line_generator: None });
                }
                s.note("sampled oracle: nothing found");
            }
        }
    }
    Ok(SolveOutcome::Exhausted {
        attempts: s.attempts,
        log: s.log.clone(),
    })
}

/// `B` in `span(I, A)`: a trace-zero pair is automatically in the
/// hyperplane, because `tr(A A1) = tr(A A2) = 0` for any pair with
/// commutator `A`.
fn lld_span(a: &Mat, h: &Hyperplane, s: &mut Search) -> Result<Option<Decomposition>> {
    let f = a.field();
    let id = Mat::identity(f, a.n());
    let b = h.normal();
    if span_dimension(&[id.clone(), a.clone(), b.clone()]) == 3 {
        return Ok(None);
    }
    if a.scalar_value().is_some() && b.scalar_value().is_none() {
        // A scalar, B arbitrary: not a Thompson situation.
        return Ok(None);
    }
    match search::thompson_inner(a, s)? {
        Some((a1, a2)) => Ok(Some(s.finish(a, h, a1, a2, Strategy::LldSpan)?)),
        None => {
            s.note("lld_span: no trace-zero pair found");
            Ok(None)
        }
    }
}
