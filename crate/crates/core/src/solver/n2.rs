//! Size two. If `I` is outside `H` every trace-zero matrix is a commutator
//! of `H`; otherwise `H = span(I, M, N)` and every commutator of `H` is a
//! multiple of `[M, N]`.

use crate::error::{Error, Result};
use crate::hyperplane::Hyperplane;
use crate::matrix::{solve_linear, span_dimension, Mat};

use super::{search, Search, SolveOutcome, Strategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum N2Structure {
    /// `[H, H]` is all of `sl_2`.
    FullSl2,
    /// `[H, H]` is the line spanned by `generator = [M, N]`, where
    /// `(I, M, N)` is a basis of `H`.
    Line { generator: Mat, basis: (Mat, Mat) },
}

pub fn analyze_n2(h: &Hyperplane) -> Result<N2Structure> {
    if h.n() != 2 {
        return Err(Error::Precondition("bracket analysis needs n = 2".into()));
    }
    if !h.contains_identity() {
        return Ok(N2Structure::FullSl2);
    }
    let id = Mat::identity(h.field(), 2);
    let basis = h.basis();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let (m, n) = (&basis[i], &basis[j]);
            if span_dimension(&[id.clone(), m.clone(), n.clone()]) == 3 {
                return Ok(N2Structure::Line {
                    generator: m.commutator(n)?,
                    basis: (m.clone(), n.clone()),
                });
            }
        }
    }
    unreachable!("a 3-dimensional space containing I has such a basis")
}

pub(crate) fn decompose_n2(a: &Mat, h: &Hyperplane, s: &mut Search) -> Result<SolveOutcome> {
    match analyze_n2(h)? {
        N2Structure::FullSl2 => match search::unconstrained_pair(a, s)? {
            Some((x, y)) => {
                let (a1, a2) = h.scalar_adjust_pair(&x, &y)?;
                Ok(SolveOutcome::Decomposed(s.finish(a, h, a1, a2, Strategy::EasyShift)?))
            }
            None => Ok(SolveOutcome::Exhausted {
                attempts: s.attempts,
                log: vec!["easy_shift: no unconstrained pair found".into()],
            }),
        },
        N2Structure::Line { generator, basis } => match solve_linear(std::slice::from_ref(&generator), a) {
            Some(c) => {
                let (m, n) = basis;
                let n = n.scale(&c[0]);
                Ok(SolveOutcome::Decomposed(s.finish(a, h, m, n, Strategy::BracketLine)?))
            }
            None => Ok(SolveOutcome::NotRepresentable {
                line_generator: Some(generator),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::solver::{decompose, SolverConfig};

    #[test]
    fn structure_examples() {
        let f5 = Field::prime(5).unwrap();
        let h = Hyperplane::new(Mat::identity(&f5, 2)).unwrap();
        assert_eq!(analyze_n2(&h).unwrap(), N2Structure::FullSl2);

        let f4 = Field::parse("gf 2 2").unwrap();
        let h = Hyperplane::new(Mat::unit(&f4, 2, 0, 1)).unwrap();
        let N2Structure::Line { generator, .. } = analyze_n2(&h).unwrap() else {
            panic!("expected a line");
        };
        assert!(!generator.is_zero());
        assert!(analyze_n2(&Hyperplane::trace_zero(&f5, 3)).is_err());
    }

    #[test]
    fn line_members_decompose_and_others_do_not() {
        let f = Field::prime(5).unwrap();
        let h = Hyperplane::new(Mat::unit(&f, 2, 0, 1)).unwrap();
        let N2Structure::Line { generator, .. } = analyze_n2(&h).unwrap() else {
            panic!("expected a line");
        };
        let on_line = generator.scale(&f.from_i64(3));
        let out = decompose(&on_line, &h, &SolverConfig::default()).unwrap();
        assert_eq!(out.decomposition().unwrap().strategy(), Strategy::BracketLine);

        let off = Mat::from_i64(&f, &[&[0, 1], &[0, 0]]);
        let off = if solve_linear(std::slice::from_ref(&generator), &off).is_some() {
            Mat::from_i64(&f, &[&[0, 0], &[1, 0]])
        } else {
            off
        };
        assert_eq!(
            decompose(&off, &h, &SolverConfig::default()).unwrap(),
            SolveOutcome::NotRepresentable {
                line_generator: Some(generator)
            }
        );
    }

    #[test]
    fn easy_case_covers_sl2() {
        let f = Field::prime(7).unwrap();
        let h = Hyperplane::new(Mat::from_i64(&f, &[&[1, 2], &[3, 4]])).unwrap();
        for a in [
            Mat::from_i64(&f, &[&[1, 0], &[0, -1]]),
            Mat::from_i64(&f, &[&[0, 1], &[0, 0]]),
            // irreducible characteristic polynomial t^2 + 1
            Mat::from_i64(&f, &[&[0, 1], &[-1, 0]]),
        ] {
            let out = decompose(&a, &h, &SolverConfig::default()).unwrap();
            assert_eq!(out.decomposition().unwrap().strategy(), Strategy::EasyShift);
        }
    }
}
