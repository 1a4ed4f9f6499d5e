//! Plain-text encodings.
//!
//! Matrix file: field descriptor, dimension, then `n` rows of
//! whitespace-separated element literals. Instance file: descriptor, `n`,
//! matrix `A`, matrix `B`, blocks separated by blank lines. Pair file: two
//! matrix blocks of `n` rows each, optionally preceded by the descriptor and
//! dimension lines. Lines starting with `#` are comments.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Mat;

/// An `(A, B)` problem instance: decompose `A` inside `{B}^perp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub a: Mat,
    pub b: Mat,
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.items.last().map_or(1, |(l, _)| l + 1);
        let item = self
            .items
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(last, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some((l, _)) => Err(Error::parse(l, "trailing content")),
        }
    }
}

fn parse_field(lines: &mut Lines) -> Result<Field> {
    let (l, s) = lines.next("a field descriptor")?;
    Field::parse(s).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::parse(l, msg),
        other => Error::parse(l, other.to_string()),
    })
}

fn parse_dim(lines: &mut Lines) -> Result<usize> {
    let (l, s) = lines.next("the dimension")?;
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::parse(l, format!("bad dimension `{s}`"))),
    }
}

fn parse_rows(lines: &mut Lines, field: &Field, n: usize) -> Result<Mat> {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (l, s) = lines.next("a matrix row")?;
        let cells: Vec<&str> = s.split_whitespace().collect();
        if cells.len() != n {
            return Err(Error::parse(l, format!("expected {n} entries, found {}", cells.len())));
        }
        let row = cells
            .iter()
            .map(|c| {
                field
                    .parse_elem(c)
                    .map_err(|_| Error::parse(l, format!("bad element `{c}` for {field}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Mat::from_rows(field, rows)
}

fn looks_like_descriptor(s: &str) -> bool {
    let s = s.trim();
    s == "q" || s == "Q" || s.starts_with("gf") || s.starts_with("GF")
}

pub fn parse_matrix(text: &str) -> Result<Mat> {
    let mut lines = Lines::new(text);
    let field = parse_field(&mut lines)?;
    let n = parse_dim(&mut lines)?;
    let m = parse_rows(&mut lines, &field, n)?;
    lines.finish()?;
    Ok(m)
}

/// Matrix rows only, for a known field (dimension inferred from the row
/// count). A full matrix file is accepted too if its field matches.
pub fn parse_matrix_with(text: &str, field: &Field) -> Result<Mat> {
    let lines = Lines::new(text);
    match lines.peek() {
        Some((l, s)) if looks_like_descriptor(s) => {
            let m = parse_matrix(text)?;
            if m.field() != field {
                return Err(Error::parse(l, format!("field {} does not match {field}", m.field())));
            }
            Ok(m)
        }
        _ => {
            let n = lines.items.len();
            if n == 0 {
                return Err(Error::parse(1, "empty matrix"));
            }
            let mut lines = lines;
            parse_rows(&mut lines, field, n)
        }
    }
}

pub fn format_rows(m: &Mat) -> String {
    m.to_string()
}

pub fn format_matrix(m: &Mat) -> String {
    format!("{}\n{}\n{}", m.field().descriptor(), m.n(), m)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let field = parse_field(&mut lines)?;
    let n = parse_dim(&mut lines)?;
    let a = parse_rows(&mut lines, &field, n)?;
    let b_line = lines.peek().map(|(l, _)| l).unwrap_or(0);
    let b = parse_rows(&mut lines, &field, n)?;
    lines.finish()?;
    if b.is_zero() {
        return Err(Error::parse(b_line, "the normal matrix B must be nonzero"));
    }
    Ok(Instance { a, b })
}

pub fn format_instance(inst: &Instance) -> String {
    format!(
        "{}\n\n{}\n\n{}\n{}",
        inst.a.field().descriptor(),
        inst.a.n(),
        inst.a,
        inst.b
    )
}

pub fn parse_pair(text: &str, field: &Field, n: usize) -> Result<(Mat, Mat)> {
    let mut lines = Lines::new(text);
    if let Some((l, s)) = lines.peek() {
        if looks_like_descriptor(s) {
            let f = parse_field(&mut lines)?;
            if &f != field {
                return Err(Error::parse(l, format!("field {f} does not match {field}")));
            }
            let dl = lines.peek().map(|(l, _)| l).unwrap_or(l);
            if parse_dim(&mut lines)? != n {
                return Err(Error::parse(dl, format!("dimension does not match {n}")));
            }
        }
    }
    let a1 = parse_rows(&mut lines, field, n)?;
    let a2 = parse_rows(&mut lines, field, n)?;
    lines.finish()?;
    Ok((a1, a2))
}

pub fn format_pair(a1: &Mat, a2: &Mat) -> String {
    format!("{}\n{}", a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        for desc in ["gf 5", "gf 2 2", "gf 3 2", "q"] {
            let f = Field::parse(desc).unwrap();
            let mut rng = rand::thread_rng();
            let m = Mat::from_fn(&f, 3, |_, _| f.random(&mut rng));
            let text = format_matrix(&m);
            assert_eq!(parse_matrix(&text).unwrap(), m);
        }
    }

    #[test]
    fn line_numbers_in_errors() {
        let text = "gf 5\n2\n1 2\n3 x\n";
        assert_eq!(
            parse_matrix(text).unwrap_err(),
            Error::parse(4, "bad element `x` for gf 5")
        );
        let text = "gf 6\n2\n";
        assert!(matches!(parse_matrix(text), Err(Error::Parse { line: 1, .. })));
        let text = "gf 5\n2\n1 2 3\n";
        assert!(matches!(parse_matrix(text), Err(Error::Parse { line: 3, .. })));
        let text = "gf 5\n\n2\n\n1 0\n0 1\n\n0 0\n0 0\n";
        assert!(matches!(parse_instance(text), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn instance_and_pair() {
        let f = Field::parse("gf 3 2").unwrap();
        let a = Mat::from_fn(&f, 2, |i, j| f.from_i64((i + 2 * j) as i64));
        let b = Mat::identity(&f, 2);
        let inst = Instance { a: a.clone(), b };
        let text = format_instance(&inst);
        assert!(text.contains("\n\n"));
        assert_eq!(parse_instance(&text).unwrap(), inst);
        let pair = format_pair(&a, &a.transpose());
        assert_eq!(parse_pair(&pair, &f, 2).unwrap(), (a.clone(), a.transpose()));
        let with_header = format!("{}\n2\n\n{}", f.descriptor(), pair);
        assert_eq!(parse_pair(&with_header, &f, 2).unwrap().1, a.transpose());
        assert_eq!(parse_matrix_with(&format_rows(&a), &f).unwrap(), a);
    }
}
