//! Univariate polynomials over an exact field.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldKind};

/// Rational root search gives up beyond this constant or leading term.
const ROOT_SEARCH_LIMIT: u64 = 1_000_000_000_000;

/// Polynomial with coefficients low degree first and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> Poly {
        let mut p = Poly {
            field: field.clone(),
            coeffs: coeffs.iter().map(|c| field.canonicalize(c)).collect(),
        };
        p.trim();
        p
    }

    pub fn from_i64(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &Field, c: Elem) -> Poly {
        Poly::new(field, vec![c])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    /// `t - root`.
    pub fn linear(field: &Field, root: &Elem) -> Poly {
        Poly::new(field, vec![field.neg(root), field.one()])
    }

    /// `t^d`.
    pub fn monomial(field: &Field, d: usize) -> Poly {
        let mut c = vec![field.zero(); d + 1];
        c[d] = field.one();
        Poly::new(field, c)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.field.is_one(c))
    }

    pub fn monic(&self) -> Result<Poly> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        let inv = self.field.inv(lead)?;
        Ok(self.scale(&inv))
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = f.zero();
        let c = (0..len)
            .map(|i| {
                f.add(
                    self.coeffs.get(i).unwrap_or(&z),
                    other.coeffs.get(i).unwrap_or(&z),
                )
            })
            .collect();
        Poly::new(f, c)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|a| f.neg(a)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let mut c = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(&c[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, c)
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = f.mul(&rem[top], &lead_inv);
            let shift = top - dd;
            if !f.is_zero(&c) {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = f.sub(&rem[shift + i], &f.mul(&c, d));
                }
            }
            quot[shift] = c;
            rem.pop();
        }
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other
            .div_rem(self)
            .map(|(_, r)| r.is_zero())
            .unwrap_or(false)
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// Roots in the field, each listed once. Finite fields are searched
    /// exhaustively; over the rationals the candidates are `±p/q` with `p`
    /// dividing the lowest and `q` the leading coefficient.
    pub fn roots(&self) -> Result<Vec<Elem>> {
        if self.field.kind() == FieldKind::Rational {
            return self.rational_roots();
        }
        Ok(self
            .field
            .elements()?
            .into_iter()
            .filter(|x| self.field.is_zero(&self.eval(x)))
            .collect())
    }

    fn rational_roots(&self) -> Result<Vec<Elem>> {
        let f = &self.field;
        if self.is_zero() {
            return Err(Error::NotEnumerable);
        }
        let rats: Vec<BigRational> = self
            .coeffs
            .iter()
            .map(|c| match c {
                Elem::Rat(r) => r.clone(),
                Elem::Fin(v) => BigRational::from_integer(BigInt::from(*v)),
            })
            .collect();
        let lcm = rats
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = rats
            .iter()
            .map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap();
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let limit = |c: &BigInt| {
            c.abs()
                .to_u64()
                .filter(|&v| v <= ROOT_SEARCH_LIMIT)
                .ok_or_else(|| Error::FieldTooLarge("coefficients too large for a rational root search".into()))
        };
        let a0 = limit(&ints[low])?;
        let an = limit(ints.last().unwrap())?;
        if ints.len() - low > 1 {
            for p in divisors(a0) {
                for q in divisors(an) {
                    for sign in [1i64, -1] {
                        let cand = BigRational::new(BigInt::from(sign) * BigInt::from(p), BigInt::from(q));
                        let e = Elem::Rat(cand.clone());
                        if f.is_zero(&self.eval(&e)) && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        Ok(roots.into_iter().map(Elem::Rat).collect())
    }
}

fn divisors(v: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= v {
        if v.is_multiple_of(d) {
            small.push(d);
            if d * d != v {
                large.push(v / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = &self.field;
        if self.is_zero() {
            return out.write_str("0");
        }
        let mut terms = Vec::new();
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let coef = if f.is_one(c) && d > 0 {
                String::new()
            } else {
                format!("({})", f.format_elem(c))
            };
            terms.push(match d {
                0 => f.format_elem(c),
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{d}"),
            });
        }
        out.write_str(&terms.join(" + "))
    }
}
