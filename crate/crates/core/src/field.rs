//! Exact field arithmetic: prime fields GF(p), extensions GF(p^k) given by a
//! monic irreducible modulus, and the rationals.
//!
//! A [`Field`] is a cheap, shareable handle. Elements are stored as raw
//! [`Elem`] values and interpreted relative to a field; [`Scalar`] pairs an
//! element with its field and refuses to mix fields.
//!
//! Extension elements are encoded as integers `c0 + c1 p + ... + c_{k-1} p^{k-1}`
//! where `c0 + c1 t + ...` is the residue modulo the defining polynomial.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Extension fields up to this size get full operation tables.
const TABLE_LIMIT: u64 = 256;

/// Raw field element. `Fin` is a residue (prime field) or an encoded
/// coefficient vector (extension field).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Fin(u32),
    Rat(BigRational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime,
    Extension,
    Rational,
}

struct Tables {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

pub struct FieldSpec {
    kind: FieldKind,
    p: u32,
    k: u32,
    /// Monic modulus, low degree first, length `k + 1`. Empty unless extension.
    modulus: Vec<u32>,
    q: u64,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("kind", &self.kind)
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Shareable handle to a field description.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldSpec>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.kind == other.0.kind
                && self.0.p == other.0.p
                && self.0.k == other.0.k
                && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over GF(p) as coefficient vectors, low degree first.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let p64 = p as u64;
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = lead * c as u64 % p64;
                let v = &mut r[shift + i];
                *v = ((*v as u64 + p64 - sub) % p64) as u32;
            }
        }
        r.pop();
    }
    r
}

/// Irreducibility of a monic polynomial over GF(p) by trial division with
/// every monic polynomial of degree at most half its own.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k <= 1 {
        return true;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                f.push((t % p as u64) as u32);
                t /= p as u64;
            }
            f.push(1);
            if poly_trim(poly_rem(m, &f, p)).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(Error::FieldTooLarge(format!("p = {p}")));
        }
        Ok(Field(Arc::new(FieldSpec {
            kind: FieldKind::Prime,
            p: p as u32,
            k: 1,
            modulus: Vec::new(),
            q: p,
            tables: None,
        })))
    }

    /// GF(p^k). Without a modulus, the lexicographically smallest monic
    /// irreducible (coefficients compared from the constant term up) is used.
    pub fn extension(p: u64, k: u32, modulus: Option<Vec<u64>>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::InvalidDegree(k));
        }
        if k == 1 && modulus.is_none() {
            return Field::prime(p);
        }
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q > u32::MAX as u128 {
            return Err(Error::FieldTooLarge(format!("{p}^{k}")));
        }
        let q = q as u64;
        let p32 = p as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 || m[k as usize] % p != 1 {
                    return Err(Error::BadModulus { expected: k });
                }
                let m: Vec<u32> = m.iter().map(|&c| (c % p) as u32).collect();
                if !is_irreducible(&m, p32) {
                    return Err(Error::ReducibleModulus(p32));
                }
                m
            }
            None => Self::default_modulus(p32, k),
        };
        let mut spec = FieldSpec {
            kind: FieldKind::Extension,
            p: p32,
            k,
            modulus,
            q,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            spec.tables = Some(build_tables(&spec));
        }
        Ok(Field(Arc::new(spec)))
    }

    fn default_modulus(p: u32, k: u32) -> Vec<u32> {
        // Lexicographic on (c0, c1, ..., c_{k-1}) with c0 most significant.
        let count = (p as u64).pow(k);
        for idx in 0..count {
            let mut m = vec![0u32; k as usize + 1];
            let mut t = idx;
            for i in (0..k as usize).rev() {
                m[i] = (t % p as u64) as u32;
                t /= p as u64;
            }
            m[k as usize] = 1;
            if is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn rationals() -> Field {
        Field(Arc::new(FieldSpec {
            kind: FieldKind::Rational,
            p: 0,
            k: 1,
            modulus: Vec::new(),
            q: 0,
            tables: None,
        }))
    }

    /// Parses `gf <p>`, `gf <p> <k>`, `gf <p> <k> <c0>,...,<ck>` or `q`.
    /// `gf5` (no space) is accepted as shorthand for `gf 5`.
    pub fn parse(desc: &str) -> Result<Field> {
        let err = |m: &str| Error::parse(1, format!("bad field descriptor `{desc}`: {m}"));
        let trimmed = desc.trim();
        if trimmed == "q" || trimmed == "Q" {
            return Ok(Field::rationals());
        }
        let rest = trimmed
            .strip_prefix("gf")
            .or_else(|| trimmed.strip_prefix("GF"))
            .ok_or_else(|| err("expected `gf` or `q`"))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| err("expected an integer"));
        match toks.as_slice() {
            [p] => Field::prime(num(p)?),
            [p, k] => Field::extension(num(p)?, num(k)? as u32, None),
            [p, k, m] => {
                let coeffs = m
                    .split(',')
                    .map(|c| num(c.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Field::extension(num(p)?, num(k)? as u32, Some(coeffs))
            }
            _ => Err(err("wrong number of tokens")),
        }
    }

    /// Canonical descriptor; parses back to an equal field.
    pub fn descriptor(&self) -> String {
        match self.0.kind {
            FieldKind::Prime => format!("gf {}", self.0.p),
            FieldKind::Extension => {
                let m: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
                format!("gf {} {} {}", self.0.p, self.0.k, m.join(","))
            }
            FieldKind::Rational => "q".to_string(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Monic modulus, low degree first (extension fields only).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Number of elements, `None` for the rationals.
    pub fn cardinality(&self) -> Option<u64> {
        match self.0.kind {
            FieldKind::Rational => None,
            _ => Some(self.0.q),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.kind != FieldKind::Rational
    }

    pub fn zero(&self) -> Elem {
        match self.0.kind {
            FieldKind::Rational => Elem::Rat(BigRational::zero()),
            _ => Elem::Fin(0),
        }
    }

    pub fn one(&self) -> Elem {
        match self.0.kind {
            FieldKind::Rational => Elem::Rat(BigRational::one()),
            _ => Elem::Fin(1),
        }
    }

    /// Image of an integer in the field.
    pub fn from_i64(&self, v: i64) -> Elem {
        match self.0.kind {
            FieldKind::Rational => Elem::Rat(BigRational::from_integer(BigInt::from(v))),
            _ => Elem::Fin(v.rem_euclid(self.0.p as i64) as u32),
        }
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<Elem> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        match self.0.kind {
            FieldKind::Rational => Ok(Elem::Rat(BigRational::new(num.into(), den.into()))),
            _ => self.div(&self.from_i64(num), &self.from_i64(den)),
        }
    }

    /// Extension element from its coefficient vector (low degree first).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Elem {
        match self.0.kind {
            FieldKind::Extension => {
                let p = self.0.p as i64;
                let mut idx: u64 = 0;
                for &c in coeffs.iter().take(self.0.k as usize).rev() {
                    idx = idx * p as u64 + c.rem_euclid(p) as u64;
                }
                Elem::Fin(idx as u32)
            }
            _ => self.from_i64(coeffs.first().copied().unwrap_or(0)),
        }
    }

    /// Coefficient vector of an extension element (length `k`).
    pub fn coeffs(&self, a: &Elem) -> Vec<u32> {
        match a {
            Elem::Fin(v) => {
                let mut out = Vec::with_capacity(self.0.k as usize);
                let mut t = *v;
                for _ in 0..self.0.k {
                    out.push(t % self.0.p);
                    t /= self.0.p;
                }
                out
            }
            Elem::Rat(_) => Vec::new(),
        }
    }

    fn encode(&self, c: &[u32]) -> Elem {
        let mut idx: u32 = 0;
        for &d in c.iter().rev() {
            idx = idx * self.0.p + d;
        }
        Elem::Fin(idx)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Fin(v) => *v == 0,
            Elem::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        match a {
            Elem::Fin(v) => *v == 1,
            Elem::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fin(x), Elem::Fin(y)) => match (&self.0.tables, self.0.kind) {
                (Some(t), _) => Elem::Fin(t.add[*x as usize * t.q + *y as usize]),
                (None, FieldKind::Prime) => {
                    Elem::Fin(((*x as u64 + *y as u64) % self.0.p as u64) as u32)
                }
                _ => {
                    let p = self.0.p;
                    let c: Vec<u32> = self
                        .coeffs(a)
                        .iter()
                        .zip(self.coeffs(b))
                        .map(|(u, v)| (u + v) % p)
                        .collect();
                    self.encode(&c)
                }
            },
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            _ => panic!("element representations from different field kinds"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Fin(x) => match (&self.0.tables, self.0.kind) {
                (Some(t), _) => Elem::Fin(t.neg[*x as usize]),
                (None, FieldKind::Prime) => Elem::Fin((self.0.p - x) % self.0.p),
                _ => {
                    let p = self.0.p;
                    let c: Vec<u32> = self.coeffs(a).iter().map(|u| (p - u) % p).collect();
                    self.encode(&c)
                }
            },
            Elem::Rat(x) => Elem::Rat(-x),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x - y),
            _ => self.add(a, &self.neg(b)),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fin(x), Elem::Fin(y)) => match (&self.0.tables, self.0.kind) {
                (Some(t), _) => Elem::Fin(t.mul[*x as usize * t.q + *y as usize]),
                (None, FieldKind::Prime) => {
                    Elem::Fin(((*x as u64 * *y as u64) % self.0.p as u64) as u32)
                }
                _ => self.encode(&self.poly_mul_mod(&self.coeffs(a), &self.coeffs(b))),
            },
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            _ => panic!("element representations from different field kinds"),
        }
    }

    fn poly_mul_mod(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.0.p as u64;
        let mut prod = vec![0u32; a.len() + b.len()];
        for (i, &u) in a.iter().enumerate() {
            for (j, &v) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.0.modulus, self.0.p);
        r.resize(self.0.k as usize, 0);
        r
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(match a {
            Elem::Fin(x) => match (&self.0.tables, self.0.kind) {
                (Some(t), _) => Elem::Fin(t.inv[*x as usize]),
                (None, FieldKind::Prime) => {
                    let (g, s, _) = ext_gcd(*x as i64, self.0.p as i64);
                    debug_assert_eq!(g, 1);
                    Elem::Fin(s.rem_euclid(self.0.p as i64) as u32)
                }
                _ => self.pow(a, self.0.q - 2),
            },
            Elem::Rat(x) => Elem::Rat(x.recip()),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Every element exactly once: zero first, then increasing encoding.
    pub fn elements(&self) -> Result<Vec<Elem>> {
        match self.0.kind {
            FieldKind::Rational => Err(Error::NotEnumerable),
            _ => Ok((0..self.0.q as u32).map(Elem::Fin).collect()),
        }
    }

    pub fn nonzero_elements(&self) -> Result<Vec<Elem>> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }

    /// Uniform element for finite fields; an integer in `-3..=3` for the
    /// rationals.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        match self.0.kind {
            FieldKind::Rational => self.from_i64(rng.gen_range(-3..=3)),
            _ => Elem::Fin(rng.gen_range(0..self.0.q) as u32),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        loop {
            let e = self.random(rng);
            if !self.is_zero(&e) {
                return e;
            }
        }
    }

    /// Reduces a possibly non-canonical representation. Canonical input is
    /// returned unchanged.
    pub fn canonicalize(&self, a: &Elem) -> Elem {
        match a {
            Elem::Fin(v) => match self.0.kind {
                FieldKind::Prime => Elem::Fin(v % self.0.p),
                _ => Elem::Fin((*v as u64 % self.0.q) as u32),
            },
            Elem::Rat(r) => Elem::Rat(BigRational::new(r.numer().clone(), r.denom().clone())),
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let bad = || Error::parse(0, format!("bad element literal `{s}`"));
        let s = s.trim();
        match self.0.kind {
            FieldKind::Rational => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Elem::Rat(BigRational::new(n, d)))
            }
            FieldKind::Prime => {
                let v: BigInt = s.parse().map_err(|_| bad())?;
                let r = v.mod_floor(&BigInt::from(self.0.p));
                Ok(Elem::Fin(r.to_u32().unwrap()))
            }
            FieldKind::Extension => {
                if s.contains(',') {
                    let cs: Vec<i64> = s
                        .split(',')
                        .map(|c| c.trim().parse::<i64>().map_err(|_| bad()))
                        .collect::<Result<_>>()?;
                    if cs.len() != self.0.k as usize {
                        return Err(bad());
                    }
                    Ok(self.from_coeffs(&cs))
                } else {
                    let v: i64 = s.parse().map_err(|_| bad())?;
                    Ok(self.from_i64(v))
                }
            }
        }
    }

    pub fn format_elem(&self, a: &Elem) -> String {
        match a {
            Elem::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
            Elem::Fin(v) => match self.0.kind {
                FieldKind::Extension => {
                    let c: Vec<String> = self.coeffs(a).iter().map(|d| d.to_string()).collect();
                    c.join(",")
                }
                _ => v.to_string(),
            },
        }
    }

    /// Whether `a` is a valid canonical element of this field.
    pub fn contains(&self, a: &Elem) -> bool {
        match (a, self.0.kind) {
            (Elem::Rat(_), FieldKind::Rational) => true,
            (Elem::Fin(v), FieldKind::Prime | FieldKind::Extension) => (*v as u64) < self.0.q,
            _ => false,
        }
    }

    /// Element literal as a scalar tied to this field.
    pub fn scalar(&self, a: Elem) -> Scalar {
        Scalar {
            field: self.clone(),
            elem: a,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn build_tables(spec: &FieldSpec) -> Tables {
    // Build with a table-free handle, then freeze.
    let plain = Field(Arc::new(FieldSpec {
        kind: spec.kind,
        p: spec.p,
        k: spec.k,
        modulus: spec.modulus.clone(),
        q: spec.q,
        tables: None,
    }));
    let q = spec.q as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    let mut neg = vec![0u32; q];
    let mut inv = vec![0u32; q];
    for x in 0..q {
        let ex = Elem::Fin(x as u32);
        if let Elem::Fin(v) = plain.neg(&ex) {
            neg[x] = v;
        }
        for y in 0..q {
            let ey = Elem::Fin(y as u32);
            if let Elem::Fin(v) = plain.add(&ex, &ey) {
                add[x * q + y] = v;
            }
            if let Elem::Fin(v) = plain.mul(&ex, &ey) {
                mul[x * q + y] = v;
                if v == 1 {
                    inv[x] = y as u32;
                }
            }
        }
    }
    Tables {
        q,
        add,
        mul,
        neg,
        inv,
    }
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    field: Field,
    elem: Elem,
}

/// Binary operations available through [`Scalar::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Scalar {
    pub fn new(field: &Field, elem: Elem) -> Scalar {
        Scalar {
            field: field.clone(),
            elem: field.canonicalize(&elem),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn into_elem(self) -> Elem {
        self.elem
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.elem)
    }

    pub fn arith(&self, op: ArithOp, other: &Scalar) -> Result<Scalar> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        let f = &self.field;
        let elem = match op {
            ArithOp::Add => f.add(&self.elem, &other.elem),
            ArithOp::Sub => f.sub(&self.elem, &other.elem),
            ArithOp::Mul => f.mul(&self.elem, &other.elem),
        };
        Ok(Scalar {
            field: f.clone(),
            elem,
        })
    }

    pub fn inverse(&self) -> Result<Scalar> {
        Ok(Scalar {
            field: self.field.clone(),
            elem: self.field.inv(&self.elem)?,
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(&self.elem))
    }
}
