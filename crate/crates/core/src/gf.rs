//! Arithmetic in GF(p^h) for odd p.
//!
//! Elements are integers in `[0, q)` read as polynomials over GF(p) in base
//! `p`: the value `a0 + a1*p + ... + a_{h-1}*p^{h-1}` stands for
//! `a0 + a1*x + ... + a_{h-1}*x^{h-1}` modulo the context's irreducible
//! polynomial. The prime subfield is therefore embedded as `0..p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fields up to this order get full addition/multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// A field element in polynomial-basis encoding.
///
/// The element does not carry its field; every operation goes through a
/// [`FieldCtx`]. Use [`FieldCtx::elem`] to validate raw integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// JSON form of a field: `{"p":…, "h":…, "irreducible":[c0,…,ch]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub h: u32,
    pub irreducible: Vec<u32>,
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    square: Vec<bool>,
}

/// The finite field GF(p^h), immutable after construction.
pub struct FieldCtx {
    p: u32,
    h: u32,
    q: u32,
    /// Monic, low degree first, length h+1.
    irreducible: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("irreducible", &self.irreducible)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.h == other.h && self.irreducible == other.irreducible
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, h)` with `q = p^h`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut h = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p, h))
}

// Polynomials over GF(p), coefficient vectors low degree first.

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Remainder of `a` modulo `m` over GF(p); `m` must be nonzero.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let mut m = m.to_vec();
    trim(&mut r);
    trim(&mut m);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p) as u64;
    while r.len() > dm {
        let dr = r.len() - 1;
        let factor = r[dr] as u64 * lead_inv % p as u64;
        for (i, &c) in m.iter().enumerate() {
            let idx = dr - dm + i;
            let sub = factor * c as u64 % p as u64;
            r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Irreducibility over GF(p) by trial division with every monic polynomial
/// of degree 1..=deg/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let mut f = poly.to_vec();
    trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for n in 0..count {
            let mut g = digits(n, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((n % p as u64) as u32);
        n /= p as u64;
    }
    out
}

impl FieldCtx {
    /// Builds GF(p^h) over the lexicographically smallest monic irreducible
    /// of degree `h` (coefficients compared low degree first). For `h = 1`
    /// the stored polynomial is the placeholder `x`.
    pub fn new(p: u32, h: u32) -> Result<FieldCtx> {
        Self::check_params(p, h)?;
        if h == 1 {
            return Self::with_irreducible(p, vec![0, 1]);
        }
        let count = (p as u64).pow(h);
        // c0 is the most significant digit of the lexicographic order
        for n in 0..count {
            let mut coeffs = digits(n, p, h as usize);
            coeffs.reverse();
            coeffs.push(1);
            if is_irreducible(&coeffs, p) {
                return Self::with_irreducible(p, coeffs);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over GF(p)")
    }

    /// Builds the field of order `q`, which must be an odd prime power.
    pub fn of_order(q: u32) -> Result<FieldCtx> {
        let (p, h) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, h)
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<FieldCtx> {
        Self::check_params(desc.p, desc.h)?;
        Self::with_irreducible(desc.p, desc.irreducible.clone())
    }

    fn check_params(p: u32, h: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if h < 1 {
            return Err(Error::InvalidDegree(h));
        }
        let q = (p as u64).checked_pow(h).filter(|&q| q <= u16::MAX as u64);
        if q.is_none() {
            return Err(Error::FieldTooLarge { p, h });
        }
        Ok(())
    }

    fn with_irreducible(p: u32, irreducible: Vec<u32>) -> Result<FieldCtx> {
        let h = irreducible.len().saturating_sub(1) as u32;
        let bad = h == 0
            || irreducible[h as usize] != 1
            || irreducible.iter().any(|&c| c >= p)
            || (h > 1 && !is_irreducible(&irreducible, p));
        if bad {
            return Err(Error::NotIrreducible(irreducible));
        }
        let q = p.pow(h);
        let mut ctx = FieldCtx {
            p,
            h,
            q,
            irreducible,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = self.slow_add(a as u32, b as u32) as u16;
                mul[a * q + b] = self.slow_mul(a as u32, b as u32) as u16;
            }
        }
        let neg = (0..q)
            .map(|a| self.slow_sub(0, a as u32) as u16)
            .collect();
        let mut inv = vec![0u16; q];
        let mut square = vec![false; q];
        for a in 0..q {
            for b in 0..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                }
            }
            square[mul[a * q + a] as usize] = true;
        }
        Tables {
            add,
            mul,
            neg,
            inv,
            square,
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn h(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn irreducible(&self) -> &[u32] {
        &self.irreducible
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            h: self.h,
            irreducible: self.irreducible.clone(),
        }
    }

    /// Validates a raw encoding.
    pub fn elem(&self, value: u32) -> Result<Fe> {
        if value < self.q {
            Ok(Fe(value))
        } else {
            Err(Error::ElementOutOfRange { value, q: self.q })
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// For elements of the prime subfield, the representative in `0..p`.
    pub fn to_prime_int(&self, a: Fe) -> Option<u32> {
        (a.0 < self.p).then_some(a.0)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.tables {
            Some(t) => Fe(t.add[(a.0 * self.q + b.0) as usize] as u32),
            None => Fe(self.slow_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        match &self.tables {
            Some(t) => Fe(t.neg[a.0 as usize] as u32),
            None => Fe(self.slow_sub(0, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.tables {
            Some(t) => Fe(t.mul[(a.0 * self.q + b.0) as usize] as u32),
            None => Fe(self.slow_mul(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.tables {
            Some(t) => Fe(t.inv[a.0 as usize] as u32),
            None => self.pow(a, self.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply; `pow(0, 0) = 1`.
    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// True for 0 and the nonzero squares.
    pub fn is_square(&self, a: Fe) -> bool {
        match &self.tables {
            Some(t) => t.square[a.0 as usize],
            None => a.is_zero() || self.pow(a, (self.q as u64 - 1) / 2) == Fe::ONE,
        }
    }

    /// Quadratic character: 0, 1 for nonzero squares, -1 otherwise.
    pub fn legendre(&self, a: Fe) -> i8 {
        if a.is_zero() {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    /// A square root, if one exists. Found by search; fields here are tiny.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|&x| self.mul(x, x) == a)
    }

    pub fn non_squares(&self) -> Vec<Fe> {
        self.elements().filter(|&a| !self.is_square(a)).collect()
    }

    /// Sum of a slice.
    pub fn sum<I: IntoIterator<Item = Fe>>(&self, items: I) -> Fe {
        items.into_iter().fold(Fe::ZERO, |acc, x| self.add(acc, x))
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        a.iter()
            .zip(b)
            .fold(Fe::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    fn split(&self, v: u32) -> Vec<u32> {
        digits(v as u64, self.p, self.h as usize)
    }

    fn join(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let s: Vec<u32> = self
            .split(a)
            .iter()
            .zip(self.split(b))
            .map(|(&x, y)| (x + y) % self.p)
            .collect();
        self.join(&s)
    }

    fn slow_sub(&self, a: u32, b: u32) -> u32 {
        let s: Vec<u32> = self
            .split(a)
            .iter()
            .zip(self.split(b))
            .map(|(&x, y)| (x + self.p - y) % self.p)
            .collect();
        self.join(&s)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mul(&self.split(a), &self.split(b), self.p);
        let mut r = if self.h == 1 {
            prod.first().map(|&c| vec![c % self.p]).unwrap_or_default()
        } else {
            poly_rem(&prod, &self.irreducible, self.p)
        };
        r.resize(self.h as usize, 0);
        self.join(&r)
    }
}
