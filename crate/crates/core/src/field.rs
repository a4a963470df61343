//! Finite fields `F_q` with `q = p^m`.
//!
//! Elements are encoded as integers `0..q`: the element `c_0 + c_1 x + ... +
//! c_{m-1} x^{m-1}` (coefficients in `F_p`, reduced modulo the defining
//! polynomial) has code `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`.
//!
//! Fields with `q <= 256` carry full addition and multiplication tables. Larger
//! prime fields use machine modular arithmetic and larger extension fields
//! multiply polynomials on the fly.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Field element code, always `< q`.
pub type Elem = u32;

/// Default upper bound on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 16;

const TABLE_LIMIT: u32 = 256;

#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldData>,
}

struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    /// Low-to-high coefficients including the leading 1; empty for prime fields.
    modulus: Vec<u32>,
    arith: Arith,
    inv: Vec<u32>,
}

enum Arith {
    Table {
        add: Vec<u16>,
        mul: Vec<u16>,
        neg: Vec<u16>,
    },
    Prime,
    Poly,
}

impl Field {
    /// Builds `F_{p^m}`. Without a modulus the lexicographically-first monic
    /// irreducible polynomial is used, where polynomials are ordered by their
    /// integer code (the coefficient list read from the leading term down).
    pub fn new(p: u32, m: u32, modulus: Option<&[u32]>) -> Result<Self> {
        Self::with_max_order(p, m, modulus, DEFAULT_MAX_ORDER)
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// The field of order `q` with the default modulus. `q` must be a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or_else(|| {
            Error::InvalidParameter(format!("{q} is not a prime power"))
        })?;
        Self::new(p, m, None)
    }

    pub fn with_max_order(p: u32, m: u32, modulus: Option<&[u32]>, max_order: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > max_order || q > u64::from(u16::MAX) + 1 {
            return Err(Error::OrderTooLarge { q, bound: max_order });
        }
        let q = q as u32;

        let modulus = if m == 1 {
            match modulus {
                None => Vec::new(),
                Some(c) if c.is_empty() => Vec::new(),
                Some(c) if c.len() == 2 && c[1] == 1 && c[0] < p => Vec::new(),
                Some(_) => {
                    return Err(Error::InvalidModulus("prime fields take no modulus".into()))
                }
            }
        } else {
            match modulus {
                Some(c) => {
                    if c.len() != m as usize + 1 || c[m as usize] != 1 || c.iter().any(|&x| x >= p) {
                        return Err(Error::InvalidModulus(format!(
                            "expected {} coefficients in 0..{p}, low-to-high, ending in 1",
                            m + 1
                        )));
                    }
                    if !is_irreducible(c, p) {
                        return Err(Error::ReducibleModulus(p));
                    }
                    c.to_vec()
                }
                None => first_irreducible(p, m),
            }
        };

        let mut data = FieldData {
            p,
            m,
            q,
            modulus,
            arith: if q <= TABLE_LIMIT { Arith::Poly } else if m == 1 { Arith::Prime } else { Arith::Poly },
            inv: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            let mut neg = vec![0u16; n];
            for a in 0..q {
                neg[a as usize] = data.slow_neg(a) as u16;
                for b in 0..q {
                    add[(a * q + b) as usize] = data.slow_add(a, b) as u16;
                    mul[(a * q + b) as usize] = data.slow_mul(a, b) as u16;
                }
            }
            data.arith = Arith::Table { add, mul, neg };
        }
        let mut inv = vec![0u32; q as usize];
        for a in 1..q {
            inv[a as usize] = data.pow(a, u64::from(q) - 2);
        }
        data.inv = inv;
        Ok(Field { inner: Arc::new(data) })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.inner.q
    }
    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }
    #[inline]
    pub fn degree(&self) -> u32 {
        self.inner.m
    }
    /// Low-to-high coefficients of the defining polynomial, empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn contains(&self, a: u64) -> bool {
        a < u64::from(self.inner.q)
    }

    pub fn check(&self, a: u64) -> Result<Elem> {
        if self.contains(a) {
            Ok(a as Elem)
        } else {
            Err(Error::ElementOutOfRange { value: a, q: self.inner.q })
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.inner.add(a, b)
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.inner.neg(a)
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.inner.add(a, self.inner.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.inner.mul(a, b)
    }
    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "zero has no inverse");
        self.inner.inv[a as usize]
    }
    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        self.inner.pow(a, e)
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.inner.q
    }
}

impl FieldData {
    fn add(&self, a: u32, b: u32) -> u32 {
        match &self.arith {
            Arith::Table { add, .. } => add[(a * self.q + b) as usize] as u32,
            Arith::Prime => {
                let s = a + b;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            }
            Arith::Poly => self.slow_add(a, b),
        }
    }

    fn neg(&self, a: u32) -> u32 {
        match &self.arith {
            Arith::Table { neg, .. } => neg[a as usize] as u32,
            Arith::Prime => {
                if a == 0 {
                    0
                } else {
                    self.p - a
                }
            }
            Arith::Poly => self.slow_neg(a),
        }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.arith {
            Arith::Table { mul, .. } => mul[(a * self.q + b) as usize] as u32,
            Arith::Prime => ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32,
            Arith::Poly => self.slow_mul(a, b),
        }
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn slow_neg(&self, a: u32) -> u32 {
        if self.m == 1 {
            return (self.p - a % self.p) % self.p;
        }
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        if self.m == 1 {
            return ((u64::from(a) * u64::from(b)) % u64::from(p)) as u32;
        }
        let m = self.m as usize;
        let da = digits(a, p, m);
        let db = digits(b, p, m);
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // reduce modulo the monic modulus, top degree first
        for d in (m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for (t, &mc) in self.modulus[..m].iter().enumerate() {
                let idx = d - m + t;
                prod[idx] = (prod[idx] + (p - c) * mc % p) % p;
            }
            prod[d] = 0;
        }
        undigits(&prod[..m], p)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.m == 1 {
            write!(f, "F_{}", self.inner.q)
        } else {
            write!(f, "F_{}[{:?}]", self.inner.q, self.inner.modulus)
        }
    }
}

fn digits(mut a: u32, p: u32, m: usize) -> Vec<u32> {
    let mut out = vec![0; m];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^m`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 || q > u64::from(u32::MAX) {
        return None;
    }
    let q = q as u32;
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Remainder of `a` modulo the monic `b` over `F_p` (low-to-high coefficients).
fn poly_rem_monic(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (t, &bc) in b.iter().enumerate() {
                r[shift + t] = (r[shift + t] + (p - c) * bc % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=m/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = digits(code as u32, p, d);
            g.push(1);
            if poly_rem_monic(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for code in 0..count {
        let mut f = digits(code as u32, p, m as usize);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
