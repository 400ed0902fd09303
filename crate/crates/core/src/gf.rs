//! Prime and extension finite fields GF(p^k) with table-driven arithmetic.
//!
//! An element is stored as its canonical integer: the base-p digits are the
//! polynomial coefficients, constant term least significant. For prime fields
//! that is just the residue. Canonical order is integer order.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order supported by the lookup tables.
pub const MAX_ORDER: u64 = 1 << 16;

/// Built-in moduli, `(p, k, coefficients)` with the constant term first.
/// Each entry is the least monic irreducible of degree k in canonical order.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 0, 0, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 1, 0, 1, 1, 0, 0, 0, 1]),
    (2, 9, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 1]),
    (2, 10, &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 1, 0, 0, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 1, 0, 0, 0, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[1, 1, 0, 1]),
    (5, 4, &[2, 0, 0, 0, 1]),
    (7, 2, &[1, 0, 1]),
    (7, 3, &[2, 0, 0, 1]),
    (11, 2, &[1, 0, 1]),
    (13, 2, &[2, 0, 1]),
    (17, 2, &[3, 0, 1]),
    (19, 2, &[1, 0, 1]),
    (23, 2, &[1, 0, 1]),
    (29, 2, &[2, 0, 1]),
    (31, 2, &[1, 0, 1]),
];

/// A field element in canonical encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Felt(pub u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    /// Monic modulus coefficients, constant term first. Empty for prime fields.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

/// The unit and the two primitive cube roots of unity.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CubeRoots {
    pub one: Felt,
    pub g1: Felt,
    pub g2: Felt,
}

enum AddRule {
    Prime,
    Binary,
    Table(Vec<u16>),
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    add: AddRule,
    neg: Vec<u32>,
    // exp has length 2(q-1) so a sum of two logs never needs reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field. Cloning is cheap; all clones share the same tables.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{}; {:?})", self.0.p, self.0.k, self.0.modulus)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, k)` when `q = p^k` for a prime p.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p as u32, k))
}

/// All prime powers in `[lo, hi]`, ascending.
pub fn prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&q| prime_power(q).is_some()).collect()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn to_digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(v % p);
        v /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

// Remainder of a by monic b over GF(p); coefficient vectors, constant first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 || f[deg] != 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0..(p as u64).pow(d as u32) {
            let mut g = to_digits(low as u32, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

// Multiplication by direct polynomial reduction; only used to build tables.
fn slow_mul(a: u32, b: u32, p: u32, modulus: &[u32]) -> u32 {
    if modulus.is_empty() {
        return (a as u64 * b as u64 % p as u64) as u32;
    }
    let k = modulus.len() as u32 - 1;
    let da = to_digits(a, p, k);
    let db = to_digits(b, p, k);
    let mut prod = vec![0u32; 2 * k as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let r = if prod.len() >= modulus.len() { poly_rem(&prod, modulus, p) } else { prod };
    from_digits(&r, p)
}

fn slow_pow(a: u32, mut e: u64, p: u32, modulus: &[u32]) -> u32 {
    let mut base = a;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(acc, base, p, modulus);
        }
        base = slow_mul(base, base, p, modulus);
        e >>= 1;
    }
    acc
}

impl Field {
    /// GF(p^k), taking the modulus from the built-in table when k > 1.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if k == 1 {
            return Field::with_modulus(p, 1, Vec::new());
        }
        let modulus = MODULI
            .iter()
            .find(|(mp, mk, _)| *mp == p && *mk == k)
            .map(|(_, _, c)| c.to_vec())
            .ok_or(Error::NoModulusAvailable { p, k })?;
        Field::with_modulus(p, k, modulus)
    }

    /// GF(q) for a prime power q.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrime(q.min(u32::MAX as u64) as u32))?;
        Field::new(p, k)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        Field::with_modulus(spec.p, spec.k, spec.modulus.clone())
    }

    /// GF(p^k) with an explicit modulus, which is checked for irreducibility.
    pub fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::NoModulusAvailable { p, k });
        }
        let q64 = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER {
            return Err(Error::FieldTooLarge(q64));
        }
        if k == 1 {
            if !modulus.is_empty() {
                return Err(Error::BadModulus(modulus));
            }
        } else if modulus.len() != k as usize + 1 || modulus.iter().any(|&c| c >= p) || !is_irreducible(&modulus, p) {
            return Err(Error::BadModulus(modulus));
        }
        let q = q64 as u32;

        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let gen = (1..q)
            .find(|&g| factors.iter().all(|&f| slow_pow(g, order / f, p, &modulus) != 1))
            .expect("multiplicative group of a field is cyclic");
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = slow_mul(x, gen, p, &modulus);
        }
        exp.extend_from_within(..);

        let add = if k == 1 {
            AddRule::Prime
        } else if p == 2 {
            AddRule::Binary
        } else {
            let digits: Vec<Vec<u32>> = (0..q).map(|v| to_digits(v, p, k)).collect();
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q as usize {
                for b in 0..q as usize {
                    let s: Vec<u32> = digits[a].iter().zip(&digits[b]).map(|(x, y)| (x + y) % p).collect();
                    t[a * q as usize + b] = from_digits(&s, p) as u16;
                }
            }
            AddRule::Table(t)
        };
        let neg = (0..q)
            .map(|v| {
                let d: Vec<u32> = to_digits(v, p, k).iter().map(|&c| (p - c) % p).collect();
                from_digits(&d, p)
            })
            .collect();

        Ok(Field(Arc::new(Inner { p, k, q, modulus, add, neg, exp, log })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.0.p, k: self.0.k, modulus: self.0.modulus.clone() }
    }

    pub fn zero(&self) -> Felt {
        Felt::ZERO
    }

    pub fn one(&self) -> Felt {
        Felt::ONE
    }

    /// Checked conversion from a canonical integer.
    pub fn elem(&self, v: u32) -> Result<Felt> {
        if v < self.0.q {
            Ok(Felt(v))
        } else {
            Err(Error::BadIndex(format!("{v} is not an element of GF({})", self.0.q)))
        }
    }

    /// The image of an integer: n copies of the unit.
    pub fn from_int(&self, n: i64) -> Felt {
        Felt(n.rem_euclid(self.0.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        match &self.0.add {
            AddRule::Prime => {
                let s = a.0 + b.0;
                Felt(if s >= self.0.p { s - self.0.p } else { s })
            }
            AddRule::Binary => Felt(a.0 ^ b.0),
            AddRule::Table(t) => Felt(t[(a.0 * self.0.q + b.0) as usize] as u32),
        }
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        Felt(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        let i = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        Felt(self.0.exp[i as usize])
    }

    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.0.q - 1;
        let l = self.0.log[a.0 as usize];
        Ok(Felt(self.0.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, e: u64) -> Felt {
        if e == 0 {
            return Felt::ONE;
        }
        if a.0 == 0 {
            return Felt::ZERO;
        }
        let order = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64 * (e % order) % order;
        Felt(self.0.exp[l as usize])
    }

    /// `dst[i] -= c * src[i]`.
    #[inline]
    pub fn sub_scaled(&self, dst: &mut [Felt], src: &[Felt], c: Felt) {
        if c.0 == 0 {
            return;
        }
        let nc = self.neg(c);
        self.add_scaled(dst, src, nc);
    }

    /// `dst[i] += c * src[i]`.
    #[inline]
    pub fn add_scaled(&self, dst: &mut [Felt], src: &[Felt], c: Felt) {
        if c.0 == 0 {
            return;
        }
        let lc = self.0.log[c.0 as usize];
        let exp = &self.0.exp;
        let log = &self.0.log;
        match &self.0.add {
            AddRule::Prime => {
                let p = self.0.p;
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        let t = d.0 + exp[(log[s.0 as usize] + lc) as usize];
                        d.0 = if t >= p { t - p } else { t };
                    }
                }
            }
            AddRule::Binary => {
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 ^= exp[(log[s.0 as usize] + lc) as usize];
                    }
                }
            }
            AddRule::Table(t) => {
                let q = self.0.q;
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        let prod = exp[(log[s.0 as usize] + lc) as usize];
                        d.0 = t[(d.0 * q + prod) as usize] as u32;
                    }
                }
            }
        }
    }

    /// `v[i] *= c`.
    pub fn scale(&self, v: &mut [Felt], c: Felt) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }

    /// Inner product of two vectors.
    pub fn dot(&self, a: &[Felt], b: &[Felt]) -> Felt {
        a.iter().zip(b).fold(Felt::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..self.0.q).map(Felt)
    }

    /// The nonzero elements in canonical order.
    pub fn nonzero(&self) -> Vec<Felt> {
        (1..self.0.q).map(Felt).collect()
    }

    /// γ₁ is the canonically least x with x³ = 1, x ≠ 1; γ₂ = γ₁².
    pub fn cube_roots(&self) -> Result<CubeRoots> {
        if (self.0.q - 1) % 3 != 0 {
            return Err(Error::NoOrder3Roots(self.0.q));
        }
        let g1 = (2..self.0.q).map(Felt).find(|&x| self.pow(x, 3) == Felt::ONE).expect("3 divides q-1");
        Ok(CubeRoots { one: Felt::ONE, g1, g2: self.mul(g1, g1) })
    }

    /// Hex digits needed to print any element.
    pub fn hex_width(&self) -> usize {
        let mut w = 1;
        while (1u64 << (4 * w)) < self.0.q as u64 {
            w += 1;
        }
        w
    }
}
