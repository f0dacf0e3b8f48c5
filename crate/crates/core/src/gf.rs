//! Finite fields `GF(p^n)` realized as `F_p[x]/(f)`.
//!
//! The modulus `f` is the lexicographically smallest monic irreducible
//! polynomial of degree `n`, comparing coefficients from the constant term
//! upwards. Descriptors are interned, so two calls to [`make_field`] with the
//! same `(p, n)` hand back the same shared descriptor.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest extension degree accepted by [`make_field`].
pub const MAX_DEGREE: usize = 24;

/// Primes must stay below this so that products of residues fit in a `u64`.
const PRIME_BOUND: u64 = 1 << 31;

/// Exhaustive root search in [`embed`] refuses targets larger than this.
const EMBED_SEARCH_LIMIT: u64 = 1 << 26;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `(p, f)` with `q = p^f`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut f = 0;
    while rest % p == 0 {
        rest /= p;
        f += 1;
    }
    (rest == 1 && p < PRIME_BOUND).then_some((p as u32, f))
}

struct FieldInner {
    p: u32,
    n: usize,
    modulus: Vec<u32>,
    order: Option<u64>,
}

/// Shared handle on the parameters of one finite field.
#[derive(Clone)]
pub struct FieldDescriptor(Arc<FieldInner>);

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.n == other.0.n)
    }
}

impl Eq for FieldDescriptor {}

impl Hash for FieldDescriptor {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.n.hash(state);
    }
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.n)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u32, usize), FieldDescriptor>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), FieldDescriptor>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Builds (or fetches) the canonical descriptor of `GF(p^n)`.
pub fn make_field(p: u64, n: usize) -> Result<FieldDescriptor> {
    if !is_prime(p) || p >= PRIME_BOUND {
        return Err(Error::NonPrime(p));
    }
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    let p = p as u32;
    let mut cache = field_cache().lock().unwrap();
    if let Some(desc) = cache.get(&(p, n)) {
        return Ok(desc.clone());
    }
    let modulus = canonical_modulus(p, n);
    let order = (p as u64).checked_pow(n as u32);
    let desc = FieldDescriptor(Arc::new(FieldInner { p, n, modulus, order }));
    cache.insert((p, n), desc.clone());
    Ok(desc)
}

/// The field with `q` elements.
pub fn field_of_order(q: u64) -> Result<FieldDescriptor> {
    let (p, f) = prime_power(q)
        .ok_or_else(|| Error::InvalidDatum(format!("{q} is not a prime power")))?;
    make_field(p as u64, f)
}

fn canonical_modulus(p: u32, n: usize) -> Vec<u32> {
    let mut low = vec![0u32; n];
    loop {
        let mut candidate: Vec<u64> = low.iter().map(|&c| c as u64).collect();
        candidate.push(1);
        if poly::is_irreducible(&candidate, p as u64) {
            return candidate.into_iter().map(|c| c as u32).collect();
        }
        // next in lexicographic order, constant term most significant
        let mut i = n;
        loop {
            i -= 1;
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            assert!(i > 0, "no monic irreducible of degree {n} over F_{p}");
        }
    }
}

impl FieldDescriptor {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.n
    }

    /// Monic modulus, constant term first (length `n + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// `q = p^n`, when it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.0.order
    }

    pub fn order_big(&self) -> BigUint {
        BigUint::from(self.0.p).pow(self.0.n as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { desc: self.clone(), coeffs: vec![0; self.0.n] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The class of `x`. For prime fields the modulus is `x` itself, so this is zero.
    pub fn generator(&self) -> FieldElement {
        self.from_coeffs(&[0, 1])
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = k.rem_euclid(self.0.p as i64) as u32;
        e
    }

    /// Element with the given coefficients (constant term first), reduced mod `p`
    /// and modulo the field polynomial if more than `n` coefficients are given.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let p = self.0.p as u64;
        let n = self.0.n;
        if coeffs.len() <= n {
            let mut e = self.zero();
            for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
                *slot = (c % p) as u32;
            }
            e
        } else {
            let mut wide: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
            self.reduce_wide(&mut wide);
            FieldElement { desc: self.clone(), coeffs: wide[..n].iter().map(|&c| c as u32).collect() }
        }
    }

    /// Parses the `Display` form: coefficients joined by `.`, constant term first.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        let coeffs = s
            .split('.')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .ok()
                    .filter(|&c| c < self.0.p as u64)
                    .ok_or_else(|| Error::InvalidDatum(format!("bad coefficient {c:?} in {s:?} over GF({})", self.0.p)))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() > self.0.n {
            return Err(Error::InvalidDatum(format!("{s:?} has more than {} coefficients", self.0.n)));
        }
        Ok(self.from_coeffs(&coeffs))
    }

    fn reduce_wide(&self, wide: &mut Vec<u64>) {
        let p = self.0.p as u64;
        let n = self.0.n;
        let m = &self.0.modulus;
        for d in (n..wide.len()).rev() {
            let c = wide[d];
            if c == 0 {
                continue;
            }
            wide[d] = 0;
            let neg = p - c;
            for i in 0..n {
                let k = d - n + i;
                wide[k] = (wide[k] + neg * m[i] as u64) % p;
            }
        }
        wide.resize(n, 0);
    }

    /// Element number `k` in lexicographic order (constant term most significant).
    pub fn element_at(&self, mut k: u64) -> FieldElement {
        let p = self.0.p as u64;
        let mut e = self.zero();
        for slot in e.coeffs.iter_mut().rev() {
            *slot = (k % p) as u32;
            k /= p;
        }
        e
    }

    pub fn lex_index(&self, e: &FieldElement) -> u64 {
        let p = self.0.p as u64;
        e.coeffs.iter().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    /// All elements in lexicographic order. Panics if `q` does not fit in a `u64`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.order().expect("field too large to enumerate");
        (0..q).map(move |k| self.element_at(k))
    }

    pub fn is_subfield_of(&self, other: &FieldDescriptor) -> bool {
        self.0.p == other.0.p && other.0.n % self.0.n == 0
    }
}

/// An element of `GF(p^n)`: coefficients of a polynomial of degree `< n` in the generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    desc: FieldDescriptor,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    /// Coefficients joined by `.`, constant term first, trailing zeros dropped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0);
        let parts: Vec<String> = self.coeffs[..=last].iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    if a.desc != b.desc {
        return Err(Error::MixedFields);
    }
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Div => a * &b.inverse().ok_or(Error::DivisionByZero)?,
    })
}

impl FieldElement {
    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// `Some(c)` if the element lies in the prime field.
    pub fn as_prime_field(&self) -> Option<u32> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.desc.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let p = self.desc.p() as u64;
        let a: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        let m: Vec<u64> = self.desc.modulus().iter().map(|&c| c as u64).collect();
        let inv = poly::inverse_mod(&a, &m, p);
        Some(self.desc.from_coeffs(&inv))
    }

    /// `k · self` for an integer `k`.
    pub fn scale(&self, k: i64) -> FieldElement {
        let p = self.desc.p() as u64;
        let k = k.rem_euclid(p as i64) as u64;
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&c| ((c as u64 * k) % p) as u32).collect(),
        }
    }

    /// Absolute trace to `F_p`.
    pub fn trace(&self) -> u32 {
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..self.desc.degree() {
            conj = frobenius(&conj);
            acc = &acc + &conj;
        }
        acc.coeffs[0]
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.desc, rhs.desc, "mixed fields");
        let p = self.desc.p();
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| {
                    let s = a + b;
                    if s >= p { s - p } else { s }
                })
                .collect(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.desc, rhs.desc, "mixed fields");
        let p = self.desc.p();
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| if a >= b { a - b } else { a + p - b })
                .collect(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.desc.p();
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&a| if a == 0 { 0 } else { p - a }).collect(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.desc, rhs.desc, "mixed fields");
        let n = self.desc.degree();
        let p = self.desc.p() as u64;
        if n == 1 {
            return FieldElement {
                desc: self.desc.clone(),
                coeffs: vec![((self.coeffs[0] as u64 * rhs.coeffs[0] as u64) % p) as u32],
            };
        }
        let mut wide = vec![0u64; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                wide[i + j] = (wide[i + j] + a as u64 * b as u64) % p;
            }
        }
        self.desc.reduce_wide(&mut wide);
        FieldElement { desc: self.desc.clone(), coeffs: wide.into_iter().map(|c| c as u32).collect() }
    }
}

/// The absolute Frobenius `a ↦ a^p`.
pub fn frobenius(a: &FieldElement) -> FieldElement {
    a.pow(a.desc.p() as u64)
}

/// The Artin–Schreier operator `a ↦ a^p − a`.
pub fn wp(a: &FieldElement) -> FieldElement {
    &frobenius(a) - a
}

/// Coset representatives of `℘(F_q)` in `F_q`, one per coset, always containing 0.
///
/// Elements are scanned in lexicographic order and kept when their coset is new.
/// Cosets are told apart by the absolute trace, since `℘(F_q)` is exactly the
/// kernel of `Tr: F_q → F_p`.
pub fn wp_transversal(desc: &FieldDescriptor) -> Vec<FieldElement> {
    let p = desc.p() as usize;
    let mut seen = vec![false; p];
    let mut reps = Vec::with_capacity(p);
    let mut k = 0u64;
    while reps.len() < p {
        let e = desc.element_at(k);
        let t = e.trace() as usize;
        if !seen[t] {
            seen[t] = true;
            reps.push(e);
        }
        k += 1;
    }
    reps
}

/// Representative of the `℘`-coset of `a` taken from [`wp_transversal`].
pub fn wp_representative(a: &FieldElement) -> FieldElement {
    let t = a.trace();
    wp_transversal(a.descriptor())
        .into_iter()
        .find(|r| r.trace() == t)
        .expect("transversal covers every trace value")
}

fn embedding_cache() -> &'static Mutex<HashMap<(u32, usize, usize), Vec<u32>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize, usize), Vec<u32>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The image in `target` of the source generator: the lexicographically first
/// root of the source modulus.
fn generator_image(source: &FieldDescriptor, target: &FieldDescriptor) -> Result<FieldElement> {
    let key = (source.p(), source.degree(), target.degree());
    if let Some(c) = embedding_cache().lock().unwrap().get(&key) {
        let c: Vec<u64> = c.iter().map(|&x| x as u64).collect();
        return Ok(target.from_coeffs(&c));
    }
    let q = target
        .order()
        .filter(|&q| q <= EMBED_SEARCH_LIMIT)
        .ok_or_else(|| Error::OutOfSetting(format!("{target:?} is too large for root search")))?;
    let modulus = source.modulus();
    let root = (0..q)
        .map(|k| target.element_at(k))
        .find(|r| {
            let mut acc = target.zero();
            for &c in modulus.iter().rev() {
                acc = &(&acc * r) + &target.from_int(c as i64);
            }
            acc.is_zero()
        })
        .expect("an irreducible of degree m splits in GF(p^(md))");
    embedding_cache().lock().unwrap().insert(key, root.coeffs.clone());
    Ok(root)
}

/// Ring embedding `GF(p^m) ↪ GF(p^(md))` sending the source generator to a fixed root
/// of its modulus.
pub fn embed(a: &FieldElement, target: &FieldDescriptor) -> Result<FieldElement> {
    let source = a.descriptor();
    if !source.is_subfield_of(target) {
        return Err(Error::NotASubfield { p: source.p(), from: source.degree(), to: target.degree() });
    }
    if source == target {
        return Ok(a.clone());
    }
    if source.degree() == 1 {
        return Ok(target.from_int(a.coeffs[0] as i64));
    }
    let root = generator_image(source, target)?;
    let mut acc = target.zero();
    for &c in a.coeffs.iter().rev() {
        acc = &(&acc * &root) + &target.from_int(c as i64);
    }
    Ok(acc)
}

/// Dense polynomials over `F_p`, constant term first.
mod poly {
    fn trim(a: &mut Vec<u64>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn inv_mod_p(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub(super) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut m = m.to_vec();
        trim(&mut m);
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm && !is_zero(&r) {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % p;
            if c != 0 {
                for i in 0..=dm {
                    let k = dr - dm + i;
                    r[k] = (r[k] + (p - c) * m[i]) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let mut out = vec![0u64; len];
        for (i, slot) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *slot = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    fn divmod(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut m = m.to_vec();
        trim(&mut m);
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        let mut q = vec![0u64; r.len().saturating_sub(dm).max(1)];
        while r.len() > dm && !is_zero(&r) {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % p;
            q[dr - dm] = c;
            for i in 0..=dm {
                let k = dr - dm + i;
                r[k] = (r[k] + (p - c) * m[i]) % p;
            }
            r.pop();
            trim(&mut r);
        }
        (q, r)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !is_zero(&b) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    /// Ben-Or: `f` of degree `n` is irreducible iff `gcd(x^(p^i) − x, f) = 1` for `i ≤ n/2`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        if n <= 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut xp = x.clone();
        for _ in 1..=n / 2 {
            xp = powmod(&xp, p, f, p);
            let g = gcd(&sub(&xp, &x, p), f, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Inverse of `a` modulo the irreducible `m`.
    pub(super) fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
        let (mut s0, mut s1) = (vec![0u64], vec![1u64]);
        while !is_zero(&r1) {
            let (q, r) = divmod(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let c = inv_mod_p(r0[0], p);
        s0.iter().map(|&x| x * c % p).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, n: usize) -> FieldDescriptor {
        make_field(p, n).unwrap()
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(f(2, 1).modulus(), &[0, 1]);
        assert_eq!(f(2, 2).modulus(), &[1, 1, 1]);
        assert_eq!(f(3, 1).modulus(), &[0, 1]);
        assert_eq!(f(3, 2).modulus(), &[1, 0, 1]);
        assert_eq!(f(2, 4).modulus(), &[1, 0, 0, 1, 1]);
        assert_eq!(f(2, 24).degree(), 24);
    }

    #[test]
    fn make_field_errors() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NonPrime(4));
        assert_eq!(make_field(1, 1).unwrap_err(), Error::NonPrime(1));
        assert_eq!(make_field(2, 25).unwrap_err(), Error::DegreeTooLarge(25));
        assert_eq!(make_field(2, 0).unwrap_err(), Error::DegreeTooLarge(0));
    }

    #[test]
    fn interned_descriptors() {
        let a = f(5, 3);
        let b = f(5, 3);
        assert!(Arc::ptr_eq(&a.0, &b.0));
    }

    #[test]
    fn small_arithmetic() {
        let f4 = f(2, 2);
        let x = f4.generator();
        assert_eq!(&x * &x, f4.from_coeffs(&[1, 1]));
        let f2 = f(2, 1);
        assert!((&f2.one() + &f2.one()).is_zero());
        let f3 = f(3, 1);
        assert_eq!(&f3.from_int(2) * &f3.from_int(2), f3.one());
    }

    #[test]
    fn checked_arith_errors() {
        let f4 = f(2, 2);
        let f2 = f(2, 1);
        assert_eq!(field_arith(&f4.one(), &f2.one(), FieldOp::Add).unwrap_err(), Error::MixedFields);
        assert_eq!(field_arith(&f4.one(), &f4.zero(), FieldOp::Div).unwrap_err(), Error::DivisionByZero);
        let x = f4.generator();
        let q = field_arith(&f4.one(), &x, FieldOp::Div).unwrap();
        assert!((&q * &x).is_one());
    }

    #[test]
    fn inverses_exhaustive() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (7, 1)] {
            let k = f(p, n);
            for a in k.elements().skip(1) {
                assert!((&a * &a.inverse().unwrap()).is_one(), "{a}");
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let f4 = f(2, 2);
        assert_eq!(frobenius(&f4.generator()), f4.from_coeffs(&[1, 1]));
        assert!(frobenius(&f(2, 1).one()).is_one());
        let f9 = f(3, 2);
        assert_eq!(frobenius(&f9.generator()), f9.from_coeffs(&[0, 2]));
    }

    #[test]
    fn frobenius_is_an_automorphism() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (13, 1)] {
            let k = f(p, n);
            let elems: Vec<_> = k.elements().collect();
            for a in &elems {
                for b in &elems {
                    assert_eq!(frobenius(&(a * b)), &frobenius(a) * &frobenius(b));
                    assert_eq!(frobenius(&(a + b)), &frobenius(a) + &frobenius(b));
                }
                let mut c = a.clone();
                for _ in 0..n {
                    c = frobenius(&c);
                }
                assert_eq!(&c, a);
            }
        }
    }

    #[test]
    fn wp_examples() {
        assert!(wp(&f(2, 1).one()).is_zero());
        let f4 = f(2, 2);
        assert!(wp(&f4.generator()).is_one());
        assert!(wp(&f(3, 1).from_int(2)).is_zero());
    }

    #[test]
    fn wp_kernel_and_image_sizes() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2)] {
            let k = f(p, n);
            let q = k.order().unwrap();
            let kernel = k.elements().filter(|a| wp(a).is_zero()).count() as u64;
            assert_eq!(kernel, p);
            let image: std::collections::HashSet<_> = k.elements().map(|a| wp(&a)).collect();
            assert_eq!(image.len() as u64, q / p);
        }
    }

    #[test]
    fn transversal_examples() {
        let f2 = f(2, 1);
        assert_eq!(wp_transversal(&f2), vec![f2.zero(), f2.one()]);
        let f4 = f(2, 2);
        let t = wp_transversal(&f4);
        assert_eq!(t.len(), 2);
        assert!(t[0].is_zero());
        assert!(t[1].as_prime_field().is_none());
        let f3 = f(3, 1);
        assert_eq!(wp_transversal(&f3), vec![f3.zero(), f3.one(), f3.from_int(2)]);
    }

    #[test]
    fn transversal_is_complete_against_exhaustive_image() {
        for (p, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 1)] {
            let k = f(p, n);
            let image: std::collections::HashSet<_> = k.elements().map(|a| wp(&a)).collect();
            let t = wp_transversal(&k);
            assert_eq!(t.len(), p as usize);
            for a in k.elements() {
                let hits = t.iter().filter(|r| image.contains(&(&a - r))).count();
                assert_eq!(hits, 1, "{a} in GF({p}^{n})");
            }
        }
    }

    #[test]
    fn embed_examples() {
        let f2 = f(2, 1);
        let f4 = f(2, 2);
        let f16 = f(2, 4);
        assert!(embed(&f2.one(), &f4).unwrap().is_one());
        assert!(embed(&f2.zero(), &f4).unwrap().is_zero());
        let g = embed(&f4.generator(), &f16).unwrap();
        assert!(!g.is_one());
        assert!(g.pow(3).is_one());
        assert_eq!(
            embed(&f4.one(), &f(2, 3)).unwrap_err(),
            Error::NotASubfield { p: 2, from: 2, to: 3 }
        );
    }

    #[test]
    fn embed_is_a_frobenius_compatible_ring_map() {
        for (p, m, d) in [(2, 2, 2), (2, 2, 3), (3, 1, 3), (3, 2, 2), (2, 3, 2)] {
            let src = f(p, m);
            let dst = f(p, m * d);
            let images: Vec<_> = src.elements().map(|a| embed(&a, &dst).unwrap()).collect();
            let distinct: std::collections::HashSet<_> = images.iter().collect();
            assert_eq!(distinct.len(), images.len());
            let elems: Vec<_> = src.elements().collect();
            for (a, ea) in elems.iter().zip(&images) {
                assert_eq!(embed(&frobenius(a), &dst).unwrap(), frobenius(ea));
                assert_eq!(embed(&wp(a), &dst).unwrap(), wp(ea));
                for (b, eb) in elems.iter().zip(&images) {
                    assert_eq!(embed(&(a * b), &dst).unwrap(), ea * eb);
                    assert_eq!(embed(&(a + b), &dst).unwrap(), ea + eb);
                }
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(13), Some((13, 1)));
    }
}
