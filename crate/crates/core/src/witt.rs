//! Truncated p-typical Witt vectors `W_n(F_q)`.
//!
//! The ring laws are not hand-transcribed: the universal sum and product
//! polynomials are solved from the ghost equations over `Z`, checked for
//! integrality, reduced mod `p` and cached per `(p, n)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{frobenius, wp_transversal, FieldDescriptor, FieldElement};

/// Largest supported length.
pub const MAX_LENGTH: usize = 6;

/// Bound on `p^(n-1)`, the weighted degree of the top sum polynomial.
const MAX_TOP_DEGREE: u64 = 32;

type Exponents = Vec<u16>;

/// Sparse polynomial over `Z` in `X_0..X_{n-1}, Y_0..Y_{n-1}`; variable `n + i` is `Y_i`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly {
    terms: HashMap<Exponents, BigInt>,
}

impl IntPoly {
    fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        let mut terms = HashMap::new();
        terms.insert(e, BigInt::one());
        IntPoly { terms }
    }

    fn add_assign_scaled(&mut self, other: &IntPoly, scale: &BigInt) {
        for (e, c) in &other.terms {
            let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
            *slot += c * scale;
            if slot.is_zero() {
                self.terms.remove(e);
            }
        }
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut terms: HashMap<Exponents, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        IntPoly { terms }
    }

    fn pow(&self, mut e: u64) -> IntPoly {
        let nvars = self.terms.keys().next().map_or(0, Vec::len);
        let mut acc = IntPoly { terms: HashMap::from([(vec![0; nvars], BigInt::one())]) };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by `d`; `None` if some coefficient is not divisible.
    fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.insert(e.clone(), q);
        }
        Some(IntPoly { terms })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Integer coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, exps: &[u16]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Terms with coefficients reduced into `[0, m)`, zero terms dropped, sorted by exponent.
    pub fn reduced_terms(&self, m: u64) -> Vec<(Exponents, u64)> {
        let m = BigInt::from(m);
        let mut out: Vec<_> = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let r = c.mod_floor(&m);
                (!r.is_zero()).then(|| (e.clone(), u64::try_from(r).unwrap()))
            })
            .collect();
        out.sort();
        out
    }

    /// Evaluates at integer points.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(c.clone(), |acc, (&k, x)| acc * x.pow(k as u32))
            })
            .sum()
    }
}

/// One law polynomial reduced mod `p`, ready for evaluation over `F_q`.
#[derive(Clone, Debug)]
struct ModPoly {
    terms: Vec<(u32, Vec<(usize, u64)>)>,
}

impl ModPoly {
    fn from_int(poly: &IntPoly, p: u32) -> Self {
        let terms = poly
            .reduced_terms(p as u64)
            .into_iter()
            .map(|(e, c)| {
                let vars = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k as u64)).collect();
                (c as u32, vars)
            })
            .collect();
        ModPoly { terms }
    }

    fn eval(&self, vars: &[&FieldElement], desc: &FieldDescriptor) -> FieldElement {
        let mut acc = desc.zero();
        for (c, monomial) in &self.terms {
            let mut t = desc.from_int(*c as i64);
            for &(v, k) in monomial {
                if vars[v].is_zero() {
                    t = desc.zero();
                    break;
                }
                t = &t * &vars[v].pow(k);
            }
            if !t.is_zero() {
                acc = &acc + &t;
            }
        }
        acc
    }
}

/// Universal addition and multiplication polynomials for `W_n` over `F_p`.
#[derive(Debug)]
pub struct WittLawTable {
    p: u32,
    length: usize,
    sum_polys: Vec<IntPoly>,
    prod_polys: Vec<IntPoly>,
    sum_mod: Vec<ModPoly>,
    prod_mod: Vec<ModPoly>,
}

impl WittLawTable {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// `S_0..S_{n-1}` over `Z`.
    pub fn sum_polys(&self) -> &[IntPoly] {
        &self.sum_polys
    }

    /// `P_0..P_{n-1}` over `Z`.
    pub fn prod_polys(&self) -> &[IntPoly] {
        &self.prod_polys
    }

    fn build(p: u32, n: usize) -> Result<WittLawTable> {
        let nvars = 2 * n;
        let pb = BigInt::from(p);
        let x: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(nvars, i)).collect();
        let y: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(nvars, n + i)).collect();
        let ghost = |vars: &[IntPoly], k: usize| -> IntPoly {
            let mut w = IntPoly::default();
            for (i, v) in vars.iter().enumerate().take(k + 1) {
                w.add_assign_scaled(&v.pow((p as u64).pow((k - i) as u32)), &pb.pow(i as u32));
            }
            w
        };
        let solve = |target: &dyn Fn(usize) -> IntPoly| -> Result<Vec<IntPoly>> {
            let mut laws: Vec<IntPoly> = Vec::with_capacity(n);
            // laws[i]^(p^j) for the j reached so far
            let mut powers: Vec<Vec<IntPoly>> = Vec::with_capacity(n);
            for k in 0..n {
                let mut rhs = target(k);
                for (i, chain) in powers.iter_mut().enumerate() {
                    while chain.len() <= k - i {
                        let next = chain.last().unwrap().pow(p as u64);
                        chain.push(next);
                    }
                    rhs.add_assign_scaled(&chain[k - i], &-pb.pow(i as u32));
                }
                let law = rhs.div_exact(&pb.pow(k as u32)).ok_or_else(|| {
                    Error::InvalidDatum(format!("Witt law {k} for p = {p} is not integral"))
                })?;
                powers.push(vec![law.clone()]);
                laws.push(law);
            }
            Ok(laws)
        };
        let sum_target = |k: usize| {
            let mut t = ghost(&x, k);
            t.add_assign_scaled(&ghost(&y, k), &BigInt::one());
            t
        };
        let prod_target = |k: usize| ghost(&x, k).mul(&ghost(&y, k));
        let sum_polys = solve(&sum_target)?;
        let prod_polys = solve(&prod_target)?;
        let sum_mod = sum_polys.iter().map(|s| ModPoly::from_int(s, p)).collect();
        let prod_mod = prod_polys.iter().map(|s| ModPoly::from_int(s, p)).collect();
        Ok(WittLawTable { p, length: n, sum_polys, prod_polys, sum_mod, prod_mod })
    }
}

type LawCache = Mutex<HashMap<(u32, usize), Arc<OnceLock<Arc<WittLawTable>>>>>;

fn law_cache() -> &'static LawCache {
    static CACHE: OnceLock<LawCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized universal Witt polynomials for `W_n` in characteristic `p`.
pub fn witt_laws(p: u32, n: usize) -> Result<Arc<WittLawTable>> {
    if n == 0 || n > MAX_LENGTH || (p as u64).checked_pow(n as u32 - 1).is_none_or(|d| d > MAX_TOP_DEGREE) {
        return Err(Error::LengthTooLarge { p, n });
    }
    let cell = law_cache().lock().unwrap().entry((p, n)).or_default().clone();
    if let Some(t) = cell.get() {
        return Ok(t.clone());
    }
    let table = Arc::new(WittLawTable::build(p, n)?);
    Ok(cell.get_or_init(|| table).clone())
}

/// An element of `W_n(F_q)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WittVector {
    desc: FieldDescriptor,
    comps: Vec<FieldElement>,
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for WittVector {
    /// Components joined by `;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl Serialize for WittVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WittOp {
    Add,
    Sub,
    Mul,
}

impl WittVector {
    pub fn new(comps: Vec<FieldElement>) -> Result<WittVector> {
        let desc = comps
            .first()
            .ok_or_else(|| Error::InvalidDatum("empty Witt vector".into()))?
            .descriptor()
            .clone();
        if comps.iter().any(|c| c.descriptor() != &desc) {
            return Err(Error::MixedFields);
        }
        witt_laws(desc.p(), comps.len())?;
        Ok(WittVector { desc, comps })
    }

    pub fn zero(desc: &FieldDescriptor, n: usize) -> WittVector {
        WittVector { desc: desc.clone(), comps: vec![desc.zero(); n] }
    }

    pub fn one(desc: &FieldDescriptor, n: usize) -> WittVector {
        teichmueller(&desc.one(), n)
    }

    /// The image of the integer `k` under `Z → W_n(F_q)`.
    pub fn from_int(desc: &FieldDescriptor, n: usize, k: i64) -> WittVector {
        let one = WittVector::one(desc, n);
        let m = one.scalar_mul(k.unsigned_abs());
        if k < 0 { -&m } else { m }
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn length(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[FieldElement] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FieldElement::is_zero)
    }

    fn laws(&self) -> Arc<WittLawTable> {
        witt_laws(self.desc.p(), self.length()).expect("length validated at construction")
    }

    fn apply(&self, other: &WittVector, polys: &[ModPoly]) -> WittVector {
        let vars: Vec<&FieldElement> = self.comps.iter().chain(&other.comps).collect();
        WittVector { desc: self.desc.clone(), comps: polys.iter().map(|s| s.eval(&vars, &self.desc)).collect() }
    }

    fn check_same_ring(&self, other: &WittVector) -> Result<()> {
        if self.desc != other.desc || self.length() != other.length() {
            return Err(Error::MixedRings);
        }
        Ok(())
    }

    /// `k · self` by double-and-add.
    pub fn scalar_mul(&self, mut k: u64) -> WittVector {
        let mut acc = WittVector::zero(&self.desc, self.length());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc + &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base + &base;
            }
        }
        acc
    }

    /// `k · self` for any integer `k`.
    pub fn scalar_mul_int(&self, k: i64) -> WittVector {
        let m = self.scalar_mul(k.unsigned_abs());
        if k < 0 { -&m } else { m }
    }

    /// First `k` components (the ring map `W_n → W_k`).
    pub fn truncate(&self, k: usize) -> WittVector {
        assert!(k >= 1 && k <= self.length());
        WittVector { desc: self.desc.clone(), comps: self.comps[..k].to_vec() }
    }

    /// The lift to `W_k`, `k ≥ n`, with zero trailing components.
    pub fn pad(&self, k: usize) -> WittVector {
        assert!(k >= self.length());
        let mut comps = self.comps.clone();
        comps.resize(k, self.desc.zero());
        WittVector { desc: self.desc.clone(), comps }
    }

    /// Smallest `k` with `p^k · self = 0`.
    pub fn p_order(&self) -> u32 {
        self.comps.iter().position(|c| !c.is_zero()).map_or(0, |i| (self.length() - i) as u32)
    }
}

impl Add for &WittVector {
    type Output = WittVector;
    fn add(self, rhs: &WittVector) -> WittVector {
        self.check_same_ring(rhs).expect("mixed Witt rings");
        self.apply(rhs, &self.laws().sum_mod)
    }
}

impl Mul for &WittVector {
    type Output = WittVector;
    fn mul(self, rhs: &WittVector) -> WittVector {
        self.check_same_ring(rhs).expect("mixed Witt rings");
        self.apply(rhs, &self.laws().prod_mod)
    }
}

impl Neg for &WittVector {
    type Output = WittVector;
    /// Solves `S(x, y) = 0` for `y` one component at a time; `S_k` is `X_k + Y_k`
    /// plus terms in lower components only.
    fn neg(self) -> WittVector {
        let laws = self.laws();
        let mut y = WittVector::zero(&self.desc, self.length());
        for k in 0..self.length() {
            let vars: Vec<&FieldElement> = self.comps.iter().chain(&y.comps).collect();
            let s = laws.sum_mod[k].eval(&vars, &self.desc);
            y.comps[k] = -&s;
        }
        y
    }
}

impl Sub for &WittVector {
    type Output = WittVector;
    fn sub(self, rhs: &WittVector) -> WittVector {
        self + &(-rhs)
    }
}

/// Checked ring arithmetic.
pub fn witt_arith(a: &WittVector, b: &WittVector, op: WittOp) -> Result<WittVector> {
    a.check_same_ring(b)?;
    Ok(match op {
        WittOp::Add => a + b,
        WittOp::Sub => a - b,
        WittOp::Mul => a * b,
    })
}

/// The Teichmüller lift `(x, 0, …, 0)`.
pub fn teichmueller(x: &FieldElement, n: usize) -> WittVector {
    let desc = x.descriptor().clone();
    let mut comps = vec![desc.zero(); n];
    comps[0] = x.clone();
    WittVector { desc, comps }
}

/// Frobenius, componentwise.
pub fn witt_sigma(a: &WittVector) -> WittVector {
    WittVector { desc: a.desc.clone(), comps: a.comps.iter().map(frobenius).collect() }
}

/// `℘(a) = σ(a) − a`.
pub fn witt_wp(a: &WittVector) -> WittVector {
    &witt_sigma(a) - a
}

/// `p · a`, which over a perfect field is `(0, a_0^p, …, a_{n-2}^p)`.
pub fn mul_by_p(a: &WittVector) -> WittVector {
    let n = a.length();
    let mut comps = Vec::with_capacity(n);
    comps.push(a.desc.zero());
    comps.extend(a.comps[..n - 1].iter().map(frobenius));
    WittVector { desc: a.desc.clone(), comps }
}

/// Every vector of `W_n(F_q)`, component 0 most significant.
pub fn all_vectors(desc: &FieldDescriptor, n: usize) -> impl Iterator<Item = WittVector> + '_ {
    let q = desc.order().expect("field too large to enumerate");
    let total = q.checked_pow(n as u32).expect("too many Witt vectors to enumerate");
    (0..total).map(move |mut k| {
        let mut comps = vec![desc.zero(); n];
        for slot in comps.iter_mut().rev() {
            *slot = desc.element_at(k % q);
            k /= q;
        }
        WittVector { desc: desc.clone(), comps }
    })
}

/// Coset representatives of `℘(W_n(F_q))` in `W_n(F_q)`: the multiples `k·[t]`,
/// `0 ≤ k < p^n`, where `t` is the first nonzero element of
/// [`wp_transversal`]. The quotient is cyclic of order `p^n` and `[t]` maps to a
/// generator of its top layer `F_q/℘(F_q)`.
pub fn witt_wp_transversal(desc: &FieldDescriptor, n: usize) -> Vec<WittVector> {
    let t = teichmueller(&wp_transversal(desc)[1], n);
    let count = (desc.p() as u64).pow(n as u32);
    let mut out = Vec::with_capacity(count as usize);
    let mut acc = WittVector::zero(desc, n);
    for _ in 0..count {
        out.push(acc.clone());
        acc = &acc + &t;
    }
    out
}

/// `true` if `a` lies in `W_n(F_p)`.
pub fn is_prime_field_rational(a: &WittVector) -> bool {
    a.comps.iter().all(|c| c.as_prime_field().is_some())
}

/// Evaluates `w_k` on integer components.
pub fn ghost_component(p: u32, comps: &[BigInt], k: usize) -> BigInt {
    let pb = BigInt::from(p);
    (0..=k).map(|i| pb.pow(i as u32) * comps[i].pow(p.pow((k - i) as u32))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn w(desc: &FieldDescriptor, comps: &[i64]) -> WittVector {
        WittVector::new(comps.iter().map(|&c| desc.from_int(c)).collect()).unwrap()
    }

    fn exps(n: usize, xs: &[(usize, u16)]) -> Vec<u16> {
        let mut e = vec![0; 2 * n];
        for &(v, k) in xs {
            e[v] = k;
        }
        e
    }

    #[test]
    fn law_examples() {
        let t = witt_laws(2, 2).unwrap();
        let s1 = t.sum_polys()[1].reduced_terms(2);
        let mut expected = vec![
            (exps(2, &[(1, 1)]), 1),
            (exps(2, &[(3, 1)]), 1),
            (exps(2, &[(0, 1), (2, 1)]), 1),
        ];
        expected.sort();
        assert_eq!(s1, expected);

        for p in [2, 3, 5, 7] {
            let t = witt_laws(p, 1).unwrap();
            let mut e = vec![(exps(1, &[(0, 1)]), 1), (exps(1, &[(1, 1)]), 1)];
            e.sort();
            assert_eq!(t.sum_polys()[0].reduced_terms(p as u64), e);
        }

        let t = witt_laws(3, 2).unwrap();
        let s1 = t.sum_polys()[1].reduced_terms(3);
        let mut expected = vec![
            (exps(2, &[(1, 1)]), 1),
            (exps(2, &[(3, 1)]), 1),
            (exps(2, &[(0, 2), (2, 1)]), 2),
            (exps(2, &[(0, 1), (2, 2)]), 2),
        ];
        expected.sort();
        assert_eq!(s1, expected);
    }

    #[test]
    fn ghost_identity_at_integer_points() {
        for (p, n) in [(2u32, 4usize), (3, 3), (5, 2)] {
            let t = witt_laws(p, n).unwrap();
            for seed in 0..6i64 {
                let point: Vec<BigInt> = (0..2 * n as i64).map(|i| BigInt::from((seed * 7 + i * 3) % 11 - 5)).collect();
                let (xs, ys) = point.split_at(n);
                let s: Vec<BigInt> = t.sum_polys().iter().map(|f| f.eval_int(&point)).collect();
                let m: Vec<BigInt> = t.prod_polys().iter().map(|f| f.eval_int(&point)).collect();
                for k in 0..n {
                    assert_eq!(ghost_component(p, &s, k), ghost_component(p, xs, k) + ghost_component(p, ys, k));
                    assert_eq!(ghost_component(p, &m, k), ghost_component(p, xs, k) * ghost_component(p, ys, k));
                }
            }
        }
    }

    #[test]
    fn length_guard() {
        assert!(matches!(witt_laws(2, 7), Err(Error::LengthTooLarge { .. })));
        assert!(matches!(witt_laws(2, 0), Err(Error::LengthTooLarge { .. })));
        assert!(matches!(witt_laws(7, 3), Err(Error::LengthTooLarge { .. })));
        assert!(witt_laws(2, 6).is_ok());
    }

    #[test]
    fn arith_examples() {
        let f2 = make_field(2, 1).unwrap();
        let one = w(&f2, &[1, 0]);
        assert_eq!(&one + &one, w(&f2, &[0, 1]));
        assert_eq!(&one * &one, one);
        let f3 = make_field(3, 1).unwrap();
        assert!((&w(&f3, &[1, 0]) + &w(&f3, &[2, 0])).is_zero());
        assert_eq!(w(&f3, &[1, 0]).scalar_mul(3), w(&f3, &[0, 1]));
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(witt_arith(&one, &WittVector::one(&f4, 2), WittOp::Add).unwrap_err(), Error::MixedRings);
        assert_eq!(witt_arith(&one, &WittVector::one(&f2, 3), WittOp::Mul).unwrap_err(), Error::MixedRings);
    }

    #[test]
    fn integers_have_the_right_characteristic() {
        let f2 = make_field(2, 1).unwrap();
        for n in 1..=4 {
            let p_n = 1i64 << n;
            assert!(WittVector::from_int(&f2, n, p_n).is_zero());
            assert!(!WittVector::from_int(&f2, n, p_n / 2).is_zero());
            assert!((&WittVector::from_int(&f2, n, -3) + &WittVector::from_int(&f2, n, 3)).is_zero());
        }
    }

    #[test]
    fn teichmueller_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(teichmueller(&f2.one(), 3), w(&f2, &[1, 0, 0]));
        assert!(teichmueller(&f2.zero(), 2).is_zero());
        let f4 = make_field(2, 2).unwrap();
        let x = teichmueller(&f4.generator(), 2);
        assert_eq!(&x * &x, teichmueller(&f4.from_coeffs(&[1, 1]), 2));
    }

    #[test]
    fn teichmueller_is_multiplicative() {
        for (p, f, n) in [(2, 2, 2), (2, 4, 2), (2, 3, 3), (3, 2, 2), (5, 1, 2)] {
            let k = make_field(p, f).unwrap();
            let elems: Vec<_> = k.elements().collect();
            for a in &elems {
                for b in &elems {
                    assert_eq!(teichmueller(&(a * b), n), &teichmueller(a, n) * &teichmueller(b, n));
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(witt_sigma(&w(&f2, &[0, 1])), w(&f2, &[0, 1]));
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(witt_sigma(&teichmueller(&f4.generator(), 2)), teichmueller(&f4.from_coeffs(&[1, 1]), 2));
        assert_eq!(witt_sigma(&WittVector::one(&f4, 3)), WittVector::one(&f4, 3));
    }

    #[test]
    fn wp_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert!(witt_wp(&w(&f2, &[0, 1])).is_zero());
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(witt_wp(&teichmueller(&f4.generator(), 1)), WittVector::one(&f4, 1));
        let kernel = all_vectors(&f4, 2).filter(|a| witt_wp(a).is_zero()).count();
        assert_eq!(kernel, 4);
    }

    #[test]
    fn mul_by_p_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(mul_by_p(&w(&f2, &[1, 0])), w(&f2, &[0, 1]));
        assert!(mul_by_p(&w(&f2, &[0, 1])).is_zero());
        assert!(mul_by_p(&WittVector::zero(&f2, 4)).is_zero());
        assert_eq!(w(&f2, &[1, 0]).scalar_mul(2), w(&f2, &[0, 1]));
    }

    #[test]
    fn mul_by_p_closed_form_matches_repeated_addition() {
        for (p, f, n) in [(2, 2, 2), (2, 1, 4), (3, 1, 3), (3, 2, 2), (5, 1, 2)] {
            let k = make_field(p, f).unwrap();
            for a in all_vectors(&k, n) {
                assert_eq!(mul_by_p(&a), a.scalar_mul(p as u64), "{a:?}");
                let ord = a.p_order();
                let mut b = a.clone();
                for _ in 0..ord {
                    assert!(!b.is_zero());
                    b = mul_by_p(&b);
                }
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for (p, f) in [(2, 1), (2, 2), (3, 1)] {
            let k = make_field(p, f).unwrap();
            let all: Vec<_> = all_vectors(&k, 2).collect();
            let zero = WittVector::zero(&k, 2);
            let one = WittVector::one(&k, 2);
            for a in &all {
                assert_eq!(a + &zero, *a);
                assert_eq!(a * &one, *a);
                assert!((a - a).is_zero());
                assert!(a.scalar_mul((p as u64).pow(2)).is_zero());
                for b in &all {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!(&(a - b) + b, *a);
                    assert_eq!(witt_sigma(&(a + b)), &witt_sigma(a) + &witt_sigma(b));
                    for c in &all {
                        assert_eq!(&(a + b) + c, a + &(b + c));
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
            }
        }
    }

    #[test]
    fn wp_kernel_and_prime_field_vanishing() {
        for (p, f, n) in [(2, 1, 2), (2, 2, 2), (2, 3, 2), (2, 4, 2), (3, 1, 2), (3, 2, 2), (2, 2, 3)] {
            let k = make_field(p, f).unwrap();
            let mut kernel = 0u64;
            for a in all_vectors(&k, n) {
                let z = witt_wp(&a).is_zero();
                kernel += z as u64;
                assert_eq!(z, is_prime_field_rational(&a));
            }
            assert_eq!(kernel, (p as u64).pow(n as u32));
        }
    }

    #[test]
    fn transversal_hits_every_coset_once() {
        for (p, f, n) in [(2, 1, 2), (2, 2, 1), (2, 2, 2), (2, 4, 2), (3, 1, 2), (3, 3, 1), (3, 2, 2)] {
            let k = make_field(p, f).unwrap();
            let image: std::collections::HashSet<_> = all_vectors(&k, n).map(|a| witt_wp(&a)).collect();
            let t = witt_wp_transversal(&k, n);
            assert_eq!(t.len() as u64, (p as u64).pow(n as u32));
            assert!(t[0].is_zero());
            for a in all_vectors(&k, n) {
                let hits = t.iter().filter(|r| image.contains(&(&a - r))).count();
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn prime_field_vectors_are_not_a_transversal_over_f4() {
        // 1 = ℘(x) in F_4, so W_1(F_2) meets the image of ℘.
        let f4 = make_field(2, 2).unwrap();
        let one = WittVector::one(&f4, 1);
        assert_eq!(witt_wp(&teichmueller(&f4.generator(), 1)), one);
    }
}
