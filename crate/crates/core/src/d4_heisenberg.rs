//! Lifts from `F_2^2` to the dihedral group `D_4` over `F_q((T))`, `q` even, and the
//! elementary-abelian commutator pairing used for central twists.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::asw_abelian::{last_jump, normalize_m0, GroupShape, GroupWittElement, ReducedCocycle};
use crate::error::{Error, Result};
use crate::gf::{embed, wp_representative, wp_transversal, FieldDescriptor, FieldElement};
use crate::witt::teichmueller;

/// Exact last-jump value; denominators are powers of 2.
pub type Jump = Ratio<u64>;

/// Default bound on the number of `b` values tried by [`minlift_bruteforce`].
pub const DEFAULT_B_BUDGET: u64 = 1 << 24;

/// `Σ c_e T^{-e}` with finitely many nonzero `c_e`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseTPoly {
    desc: FieldDescriptor,
    terms: BTreeMap<u64, FieldElement>,
}

impl fmt::Debug for SparseTPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseTPoly({self})")
    }
}

impl fmt::Display for SparseTPoly {
    /// `e:c` terms joined by `,`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.terms.iter().rev().map(|(e, c)| format!("{e}:{c}")).collect();
        write!(f, "{}", terms.join(","))
    }
}

impl Serialize for SparseTPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl SparseTPoly {
    pub fn new(desc: &FieldDescriptor, terms: impl IntoIterator<Item = (u64, FieldElement)>) -> Result<SparseTPoly> {
        let mut out = SparseTPoly::zero(desc);
        for (e, c) in terms {
            if c.descriptor() != desc {
                return Err(Error::MixedFields);
            }
            let sum = match out.terms.remove(&e) {
                Some(old) => &old + &c,
                None => c,
            };
            if !sum.is_zero() {
                out.terms.insert(e, sum);
            }
        }
        Ok(out)
    }

    pub fn zero(desc: &FieldDescriptor) -> SparseTPoly {
        SparseTPoly { desc: desc.clone(), terms: BTreeMap::new() }
    }

    /// `c T^{-e}`.
    pub fn monomial(e: u64, c: &FieldElement) -> SparseTPoly {
        SparseTPoly::new(c.descriptor(), [(e, c.clone())]).unwrap()
    }

    /// Sum of `T^{-e}` over the given exponents.
    pub fn from_exponents(desc: &FieldDescriptor, exps: &[u64]) -> SparseTPoly {
        SparseTPoly::new(desc, exps.iter().map(|&e| (e, desc.one()))).unwrap()
    }

    /// Parses `e:c` terms separated by `,`; `c` uses the field element syntax.
    pub fn parse(desc: &FieldDescriptor, s: &str) -> Result<SparseTPoly> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(SparseTPoly::zero(desc));
        }
        let terms = s
            .split(',')
            .map(|t| {
                let (e, c) = t.split_once(':').ok_or_else(|| Error::InvalidDatum(format!("term {t:?} lacks ':'")))?;
                let e: u64 = e.trim().parse().map_err(|_| Error::InvalidDatum(format!("bad exponent {e:?}")))?;
                Ok((e, desc.parse_element(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseTPoly::new(desc, terms)
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn terms(&self) -> &BTreeMap<u64, FieldElement> {
        &self.terms
    }

    pub fn coeff(&self, e: u64) -> FieldElement {
        self.terms.get(&e).cloned().unwrap_or_else(|| self.desc.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The part with positive exponents.
    pub fn ramified_part(&self) -> SparseTPoly {
        SparseTPoly { desc: self.desc.clone(), terms: self.terms.range(1..).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn add(&self, other: &SparseTPoly) -> SparseTPoly {
        SparseTPoly::new(&self.desc, self.terms.iter().chain(&other.terms).map(|(e, c)| (*e, c.clone())))
            .expect("same field")
    }

    pub fn sub(&self, other: &SparseTPoly) -> SparseTPoly {
        self.add(&other.scale(&-&self.desc.one()))
    }

    pub fn scale(&self, k: &FieldElement) -> SparseTPoly {
        SparseTPoly::new(&self.desc, self.terms.iter().map(|(e, c)| (*e, c * k))).expect("same field")
    }

    pub fn mul(&self, other: &SparseTPoly) -> SparseTPoly {
        let terms = self
            .terms
            .iter()
            .flat_map(|(e1, c1)| other.terms.iter().map(move |(e2, c2)| (e1 + e2, c1 * c2)));
        SparseTPoly::new(&self.desc, terms).expect("same field")
    }

    /// Adds a constant.
    pub fn shift(&self, alpha: &FieldElement) -> SparseTPoly {
        self.add(&SparseTPoly::monomial(0, alpha))
    }

    /// Replaces the constant term by its representative modulo `℘(F_q)`.
    pub fn canonical(&self) -> SparseTPoly {
        let mut out = self.clone();
        let c0 = wp_representative(&self.coeff(0));
        out.terms.remove(&0);
        if !c0.is_zero() {
            out.terms.insert(0, c0);
        }
        out
    }

    /// Support in `{0}` and exponents prime to `p`.
    pub fn is_reduced(&self) -> bool {
        let p = self.desc.p() as u64;
        self.terms.keys().all(|&e| e == 0 || e % p != 0)
    }

    fn is_canonical(&self) -> bool {
        self.is_reduced() && wp_transversal(&self.desc).contains(&self.coeff(0))
    }
}

/// `max(0, -v_T(x))`.
pub fn w(x: &SparseTPoly) -> u64 {
    x.terms.keys().next_back().copied().unwrap_or(0)
}

/// `T dx/dT = Σ (-e c_e) T^{-e}`.
pub fn t_derivative(x: &SparseTPoly) -> SparseTPoly {
    SparseTPoly::new(&x.desc, x.terms.iter().map(|(e, c)| (*e, c.scale(-(*e as i64))))).expect("same field")
}

/// Upper-triangular datum `(1 a b; 1 c; 1)` for a `D_4`-homomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct D4Datum {
    pub a: SparseTPoly,
    pub c: SparseTPoly,
    pub b: SparseTPoly,
}

impl D4Datum {
    pub fn new(a: SparseTPoly, c: SparseTPoly, b: SparseTPoly) -> Result<D4Datum> {
        check_char_2(&a)?;
        if a.desc != c.desc || a.desc != b.desc {
            return Err(Error::MixedFields);
        }
        for x in [&a, &c, &b] {
            if !x.is_canonical() {
                return Err(Error::InvalidDatum(format!("{x} is not in canonical form")));
            }
        }
        Ok(D4Datum { a, c, b })
    }
}

fn check_char_2(x: &SparseTPoly) -> Result<()> {
    if x.desc.p() != 2 {
        return Err(Error::OutOfSetting(format!("D4 data need characteristic 2, got {}", x.desc.p())));
    }
    Ok(())
}

/// `max(w(b' - a c'), w(a)/2 + w(c), w(c)/2 + w(a))`.
pub fn imai_formula(a: &SparseTPoly, c: &SparseTPoly, b: &SparseTPoly) -> Jump {
    let wa = Jump::from_integer(w(a));
    let wc = Jump::from_integer(w(c));
    let half = Jump::new(1, 2);
    let main = Jump::from_integer(w(&t_derivative(b).sub(&a.mul(&t_derivative(c)))));
    main.max(wa * half + wc).max(wc * half + wa)
}

pub fn imai_last_jump(d: &D4Datum) -> Jump {
    imai_formula(&d.a, &d.c, &d.b)
}

/// `w(a) + w(c)`.
pub fn minlift_d4(a: &SparseTPoly, c: &SparseTPoly) -> u64 {
    w(a) + w(c)
}

/// Inertia of `(a, c)` is all of `F_2^2`: `a`, `c` and `a + c` are all ramified.
pub fn is_totally_ramified(a: &SparseTPoly, c: &SparseTPoly) -> bool {
    let (ar, cr) = (a.ramified_part(), c.ramified_part());
    !ar.is_zero() && !cr.is_zero() && ar != cr
}

/// Canonical `b` with `w(b) ≤ bound`: constant from the transversal, odd exponents free.
pub fn canonical_bs(desc: &FieldDescriptor, bound: u64) -> impl Iterator<Item = SparseTPoly> + '_ {
    let q = desc.order().expect("small field");
    let odd: Vec<u64> = (1..=bound).filter(|e| e % 2 == 1).collect();
    let consts = wp_transversal(desc);
    let total = q.pow(odd.len() as u32);
    consts.into_iter().flat_map(move |c0| {
        let odd = odd.clone();
        (0..total).map(move |mut k| {
            let mut terms = vec![(0, c0.clone())];
            for &e in odd.iter().rev() {
                terms.push((e, desc.element_at(k % q)));
                k /= q;
            }
            SparseTPoly::new(desc, terms).unwrap()
        })
    })
}

fn b_count(desc: &FieldDescriptor, bound: u64) -> u128 {
    let q = desc.order().unwrap_or(u64::MAX) as u128;
    let odd = (bound + 1) / 2;
    q.checked_pow(odd as u32).and_then(|x| x.checked_mul(2)).unwrap_or(u128::MAX)
}

fn check_totally_ramified(a: &SparseTPoly, c: &SparseTPoly) -> Result<()> {
    check_char_2(a)?;
    if a.desc != c.desc {
        return Err(Error::MixedFields);
    }
    if !is_totally_ramified(a, c) {
        return Err(Error::NotTotallyRamified);
    }
    Ok(())
}

/// `min` of the Imai formula over canonical `b` with `w(b) ≤ b_bound`.
pub fn minlift_bruteforce(a: &SparseTPoly, c: &SparseTPoly, b_bound: u64, budget: u64) -> Result<Jump> {
    check_totally_ramified(a, c)?;
    let needed = b_count(&a.desc, b_bound);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(canonical_bs(&a.desc, b_bound).map(|b| imai_formula(a, c, &b)).min().expect("b = 0 is always tried"))
}

/// Last jumps of `D_4`-lifts of a reduction, with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftDistribution {
    pub minlift: Jump,
    pub counts: BTreeMap<Jump, BigUint>,
}

impl LiftDistribution {
    pub fn count(&self, v: Jump) -> BigUint {
        self.counts.get(&v).cloned().unwrap_or_default()
    }

    /// Nonzero entries only.
    pub fn support(&self) -> BTreeMap<Jump, BigUint> {
        self.counts.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect()
    }
}

impl Serialize for LiftDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Counts<'a>(&'a BTreeMap<Jump, BigUint>);
        impl Serialize for Counts<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(&k.to_string(), &v.to_string())?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("minlift", &self.minlift.to_string())?;
        m.serialize_entry("counts", &Counts(&self.counts))?;
        m.end()
    }
}

/// Tally of the Imai formula over canonical `b` with `w(b) ≤ v_max`, keys `≤ v_max`.
///
/// A `b` with `w(b) > v_max` has formula value `> v_max`, so the kept keys are exact.
pub fn imai_distribution(a: &SparseTPoly, c: &SparseTPoly, v_max: u64, budget: u64) -> Result<LiftDistribution> {
    check_totally_ramified(a, c)?;
    let needed = b_count(&a.desc, v_max);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut counts: BTreeMap<Jump, BigUint> = (0..=v_max).map(|v| (Jump::from_integer(v), BigUint::zero())).collect();
    let mut minlift: Option<Jump> = None;
    for b in canonical_bs(&a.desc, v_max) {
        let j = imai_formula(a, c, &b);
        if j <= Jump::from_integer(v_max) {
            *counts.entry(j).or_default() += 1u32;
            minlift = Some(minlift.map_or(j, |m| m.min(j)));
        }
    }
    Ok(LiftDistribution { minlift: minlift.unwrap_or_else(|| Jump::from_integer(minlift_d4(a, c))), counts })
}

/// `#{δ ∈ Hom(Γ_K, Z/2) : lastjump δ = v}`.
pub fn z2_count_eq(q: &BigUint, v: u64) -> BigUint {
    if v == 0 {
        BigUint::from(2u32)
    } else if v % 2 == 1 {
        BigUint::from(2u32) * q.pow(((v - 1) / 2) as u32) * (q - 1u32)
    } else {
        BigUint::zero()
    }
}

/// `#{δ ∈ Hom(Γ_K, Z/2) : lastjump δ ≤ v} = 2 q^{⌈v/2⌉}`.
pub fn z2_count_le(q: &BigUint, v: u64) -> BigUint {
    BigUint::from(2u32) * q.pow(v.div_ceil(2) as u32)
}

/// Lift counts by last jump for `v ≤ v_max`.
pub fn lift_distribution(a: &SparseTPoly, c: &SparseTPoly, v_max: u64) -> Result<LiftDistribution> {
    check_char_2(a)?;
    if v_max > 64 {
        return Err(Error::OutOfSetting(format!("v_max = {v_max} exceeds 64")));
    }
    let q = a.desc.order_big();
    let ml = minlift_d4(a, c);
    let counts = (0..=v_max)
        .map(|v| {
            let n = match v.cmp(&ml) {
                std::cmp::Ordering::Less => BigUint::zero(),
                std::cmp::Ordering::Equal => z2_count_le(&q, v),
                std::cmp::Ordering::Greater => z2_count_eq(&q, v),
            };
            (Jump::from_integer(v), n)
        })
        .collect();
    Ok(LiftDistribution { minlift: Jump::from_integer(ml), counts })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistComparison {
    pub alpha: FieldElement,
    pub gamma: FieldElement,
    pub formula_equal: bool,
    /// `None` when the reduction is not totally ramified.
    pub imai_equal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UrtwistReport {
    pub totally_ramified: bool,
    /// Whether the Imai tally of the untwisted pair matches [`lift_distribution`].
    pub imai_matches_formula: Option<bool>,
    pub twists: Vec<TwistComparison>,
    pub all_equal: bool,
}

/// Compares lift distributions of `(a + α, c + γ)` with those of `(a, c)` for all `α, γ ∈ F_q`.
pub fn urtwist_invariance_check(a: &SparseTPoly, c: &SparseTPoly, v_max: u64, budget: u64) -> Result<UrtwistReport> {
    check_char_2(a)?;
    let base = lift_distribution(a, c, v_max)?;
    let tr = is_totally_ramified(a, c);
    let base_imai = if tr { Some(imai_distribution(a, c, v_max, budget)?) } else { None };
    let mut twists = Vec::new();
    for alpha in a.desc.elements() {
        for gamma in a.desc.elements() {
            let a2 = a.shift(&alpha).canonical();
            let c2 = c.shift(&gamma).canonical();
            let formula_equal = lift_distribution(&a2, &c2, v_max)? == base;
            let imai_equal = match &base_imai {
                Some(d) => Some(imai_distribution(&a2, &c2, v_max, budget)?.counts == d.counts),
                None => None,
            };
            twists.push(TwistComparison { alpha: alpha.clone(), gamma, formula_equal, imai_equal });
        }
    }
    let imai_matches_formula = base_imai.as_ref().map(|d| d.support() == base.support());
    let all_equal = twists.iter().all(|t| t.formula_equal && t.imai_equal != Some(false)) && imai_matches_formula != Some(false);
    Ok(UrtwistReport { totally_ramified: tr, imai_matches_formula, twists, all_equal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    ClosedForm,
    Enumeration,
}

/// Inertial types `(a, c)` with minimal lift height `v`, as a polynomial in `Q`.
pub fn count_minlift_closed(q: &BigUint, v: u64) -> BigUint {
    if v == 0 {
        BigUint::one()
    } else if v % 2 == 1 {
        BigUint::from(2u32) * q.pow(((v - 1) / 2) as u32) * (q - 1u32)
    } else {
        let qm1 = q - 1u32;
        BigUint::from(v / 2) * q.pow((v / 2 - 1) as u32) * &qm1 * &qm1
    }
}

/// Inertial types `(a, c)` of `Hom(Γ_K, F_2^2)` with `minlift = v`.
pub fn count_minlift(q: u64, v: u64, method: CountMethod, budget: u64) -> Result<BigUint> {
    let desc = crate::gf::field_of_order(q)?;
    if desc.p() != 2 {
        return Err(Error::OutOfSetting(format!("q = {q} is odd")));
    }
    match method {
        CountMethod::ClosedForm => Ok(count_minlift_closed(&BigUint::from(q), v)),
        CountMethod::Enumeration => {
            let odd: Vec<u64> = (1..=v).filter(|e| e % 2 == 1).collect();
            let per = (q as u128).checked_pow(odd.len() as u32);
            let needed = per.and_then(|x| x.checked_mul(x)).unwrap_or(u128::MAX);
            if needed > budget as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let types: Vec<SparseTPoly> = (0..per.unwrap() as u64)
                .map(|mut k| {
                    let mut terms = Vec::new();
                    for &e in odd.iter().rev() {
                        terms.push((e, desc.element_at(k % q)));
                        k /= q;
                    }
                    SparseTPoly::new(&desc, terms).unwrap()
                })
                .collect();
            let mut n = 0u64;
            for a in &types {
                for c in &types {
                    n += (minlift_d4(a, c) == v) as u64;
                }
            }
            Ok(BigUint::from(n))
        }
    }
}

/// `(1/8) #{ρ ∈ Hom(Γ_K, D_4) : lastjump ρ ≤ v} = Q^{⌈v/2⌉} Σ_{v' ≤ v} count_minlift(Q, v')`.
pub fn count_d4_le(q: &BigUint, v: u64) -> BigUint {
    let total: BigUint = (0..=v).map(|u| count_minlift_closed(q, u)).sum();
    let out = q.pow(v.div_ceil(2) as u32) * total;
    debug_assert!((&out * 8u32) % 8u32 == BigUint::zero());
    out
}

/// `(1/8) #{ρ : lastjump ρ = v}` over a local field with residue field of size `Q`.
pub fn local_a(q: &BigUint, v: u64) -> BigUint {
    if v == 0 {
        return BigUint::one();
    }
    count_d4_le(q, v) - count_d4_le(q, v - 1)
}

fn check_rank2_elementary(x: &GroupWittElement) -> Result<()> {
    if x.shape().exponents() != [1, 1] {
        return Err(Error::UnsupportedShape(format!("pairing needs (Z/p)^2, got {}", x.shape())));
    }
    Ok(())
}

/// `x_1 y_2 - x_2 y_1` on `(Z/p)^2 ⊗ F_q`.
pub fn commutator_pairing(x: &GroupWittElement, y: &GroupWittElement) -> Result<FieldElement> {
    check_rank2_elementary(x)?;
    check_rank2_elementary(y)?;
    if x.descriptor() != y.descriptor() {
        return Err(Error::MixedFields);
    }
    let c = |g: &GroupWittElement, i: usize| g.parts()[i].components()[0].clone();
    Ok(&(&c(x, 0) * &c(y, 1)) - &(&c(x, 1) * &c(y, 0)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonReport {
    pub m_epsilon: ReducedCocycle,
    pub lastjump_rho: u64,
    pub lastjump_epsilon: u64,
    pub holds: bool,
}

/// Builds `m_ε = [m_ρ, g_δ]` coefficientwise over `F_{q'}` and compares last jumps.
pub fn epsilon_bound_check(m_rho: &ReducedCocycle, g_delta: (&FieldElement, &FieldElement)) -> Result<EpsilonReport> {
    let shape = m_rho.shape();
    if shape.exponents() != [1, 1] {
        return Err(Error::UnsupportedShape(format!("Q must be (Z/p)^2, got {shape}")));
    }
    let target = g_delta.0.descriptor().clone();
    if g_delta.1.descriptor() != &target {
        return Err(Error::MixedFields);
    }
    if !m_rho.descriptor().is_subfield_of(&target) {
        return Err(Error::NotASubfield { p: target.p(), from: m_rho.descriptor().degree(), to: target.degree() });
    }
    let g = GroupWittElement::new(shape, vec![teichmueller(g_delta.0, 1), teichmueller(g_delta.1, 1)])?;
    let n_shape = GroupShape::cyclic(shape.p(), 1)?;
    let mut terms = Vec::new();
    for (&n, e) in m_rho.support() {
        let parts = e
            .parts()
            .iter()
            .map(|wv| Ok(teichmueller(&embed(&wv.components()[0], &target)?, 1)))
            .collect::<Result<Vec<_>>>()?;
        let val = commutator_pairing(&GroupWittElement::new(shape, parts)?, &g)?;
        let mut coeff = GroupWittElement::new(&n_shape, vec![teichmueller(&val, 1)])?;
        if n == 0 {
            coeff = normalize_m0(&coeff);
        }
        terms.push((n, coeff));
    }
    let m_epsilon = ReducedCocycle::new(&n_shape, &target, terms)?;
    let (lr, le) = (last_jump(m_rho), last_jump(&m_epsilon));
    Ok(EpsilonReport { m_epsilon, lastjump_rho: lr, lastjump_epsilon: le, holds: le <= lr })
}

/// The `(Z/2)^2` datum with coefficients `(a_n | c_n)`.
pub fn reduction_cocycle(a: &SparseTPoly, c: &SparseTPoly) -> Result<ReducedCocycle> {
    check_char_2(a)?;
    let shape = GroupShape::elementary(2, 2)?;
    let exps: std::collections::BTreeSet<u64> = a.terms.keys().chain(c.terms.keys()).copied().collect();
    let terms = exps
        .into_iter()
        .map(|n| {
            let parts = vec![teichmueller(&a.coeff(n), 1), teichmueller(&c.coeff(n), 1)];
            Ok((n, GroupWittElement::new(&shape, parts)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ReducedCocycle::new(&shape, &a.desc, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asw_abelian::{count_abelian_by_last_jump, CountMode, DEFAULT_BUDGET};
    use crate::gf::field_of_order;

    fn f(q: u64) -> FieldDescriptor {
        field_of_order(q).unwrap()
    }

    fn t(q: u64, exps: &[u64]) -> SparseTPoly {
        SparseTPoly::from_exponents(&f(q), exps)
    }

    fn j(n: u64, d: u64) -> Jump {
        Jump::new(n, d)
    }

    /// Canonical elements of `𝒟⁰` with `w ≤ bound`.
    fn all_reduced(q: u64, bound: u64) -> Vec<SparseTPoly> {
        canonical_bs(&f(q), bound).collect()
    }

    #[test]
    fn w_examples() {
        assert_eq!(w(&t(2, &[3, 1])), 3);
        assert_eq!(w(&SparseTPoly::zero(&f(2))), 0);
        assert_eq!(w(&t(2, &[0])), 0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(t_derivative(&t(2, &[3])), t(2, &[3]));
        assert!(t_derivative(&t(4, &[0])).is_zero());
        assert_eq!(t_derivative(&t(2, &[1, 0])), t(2, &[1]));
        let f3 = f(3);
        let x = SparseTPoly::parse(&f3, "2:1,3:1").unwrap();
        assert_eq!(t_derivative(&x), SparseTPoly::parse(&f3, "2:1").unwrap());
    }

    #[test]
    fn parse_display_round_trip() {
        let f4 = f(4);
        let x = SparseTPoly::parse(&f4, "3:0.1,1:1,0:1.1").unwrap();
        assert_eq!(x.to_string(), "3:0.1,1:1,0:1.1");
        assert_eq!(SparseTPoly::parse(&f4, &x.to_string()).unwrap(), x);
        assert!(SparseTPoly::parse(&f4, "3").is_err());
        assert!(SparseTPoly::parse(&f4, "x:1").is_err());
        assert_eq!(SparseTPoly::parse(&f4, "0").unwrap(), SparseTPoly::zero(&f4));
    }

    #[test]
    fn imai_examples() {
        let z = SparseTPoly::zero(&f(2));
        assert_eq!(imai_formula(&t(2, &[1]), &t(2, &[1]), &z), j(2, 1));
        assert_eq!(imai_formula(&t(2, &[1]), &t(2, &[3]), &z), j(4, 1));
        assert_eq!(imai_formula(&z, &z, &t(2, &[1])), j(1, 1));
        assert_eq!(imai_formula(&t(2, &[3]), &z, &z), j(3, 1));
        assert_eq!(imai_formula(&t(2, &[1]), &t(2, &[5]), &t(2, &[7])), j(7, 1));
        assert_eq!(imai_formula(&t(2, &[5]), &t(2, &[1]), &t(2, &[1])), j(6, 1));
    }

    #[test]
    fn d4_datum_validation() {
        let f4 = f(4);
        let z = SparseTPoly::zero(&f4);
        assert!(D4Datum::new(t(4, &[1]), t(4, &[3]), z.clone()).is_ok());
        assert!(D4Datum::new(t(4, &[2]), z.clone(), z.clone()).is_err());
        // 1 ∈ ℘(F_4) is not a canonical constant
        assert!(D4Datum::new(t(4, &[0]), z.clone(), z.clone()).is_err());
        assert!(D4Datum::new(t(3, &[1]), t(3, &[1]), SparseTPoly::zero(&f(3))).is_err());
    }

    #[test]
    fn minlift_examples() {
        let z = SparseTPoly::zero(&f(2));
        assert_eq!(minlift_d4(&t(2, &[1]), &t(2, &[1])), 2);
        assert_eq!(minlift_d4(&z, &t(2, &[3])), 3);
        assert_eq!(minlift_d4(&z, &z), 0);
        assert_eq!(minlift_bruteforce(&t(2, &[1]), &t(2, &[3]), 6, DEFAULT_B_BUDGET).unwrap(), j(4, 1));
        assert_eq!(minlift_bruteforce(&t(2, &[1]), &t(2, &[1, 3]), 6, DEFAULT_B_BUDGET).unwrap(), j(4, 1));
        assert_eq!(minlift_bruteforce(&t(2, &[1]), &t(2, &[1]), 6, DEFAULT_B_BUDGET), Err(Error::NotTotallyRamified));
        assert!(matches!(minlift_bruteforce(&t(2, &[1]), &t(2, &[3]), 40, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn totally_ramified_detection() {
        assert!(is_totally_ramified(&t(2, &[1]), &t(2, &[3])));
        assert!(is_totally_ramified(&t(2, &[1, 0]), &t(2, &[1, 3])));
        assert!(!is_totally_ramified(&t(2, &[1, 0]), &t(2, &[1])));
        assert!(!is_totally_ramified(&t(2, &[0]), &t(2, &[1])));
        let f4 = f(4);
        let a = SparseTPoly::monomial(1, &f4.generator());
        assert!(is_totally_ramified(&a, &t(4, &[1])));
    }

    #[test]
    fn lift_distribution_examples() {
        let d = lift_distribution(&t(2, &[1]), &t(2, &[1]), 2).unwrap();
        assert_eq!(d.count(j(2, 1)), BigUint::from(4u32));
        assert_eq!(d.count(j(1, 1)), BigUint::zero());
        let z = SparseTPoly::zero(&f(2));
        assert_eq!(lift_distribution(&z, &z, 0).unwrap().count(j(0, 1)), BigUint::from(2u32));
        // the diagonal case, counted directly over b
        let a = t(2, &[1]);
        let n = canonical_bs(&f(2), 2).filter(|b| imai_formula(&a, &a, b) == j(2, 1)).count();
        assert_eq!(n, 4);
    }

    #[test]
    fn z2_closed_forms_match_abelian_counts() {
        let z2 = GroupShape::cyclic(2, 1).unwrap();
        for q in [2u64, 4, 8] {
            let mut le = BigUint::zero();
            for v in 0..=7 {
                let got = count_abelian_by_last_jump(&z2, q, v, CountMode::Homomorphisms, DEFAULT_BUDGET).unwrap();
                assert_eq!(z2_count_eq(&BigUint::from(q), v), got);
                le += got;
                assert_eq!(z2_count_le(&BigUint::from(q), v), le);
            }
        }
    }

    #[test]
    fn count_examples() {
        let c = |q, v| count_minlift(q, v, CountMethod::ClosedForm, 0).unwrap();
        assert_eq!(c(2, 0), BigUint::from(1u32));
        assert_eq!(c(2, 3), BigUint::from(4u32));
        assert_eq!(c(2, 4), BigUint::from(4u32));
        let two = BigUint::from(2u32);
        assert_eq!(count_d4_le(&two, 0), BigUint::from(1u32));
        assert_eq!(count_d4_le(&two, 1), BigUint::from(6u32));
        assert_eq!(count_d4_le(&two, 2), BigUint::from(8u32));
        assert_eq!(local_a(&BigUint::from(12345u32), 0), BigUint::from(1u32));
        assert_eq!(local_a(&two, 1), BigUint::from(5u32));
        assert_eq!(local_a(&BigUint::from(4u32), 1), BigUint::from(27u32));
    }

    #[test]
    fn local_a_at_one_is_the_quadratic() {
        for q in [2u64, 4, 8, 16, 1 << 20] {
            let qb = BigUint::from(q);
            assert_eq!(local_a(&qb, 1), &qb * (BigUint::from(2u32) * &qb - 1u32) - 1u32);
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for q in [2u64, 4] {
            for v in 0..=5 {
                assert_eq!(
                    count_minlift(q, v, CountMethod::ClosedForm, 0).unwrap(),
                    count_minlift(q, v, CountMethod::Enumeration, 1 << 20).unwrap(),
                    "q={q} v={v}"
                );
            }
        }
    }

    #[test]
    fn d4_counts_are_sums_of_lift_distributions() {
        // (1/8) #{ρ : lj ≤ v} = (1/4) Σ over inertial types of the number of lifts with lj ≤ v
        // divided by 2, summed through lift_distribution over all (a, c) with a_0 = c_0 = 0.
        for q in [2u64, 4] {
            for v in 0..=4u64 {
                let types: Vec<SparseTPoly> = all_reduced(q, v).into_iter().filter(|x| x.coeff(0).is_zero()).collect();
                let mut total = BigUint::zero();
                for a in &types {
                    for c in &types {
                        let d = lift_distribution(a, c, v).unwrap();
                        total += d.counts.values().sum::<BigUint>();
                    }
                }
                assert_eq!(total, count_d4_le(&BigUint::from(q), v) * 2u32, "q={q} v={v}");
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let g = GroupShape::elementary(2, 2).unwrap();
        let f2 = f(2);
        let e = |s: &str| GroupWittElement::parse(&g, &f2, s).unwrap();
        assert!(commutator_pairing(&e("1|0"), &e("0|1")).unwrap().is_one());
        assert!(commutator_pairing(&e("1|1"), &e("1|1")).unwrap().is_zero());
        let f4 = f(4);
        let x = GroupWittElement::parse(&g, &f4, "0.1|0").unwrap();
        let y = GroupWittElement::parse(&g, &f4, "0|0.1").unwrap();
        assert_eq!(commutator_pairing(&x, &y).unwrap(), f4.from_coeffs(&[1, 1]));
        let z4 = GroupShape::cyclic(2, 2).unwrap();
        let bad = GroupWittElement::parse(&z4, &f2, "1;0").unwrap();
        assert!(matches!(commutator_pairing(&bad, &bad), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn pairing_is_alternating_and_bilinear() {
        for (p, q) in [(2u32, 4u64), (3, 9)] {
            let g = GroupShape::elementary(p, 2).unwrap();
            let desc = f(q);
            let all = crate::asw_abelian::all_group_witt_elements(&g, &desc);
            for x in &all {
                assert!(commutator_pairing(x, x).unwrap().is_zero());
                for y in all.iter().step_by(3) {
                    assert_eq!(commutator_pairing(x, y).unwrap(), -&commutator_pairing(y, x).unwrap());
                    for z in all.iter().step_by(7) {
                        let lhs = commutator_pairing(&x.add(y).unwrap(), z).unwrap();
                        let rhs = &commutator_pairing(x, z).unwrap() + &commutator_pairing(y, z).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let g = GroupShape::elementary(2, 2).unwrap();
        let (f2, f4) = (f(2), f(4));
        let zero = ReducedCocycle::zero(&g, &f2);
        let r = epsilon_bound_check(&zero, (&f4.zero(), &f4.generator())).unwrap();
        assert!(r.m_epsilon.support().is_empty());
        assert_eq!((r.lastjump_rho, r.lastjump_epsilon), (0, 0));
        let m = ReducedCocycle::parse(&g, &f2, "1:1|0").unwrap();
        let r = epsilon_bound_check(&m, (&f4.zero(), &f4.generator())).unwrap();
        assert_eq!(r.m_epsilon.to_string(), "1:0.1");
        assert_eq!((r.lastjump_rho, r.lastjump_epsilon), (1, 1));
        let m = ReducedCocycle::parse(&g, &f2, "3:1|1,0:1|0").unwrap();
        assert!(epsilon_bound_check(&m, (&f4.zero(), &f4.zero())).unwrap().m_epsilon.support().is_empty());
    }

    #[test]
    fn epsilon_bound_exhaustive() {
        let g = GroupShape::elementary(2, 2).unwrap();
        let f2 = f(2);
        let coeffs = crate::asw_abelian::all_group_witt_elements(&g, &f2);
        let m0s = crate::asw_abelian::m0_transversal(&g, &f2);
        for qp in [2u64, 4, 16] {
            let target = f(qp);
            let elems: Vec<FieldElement> = target.elements().collect();
            for m0 in &m0s {
                for m1 in &coeffs {
                    for m3 in &coeffs {
                        let m = ReducedCocycle::new(&g, &f2, [(0, m0.clone()), (1, m1.clone()), (3, m3.clone())]).unwrap();
                        for g1 in &elems {
                            for g2 in &elems {
                                let r = epsilon_bound_check(&m, (g1, g2)).unwrap();
                                assert!(r.holds, "{m} {g1} {g2}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn minlift_bounds_the_reduction_last_jump() {
        for (q, bound) in [(2u64, 5u64), (4, 5)] {
            let xs = all_reduced(q, bound);
            for a in &xs {
                for c in xs.iter().step_by(if q == 4 { 5 } else { 1 }) {
                    let lj = last_jump(&reduction_cocycle(a, c).unwrap());
                    assert!(minlift_d4(a, c) >= lj);
                    assert_eq!(lj, w(a).max(w(c)));
                }
            }
        }
    }

    fn totally_ramified_pairs(q: u64, max_sum: u64) -> Vec<(SparseTPoly, SparseTPoly)> {
        let xs = all_reduced(q, max_sum);
        let mut out = Vec::new();
        for a in &xs {
            for c in &xs {
                if w(a) + w(c) <= max_sum && is_totally_ramified(a, c) {
                    out.push((a.clone(), c.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn minlift_formula_matches_bruteforce() {
        for (q, max_sum) in [(2u64, 6u64), (4, 4)] {
            let pairs = totally_ramified_pairs(q, max_sum);
            assert!(!pairs.is_empty());
            for (a, c) in &pairs {
                let ml = minlift_d4(a, c);
                assert_eq!(minlift_bruteforce(a, c, ml, DEFAULT_B_BUDGET).unwrap(), Jump::from_integer(ml), "{a} {c}");
                // larger b never helps
                assert_eq!(minlift_bruteforce(a, c, ml + 2, DEFAULT_B_BUDGET).unwrap(), Jump::from_integer(ml));
            }
        }
    }

    #[test]
    fn non_integral_or_even_jumps_are_minimal() {
        for (q, max_sum) in [(2u64, 6u64), (4, 4)] {
            for (a, c) in totally_ramified_pairs(q, max_sum) {
                let ml = Jump::from_integer(minlift_d4(&a, &c));
                for b in canonical_bs(&f(q), max_sum + 1) {
                    let lj = imai_formula(&a, &c, &b);
                    assert!(lj.is_integer());
                    let even_pos = lj.is_integer() && lj.to_integer() > 0 && lj.to_integer() % 2 == 0;
                    if !lj.is_integer() || even_pos {
                        assert_eq!(lj, ml);
                    }
                }
            }
        }
    }

    #[test]
    fn central_twists_of_a_minimal_lift() {
        let desc = f(2);
        for (a, c) in totally_ramified_pairs(2, 5) {
            let ml = Jump::from_integer(minlift_d4(&a, &c));
            let b_min = canonical_bs(&desc, 5).find(|b| imai_formula(&a, &c, b) == ml).unwrap();
            for e in canonical_bs(&desc, 5) {
                let twisted = b_min.add(&e).canonical();
                assert_eq!(imai_formula(&a, &c, &twisted), ml.max(Jump::from_integer(w(&e))));
            }
        }
    }

    #[test]
    fn urtwist_examples() {
        let r = urtwist_invariance_check(&t(2, &[1]), &t(2, &[3]), 6, DEFAULT_B_BUDGET).unwrap();
        assert_eq!(r.twists.len(), 4);
        assert!(r.all_equal);
        assert_eq!(r.imai_matches_formula, Some(true));
        let z = SparseTPoly::zero(&f(2));
        assert!(urtwist_invariance_check(&z, &z, 4, DEFAULT_B_BUDGET).unwrap().all_equal);
        let r = urtwist_invariance_check(&t(4, &[1]), &t(4, &[1]), 4, DEFAULT_B_BUDGET).unwrap();
        assert_eq!(r.twists.len(), 16);
        assert!(r.all_equal);
    }

    #[test]
    fn urtwist_regression_corpus() {
        for q in [2u64, 4] {
            let desc = f(q);
            let g = desc.generator();
            let mono = |e: u64, c: &FieldElement| SparseTPoly::monomial(e, c);
            let mut corpus = vec![
                (t(q, &[1]), t(q, &[3])),
                (t(q, &[3]), t(q, &[1])),
                (t(q, &[1]), t(q, &[1, 3])),
                (t(q, &[1]), t(q, &[5])),
                (t(q, &[3]), t(q, &[3, 1])),
                (t(q, &[1]), t(q, &[1])),
                (t(q, &[3]), t(q, &[3])),
                (SparseTPoly::zero(&desc), t(q, &[3])),
                (t(q, &[5]), SparseTPoly::zero(&desc)),
                (SparseTPoly::zero(&desc), SparseTPoly::zero(&desc)),
                (t(q, &[1, 3]), t(q, &[3])),
                (t(q, &[1, 3, 5]), t(q, &[1])),
                (t(q, &[5]), t(q, &[3])),
                (t(q, &[1, 5]), t(q, &[1, 3])),
                (mono(1, &g), t(q, &[1])),
                (mono(3, &g), t(q, &[1, 3])),
                (t(q, &[1]), mono(1, &g).add(&t(q, &[3]))),
                (t(q, &[3]), mono(3, &g)),
                (t(q, &[1]), t(q, &[7])),
                (t(q, &[7]), t(q, &[1])),
                (t(q, &[3, 1]), t(q, &[5, 1])),
            ];
            corpus.truncate(if q == 4 { 21 } else { corpus.len() });
            assert!(corpus.len() >= 20);
            for (a, c) in &corpus {
                let v_max = if q == 2 { 8 } else { 6 };
                let r = urtwist_invariance_check(a, c, v_max, DEFAULT_B_BUDGET).unwrap();
                assert!(r.all_equal, "{a} {c}");
            }
        }
    }
}
