//! Artin–Schreier–Witt data for finite abelian p-groups over `F_q((T))`.
//!
//! A homomorphism `Γ_K → G`, `G = ∏ Z/p^{n_i}`, is described by its reduced
//! cocycle `m = m_0 + Σ m_n [T]^{-n}` with coefficients in `G ⊗ W(F_q) = ∏ W_{n_i}(F_q)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{field_of_order, FieldDescriptor};
use crate::witt::{all_vectors, mul_by_p, witt_laws, witt_wp_transversal, WittVector};

/// Largest group order accepted by [`GroupShape::new`].
pub const MAX_GROUP_ORDER: u64 = 1 << 12;
/// Largest group order accepted by [`enumerate_subgroups`].
pub const MAX_SUBGROUP_SCAN: u64 = 1 << 10;
/// Default step budget for [`count_abelian_by_last_jump`].
pub const DEFAULT_BUDGET: u64 = 1 << 27;

/// `∏ Z/p^{n_i}` with `n_1 ≥ n_2 ≥ … ≥ 1`. The empty product is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupShape {
    p: u32,
    exponents: Vec<u32>,
}

impl GroupShape {
    pub fn new(p: u32, mut exponents: Vec<u32>) -> Result<GroupShape> {
        if !crate::gf::is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if exponents.contains(&0) {
            return Err(Error::UnsupportedShape("cyclic factors must be nontrivial".into()));
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        let total: u32 = exponents.iter().sum();
        let order = (p as u64).checked_pow(total).filter(|&o| o <= MAX_GROUP_ORDER);
        match order {
            Some(_) => Ok(GroupShape { p, exponents }),
            None => Err(Error::GroupTooLarge {
                order: (p as u64).saturating_pow(total),
                bound: MAX_GROUP_ORDER,
            }),
        }
    }

    /// `Z/p^n`.
    pub fn cyclic(p: u32, n: u32) -> Result<GroupShape> {
        GroupShape::new(p, vec![n])
    }

    /// `(Z/p)^r`.
    pub fn elementary(p: u32, r: usize) -> Result<GroupShape> {
        GroupShape::new(p, vec![1; r])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.exponents.iter().sum())
    }

    pub fn is_elementary(&self) -> bool {
        self.exponents.iter().all(|&n| n == 1)
    }

    fn moduli(&self) -> Vec<u64> {
        self.exponents.iter().map(|&n| (self.p as u64).pow(n)).collect()
    }

    /// Element number `k`, first factor most significant.
    pub fn element_at(&self, mut k: u64) -> Vec<u64> {
        let mods = self.moduli();
        let mut out = vec![0; mods.len()];
        for (slot, m) in out.iter_mut().zip(&mods).rev() {
            *slot = k % m;
            k /= m;
        }
        out
    }

    pub fn index_of(&self, g: &[u64]) -> u64 {
        self.moduli().iter().zip(g).fold(0, |acc, (m, x)| acc * m + x % m)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.moduli().iter().zip(a.iter().zip(b)).map(|(m, (x, y))| (x + y) % m).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(move |k| self.element_at(k))
    }
}

impl fmt::Display for GroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.exponents.iter().map(|n| format!("Z/{}", (self.p as u64).pow(*n))).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// An element of `G ⊗ W(F_q) = ∏ W_{n_i}(F_q)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupWittElement {
    shape: GroupShape,
    desc: FieldDescriptor,
    parts: Vec<WittVector>,
}

impl fmt::Debug for GroupWittElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for GroupWittElement {
    /// Parts joined by `|`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl Serialize for GroupWittElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl GroupWittElement {
    pub fn new(shape: &GroupShape, parts: Vec<WittVector>) -> Result<GroupWittElement> {
        if parts.len() != shape.rank() {
            return Err(Error::InvalidDatum(format!("{} parts given for a group of rank {}", parts.len(), shape.rank())));
        }
        let desc = match parts.first() {
            Some(w) => w.descriptor().clone(),
            None => return Err(Error::InvalidDatum("use GroupWittElement::zero for the trivial group".into())),
        };
        for (w, &n) in parts.iter().zip(shape.exponents()) {
            if w.descriptor() != &desc {
                return Err(Error::MixedFields);
            }
            if w.length() != n as usize {
                return Err(Error::InvalidDatum(format!("part of length {} for a factor Z/{}^{n}", w.length(), shape.p())));
            }
        }
        if desc.p() != shape.p() {
            return Err(Error::OutOfSetting(format!("coefficients in characteristic {} for a {}-group", desc.p(), shape.p())));
        }
        Ok(GroupWittElement { shape: shape.clone(), desc, parts })
    }

    pub fn zero(shape: &GroupShape, desc: &FieldDescriptor) -> GroupWittElement {
        let parts = shape.exponents().iter().map(|&n| WittVector::zero(desc, n as usize)).collect();
        GroupWittElement { shape: shape.clone(), desc: desc.clone(), parts }
    }

    /// The image of `g ∈ G` under `G → G ⊗ W(F_q)`, `g ↦ g ⊗ 1`.
    pub fn from_group(shape: &GroupShape, desc: &FieldDescriptor, g: &[u64]) -> GroupWittElement {
        let parts = shape
            .exponents()
            .iter()
            .zip(g)
            .map(|(&n, &x)| WittVector::one(desc, n as usize).scalar_mul(x))
            .collect();
        GroupWittElement { shape: shape.clone(), desc: desc.clone(), parts }
    }

    /// Parses parts separated by `|`, Witt components by `;`, field coefficients by `.`.
    pub fn parse(shape: &GroupShape, desc: &FieldDescriptor, s: &str) -> Result<GroupWittElement> {
        if shape.rank() == 0 {
            return match s.trim() {
                "" | "0" => Ok(GroupWittElement::zero(shape, desc)),
                _ => Err(Error::InvalidDatum(format!("nonzero element {s:?} of the trivial group"))),
            };
        }
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != shape.rank() {
            return Err(Error::InvalidDatum(format!("{s:?} has {} parts, the group has rank {}", parts.len(), shape.rank())));
        }
        let parts = parts
            .iter()
            .zip(shape.exponents())
            .map(|(part, &n)| {
                let comps: Vec<&str> = part.split(';').collect();
                if comps.len() != n as usize {
                    return Err(Error::InvalidDatum(format!("{part:?} has {} Witt components, expected {n}", comps.len())));
                }
                WittVector::new(comps.iter().map(|c| desc.parse_element(c)).collect::<Result<_>>()?)
            })
            .collect::<Result<Vec<_>>>()?;
        GroupWittElement::new(shape, parts)
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn parts(&self) -> &[WittVector] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(WittVector::is_zero)
    }

    pub fn add(&self, other: &GroupWittElement) -> Result<GroupWittElement> {
        if self.shape != other.shape || self.desc != other.desc {
            return Err(Error::MixedRings);
        }
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| a + b).collect();
        Ok(GroupWittElement { shape: self.shape.clone(), desc: self.desc.clone(), parts })
    }

    pub fn neg(&self) -> GroupWittElement {
        GroupWittElement { shape: self.shape.clone(), desc: self.desc.clone(), parts: self.parts.iter().map(|a| -a).collect() }
    }

    pub fn mul_by_p(&self) -> GroupWittElement {
        GroupWittElement { shape: self.shape.clone(), desc: self.desc.clone(), parts: self.parts.iter().map(mul_by_p).collect() }
    }

    /// Smallest `k` with `p^k · self = 0`, found by repeated [`mul_by_p`].
    pub fn p_order(&self) -> u32 {
        let mut k = 0;
        let mut x = self.clone();
        while !x.is_zero() {
            x = x.mul_by_p();
            k += 1;
        }
        k
    }
}

/// Every element of `G ⊗ W(F_q)`, first part most significant.
pub fn all_group_witt_elements(shape: &GroupShape, desc: &FieldDescriptor) -> Vec<GroupWittElement> {
    let mut out = vec![GroupWittElement::zero(shape, desc)];
    for (i, &n) in shape.exponents().iter().enumerate() {
        let vs: Vec<WittVector> = all_vectors(desc, n as usize).collect();
        out = out
            .into_iter()
            .flat_map(|e| {
                vs.iter().map(move |v| {
                    let mut e = e.clone();
                    e.parts[i] = v.clone();
                    e
                })
            })
            .collect();
    }
    out
}

/// Normal forms for `(G ⊗ W(F_q)) / ℘`: per factor the multiples `k·[t]`, `0 ≤ k < p^{n_i}`.
pub fn m0_transversal(shape: &GroupShape, desc: &FieldDescriptor) -> Vec<GroupWittElement> {
    let mut out = vec![GroupWittElement::zero(shape, desc)];
    for (i, &n) in shape.exponents().iter().enumerate() {
        let vs = witt_wp_transversal(desc, n as usize);
        out = out
            .into_iter()
            .flat_map(|e| {
                vs.iter().map(move |v| {
                    let mut e = e.clone();
                    e.parts[i] = v.clone();
                    e
                })
            })
            .collect();
    }
    out
}

/// The datum `m_0 + Σ m_n [T]^{-n}`; keys are `0` or prime to `p`, values nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct ReducedCocycle {
    shape: GroupShape,
    desc: FieldDescriptor,
    support: BTreeMap<u64, GroupWittElement>,
}

impl fmt::Debug for ReducedCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedCocycle({} over {:?}: {self})", self.shape, self.desc)
    }
}

impl fmt::Display for ReducedCocycle {
    /// Terms `n:element` joined by `,`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.support.iter().map(|(n, e)| format!("{n}:{e}")).collect();
        write!(f, "{}", terms.join(","))
    }
}

impl Serialize for ReducedCocycle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl ReducedCocycle {
    pub fn new(
        shape: &GroupShape,
        desc: &FieldDescriptor,
        terms: impl IntoIterator<Item = (u64, GroupWittElement)>,
    ) -> Result<ReducedCocycle> {
        if desc.p() != shape.p() {
            return Err(Error::OutOfSetting(format!("field characteristic {} for a {}-group", desc.p(), shape.p())));
        }
        let mut support = BTreeMap::new();
        for (n, e) in terms {
            if n != 0 && n % shape.p() as u64 == 0 {
                return Err(Error::InvalidDatum(format!("index {n} is divisible by p = {}", shape.p())));
            }
            if &e.shape != shape || &e.desc != desc {
                return Err(Error::MixedRings);
            }
            if support.contains_key(&n) {
                return Err(Error::InvalidDatum(format!("index {n} given twice")));
            }
            if !e.is_zero() {
                support.insert(n, e);
            }
        }
        if let Some(m0) = support.get(&0) {
            let normal = m0_transversal(shape, desc);
            if !normal.contains(m0) {
                return Err(Error::InvalidDatum(format!("m_0 = {m0} is not in the canonical transversal")));
            }
        }
        Ok(ReducedCocycle { shape: shape.clone(), desc: desc.clone(), support })
    }

    pub fn zero(shape: &GroupShape, desc: &FieldDescriptor) -> ReducedCocycle {
        ReducedCocycle { shape: shape.clone(), desc: desc.clone(), support: BTreeMap::new() }
    }

    /// Parses `n:element` terms separated by `,`; see [`GroupWittElement::parse`].
    pub fn parse(shape: &GroupShape, desc: &FieldDescriptor, s: &str) -> Result<ReducedCocycle> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(ReducedCocycle::zero(shape, desc));
        }
        let terms = s
            .split(',')
            .map(|t| {
                let (n, e) = t
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidDatum(format!("term {t:?} lacks ':'")))?;
                let n: u64 = n.trim().parse().map_err(|_| Error::InvalidDatum(format!("bad index {n:?}")))?;
                Ok((n, GroupWittElement::parse(shape, desc, e)?))
            })
            .collect::<Result<Vec<_>>>()?;
        ReducedCocycle::new(shape, desc, terms)
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn support(&self) -> &BTreeMap<u64, GroupWittElement> {
        &self.support
    }

    pub fn is_unramified(&self) -> bool {
        self.support.keys().all(|&n| n == 0)
    }

    /// Sum of data; `m_0` is renormalized into the transversal.
    pub fn add(&self, other: &ReducedCocycle) -> Result<ReducedCocycle> {
        if self.shape != other.shape || self.desc != other.desc {
            return Err(Error::MixedRings);
        }
        let mut support = self.support.clone();
        for (n, e) in &other.support {
            let s = match support.get(n) {
                Some(a) => a.add(e)?,
                None => e.clone(),
            };
            support.insert(*n, s);
        }
        if let Some(m0) = support.get_mut(&0) {
            *m0 = normalize_m0(m0);
        }
        support.retain(|_, e| !e.is_zero());
        Ok(ReducedCocycle { shape: self.shape.clone(), desc: self.desc.clone(), support })
    }
}

/// The transversal element congruent to `m0` modulo `℘(G ⊗ W(F_q))`.
pub fn normalize_m0(m0: &GroupWittElement) -> GroupWittElement {
    let image: HashSet<GroupWittElement> = all_group_witt_elements(&m0.shape, &m0.desc)
        .iter()
        .map(|x| GroupWittElement {
            shape: x.shape.clone(),
            desc: x.desc.clone(),
            parts: x.parts.iter().map(crate::witt::witt_wp).collect(),
        })
        .collect();
    m0_transversal(&m0.shape, &m0.desc)
        .into_iter()
        .find(|t| image.contains(&m0.add(&t.neg()).unwrap()))
        .expect("transversal covers every coset")
}

/// `#{k ≥ 0 : n p^k < v}`.
pub fn mu(v: u64, n: u64, p: u32) -> u32 {
    let mut k = 0;
    let mut x = n as u128;
    while x < v as u128 {
        k += 1;
        x *= p as u128;
    }
    k
}

/// Contribution `n p^{k-1}` of a coefficient of p-order `k` at index `n`, or `0` when `k = 0`.
fn jump_contribution(n: u64, k: u32, p: u32) -> u64 {
    if k == 0 {
        0
    } else {
        n * (p as u64).pow(k - 1)
    }
}

/// Smallest `v ≥ 0` with `p^{μ_{v+1}(n)} m_n = 0` for all `n ≥ 1`.
///
/// `p^{μ_{v+1}(n)} m_n = 0` means `μ_{v+1}(n) ≥ k_n` for the p-order `k_n`,
/// i.e. `n p^{k_n - 1} ≤ v`, so the minimum is the largest such contribution.
pub fn last_jump(m: &ReducedCocycle) -> u64 {
    m.support
        .iter()
        .filter(|(&n, _)| n > 0)
        .map(|(&n, e)| jump_contribution(n, e.p_order(), m.shape.p))
        .max()
        .unwrap_or(0)
}

/// A subgroup of `G` with its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupWitness {
    shape: GroupShape,
    generators: Vec<Vec<u64>>,
    elements: Vec<Vec<u64>>,
}

impl SubgroupWitness {
    /// The subgroup generated by `generators`.
    pub fn generated_by(shape: &GroupShape, generators: Vec<Vec<u64>>) -> Result<SubgroupWitness> {
        if generators.iter().any(|g| g.len() != shape.rank()) {
            return Err(Error::NotASubgroup);
        }
        let mut members: Vec<u64> = vec![0];
        for g in &generators {
            members = extend_by(shape, &members, g);
        }
        members.sort_unstable();
        Ok(SubgroupWitness {
            shape: shape.clone(),
            generators,
            elements: members.iter().map(|&k| shape.element_at(k)).collect(),
        })
    }

    /// Validates an explicit element list.
    pub fn from_elements(shape: &GroupShape, elements: Vec<Vec<u64>>) -> Result<SubgroupWitness> {
        let set: HashSet<u64> = elements.iter().map(|g| shape.index_of(g)).collect();
        if !set.contains(&0) || elements.iter().any(|g| g.len() != shape.rank()) {
            return Err(Error::NotASubgroup);
        }
        for a in &elements {
            for b in &elements {
                if !set.contains(&shape.index_of(&shape.add(a, b))) {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        let mut idx: Vec<u64> = set.into_iter().collect();
        idx.sort_unstable();
        let elements: Vec<Vec<u64>> = idx.iter().map(|&k| shape.element_at(k)).collect();
        Ok(SubgroupWitness { shape: shape.clone(), generators: elements.clone(), elements })
    }

    pub fn trivial(shape: &GroupShape) -> SubgroupWitness {
        SubgroupWitness { shape: shape.clone(), generators: vec![], elements: vec![vec![0; shape.rank()]] }
    }

    pub fn full(shape: &GroupShape) -> SubgroupWitness {
        SubgroupWitness { shape: shape.clone(), generators: vec![], elements: shape.elements().collect() }
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, g: &[u64]) -> bool {
        self.elements.binary_search_by(|x| x.as_slice().cmp(g)).is_ok()
    }

    fn indices(&self) -> Vec<u64> {
        self.elements.iter().map(|g| self.shape.index_of(g)).collect()
    }

    fn is_closed(&self) -> bool {
        self.contains(&vec![0; self.shape.rank()])
            && self.elements.iter().all(|a| self.elements.iter().all(|b| self.contains(&self.shape.add(a, b))))
    }
}

/// `⟨H, g⟩` for a subgroup `H` given by sorted element indices.
fn extend_by(shape: &GroupShape, members: &[u64], g: &[u64]) -> Vec<u64> {
    let set: HashSet<u64> = members.iter().copied().collect();
    let mut out = members.to_vec();
    let mut cur = g.to_vec();
    while !set.contains(&shape.index_of(&cur)) {
        for &h in members {
            out.push(shape.index_of(&shape.add(&cur, &shape.element_at(h))));
        }
        cur = shape.add(&cur, g);
    }
    out.sort_unstable();
    out
}

/// All subgroups, each once, sorted by `(order, elements)`.
///
/// Every subgroup of a p-group is reached from the trivial one by a chain of
/// index-p extensions `⟨H, g⟩` with `p g ∈ H`, which is the search used here.
pub fn enumerate_subgroups(shape: &GroupShape) -> Result<Vec<SubgroupWitness>> {
    let order = shape.order();
    if order > MAX_SUBGROUP_SCAN {
        return Err(Error::GroupTooLarge { order, bound: MAX_SUBGROUP_SCAN });
    }
    let all: Vec<Vec<u64>> = shape.elements().collect();
    let p_times: Vec<u64> = all
        .iter()
        .map(|g| {
            let mut x = vec![0; shape.rank()];
            for _ in 0..shape.p() {
                x = shape.add(&x, g);
            }
            shape.index_of(&x)
        })
        .collect();
    let mut seen: HashMap<Vec<u64>, Vec<Vec<u64>>> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(vec![0], vec![]);
    queue.push_back(vec![0u64]);
    while let Some(h) = queue.pop_front() {
        let members: HashSet<u64> = h.iter().copied().collect();
        let gens = seen[&h].clone();
        for (k, g) in all.iter().enumerate() {
            if members.contains(&(k as u64)) || !members.contains(&p_times[k]) {
                continue;
            }
            let bigger = extend_by(shape, &h, g);
            if !seen.contains_key(&bigger) {
                let mut gs = gens.clone();
                gs.push(g.clone());
                seen.insert(bigger.clone(), gs);
                queue.push_back(bigger);
            }
        }
    }
    let mut out: Vec<SubgroupWitness> = seen
        .into_iter()
        .map(|(idx, generators)| SubgroupWitness {
            shape: shape.clone(),
            generators,
            elements: idx.iter().map(|&k| shape.element_at(k)).collect(),
        })
        .collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(out)
}

/// The projection `G → G/H` in Smith normal form: `x ↦ (rows · x mod p^{k_j})_j`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    source: GroupShape,
    target: GroupShape,
    rows: Vec<Vec<u64>>,
}

impl QuotientMap {
    pub fn new(h: &SubgroupWitness) -> Result<QuotientMap> {
        let shape = &h.shape;
        let p = shape.p() as u64;
        let r = shape.rank();
        let top = shape.exponents().first().copied().unwrap_or(0);
        let modulus = p.pow(top);
        // Relations over Z/p^M: p^{n_i} e_i and the generators of H.
        let mut rel: Vec<Vec<u64>> = vec![Vec::new(); r];
        for (i, &n) in shape.exponents().iter().enumerate() {
            for (row, slot) in rel.iter_mut().enumerate() {
                slot.push(if row == i { p.pow(n) % modulus } else { 0 });
            }
        }
        for g in &h.elements {
            for (row, slot) in rel.iter_mut().enumerate() {
                slot.push(g[row] % modulus.max(1));
            }
        }
        let (u, diag) = smith_rows(rel, p, top);
        let mut factors: Vec<(u32, Vec<u64>)> = diag
            .into_iter()
            .zip(u)
            .filter(|(e, _)| *e > 0)
            .collect();
        factors.sort_by(|a, b| b.0.cmp(&a.0));
        let target = GroupShape::new(shape.p(), factors.iter().map(|f| f.0).collect())?;
        let rows = factors
            .into_iter()
            .map(|(e, row)| row.into_iter().map(|x| x % p.pow(e)).collect())
            .collect();
        Ok(QuotientMap { source: shape.clone(), target, rows })
    }

    pub fn target(&self) -> &GroupShape {
        &self.target
    }

    pub fn apply(&self, g: &[u64]) -> Vec<u64> {
        let p = self.source.p() as u64;
        self.rows
            .iter()
            .zip(self.target.exponents())
            .map(|(row, &e)| {
                let m = p.pow(e) as u128;
                (row.iter().zip(g).map(|(&a, &x)| a as u128 * x as u128 % m).sum::<u128>() % m) as u64
            })
            .collect()
    }

    /// The induced map on `G ⊗ W(F_q)`.
    ///
    /// An entry `u` from factor `Z/p^n` to `Z/p^k` is reduction followed by `u·` when
    /// `k ≤ n`, and for `k > n` (where `p^{k-n} | u`) it is `(u/p^{k-n}) · p^{k-n} ·` a lift.
    pub fn apply_witt(&self, x: &GroupWittElement) -> GroupWittElement {
        let p = self.source.p() as u64;
        let desc = &x.desc;
        let parts = self
            .rows
            .iter()
            .zip(self.target.exponents())
            .map(|(row, &k)| {
                let k = k as usize;
                let mut acc = WittVector::zero(desc, k);
                for ((&u, part), &n) in row.iter().zip(&x.parts).zip(self.source.exponents()) {
                    if u == 0 || part.is_zero() {
                        continue;
                    }
                    let n = n as usize;
                    let term = if k <= n {
                        part.truncate(k).scalar_mul(u)
                    } else {
                        let shift = p.pow((k - n) as u32);
                        debug_assert_eq!(u % shift, 0);
                        let mut lift = part.pad(k);
                        for _ in n..k {
                            lift = mul_by_p(&lift);
                        }
                        lift.scalar_mul(u / shift)
                    };
                    acc = &acc + &term;
                }
                acc
            })
            .collect();
        GroupWittElement { shape: self.target.clone(), desc: desc.clone(), parts }
    }
}

/// Row-reduces `a` (rows × cols over `Z/p^top`) to Smith form. Returns the row
/// transform `U` and the exponents `e_t` of the diagonal entries `p^{e_t}`
/// (`top` where the diagonal vanishes).
fn smith_rows(mut a: Vec<Vec<u64>>, p: u64, top: u32) -> (Vec<Vec<u64>>, Vec<u32>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let m = p.pow(top);
    let val = |x: u64| -> u32 {
        let mut k = 0;
        let mut x = x;
        while x % p == 0 && k < top {
            x /= p;
            k += 1;
        }
        k
    };
    let mut u: Vec<Vec<u64>> = (0..rows).map(|i| (0..rows).map(|j| (i == j) as u64).collect()).collect();
    let mut diag = vec![top; rows];
    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a[i][j] % m;
                if x != 0 && best.is_none_or(|b| val(x) < b.0) {
                    best = Some((val(x), i, j));
                }
            }
        }
        let Some((e, bi, bj)) = best else { break };
        a.swap(t, bi);
        u.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let pe = p.pow(e);
        let unit = a[t][t] / pe;
        let inv = inverse_mod(unit % m, m);
        for x in a[t].iter_mut().chain(u[t].iter_mut()) {
            *x = (*x as u128 * inv as u128 % m as u128) as u64;
        }
        for i in 0..rows {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let f = a[i][t] / pe;
            for j in 0..cols {
                a[i][j] = (a[i][j] + m - (f as u128 * a[t][j] as u128 % m as u128) as u64) % m;
            }
            for j in 0..rows {
                u[i][j] = (u[i][j] + m - (f as u128 * u[t][j] as u128 % m as u128) as u64) % m;
            }
        }
        diag[t] = e;
    }
    (u, diag)
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m as i128) as u64
}

/// The datum of `Γ_K → G → G/H`, in the Smith decomposition of `G/H`.
pub fn quotient_datum(m: &ReducedCocycle, h: &SubgroupWitness) -> Result<ReducedCocycle> {
    if h.shape != m.shape || !h.is_closed() {
        return Err(Error::NotASubgroup);
    }
    let map = QuotientMap::new(h)?;
    Ok(quotient_with(m, &map))
}

fn quotient_with(m: &ReducedCocycle, map: &QuotientMap) -> ReducedCocycle {
    let support = m
        .support
        .iter()
        .map(|(&n, e)| (n, map.apply_witt(e)))
        .filter(|(_, e)| !e.is_zero())
        .collect();
    ReducedCocycle { shape: map.target.clone(), desc: m.desc.clone(), support }
}

/// Last jumps `t_H` of `m mod H` for every subgroup `H`, in [`enumerate_subgroups`] order.
pub fn quotient_jumps(m: &ReducedCocycle) -> Result<Vec<(SubgroupWitness, u64)>> {
    enumerate_subgroups(&m.shape)?
        .into_iter()
        .map(|h| {
            let map = QuotientMap::new(&h)?;
            let t = last_jump(&quotient_with(m, &map));
            Ok((h, t))
        })
        .collect()
}

fn intersect_where(shape: &GroupShape, jumps: &[(SubgroupWitness, u64)], pred: impl Fn(u64) -> bool) -> Vec<u64> {
    let mut inside = vec![true; shape.order() as usize];
    for (h, t) in jumps {
        if pred(*t) {
            let mut mask = vec![false; inside.len()];
            for k in h.indices() {
                mask[k as usize] = true;
            }
            for (a, b) in inside.iter_mut().zip(mask) {
                *a &= b;
            }
        }
    }
    (0..inside.len() as u64).filter(|&k| inside[k as usize]).collect()
}

/// The image of inertia: the intersection of all `H` with `m mod H` unramified.
pub fn inertia_image(m: &ReducedCocycle) -> Result<SubgroupWitness> {
    let jumps = quotient_jumps(m)?;
    let idx = intersect_where(&m.shape, &jumps, |t| t == 0);
    let elements: Vec<Vec<u64>> = idx.iter().map(|&k| m.shape.element_at(k)).collect();
    SubgroupWitness::from_elements(&m.shape, elements)
}

/// Orders `s(v) = |⋂{H : t_H ≤ v}|` for `v = 0..L`, where `L` is the last jump.
pub fn ramification_filtration(m: &ReducedCocycle) -> Result<Vec<u64>> {
    let jumps = quotient_jumps(m)?;
    let l = last_jump(m);
    (0..=l)
        .map(|v| {
            let idx = intersect_where(&m.shape, &jumps, |t| t <= v);
            let k = SubgroupWitness {
                shape: m.shape.clone(),
                generators: vec![],
                elements: idx.iter().map(|&i| m.shape.element_at(i)).collect(),
            };
            let t_k = last_jump(&quotient_with(m, &QuotientMap::new(&k)?));
            if t_k > v {
                return Err(Error::OutOfSetting(format!("filtration is inconsistent at v = {v}: t = {t_k}")));
            }
            Ok(k.order())
        })
        .collect()
}

/// `|G| [(1 - 1/s_0) + Σ_{v < L} (1 - 1/s_v)]` from the filtration orders `s_0..s_L`.
pub fn discriminant_from_filtration(order: u64, s: &[u64]) -> u64 {
    let l = s.len().saturating_sub(1);
    let term = |x: u64| order - order / x;
    match s.first() {
        None => 0,
        Some(&s0) => term(s0) + s[..l].iter().map(|&x| term(x)).sum::<u64>(),
    }
}

/// Discriminant exponent of the homomorphism with datum `m`.
pub fn discriminant_exponent(m: &ReducedCocycle) -> Result<u64> {
    if m.is_unramified() {
        return Ok(0);
    }
    let s = ramification_filtration(m)?;
    Ok(discriminant_from_filtration(m.shape.order(), &s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    Homomorphisms,
    InertialTypes,
}

/// Indices `1..=v` prime to `p`.
pub fn ramified_indices(v: u64, p: u32) -> Vec<u64> {
    (1..=v).filter(|n| n % p as u64 != 0).collect()
}

/// Exhaustive count of data with support in `{0} ∪ {n ≤ v}` and last jump exactly `v`.
pub fn count_abelian_by_last_jump(shape: &GroupShape, q: u64, v: u64, mode: CountMode, budget: u64) -> Result<BigUint> {
    if v > 64 {
        return Err(Error::OutOfSetting(format!("last jump {v} exceeds 64")));
    }
    let desc = field_of_order(q)?;
    if desc.p() != shape.p() {
        return Err(Error::OutOfSetting(format!("q = {q} is not a power of p = {}", shape.p())));
    }
    for &n in shape.exponents() {
        witt_laws(shape.p(), n as usize)?;
    }
    let indices = ramified_indices(v, shape.p());
    let coeff_count = (q as u128).checked_pow(shape.exponents().iter().sum());
    let m0_count = match mode {
        CountMode::Homomorphisms => shape.order() as u128,
        CountMode::InertialTypes => 1,
    };
    let needed = coeff_count
        .and_then(|c| c.checked_pow(indices.len() as u32))
        .and_then(|c| c.checked_mul(m0_count))
        .unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let orders: Vec<u32> = all_group_witt_elements(shape, &desc).iter().map(GroupWittElement::p_order).collect();
    let contrib: Vec<Vec<u64>> = indices
        .iter()
        .map(|&n| orders.iter().map(|&k| jump_contribution(n, k, shape.p())).collect())
        .collect();
    let m0s: Vec<GroupWittElement> = match mode {
        CountMode::Homomorphisms => m0_transversal(shape, &desc),
        CountMode::InertialTypes => vec![GroupWittElement::zero(shape, &desc)],
    };

    fn walk(contrib: &[Vec<u64>], slot: usize, cur: u64, v: u64) -> u64 {
        if cur > v {
            return 0;
        }
        match contrib.get(slot) {
            None => (cur == v) as u64,
            Some(row) => row.iter().map(|&c| walk(contrib, slot + 1, cur.max(c), v)).sum(),
        }
    }

    let per_m0 = |_: &GroupWittElement| -> u64 {
        match contrib.first() {
            None => (v == 0) as u64,
            Some(first) => first.par_iter().map(|&c| walk(&contrib, 1, c, v)).sum(),
        }
    };
    Ok(BigUint::from(m0s.iter().map(per_m0).sum::<u64>()))
}
