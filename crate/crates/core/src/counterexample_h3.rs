//! Discriminant-exponent counts for the Heisenberg group `H_3(F_p)`, `p` odd, ramified at a
//! single place of degree `p` of `F_q(T)`.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;

use crate::asw_abelian::{
    all_group_witt_elements, discriminant_exponent, discriminant_from_filtration, inertia_image, last_jump,
    m0_transversal, GroupShape, GroupWittElement, ReducedCocycle, SubgroupWitness,
};
use crate::error::{Error, Result};
use crate::gf::{field_of_order, is_prime, prime_power};
use crate::witt::teichmueller;

/// Default bound on `p^r q^{pr}` for [`lemma63_count`] in brute-force mode.
pub const LEMMA63_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma63Mode {
    ClosedForm,
    Bruteforce,
}

fn check_setting(p: u32, q: u64) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::NonPrime(p as u64));
    }
    if p == 2 {
        return Err(Error::OutOfSetting("the Heisenberg counterexample needs p odd".into()));
    }
    match prime_power(q) {
        Some((r, _)) if r == p => Ok(()),
        _ => Err(Error::OutOfSetting(format!("q = {q} is not a power of p = {p}"))),
    }
}

/// `q^p - 1`.
fn units_at_place(p: u32, q: u64) -> BigUint {
    BigUint::from(q).pow(p) - 1u32
}

/// Homomorphisms to `A = F_p^r` with inertia exactly `B = ⟨e_1⟩` and last jump 1, over a
/// local field with residue field `F_{q^p}`.
pub fn lemma63_count(p: u32, q: u64, r: usize, mode: Lemma63Mode, budget: u64) -> Result<BigUint> {
    check_setting(p, q)?;
    if r == 0 {
        return Err(Error::UnsupportedShape("A must contain a subgroup of order p".into()));
    }
    match mode {
        Lemma63Mode::ClosedForm => Ok(BigUint::from(p).pow(r as u32) * units_at_place(p, q)),
        Lemma63Mode::Bruteforce => {
            let qp = (q as u128).checked_pow(p).filter(|&x| x <= u64::MAX as u128);
            let needed = qp
                .and_then(|x| x.checked_pow(r as u32))
                .and_then(|x| x.checked_mul((p as u128).pow(r as u32)))
                .unwrap_or(u128::MAX);
            if needed > budget as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let residue = field_of_order(qp.unwrap() as u64)?;
            let shape = GroupShape::elementary(p, r)?;
            let mut e1 = vec![0; r];
            e1[0] = 1;
            let b = SubgroupWitness::generated_by(&shape, vec![e1])?;
            // A nonzero coefficient at an index n ≥ 2 already forces last jump ≥ 2.
            let m1s = all_group_witt_elements(&shape, &residue);
            let m0s = m0_transversal(&shape, &residue);
            let mut count = 0u64;
            for m1 in &m1s {
                let ramified = ReducedCocycle::new(&shape, &residue, [(1, m1.clone())])?;
                if last_jump(&ramified) != 1 {
                    continue;
                }
                for m0 in &m0s {
                    let m = ReducedCocycle::new(&shape, &residue, [(0, m0.clone()), (1, m1.clone())])?;
                    if last_jump(&m) == 1 && inertia_image(&m)?.elements() == b.elements() {
                        count += 1;
                    }
                }
            }
            Ok(BigUint::from(count))
        }
    }
}

/// An element `(a, b, c)` of `H_3(F_p)`, the matrix `(1 a c; 1 b; 1)`.
pub type H3Element = [u32; 3];

pub fn h3_mul(p: u32, x: H3Element, y: H3Element) -> H3Element {
    [(x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p]
}

/// Subgroups of order `p` of `H_3(F_p)` other than the center, as sorted element lists.
pub fn h3_noncentral_order_p_subgroups(p: u32) -> Vec<Vec<H3Element>> {
    let mut out: Vec<Vec<H3Element>> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                if a == 0 && b == 0 {
                    continue;
                }
                let g = [a, b, c];
                let mut sub = vec![[0, 0, 0]];
                let mut x = g;
                while x != [0, 0, 0] {
                    sub.push(x);
                    x = h3_mul(p, x, g);
                }
                sub.sort_unstable();
                if !out.contains(&sub) {
                    out.push(sub);
                }
            }
        }
    }
    out
}

/// Lines of `F_p^2`: `[1:k]` for `k = 0..p-1`, then `[0:1]`.
pub fn projective_line(p: u32) -> Vec<[u32; 2]> {
    (0..p).map(|k| [1, k]).chain(std::iter::once([0, 1])).collect()
}

fn on_line(line: [u32; 2], v: [u32; 2], p: u32) -> bool {
    (line[0] * v[1] + p * p - line[1] * v[0]) % p == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseCount {
    pub case: String,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub count: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub p: u32,
    pub q: u64,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub local_count: BigUint,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub global_count: BigUint,
    pub local_breakdown: Vec<CaseCount>,
    pub global_breakdown: Vec<CaseCount>,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub discrepancy_ratio: Ratio<BigUint>,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub local_closed_form: BigUint,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub global_closed_form: BigUint,
}

impl CounterexampleReport {
    pub fn consistent(&self) -> bool {
        let sum = |b: &[CaseCount]| b.iter().map(|c| &c.count).sum::<BigUint>();
        sum(&self.local_breakdown) == self.local_count
            && sum(&self.global_breakdown) == self.global_count
            && self.local_count == self.local_closed_form
            && self.global_count == self.global_closed_form
            && !self.discrepancy_ratio.is_one()
    }
}

fn line_label(l: [u32; 2]) -> String {
    format!("line[{}:{}]", l[0], l[1])
}

/// Subgroups `I ≠ N` of order `p` with `π(I) = L`, counted per line.
fn subgroups_over_lines(p: u32) -> Vec<([u32; 2], u64)> {
    let subs = h3_noncentral_order_p_subgroups(p);
    projective_line(p)
        .into_iter()
        .map(|l| {
            let n = subs
                .iter()
                .filter(|s| s.iter().all(|x| on_line(l, [x[0], x[1]], p)))
                .count() as u64;
            (l, n)
        })
        .collect()
}

/// Local count with discriminant exponent `2p^2(p-1)`, case by case.
pub fn prop62_local(p: u32, q: u64) -> Result<(BigUint, Vec<CaseCount>)> {
    check_setting(p, q)?;
    let p_big = BigUint::from(p);
    let center = p_big.pow(2) * lemma63_count(p, q, 1, Lemma63Mode::ClosedForm, 0)?;
    let mut breakdown = vec![CaseCount { case: "center_inertia".into(), count: center }];
    let per_subgroup = lemma63_count(p, q, 2, Lemma63Mode::ClosedForm, 0)?;
    for (l, n) in subgroups_over_lines(p) {
        breakdown.push(CaseCount { case: line_label(l), count: BigUint::from(n) * &per_subgroup });
    }
    let total = breakdown.iter().map(|c| &c.count).sum();
    Ok((total, breakdown))
}

/// Global count (unramified outside the degree-`p` place), case by case.
pub fn prop62_global(p: u32, q: u64) -> Result<(BigUint, Vec<CaseCount>)> {
    check_setting(p, q)?;
    let p_big = BigUint::from(p);
    let center = p_big.pow(2) * lemma63_count(p, q, 1, Lemma63Mode::ClosedForm, 0)?;
    let mut breakdown = vec![CaseCount { case: "center_inertia".into(), count: center }];
    // p^2 (q^p - 1) reductions to Q with inertia L, each with |N| · 1 admissible central twists.
    let reductions = lemma63_count(p, q, 2, Lemma63Mode::ClosedForm, 0)?;
    let twists = &p_big * BigUint::one();
    for (l, n) in subgroups_over_lines(p) {
        breakdown.push(CaseCount { case: line_label(l), count: BigUint::from(n) * &reductions * &twists });
    }
    let total = breakdown.iter().map(|c| &c.count).sum();
    Ok((total, breakdown))
}

pub fn counterexample(p: u32, q: u64) -> Result<CounterexampleReport> {
    let (local_count, local_breakdown) = prop62_local(p, q)?;
    let (global_count, global_breakdown) = prop62_global(p, q)?;
    let pb = BigUint::from(p);
    let u = units_at_place(p, q);
    let local_closed_form = pb.pow(3) * (&pb + 2u32) * &u;
    let global_closed_form = pb.pow(3) * (&pb * &pb + &pb + 1u32) * &u;
    let discrepancy_ratio = Ratio::new(global_count.clone(), local_count.clone());
    Ok(CounterexampleReport {
        p,
        q,
        local_count,
        global_count,
        local_breakdown,
        global_breakdown,
        discrepancy_ratio,
        local_closed_form,
        global_closed_form,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateReport {
    pub p: u32,
    pub q: u64,
    /// `|G| [(1 - 1/s_0) + (1 - 1/s_0)]` with `s_0 = p`, `L = 1`, `|G| = p^3`.
    pub interval_value: u64,
    pub closed_form: u64,
    /// `p^2 ·` the discriminant exponent of a `Z/p` datum with last jump 1.
    pub cyclic_route: u64,
    /// Subgroup-scan discriminant of a `(Z/p)^3` datum with inertia of order `p` and last jump 1.
    pub abelian_witness: Option<u64>,
    /// No filtration with `s_0 ≥ p`, `L ≥ 1` gives a smaller value.
    pub is_minimal: bool,
    pub in_setting: bool,
    pub holds: bool,
}

/// Checks the smallest ramified discriminant exponent `2p^2(p-1)` for `|G| = p^3`.
pub fn discriminant_gate_check(p: u32, q: u64) -> Result<GateReport> {
    if !is_prime(p as u64) {
        return Err(Error::NonPrime(p as u64));
    }
    if prime_power(q).map(|x| x.0) != Some(p) {
        return Err(Error::OutOfSetting(format!("q = {q} is not a power of p = {p}")));
    }
    let pp = p as u64;
    let order = pp.pow(3);
    let interval_value = discriminant_from_filtration(order, &[pp, 1]);
    let closed_form = 2 * pp * pp * (pp - 1);

    let desc = field_of_order(q)?;
    let cyc = GroupShape::cyclic(p, 1)?;
    let m = ReducedCocycle::new(&cyc, &desc, [(1, GroupWittElement::new(&cyc, vec![teichmueller(&desc.one(), 1)])?)])?;
    let cyclic_route = pp * pp * discriminant_exponent(&m)?;

    let abelian_witness = if order <= crate::asw_abelian::MAX_SUBGROUP_SCAN {
        let g = GroupShape::elementary(p, 3)?;
        let mut parts = vec![teichmueller(&desc.one(), 1)];
        parts.extend((0..2).map(|_| teichmueller(&desc.zero(), 1)));
        let m = ReducedCocycle::new(&g, &desc, [(1, GroupWittElement::new(&g, parts)?)])?;
        Some(discriminant_exponent(&m)?)
    } else {
        None
    };

    // Filtrations s_0 ≥ s_1 ≥ … ≥ s_{L-1} > s_L = 1 over divisors of p^3, L ≤ 4.
    let divisors = [pp, pp * pp, order];
    let mut smallest = u64::MAX;
    let mut stack: Vec<Vec<u64>> = divisors.iter().map(|&d| vec![d]).collect();
    while let Some(s) = stack.pop() {
        let mut full = s.clone();
        full.push(1);
        smallest = smallest.min(discriminant_from_filtration(order, &full));
        if s.len() < 4 {
            for &d in divisors.iter().filter(|&&d| d <= *s.last().unwrap()) {
                let mut t = s.clone();
                t.push(d);
                stack.push(t);
            }
        }
    }
    let is_minimal = smallest == interval_value;
    let holds = interval_value == closed_form
        && cyclic_route == closed_form
        && abelian_witness.is_none_or(|w| w == closed_form)
        && is_minimal;
    Ok(GateReport {
        p,
        q,
        interval_value,
        closed_form,
        cyclic_route,
        abelian_witness,
        is_minimal,
        in_setting: p != 2,
        holds,
    })
}
