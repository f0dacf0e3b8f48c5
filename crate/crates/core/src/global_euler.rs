//! Euler products over the places of `F_q(T)` for counts ordered by total last jump.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::asw_abelian::{count_abelian_by_last_jump, CountMode, GroupShape};
use crate::d4_heisenberg::local_a;
use crate::error::{Error, Result};

pub const MAX_CENSUS_DEGREE: usize = 32;
pub const MAX_SERIES_X: usize = 24;
pub const MAX_ORACLE_X: usize = 8;
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 30;

/// Number of places of `F_q(T)` of each degree `1..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaceCensus {
    pub q: u64,
    pub max_degree: usize,
    #[serde(serialize_with = "crate::serde_str::map_values")]
    pub counts: BTreeMap<usize, BigUint>,
}

fn mobius(mut n: usize) -> i32 {
    let mut m = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            m = -m;
        }
        d += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Monic irreducibles of each degree, plus the infinite place in degree 1.
pub fn place_census(q: u64, max_degree: usize) -> Result<PlaceCensus> {
    if max_degree > MAX_CENSUS_DEGREE {
        return Err(Error::TruncationTooLarge { x: max_degree, max: MAX_CENSUS_DEGREE });
    }
    if crate::gf::prime_power(q).is_none() {
        return Err(Error::OutOfSetting(format!("{q} is not a prime power")));
    }
    let qb = BigUint::from(q);
    let mut counts = BTreeMap::new();
    for d in 1..=max_degree {
        let (mut plus, mut minus) = (BigUint::zero(), BigUint::zero());
        for e in (1..=d).filter(|e| d % e == 0) {
            match mobius(d / e) {
                1 => plus += qb.pow(e as u32),
                -1 => minus += qb.pow(e as u32),
                _ => {}
            }
        }
        let (n, r) = (plus - minus).div_rem(&BigUint::from(d));
        assert!(r.is_zero());
        counts.insert(d, if d == 1 { n + 1u32 } else { n });
    }
    let census = PlaceCensus { q, max_degree, counts };
    assert!(census.self_check());
    Ok(census)
}

impl PlaceCensus {
    /// `Σ_{d | m} d π(d) = q^m + 1` for every `m ≤ max_degree`.
    pub fn self_check(&self) -> bool {
        let qb = BigUint::from(self.q);
        (1..=self.max_degree).all(|m| {
            let lhs: BigUint = (1..=m).filter(|d| m % d == 0).map(|d| BigUint::from(d) * &self.counts[&d]).sum();
            lhs == qb.pow(m as u32) + 1u32 && self.counts.values().all(|c| !c.is_zero())
        })
    }
}

/// Power series in `x` truncated after `x^X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub truncation: usize,
    pub coefficients: Vec<BigUint>,
}

impl Serialize for CountSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CountSeries", 2)?;
        st.serialize_field("truncation", &self.truncation)?;
        st.serialize_field("coefficients", &self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>())?;
        st.end()
    }
}

impl CountSeries {
    pub fn one(x: usize) -> CountSeries {
        let mut coefficients = vec![BigUint::zero(); x + 1];
        coefficients[0] = BigUint::one();
        CountSeries { truncation: x, coefficients }
    }

    pub fn coefficient(&self, k: usize) -> &BigUint {
        &self.coefficients[k]
    }

    pub fn mul(&self, other: &CountSeries) -> CountSeries {
        let x = self.truncation.min(other.truncation);
        let mut out = vec![BigUint::zero(); x + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(x + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(x + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        CountSeries { truncation: x, coefficients: out }
    }

    pub fn pow(&self, e: &BigUint) -> CountSeries {
        let mut acc = CountSeries::one(self.truncation);
        let mut base = self.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&base);
            }
            if i + 1 < bits {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// `Σ_v local_a(q^d, v) x^{d v}` truncated at `x^X`.
pub fn local_factor(q: u64, d: usize, x: usize) -> CountSeries {
    let qd = BigUint::from(q).pow(d as u32);
    let mut s = CountSeries { truncation: x, coefficients: vec![BigUint::zero(); x + 1] };
    for v in 0..=x / d {
        s.coefficients[d * v] = local_a(&qd, v as u64);
    }
    s
}

fn check_x(x: usize, max: usize) -> Result<()> {
    if x > max {
        return Err(Error::TruncationTooLarge { x, max });
    }
    Ok(())
}

fn euler_product(census: &PlaceCensus, x: usize, factor: impl Fn(usize) -> Result<CountSeries>) -> Result<CountSeries> {
    let mut acc = CountSeries::one(x);
    for d in 1..=x {
        acc = acc.mul(&factor(d)?.pow(&census.counts[&d]));
    }
    Ok(acc)
}

/// `∏_d local_factor(q, d, X)^{π(d)}`; the coefficient of `x^X` is `N(X)/8` for `D_4`.
pub fn global_series(q: u64, x: usize) -> Result<CountSeries> {
    check_x(x, MAX_SERIES_X)?;
    if q % 2 != 0 {
        return Err(Error::OutOfSetting(format!("D4 counts need q even, got {q}")));
    }
    let census = place_census(q, x.max(1))?;
    euler_product(&census, x, |d| Ok(local_factor(q, d, x)))
}

/// Sums `∏_𝔭 a(q^{deg 𝔭}, v_𝔭)` over explicit tuples with `Σ deg 𝔭 · v_𝔭 = X`.
pub fn convolution_oracle_with(
    q: u64,
    x: usize,
    budget: u64,
    a: impl Fn(usize, usize) -> Result<BigUint>,
) -> Result<BigUint> {
    check_x(x, MAX_ORACLE_X)?;
    if x == 0 {
        return Ok(BigUint::one());
    }
    let census = place_census(q, x)?;
    let mut degrees: Vec<usize> = Vec::new();
    for (&d, n) in &census.counts {
        let n = n.to_usize().filter(|&n| n <= 1 << 20).ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
        degrees.extend(std::iter::repeat_n(d, n));
    }
    let mut table: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
    for d in 1..=x {
        for v in 0..=x / d {
            table.insert((d, v), a(d, v)?);
        }
    }
    struct Walk<'a> {
        degrees: &'a [usize],
        table: &'a BTreeMap<(usize, usize), BigUint>,
        visited: u64,
        budget: u64,
    }
    impl Walk<'_> {
        fn go(&mut self, i: usize, remaining: usize) -> Result<BigUint> {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded { needed: self.visited as u128, budget: self.budget });
            }
            if remaining == 0 {
                return Ok(BigUint::one());
            }
            let Some(&d) = self.degrees.get(i) else { return Ok(BigUint::zero()) };
            if d > remaining {
                return Ok(BigUint::zero());
            }
            let mut total = BigUint::zero();
            for v in 0..=remaining / d {
                let w = &self.table[&(d, v)];
                if !w.is_zero() {
                    total += w * self.go(i + 1, remaining - d * v)?;
                }
            }
            Ok(total)
        }
    }
    Walk { degrees: &degrees, table: &table, visited: 0, budget }.go(0, x)
}

/// [`convolution_oracle_with`] for the `D_4` local numbers.
pub fn convolution_oracle(q: u64, x: usize, budget: u64) -> Result<BigUint> {
    convolution_oracle_with(q, x, budget, |d, v| Ok(local_a(&BigUint::from(q).pow(d as u32), v as u64)))
}

/// Local inertial-type counts `count(G, q^d, v) / |G|`.
fn abelian_local(shape: &GroupShape, q: u64, d: usize, v: usize) -> Result<BigUint> {
    let qd = q.checked_pow(d as u32).ok_or_else(|| Error::OutOfSetting(format!("{q}^{d} overflows")))?;
    let hom = count_abelian_by_last_jump(shape, qd, v as u64, CountMode::Homomorphisms, crate::asw_abelian::DEFAULT_BUDGET)?;
    let (quo, rem) = hom.div_rem(&BigUint::from(shape.order()));
    assert!(rem.is_zero());
    Ok(quo)
}

/// The Euler product with abelian local factors.
pub fn abelian_global_series(shape: &GroupShape, q: u64, x: usize) -> Result<CountSeries> {
    check_x(x, MAX_SERIES_X)?;
    let census = place_census(q, x.max(1))?;
    euler_product(&census, x, |d| {
        let mut s = CountSeries { truncation: x, coefficients: vec![BigUint::zero(); x + 1] };
        for v in 0..=x / d {
            s.coefficients[d * v] = abelian_local(shape, q, d, v)?;
        }
        Ok(s)
    })
}

pub fn abelian_convolution_oracle(shape: &GroupShape, q: u64, x: usize, budget: u64) -> Result<BigUint> {
    convolution_oracle_with(q, x, budget, |d, v| abelian_local(shape, q, d, v))
}

pub fn ratio_to_f64(r: &Ratio<BigUint>) -> f64 {
    // Scale to keep 53 bits of the quotient.
    let shift = r.denom().bits() as i64 - r.numer().bits() as i64 + 64;
    let scaled = if shift >= 0 { (r.numer() << shift as u64) / r.denom() } else { (r.numer() >> (-shift) as u64) / r.denom() };
    scaled.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub x: usize,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub n: BigUint,
    #[serde(serialize_with = "crate::serde_str::display")]
    pub r: Ratio<BigUint>,
    pub r_approx: f64,
    /// `|r(X) - r(X-1)| / r(X)`, absent at `X = 1`.
    #[serde(serialize_with = "crate::serde_str::opt_display")]
    pub relative_change: Option<Ratio<BigUint>>,
    pub relative_change_approx: Option<f64>,
}

/// `r(X) = N(X) / (q^{3X} X)` with `N(X) = 8 ·` the series coefficient.
pub fn growth_diagnostic(q: u64, x_max: usize) -> Result<Vec<GrowthRow>> {
    let series = global_series(q, x_max)?;
    let qb = BigUint::from(q);
    let mut rows: Vec<GrowthRow> = Vec::new();
    for x in 1..=x_max {
        let n = series.coefficient(x) * 8u32;
        debug_assert!((&n % 8u32).is_zero());
        let r = Ratio::new(n.clone(), qb.pow(3 * x as u32) * BigUint::from(x));
        let relative_change = rows.last().map(|prev| {
            let diff = if r >= prev.r { &r - &prev.r } else { &prev.r - &r };
            diff / &r
        });
        rows.push(GrowthRow {
            x,
            n,
            r_approx: ratio_to_f64(&r),
            relative_change_approx: relative_change.as_ref().map(ratio_to_f64),
            r,
            relative_change,
        });
    }
    Ok(rows)
}
