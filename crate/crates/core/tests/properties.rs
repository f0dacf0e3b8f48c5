use num_bigint::BigUint;
use num_rational::Ratio;
use proptest::prelude::*;

use lastjump_core::asw_abelian::{
    count_abelian_by_last_jump, enumerate_subgroups, last_jump, quotient_datum, CountMode, GroupShape, GroupWittElement,
    ReducedCocycle, DEFAULT_BUDGET,
};
use lastjump_core::counterexample_h3::counterexample;
use lastjump_core::d4_heisenberg::{imai_formula, minlift_d4, reduction_cocycle, w, SparseTPoly};
use lastjump_core::gf::{embed, frobenius, make_field, wp, FieldDescriptor, FieldElement};
use lastjump_core::global_euler::global_series;
use lastjump_core::witt::{mul_by_p, teichmueller, witt_sigma, WittVector};

/// `(p, degree)` of fields too large for exhaustive checks.
const LARGE: [(u64, usize); 5] = [(2, 7), (2, 10), (3, 5), (5, 3), (7, 3)];

fn elem(desc: &FieldDescriptor, seed: &[u64]) -> FieldElement {
    desc.from_coeffs(&seed[..desc.degree()])
}

fn coeffs() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, 12)
}

fn witt(desc: &FieldDescriptor, n: usize, seed: &[u64]) -> WittVector {
    let d = desc.degree();
    WittVector::new((0..n).map(|k| desc.from_coeffs(&seed[k * d..(k + 1) * d])).collect()).unwrap()
}

fn t_poly(desc: &FieldDescriptor, seed: &[u64], max_exp: u64) -> SparseTPoly {
    let terms = (0..=max_exp).filter(|e| *e == 0 || e % 2 == 1).map(|e| (e, desc.element_at(seed[e as usize] % desc.order().unwrap())));
    SparseTPoly::new(desc, terms).unwrap().canonical()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_is_a_ring_map_on_large_fields(i in 0..LARGE.len(), a in coeffs(), b in coeffs()) {
        let desc = make_field(LARGE[i].0, LARGE[i].1).unwrap();
        let (a, b) = (elem(&desc, &a), elem(&desc, &b));
        prop_assert_eq!(frobenius(&(&a * &b)), &frobenius(&a) * &frobenius(&b));
        prop_assert_eq!(frobenius(&(&a + &b)), &frobenius(&a) + &frobenius(&b));
    }

    #[test]
    fn embed_commutes_with_wp_and_products(i in 0..3usize, a in coeffs(), b in coeffs()) {
        let (p, from, to) = [(2u64, 2usize, 6usize), (3, 1, 4), (2, 3, 9)][i];
        let (small, big) = (make_field(p, from).unwrap(), make_field(p, to).unwrap());
        let (a, b) = (elem(&small, &a), elem(&small, &b));
        let e = |x: &FieldElement| embed(x, &big).unwrap();
        prop_assert_eq!(e(&wp(&a)), wp(&e(&a)));
        prop_assert_eq!(e(&(&a * &b)), &e(&a) * &e(&b));
        prop_assert_eq!(a == b, e(&a) == e(&b));
    }

    #[test]
    fn witt_ring_axioms_on_random_samples(i in 0..4usize, x in prop::collection::vec(0u64..1000, 24), y in prop::collection::vec(0u64..1000, 24), z in prop::collection::vec(0u64..1000, 24)) {
        let (p, deg, n) = [(2u64, 3usize, 3usize), (3, 2, 3), (5, 1, 3), (2, 4, 4)][i];
        let desc = make_field(p, deg).unwrap();
        let (a, b, c) = (witt(&desc, n, &x), witt(&desc, n, &y), witt(&desc, n, &z));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&(&a - &b) + &b) == a);
        prop_assert_eq!(witt_sigma(&(&a + &b)), &witt_sigma(&a) + &witt_sigma(&b));
        prop_assert_eq!(mul_by_p(&a), a.scalar_mul(p));
    }

    #[test]
    fn teichmueller_is_multiplicative(i in 0..LARGE.len(), a in coeffs(), b in coeffs()) {
        let desc = make_field(LARGE[i].0, LARGE[i].1.min(4)).unwrap();
        let (a, b) = (elem(&desc, &a), elem(&desc, &b));
        prop_assert_eq!(teichmueller(&(&a * &b), 2), &teichmueller(&a, 2) * &teichmueller(&b, 2));
    }

    #[test]
    fn elementary_last_jumps_avoid_multiples_of_p(p in prop::sample::select(vec![2u32, 3]), seed in prop::collection::vec(0u64..1000, 16)) {
        let desc = make_field(p as u64, 2).unwrap();
        let shape = GroupShape::elementary(p, 2).unwrap();
        let terms: Vec<_> = [1u64, 2, 4, 5, 7]
            .into_iter()
            .filter(|n| n % p as u64 != 0)
            .enumerate()
            .map(|(k, n)| {
                let parts = (0..2).map(|j| teichmueller(&desc.element_at(seed[2 * k + j] % desc.order().unwrap()), 1)).collect();
                (n, GroupWittElement::new(&shape, parts).unwrap())
            })
            .collect();
        let m = ReducedCocycle::new(&shape, &desc, terms).unwrap();
        let lj = last_jump(&m);
        prop_assert!(lj == 0 || lj % p as u64 != 0);
        for h in enumerate_subgroups(&shape).unwrap() {
            prop_assert!(last_jump(&quotient_datum(&m, &h).unwrap()) <= lj);
        }
    }

    #[test]
    fn homomorphism_count_is_order_times_types(e in prop::sample::select(vec![vec![1u32], vec![2], vec![1, 1], vec![2, 1]]), q in prop::sample::select(vec![2u64, 4]), v in 0u64..5) {
        let shape = GroupShape::new(2, e).unwrap();
        if shape.order() * q.pow(3) > 1 << 12 {
            return Ok(());
        }
        let hom = count_abelian_by_last_jump(&shape, q, v, CountMode::Homomorphisms, DEFAULT_BUDGET).unwrap();
        let types = count_abelian_by_last_jump(&shape, q, v, CountMode::InertialTypes, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(hom, types * BigUint::from(shape.order()));
    }

    #[test]
    fn minlift_bounds_abelian_last_jump(q in prop::sample::select(vec![2u64, 4]), sa in prop::collection::vec(0u64..1000, 6), sc in prop::collection::vec(0u64..1000, 6)) {
        let desc = make_field(2, if q == 2 { 1 } else { 2 }).unwrap();
        let (a, c) = (t_poly(&desc, &sa, 5), t_poly(&desc, &sc, 5));
        let m = reduction_cocycle(&a, &c).unwrap();
        prop_assert!(minlift_d4(&a, &c) >= last_jump(&m));
    }

    #[test]
    fn imai_jumps_have_power_of_two_denominators(sa in prop::collection::vec(0u64..2, 6), sb in prop::collection::vec(0u64..2, 6), sc in prop::collection::vec(0u64..2, 6)) {
        let desc = make_field(2, 1).unwrap();
        let (a, b, c) = (t_poly(&desc, &sa, 5), t_poly(&desc, &sb, 5), t_poly(&desc, &sc, 5));
        let j = imai_formula(&a, &c, &b);
        prop_assert!(j.denom().is_power_of_two());
        prop_assert!(j >= Ratio::from_integer(w(&a).max(w(&c))));
    }
}

#[test]
fn discrepancy_ratio_exceeds_one() {
    for p in [3u32, 5, 7] {
        let r = counterexample(p, p as u64).unwrap();
        let p = BigUint::from(p);
        assert_eq!(r.discrepancy_ratio, Ratio::new(&p * &p + &p + 1u32, &p + 2u32));
        assert!(r.discrepancy_ratio > Ratio::from_integer(BigUint::from(1u32)));
    }
}

#[test]
fn series_coefficients_dominate_in_q() {
    let (a, b) = (global_series(2, 10).unwrap(), global_series(4, 10).unwrap());
    assert!((0..=10).all(|x| a.coefficient(x) <= b.coefficient(x)));
}
