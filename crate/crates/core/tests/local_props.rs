//! Property suites for the local arithmetic layer: exact ring axioms on
//! random digit data, the precision contract under re-running at higher
//! precision, and the subgroup property of the Iwahori membership test.

mod common;

use padicl_core::local::{random_integral, LocalElem, LocalMatrix, LocalRingDesc, Val};
use rand::Rng;

#[test]
fn ring_axioms_on_random_triples() {
    let mut rng = common::rng(1001);
    let mut checked = 0u64;
    for p in [2u64, 3, 5] {
        for f in [1u32, 2] {
            for n in [4u32, 8, 12] {
                let ring = LocalRingDesc::new(p, f, n).unwrap();
                for _ in 0..10_000 / 18 + 1 {
                    let a = random_integral(&ring, &mut rng);
                    let b = random_integral(&ring, &mut rng);
                    let c = random_integral(&ring, &mut rng);
                    // commutativity and associativity at shared precision
                    assert!(a.add(&b).indistinguishable(&b.add(&a)));
                    assert!(a
                        .mul(&b)
                        .unwrap()
                        .indistinguishable(&b.mul(&a).unwrap()));
                    assert!(a
                        .add(&b)
                        .add(&c)
                        .indistinguishable(&a.add(&b.add(&c))));
                    assert!(a
                        .mul(&b)
                        .unwrap()
                        .mul(&c)
                        .unwrap()
                        .indistinguishable(&a.mul(&b.mul(&c).unwrap()).unwrap()));
                    // distributivity
                    let lhs = a.mul(&b.add(&c)).unwrap();
                    let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap());
                    assert!(lhs.indistinguishable(&rhs));
                    // additive inverse
                    assert!(a.sub(&a).is_apparent_zero() || a.sub(&a).is_exact_zero());
                    checked += 3;
                }
            }
        }
    }
    assert!(checked >= 10_000, "at least 10^4 random triples");
}

#[test]
fn valuation_multiplicativity_and_ultrametric() {
    let mut rng = common::rng(1002);
    let ring = LocalRingDesc::new(3, 2, 10).unwrap();
    for _ in 0..500 {
        let a = random_integral(&ring, &mut rng).shift(rng.gen_range(-3..4));
        let b = random_integral(&ring, &mut rng).shift(rng.gen_range(-3..4));
        let (Ok(va), Ok(vb)) = (a.valuation(), b.valuation()) else {
            continue;
        };
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.valuation().unwrap(), va + vb);
        let sum = a.add(&b);
        let min = va.min(vb);
        match sum.val_lower_bound() {
            Val::Infinite => {}
            Val::Finite(vs) => assert!(Val::Finite(vs) >= min),
        }
    }
}

#[test]
fn precision_contract_truncation() {
    // re-running at N + 4 and truncating reproduces the N-result
    // digit-for-digit, for a compound expression
    let mut rng = common::rng(1003);
    for p in [2u64, 3, 5] {
        let lo = LocalRingDesc::new(p, 1, 8).unwrap();
        let hi = LocalRingDesc::new(p, 1, 12).unwrap();
        for _ in 0..300 {
            let xs: Vec<i64> = (0..4).map(|_| rng.gen_range(-2000..2000)).collect();
            let compute = |ring: &padicl_core::local::LocalRing| -> LocalElem {
                let a = LocalElem::from_integer(ring, xs[0]);
                let b = LocalElem::from_integer(ring, xs[1]);
                let c = LocalElem::from_integer(ring, xs[2]);
                let d = LocalElem::from_integer(ring, xs[3]);
                // (a b + c)(d - a) + b
                let t = a.mul(&b).unwrap().add(&c);
                t.mul(&d.sub(&a)).unwrap().add(&b)
            };
            let at_lo = compute(&lo);
            let at_hi = compute(&hi);
            let hi_trunc = at_hi.truncate_abs(match at_lo.abs_precision() {
                Val::Finite(a) => a,
                Val::Infinite => continue,
            });
            assert!(
                at_lo.indistinguishable(&hi_trunc),
                "truncation mismatch for {xs:?}: {at_lo} vs {hi_trunc}"
            );
            // digits agree literally on the shared window
            if !at_lo.is_apparent_zero() && !hi_trunc.is_apparent_zero() {
                assert_eq!(at_lo.digits(), hi_trunc.digits(), "inputs {xs:?}");
            }
        }
    }
}

#[test]
fn iwahori_membership_is_a_subgroup() {
    let mut rng = common::rng(1004);
    for (p, f) in [(2u64, 1u32), (3, 1), (3, 2)] {
        let ring = LocalRingDesc::new(p, f, 10).unwrap();
        for m in [1u32, 2] {
            for _ in 0..60 {
                let a = LocalMatrix::random_iwahori(&ring, 3, m, &mut rng);
                let b = LocalMatrix::random_iwahori(&ring, 3, m, &mut rng);
                assert!(a.iwahori_member(m).unwrap());
                assert!(b.iwahori_member(m).unwrap());
                assert!(a.mul(&b).iwahori_member(m).unwrap(), "closed under product");
                assert!(a.invert().unwrap().iwahori_member(m).unwrap(), "closed under inverse");
            }
        }
    }
}

#[test]
fn json_schema_round_trip_random() {
    let mut rng = common::rng(1005);
    let ring = LocalRingDesc::new(3, 2, 6).unwrap();
    for _ in 0..100 {
        let x = random_integral(&ring, &mut rng).shift(rng.gen_range(-2..3));
        let v = serde_json::to_value(&x).unwrap();
        let y = LocalElem::from_json(&v).unwrap();
        assert_eq!(x, y);
    }
}
