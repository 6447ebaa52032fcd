//! Cross-module property suites: coset dependence of the factorization
//! determinant, the tensor-factor commutation of the product operator on
//! a toy module, the lattice bound behind the integral normalization, and
//! measure invariants not already in the acceptance gate.

mod common;

use std::collections::BTreeMap;

use padicl_core::exact::{q_int, Q};
use padicl_core::hecke::{
    decompose_v, decompose_v_prime, hida_normalization_valuation, weight_char_valuation,
};
use padicl_core::local::{LocalMatrix, LocalRingDesc};
use padicl_core::magic::{magic_factor, unipotent_coset_reps, MagicContext};
use padicl_core::measure::{
    build_distribution, integrate_character, total_mass, units_mod, ConstantProvider,
    SyntheticProvider,
};
use padicl_core::weights::{NumberFieldDesc, WeightPair, WeightTuple};
use rand::Rng;

fn ctx(n: usize, p: u64, f: u32, m: u32, v: u32) -> MagicContext {
    MagicContext::new(n, LocalRingDesc::new(p, f, 10).unwrap(), m, v).unwrap()
}

#[test]
fn det_class_depends_only_on_cosets() {
    // multiplying u by an element of t U t^-1 (and w likewise) must not
    // change the determinant class
    let mut rng = common::rng(2001);
    for n in [1usize, 2] {
        let c = ctx(n, 3, 1, 1, 2);
        for _ in 0..10 {
            let u = LocalMatrix::random_upper_unipotent(&c.ring, n + 1, &mut rng);
            let w = LocalMatrix::random_upper_unipotent(&c.ring, n, &mut rng);
            let base = magic_factor(&c, &u, &w).unwrap();
            // conjugated-in translates: t u0 t^-1 with u0 unipotent
            let u0 = LocalMatrix::random_upper_unipotent(&c.ring, n + 1, &mut rng);
            let t = padicl_core::magic::matrix_t(&c);
            let tu0t = t.mul(&u0).mul(&t.invert().unwrap());
            let u2 = u.mul(&tu0t);
            let w0 = LocalMatrix::random_upper_unipotent(&c.ring, n, &mut rng);
            let tp = padicl_core::magic::matrix_t_prime(&c);
            let tw0t = tp.mul(&w0).mul(&tp.invert().unwrap());
            let w2 = w.mul(&tw0t);
            let moved = magic_factor(&c, &u2, &w2).unwrap();
            assert_eq!(base.det_class, moved.det_class);
        }
    }
}

#[test]
fn product_operator_acts_factorwise() {
    // applying the two decompositions in either order yields the same
    // multiset of translate pairs on a toy module of formal symbols
    let c = ctx(1, 3, 1, 1, 0);
    let v = decompose_v(&c, 1 << 20).unwrap();
    let vp = decompose_v_prime(&c, 1 << 20).unwrap();
    let serialize = |g: &LocalMatrix| serde_json::to_string(g).unwrap();
    let mut order_a: Vec<(String, String)> = Vec::new();
    for r in &v.reps {
        for s in &vp.reps {
            order_a.push((serialize(r), serialize(s)));
        }
    }
    let mut order_b: Vec<(String, String)> = Vec::new();
    for s in &vp.reps {
        for r in &v.reps {
            order_b.push((serialize(r), serialize(s)));
        }
    }
    order_a.sort();
    order_b.sort();
    assert_eq!(order_a, order_b);
}

#[test]
fn hida_normalization_dominates_every_weight() {
    // v_p(eta(t, t')) <= v_p(mu x nu (t, t')) for every weight eta of the
    // module: the integrally normalized operator stabilizes the lattice.
    // n = 1: t-exponents (1, 0), t'-exponent (1).
    let q = NumberFieldDesc::rationals();
    for mu in common::dominant_vectors(2, -2, 2) {
        for nu in common::dominant_vectors(1, -2, 2) {
            let pair = WeightPair::new(
                q.clone(),
                WeightTuple::constant(&q, mu.clone()).unwrap(),
                WeightTuple::constant(&q, nu.clone()).unwrap(),
            )
            .unwrap();
            let top = hida_normalization_valuation(&pair);
            assert_eq!(
                top,
                weight_char_valuation(&pair.mu, &[1, 0]) + weight_char_valuation(&pair.nu, &[1])
            );
            for (w1, _w2) in common::gl2_weights(mu[0], mu[1]) {
                let eta_val = w1 + nu[0];
                assert!(eta_val <= top, "module weight exceeds the normalization");
            }
        }
    }
    // n = 2: t-exponents (2, 1, 0), t'-exponents (2, 1)
    for mu in common::dominant_vectors(3, -2, 2) {
        for nu in common::dominant_vectors(2, -2, 2) {
            let top = 2 * mu[0] + mu[1] + 2 * nu[0] + nu[1];
            for (a1, a2, _a3) in common::gl3_weights([mu[0], mu[1], mu[2]]) {
                for (b1, b2) in common::gl2_weights(nu[0], nu[1]) {
                    let eta = 2 * a1 + a2 + 2 * b1 + b2;
                    assert!(eta <= top, "module weight exceeds the normalization");
                }
            }
        }
    }
}

#[test]
fn coset_reps_have_expected_shape() {
    // entries above the diagonal of the enumerated representatives run
    // over residues mod varpi^(j-i): spot-check the valuation profile
    let ring = LocalRingDesc::new(2, 1, 8).unwrap();
    let reps = unipotent_coset_reps(&ring, 3, 1 << 20).unwrap();
    for g in &reps {
        for i in 0..3 {
            for j in 0..3 {
                let e = g.get(i, j);
                if i == j {
                    assert!(e.indistinguishable(&padicl_core::local::LocalElem::one(&ring)));
                } else if i > j {
                    assert!(e.is_exact_zero());
                }
            }
        }
    }
}

#[test]
fn total_mass_telescopes_and_integration_is_linear() {
    let p = ConstantProvider { p: 5, value: vec![q_int(3), q_int(-2)], components: vec![-1, 0] };
    let d = build_distribution(&p, 3, 1).unwrap();
    let m1 = total_mass(&d, 1);
    for v in 2..=3 {
        assert_eq!(total_mass(&d, v), m1);
    }
    // linearity in the character table
    let mut rng = common::rng(2002);
    let table1: BTreeMap<u64, Q> = units_mod(5, 2)
        .into_iter()
        .map(|r| (r, q_int(rng.gen_range(-5..5))))
        .collect();
    let table2: BTreeMap<u64, Q> = units_mod(5, 2)
        .into_iter()
        .map(|r| (r, q_int(rng.gen_range(-5..5))))
        .collect();
    let f1 = |a: u64| Ok(table1[&a].clone());
    let f2 = |a: u64| Ok(table2[&a].clone());
    let fsum = |a: u64| Ok(table1[&a].clone() + table2[&a].clone());
    let i1 = integrate_character(&d, &f1, 2).unwrap();
    let i2 = integrate_character(&d, &f2, 2).unwrap();
    let isum = integrate_character(&d, &fsum, 2).unwrap();
    for k in 0..i1.len() {
        assert_eq!(isum[k], i1[k].clone() + i2[k].clone());
    }
}

#[test]
fn synthetic_distribution_total_mass_independent_of_depth() {
    let mut rng = common::rng(2003);
    let mut deep = BTreeMap::new();
    for r in units_mod(3, 4) {
        deep.insert(r, vec![q_int(rng.gen_range(-10..10))]);
    }
    let s = SyntheticProvider::from_deep_values(3, q_int(2), vec![0], deep, 4).unwrap();
    let d = build_distribution(&s, 3, 1).unwrap();
    let m1 = total_mass(&d, 1);
    for v in 2..=3 {
        assert_eq!(total_mass(&d, v), m1);
    }
}
