//! Property tests for the spec-level invariants: congruence soundness and
//! normal-form laws on random presentations, minimal generation by
//! irreducibles, injectivity of integral homomorphisms on classes, ring
//! axioms at truncation, and the forced unit-product identity.

use std::sync::Arc;

use proptest::prelude::*;

use logmonoid::family::{generate_family, FamilyParams, FamilyShape};
use logmonoid::monoid::{self, MonoidPresentation};
use logmonoid::ring::FiniteRing;
use logmonoid::series::{self, SeriesRing};
use logmonoid::word::{self, Word};

fn arb_word(n: usize, max_deg: u32) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0..=max_deg.min(3), n)
        .prop_filter("degree window", move |w| word::degree(w) <= max_deg)
}

fn arb_presentation() -> impl Strategy<Value = Arc<MonoidPresentation>> {
    (1..=3usize)
        .prop_flat_map(|n| {
            let rels = proptest::collection::vec((arb_word(n, 3), arb_word(n, 3)), 0..=2);
            (Just(n), rels)
        })
        .prop_map(|(n, rels)| {
            let gens = (0..n).map(|i| format!("g{i}")).collect();
            MonoidPresentation::new(gens, rels, 8).expect("presentation builds")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_laws((m, a, b, c) in arb_presentation().prop_flat_map(|m| {
        let n = m.gen_count();
        (Just(m), arb_word(n, 4), arb_word(n, 4), arb_word(n, 2))
    })) {
        prop_assume!(m.is_decision_exact());
        let nf_a = m.normal_form(&a).unwrap();
        // idempotence
        prop_assert_eq!(m.normal_form(&nf_a).unwrap(), nf_a.clone());
        // additivity up to renormalization
        let direct = m.normal_form(&word::add(&a, &b)).unwrap();
        let stepped = m
            .normal_form(&word::add(&nf_a, &m.normal_form(&b).unwrap()))
            .unwrap();
        prop_assert_eq!(direct, stepped);
        // congruence soundness
        if m.words_equal(&a, &b).is_true() {
            prop_assert!(m
                .words_equal(&word::add(&a, &c), &word::add(&b, &c))
                .is_true());
        }
    }

    #[test]
    fn distinct_normal_forms_are_distinct_classes(m in arb_presentation()) {
        prop_assume!(m.is_decision_exact());
        let classes = m.classes_up_to(3).unwrap();
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                prop_assert!(m.words_equal(a, b).is_false());
            }
        }
    }

    #[test]
    fn minimal_generation_by_irreducibles(m in arb_presentation()) {
        prop_assume!(m.is_decision_exact());
        prop_assume!(m.is_sharp().state.is_true());
        // minimal generation needs fine monoids: require cancellativity
        prop_assume!(m.is_cancellative_up_to(4).unwrap().is_true());
        let irr: Vec<Word> = m
            .irreducibles()
            .unwrap()
            .iter()
            .map(|e| e.word().clone())
            .collect();
        // relation sides have degree <= 3 and there are at most two of
        // them, so a degree-2 class expands into at most 18 irreducibles
        for cls in m.classes_up_to(2).unwrap() {
            if word::is_zero(&cls) {
                continue;
            }
            // bounded search for an N-combination of irreducibles
            let mut found = false;
            'outer: for combo in word::words_up_to(irr.len(), 30) {
                let mut w = vec![0u32; m.gen_count()];
                for (x, &mult) in irr.iter().zip(&combo) {
                    if mult > 0 {
                        w = word::add(&w, &word::scale(x, mult));
                    }
                }
                if m.normal_form(&w).unwrap() == cls {
                    found = true;
                    break 'outer;
                }
            }
            prop_assert!(found, "class {:?} not generated by {:?}", cls, irr);
        }
    }

    #[test]
    fn integral_family_homs_inject_on_classes(seed in 0u64..500) {
        let params = FamilyParams::default();
        let inst = &generate_family(FamilyShape::Semistable, &params, seed, 1).unwrap()[0];
        let h = &inst.hom;
        prop_assert!(monoid::is_integral_hom(h, 4).unwrap().state.is_true());
        let mut seen = std::collections::HashSet::new();
        for q in h.source().classes_up_to(4).unwrap() {
            let img = h.target().normal_form(&h.apply(&q)).unwrap();
            prop_assert!(seen.insert(img));
        }
    }
}

fn arb_model_ring() -> impl Strategy<Value = SeriesRing> {
    (1..=2usize, 0..=2usize, 1..=2u32, 2..=4u8)
        .prop_flat_map(|(l, n, a, precision)| {
            (
                Just(l),
                Just(n),
                Just(a),
                Just(precision),
                proptest::collection::vec(0..=2u32, n),
            )
        })
        .prop_map(|(l, n, a, precision, b)| {
            SeriesRing::model_ring(2, precision, l, n, a, &b, None, 4).expect("model ring")
        })
}

fn arb_element(ring: &SeriesRing) -> impl Strategy<Value = series::SeriesElement> {
    let n = ring.n_vars();
    let len = ring.coeff_ring().elem_len();
    let ring = ring.clone();
    proptest::collection::vec(
        (
            proptest::collection::vec(0..=2u32, n),
            proptest::collection::vec(0..=1u8, len),
        ),
        0..=3,
    )
    .prop_map(move |terms| {
        ring.nf(terms
            .into_iter()
            .map(|(m, c)| (m, logmonoid::ring::RingElem(c)))
            .collect())
            .value
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_axioms((ring, a, b, c) in arb_model_ring().prop_flat_map(|r| {
        let a = arb_element(&r);
        let b = arb_element(&r);
        let c = arb_element(&r);
        (Just(r), a, b, c)
    })) {
        // addition is a commutative group at truncation
        prop_assert_eq!(ring.add(&a, &b), ring.add(&b, &a));
        let zero = ring.add(&a, &ring.neg(&a));
        prop_assert!(zero.is_zero());
        // multiplication commutes; distributivity holds even with the caps
        prop_assert_eq!(ring.mul(&a, &b).value, ring.mul(&b, &a).value);
        let lhs = ring.mul(&a, &ring.add(&b, &c)).value;
        let rhs = ring.add(&ring.mul(&a, &b).value, &ring.mul(&a, &c).value);
        prop_assert_eq!(lhs, rhs);
        // associativity away from truncation events
        let ab = ring.mul(&a, &b);
        let bc = ring.mul(&b, &c);
        let ab_c = ring.mul(&ab.value, &c);
        let a_bc = ring.mul(&a, &bc.value);
        if !(ab.truncated || bc.truncated || ab_c.truncated || a_bc.truncated) {
            prop_assert_eq!(ab_c.value, a_bc.value);
        }
        // normal forms stay in Sigma
        for (m, _) in ring.mul(&a, &b).value.terms() {
            prop_assert!(ring.in_sigma(m));
        }
    }

    #[test]
    fn series_units_invert((ring, u_tail) in arb_model_ring().prop_flat_map(|r| {
        let t = arb_element(&r);
        (Just(r), t)
    })) {
        // force a unit: 1 + (tail without its constant term)
        let mut tail = u_tail;
        let zero_mono = vec![0u32; ring.n_vars()];
        if let Some(c) = tail.coeff_of(&zero_mono).cloned() {
            tail = ring.sub(&tail, &ring.scalar(c));
        }
        let u = ring.add(&ring.one(), &tail);
        prop_assert!(ring.is_unit(&u));
        let inv = ring.invert(&u).expect("unit inverts");
        prop_assert_eq!(ring.mul(&u, &inv).value, ring.one());
    }

    #[test]
    fn unit_product_identity_is_forced((ring, v_tails, u2_tail) in
        (2..=3u8, 1..=2usize).prop_flat_map(|(precision, r_count)| {
            let ring = SeriesRing::model_ring(2, precision, 2, r_count, 1,
                &vec![1; r_count], None, 4).expect("model ring");
            let vs = proptest::collection::vec(arb_element(&ring), r_count);
            let u2 = arb_element(&ring);
            (Just(ring), vs, u2)
        }))
    {
        let b = vec![1u32; v_tails.len()];
        let unitize = |tail: &series::SeriesElement| {
            let zero_mono = vec![0u32; ring.n_vars()];
            let mut t = tail.clone();
            if let Some(c) = t.coeff_of(&zero_mono).cloned() {
                t = ring.sub(&t, &ring.scalar(c));
            }
            ring.add(&ring.one(), &t)
        };
        let vs: Vec<_> = v_tails.iter().map(&unitize).collect();
        let u2 = unitize(&u2_tail);
        // solve u1 from the primed relation, then the identity must follow
        let mut v_pow = ring.one();
        for (v, &bj) in vs.iter().zip(&b) {
            v_pow = ring.mul(&v_pow, &ring.pow(v, bj).value).value;
        }
        let u1 = ring.mul(&v_pow, &ring.invert(&u2).unwrap()).value;
        let rep = series::unit_product_identity(&ring, 2, &b, &[u1, u2], &vs)
            .expect("units accepted");
        prop_assume!(!rep.truncation_involved);
        prop_assert!(rep.constraints_hold);
        prop_assert!(rep.identity_holds);
    }

    #[test]
    fn constraints_and_identity_coincide((ring, u1_tail, u2_tail, v_tail) in
        (2..=3u8).prop_flat_map(|precision| {
            let ring = SeriesRing::model_ring(2, precision, 2, 1, 1, &[1], None, 4)
                .expect("model ring");
            let a = arb_element(&ring);
            let b = arb_element(&ring);
            let c = arb_element(&ring);
            (Just(ring), a, b, c)
        }))
    {
        let unitize = |tail: &series::SeriesElement| {
            let zero_mono = vec![0u32; ring.n_vars()];
            let mut t = tail.clone();
            if let Some(c) = t.coeff_of(&zero_mono).cloned() {
                t = ring.sub(&t, &ring.scalar(c));
            }
            ring.add(&ring.one(), &t)
        };
        let u1 = unitize(&u1_tail);
        let u2 = unitize(&u2_tail);
        let v1 = unitize(&v_tail);
        let rep = series::unit_product_identity(&ring, 2, &[1], &[u1, u2], &[v1])
            .expect("units accepted");
        // the primed relation holds iff the unit products agree, because the
        // relation element is regular; truncation events void the window
        prop_assume!(!rep.truncation_involved);
        prop_assert_eq!(rep.constraints_hold, rep.identity_holds);
    }
}

#[test]
fn fp_arithmetic_is_a_commutative_ring() {
    // exhaustive ring axioms for the toy coefficient rings
    for ring in [
        FiniteRing::prime_field(3).unwrap(),
        FiniteRing::galois_field(2, 2).unwrap(),
        FiniteRing::truncated_series(2, 3).unwrap(),
    ] {
        let elems = ring.elements();
        for a in &elems {
            assert_eq!(ring.add(a, &ring.zero()), a.clone());
            assert_eq!(ring.mul(a, &ring.one()), a.clone());
            for b in &elems {
                assert_eq!(ring.add(a, b), ring.add(b, a));
                assert_eq!(ring.mul(a, b), ring.mul(b, a));
                for c in &elems {
                    assert_eq!(ring.mul(a, &ring.mul(b, c)), ring.mul(&ring.mul(a, b), c));
                    assert_eq!(
                        ring.mul(a, &ring.add(b, c)),
                        ring.add(&ring.mul(a, b), &ring.mul(a, c))
                    );
                }
            }
        }
    }
}
