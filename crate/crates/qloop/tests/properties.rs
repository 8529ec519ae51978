//! Property tests for the scalar field and braiding invariants.

use proptest::prelude::*;
use qloop::braidcat::BraidingContext;
use qloop::scalar::{q_number, QScalar, Rat, ScalarContext};
use qloop::tensoralg::{hopf_pairing, WordBasis};

fn scalar_from_parts(ctx: &ScalarContext, shift: i64, num: &[i64], den: &[i64]) -> QScalar {
    let mut acc = ctx.zero();
    for (k, c) in num.iter().enumerate() {
        if *c != 0 {
            let term = ctx
                .from_int(*c)
                .mul(&ctx.q_pow(Rat::new(shift + k as i64, 2)).unwrap());
            acc = acc.add(&term);
        }
    }
    let mut d = ctx.zero();
    for (k, c) in den.iter().enumerate() {
        if *c != 0 {
            d = d.add(&ctx.from_int(*c).mul(&ctx.q_pow(Rat::new(k as i64, 2)).unwrap()));
        }
    }
    if d.is_zero() {
        d = ctx.one();
    }
    acc.checked_div(&d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(
        s1 in -3i64..=3, n1 in prop::collection::vec(-5i64..=5, 1..4), d1 in prop::collection::vec(-5i64..=5, 1..3),
        s2 in -3i64..=3, n2 in prop::collection::vec(-5i64..=5, 1..4), d2 in prop::collection::vec(-5i64..=5, 1..3),
        s3 in -3i64..=3, n3 in prop::collection::vec(-5i64..=5, 1..4), d3 in prop::collection::vec(-5i64..=5, 1..3),
    ) {
        let ctx = ScalarContext::generic(2);
        let x = scalar_from_parts(&ctx, s1, &n1, &d1);
        let y = scalar_from_parts(&ctx, s2, &n2, &d2);
        let z = scalar_from_parts(&ctx, s3, &n3, &d3);
        // associativity and commutativity
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        // distributivity
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        // inverses of nonzero elements
        if !x.is_zero() {
            prop_assert!(x.mul(&x.invert().unwrap()).is_one());
        }
        // subtraction inverts addition
        prop_assert_eq!(x.add(&y).sub(&y), x);
    }

    #[test]
    fn q_number_multiplicativity(n in 1i64..=6, m in 1i64..=6) {
        // [n m]_q = [n]_{q^m} [m]_q, with [n]_{q^m} expanded directly
        let ctx = ScalarContext::generic(1);
        let lhs = q_number(n * m, &ctx);
        let mut n_at_qm = ctx.zero();
        let mut e = n - 1;
        while e >= 1 - n {
            n_at_qm = n_at_qm.add(&ctx.q_int_pow(m * e));
            e -= 2;
        }
        let rhs = n_at_qm.mul(&q_number(m, &ctx));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_text_round_trips(
        s in -4i64..=4, n in prop::collection::vec(-7i64..=7, 1..5), d in prop::collection::vec(-7i64..=7, 1..4),
    ) {
        let ctx = ScalarContext::generic(2);
        let x = scalar_from_parts(&ctx, s, &n, &d);
        let text = x.canonical_string();
        let back = QScalar::parse(&ctx, &text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.canonical_string(), text);
    }

    #[test]
    fn root_of_unity_orders(n in 3u32..=12) {
        let ctx = ScalarContext::root_of_unity(n).unwrap();
        let q = ctx.q();
        prop_assert!(q.pow(n as i64).unwrap().is_one());
        for k in 1..n {
            prop_assert!(!q.pow(k as i64).unwrap().is_one(), "q^{} = 1 at order {}", k, n);
        }
    }

    #[test]
    fn braiding_hexagon(an in -6i64..=6, bn in -6i64..=6, cn in -6i64..=6,
                        ad in 1i64..=2, bd in 1i64..=2, cd in 1i64..=2) {
        // Q^{a(b+c)} = Q^{ab} Q^{ac} on the q^(1/2) lattice
        let bc = BraidingContext::new(&ScalarContext::generic(4));
        let a = Rat::new(an, ad);
        let b = Rat::new(bn, bd);
        let c = Rat::new(cn, cd);
        let lhs = bc.q_cap_pow(a * (b + c)).unwrap();
        let rhs = bc.q_cap_pow(a * b).unwrap().mul(&bc.q_cap_pow(a * c).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gram_charge_conservation(n in 1usize..=3, zn in 1i64..=5, xn in 1i64..=5) {
        let ctx = ScalarContext::generic(1);
        let bc = BraidingContext::new(&ctx);
        let form = hopf_pairing(n, &ctx.from_int(zn), &ctx.from_int(xn), &bc).unwrap();
        prop_assert!(form.charge_conserving());
        // left and right radicals have equal dimension
        let left = form.gram.left_kernel_basis().len();
        let right = form.gram.kernel_basis().len();
        prop_assert_eq!(left, right);
        let _ = WordBasis::standard(n);
    }

    #[test]
    fn eval_complex_is_a_homomorphism(
        s1 in -2i64..=2, n1 in prop::collection::vec(-4i64..=4, 1..3),
        s2 in -2i64..=2, n2 in prop::collection::vec(-4i64..=4, 1..3),
    ) {
        // the floating cross-check channel respects products within 1e-9
        let ctx = ScalarContext::generic(2);
        let one = vec![1i64];
        let x = scalar_from_parts(&ctx, s1, &n1, &one);
        let y = scalar_from_parts(&ctx, s2, &n2, &one);
        let q0 = num::complex::Complex64::new(1.3, 0.4);
        let px = x.eval_complex(q0).unwrap();
        let py = y.eval_complex(q0).unwrap();
        let pxy = x.mul(&y).eval_complex(q0).unwrap();
        prop_assert!((px * py - pxy).norm() < 1e-9 * (1.0 + pxy.norm()));
    }
}
