//! Structural invariants over seeded random instances.

use errgeom_core::generate::{self, Mixedness, Scenario};
use errgeom_core::relations::{composite_inner, error_vector};
use errgeom_core::state::{state_inner, state_norm};
use errgeom_core::{evaluate_relation, quantum_error, DensityOperator, LocalContext, Observable, OutcomeFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn instance(seed: u64, dim: usize) -> (LocalContext, Scenario, ChaCha20Rng) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let s = generate::random_scenario(&mut rng, dim).unwrap();
    let ctx = LocalContext::new(s.povm.clone(), s.state.clone()).unwrap();
    (ctx, s, rng)
}

fn random_function(rng: &mut ChaCha20Rng, ctx: &LocalContext) -> OutcomeFunction {
    let n = ctx.povm().outcomes();
    OutcomeFunction::new(
        ctx.povm().space().clone(),
        (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polarization(seed in any::<u64>(), dim in 2usize..=4) {
        let (_, s, _) = instance(seed, dim);
        let plus = &s.a + &s.b;
        let minus = &s.a - &s.b;
        let lhs = state_inner(&s.a, &s.b, &s.state).unwrap();
        let rhs = (state_inner(&plus, &plus, &s.state).unwrap() - state_inner(&minus, &minus, &s.state).unwrap()) / 4.0;
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn cauchy_schwarz_for_both_products(seed in any::<u64>(), dim in 2usize..=4) {
        let (ctx, s, _) = instance(seed, dim);
        let ab = state_inner(&s.a, &s.b, &s.state).unwrap();
        let na = state_norm(&s.a, &s.state).unwrap();
        let nb = state_norm(&s.b, &s.state).unwrap();
        prop_assert!(ab.abs() <= na * nb * (1.0 + 1e-12) + 1e-12);

        let (xa, fa) = error_vector(&ctx, &s.a).unwrap();
        let (xb, fb) = error_vector(&ctx, &s.b).unwrap();
        let cross = composite_inner(&ctx, &xa, &fa, &xb, &fb).unwrap();
        let ea = composite_inner(&ctx, &xa, &fa, &xa, &fa).unwrap().re.max(0.0).sqrt();
        let eb = composite_inner(&ctx, &xb, &fb, &xb, &fb).unwrap().re.max(0.0).sqrt();
        prop_assert!(cross.norm() <= ea * eb + 1e-9 * (1.0 + ea * eb));
    }

    #[test]
    fn measurement_is_affine_in_the_state(seed in any::<u64>(), dim in 2usize..=4, lambda in 0.0f64..=1.0) {
        let (_, s, mut rng) = instance(seed, dim);
        let other = generate::random_state(&mut rng, dim, Mixedness::Ginibre).unwrap();
        let mix = DensityOperator::mixture(lambda, &s.state, &other).unwrap();
        let p = s.povm.apply(&mix).unwrap();
        let p1 = s.povm.apply(&s.state).unwrap();
        let p2 = s.povm.apply(&other).unwrap();
        for ((w, a), b) in p.weights().iter().zip(p1.weights()).zip(p2.weights()) {
            prop_assert!((w - lambda * a - (1.0 - lambda) * b).abs() < 1e-12);
        }
    }

    #[test]
    fn pushforward_is_linear(seed in any::<u64>(), dim in 2usize..=4, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let (ctx, s, _) = instance(seed, dim);
        let combo = Observable::linear_combination(dim, [(x, &s.a), (y, &s.b)]).unwrap();
        let lhs = ctx.pushforward(&combo).unwrap();
        let rhs = ctx.pushforward(&s.a).unwrap().combine(x, &ctx.pushforward(&s.b).unwrap(), y).unwrap();
        prop_assert!(lhs.max_abs_difference(&rhs).unwrap() < 1e-9 * (1.0 + combo.max_abs()));
    }

    #[test]
    fn quantum_error_is_a_seminorm(seed in any::<u64>(), dim in 2usize..=4, c in -4.0f64..4.0) {
        let (ctx, s, _) = instance(seed, dim);
        let ea = quantum_error(&ctx, &s.a).unwrap();
        let eb = quantum_error(&ctx, &s.b).unwrap();
        let scaled = quantum_error(&ctx, &s.a.scaled(c)).unwrap();
        prop_assert!((scaled - c.abs() * ea).abs() < 1e-6 * (1.0 + c.abs() * ea));
        let sum = quantum_error(&ctx, &(&s.a + &s.b)).unwrap();
        prop_assert!(sum <= ea + eb + 1e-6);
        // Multiples of the identity are always measured without error.
        let shifted = quantum_error(&ctx, &s.a.try_add(&Observable::identity(dim).scaled(c)).unwrap()).unwrap();
        prop_assert!((shifted - ea).abs() < 1e-6 * (1.0 + ea));
    }

    #[test]
    fn error_ignores_what_the_state_cannot_see(seed in any::<u64>(), dim in 3usize..=5) {
        // Pure state |0>: anything supported on the orthogonal block is invisible.
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let povm = generate::random_povm(&mut rng, dim, 3).unwrap();
        let ctx = LocalContext::new(povm, DensityOperator::basis(dim, 0).unwrap()).unwrap();
        let a = generate::random_observable(&mut rng, dim);
        let tail = generate::random_observable(&mut rng, dim - 1);
        let mut hidden = errgeom_core::CMatrix::zeros(dim, dim);
        hidden.view_mut((1, 1), (dim - 1, dim - 1)).copy_from(tail.matrix());
        let b = a.try_add(&Observable::new(hidden).unwrap()).unwrap();
        let ea = quantum_error(&ctx, &a).unwrap();
        let eb = quantum_error(&ctx, &b).unwrap();
        prop_assert!((ea * ea - eb * eb).abs() < 1e-9 * (1.0 + a.max_abs().powi(2)));
        prop_assert!(ctx.pushforward(&a).unwrap().max_abs_difference(&ctx.pushforward(&b).unwrap()).unwrap() < 1e-9 * (1.0 + b.max_abs()));
    }

    #[test]
    fn pullback_is_adjoint_to_pushforward(seed in any::<u64>(), dim in 2usize..=5) {
        let (ctx, s, mut rng) = instance(seed, dim);
        let f = random_function(&mut rng, &ctx);
        let scale = 1.0 + state_norm(&s.a, &s.state).unwrap() * 3.0;
        prop_assert!(ctx.adjointness_residual(&s.a, &f).unwrap() < 1e-9 * scale);
    }

    #[test]
    fn relation_holds(seed in any::<u64>(), dim in 2usize..=5) {
        let (ctx, s, _) = instance(seed, dim);
        let r = evaluate_relation(&ctx, &s.a, &s.b).unwrap();
        prop_assert!(r.holds(1e-9), "{:?}", r);
        prop_assert!(r.bound >= r.imag_part.abs());
    }
}

#[test]
fn generators_are_deterministic_across_calls() {
    for seed in [0u64, 1, 42, u64::MAX] {
        let a = instance(seed, 3).1;
        let b = instance(seed, 3).1;
        assert_eq!(a.povm, b.povm);
        assert_eq!(a.state, b.state);
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
    }
}
