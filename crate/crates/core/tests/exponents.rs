use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracmild::exponents::{
    check_global_scalar, check_global_system, compute_alpha_scalar, compute_alpha_system, lemma_identities_scalar,
    lemma_identities_system, ScalarParams, SystemParams,
};
use fracmild::verify::sample_admissible_scalar;
use fracmild::Rat;

fn draw(seed: u64) -> ScalarParams {
    sample_admissible_scalar(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Rejection-samples an admissible system on the same rational lattice as
/// the scalar sampler.
fn draw_system(seed: u64) -> SystemParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let sys = SystemParams {
            beta: Rat::new(rng.gen_range(2..=12), 4),
            n: rng.gen_range(1..=3),
            p: Rat::new(rng.gen_range(3..=16), 4),
            q: Rat::new(rng.gen_range(3..=16), 4),
            a: Rat::new(-rng.gen_range(1..=24), 8),
            b: Rat::new(-rng.gen_range(1..=24), 8),
            sigma1: Rat::new(rng.gen_range(0..=4), 4),
            sigma2: Rat::new(rng.gen_range(0..=4), 4),
        };
        if sys.validate().is_ok() && check_global_system(&sys).is_ok_and(|r| r.admissible) {
            return sys;
        }
    }
}

fn diagonal(s: &ScalarParams) -> SystemParams {
    SystemParams { beta: s.beta, n: s.n, p: s.p, q: s.p, a: s.a, b: s.a, sigma1: s.sigma, sigma2: s.sigma }
}

fn system_strategy() -> impl Strategy<Value = SystemParams> {
    (2i128..=12, 1u32..=3, 3i128..=16, 3i128..=16, 1i128..=24, 1i128..=24, 0i128..=4, 0i128..=4).prop_map(
        |(beta, n, p, q, a, b, s1, s2)| SystemParams {
            beta: Rat::new(beta, 4),
            n,
            p: Rat::new(p, 4),
            q: Rat::new(q, 4),
            a: Rat::new(-a, 8),
            b: Rat::new(-b, 8),
            sigma1: Rat::new(s1, 4),
            sigma2: Rat::new(s2, 4),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scalar_identities_hold_on_admissible_draws(seed in any::<u64>()) {
        let params = draw(seed);
        prop_assert!(lemma_identities_scalar(&params), "{params:?}");
    }

    #[test]
    fn diagonal_system_agrees_with_scalar(seed in any::<u64>()) {
        let s = draw(seed);
        let sys = diagonal(&s);
        let alpha = compute_alpha_scalar(&s).unwrap();
        prop_assert_eq!(compute_alpha_system(&sys).unwrap(), (alpha, alpha));
        prop_assert_eq!(check_global_system(&sys).unwrap().admissible, check_global_scalar(&s).unwrap().admissible);
        prop_assert!(lemma_identities_system(&sys));
    }

    #[test]
    fn system_exponents_swap_with_roles(sys in system_strategy()) {
        prop_assume!(sys.validate().is_ok());
        let (a1, a2) = compute_alpha_system(&sys).unwrap();
        let (b1, b2) = compute_alpha_system(&sys.swapped()).unwrap();
        prop_assert_eq!((a1, a2), (b2, b1));
        prop_assert_eq!(
            check_global_system(&sys).unwrap().admissible,
            check_global_system(&sys.swapped()).unwrap().admissible
        );
    }

    #[test]
    fn system_identities_hold_on_admissible_draws(seed in any::<u64>()) {
        let sys = draw_system(seed);
        prop_assert!(lemma_identities_system(&sys), "{sys:?}");
    }

    #[test]
    fn quadratic_heat_exponent_is_two_minus_sigma_minus_n_over_r(
        n in 1u32..=3, r_num in 1i128..=40, r_den in 1i128..=8, sigma in 0i128..=8,
    ) {
        let r = Rat::new(r_num, r_den);
        let sigma = Rat::new(sigma, 4);
        let a = -Rat::int(n as i128).checked_div(r).unwrap();
        let params = ScalarParams::new(Rat::int(2), n, Rat::int(2), a, sigma).unwrap();
        prop_assert_eq!(compute_alpha_scalar(&params).unwrap(), Rat::int(2) - sigma + a);
    }
}

#[test]
fn quadratic_heat_in_three_dimensions() {
    let p = ScalarParams::new(Rat::int(2), 3, Rat::int(2), Rat::new(-3, 2), Rat::ZERO).unwrap();
    assert_eq!(compute_alpha_scalar(&p).unwrap(), Rat::new(1, 2));
    assert!(check_global_scalar(&p).unwrap().admissible);
    let sys = diagonal(&p);
    assert_eq!(compute_alpha_system(&sys).unwrap(), (Rat::new(1, 2), Rat::new(1, 2)));
    assert!(check_global_system(&sys).unwrap().admissible);
}

#[test]
fn shallow_system_is_rejected() {
    let s = ScalarParams::new(Rat::int(2), 3, Rat::int(2), Rat::new(-1, 4), Rat::ZERO).unwrap();
    let sys = diagonal(&s);
    assert_eq!(compute_alpha_system(&sys).unwrap().0, Rat::new(7, 4));
    assert!(!check_global_system(&sys).unwrap().admissible);
}
