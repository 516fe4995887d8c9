//! Generative property tests for the algebraic identities behind the
//! operator toolbox and the exponent regions.

use proptest::prelude::*;

use hadamard_frac::criterion::{duality_coefficients, region_t1, region_t2};
use hadamard_frac::kernels::{
    hadamard_caputo_derivative, hadamard_left_integral, log_power_left_image, FracParams,
    Integrand,
};
use hadamard_frac::probe::{decay_exponent, young_constant};
use hadamard_frac::quad::QuadratureSpec;
use hadamard_frac::special::{beta_fn, gamma_fn};
use hadamard_frac::criterion::ProblemParams;

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.1f64..20.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn beta_gamma_identity(x in 0.1f64..15.0, y in 0.1f64..15.0) {
        let lhs = beta_fn(x, y).unwrap() * gamma_fn(x + y).unwrap();
        let rhs = gamma_fn(x).unwrap() * gamma_fn(y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn duality_coefficients_bounded_and_monotone(
        alpha in 0.01f64..0.99,
        step in 0.001f64..0.009,
    ) {
        let d = duality_coefficients(alpha).unwrap();
        prop_assert!(d.r_alpha > 0.0 && d.r_alpha < 1.0);
        prop_assert!(d.s_alpha > 0.0 && d.s_alpha < 1.0);
        let d2 = duality_coefficients(alpha + step).unwrap();
        prop_assert!(d2.s_alpha > d.s_alpha);
        prop_assert!(d2.r_alpha < d.r_alpha);
    }

    #[test]
    fn region_bound_strictness(
        alpha in 0.05f64..0.99,
        gamma in -0.5f64..2.0,
        dim in 1u32..=10,
    ) {
        let r = region_t1(alpha, gamma, dim);
        if r.admissible {
            prop_assert!(r.p_lower < r.p_upper);
        }
    }

    #[test]
    fn decay_sign_matches_region_membership(
        alpha in 0.05f64..0.99,
        gamma in -0.2f64..1.5,
        dim in 1u32..=8,
        frac in 0.05f64..3.0,
    ) {
        // Place p a controlled distance above the lower bound and compare
        // the decay-exponent sign against membership in the open interval.
        let r = region_t1(alpha, gamma, dim);
        prop_assume!(r.admissible && gamma > -alpha);
        let p = r.p_lower + frac * (r.p_upper - r.p_lower);
        prop_assume!(p > 1.0 && (p - r.p_upper).abs() > 1e-12);
        let pp = ProblemParams::new(alpha, gamma, dim, p, (1.0, 0.0), 1.0).unwrap();
        let e = decay_exponent(&pp);
        prop_assert_eq!(e < 0.0, p < r.p_upper, "exponent {} at p {}", e, p);
    }

    #[test]
    fn second_region_exponents_negative(
        alpha in 0.05f64..0.99,
        gamma in 0.01f64..2.0,
        frac in 0.01f64..0.99,
    ) {
        let r = region_t2(alpha, gamma);
        prop_assume!(r.p_lower < r.p_upper);
        let p = r.p_lower + frac * (r.p_upper - r.p_lower);
        let e1 = alpha - (gamma + alpha * p) / (p - 1.0);
        let e2 = alpha - gamma / (p - 1.0);
        prop_assert!(e1 < 0.0);
        prop_assert!(e2 < 0.0);
        prop_assert!((e1 - (-(alpha + gamma) / (p - 1.0))).abs() <= 1e-12 * e1.abs());
    }

    #[test]
    fn young_inequality_pointwise(
        x in 0.0f64..10.0,
        y in 0.0f64..10.0,
        eps in 0.01f64..2.0,
        p in 1.1f64..5.0,
    ) {
        let q = p / (p - 1.0);
        let bound = eps * x.powf(p) + young_constant(eps, p) * y.powf(q);
        prop_assert!(x * y <= bound * (1.0 + 1e-12) + 1e-300);
    }
}

// Quadrature-backed properties run far fewer cases; each case costs real work.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn log_power_semigroup(
        beta in 0.0f64..2.0,
        sigma1 in 0.3f64..1.2,
        sigma2 in 0.3f64..1.2,
        frac in 0.2f64..0.9,
    ) {
        let (a, t_end) = (1.0, 8.0f64);
        let t = a * (t_end / a).powf(frac);
        let q = QuadratureSpec::default();
        // First application has a closed form, so the composition reduces to
        // a single quadrature of a shifted log power.
        let p1 = FracParams::new(sigma1, a, t_end).unwrap();
        let inner_coeff = gamma_fn(beta + 1.0).unwrap() / gamma_fn(beta + sigma2 + 1.0).unwrap();
        let outer = hadamard_left_integral(&Integrand::LogPower(beta + sigma2), &p1, t, &q).unwrap();
        let composed = inner_coeff * outer;
        let direct = log_power_left_image(beta, sigma1 + sigma2, a, t);
        prop_assert!((composed - direct).abs() <= 1e-8 * direct.abs().max(1e-12));
    }

    #[test]
    fn derivative_inverts_integral_exponents(
        beta in 0.5f64..2.5,
        sigma in 0.3f64..1.2,
        alpha in 0.2f64..0.8,
        frac in 0.2f64..0.9,
    ) {
        // D^alpha applied to the closed-form image of J^sigma recovers the
        // exponent algebra beta -> beta + sigma -> beta + sigma - alpha.
        let (a, t_end) = (1.0, 8.0f64);
        let t = a * (t_end / a).powf(frac);
        let q = QuadratureSpec::default();
        let p = FracParams::new(sigma, a, t_end).unwrap();
        let coeff = gamma_fn(beta + 1.0).unwrap() / gamma_fn(beta + sigma + 1.0).unwrap();
        let image = Integrand::LogPower(beta + sigma);
        let got = coeff * hadamard_caputo_derivative(&image, alpha, &p, t, &q).unwrap();
        let want = gamma_fn(beta + 1.0).unwrap()
            / gamma_fn(beta + sigma + 1.0 - alpha).unwrap()
            * (t / a).ln().powf(beta + sigma - alpha);
        prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-12));
    }
}
