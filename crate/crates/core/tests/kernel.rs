use fracmild::kernel::{eval_kernel, kernel_l1_norm, kernel_scaling_residual, scaling_test_radii, KernelSpec};

// Mass of the symmetric 1/2-stable law with characteristic function
// e^{-|k|^{1/2}} on [-20, 20], and its density at 0 and 20.
const HALF_STABLE_MASS_20: f64 = 0.836_762_272_568_731_8;
const HALF_STABLE_PDF_0: f64 = std::f64::consts::FRAC_2_PI;
const HALF_STABLE_PDF_20: f64 = 0.001_859_986_350_693_159_7;

#[test]
fn half_order_kernel_matches_stable_law() {
    let spec = KernelSpec::new(0.5, 1, 1.0).unwrap();
    let prof = eval_kernel(&spec, 1.0, &[0.0, 20.0]).unwrap();
    assert!((prof.values[0] - HALF_STABLE_PDF_0).abs() < 1e-6 * HALF_STABLE_PDF_0, "{:?}", prof.values);
    assert!((prof.values[1] - HALF_STABLE_PDF_20).abs() < 1e-4 * HALF_STABLE_PDF_20, "{:?}", prof.values);
}

#[test]
fn half_order_l1_norm_with_tail() {
    let l1 = kernel_l1_norm(&KernelSpec::new(0.5, 1, 1.0).unwrap()).unwrap();
    assert_eq!(l1.truncation_radius, 20.0);
    assert!(l1.value > 0.0 && l1.value.is_finite());
    assert!((l1.value - HALF_STABLE_MASS_20).abs() < 1e-4, "{l1:?}");
    // Power-law tail from the edge value; the true missing mass is 1 - value.
    assert!(l1.tail_bound > 0.0);
    assert!((l1.value + l1.tail_bound - 1.0).abs() < 0.05, "{l1:?}");
}

#[test]
fn kernel_is_self_similar_across_orders() {
    for (beta, n) in [(0.5, 1), (1.0, 2), (2.0, 2)] {
        let spec = KernelSpec::new(beta, n, 0.5).unwrap();
        let res = kernel_scaling_residual(&spec, 2.0).unwrap();
        assert!(res <= 1e-6, "beta={beta} n={n}: {res:e}");
    }
    assert!(!scaling_test_radii().is_empty());
}

#[test]
fn kernel_profiles_are_positive_and_decreasing() {
    for beta in [0.5, 1.0, 1.5, 2.0] {
        let spec = KernelSpec::new(beta, 1, 1.0).unwrap();
        let radii: Vec<f64> = (0..40).map(|k| 0.1 * k as f64).collect();
        let prof = eval_kernel(&spec, 1.0, &radii).unwrap();
        assert!(prof.values.iter().all(|&v| v > 0.0), "beta={beta}");
        assert!(prof.values.windows(2).all(|w| w[1] <= w[0]), "beta={beta}");
    }
}
