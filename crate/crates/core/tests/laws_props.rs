use okspec_core::laws::{kolmogorov, polygon_distance, truncated_mean};
use okspec_core::SpectralMeasure;
use proptest::prelude::*;

fn law() -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec(-3.0f64..3.0, 1..40).prop_map(|v| SpectralMeasure::uniform(&v))
}

proptest! {
    #[test]
    fn truncated_mean_is_monotone_and_one_lipschitz(m in law(), a in -4.0f64..4.0, h in 0.0f64..1.0) {
        let (x, y) = (truncated_mean(&m, a), truncated_mean(&m, a + h));
        prop_assert!(y >= x - 1e-12);
        prop_assert!(y - x <= h + 1e-12);
    }

    #[test]
    fn truncated_mean_below_the_support_is_the_mean(m in law()) {
        prop_assert!((truncated_mean(&m, m.min() - 1.0) - m.mean()).abs() < 1e-12);
        prop_assert!((truncated_mean(&m, m.max() + 1.0) - m.max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_ends_at_the_mean(m in law()) {
        prop_assert!((m.polygon_at(1.0) - m.mean()).abs() < 1e-12);
        prop_assert!(m.polygon_at(0.0).abs() < 1e-12);
    }

    #[test]
    fn distances_are_symmetric_and_vanish_on_the_diagonal(a in law(), b in law()) {
        prop_assert_eq!(kolmogorov(&a, &a), 0.0);
        prop_assert!((kolmogorov(&a, &b) - kolmogorov(&b, &a)).abs() < 1e-15);
        prop_assert!(kolmogorov(&a, &b) <= 1.0);
        prop_assert!(polygon_distance(&a, &a) < 1e-12);
    }
}
