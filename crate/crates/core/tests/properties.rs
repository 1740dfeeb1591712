use foxh::families;
use foxh::kernel::VariateGroup;
use foxh::sum::{sum_pdf_descriptor, SumComponent};
use foxh::textfmt::{density_to_text, parse_density};
use foxh::{
    evaluate, gamma_complex, log_gamma_complex, plan_for_density, Complex64, Density, Kernel,
    PlanOptions,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn gamma_recurrence(re in 0.1f64..50.0, im in -50.0f64..50.0) {
        let z = c(re, im);
        let ratio = (log_gamma_complex(z).unwrap() - log_gamma_complex(z + 1.0).unwrap()).exp();
        prop_assert!((c(1.0, 0.0) - z * ratio).norm() < 1e-12);
    }

    #[test]
    fn gamma_reflection(re in -4.9f64..4.9, im in -3.0f64..3.0) {
        prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
        let z = c(re, im);
        let lhs = gamma_complex(z).unwrap() * gamma_complex(c(1.0, 0.0) - z).unwrap();
        let rhs = c(std::f64::consts::PI, 0.0) / (z * std::f64::consts::PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn log_gamma_conjugate_symmetry(re in -20.0f64..20.0, im in 0.01f64..40.0) {
        let z = c(re, im);
        let a = log_gamma_complex(z.conj()).unwrap();
        let b = log_gamma_complex(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn density_text_round_trip(
        prefactor in 0.01f64..10.0,
        offset in -2.0f64..3.0,
        scale in 0.1f64..5.0,
        imag in 0.1f64..3.0,
        d in 0.0f64..2.0,
        big_d in 0.25f64..2.0,
        alpha in -1.0f64..1.0,
        w in 0.1f64..1.5,
    ) {
        let kernel = Kernel::new(2)
            .with_variate(0, VariateGroup::new().lower_numerator(d, big_d).lower_denominator(d, 0.5))
            .with_variate(1, VariateGroup::new().upper_numerator(alpha, w))
            .outer_numerator(alpha, vec![w, 0.5])
            .outer_lower(1.0, vec![0.5, w]);
        let density = Density::new(prefactor, offset, vec![c(scale, 0.0), c(0.0, imag)], vec![-1.0, 0.5], kernel).unwrap();
        let text = density_to_text(&density);
        let back: Density = parse_density(&text).unwrap();
        prop_assert_eq!(&back, &density);
        prop_assert_eq!(density_to_text(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sum_is_symmetric_in_its_summands(shape in 1.0f64..3.0, mean in 0.3f64..3.0, x in 0.2f64..6.0) {
        let a = SumComponent::new(families::gamma(shape, 1.0).unwrap()).unwrap();
        let b = SumComponent::new(families::exponential(mean).unwrap()).unwrap();
        let o = PlanOptions::default();
        let ab = sum_pdf_descriptor(&[a.clone(), b.clone()]).unwrap();
        let ba = sum_pdf_descriptor(&[b, a]).unwrap();
        let fa = evaluate(&ab, x, &plan_for_density(&ab, &o).unwrap()).unwrap();
        let fb = evaluate(&ba, x, &plan_for_density(&ba, &o).unwrap()).unwrap();
        prop_assert!((fa.value - fb.value).abs() <= 1e-8 * fa.value.abs() + fa.abs_error_estimate + fb.abs_error_estimate);
    }

    #[test]
    fn real_densities_evaluate_to_reals(shape in 0.5f64..5.0, scale in 0.2f64..4.0, x in 0.05f64..10.0) {
        let d = families::gamma(shape, scale).unwrap();
        let plan = plan_for_density(&d, &PlanOptions::default()).unwrap();
        let r = evaluate(&d, x, &plan).unwrap();
        // the residual floor is absolute, about 1e-17 of the integrand peak
        prop_assume!(r.value.abs() > 1e-10);
        prop_assert!(r.imag_residual / r.value.abs().max(1e-300) < 1e-6);
        let again = evaluate(&d, x, &plan).unwrap();
        prop_assert_eq!(r.value.to_bits(), again.value.to_bits());
        prop_assert_eq!(r.abs_error_estimate.to_bits(), again.abs_error_estimate.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn halving_the_step_stays_within_the_error_estimate(shape in 1.0f64..4.0, x in 0.2f64..8.0, pair in any::<bool>()) {
        let g = SumComponent::new(families::gamma(shape, 1.0).unwrap()).unwrap();
        let d = if pair {
            sum_pdf_descriptor(&[g.clone(), g]).unwrap()
        } else {
            g.density
        };
        let plan = plan_for_density(&d, &PlanOptions::default()).unwrap();
        let coarse = evaluate(&d, x, &plan).unwrap();
        let fine = evaluate(&d, x, &plan.refined()).unwrap();
        prop_assert!((fine.value - coarse.value).abs() <= coarse.abs_error_estimate);
    }
}
