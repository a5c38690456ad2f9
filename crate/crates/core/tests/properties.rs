use entsup::bounds::{BoundReport, Coefficients};
use entsup::linalg::ComplexMatrix;
use entsup::measures::measures_of;
use entsup::states::{format_state, parse_state, sample_random, Dims, SampleMode};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = Dims> {
    (1usize..=5).prop_map(|c| Dims::new(2, 2, c).unwrap())
}

fn unitary(t: f64, a: f64, b: f64) -> ComplexMatrix {
    let (c, s) = (t.cos(), t.sin());
    ComplexMatrix::new(
        2,
        2,
        vec![
            C64::from_polar(c, a),
            -C64::from_polar(s, -b),
            C64::from_polar(s, b),
            C64::from_polar(c, -a),
        ],
    )
    .unwrap()
}

fn mode() -> impl Strategy<Value = SampleMode> {
    prop_oneof![Just(SampleMode::ComplexGaussian), Just(SampleMode::RealUniform)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_ordered_and_bounded(d in dims(), seed in any::<u64>(), m in mode()) {
        let s = sample_random(d, seed, m);
        let ms = measures_of(&s).unwrap();
        prop_assert!(ms.concurrence_c >= -1e-12 && ms.concurrence_c <= ms.coa_ca + 1e-10);
        prop_assert!(ms.coa_ca <= 1.0 + 1e-10);
        prop_assert!(ms.entropy_e >= -1e-12 && ms.entropy_e <= 1.0 + 1e-10);
    }

    #[test]
    fn local_unitaries_and_global_phase_leave_measures(
        d in dims(), seed in any::<u64>(),
        ua in (0.0..3.2f64, 0.0..6.3f64, 0.0..6.3f64),
        ub in (0.0..3.2f64, 0.0..6.3f64, 0.0..6.3f64),
        phase in 0.0..6.3f64,
    ) {
        let s = sample_random(d, seed, SampleMode::ComplexGaussian);
        let t = s
            .apply_local_ab(&unitary(ua.0, ua.1, ua.2), &unitary(ub.0, ub.1, ub.2))
            .unwrap()
            .scaled(C64::from_polar(1.0, phase));
        let (a, b) = (measures_of(&s).unwrap(), measures_of(&t).unwrap());
        prop_assert!((a.concurrence_c - b.concurrence_c).abs() < 1e-9);
        prop_assert!((a.coa_ca - b.coa_ca).abs() < 1e-9);
        prop_assert!((a.entropy_e - b.entropy_e).abs() < 1e-9);
    }

    #[test]
    fn state_text_round_trips(d in dims(), seed in any::<u64>()) {
        let s = sample_random(d, seed, SampleMode::ComplexGaussian);
        let back = parse_state(&format_state(&s)).unwrap();
        prop_assert_eq!(back.dims(), s.dims());
        prop_assert_eq!(back.amps(), s.amps());
    }

    #[test]
    fn bounds_bracket_actual(
        d in dims(), seed in any::<u64>(),
        abs_alpha in 0.0..=1.0f64, pa in 0.0..6.3f64, pb in 0.0..6.3f64,
    ) {
        let phi = sample_random(d, seed, SampleMode::ComplexGaussian);
        let psi = sample_random(d, seed.wrapping_add(1), SampleMode::ComplexGaussian);
        let coeffs = Coefficients::from_abs_alpha(abs_alpha, pa, pb).unwrap();
        let r = match BoundReport::evaluate(coeffs, &phi, &psi) {
            Ok(r) => r,
            // Γ can vanish only on a measure-zero set
            Err(_) => return Ok(()),
        };
        let c = r.norm_sq_gamma * r.actual.concurrence_c;
        prop_assert!(r.concurrence.lower_best <= c + 1e-9);
        prop_assert!(c <= r.concurrence.upper_best + 1e-9);
        prop_assert!(r.norm_sq_gamma * r.actual.coa_ca <= r.coa.upper_best + 1e-9);
    }
}
