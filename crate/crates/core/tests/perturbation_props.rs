use std::f64::consts::PI;

use num_complex::Complex64;
use per1lab::dynamics::{residue_index, resit, Per1Param};
use per1lab::fatou::find_parameter_for_height;
use per1lab::perturbation::verify::argument_for_phase;
use per1lab::perturbation::*;
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn a_of(t: f64) -> Per1Param {
    find_parameter_for_height(t, 1e-9).unwrap()
}

#[test]
fn real_delta_phase_vanishes() {
    for t in [1.9, 2.0, 2.2] {
        let est = PhaseEstimator::new(a_of(t)).unwrap();
        for d in [1e-4, 1e-5, 1e-6] {
            let e = est.estimate(Complex64::new(d, 0.0), TOL).unwrap();
            assert!(e.im_sigma.abs() < 0.05, "t={t} d={d}: {e:?}");
            assert!(e.stability < 0.05, "t={t} d={d}: {e:?}");
        }
    }
}

#[test]
fn conjugate_delta_flips_the_phase() {
    let a = a_of(2.0);
    let est = PhaseEstimator::new(a).unwrap();
    for phase in [0.3, 0.9, 2.0] {
        let th = argument_for_phase(a.value(), 1e-5, phase);
        let d = Complex64::from_polar(1e-5, th);
        let p = est.estimate(d, TOL).unwrap();
        let m = est.estimate(d.conj(), TOL).unwrap();
        let spread = p.stability.max(m.stability);
        assert!((p.im_sigma + m.im_sigma).abs() <= spread + 1e-9, "{p:?} {m:?}");
    }
}

#[test]
fn phase_is_stable_under_delta_refinement() {
    let a = a_of(2.0);
    let est = PhaseEstimator::new(a).unwrap();
    // the real ray
    for d in [1e-4, 1e-5] {
        let x = est.estimate(Complex64::new(d, 0.0), TOL).unwrap().im_sigma;
        let y = est.estimate(Complex64::new(d / 4.0, 0.0), TOL).unwrap().im_sigma;
        assert!((x - y).abs() < 0.1);
    }
    // rays with fixed arg(delta) / sqrt|delta|, along which the phase has a limit
    for phase in [0.5, 1.0, 2.0, 3.0] {
        for d in [1e-4, 1e-5] {
            let at = |m: f64| {
                let th = argument_for_phase(a.value(), m, phase);
                est.estimate(Complex64::from_polar(m, th), TOL).unwrap().im_sigma
            };
            let (x, y) = (at(d), at(d / 4.0));
            assert!((x - y).abs() < 0.1, "phase {phase} d={d}: {x} vs {y}");
        }
    }
}

#[test]
fn phase_above_threshold_gives_attracting_split_point() {
    let a = a_of(2.0);
    let threshold = PI * resit(a).unwrap();
    let est = PhaseEstimator::new(a).unwrap();
    let mut seen = 0;
    for k in 1..=20 {
        let phase = 0.2 * k as f64;
        let d = Complex64::from_polar(1e-6, argument_for_phase(a.value(), 1e-6, phase));
        let Ok(e) = est.estimate(d, TOL) else { continue };
        let (p, q) = split_fixed_points(&perturb(a, d).unwrap()).unwrap();
        let attracting = p.modulus().min(q.modulus()) < 1.0;
        if e.im_sigma > threshold + 0.05 {
            assert!(attracting, "{e:?}");
            seen += 1;
        } else if e.im_sigma < threshold - 0.05 {
            assert!(!attracting, "{e:?}");
        }
    }
    assert!(seen > 5);
}

#[test]
fn index_sum_tends_to_residue_index() {
    for a in [1.2, 1.5] {
        let a = Per1Param::new(a).unwrap();
        let iota = residue_index(a).unwrap();
        let mut errors = Vec::new();
        for d in [1e-4, 1e-5, 1e-6] {
            let (p, q) = split_fixed_points(&perturb(a, Complex64::new(d, 0.0)).unwrap()).unwrap();
            let sum = p.index.unwrap() + q.index.unwrap();
            errors.push((sum - iota).norm());
        }
        assert!(errors[2] < 1e-2, "{errors:?}");
        assert!(errors[0] >= errors[1] && errors[1] >= errors[2], "{errors:?}");
    }
}

#[test]
fn lemma_examples() {
    let a = a_of(2.0);
    let out = classify_perturbation(&perturb(a, Complex64::new(1e-5, 0.0)).unwrap(), Budget::default());
    assert_eq!(out.verdict, OutcomeVerdict::BothCriticalEscape);
    let (p, q) = split_fixed_points(&perturb(a, Complex64::new(1e-5, 0.0)).unwrap()).unwrap();
    assert!(p.modulus() > 1.0 && q.modulus() > 1.0);
    let half = Per1Param::new(0.5).unwrap();
    let (p, q) = split_fixed_points(&perturb(half, Complex64::new(1e-6, 0.0)).unwrap()).unwrap();
    assert!(p.modulus() < 1.0 && q.modulus() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn attracting_side_always_has_a_non_repelling_fixed_point(
        r in 1e-7f64..1e-4,
        th in -PI..PI,
    ) {
        let map = perturb(Per1Param::new(0.5).unwrap(), Complex64::from_polar(r, th)).unwrap();
        let out = classify_perturbation(&map, Budget::default());
        prop_assert!(matches!(
            out.verdict,
            OutcomeVerdict::AttractingFixedPoint | OutcomeVerdict::ParabolicFixedPoint
        ));
        prop_assert!(!out.misiurewicz_like);
    }

    #[test]
    fn verdict_commutes_with_conjugation(r in 1e-7f64..1e-4, th in 0.0..PI) {
        let a = Per1Param::new(1.3).unwrap();
        let d = Complex64::from_polar(r, th);
        let x = classify_perturbation(&perturb(a, d).unwrap(), Budget::default());
        let y = classify_perturbation(&perturb(a, d.conj()).unwrap(), Budget::default());
        prop_assert_eq!(x.verdict, y.verdict);
    }

    #[test]
    fn return_multiplier_matches_threshold(s in -3.0f64..5.0, a in 0.2f64..1.7) {
        let a = Per1Param::new(a).unwrap();
        let m = return_multiplier_modulus(a, s).unwrap();
        let threshold = PI * resit(a).unwrap();
        prop_assert_eq!(m < 1.0, s > threshold);
    }
}
