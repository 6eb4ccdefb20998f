use circfn::characterize::{estimate_divisor, logderiv_diag, ChannelStatus, DivisorVerdict, PathSpec};
use circfn::testkit;
use circfn::{CircFunction, CircPoly, Circulant, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn monomials_are_exact(seed in any::<u64>(), d in 2usize..=8, n in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = testkit::random_with_spectrum_moduli(&mut rng, d, 0.2, 5.0);
        let f = CircFunction::poly(CircPoly::monomial(d, n).unwrap());
        for v in logderiv_diag(&f, &z).unwrap().values() {
            prop_assert!((v - Complex64::new(n as f64, 0.0)).norm() <= 1e-12);
        }
    }

    /// Singular coefficients: every converged channel lands in [-m, n].
    #[test]
    fn converged_channels_respect_bounds(seed in any::<u64>(), d in 2usize..=4, n in 1usize..=4, m in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeros_p = rng.random_range(1..d);
        let zeros_q = rng.random_range(0..d);
        let mut pc = vec![testkit::random_singular(&mut rng, d, zeros_p)];
        pc.extend((0..n).map(|_| testkit::random_circulant(&mut rng, d)));
        let mut qc = vec![testkit::random_singular(&mut rng, d, zeros_q)];
        qc.extend((0..m).map(|_| testkit::random_circulant(&mut rng, d)));
        let f = CircFunction::rational(CircPoly::new(pc).unwrap(), CircPoly::new(qc).unwrap()).unwrap();
        let report = estimate_divisor(&f, &PathSpec::new(d).with_seed(seed)).unwrap();
        prop_assert_eq!(report.verdict, DivisorVerdict::Rational);
        for ch in &report.channels {
            prop_assert_eq!(ch.status, ChannelStatus::Converged);
            let k = ch.limit.unwrap();
            prop_assert!(-(m as i64) <= k && k <= n as i64);
        }
        prop_assert!(report.within_bounds);
        prop_assert_eq!(report.regular_check, None);
    }
}

/// `|k̂(t) − (n − m)| · t` settles to an instance constant and the raw
/// errors decrease along the geometric scales.
#[test]
fn regular_rational_tail_is_c_over_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let d = rng.random_range(2..=4);
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let f = CircFunction::rational(
            testkit::random_regular_poly(&mut rng, d, n),
            testkit::random_regular_poly(&mut rng, d, m),
        )
        .unwrap();
        let mut path = PathSpec::new(d);
        path.richardson = false;
        let report = estimate_divisor(&f, &path).unwrap();
        let target = Complex64::new(n as f64 - m as f64, 0.0);
        for ch in &report.channels {
            let errs: Vec<f64> = ch.estimates.iter().map(|e| (e - target).norm()).collect();
            let c_max = errs.iter().zip(&report.scales).map(|(e, t)| e * t).fold(0.0, f64::max);
            assert!(c_max < 1e3, "{errs:?}");
            assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{errs:?}");
        }
    }
}

#[test]
fn seed_changes_only_retries() {
    let f = CircFunction::poly(CircPoly::monomial(3, 2).unwrap());
    let a = estimate_divisor(&f, &PathSpec::new(3).with_seed(1)).unwrap();
    let b = estimate_divisor(&f, &PathSpec::new(3).with_seed(2)).unwrap();
    assert_eq!(a, b);
    let zero = CircFunction::poly(CircPoly::constant(Circulant::zero(3).unwrap()));
    assert!(estimate_divisor(&zero, &PathSpec::new(3)).is_err());
}
