use circfn::spectral::{default_rank_tol, FourierContext};
use circfn::testkit;
use circfn::{pseudoinverse, spectrum, Circulant, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectrum_is_multiplicative(seed in any::<u64>(), d in 2usize..=64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = testkit::random_circulant(&mut rng, d);
        let y = testkit::random_circulant(&mut rng, d);
        let uxy = spectrum(&x.mul(&y).unwrap());
        let (ux, uy) = (spectrum(&x), spectrum(&y));
        for i in 0..d {
            prop_assert!((uxy.values()[i] - ux.values()[i] * uy.values()[i]).norm() <= 1e-10);
        }
    }

    #[test]
    fn conjugation_diagonalizes(seed in any::<u64>(), d in 2usize..=32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = testkit::random_circulant(&mut rng, d);
        let conj = testkit::dense_conjugate(&x);
        prop_assert!(conj.max_off_diagonal() <= 1e-9);
        for (a, b) in conj.diagonal().iter().zip(spectrum(&x).values()) {
            prop_assert!((a - b).norm() <= 1e-9);
        }
    }

    #[test]
    fn penrose_conditions_hold(seed in any::<u64>(), d in 2usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeros = rng.random_range(0..d);
        let x = testkit::random_singular(&mut rng, d, zeros);
        let xp = pseudoinverse(&x, default_rank_tol(d)).unwrap();
        prop_assert!(testkit::penrose_check(&x, &xp).unwrap().max <= 1e-9);
    }

    #[test]
    fn round_trip_through_spectrum(seed in any::<u64>(), d in 2usize..=64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = testkit::random_circulant(&mut rng, d);
        prop_assert!(circfn::from_spectrum(&spectrum(&x)).max_abs_diff(&x) <= 1e-12);
    }
}

#[test]
fn spectrum_of_elementary_is_conjugate_roots_of_unity() {
    for d in 2..=64 {
        let ctx = FourierContext::new(d).unwrap();
        let u = spectrum(&Circulant::elementary(d).unwrap());
        for (i, v) in u.values().iter().enumerate() {
            assert!((v - ctx.omega().conj().powu(i as u32)).norm() <= 1e-14, "d = {d}, i = {i}");
        }
    }
}

#[test]
fn fourier_matrix_inverse_is_conjugate_over_d() {
    for d in [2, 3, 7, 16, 33, 64] {
        let ctx = FourierContext::new(d).unwrap();
        let prod = testkit::dense_mul(&ctx.fourier_matrix(), &ctx.inverse_fourier_matrix()).unwrap();
        assert!(prod.max_abs_diff(&circfn::DenseMatrix::identity(d)) <= 1e-10, "d = {d}");
    }
}

/// Any candidate passing the four conditions is the pseudoinverse.
#[test]
fn penrose_pass_implies_uniqueness() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut passed = 0;
    for _ in 0..300 {
        let d = rng.random_range(2..=8);
        let zeros = rng.random_range(0..d);
        let a = testkit::random_singular(&mut rng, d, zeros);
        let ap = pseudoinverse(&a, default_rank_tol(d)).unwrap();
        let eta = 10f64.powf(rng.random_range(-14.0..-4.0));
        let noise = testkit::random_circulant(&mut rng, d).scale(Complex64::new(eta, 0.0));
        let y = ap.add(&noise).unwrap();
        if testkit::penrose_check(&a, &y).unwrap().max <= 1e-9 {
            passed += 1;
            assert!(y.max_abs_diff(&ap) <= 1e-7);
        }
    }
    assert!(passed > 0);
}
