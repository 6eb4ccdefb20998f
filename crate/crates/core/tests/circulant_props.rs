use circfn::testkit;
use circfn::Circulant;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair(seed: u64, d: usize) -> (Circulant, Circulant) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (testkit::random_circulant(&mut rng, d), testkit::random_circulant(&mut rng, d))
}

fn rel(a: &Circulant, b: &Circulant) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mul_matches_dense_product(seed in any::<u64>(), d in 2usize..=64) {
        let (x, y) = pair(seed, d);
        let fast = x.mul(&y).unwrap().to_dense();
        let slow = testkit::dense_mul(&x.to_dense(), &y.to_dense()).unwrap();
        prop_assert!(fast.sub(&slow).unwrap().frobenius_norm() <= 1e-10 * slow.frobenius_norm());
    }

    #[test]
    fn mul_commutes(seed in any::<u64>(), d in 2usize..=128) {
        let (x, y) = pair(seed, d);
        prop_assert_eq!(x.mul_naive(&y).unwrap(), y.mul_naive(&x).unwrap());
        prop_assert!(x.mul_fft(&y).unwrap().max_abs_diff(&y.mul_fft(&x).unwrap()) <= 1e-12);
    }

    #[test]
    fn elementary_powers_shift(d in 2usize..=40, k in 0u64..200) {
        let p = Circulant::elementary(d).unwrap().pow(k);
        prop_assert_eq!(p, Circulant::basis(d, (k % d as u64) as usize).unwrap());
    }

    #[test]
    fn fft_agrees_with_naive(seed in any::<u64>(), d in 2usize..=600) {
        let (x, y) = pair(seed, d);
        prop_assert!(rel(&x.mul_fft(&y).unwrap(), &x.mul_naive(&y).unwrap()) <= 1e-10);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), d in 2usize..=16) {
        let (x, _) = pair(seed, d);
        let back: Circulant = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn fft_agrees_with_naive_at_large_orders() {
    for (seed, d) in [(1, 1024), (2, 2049), (3, 4096)] {
        let (x, y) = pair(seed, d);
        assert!(rel(&x.mul_fft(&y).unwrap(), &x.mul_naive(&y).unwrap()) <= 1e-10, "d = {d}");
    }
}

#[test]
fn threshold_selects_path_without_changing_results() {
    let (x, y) = pair(9, 48);
    let fast = circfn::fft::with_fft_threshold(2, || x.mul(&y).unwrap());
    let slow = circfn::fft::with_fft_threshold(usize::MAX, || x.mul(&y).unwrap());
    assert!(rel(&fast, &slow) <= 1e-12);
    assert_eq!(circfn::fft::fft_threshold(), circfn::fft::DEFAULT_FFT_THRESHOLD);
}

#[test]
fn malformed_json_names_the_field() {
    let err = serde_json::from_str::<Circulant>(r#"{"d": 3, "row": [[1, 0], [0, 0]]}"#).unwrap_err();
    assert!(err.to_string().contains("row"), "{err}");
}
