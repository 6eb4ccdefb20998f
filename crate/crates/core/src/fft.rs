//! Fourier kernel shared by ring multiplication and the spectral map.
//!
//! Plans are cached per thread by `rustfft`'s planner, which handles every
//! length (mixed radix, Rader and Bluestein). The FFT threshold is a
//! per-thread setting so that concurrent callers never observe each other's
//! overrides.

use std::cell::{Cell, RefCell};

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Orders at or above this use the FFT path by default.
pub const DEFAULT_FFT_THRESHOLD: usize = 32;

thread_local! {
    static THRESHOLD: Cell<usize> = const { Cell::new(DEFAULT_FFT_THRESHOLD) };
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// The FFT threshold in effect on the current thread.
pub fn fft_threshold() -> usize {
    THRESHOLD.with(Cell::get)
}

/// Runs `f` with the current thread's FFT threshold set to `threshold`,
/// restoring the previous value afterwards.
pub fn with_fft_threshold<R>(threshold: usize, f: impl FnOnce() -> R) -> R {
    struct Restore(usize);
    impl Drop for Restore {
        fn drop(&mut self) {
            THRESHOLD.with(|t| t.set(self.0));
        }
    }
    let _restore = Restore(THRESHOLD.with(|t| t.replace(threshold)));
    f()
}

pub(crate) fn use_fft(order: usize) -> bool {
    order >= fft_threshold()
}

/// Unnormalized forward transform: `out[k] = Σ_j x_j e^{-2πi jk/d}`.
pub(crate) fn forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

/// Unnormalized inverse transform: `out[k] = Σ_j x_j e^{+2πi jk/d}`.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}
