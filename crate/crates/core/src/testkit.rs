//! Independent oracles for the test suites.
//!
//! Nothing here goes through the FFT or the channel reduction except where
//! the oracle is explicitly about the spectral map (random instance
//! generation builds circulants from chosen eigenvalues). Dense products are
//! textbook triple loops, the Moore–Penrose check is the four Penrose
//! conditions, and the root oracle scans a lattice through the ring residual.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::circulant::Circulant;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::funcalc::{func_eval, CircFunction, CircPoly};
use crate::spectral::{self, FourierContext};

pub fn dense_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.matmul(b)
}

/// `S · M · S⁻¹` with `S⁻¹ = S̄ / d` built explicitly.
pub fn dense_conjugate_matrix(m: &DenseMatrix) -> Result<DenseMatrix> {
    let ctx = FourierContext::new(m.order())?;
    ctx.fourier_matrix().matmul(m)?.matmul(&ctx.inverse_fourier_matrix())
}

/// `S · X · S⁻¹` for a circulant `X`.
pub fn dense_conjugate(x: &Circulant) -> DenseMatrix {
    dense_conjugate_matrix(&x.to_dense()).expect("circulant order >= 2")
}

/// Frobenius deviations of the four Penrose conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PenroseReport {
    /// `‖AXA − A‖`, `‖XAX − X‖`, `‖(AX)* − AX‖`, `‖(XA)* − XA‖`.
    pub deviations: [f64; 4],
    pub max: f64,
}

pub fn penrose_check(a: &Circulant, x: &Circulant) -> Result<PenroseReport> {
    if a.order() != x.order() {
        return Err(Error::OrderMismatch { expected: a.order(), found: x.order() });
    }
    let (a, x) = (a.to_dense(), x.to_dense());
    let ax = a.matmul(&x)?;
    let xa = x.matmul(&a)?;
    let deviations = [
        ax.matmul(&a)?.sub(&a)?.frobenius_norm(),
        xa.matmul(&x)?.sub(&x)?.frobenius_norm(),
        ax.adjoint().sub(&ax)?.frobenius_norm(),
        xa.adjoint().sub(&xa)?.frobenius_norm(),
    ];
    let max = deviations.iter().copied().fold(0.0, f64::max);
    Ok(PenroseReport { deviations, max })
}

/// Square lattice `{min, min + step, …} ⊂ ℝ` used for both the real and the
/// imaginary part of each candidate eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
    /// Lattice points with ring residual at or below this are hits.
    pub tol: f64,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self { min: -4.0, max: 4.0, step: 0.5, tol: 1e-9 }
    }
}

impl LatticeSpec {
    fn points(&self) -> Vec<Complex64> {
        let n = ((self.max - self.min) / self.step).round() as i64;
        let axis: Vec<f64> = (0..=n).map(|k| self.min + k as f64 * self.step).collect();
        axis.iter().flat_map(|&re| axis.iter().map(move |&im| Complex64::new(re, im))).collect()
    }
}

/// Lattice scan for `d = 2`, degree `≤ 2`. The candidate with eigenvalues
/// `(u_1, u_2)` is `circ((u_1 + u_2)/2, (u_1 − u_2)/2)`; its residual is
/// evaluated in the ring. Adjacent hits are merged, keeping the smallest
/// residual.
pub fn brute_force_roots(p: &CircPoly, grid: &LatticeSpec) -> Result<Vec<Circulant>> {
    if p.order() != 2 || p.degree() > 2 {
        return Err(Error::InvalidDimension("brute force scan supports d = 2 and degree <= 2".into()));
    }
    if grid.step.is_nan() || grid.step <= 0.0 || grid.max < grid.min {
        return Err(Error::InvalidDimension("lattice needs step > 0 and max >= min".into()));
    }
    let pts = grid.points();
    let mut hits: Vec<(Complex64, Complex64, f64)> = Vec::new();
    for &u1 in &pts {
        for &u2 in &pts {
            let z = Circulant::from_row(vec![(u1 + u2) * 0.5, (u1 - u2) * 0.5])?;
            let res = p.eval(&z)?.frobenius_norm();
            if res <= grid.tol {
                hits.push((u1, u2, res));
            }
        }
    }
    let link = 1.5 * grid.step;
    let mut clusters: Vec<Vec<(Complex64, Complex64, f64)>> = Vec::new();
    for h in hits {
        let near: Vec<usize> = clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|m| (m.0 - h.0).norm() <= link && (m.1 - h.1).norm() <= link))
            .map(|(i, _)| i)
            .collect();
        let mut merged = vec![h];
        for &i in near.iter().rev() {
            merged.extend(clusters.swap_remove(i));
        }
        clusters.push(merged);
    }
    clusters
        .into_iter()
        .map(|c| {
            let best = c.into_iter().min_by(|a, b| a.2.total_cmp(&b.2)).expect("non-empty cluster");
            Circulant::from_row(vec![(best.0 + best.1) * 0.5, (best.0 - best.1) * 0.5])
        })
        .collect()
}

/// Central difference along the identity, `(F(Z + hI) − F(Z − hI)) / 2h`,
/// evaluated entirely in the ring. For the function classes here this is the
/// derivative up to `O(h²)`.
pub fn central_difference(f: &CircFunction, z: &Circulant, h: f64) -> Result<Circulant> {
    let step = Circulant::scalar(z.order(), Complex64::new(h, 0.0))?;
    let plus = func_eval(f, &z.add(&step)?)?.value;
    let minus = func_eval(f, &z.sub(&step)?)?.value;
    Ok(plus.sub(&minus)?.scale(Complex64::new(0.5 / h, 0.0)))
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_circulant<R: Rng>(rng: &mut R, d: usize) -> Circulant {
    let row = (0..d).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Circulant::from_row(row).expect("order >= 2")
}

/// A circulant whose eigenvalue moduli lie in `[lo, hi]`.
pub fn random_with_spectrum_moduli<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> Circulant {
    let values = (0..d)
        .map(|_| Complex64::from_polar(rng.random_range(lo..=hi), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    spectral::from_values(values).expect("order >= 2")
}

/// Random polynomial of degree `n` whose leading coefficient has eigenvalue
/// moduli in `[0.5, 2]`; other coefficients are [`random_circulant`].
pub fn random_regular_poly<R: Rng>(rng: &mut R, d: usize, n: usize) -> CircPoly {
    let mut coeffs = vec![random_with_spectrum_moduli(rng, d, 0.5, 2.0)];
    coeffs.extend((0..n).map(|_| random_circulant(rng, d)));
    CircPoly::new(coeffs).expect("equal orders")
}

/// Random circulant with `zeros` eigenvalues forced to exactly zero, the
/// rest with moduli in `[0.1, 3]`.
pub fn random_singular<R: Rng>(rng: &mut R, d: usize, zeros: usize) -> Circulant {
    let mut values: Vec<Complex64> = (0..d)
        .map(|_| Complex64::from_polar(rng.random_range(0.1..=3.0), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let mut idx: Vec<usize> = (0..d).collect();
    for k in 0..zeros.min(d) {
        let j = rng.random_range(k..d);
        idx.swap(k, j);
        values[idx[k]] = Complex64::new(0.0, 0.0);
    }
    spectral::from_values(values).expect("order >= 2")
}
