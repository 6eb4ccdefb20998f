//! Simultaneous diagonalization of circulants.
//!
//! With `ω = exp(2πi/d)` and `S = [ω^{(i-1)(j-1)}]`, the conjugation
//! `S Z S⁻¹` is diagonal with entries
//! `u_i = Σ_j z_{j-1} ω̄^{(i-1)(j-1)}`, i.e. a forward DFT of the first row.
//! `S⁻¹ = S̄ / d`. Channels are stored 0-based; reports are 1-based.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circulant::Circulant;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fft;

/// Default relative rank threshold for the pseudoinverse, `1e-12 · d`.
pub fn default_rank_tol(order: usize) -> f64 {
    1e-12 * order as f64
}

/// `exp(2πi k/d)`, exact at quarter turns and conjugate-symmetric.
fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let k = k % d;
    if (4 * k).is_multiple_of(d) {
        return match 4 * k / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    if 2 * k > d {
        return root_of_unity(d - k, d).conj();
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// Roots of unity for one order.
#[derive(Clone, Debug)]
pub struct FourierContext {
    order: usize,
    powers: Vec<Complex64>,
}

impl FourierContext {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidDimension(format!("order must be at least 2, got {order}")));
        }
        let powers = (0..order).map(|k| root_of_unity(k, order)).collect();
        Ok(Self { order, powers })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> Complex64 {
        self.powers[1]
    }

    /// `ω^k`, reduced mod `d` before lookup.
    pub fn omega_pow(&self, k: usize) -> Complex64 {
        self.powers[k % self.order]
    }

    /// `ω̄^k`.
    pub fn omega_bar_pow(&self, k: usize) -> Complex64 {
        self.omega_pow(k).conj()
    }

    /// Direct evaluation of the eigenvalue sum, `O(d²)`.
    pub fn dft_exact(&self, row: &[Complex64]) -> Vec<Complex64> {
        let d = self.order;
        (0..d).map(|i| row.iter().enumerate().map(|(j, x)| x * self.omega_bar_pow(i * j)).sum()).collect()
    }

    /// Direct inverse: `z_j = d⁻¹ Σ_i u_i ω^{ij}`.
    pub fn idft_exact(&self, values: &[Complex64]) -> Vec<Complex64> {
        let d = self.order;
        let inv_d = 1.0 / d as f64;
        (0..d)
            .map(|j| values.iter().enumerate().map(|(i, u)| u * self.omega_pow(i * j)).sum::<Complex64>() * inv_d)
            .collect()
    }

    /// The symmetric Vandermonde matrix `S`.
    pub fn fourier_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.order, |i, j| self.omega_pow(i * j))
    }

    /// `S⁻¹`, entrywise `s̄_{ij} / d`.
    pub fn inverse_fourier_matrix(&self) -> DenseMatrix {
        let inv_d = 1.0 / self.order as f64;
        DenseMatrix::from_fn(self.order, |i, j| self.omega_bar_pow(i * j) * inv_d)
    }
}

/// The eigenvalues `u_1..u_d` of a circulant, ordered by channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct Spectrum {
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumRepr {
    d: usize,
    values: Vec<Complex64>,
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;

    fn try_from(repr: SpectrumRepr) -> Result<Self> {
        if repr.values.len() != repr.d {
            return Err(Error::InvalidDimension(format!(
                "field `values`: expected {} entries for d = {}, found {}",
                repr.d,
                repr.d,
                repr.values.len()
            )));
        }
        Spectrum::new(repr.values)
    }
}

impl From<Spectrum> for SpectrumRepr {
    fn from(s: Spectrum) -> Self {
        SpectrumRepr { d: s.values.len(), values: s.values }
    }
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDimension(format!("spectrum needs at least 2 channels, got {}", values.len())));
        }
        Ok(Self { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|u| u.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.values.iter().map(|u| u.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.order() != other.order() {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of `X` in channel order.
pub fn spectrum(x: &Circulant) -> Spectrum {
    let d = x.order();
    let values = if fft::use_fft(d) {
        let mut buf = x.row().to_vec();
        fft::forward(&mut buf);
        buf
    } else {
        FourierContext::new(d).expect("circulant order >= 2").dft_exact(x.row())
    };
    Spectrum { values }
}

/// The circulant whose eigenvalues are `u`.
pub fn from_spectrum(u: &Spectrum) -> Circulant {
    let d = u.order();
    let row = if fft::use_fft(d) {
        let mut buf = u.values.clone();
        fft::inverse(&mut buf);
        let inv_d = 1.0 / d as f64;
        buf.iter_mut().for_each(|z| *z *= inv_d);
        buf
    } else {
        FourierContext::new(d).expect("spectrum order >= 2").idft_exact(&u.values)
    };
    Circulant::from_row(row).expect("order >= 2")
}

/// Shorthand for `from_spectrum` on raw channel values.
pub fn from_values(values: Vec<Complex64>) -> Result<Circulant> {
    Ok(from_spectrum(&Spectrum::new(values)?))
}

/// Moore–Penrose pseudoinverse. Channels with `|u_i| ≤ rel_tol · max_j |u_j|`
/// are treated as zero.
pub fn pseudoinverse(x: &Circulant, rel_tol: f64) -> Result<Circulant> {
    pseudoinverse_masked(x, rel_tol).map(|(p, _)| p)
}

/// Like [`pseudoinverse`], also returning the 0-based channels that were zeroed.
pub fn pseudoinverse_masked(x: &Circulant, rel_tol: f64) -> Result<(Circulant, Vec<usize>)> {
    if !rel_tol.is_finite() || rel_tol < 0.0 {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    let s = spectrum(x);
    let cutoff = rel_tol * s.max_modulus();
    let mut zeroed = Vec::new();
    let inv = s
        .values
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            if u.norm() > cutoff {
                u.inv()
            } else {
                zeroed.push(i);
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok((from_spectrum(&Spectrum { values: inv }), zeroed))
}

/// `S` for order `d`.
pub fn fourier_matrix(d: usize) -> Result<DenseMatrix> {
    Ok(FourierContext::new(d)?.fourier_matrix())
}

/// True when no eigenvalue falls under the rank threshold.
pub fn is_invertible(x: &Circulant, rel_tol: f64) -> bool {
    let s = spectrum(x);
    let max = s.max_modulus();
    max > 0.0 && s.values.iter().all(|u| u.norm() > rel_tol * max)
}
