//! The circulant ring element and its arithmetic.
//!
//! A `d × d` circulant is stored as its first row `(x_0, …, x_{d-1})`; the
//! dense matrix has `x_j` at every position `(i, (i + j) mod d)`, which is the
//! same as `Σ x_j C^j` for the elementary circulant `C = circ(0, 1, 0, …, 0)`.
//! Products are cyclic convolutions of rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fft;

/// Default tolerance for [`Circulant::approx_eq`].
pub const DEFAULT_EQ_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CirculantRepr", into = "CirculantRepr")]
pub struct Circulant {
    row: Vec<Complex64>,
}

/// JSON form: `{"d": int, "row": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CirculantRepr {
    d: usize,
    row: Vec<Complex64>,
}

impl TryFrom<CirculantRepr> for Circulant {
    type Error = Error;

    fn try_from(repr: CirculantRepr) -> Result<Self> {
        if repr.row.len() != repr.d {
            return Err(Error::InvalidDimension(format!(
                "field `row`: expected {} entries for d = {}, found {}",
                repr.d,
                repr.d,
                repr.row.len()
            )));
        }
        Circulant::from_row(repr.row)
    }
}

impl From<Circulant> for CirculantRepr {
    fn from(c: Circulant) -> Self {
        CirculantRepr { d: c.row.len(), row: c.row }
    }
}

fn check_order(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("order must be at least 2, got {d}")));
    }
    Ok(())
}

impl Circulant {
    pub fn from_row(row: Vec<Complex64>) -> Result<Self> {
        check_order(row.len())?;
        Ok(Self { row })
    }

    /// Convenience constructor from real entries.
    pub fn from_real(row: &[f64]) -> Result<Self> {
        Self::from_row(row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(d: usize) -> Result<Self> {
        check_order(d)?;
        Ok(Self { row: vec![ZERO; d] })
    }

    /// `I = circ(1, 0, …, 0)`.
    pub fn identity(d: usize) -> Result<Self> {
        Self::basis(d, 0)
    }

    /// `C = circ(0, 1, 0, …, 0)`.
    pub fn elementary(d: usize) -> Result<Self> {
        Self::basis(d, 1)
    }

    /// `E = circ(1, 1, …, 1)`.
    pub fn ones(d: usize) -> Result<Self> {
        check_order(d)?;
        Ok(Self { row: vec![ONE; d] })
    }

    /// `C^k`: a single one at position `k mod d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        let mut z = Self::zero(d)?;
        z.row[k % d] = ONE;
        Ok(z)
    }

    /// `a · I`.
    pub fn scalar(d: usize, a: Complex64) -> Result<Self> {
        let mut z = Self::zero(d)?;
        z.row[0] = a;
        Ok(z)
    }

    pub fn order(&self) -> usize {
        self.row.len()
    }

    pub fn row(&self) -> &[Complex64] {
        &self.row
    }

    pub fn into_row(self) -> Vec<Complex64> {
        self.row
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { expected: self.order(), found: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Self { row: self.row.iter().zip(&other.row).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Self { row: self.row.iter().zip(&other.row).map(|(a, b)| a - b).collect() })
    }

    pub fn neg(&self) -> Self {
        Self { row: self.row.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { row: self.row.iter().map(|x| a * x).collect() }
    }

    /// Ring product. Uses the naive convolution below the current thread's
    /// FFT threshold and the FFT path at or above it.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if fft::use_fft(self.order()) {
            self.mul_fft(other)
        } else {
            self.mul_naive(other)
        }
    }

    /// `O(d²)` cyclic convolution. Terms `x_j y_{k−j}` and `x_{k−j} y_j`
    /// are added in pairs, so the result is bitwise symmetric in its operands.
    pub fn mul_naive(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let d = self.order();
        let (x, y) = (&self.row, &other.row);
        let out = (0..d)
            .map(|k| {
                let mut acc = ZERO;
                for j in 0..d {
                    let j2 = if j <= k { k - j } else { k + d - j };
                    if j < j2 {
                        acc += x[j] * y[j2] + x[j2] * y[j];
                    } else if j == j2 {
                        acc += x[j] * y[j];
                    }
                }
                acc
            })
            .collect();
        Ok(Self { row: out })
    }

    /// `O(d log d)` convolution through the Fourier kernel.
    pub fn mul_fft(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let d = self.order();
        let mut a = self.row.clone();
        let mut b = other.row.clone();
        fft::forward(&mut a);
        fft::forward(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        fft::inverse(&mut a);
        let inv_d = 1.0 / d as f64;
        for x in &mut a {
            *x *= inv_d;
        }
        Ok(Self { row: a })
    }

    /// `X^k` by repeated squaring; `X^0 = I`. A single-entry `a·C^j` is
    /// raised exactly as `a^k·C^{jk}`.
    pub fn pow(&self, mut k: u64) -> Self {
        let d = self.order();
        let mut nonzero = self.row.iter().enumerate().filter(|(_, x)| **x != ZERO);
        if let (Some((j, &a)), None) = (nonzero.next(), nonzero.next()) {
            let shift = ((j as u128 * k as u128) % d as u128) as usize;
            let mut z = Self::zero(d).expect("order already validated");
            z.row[shift] = u32::try_from(k).map_or_else(|_| a.powf(k as f64), |k| a.powu(k));
            return z;
        }
        let mut result = Self::basis(self.order(), 0).expect("order already validated");
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("equal orders");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("equal orders");
            }
        }
        result
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let d = self.order();
        DenseMatrix::from_fn(d, |i, j| self.row[(j + d - i) % d])
    }

    /// `sqrt(d · Σ |x_j|²)`, the Frobenius norm of the dense expansion.
    pub fn frobenius_norm(&self) -> f64 {
        (self.order() as f64 * self.row.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest entrywise modulus difference. Infinite on order mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.order() != other.order() {
            return f64::INFINITY;
        }
        self.row.iter().zip(&other.row).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.row.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(xs: &[f64]) -> Circulant {
        Circulant::from_real(xs).unwrap()
    }

    #[test]
    fn constructors() {
        assert_eq!(Circulant::elementary(4).unwrap(), circ(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(Circulant::identity(3).unwrap(), circ(&[1.0, 0.0, 0.0]));
        assert_eq!(Circulant::ones(2).unwrap(), circ(&[1.0, 1.0]));
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(Circulant::identity(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(Circulant::from_real(&[1.0]), Err(Error::InvalidDimension(_))));
        assert!(Circulant::zero(0).is_err());
        let err = circ(&[1.0, 2.0]).mul(&circ(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(err, Error::OrderMismatch { expected: 2, found: 3 });
        assert!(circ(&[1.0, 2.0]).add(&circ(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn mul_examples() {
        let c = Circulant::elementary(2).unwrap();
        assert_eq!(c.mul(&c).unwrap(), Circulant::identity(2).unwrap());
        assert_eq!(circ(&[1.0, 2.0]).mul(&circ(&[3.0, 4.0])).unwrap(), circ(&[11.0, 10.0]));
        let x = circ(&[0.5, -1.0, 2.0, 3.5, 4.0]);
        assert_eq!(x.mul(&Circulant::identity(5).unwrap()).unwrap(), x);
    }

    #[test]
    fn add_scale_neg() {
        assert_eq!(circ(&[1.0, 0.0]).add(&circ(&[0.0, 1.0])).unwrap(), circ(&[1.0, 1.0]));
        assert_eq!(Circulant::identity(2).unwrap().scale(Complex64::new(2.0, 0.0)), circ(&[2.0, 0.0]));
        let x = circ(&[1.5, -2.0, 7.0]);
        assert_eq!(x.add(&x.neg()).unwrap(), Circulant::zero(3).unwrap());
    }

    #[test]
    fn pow_examples() {
        let c3 = Circulant::elementary(3).unwrap();
        assert_eq!(c3.pow(3), Circulant::identity(3).unwrap());
        let x = circ(&[1.0, 2.0, 3.0]);
        assert_eq!(x.pow(1), x);
        assert_eq!(x.pow(0), Circulant::identity(3).unwrap());
        assert_eq!(circ(&[1.0, 1.0]).pow(2), circ(&[2.0, 2.0]));
    }

    #[test]
    fn dense_and_norm() {
        let m = circ(&[1.0, 2.0]).to_dense();
        let expected = DenseMatrix::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(m, expected);
        assert_eq!(Circulant::zero(3).unwrap().frobenius_norm(), 0.0);
        assert_eq!(Circulant::identity(4).unwrap().frobenius_norm(), 2.0);
    }

    #[test]
    fn dense_layout_follows_cyclic_shift() {
        let x = circ(&[0.0, 1.0, 2.0, 3.0]);
        let m = x.to_dense();
        // row 1 is (x_3, x_0, x_1, x_2)
        assert_eq!(m[(1, 0)].re, 3.0);
        assert_eq!(m[(1, 1)].re, 0.0);
        assert_eq!(m[(3, 0)].re, 1.0);
    }

    #[test]
    fn json_form() {
        let x = Circulant::from_row(vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"d":2,"row":[[1.0,-2.0],[0.5,0.0]]}"#);
        let back: Circulant = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let err = serde_json::from_str::<Circulant>(r#"{"d":3,"row":[[1,0],[0,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("row"), "{err}");
    }
}
