//! Minimal dense complex matrices. Only the oracle paths use these.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![Complex64::new(0.0, 0.0); order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    /// Builds a matrix from row-major rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let order = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != order) {
            return Err(Error::InvalidDimension(format!(
                "dense matrix is not square: {} rows but a row of length {}",
                order,
                bad.len()
            )));
        }
        Ok(Self { order, data: rows.concat() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Textbook triple-loop product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { expected: self.order, found: other.order });
        }
        let d = self.order;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { expected: self.order, found: other.order });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { order: self.order, data })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.order, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { order: self.order, data: self.data.iter().map(|x| a * x).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.order).map(|i| self[(i, i)]).collect()
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.order;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.order + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.order + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_rows(&[vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p[(0, 0)], c(2.0));
        assert_eq!(p[(0, 1)], c(1.0));
        assert_eq!(p[(1, 0)], c(4.0));
        assert_eq!(p[(1, 1)], c(3.0));
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(DenseMatrix::from_rows(&[vec![c(1.0)], vec![c(1.0), c(2.0)]]).is_err());
    }

    #[test]
    fn adjoint_conjugates() {
        let a = DenseMatrix::from_fn(2, |i, j| Complex64::new(i as f64, j as f64));
        let h = a.adjoint();
        assert_eq!(h[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(h[(1, 0)], Complex64::new(0.0, -1.0));
    }
}
