//! Dense complex matrices of the small sizes used by the representations.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

pub type CVector = Vec<Complex64>;

/// (ψ, φ) = Σ ψ(x) conj(φ(x)).
pub fn inner(psi: &[Complex64], phi: &[Complex64]) -> Complex64 {
    debug_assert_eq!(psi.len(), phi.len());
    psi.iter().zip(phi).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs_diff(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Square complex matrix, row-major, `m[(i, j)] = (M e_j, e_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from its rows. Panics unless the rows form a square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Σ_k w_k v_k v_k†.
    pub fn outer_sum(weights: &[f64], vectors: &[CVector]) -> Self {
        let n = vectors.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n);
        for (w, v) in weights.iter().zip(vectors) {
            for i in 0..n {
                for j in 0..n {
                    m.data[i * n + j] += *w * v[i] * v[j].conj();
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<CVector> {
        self.data.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> CVector {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.data[i * self.n + j] * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |m_ij - conj(m_ji)|.
    pub fn hermitian_residual(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    /// Eigenvalues (ascending) and unit eigenvectors of a 2×2 Hermitian matrix.
    pub fn eigh2(&self) -> Option<([f64; 2], [CVector; 2])> {
        if self.n != 2 {
            return None;
        }
        let a = self.get(0, 0).re;
        let d = self.get(1, 1).re;
        let b = self.get(0, 1);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        let vals = [mean - r, mean + r];
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        if b.norm() == 0.0 {
            let (lo, hi) = if a <= d {
                (vec![one, zero], vec![zero, one])
            } else {
                (vec![zero, one], vec![one, zero])
            };
            return Some((vals, [lo, hi]));
        }
        let vec_for = |l: f64| {
            // Of the two null-space forms, pick the one with the larger norm.
            let v1 = vec![b, Complex64::new(l - a, 0.0)];
            let v2 = vec![Complex64::new(l - d, 0.0), b.conj()];
            let v = if norm_sq(&v1) >= norm_sq(&v2) { v1 } else { v2 };
            let n = norm_sq(&v).sqrt();
            v.into_iter().map(|z| z / n).collect::<CVector>()
        };
        Some((vals, [vec_for(vals[0]), vec_for(vals[1])]))
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

/// Serialized as a row-major list of `[re, im]` rows.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n))?;
        for row in self.rows() {
            let row: Vec<[f64; 2]> = row.iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_conjugates_second_argument() {
        let u = vec![c(0.0, 1.0), c(0.0, 0.0)];
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(inner(&u, &v), c(0.0, 1.0));
        assert_eq!(inner(&v, &u), c(0.0, -1.0));
    }

    #[test]
    fn eigh2_pauli_x() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let (vals, vecs) = m.eigh2().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
        for k in 0..2 {
            let mv = m.apply(&vecs[k]);
            let lv: CVector = vecs[k].iter().map(|z| z * vals[k]).collect();
            assert!(max_abs_diff(&mv, &lv) < 1e-15);
        }
    }

    #[test]
    fn eigh2_complex_offdiagonal() {
        let m = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.3, -0.4)], vec![c(0.3, 0.4), c(-1.0, 0.0)]]);
        let (vals, vecs) = m.eigh2().unwrap();
        // trace and determinant
        assert!((vals[0] + vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[0] * vals[1] - (-2.0 - 0.25)).abs() < 1e-14);
        assert!(inner(&vecs[0], &vecs[1]).norm() < 1e-14);
        for k in 0..2 {
            let mv = m.apply(&vecs[k]);
            let lv: CVector = vecs[k].iter().map(|z| z * vals[k]).collect();
            assert!(max_abs_diff(&mv, &lv) < 1e-14);
        }
    }

    #[test]
    fn eigh2_diagonal_is_sorted() {
        let (vals, vecs) = CMatrix::diag(&[3.0, -1.0]).eigh2().unwrap();
        assert_eq!(vals, [-1.0, 3.0]);
        assert_eq!(vecs[0], vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn products_and_adjoint() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]);
        let i = CMatrix::identity(2);
        assert_eq!(&a * &i, a);
        assert_eq!(a.adjoint().get(0, 1), c(0.0, 1.0));
        assert!(a.hermitian_residual() > 0.0);
        assert_eq!((&a - &a).max_abs(), 0.0);
    }
}
