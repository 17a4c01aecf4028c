use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LinalgError;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(LinalgError::DimensionOverflow)?;
        if data.len() != expected {
            return Err(LinalgError::EntryCount {
                expected,
                found: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: idx / cols,
                col: idx % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor for small literal matrices.
    ///
    /// Panics on ragged input; intended for tests and fixed operator tables.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
        let data = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        debug_assert_eq!(col.len(), self.rows);
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Matrix whose columns are `cols` (each of equal length).
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus, the norm used for every residual in this crate.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a_ij - b_ij|`; panics on shape mismatch.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// `max |a_ij - z δ_ij|`.
    pub fn distance_to_scalar(&self, z: C64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { z } else { ZERO };
                worst = worst.max((self[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "matmul",
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: out,
        })
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::ShapeMismatch {
                op: "apply",
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    fn zip_with(&self, rhs: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self, LinalgError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(LinalgError::ShapeMismatch {
                op,
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// `AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.matmul(rhs)?.try_sub(&rhs.matmul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.matmul(rhs)?.try_add(&rhs.matmul(self)?)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        self.zip_with(&adj, "hermitian_part", |a, b| (a + b) * 0.5)
            .expect("adjoint of a square matrix has equal shape")
    }

    /// `(A - A†)/(2i)`, so that `A = hermitian_part + i * antihermitian_part`.
    pub fn antihermitian_part(&self) -> Self {
        let adj = self.adjoint();
        self.zip_with(&adj, "antihermitian_part", |a, b| (a - b) * C64::new(0.0, -0.5))
            .expect("adjoint of a square matrix has equal shape")
    }

    /// `max |A - A†|`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_diff(&self.adjoint())
    }

    /// `max |A†A - 1|`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .expect("square")
            .distance_to_scalar(ONE)
    }

    pub fn powi(&self, exp: u32) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for code paths where shapes are already known to agree.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product; entry `((ia, ib), (ja, jb)) = a[ia, ja] * b[ib, jb]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows.checked_mul(b.rows).ok_or(LinalgError::DimensionOverflow)?;
    let cols = a.cols.checked_mul(b.cols).ok_or(LinalgError::DimensionOverflow)?;
    rows.checked_mul(cols).ok_or(LinalgError::DimensionOverflow)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let x = a[(ia, ja)];
            if x == ZERO {
                continue;
            }
            for ib in 0..b.rows {
                let row = ia * b.rows + ib;
                for jb in 0..b.cols {
                    out[(row, ja * b.cols + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    Ok(out)
}

/// Block-diagonal matrix; off-block entries are exactly zero.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix, LinalgError> {
    if blocks.is_empty() {
        return Err(LinalgError::EmptyBlockList);
    }
    if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
        return Err(LinalgError::NotSquare {
            rows: b.rows,
            cols: b.cols,
        });
    }
    let dim = blocks
        .iter()
        .try_fold(0usize, |acc, b| acc.checked_add(b.rows))
        .ok_or(LinalgError::DimensionOverflow)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.rows;
    }
    Ok(out)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Pauli matrices and other fixed 2x2 operators.
pub mod pauli {
    use super::{ComplexMatrix, C64, I, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn scaled(m: ComplexMatrix, z: C64) -> ComplexMatrix {
        m.scale(z)
    }
}

/// On-disk matrix layout: `{"dim": n, "entries": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self {
            dim: m.rows,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(j: MatrixJson) -> Result<Self, LinalgError> {
        let data = j.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_vec(j.dim, j.dim, data)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.is_square() {
            return Err(serde::ser::Error::custom("only square matrices have a JSON form"));
        }
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(tensor(&id, &id).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_x_z_hand_expansion() {
        let t = tensor(&pauli::x(), &pauli::z()).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 2)] = ONE;
        expected[(1, 3)] = -ONE;
        expected[(2, 0)] = ONE;
        expected[(3, 1)] = -ONE;
        assert_eq!(t, expected);
    }

    #[test]
    fn tensor_y_y_squares_to_identity() {
        let yy = tensor(&pauli::y(), &pauli::y()).unwrap();
        // σy⊗σy = [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]
        assert_eq!(yy[(0, 3)], -ONE);
        assert_eq!(yy[(1, 2)], ONE);
        assert_eq!((&yy * &yy), ComplexMatrix::identity(4));
    }

    #[test]
    fn direct_sum_cases() {
        assert_eq!(direct_sum(&[pauli::z()]).unwrap(), pauli::z());
        let ds = direct_sum(&[pauli::z(), pauli::z().scale(I)]).unwrap();
        assert_eq!(ds, ComplexMatrix::from_diagonal(&[ONE, -ONE, I, -I]));
        assert!(matches!(direct_sum(&[]), Err(LinalgError::EmptyBlockList)));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(direct_sum(&[rect]), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn adjoint_of_anti_hermitian() {
        assert_eq!(adjoint(&ComplexMatrix::identity(1)), ComplexMatrix::identity(1));
        let iz = pauli::z().scale(I);
        assert_eq!(adjoint(&iz), iz.scale(-ONE));
    }

    #[test]
    fn hermitian_split_recombines() {
        let a = ComplexMatrix::from_rows(&[&[c(1.0, 2.0), c(-0.5, 0.25)], &[c(3.0, -1.0), c(0.0, 1.5)]]);
        let re = a.hermitian_part();
        let im = a.antihermitian_part();
        assert!(re.hermiticity_residual() < 1e-15);
        assert!(im.hermiticity_residual() < 1e-15);
        let back = &re + &im.scale(I);
        assert!(back.max_diff(&a) < 1e-15);
    }

    #[test]
    fn from_vec_validates() {
        assert!(matches!(
            ComplexMatrix::from_vec(2, 2, vec![ONE; 3]),
            Err(LinalgError::EntryCount { expected: 4, found: 3 })
        ));
        assert!(matches!(
            ComplexMatrix::from_vec(1, 2, vec![ONE, c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn matmul_shape_error() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn json_layout() {
        let v = serde_json::to_value(pauli::y()).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["entries"][1], serde_json::json!([0.0, -1.0]));
        let back: ComplexMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, pauli::y());
        let bad = serde_json::json!({"dim": 2, "entries": [[1.0, 0.0]]});
        assert!(serde_json::from_value::<ComplexMatrix>(bad).is_err());
    }
}
