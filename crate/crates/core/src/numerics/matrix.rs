use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn scalar(v: T) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, a: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| *x * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * *b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect())
    }

    /// Adds `self * x` into `out`, without allocating.
    pub(crate) fn matvec_acc(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let s: T = self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum();
            *o = *o + s;
        }
    }

    /// Operator norm induced by the max-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Operator norm induced by the 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> T {
        self.transpose().norm_inf()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Block-diagonal assembly of `self` and `other`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut b = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Logarithmic norm for the max-norm: `max_i (a_ii + sum_{j != i} |a_ij|)`.
    /// `||exp(tA)|| <= exp(t * mu)` for the induced max-norm.
    pub fn log_norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, a)| if i == j { *a } else { a.abs() })
                    .sum::<T>()
            })
            .fold(T::neg_infinity(), T::max)
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::new(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = lu.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU of non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(T::min_positive_value());
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
            if pmax <= T::epsilon() * scale * T::lit(1e-3) {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        lu[i * n + j] = lu[i * n + j] - f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs length {} for {n}x{n} system", b.len())));
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let mut out = Matrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let col: Vec<T> = (0..b.rows).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col)?;
            for i in 0..b.rows {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }
}

/// Degree of the diagonal Padé approximant used by [`matexp`].
const PADE_DEGREE: usize = 8;

/// `exp(t A)` by scaling and squaring around a diagonal Padé approximant.
pub fn matexp<T: Scalar>(a: &Matrix<T>, t: T) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential of non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite time {t}")));
    }
    let n = a.rows;
    if t == T::zero() {
        return Ok(Matrix::identity(n));
    }
    let x = a.scale(t);
    let norm = x.norm_inf();
    if !norm.is_finite() {
        return Err(Error::Domain("non-finite matrix entries".into()));
    }
    // scale so that ||X / 2^s|| <= 1/2
    let mut squarings = 0i32;
    let mut scaled_norm = norm;
    while scaled_norm > T::lit(0.5) {
        scaled_norm = scaled_norm / T::lit(2.0);
        squarings += 1;
    }
    let xs = x.scale(T::lit(2.0).powi(-squarings));

    let q = PADE_DEGREE;
    let mut c = T::one();
    let ident = Matrix::identity(n);
    let mut num = ident.clone();
    let mut den = ident.clone();
    let mut power = ident;
    for k in 1..=q {
        c = c * T::from_usize_lossy(q - k + 1) / T::from_usize_lossy(k * (2 * q - k + 1));
        power = power.mul(&xs)?;
        let term = power.scale(c);
        num = num.add(&term)?;
        den = if k % 2 == 0 { den.add(&term)? } else { den.sub(&term)? };
    }
    let mut e = den.lu()?.solve_matrix(&num)?;
    for _ in 0..squarings {
        e = e.mul(&e)?;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Truncated power series, summed until terms vanish; independent of the Padé path.
    fn series_exp(a: &Matrix<f64>, t: f64) -> Matrix<f64> {
        let n = a.rows();
        let x = a.scale(t);
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..200 {
            term = term.mul(&x).unwrap().scale(1.0 / k as f64);
            sum = sum.add(&term).unwrap();
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn identity_at_zero() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(matexp(&a, 0.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn scalar_decay() {
        let e = matexp(&Matrix::scalar(-1.0_f64), 1.0).unwrap();
        assert_abs_diff_eq!(e[(0, 0)], 0.36787944117144233, epsilon = 1e-15);
        assert_abs_diff_eq!(
            series_exp(&Matrix::scalar(-1.0), 1.0)[(0, 0)],
            e[(0, 0)],
            epsilon = 1e-15
        );
    }

    #[test]
    fn rotation_by_pi() {
        let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let e = matexp(&a, std::f64::consts::PI).unwrap();
        let expected = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(e.max_abs_diff(&expected).unwrap() < 1e-9);
    }

    #[test]
    fn single_precision_works() {
        let e = matexp(&Matrix::scalar(-1.0_f32), 1.0).unwrap();
        assert!((e[(0, 0)] - 0.367_879_4).abs() < 1e-6);
    }

    #[test]
    fn non_square_rejected() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(matexp(&a, 1.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn lu_solves() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]).unwrap();
        let x = [1.0, -2.0, 0.5];
        let b = a.matvec(&x).unwrap();
        let y = a.lu().unwrap().solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-14);
        }
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().max_abs_diff(&Matrix::identity(3)).unwrap() < 1e-14);
        assert!(matches!(Matrix::<f64>::zeros(2, 2).lu(), Err(Error::Singular)));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<f64>> {
        (1usize..5).prop_flat_map(|n| {
            prop::collection::vec(-1.0..1.0_f64, n * n).prop_map(move |d| Matrix::from_vec(n, n, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn semigroup_law(a in small_matrix(), s in 0.0..2.5_f64, t in 0.0..2.5_f64) {
            // ||A||(s+t) <= 10 holds since entries are bounded by 1 and n <= 4
            let lhs = matexp(&a, s).unwrap().mul(&matexp(&a, t).unwrap()).unwrap();
            let rhs = matexp(&a, s + t).unwrap();
            let scale = 1.0 + rhs.max_abs();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-10 * scale);
        }

        #[test]
        fn agrees_with_series(a in small_matrix(), t in 0.0..2.0_f64) {
            let e = matexp(&a, t).unwrap();
            let s = series_exp(&a, t);
            prop_assert!(e.max_abs_diff(&s).unwrap() <= 1e-11 * (1.0 + s.max_abs()));
        }
    }
}
