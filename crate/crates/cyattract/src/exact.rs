//! Exact rationals, Gaussian rationals and dense matrices over them.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"-7/4"` or a finite decimal such as `"0.125"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_digits.is_empty() { BigInt::zero() } else { ip_digits.parse().ok()? };
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let frac: BigInt = fp.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let mag = BigRational::new(whole * &den + frac, den);
        return Some(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Exact fraction string, e.g. `"-3/8"`.
pub fn q_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Arithmetic needed by the exact matrix routines.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// Element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussRat {
    pub re: Q,
    pub im: Q,
}

impl GaussRat {
    pub fn new(re: Q, im: Q) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Q) -> Self {
        GaussRat { re, im: Q::zero() }
    }

    pub fn i() -> Self {
        GaussRat { re: Q::zero(), im: Q::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", q_string(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", q_string(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", q_string(&self.re), q_string(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", q_string(&self.re), q_string(&self.im))
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, o: GaussRat) -> GaussRat {
        let n = o.norm_sqr();
        let p = self * o.conj();
        GaussRat { re: p.re / &n, im: p.im / n }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::real(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::real(Q::one())
    }
}

impl From<Q> for GaussRat {
    fn from(x: Q) -> Self {
        GaussRat::real(x)
    }
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(n: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j).clone() + a.clone() * o.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone())
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn pow(&self, k: u32) -> Matrix<T> {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = T::one() / m.get(r, c).clone();
            for j in 0..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return T::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone() / piv.clone();
                for j in c..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Smallest r with self^r = 0, if any within the dimension.
    pub fn nilpotency_index(&self) -> Option<u32> {
        let mut p = Self::identity(self.rows);
        for r in 0..=self.rows as u32 {
            if p.is_zero() {
                return Some(r);
            }
            p = p.mul(self);
        }
        None
    }
}

impl Matrix<Q> {
    pub fn to_gauss(&self) -> Matrix<GaussRat> {
        self.map(|x| GaussRat::real(x.clone()))
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(q_to_f64).collect()).collect()
    }
}

impl Matrix<GaussRat> {
    pub fn to_c64_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(GaussRat::to_c64).collect()).collect()
    }
}

/// Linear subspace stored by its canonical row-reduced basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Field> Subspace<T> {
    pub fn span(ambient: usize, vectors: &[Vec<T>]) -> Self {
        if vectors.is_empty() {
            return Subspace { ambient, basis: Vec::new() };
        }
        let m = Matrix::from_rows(vectors.to_vec());
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn whole(ambient: usize) -> Self {
        let id = Matrix::<T>::identity(ambient);
        Subspace { ambient, basis: (0..ambient).map(|i| id.row(i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn kernel_of(m: &Matrix<T>) -> Self {
        Self::span(m.cols(), &m.kernel())
    }

    pub fn image_of(m: &Matrix<T>) -> Self {
        let cols: Vec<Vec<T>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Self::span(m.rows(), &cols)
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Self::span(self.ambient, &v)
    }

    pub fn intersect(&self, o: &Self) -> Self {
        if self.basis.is_empty() || o.basis.is_empty() {
            return Self::zero(self.ambient);
        }
        let a = self.basis.len();
        let mut cols = self.basis.clone();
        cols.extend(o.basis.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
        let m = Matrix::from_columns(self.ambient, &cols);
        let vecs: Vec<Vec<T>> = m
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![T::zero(); self.ambient];
                for (c, coef) in k.iter().take(a).enumerate() {
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi = vi.clone() + coef.clone() * self.basis[c][i].clone();
                    }
                }
                v
            })
            .collect();
        Self::span(self.ambient, &vecs)
    }

    pub fn map_by(&self, m: &Matrix<T>) -> Self {
        let v: Vec<Vec<T>> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Self::span(m.rows(), &v)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        Self::span(self.ambient, &all).dim() == self.dim()
    }

    pub fn contains_space(&self, o: &Self) -> bool {
        self.sum(o).dim() == self.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("-7/4"), Some(q(-7, 4)));
        assert_eq!(parse_q("0.125"), Some(q(1, 8)));
        assert_eq!(parse_q("-0.5"), Some(q(-1, 2)));
        assert_eq!(parse_q("12"), Some(qi(12)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn rank_kernel_inverse() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(Zero::is_zero));
        let b = m(&[&[2, 1], &[7, 4]]);
        let bi = b.inverse().unwrap();
        assert_eq!(b.mul(&bi), Matrix::identity(2));
        assert_eq!(b.det(), qi(1));
    }

    #[test]
    fn subspace_intersection() {
        let u = Subspace::span(3, &[vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)]]);
        let v = Subspace::span(3, &[vec![qi(0), qi(1), qi(0)], vec![qi(0), qi(0), qi(1)]]);
        let w = u.intersect(&v);
        assert_eq!(w.dim(), 1);
        assert!(w.contains(&[qi(0), qi(5), qi(0)]));
        assert_eq!(u.sum(&v).dim(), 3);
    }

    #[test]
    fn gauss_field_ops() {
        let a = GaussRat::new(qi(1), qi(2));
        let b = GaussRat::new(qi(3), qi(-1));
        assert_eq!((a.clone() * b.clone()) / b, a);
        assert_eq!(GaussRat::i() * GaussRat::i(), -GaussRat::one());
    }
}
