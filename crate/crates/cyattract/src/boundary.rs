//! Nilpotent orbits at the boundary of the period domain: weight
//! filtrations, limiting mixed Hodge types for h = (1,1,1,1), the truncated
//! orbit exp(−izN)Π and the per-component attractor constraints.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_q, q_string, q_to_f64, qi, GaussRat, Matrix, Subspace, Q};
use crate::periods::{FrameTag, PeriodVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("expected a 4x4 matrix, got {0}x{1}")]
    WrongShape(usize, usize),
    #[error("cannot parse exact entry {0:?}")]
    BadEntry(String),
    #[error("Gr signature {0:?} matches no known limiting type")]
    UnclassifiedSignature([usize; 7]),
    #[error("constraints need a symplectic period vector, got {0}")]
    FrameMismatch(FrameTag),
    #[error("A must be symmetric positive definite")]
    NotPositive,
}

/// Exact nilpotent endomorphism of a 4-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentEndo {
    m: Matrix<Q>,
    index: u32,
}

impl NilpotentEndo {
    pub fn new(m: Matrix<Q>) -> Result<Self, BoundaryError> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(BoundaryError::WrongShape(m.rows(), m.cols()));
        }
        let index = m.nilpotency_index().ok_or(BoundaryError::NotNilpotent)?;
        Ok(NilpotentEndo { m, index })
    }

    /// Row-major exact entries such as `"1"`, `"-3/4"` or `"0.25"`.
    pub fn parse(entries: &[&str]) -> Result<Self, BoundaryError> {
        if entries.len() != 16 {
            return Err(BoundaryError::WrongShape(entries.len(), 1));
        }
        let vals = entries
            .iter()
            .map(|s| parse_q(s).ok_or_else(|| BoundaryError::BadEntry(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Matrix::from_fn(4, 4, |i, j| vals[4 * i + j].clone()))
    }

    pub fn zero() -> Self {
        NilpotentEndo { m: Matrix::zeros(4, 4), index: 0 }
    }

    /// e₁ → e₂ → e₃ → e₄ → 0.
    pub fn jordan4() -> Self {
        let mut m = Matrix::zeros(4, 4);
        for i in 0..3 {
            m.set(i + 1, i, Q::one());
        }
        NilpotentEndo { m, index: 4 }
    }

    pub fn n1(a: Q, b: Q, c: Q, d: Q) -> Self {
        let z = Q::zero();
        let rows = vec![
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![a.clone(), z.clone(), z.clone(), z.clone()],
            vec![c.clone(), b, z.clone(), z.clone()],
            vec![d, c, -a, z],
        ];
        Self::new(Matrix::from_rows(rows)).expect("lower triangular")
    }

    pub fn n2(a: Q) -> Self {
        let mut m = Matrix::zeros(4, 4);
        m.set(3, 0, a);
        Self::new(m).expect("square zero")
    }

    /// Block form [[0,0],[−A,0]] with A = [[a,b],[b,d]] symmetric, so that
    /// exp(−izN) = I + iz[[0,0],[A,0]].
    pub fn n3(a: Q, b: Q, d: Q) -> Result<Self, BoundaryError> {
        if a <= Q::zero() || &a * &d - &b * &b <= Q::zero() {
            return Err(BoundaryError::NotPositive);
        }
        let mut m = Matrix::zeros(4, 4);
        m.set(2, 0, -a);
        m.set(2, 1, -b.clone());
        m.set(3, 0, -b);
        m.set(3, 1, -d);
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix<Q> {
        &self.m
    }

    /// Smallest r with Nʳ = 0.
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    /// Whether NᵀΣ + ΣN = 0 for the given integral form.
    pub fn is_infinitesimally_symplectic(&self, sigma: &[[i64; 4]; 4]) -> bool {
        let s = Matrix::from_fn(4, 4, |i, j| qi(sigma[i][j]));
        self.m.transpose().mul(&s).add(&s.mul(&self.m)).is_zero()
    }
}

impl fmt::Display for NilpotentEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..4)
            .map(|i| self.m.row(i).iter().map(q_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// W₀ ⊆ … ⊆ W₆, the monodromy weight filtration centred at weight 3.
#[derive(Clone, Debug)]
pub struct WeightFiltration {
    spaces: Vec<Subspace<Q>>,
}

impl WeightFiltration {
    pub fn spaces(&self) -> &[Subspace<Q>] {
        &self.spaces
    }

    pub fn dims(&self) -> [usize; 7] {
        std::array::from_fn(|k| self.spaces[k].dim())
    }

    pub fn gr_dims(&self) -> [usize; 7] {
        let d = self.dims();
        std::array::from_fn(|k| if k == 0 { d[0] } else { d[k] - d[k - 1] })
    }

    /// W_k for any integer k, saturating outside 0..=6.
    pub fn w(&self, k: i32) -> Subspace<Q> {
        if k < 0 {
            Subspace::zero(4)
        } else if k > 6 {
            Subspace::whole(4)
        } else {
            self.spaces[k as usize].clone()
        }
    }
}

/// W_{3+l} = Σ_{j ≥ max(0,l)} ker N^{j+1} ∩ im N^{j−l}.
pub fn weight_filtration(n: &NilpotentEndo) -> WeightFiltration {
    let powers: Vec<Matrix<Q>> = (0..=8).map(|k| n.m.pow(k)).collect();
    let kernels: Vec<Subspace<Q>> = powers.iter().map(Subspace::kernel_of).collect();
    let images: Vec<Subspace<Q>> = powers.iter().map(Subspace::image_of).collect();
    let spaces = (-3i32..=3)
        .map(|l| {
            let mut w = Subspace::zero(4);
            for j in l.max(0)..=4 {
                let (kj, ij) = ((j + 1) as usize, (j - l) as usize);
                w = w.sum(&kernels[kj].intersect(&images[ij]));
            }
            w
        })
        .collect();
    WeightFiltration { spaces }
}

/// One Deligne summand I^{p,q} with its dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ipq {
    pub p: u8,
    pub q: u8,
    pub mult: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LmhsKind {
    /// (3,3) → (2,2) → (1,1) → (0,0).
    Diagonal,
    /// (3,0) and (0,3) isolated, (2,2) → (1,1).
    IsolatedPair,
    /// (3,1) → (2,0) and (1,3) → (0,2).
    TwoPure,
}

impl fmt::Display for LmhsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LmhsKind::Diagonal => "diagonal",
            LmhsKind::IsolatedPair => "isolated-pair",
            LmhsKind::TwoPure => "two-pure",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LmhsType {
    pub kind: LmhsKind,
    pub ipq: Vec<Ipq>,
    /// N maps I^{p,q} onto I^{p−1,q−1} along each arrow.
    pub arrows: Vec<((u8, u8), (u8, u8))>,
    pub gr_dims: [usize; 7],
}

fn ipq(p: u8, q: u8) -> Ipq {
    Ipq { p, q, mult: 1 }
}

pub fn lmhs_type(n: &NilpotentEndo) -> Result<LmhsType, BoundaryError> {
    let gr = weight_filtration(n).gr_dims();
    let (kind, ipq, arrows) = match gr {
        [1, 0, 1, 0, 1, 0, 1] => (
            LmhsKind::Diagonal,
            vec![ipq(3, 3), ipq(2, 2), ipq(1, 1), ipq(0, 0)],
            vec![((3, 3), (2, 2)), ((2, 2), (1, 1)), ((1, 1), (0, 0))],
        ),
        [0, 0, 1, 2, 1, 0, 0] => (
            LmhsKind::IsolatedPair,
            vec![ipq(3, 0), ipq(0, 3), ipq(2, 2), ipq(1, 1)],
            vec![((2, 2), (1, 1))],
        ),
        [0, 0, 2, 0, 2, 0, 0] => (
            LmhsKind::TwoPure,
            vec![ipq(3, 1), ipq(2, 0), ipq(1, 3), ipq(0, 2)],
            vec![((3, 1), (2, 0)), ((1, 3), (0, 2))],
        ),
        other => return Err(BoundaryError::UnclassifiedSignature(other)),
    };
    Ok(LmhsType { kind, ipq, arrows, gr_dims: gr })
}

fn factorial(k: u32) -> Q {
    (1..=k).fold(Q::one(), |acc, j| acc * qi(j as i64))
}

/// Σ_{k<terms} Mᵏ/k!, exact.
pub fn exp_series(m: &Matrix<GaussRat>, terms: u32) -> Matrix<GaussRat> {
    let mut acc = Matrix::zeros(m.rows(), m.cols());
    let mut power = Matrix::identity(m.rows());
    for k in 0..terms {
        acc = acc.add(&power.scale(&GaussRat::real(Q::one() / factorial(k))));
        power = power.mul(m);
    }
    acc
}

/// Coefficient matrices C_k = (−i)ᵏNᵏ/k! of exp(−izN) = Σ C_k zᵏ, k < r.
pub fn orbit_coefficients(n: &NilpotentEndo) -> Vec<Matrix<GaussRat>> {
    let g = n.m.to_gauss();
    let minus_i = -GaussRat::i();
    let mut out = Vec::new();
    let mut power = Matrix::identity(4);
    let mut phase = GaussRat::one();
    for k in 0..n.index.max(1) {
        out.push(power.scale(&(phase.clone() * GaussRat::real(Q::one() / factorial(k)))));
        power = power.mul(&g);
        phase = phase * minus_i.clone();
    }
    out
}

/// exp(−izN) evaluated exactly at a Gaussian rational z.
pub fn exp_nilpotent(n: &NilpotentEndo, z: &GaussRat) -> Matrix<GaussRat> {
    let mut acc = Matrix::zeros(4, 4);
    let mut zk = GaussRat::one();
    for c in orbit_coefficients(n) {
        acc = acc.add(&c.scale(&zk));
        zk = zk * z.clone();
    }
    acc
}

/// Coefficient vectors of exp(−izN)Π as a polynomial in z, exact.
pub fn orbit_polynomial_exact(n: &NilpotentEndo, pi: &[GaussRat; 4]) -> Vec<[GaussRat; 4]> {
    orbit_coefficients(n)
        .iter()
        .map(|c| {
            let v = c.mul_vec(pi);
            std::array::from_fn(|i| v[i].clone())
        })
        .collect()
}

fn apply_c(m: &Matrix<GaussRat>, v: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| m.get(i, j).to_c64() * v[j]).sum())
}

/// Behaviour of one coordinate of exp(−izN)Π as Im z → ∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ComponentLimit {
    Vanishes,
    Converges(C64),
    Diverges { degree: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitLimit {
    /// Coefficients of z⁰, z¹, … of exp(−izN)Π.
    pub coefficients: Vec<[C64; 4]>,
    pub components: [ComponentLimit; 4],
    /// exp(−izN)Π at each supplied z.
    pub samples: Vec<(C64, [C64; 4])>,
}

impl OrbitLimit {
    /// Converged entries, with None where a coordinate diverges.
    pub fn limit(&self) -> [Option<C64>; 4] {
        self.components.map(|c| match c {
            ComponentLimit::Vanishes => Some(C64::new(0.0, 0.0)),
            ComponentLimit::Converges(v) => Some(v),
            ComponentLimit::Diverges { .. } => None,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.components
            .iter()
            .map(|c| match c {
                ComponentLimit::Diverges { degree } => *degree,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

pub fn nilpotent_orbit_limit(n: &NilpotentEndo, pi: &[C64; 4], zs: &[C64]) -> OrbitLimit {
    let coefficients: Vec<[C64; 4]> = orbit_coefficients(n).iter().map(|c| apply_c(c, pi)).collect();
    let components = std::array::from_fn(|i| {
        let top = (0..coefficients.len()).rev().find(|&k| coefficients[k][i] != C64::new(0.0, 0.0));
        match top {
            None => ComponentLimit::Vanishes,
            Some(0) => ComponentLimit::Converges(coefficients[0][i]),
            Some(k) => ComponentLimit::Diverges { degree: k },
        }
    });
    let samples = zs
        .iter()
        .map(|&z| {
            let v = std::array::from_fn(|i| {
                coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c[i])
            });
            (z, v)
        })
        .collect();
    OrbitLimit { coefficients, components, samples }
}

/// Period vector whose entries may depend on the orbit parameter z,
/// stored as Laurent coefficients: exponent → vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPeriods {
    frame: FrameTag,
    terms: BTreeMap<i32, [C64; 4]>,
}

impl LaurentPeriods {
    pub fn new(frame: FrameTag) -> Self {
        LaurentPeriods { frame, terms: BTreeMap::new() }
    }

    pub fn constant(entries: [C64; 4], frame: FrameTag) -> Self {
        Self::new(frame).with_term(0, entries)
    }

    pub fn with_term(mut self, power: i32, v: [C64; 4]) -> Self {
        let slot = self.terms.entry(power).or_insert([C64::new(0.0, 0.0); 4]);
        for i in 0..4 {
            slot[i] += v[i];
        }
        self
    }

    pub fn frame(&self) -> FrameTag {
        self.frame
    }

    pub fn terms(&self) -> &BTreeMap<i32, [C64; 4]> {
        &self.terms
    }

    pub fn coeff(&self, power: i32) -> [C64; 4] {
        self.terms.get(&power).copied().unwrap_or([C64::new(0.0, 0.0); 4])
    }
}

impl From<&PeriodVector> for LaurentPeriods {
    fn from(p: &PeriodVector) -> Self {
        LaurentPeriods::constant(*p.entries(), p.frame())
    }
}

/// Boundary component of the one-parameter h = (1,1,1,1) example with its
/// generator parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    N1 { a: Q, b: Q, c: Q, d: Q },
    N2 { a: Q },
    N3 { a: Q, b: Q, d: Q },
}

impl Component {
    pub fn generator(&self) -> Result<NilpotentEndo, BoundaryError> {
        Ok(match self {
            Component::N1 { a, b, c, d } => NilpotentEndo::n1(a.clone(), b.clone(), c.clone(), d.clone()),
            Component::N2 { a } => NilpotentEndo::n2(a.clone()),
            Component::N3 { a, b, d } => NilpotentEndo::n3(a.clone(), b.clone(), d.clone())?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Component::N1 { .. } => "N1",
            Component::N2 { .. } => "N2",
            Component::N3 { .. } => "N3",
        }
    }
}

/// Scalar Laurent polynomial in z.
type Scalar = BTreeMap<i32, C64>;

fn coordinate(p: &LaurentPeriods, i: usize) -> Scalar {
    p.terms.iter().map(|(&k, v)| (k, v[i])).collect()
}

fn add_scaled(acc: &mut Scalar, s: &Scalar, c: C64, shift: i32) {
    for (&k, &v) in s {
        *acc.entry(k + shift).or_insert(C64::new(0.0, 0.0)) += c * v;
    }
}

/// |finite part| plus the norms of every growing coefficient, as z → ∞.
fn limit_residual(s: &Scalar, target: C64) -> f64 {
    let finite = s.get(&0).copied().unwrap_or(C64::new(0.0, 0.0));
    let growth: f64 = s.range(1..).map(|(_, v)| v.norm()).sum();
    (finite - target).norm() + growth
}

fn finite_part(s: &Scalar) -> C64 {
    s.get(&0).copied().unwrap_or(C64::new(0.0, 0.0))
}

/// Residuals of the attractor conditions on a boundary component.
///
/// Every scalar condition is read as a limit z → ∞: growing terms must
/// cancel and the z⁰ term must match. N3 and N2 follow the displayed
/// equations; N1 reports the distance of the leading limit direction from
/// span{Λ, Λ̄} with Λ the finite part of the orbit.
pub fn boundary_constraints(kind: &Component, pi: &LaurentPeriods) -> Result<Vec<f64>, BoundaryError> {
    if !pi.frame.is_symplectic() {
        return Err(BoundaryError::FrameMismatch(pi.frame));
    }
    let p: [Scalar; 4] = std::array::from_fn(|i| coordinate(pi, i));
    let f = |x: &Q| C64::new(q_to_f64(x), 0.0);
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    Ok(match kind {
        Component::N3 { a, b, d } => {
            let mut second = p[2].clone();
            add_scaled(&mut second, &p[0], f(a), 1);
            add_scaled(&mut second, &p[1], f(b), 1);
            let mut third = p[3].clone();
            add_scaled(&mut third, &p[0], i * f(b), 1);
            add_scaled(&mut third, &p[1], i * f(d), 1);
            let lim_pi1 = finite_part(&p[0]);
            vec![limit_residual(&p[1], zero), limit_residual(&second, zero), limit_residual(&third, lim_pi1.conj())]
        }
        Component::N2 { a } => {
            let mut third = p[3].clone();
            add_scaled(&mut third, &p[0], f(a), 1);
            let lim_pi1 = finite_part(&p[0]);
            vec![limit_residual(&p[1], zero), limit_residual(&p[2], zero), limit_residual(&third, lim_pi1.conj())]
        }
        Component::N1 { .. } => {
            let n = kind.generator()?;
            let coeffs = orbit_coefficients(&n);
            let mut orbit: BTreeMap<i32, [C64; 4]> = BTreeMap::new();
            for (k, c) in coeffs.iter().enumerate() {
                for (&e, v) in &pi.terms {
                    let w = apply_c(c, v);
                    let slot = orbit.entry(e + k as i32).or_insert([zero; 4]);
                    for j in 0..4 {
                        slot[j] += w[j];
                    }
                }
            }
            let finite = orbit.get(&0).copied().unwrap_or([zero; 4]);
            let lead = orbit
                .iter()
                .rev()
                .find(|(_, v)| v.iter().any(|x| x.norm() > 0.0))
                .map(|(_, v)| *v)
                .unwrap_or([zero; 4]);
            vec![distance_to_conjugate_span(&lead, &finite)]
        }
    })
}

/// Relative distance of v from span_C{λ, λ̄}.
fn distance_to_conjugate_span(v: &[C64; 4], lambda: &[C64; 4]) -> f64 {
    let vn = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if vn == 0.0 {
        return 0.0;
    }
    let cols = [*lambda, lambda.map(|x| x.conj())];
    let m = nalgebra::DMatrix::from_fn(4, 2, |r, c| cols[c][r]);
    let rhs = nalgebra::DVector::from_fn(4, |r, _| v[r] / vn);
    let svd = m.clone().svd(true, true);
    match svd.solve(&rhs, 1e-12) {
        Ok(x) => (&m * x - &rhs).norm(),
        Err(_) => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_cube() {
        let n = NilpotentEndo::n1(qi(1), qi(2), qi(3), qi(5));
        assert_eq!(n.index(), 4);
        assert_eq!(n.matrix().pow(3).get(3, 0), &qi(-2));
    }

    #[test]
    fn n3_requires_definite() {
        assert_eq!(NilpotentEndo::n3(qi(1), qi(2), qi(1)), Err(BoundaryError::NotPositive));
    }
}
