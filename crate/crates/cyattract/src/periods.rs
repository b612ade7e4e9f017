//! Period vectors in the Frobenius and symplectic frames, the transition
//! matrix built from a cubic prepotential, and the local models at the three
//! kinds of one-parameter boundary points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{q, q_to_f64, GaussRat, Matrix, Q};
use crate::hyperseries::{frobenius_basis, FrobeniusTable, HGParams, LogSeries, SeriesError};
use crate::monodromy::CMat;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodsError {
    #[error("phi_111 vanishes, so the transition matrix is singular")]
    SingularPrepotential,
    #[error("pairing -i Pi^dagger Sigma Pi = {0:.3e} is not positive")]
    DegeneratePairing(f64),
    #[error("expected a vector in the {expected} frame, got {got}")]
    FrameMismatch { expected: String, got: String },
    #[error("|z| = {z:.3e} is outside the model region (radius {radius})")]
    ModelRegion { z: f64, radius: f64 },
    #[error("period vector is zero")]
    ZeroVector,
    #[error("symplectic form must be antisymmetric with determinant 1")]
    BadSymplecticForm,
    #[error("matrix is not unit lower triangular")]
    NotUnitTriangular,
    #[error("period vectors need a family of order 4, got {0}")]
    WrongOrder(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Kind of one-parameter boundary point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalKind {
    Conifold,
    Tyurin,
    Lcs,
}

impl FromStr for LocalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conifold" => Ok(LocalKind::Conifold),
            "tyurin" => Ok(LocalKind::Tyurin),
            "lcs" => Ok(LocalKind::Lcs),
            _ => Err(format!("unknown local model {s:?}")),
        }
    }
}

impl fmt::Display for LocalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalKind::Conifold => "conifold",
            LocalKind::Tyurin => "tyurin",
            LocalKind::Lcs => "lcs",
        })
    }
}

/// Basis a period vector is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameTag {
    Frobenius0,
    Infinity,
    Symplectic,
    Local(LocalKind),
}

impl FrameTag {
    /// Frames in which the symplectic pairing applies.
    pub fn is_symplectic(&self) -> bool {
        matches!(self, FrameTag::Symplectic | FrameTag::Local(_))
    }
}

impl fmt::Display for FrameTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameTag::Frobenius0 => f.write_str("frobenius0"),
            FrameTag::Infinity => f.write_str("infinity"),
            FrameTag::Symplectic => f.write_str("symplectic"),
            FrameTag::Local(k) => write!(f, "local({k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodVector {
    entries: [C64; 4],
    frame: FrameTag,
    point: C64,
}

impl PeriodVector {
    pub fn new(entries: [C64; 4], frame: FrameTag, point: C64) -> Result<Self, PeriodsError> {
        if entries.iter().all(|e| e.norm() == 0.0) {
            return Err(PeriodsError::ZeroVector);
        }
        Ok(PeriodVector { entries, frame, point })
    }

    pub fn entries(&self) -> &[C64; 4] {
        &self.entries
    }

    pub fn frame(&self) -> FrameTag {
        self.frame
    }

    pub fn point(&self) -> C64 {
        self.point
    }

    pub fn scale(&self, s: C64) -> PeriodVector {
        PeriodVector { entries: self.entries.map(|e| e * s), ..*self }
    }

    pub fn require_symplectic(&self) -> Result<(), PeriodsError> {
        if self.frame.is_symplectic() {
            Ok(())
        } else {
            Err(PeriodsError::FrameMismatch {
                expected: "symplectic".into(),
                got: self.frame.to_string(),
            })
        }
    }
}

/// Integer antisymmetric unimodular 4×4 form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm([[i64; 4]; 4]);

impl SymplecticForm {
    /// [[0, I₂], [−I₂, 0]].
    pub fn standard() -> Self {
        SymplecticForm([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    pub fn new(m: [[i64; 4]; 4]) -> Result<Self, PeriodsError> {
        for i in 0..4 {
            for j in 0..4 {
                if m[i][j] != -m[j][i] {
                    return Err(PeriodsError::BadSymplecticForm);
                }
            }
        }
        let det = Matrix::from_fn(4, 4, |i, j| Q::from_integer(m[i][j].into())).det();
        if !det.is_one() {
            return Err(PeriodsError::BadSymplecticForm);
        }
        Ok(SymplecticForm(m))
    }

    pub fn entries(&self) -> &[[i64; 4]; 4] {
        &self.0
    }

    /// Bilinear uᵀΣv.
    pub fn pair(&self, u: &[C64; 4], v: &[C64; 4]) -> C64 {
        let mut s = C64::zero();
        for i in 0..4 {
            for j in 0..4 {
                if self.0[i][j] != 0 {
                    s += u[i] * v[j] * self.0[i][j] as f64;
                }
            }
        }
        s
    }

    pub fn to_cmat(&self) -> CMat {
        DMatrix::from_fn(4, 4, |i, j| C64::new(self.0[i][j] as f64, 0.0))
    }
}

/// h(Π) = −iΠ†ΣΠ, real for antisymmetric Σ.
pub fn pairing(pi: &[C64; 4], sigma: &SymplecticForm) -> f64 {
    let conj = pi.map(|z| z.conj());
    (C64::new(0.0, -1.0) * sigma.pair(&conj, pi)).re
}

/// K = −log h(Π).
pub fn kahler_potential(pi: &PeriodVector, sigma: &SymplecticForm) -> Result<f64, PeriodsError> {
    pi.require_symplectic()?;
    let h = pairing(pi.entries(), sigma);
    if !(h > 0.0) {
        return Err(PeriodsError::DegeneratePairing(h));
    }
    Ok(-h.ln())
}

/// Coefficients of the cubic prepotential and the overall rational scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepotential {
    pub phi111: GaussRat,
    pub phi011: GaussRat,
    pub phi001: GaussRat,
    pub phi000: GaussRat,
    pub constant: Q,
}

impl Prepotential {
    pub fn new(phi111: GaussRat, phi011: GaussRat, phi001: GaussRat, phi000: GaussRat, constant: Q) -> Self {
        Prepotential { phi111, phi011, phi001, phi000, constant }
    }

    /// Preset for the order-4 ρ = 1/2 family; the symplectic pairing of
    /// S·ϖ is positive on the punctured disc 0 < |t| ≤ 0.8 with these values.
    pub fn halfs4_default() -> Self {
        let r = |x: Q| GaussRat::real(x);
        Prepotential::new(r(Q::from_integer((-16).into())), r(Q::zero()), r(q(-8, 3)), r(Q::zero()), Q::one())
    }
}

/// Basis change between two frames.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub matrix: CMat,
    pub source: FrameTag,
    pub target: FrameTag,
}

impl TransitionMatrix {
    pub fn apply(&self, v: &PeriodVector) -> Result<PeriodVector, PeriodsError> {
        if v.frame != self.source {
            return Err(PeriodsError::FrameMismatch {
                expected: self.source.to_string(),
                got: v.frame.to_string(),
            });
        }
        let mut out = [C64::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..4 {
                *o += self.matrix[(i, j)] * v.entries[j];
            }
        }
        PeriodVector::new(out, self.target, v.point)
    }

    pub fn inverse(&self) -> Option<TransitionMatrix> {
        self.matrix.clone().try_inverse().map(|m| TransitionMatrix {
            matrix: m,
            source: self.target,
            target: self.source,
        })
    }
}

/// The rational part of S, without the factor Const·(2πi)³.
pub fn transition_core(pre: &Prepotential) -> Matrix<GaussRat> {
    let z = GaussRat::zero;
    let o = GaussRat::one;
    let s = |x: &GaussRat, c: Q| x.clone() * GaussRat::real(c);
    Matrix::from_rows(vec![
        vec![s(&pre.phi000, q(-1, 3)), s(&pre.phi001, q(-1, 2)), z(), s(&pre.phi111, q(1, 6))],
        vec![s(&pre.phi111, q(-1, 2)), s(&pre.phi001, q(-1, 1)), s(&pre.phi111, q(-1, 2)), z()],
        vec![o(), z(), z(), z()],
        vec![z(), o(), z(), z()],
    ])
}

/// Exact value of det S / (Const⁴(2πi)¹²), namely φ₁₁₁²/12.
pub fn transition_core_det(pre: &Prepotential) -> GaussRat {
    transition_core(pre).det()
}

pub fn gauss_to_cmat(m: &Matrix<GaussRat>) -> CMat {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_c64())
}

/// S = Const·(2πi)³·core, mapping ϖ to the symplectic frame.
pub fn transition_s(pre: &Prepotential) -> Result<TransitionMatrix, PeriodsError> {
    if pre.phi111.is_zero() {
        return Err(PeriodsError::SingularPrepotential);
    }
    let factor = C64::new(0.0, 2.0 * PI).powi(3) * q_to_f64(&pre.constant);
    Ok(TransitionMatrix {
        matrix: gauss_to_cmat(&transition_core(pre)) * factor,
        source: FrameTag::Frobenius0,
        target: FrameTag::Symplectic,
    })
}

/// Unit lower triangular 4×4 matrix from (a₁₀, a₂₀, a₂₁, a₃₀, a₃₁, a₃₂).
pub fn unit_lower_triangular(a: &[GaussRat; 6]) -> Matrix<GaussRat> {
    let mut m = Matrix::<GaussRat>::identity(4);
    let slots = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];
    for (v, (i, j)) in a.iter().zip(slots) {
        m.set(i, j, v.clone());
    }
    m
}

pub fn is_unit_lower_triangular(m: &Matrix<GaussRat>) -> bool {
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            let e = m.get(i, j);
            if i == j {
                e.is_one()
            } else if j > i {
                e.is_zero()
            } else {
                true
            }
        })
    })
}

/// Frame change ϖ → Π by a unit lower triangular matrix.
pub fn frame_change_unit_triangular(m: &Matrix<GaussRat>) -> Result<TransitionMatrix, PeriodsError> {
    if m.rows() != 4 || m.cols() != 4 || !is_unit_lower_triangular(m) {
        return Err(PeriodsError::NotUnitTriangular);
    }
    Ok(TransitionMatrix {
        matrix: gauss_to_cmat(m),
        source: FrameTag::Frobenius0,
        target: FrameTag::Symplectic,
    })
}

/// A = A_ζ·A_log, both unit lower triangular.
pub fn factorized_frame_change(
    a_zeta: &Matrix<GaussRat>,
    a_log: &Matrix<GaussRat>,
) -> Result<Matrix<GaussRat>, PeriodsError> {
    if !is_unit_lower_triangular(a_zeta) || !is_unit_lower_triangular(a_log) {
        return Err(PeriodsError::NotUnitTriangular);
    }
    Ok(a_zeta.mul(a_log))
}

/// [[I, 0], [B, I]] for a real symmetric 2×2 block B; preserves the standard Σ.
pub fn symplectic_shear(b: [[f64; 2]; 2]) -> CMat {
    assert!((b[0][1] - b[1][0]).abs() == 0.0, "shear block must be symmetric");
    let mut m = CMat::identity(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(2 + i, j)] = C64::new(b[i][j], 0.0);
        }
    }
    m
}

/// Exact log series (f₃, f₂, f₁, f₀) of an order-4 family.
pub fn log_frobenius_series(params: &HGParams, order: usize) -> Result<[LogSeries; 4], PeriodsError> {
    if params.n() != 4 {
        return Err(PeriodsError::WrongOrder(params.n()));
    }
    let b = frobenius_basis(params, order)?;
    Ok(b.try_into().expect("four solutions"))
}

/// ϖ = (f₃, f₂, f₁, f₀) at t, with the largest tail estimate.
pub fn log_frobenius_vector(
    params: &HGParams,
    t: C64,
    order: usize,
) -> Result<(PeriodVector, f64), PeriodsError> {
    let series = log_frobenius_series(params, order)?;
    let mut entries = [C64::zero(); 4];
    let mut tail: f64 = 0.0;
    for (e, s) in entries.iter_mut().zip(series.iter()) {
        let (v, tl) = s.evaluate(t)?;
        *e = v;
        tail = tail.max(tl);
    }
    Ok((PeriodVector::new(entries, FrameTag::Frobenius0, t)?, tail))
}

/// Fast float evaluation of ϖ and dϖ/dt for an order-4 family on |t| < 1.
#[derive(Clone, Debug)]
pub struct FrobeniusEvaluator {
    table: FrobeniusTable,
    radius: f64,
}

impl FrobeniusEvaluator {
    /// Table sized for |t| ≤ radius < 1.
    pub fn new(params: &HGParams, radius: f64) -> Result<Self, PeriodsError> {
        if params.n() != 4 {
            return Err(PeriodsError::WrongOrder(params.n()));
        }
        let radius = radius.clamp(0.01, 0.999);
        let order = ((-40.0 / radius.ln()).ceil() as usize + 30).min(60000);
        Ok(FrobeniusEvaluator { table: FrobeniusTable::new(params, order)?, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// (ϖ(t), dϖ/dt) on the principal branch.
    pub fn eval(&self, t: C64) -> Result<([C64; 4], [C64; 4]), PeriodsError> {
        if t.norm() == 0.0 || t.norm() > self.radius {
            return Err(PeriodsError::ModelRegion { z: t.norm(), radius: self.radius });
        }
        let mut h = [C64::zero(); 4];
        let mut dh = [C64::zero(); 4];
        for (k, c) in self.table.coeffs().iter().enumerate() {
            let mut s = C64::zero();
            let mut ds = C64::zero();
            for (j, a) in c.iter().enumerate().rev() {
                s = s * t + a;
                if j > 0 {
                    ds = ds * t + a * j as f64;
                }
            }
            h[k] = s;
            dh[k] = ds;
        }
        let log = t.ln();
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let mut val = [C64::zero(); 4];
        let mut der = [C64::zero(); 4];
        for l in 0..4 {
            let mut v = C64::zero();
            let mut d = C64::zero();
            let mut lp = C64::new(1.0, 0.0);
            let mut lpm1 = C64::zero();
            let mut fact = 1.0;
            for m in 0..=l {
                if m > 0 {
                    fact *= m as f64;
                    lpm1 = lp;
                    lp *= log;
                }
                v += lp / fact * h[l - m];
                d += lp / fact * dh[l - m];
                if m > 0 {
                    d += lpm1 * m as f64 / fact * h[l - m] / t;
                }
            }
            let s = two_pi_i.powi(-(l as i32));
            val[3 - l] = v * s;
            der[3 - l] = d * s;
        }
        Ok((val, der))
    }
}

/// Default validity radius of the local models.
pub const MODEL_REGION: f64 = 0.5;

/// One of the three local boundary models with its scale parameter a.
#[derive(Clone, Debug)]
pub struct LocalModel {
    kind: LocalKind,
    a: C64,
    region: f64,
    lcs: Option<(FrobeniusEvaluator, CMat)>,
}

impl LocalModel {
    pub fn new(kind: LocalKind, a: C64) -> Self {
        Self::with_region(kind, a, MODEL_REGION)
    }

    pub fn with_region(kind: LocalKind, a: C64, region: f64) -> Self {
        let lcs = (kind == LocalKind::Lcs).then(|| {
            let ev = FrobeniusEvaluator::new(&HGParams::halfs(4), region).expect("order 4");
            let s = transition_s(&Prepotential::halfs4_default()).expect("phi_111 != 0").matrix;
            (ev, s)
        });
        LocalModel { kind, a, region, lcs }
    }

    pub fn kind(&self) -> LocalKind {
        self.kind
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn region(&self) -> f64 {
        self.region
    }

    fn check(&self, z: C64) -> Result<(), PeriodsError> {
        let bad = z.norm() >= self.region || (z.norm() == 0.0 && self.kind != LocalKind::Conifold);
        if bad {
            return Err(PeriodsError::ModelRegion { z: z.norm(), radius: self.region });
        }
        Ok(())
    }

    /// Π(z) and dΠ/dz.
    pub fn eval_with_derivative(&self, z: C64) -> Result<([C64; 4], [C64; 4]), PeriodsError> {
        self.check(z)?;
        let a = self.a;
        let i = C64::i();
        let pi8 = 8.0 * PI;
        let two_pi = 2.0 * PI;
        Ok(match self.kind {
            LocalKind::Conifold => {
                let (zl, dzl) = if z.norm() == 0.0 {
                    (C64::zero(), C64::new(f64::NEG_INFINITY, 0.0))
                } else {
                    (z * z.ln(), z.ln() + 1.0)
                };
                (
                    [1.0 + a * a * z * z / pi8, a * z, i - i * a * a * z * z / pi8, i * a / two_pi * zl],
                    [a * a * z / (4.0 * PI), a, -i * a * a * z / (4.0 * PI), i * a / two_pi * dzl],
                )
            }
            LocalKind::Tyurin => {
                let l = z.ln();
                let g = l - a * z * (l - 2.0);
                let dg = 1.0 / z - a * (l - 2.0) - a;
                let two_pi_i = C64::new(0.0, two_pi);
                (
                    [1.0 + a * z, i - i * a * z, g / two_pi_i, g / two_pi],
                    [a, -i * a, dg / two_pi_i, dg / two_pi],
                )
            }
            LocalKind::Lcs => {
                let (ev, s) = self.lcs.as_ref().expect("lcs evaluator");
                let (w, dw) = ev.eval(z)?;
                let mut p = [C64::zero(); 4];
                let mut dp = [C64::zero(); 4];
                for r in 0..4 {
                    for c in 0..4 {
                        p[r] += s[(r, c)] * w[c] * a;
                        dp[r] += s[(r, c)] * dw[c] * a;
                    }
                }
                (p, dp)
            }
        })
    }

    pub fn eval(&self, z: C64) -> Result<PeriodVector, PeriodsError> {
        let (p, _) = self.eval_with_derivative(z)?;
        PeriodVector::new(p, FrameTag::Local(self.kind), z)
    }
}

/// The displayed local period vector of the given kind at z.
pub fn local_model(kind: LocalKind, z: C64, a: C64) -> Result<PeriodVector, PeriodsError> {
    LocalModel::new(kind, a).eval(z)
}

/// Symplectic periods S·ϖ of the order-4 ρ = 1/2 family on |t| < radius.
#[derive(Clone, Debug)]
pub struct FamilyPeriods {
    evaluator: FrobeniusEvaluator,
    s: CMat,
}

impl FamilyPeriods {
    pub fn new(params: &HGParams, pre: &Prepotential, radius: f64) -> Result<Self, PeriodsError> {
        Ok(FamilyPeriods {
            evaluator: FrobeniusEvaluator::new(params, radius)?,
            s: transition_s(pre)?.matrix,
        })
    }

    pub fn radius(&self) -> f64 {
        self.evaluator.radius()
    }

    pub fn eval_with_derivative(&self, t: C64) -> Result<([C64; 4], [C64; 4]), PeriodsError> {
        let (w, dw) = self.evaluator.eval(t)?;
        let mut p = [C64::zero(); 4];
        let mut dp = [C64::zero(); 4];
        for r in 0..4 {
            for c in 0..4 {
                p[r] += self.s[(r, c)] * w[c];
                dp[r] += self.s[(r, c)] * dw[c];
            }
        }
        Ok((p, dp))
    }

    pub fn eval(&self, t: C64) -> Result<PeriodVector, PeriodsError> {
        let (p, _) = self.eval_with_derivative(t)?;
        PeriodVector::new(p, FrameTag::Symplectic, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conifold_at_origin() {
        let p = local_model(LocalKind::Conifold, C64::zero(), C64::new(1.0, 0.0)).unwrap();
        assert_eq!(p.entries(), &[C64::new(1.0, 0.0), C64::zero(), C64::i(), C64::zero()]);
        assert_eq!(pairing(p.entries(), &SymplecticForm::standard()), 2.0);
    }

    #[test]
    fn core_determinant() {
        let pre = Prepotential::halfs4_default();
        assert_eq!(transition_core_det(&pre), GaussRat::real(Q::from_integer(256.into()) / Q::from_integer(12.into())));
    }
}
