//! Numerical analytic continuation of solution frames of a companion system
//! along polylines in ℂ∖{0,1}, monodromy around the three punctures and the
//! connection matrix between the bases at 0 and ∞.
//!
//! A frame is an n×n matrix W whose column j holds (y_j, Θy_j, …, Θⁿ⁻¹y_j)
//! for the j-th basis solution. Continuing along a loop gives W·C; the
//! reported monodromy matrix is M = Cᵀ, so that the continued basis function
//! y_i equals Σ_j M[i][j]·y_j. With this convention the loop "γ₁ then γ₂"
//! has matrix M(γ₁)·M(γ₂).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{q_to_f64, Matrix, Q};
use crate::hyperseries::{FrobeniusTable, HGParams, SeriesError};
use crate::picard_fuchs::{build_operator, companion, CompanionSystem};

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("path comes within {distance:.3e} of a singular point at {point} (clearance {clearance})")]
    PunctureTooClose { point: String, distance: f64, clearance: f64 },
    #[error("Taylor step at {0} did not reach the local tolerance")]
    StepFailure(String),
    #[error("invalid path: {0}")]
    BadPath(String),
    #[error("frame at {0} is singular")]
    SingularFrame(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Orientation of a closed loop in the t-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

/// Puncture of ℙ¹∖{0,1,∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Puncture {
    Zero,
    One,
    Infinity,
}

impl FromStr for Puncture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Puncture::Zero),
            "1" => Ok(Puncture::One),
            "inf" | "infinity" => Ok(Puncture::Infinity),
            _ => Err(format!("unknown puncture {s:?}, expected 0, 1 or inf")),
        }
    }
}

impl fmt::Display for Puncture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Puncture::Zero => "0",
            Puncture::One => "1",
            Puncture::Infinity => "inf",
        })
    }
}

/// Polyline in the t-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    points: Vec<Complex64>,
}

impl Path {
    pub fn new(points: Vec<Complex64>) -> Result<Self, MonodromyError> {
        if points.is_empty() {
            return Err(MonodromyError::BadPath("no points".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(MonodromyError::BadPath("repeated consecutive point".into()));
        }
        Ok(Path { points })
    }

    pub fn point(p: Complex64) -> Self {
        Path { points: vec![p] }
    }

    pub fn segment(a: Complex64, b: Complex64) -> Result<Self, MonodromyError> {
        Self::new(vec![a, b])
    }

    /// Full circle starting and ending at `center + radius·e^{iθ₀}`.
    pub fn circle(
        center: Complex64,
        radius: f64,
        start_angle: f64,
        orientation: Orientation,
        vertices: usize,
    ) -> Self {
        let sign = match orientation {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        };
        let points = (0..=vertices)
            .map(|k| {
                let th = start_angle + sign * 2.0 * PI * (k as f64) / vertices as f64;
                center + Complex64::from_polar(radius, th)
            })
            .collect::<Vec<_>>();
        let mut points = points;
        points[vertices] = points[0];
        Path { points }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn start(&self) -> Complex64 {
        self.points[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.points.last().expect("nonempty")
    }

    pub fn is_closed(&self) -> bool {
        self.points.len() > 1 && self.start() == self.end()
    }

    pub fn reversed(&self) -> Self {
        Path { points: self.points.iter().rev().copied().collect() }
    }

    /// This path followed by `other`, which must start where this one ends.
    pub fn then(&self, other: &Path) -> Result<Self, MonodromyError> {
        if (self.end() - other.start()).norm() > 1e-14 {
            return Err(MonodromyError::BadPath("paths do not join".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Path { points })
    }

    /// Smallest distance from the path to 0 and to 1.
    pub fn clearance(&self) -> (f64, Complex64) {
        let punctures = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let mut best = (f64::INFINITY, punctures[0]);
        for p in punctures {
            let d = if self.points.len() == 1 {
                (self.points[0] - p).norm()
            } else {
                self.points
                    .windows(2)
                    .map(|w| segment_distance(w[0], w[1], p))
                    .fold(f64::INFINITY, f64::min)
            };
            if d < best.0 {
                best = (d, p);
            }
        }
        best
    }

    pub fn check_clearance(&self, delta: f64) -> Result<(), MonodromyError> {
        let (d, p) = self.clearance();
        if d < delta {
            return Err(MonodromyError::PunctureTooClose {
                point: format!("{p}"),
                distance: d,
                clearance: delta,
            });
        }
        Ok(())
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let s = ((p - a) * ab.conj()).re / ab.norm_sqr();
    let s = s.clamp(0.0, 1.0);
    (a + ab * s - p).norm()
}

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    /// Local truncation tolerance per step, relative to the frame size.
    pub tol: f64,
    /// Minimum distance from the path to 0 and 1.
    pub clearance: f64,
    /// Step length as a fraction of the distance to the nearest singular point.
    pub step_ratio: f64,
    /// Largest Taylor order tried before giving up.
    pub max_order: usize,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { tol: 1e-12, clearance: 0.05, step_ratio: 0.5, max_order: 400 }
    }
}

/// End frame and accumulated local-error estimate of a transport.
#[derive(Clone, Debug)]
pub struct Transported {
    pub frame: CMat,
    pub error_estimate: f64,
    pub steps: usize,
}

/// One Taylor step of dW/dx = (A₀/x + A₁/(x−1))W from c to c + h.
fn taylor_step(
    a0: &CMat,
    a1: &CMat,
    w: &CMat,
    c: Complex64,
    h: Complex64,
    opts: &TransportOptions,
) -> Result<(CMat, f64), MonodromyError> {
    let scale = w.norm().max(f64::MIN_POSITIVE);
    let ic = 1.0 / c;
    let ic1 = 1.0 / (c - 1.0);
    // g0[k] = (−1)^k / c^{k+1}, g1[k] = (−1)^k / (c−1)^{k+1}
    let mut g0 = vec![ic];
    let mut g1 = vec![ic1];
    let mut p0: Vec<CMat> = vec![a0 * w];
    let mut p1: Vec<CMat> = vec![a1 * w];
    let mut out = w.clone();
    let mut hp = Complex64::new(1.0, 0.0);
    let mut small_run = 0;
    for m in 0..opts.max_order {
        let mut next = CMat::zeros(w.nrows(), w.ncols());
        for k in 0..=m {
            next += &p0[m - k] * g0[k] + &p1[m - k] * g1[k];
        }
        next /= Complex64::new(m as f64 + 1.0, 0.0);
        hp *= h;
        let term = &next * hp;
        let tn = term.norm() / scale;
        out += term;
        p0.push(a0 * &next);
        p1.push(a1 * &next);
        g0.push(-g0[m] * ic);
        g1.push(-g1[m] * ic1);
        if tn < opts.tol * 1e-3 {
            small_run += 1;
            if small_run >= 3 && m >= 4 {
                return Ok((out, tn * scale));
            }
        } else {
            small_run = 0;
        }
    }
    Err(MonodromyError::StepFailure(format!("{c}")))
}

/// Continues the frame `init` along `path` (dY/dx = A(x)Y in the chart of `system`).
pub fn transport_with_estimate(
    system: &CompanionSystem,
    path: &Path,
    init: &CMat,
    opts: &TransportOptions,
) -> Result<Transported, MonodromyError> {
    path.check_clearance(opts.clearance)?;
    let a0 = system.a0_f64();
    let a1 = system.a1_f64();
    let mut w = init.clone();
    let mut err = 0.0;
    let mut steps = 0;
    for seg in path.points.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mut c = a;
        loop {
            let remaining = b - c;
            if remaining.norm() <= 1e-15 * (1.0 + b.norm()) {
                break;
            }
            let reach = opts.step_ratio * c.norm().min((c - 1.0).norm());
            let h = if remaining.norm() <= reach { remaining } else { remaining * (reach / remaining.norm()) };
            let (next, e) = taylor_step(&a0, &a1, &w, c, h, opts)?;
            w = next;
            err += e;
            steps += 1;
            c = if h == remaining { b } else { c + h };
        }
    }
    Ok(Transported { frame: w, error_estimate: err, steps })
}

pub fn transport(
    system: &CompanionSystem,
    path: &Path,
    init: &CMat,
    opts: &TransportOptions,
) -> Result<CMat, MonodromyError> {
    transport_with_estimate(system, path, init, opts).map(|t| t.frame)
}

/// Closed-form monodromy at 0 in the basis (f_{n−1}, …, f_0): M[i][j] = 1/(j−i)! for j ≥ i.
pub fn closed_form_m0(n: usize) -> Matrix<Q> {
    Matrix::from_fn(n, n, |i, j| {
        if j < i {
            Q::from_integer(0.into())
        } else {
            let f: num_bigint::BigInt = (1..=(j - i) as u64).product::<u64>().into();
            Q::new(1.into(), f)
        }
    })
}

/// Float log series x^σ·Σ_m p_m(x)·logᵐx·scale, used to build frames.
#[derive(Clone, Debug)]
struct FloatLog {
    parts: Vec<Vec<f64>>,
    sigma: f64,
    scale: Complex64,
}

impl FloatLog {
    fn theta(&self) -> FloatLog {
        let mut parts: Vec<Vec<f64>> = self
            .parts
            .iter()
            .map(|p| p.iter().enumerate().map(|(j, c)| c * (j as f64 + self.sigma)).collect())
            .collect();
        for m in 1..self.parts.len() {
            for (a, b) in parts[m - 1].iter_mut().zip(&self.parts[m]) {
                *a += m as f64 * b;
            }
        }
        FloatLog { parts, ..self.clone() }
    }

    fn eval(&self, x: Complex64, log: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        let mut lp = Complex64::new(1.0, 0.0);
        for p in &self.parts {
            let mut s = Complex64::new(0.0, 0.0);
            for c in p.iter().rev() {
                s = s * x + c;
            }
            v += s * lp;
            lp *= log;
        }
        v * (log * self.sigma).exp() * self.scale
    }
}

/// Which local basis a frame or monodromy matrix refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// (f_{n−1}, …, f_0) at t = 0.
    Zero,
    /// The solutions at ∞ in the order returned by `solutions_at_infinity`.
    Infinity,
}

/// Monodromy matrix with the loop that produced it.
#[derive(Clone, Debug)]
pub struct MonodromyMatrix {
    pub matrix: CMat,
    pub base: Complex64,
    pub frame: Frame,
    pub description: String,
    /// Accumulated Taylor truncation estimate, relative to the frame norm.
    pub residual: f64,
}

/// A hypergeometric family together with its companion system and local bases.
#[derive(Clone, Debug)]
pub struct Monodromy {
    params: HGParams,
    system: CompanionSystem,
    opts: TransportOptions,
}

fn series_order(x: f64) -> usize {
    if x <= 0.0 {
        return 8;
    }
    let m = (-42.0 / x.ln()).ceil() as usize + 24;
    m.min(20000)
}

fn invert(m: &CMat, at: Complex64) -> Result<CMat, MonodromyError> {
    m.clone().try_inverse().ok_or_else(|| MonodromyError::SingularFrame(format!("{at}")))
}

impl Monodromy {
    pub fn new(params: &HGParams) -> Result<Self, MonodromyError> {
        if !params.has_unit_lower() {
            return Err(SeriesError::InvalidParams(
                "monodromy frames need unit lower parameters".into(),
            )
            .into());
        }
        Ok(Monodromy {
            params: params.clone(),
            system: companion(&build_operator(params)),
            opts: TransportOptions::default(),
        })
    }

    pub fn with_options(mut self, opts: TransportOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn params(&self) -> &HGParams {
        &self.params
    }

    pub fn system(&self) -> &CompanionSystem {
        &self.system
    }

    pub fn options(&self) -> &TransportOptions {
        &self.opts
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    fn frame_from(&self, sols: &[FloatLog], x: Complex64, log: Complex64, sign: f64) -> CMat {
        let n = self.n();
        let mut w = CMat::zeros(n, n);
        for (j, s) in sols.iter().enumerate() {
            let mut d = s.clone();
            for i in 0..n {
                if i > 0 {
                    d = d.theta();
                }
                w[(i, j)] = d.eval(x, log) * sign.powi(i as i32);
            }
        }
        w
    }

    /// Frame of (f_{n−1}, …, f_0) at t with 0 < |t| < 1, principal log plus `branch` turns.
    pub fn zero_frame(&self, t: Complex64, branch: i64) -> Result<CMat, MonodromyError> {
        if t.norm() == 0.0 || t.norm() >= 1.0 {
            return Err(SeriesError::OutsideDisk(format!("{t}")).into());
        }
        let table = FrobeniusTable::new(&self.params, series_order(t.norm()))?;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let n = self.n();
        let h = table.coeffs();
        let sols: Vec<FloatLog> = (0..n)
            .rev()
            .map(|l| {
                let mut fact = 1.0;
                let parts = (0..=l)
                    .map(|m| {
                        if m > 0 {
                            fact *= m as f64;
                        }
                        h[l - m].iter().map(|c| c / fact).collect()
                    })
                    .collect();
                FloatLog { parts, sigma: 0.0, scale: two_pi_i.powi(-(l as i32)) }
            })
            .collect();
        let log = t.ln() + two_pi_i * branch as f64;
        Ok(self.frame_from(&sols, t, log, 1.0))
    }

    /// Frame of the solutions at ∞ at a point with |t| > 1 (Θ_t = −Θ_u).
    pub fn infinity_frame(&self, t: Complex64, branch: i64) -> Result<CMat, MonodromyError> {
        if t.norm() <= 1.0 {
            return Err(SeriesError::OutsideDisk(format!("{t}")).into());
        }
        let u = 1.0 / t;
        let order = series_order(u.norm());
        let rho = self.params.upper();
        let n = self.n();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let sols: Vec<FloatLog> = if rho.iter().all(|r| r == &rho[0]) {
            let table = FrobeniusTable::new(&self.params, order)?;
            let h = table.coeffs();
            let sigma = q_to_f64(&rho[0]);
            (0..n)
                .rev()
                .map(|l| {
                    let mut fact = 1.0;
                    let parts = (0..=l)
                        .map(|m| {
                            if m > 0 {
                                fact *= m as f64;
                            }
                            h[l - m].iter().map(|c| c / fact).collect()
                        })
                        .collect();
                    FloatLog { parts, sigma, scale: two_pi_i.powi(-(l as i32)) }
                })
                .collect()
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    if (&rho[i] - &rho[j]).is_integer() {
                        return Err(SeriesError::ResonantExponents(
                            "exponents at infinity collide partially".into(),
                        )
                        .into());
                    }
                }
            }
            let rf: Vec<f64> = rho.iter().map(q_to_f64).collect();
            (0..n)
                .map(|k| {
                    let mut c = Vec::with_capacity(order + 1);
                    let mut a = 1.0;
                    c.push(a);
                    for j in 0..order {
                        let jf = j as f64;
                        let mut num = (rf[k] + jf).powi(n as i32);
                        let mut den = jf + 1.0;
                        for (i, r) in rf.iter().enumerate() {
                            if i != k {
                                den *= 1.0 + rf[k] - r + jf;
                            }
                        }
                        num /= den;
                        a *= num;
                        c.push(a);
                    }
                    FloatLog { parts: vec![c], sigma: rf[k], scale: Complex64::new(1.0, 0.0) }
                })
                .collect()
        };
        let log = u.ln() + two_pi_i * branch as f64;
        Ok(self.frame_from(&sols, u, log, -1.0))
    }

    pub fn transport(&self, path: &Path, init: &CMat) -> Result<Transported, MonodromyError> {
        transport_with_estimate(&self.system, path, init, &self.opts)
    }

    /// Standard loop around a puncture based at `base`, counterclockwise in the t-plane.
    ///
    /// Around 0 and 1 this is the circle through `base` centred at the
    /// puncture. The loop for ∞ runs from `base` to 0.5 + 2i, around the
    /// circle |t − 1/2| = 2 and back, enclosing both finite punctures.
    pub fn standard_loop(&self, puncture: Puncture, base: Complex64) -> Result<Path, MonodromyError> {
        let vertices = 96;
        Ok(match puncture {
            Puncture::Zero => {
                Path::circle(Complex64::new(0.0, 0.0), base.norm(), base.arg(), Orientation::Ccw, vertices)
            }
            Puncture::One => {
                let one = Complex64::new(1.0, 0.0);
                Path::circle(one, (base - one).norm(), (base - one).arg(), Orientation::Ccw, vertices)
            }
            Puncture::Infinity => {
                let centre = Complex64::new(0.5, 0.0);
                let top = Complex64::new(0.5, 2.0);
                let ring = Path::circle(centre, 2.0, PI / 2.0, Orientation::Ccw, vertices);
                if (base - top).norm() < 1e-14 {
                    ring
                } else {
                    let tail = Path::segment(base, top)?;
                    tail.then(&ring)?.then(&tail.reversed())?
                }
            }
        })
    }

    /// Matrix of the continuation along a closed path in the 0-frame at its start.
    pub fn loop_matrix(&self, path: &Path) -> Result<(CMat, f64), MonodromyError> {
        if !path.is_closed() {
            return Err(MonodromyError::BadPath("loop is not closed".into()));
        }
        let base = path.start();
        let w = self.zero_frame(base, 0)?;
        let tr = self.transport(path, &w)?;
        let c = invert(&w, base)? * &tr.frame;
        Ok((c.transpose(), tr.error_estimate / w.norm()))
    }

    /// Monodromy around a puncture, counterclockwise, in the Frobenius frame at `base`.
    pub fn monodromy_loop(
        &self,
        puncture: Puncture,
        base: Complex64,
    ) -> Result<MonodromyMatrix, MonodromyError> {
        let path = self.standard_loop(puncture, base)?;
        let (matrix, residual) = self.loop_matrix(&path)?;
        Ok(MonodromyMatrix {
            matrix,
            base,
            frame: Frame::Zero,
            description: format!("counterclockwise loop around {puncture} based at {base}"),
            residual,
        })
    }

    /// Monodromy of the solutions at ∞ along the circle |t| = radius,
    /// counterclockwise in the t-plane, in the ∞-frame.
    pub fn infinity_local(&self, radius: f64) -> Result<MonodromyMatrix, MonodromyError> {
        let base = Complex64::new(radius, 0.0);
        let path = Path::circle(Complex64::new(0.0, 0.0), radius, 0.0, Orientation::Ccw, 96);
        let w = self.infinity_frame(base, 0)?;
        let tr = self.transport(&path, &w)?;
        let c = invert(&w, base)? * &tr.frame;
        Ok(MonodromyMatrix {
            matrix: c.transpose(),
            base,
            frame: Frame::Infinity,
            description: format!("counterclockwise circle |t| = {radius} in the basis at infinity"),
            residual: tr.error_estimate / w.norm(),
        })
    }

    /// Reference path from `base` to `target` through the upper half plane.
    pub fn upper_path(base: Complex64, target: Complex64) -> Result<Path, MonodromyError> {
        let lift = Complex64::new(0.0, 1.0);
        Path::new(vec![base, base + lift, target + lift, target])
    }

    /// P with (continued 0-basis)_i = Σ_j P[i][j]·(∞-basis)_j at the end of `path`.
    pub fn connection_along(&self, path: &Path) -> Result<CMat, MonodromyError> {
        let w0 = self.zero_frame(path.start(), 0)?;
        let tr = self.transport(path, &w0)?;
        let winf = self.infinity_frame(path.end(), 0)?;
        Ok((invert(&winf, path.end())? * tr.frame).transpose())
    }

    /// Connection matrix along the reference path from 1/2 to 2 through the upper half plane.
    pub fn connection_matrix(&self) -> Result<CMat, MonodromyError> {
        let path = Self::upper_path(Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0))?;
        self.connection_along(&path)
    }

    /// Loops around 0, 1 and ∞ at `base`, the orientation search for the
    /// product relation, and the conjugacy residuals involving P.
    pub fn relations(&self, base: Complex64) -> Result<RelationReport, MonodromyError> {
        let loops: Vec<Result<MonodromyMatrix, MonodromyError>> =
            [Puncture::Zero, Puncture::One, Puncture::Infinity]
                .par_iter()
                .map(|&p| self.monodromy_loop(p, base))
                .collect();
        let mut it = loops.into_iter();
        let m0 = it.next().expect("three loops")?;
        let m1 = it.next().expect("three loops")?;
        let minf = it.next().expect("three loops")?;
        let m0_inv = invert(&m0.matrix, base)?;
        let right = &minf.matrix * &m0_inv;
        let left = &m0_inv * &minf.matrix;
        let r_right = (&m1.matrix - right).norm();
        let r_left = (&m1.matrix - left).norm();
        let (order, m1_residual) = if r_right <= r_left {
            (ProductOrder::InfTimesZeroInverse, r_right)
        } else {
            (ProductOrder::ZeroInverseTimesInf, r_left)
        };
        let id = CMat::identity(self.n(), self.n());
        let minf_inv = invert(&minf.matrix, base)?;
        let around_all = match order {
            ProductOrder::InfTimesZeroInverse => &m1.matrix * &m0.matrix * &minf_inv,
            ProductOrder::ZeroInverseTimesInf => &m0.matrix * &m1.matrix * &minf_inv,
        };
        let composition_residual = (around_all - &id).norm();

        let p = self.connection_matrix()?;
        let p_inv = invert(&p, base)?;
        let local = self.infinity_local(2.0)?;
        let exact_m0 = to_cmat(&closed_form_m0(self.n()));
        let stated_relation_residual = (&local.matrix - &p * &exact_m0 * &p_inv).norm();
        let conjugacy_residual = (&minf.matrix - &p * &local.matrix * &p_inv).norm();
        Ok(RelationReport {
            m0,
            m1,
            minf,
            order,
            m1_residual,
            composition_residual,
            connection: p,
            infinity_local: local,
            stated_relation_residual,
            conjugacy_residual,
        })
    }
}

/// Which product of the 0- and ∞-loops equals the loop around 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOrder {
    /// M₁ = M∞·M₀⁻¹.
    InfTimesZeroInverse,
    /// M₁ = M₀⁻¹·M∞.
    ZeroInverseTimesInf,
}

impl fmt::Display for ProductOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductOrder::InfTimesZeroInverse => "M1 = Minf * M0^-1",
            ProductOrder::ZeroInverseTimesInf => "M1 = M0^-1 * Minf",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub m0: MonodromyMatrix,
    pub m1: MonodromyMatrix,
    /// The big counterclockwise loop enclosing 0 and 1.
    pub minf: MonodromyMatrix,
    pub order: ProductOrder,
    pub m1_residual: f64,
    /// ‖(loop around 0)(loop around 1)(loop around ∞ seen from ∞) − I‖ in the matching order.
    pub composition_residual: f64,
    pub connection: CMat,
    pub infinity_local: MonodromyMatrix,
    /// ‖M∞ − P·M₀·P⁻¹‖ with M∞ in the ∞-frame; not expected to vanish.
    pub stated_relation_residual: f64,
    /// ‖M_big − P·M∞·P⁻¹‖ with M_big the big loop in the 0-frame.
    pub conjugacy_residual: f64,
}

pub fn to_cmat(m: &Matrix<Q>) -> CMat {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(q_to_f64(m.get(i, j)), 0.0))
}

/// Number of singular values above `tol`.
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    m.clone().svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
}

/// Largest modulus of an entry strictly below the diagonal.
pub fn lower_residual(m: &CMat) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            r = r.max(m[(i, j)].norm());
        }
    }
    r
}
