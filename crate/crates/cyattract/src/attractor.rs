//! Central charges, attractor residuals, gradient flow of |Z| on the moduli
//! coordinate, charge scans, flux superpotentials and sampled moment-map
//! inequalities.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monodromy::CMat;
use crate::periods::{
    pairing, FamilyPeriods, FrameTag, LocalKind, LocalModel, PeriodVector, PeriodsError,
    SymplecticForm,
};

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttractorError {
    #[error("pairing -i Pi^dagger Sigma Pi = {0:.3e} is not positive")]
    DegeneratePairing(f64),
    #[error("metric is not positive at {0}")]
    MetricDegenerate(String),
    #[error("flow step failed at {0}")]
    StepFailure(String),
    #[error("charge must be nonzero")]
    ZeroCharge,
    #[error("axio-dilaton must have positive imaginary part")]
    BadTau,
    #[error("cannot parse charge {0:?}")]
    ParseCharge(String),
    #[error(transparent)]
    Periods(#[from] PeriodsError),
}

/// Integral charge with components paired against (Π₁, Π₂, Π₃, Π₄) through Σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Charge(pub [i64; 4]);

impl Charge {
    pub fn real(&self) -> [f64; 4] {
        self.0.map(|x| x as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Charge {
        Charge(self.0.map(|x| -x))
    }

    /// Representative of {Q, −Q} whose first nonzero entry is positive.
    pub fn canonical(&self) -> Charge {
        match self.0.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => self.neg(),
            _ => *self,
        }
    }

    pub fn parse(s: &str) -> Result<Charge, AttractorError> {
        let v: Result<Vec<i64>, _> = s.split(',').map(|x| x.trim().parse::<i64>()).collect();
        match v {
            Ok(v) if v.len() == 4 => Ok(Charge([v[0], v[1], v[2], v[3]])),
            _ => Err(AttractorError::ParseCharge(s.into())),
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

fn pair_real(q: &[f64; 4], sigma: &SymplecticForm, v: &[C64; 4]) -> C64 {
    sigma.pair(&q.map(|x| C64::new(x, 0.0)), v)
}

fn checked_pairing(pi: &[C64; 4], sigma: &SymplecticForm) -> Result<f64, AttractorError> {
    let h = pairing(pi, sigma);
    if h > 0.0 {
        Ok(h)
    } else {
        Err(AttractorError::DegeneratePairing(h))
    }
}

/// Z = QᵀΣΠ / h(Π)^{1/2}.
pub fn central_charge(q: &[f64; 4], pi: &PeriodVector, sigma: &SymplecticForm) -> Result<C64, AttractorError> {
    pi.require_symplectic()?;
    central_charge_raw(q, pi.entries(), sigma)
}

fn central_charge_raw(q: &[f64; 4], pi: &[C64; 4], sigma: &SymplecticForm) -> Result<C64, AttractorError> {
    let h = checked_pairing(pi, sigma)?;
    Ok(pair_real(q, sigma, pi) / h.sqrt())
}

/// ‖CΠ + C̄Π̄ − Q‖ over the four real components.
pub fn attractor_residual(c: C64, pi: &PeriodVector, q: &[f64; 4]) -> f64 {
    let e = pi.entries();
    (0..4).map(|i| (2.0 * (c * e[i]).re - q[i]).powi(2)).sum::<f64>().sqrt()
}

/// Least-squares C for 2Re(CΠ) ≈ Q and the remaining residual.
pub fn fit_c(pi: &PeriodVector, q: &[f64; 4]) -> (C64, f64) {
    // 2Re(CΠ_i) = 2(c_r ReΠ_i − c_i ImΠ_i)
    let e = pi.entries();
    let a = DMatrix::from_fn(4, 2, |i, j| if j == 0 { 2.0 * e[i].re } else { -2.0 * e[i].im });
    let b = nalgebra::DVector::from_column_slice(q);
    let c = match a.clone().svd(true, true).solve(&b, 1e-14) {
        Ok(x) => C64::new(x[0], x[1]),
        Err(_) => C64::zero(),
    };
    (c, attractor_residual(c, pi, q))
}

/// Pairing of Q with the covariant derivative D_tΠ = Π' − (h_t/h)Π.
pub fn h21_projection(q: &[f64; 4], pi: &[C64; 4], dpi: &[C64; 4], sigma: &SymplecticForm) -> Result<C64, AttractorError> {
    let h = checked_pairing(pi, sigma)?;
    let ht = C64::new(0.0, -1.0) * sigma.pair(&pi.map(|z| z.conj()), dpi);
    let d: [C64; 4] = std::array::from_fn(|i| dpi[i] - pi[i] * (ht / h));
    Ok(pair_real(q, sigma, &d))
}

/// Where a flow can leave the region in which the model is trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExitKind {
    Lcs,
    Conifold,
    Tyurin,
    Pairing,
    SeriesDomain,
    /// The metric g_tt̄ stopped being positive.
    Metric,
}

impl fmt::Display for ExitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitKind::Lcs => "lcs",
            ExitKind::Conifold => "conifold",
            ExitKind::Tyurin => "tyurin",
            ExitKind::Pairing => "pairing",
            ExitKind::SeriesDomain => "series-domain",
            ExitKind::Metric => "metric",
        })
    }
}

/// How the gradient of |Z| and the metric are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Derivatives {
    ClosedForm,
    FiniteDifference(f64),
}

/// Period model on a single complex coordinate.
#[derive(Clone, Debug)]
pub enum Model {
    Local(LocalModel),
    /// S·ϖ for the order-4 ρ = 1/2 family on 0 < |t| < radius.
    Family(FamilyPeriods),
}

/// Default finite-difference step for the family model.
pub const FD_STEP: f64 = 1e-4;

impl Model {
    pub fn frame(&self) -> FrameTag {
        match self {
            Model::Local(m) => FrameTag::Local(m.kind()),
            Model::Family(_) => FrameTag::Symplectic,
        }
    }

    pub fn periods_with_derivative(&self, t: C64) -> Result<([C64; 4], [C64; 4]), PeriodsError> {
        match self {
            Model::Local(m) => m.eval_with_derivative(t),
            Model::Family(f) => f.eval_with_derivative(t),
        }
    }

    pub fn periods(&self, t: C64) -> Result<PeriodVector, PeriodsError> {
        let (p, _) = self.periods_with_derivative(t)?;
        PeriodVector::new(p, self.frame(), t)
    }

    pub fn default_derivatives(&self) -> Derivatives {
        match self {
            Model::Local(_) => Derivatives::ClosedForm,
            Model::Family(_) => Derivatives::FiniteDifference(FD_STEP),
        }
    }

    /// Boundary points of the chart with their kind.
    pub fn boundaries(&self) -> Vec<(C64, ExitKind)> {
        let zero = C64::zero();
        match self {
            Model::Local(m) => vec![(
                zero,
                match m.kind() {
                    LocalKind::Conifold => ExitKind::Conifold,
                    LocalKind::Tyurin => ExitKind::Tyurin,
                    LocalKind::Lcs => ExitKind::Lcs,
                },
            )],
            Model::Family(_) => vec![(zero, ExitKind::Lcs), (C64::new(1.0, 0.0), ExitKind::Conifold)],
        }
    }

    /// Radius of the disc about 0 on which the model is evaluated.
    pub fn domain_radius(&self) -> f64 {
        match self {
            Model::Local(m) => m.region(),
            Model::Family(f) => f.radius(),
        }
    }
}

/// Tolerances and step control for gradient flows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub max_steps: usize,
    pub initial_step: f64,
    /// Largest step as a fraction of the distance to the nearest boundary.
    pub max_fraction: f64,
    pub grad_tol: f64,
    pub zero_tol: f64,
    pub boundary_tol: f64,
    pub pairing_tol: f64,
    /// Relative slack allowed in the |Z| monotonicity test.
    pub slack: f64,
    /// Stop as soon as the gradient is below `grad_tol`.
    pub stop_at_critical: bool,
    pub derivatives: Option<Derivatives>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            max_steps: 5000,
            initial_step: 1e-2,
            max_fraction: 0.25,
            grad_tol: 1e-10,
            zero_tol: 1e-12,
            boundary_tol: 1e-3,
            pairing_tol: 1e-8,
            slack: 1e-14,
            stop_at_critical: true,
            derivatives: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlowStatus {
    /// Gradient below tolerance: attractor candidate.
    Converged,
    /// |Z| fell below the zero tolerance.
    Massless,
    Boundary(ExitKind),
    MaxSteps,
    /// Backtracking could not find a non-increasing step.
    Stalled,
    /// The start already has |Z| = 0.
    BpsTrivial,
}

impl fmt::Display for FlowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowStatus::Converged => f.write_str("converged"),
            FlowStatus::Massless => f.write_str("massless"),
            FlowStatus::Boundary(k) => write!(f, "boundary-{k}"),
            FlowStatus::MaxSteps => f.write_str("max-steps"),
            FlowStatus::Stalled => f.write_str("stalled"),
            FlowStatus::BpsTrivial => f.write_str("bps-trivial"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    pub rho: f64,
    pub t: C64,
    pub abs_z: f64,
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub trajectory: Vec<FlowPoint>,
    pub status: FlowStatus,
    pub metric: f64,
}

impl FlowState {
    pub fn end(&self) -> &FlowPoint {
        self.trajectory.last().expect("nonempty trajectory")
    }
}

/// |Z| at t for a real charge.
pub fn abs_z(model: &Model, q: &[f64; 4], t: C64, sigma: &SymplecticForm) -> Result<f64, AttractorError> {
    let (p, _) = model.periods_with_derivative(t)?;
    Ok(central_charge_raw(q, &p, sigma)?.norm())
}

fn kahler(model: &Model, t: C64, sigma: &SymplecticForm) -> Result<f64, AttractorError> {
    let (p, _) = model.periods_with_derivative(t)?;
    Ok(-checked_pairing(&p, sigma)?.ln())
}

/// ∂_t̄|Z| and g_tt̄ in closed form from Π and Π'.
fn closed_form(model: &Model, q: &[f64; 4], t: C64, sigma: &SymplecticForm) -> Result<(C64, f64, f64), AttractorError> {
    let (p, dp) = model.periods_with_derivative(t)?;
    let h = checked_pairing(&p, sigma)?;
    let pc = p.map(|z| z.conj());
    let dpc = dp.map(|z| z.conj());
    let mi = C64::new(0.0, -1.0);
    let ht = mi * sigma.pair(&pc, &dp);
    let htt = (mi * sigma.pair(&dpc, &dp)).re;
    let g = (ht.norm_sqr() - h * htt) / (h * h);
    let n = pair_real(q, sigma, &p);
    let dn = pair_real(q, sigma, &dp);
    let z = n.norm() / h.sqrt();
    let dbar_f = n * dn.conj() / h - ht.conj() * n.norm_sqr() / (h * h);
    let grad = if z > 0.0 { dbar_f / (2.0 * z) } else { C64::zero() };
    Ok((grad, g, z))
}

/// ∂_t̄|Z| = (∂_x + i∂_y)|Z|/2 by central differences of step `step`.
pub fn gradient_fd(model: &Model, q: &[f64; 4], t: C64, sigma: &SymplecticForm, step: f64) -> Result<C64, AttractorError> {
    let f = |s: C64| abs_z(model, q, s, sigma);
    let dx = (f(t + step)? - f(t - step)?) / (2.0 * step);
    let iy = C64::new(0.0, step);
    let dy = (f(t + iy)? - f(t - iy)?) / (2.0 * step);
    Ok(C64::new(dx, dy) / 2.0)
}

/// g_tt̄ = ∂_t∂_t̄K = ΔK/4 by the five-point Laplacian.
pub fn metric_fd(model: &Model, t: C64, sigma: &SymplecticForm, step: f64) -> Result<f64, AttractorError> {
    let k = |s: C64| kahler(model, s, sigma);
    let iy = C64::new(0.0, step);
    let lap = k(t + step)? + k(t - step)? + k(t + iy)? + k(t - iy)? - 4.0 * k(t)?;
    Ok(lap / (4.0 * step * step))
}

/// Closed-form ∂_t̄|Z| (requires |Z| > 0).
pub fn gradient_closed(model: &Model, q: &[f64; 4], t: C64, sigma: &SymplecticForm) -> Result<C64, AttractorError> {
    Ok(closed_form(model, q, t, sigma)?.0)
}

/// Closed-form g_tt̄.
pub fn metric_closed(model: &Model, t: C64, sigma: &SymplecticForm) -> Result<f64, AttractorError> {
    Ok(closed_form(model, &[0.0; 4], t, sigma)?.1)
}

/// ∂_t̄|Z| and g as used by the flow.
pub fn flow_gradient(
    model: &Model,
    q: &[f64; 4],
    t: C64,
    sigma: &SymplecticForm,
    mode: Derivatives,
) -> Result<(C64, f64), AttractorError> {
    match mode {
        Derivatives::ClosedForm => {
            let (g, m, _) = closed_form(model, q, t, sigma)?;
            Ok((g, m))
        }
        Derivatives::FiniteDifference(h) => {
            Ok((gradient_fd(model, q, t, sigma, h)?, metric_fd(model, t, sigma, h)?))
        }
    }
}

fn exit_at(model: &Model, t: C64, sigma: &SymplecticForm, opts: &FlowOptions) -> Option<ExitKind> {
    for (b, kind) in model.boundaries() {
        if (t - b).norm() < opts.boundary_tol {
            return Some(kind);
        }
    }
    if t.norm() >= model.domain_radius() {
        return Some(ExitKind::SeriesDomain);
    }
    match model.periods_with_derivative(t) {
        Ok((p, _)) if pairing(&p, sigma) >= opts.pairing_tol => None,
        Ok(_) => Some(ExitKind::Pairing),
        Err(_) => Some(ExitKind::SeriesDomain),
    }
}

fn room(model: &Model, t: C64) -> f64 {
    let mut d = model.domain_radius() - t.norm();
    for (b, _) in model.boundaries() {
        d = d.min((t - b).norm());
    }
    d.max(0.0)
}

/// Descends |Z| along dt/dρ = −g⁻¹∂_t̄|Z| with Heun steps and backtracking.
pub fn gradient_flow(
    model: &Model,
    q: &[f64; 4],
    start: C64,
    sigma: &SymplecticForm,
    opts: &FlowOptions,
) -> Result<FlowState, AttractorError> {
    let mode = opts.derivatives.unwrap_or_else(|| model.default_derivatives());
    if q.iter().all(|x| *x == 0.0) {
        return Err(AttractorError::ZeroCharge);
    }
    let mut t = start;
    let mut z = abs_z(model, q, t, sigma)?;
    let mut rho = 0.0;
    let mut u = 0.0;
    let mut traj = vec![FlowPoint { rho, t, abs_z: z, u }];
    let finish = |traj: Vec<FlowPoint>, status, metric| FlowState { trajectory: traj, status, metric };
    if z <= opts.zero_tol {
        return Ok(finish(traj, FlowStatus::BpsTrivial, f64::NAN));
    }
    if let Some(k) = exit_at(model, t, sigma, opts) {
        return Ok(finish(traj, FlowStatus::Boundary(k), f64::NAN));
    }
    let velocity = |s: C64| -> Result<(C64, f64, f64), AttractorError> {
        let (g, m) = flow_gradient(model, q, s, sigma, mode)?;
        if !(m > 0.0) {
            return Err(AttractorError::MetricDegenerate(format!("{s}")));
        }
        Ok((-g / m, m, g.norm() / m.sqrt()))
    };
    let mut d_rho = opts.initial_step;
    let mut metric = f64::NAN;
    for _ in 0..opts.max_steps {
        let (v, m, gnorm) = match velocity(t) {
            Ok(x) => x,
            Err(AttractorError::MetricDegenerate(_)) => {
                return Ok(finish(traj, FlowStatus::Boundary(ExitKind::Metric), metric));
            }
            Err(e) => return Err(e),
        };
        metric = m;
        if opts.stop_at_critical && gnorm < opts.grad_tol {
            return Ok(finish(traj, FlowStatus::Converged, metric));
        }
        let cap = opts.max_fraction * room(model, t);
        let mut accepted = None;
        for _ in 0..80 {
            let mut step = d_rho;
            if v.norm() * step > cap {
                step = cap / v.norm();
            }
            let trial = t + v * step;
            if exit_at(model, trial, sigma, opts).is_some() && room(model, trial) <= 0.0 {
                d_rho = step * 0.5;
                continue;
            }
            let v1 = match velocity(trial) {
                Ok((v1, _, _)) => v1,
                Err(_) => {
                    d_rho = step * 0.5;
                    continue;
                }
            };
            let next = t + (v + v1) * (step / 2.0);
            match abs_z(model, q, next, sigma) {
                Ok(zn) if zn <= z * (1.0 + opts.slack) => {
                    accepted = Some((next, zn, step));
                    break;
                }
                _ => d_rho = step * 0.5,
            }
        }
        let Some((next, zn, step)) = accepted else {
            let status = if gnorm < opts.grad_tol { FlowStatus::Converged } else { FlowStatus::Stalled };
            return Ok(finish(traj, status, metric));
        };
        u -= step * u.exp() * z;
        rho += step;
        t = next;
        z = zn;
        traj.push(FlowPoint { rho, t, abs_z: z, u });
        d_rho = step * 1.5;
        if z <= opts.zero_tol {
            return Ok(finish(traj, FlowStatus::Massless, metric));
        }
        if let Some(k) = exit_at(model, t, sigma, opts) {
            return Ok(finish(traj, FlowStatus::Boundary(k), metric));
        }
    }
    Ok(finish(traj, FlowStatus::MaxSteps, metric))
}

/// One (charge, start) result of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub charge: Charge,
    pub start: C64,
    pub status: String,
    pub endpoint: C64,
    pub abs_z: f64,
    /// Attractor location: the endpoint of a converged flow, or a boundary
    /// point where the model is defined and |Z| vanishes.
    pub attractor: Option<C64>,
    pub residual: f64,
    /// Message when the flow could not be run.
    pub error: Option<String>,
    /// Whether rounding 2Re(CΠ) with the fitted C returns the charge.
    pub integral: bool,
}

/// All charges in the box up to sign, excluding 0.
pub fn charges_in_box(radius: i64) -> Vec<Charge> {
    let r = radius;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    let q = Charge([a, b, c, d]);
                    if !q.is_zero() && q.canonical() == q {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

/// Flows every canonical charge in the box from every sample point.
pub fn charge_scan(
    model: &Model,
    box_radius: i64,
    starts: &[C64],
    sigma: &SymplecticForm,
    opts: &FlowOptions,
) -> Vec<ScanEntry> {
    let mut starts = starts.to_vec();
    starts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let charges = charges_in_box(box_radius);
    let jobs: Vec<(Charge, C64)> =
        charges.iter().flat_map(|q| starts.iter().map(move |s| (*q, *s))).collect();
    let mut out: Vec<ScanEntry> = jobs
        .par_iter()
        .map(|&(q, s)| scan_one(model, q, s, sigma, opts))
        .collect();
    out.sort_by(|a, b| {
        a.charge
            .cmp(&b.charge)
            .then(a.start.re.total_cmp(&b.start.re))
            .then(a.start.im.total_cmp(&b.start.im))
    });
    out
}

fn scan_one(model: &Model, q: Charge, start: C64, sigma: &SymplecticForm, opts: &FlowOptions) -> ScanEntry {
    let qr = q.real();
    let failed = |status: String| ScanEntry {
        charge: q,
        start,
        status: "error".into(),
        endpoint: start,
        abs_z: f64::NAN,
        attractor: None,
        residual: f64::NAN,
        error: Some(status),
        integral: false,
    };
    let flow = match gradient_flow(model, &qr, start, sigma, opts) {
        Ok(f) => f,
        Err(e) => return failed(e.to_string()),
    };
    let end = *flow.end();
    let attractor = match flow.status {
        FlowStatus::Converged | FlowStatus::Massless => Some(end.t),
        FlowStatus::Boundary(_) => model
            .boundaries()
            .into_iter()
            .map(|(b, _)| b)
            .filter(|b| (end.t - b).norm() < opts.boundary_tol)
            .find(|b| matches!(abs_z(model, &qr, *b, sigma), Ok(v) if v <= opts.zero_tol)),
        _ => None,
    };
    let at = attractor.unwrap_or(end.t);
    let (residual, integral) = match model.periods(at) {
        Ok(p) => {
            let (c, r) = fit_c(&p, &qr);
            let e = p.entries();
            let round: Vec<i64> = (0..4).map(|i| (2.0 * (c * e[i]).re).round() as i64).collect();
            (r, round == q.0)
        }
        Err(_) => (f64::NAN, false),
    };
    ScanEntry {
        charge: q,
        start,
        status: flow.status.to_string(),
        endpoint: end.t,
        abs_z: attractor.map_or(end.abs_z, |a| abs_z(model, &qr, a, sigma).unwrap_or(end.abs_z)),
        attractor,
        residual,
        error: None,
        integral,
    }
}

/// Flux integers (f, h) and the axio-dilaton τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxPair {
    f: [i64; 4],
    h: [i64; 4],
    tau: C64,
}

impl FluxPair {
    pub fn new(f: [i64; 4], h: [i64; 4], tau: C64) -> Result<Self, AttractorError> {
        if !(tau.im > 0.0) {
            return Err(AttractorError::BadTau);
        }
        Ok(FluxPair { f, h, tau })
    }

    pub fn f(&self) -> &[i64; 4] {
        &self.f
    }

    pub fn h(&self) -> &[i64; 4] {
        &self.h
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxResult {
    pub w: C64,
    pub d_tau: C64,
    pub d_t: C64,
}

/// W = (f − τh)ᵀΣΠ with D_τW and D_tW, given Π and ∂_tΠ.
pub fn flux_superpotential(
    flux: &FluxPair,
    pi: &[C64; 4],
    dpi: &[C64; 4],
    sigma: &SymplecticForm,
) -> Result<FluxResult, AttractorError> {
    let h = checked_pairing(pi, sigma)?;
    let tau = flux.tau;
    let g: [C64; 4] = std::array::from_fn(|i| C64::new(flux.f[i] as f64, 0.0) - tau * flux.h[i] as f64);
    let w = sigma.pair(&g, pi);
    let hq = flux.h.map(|x| x as f64);
    let dw_tau = -pair_real(&hq, sigma, pi);
    let dk_tau = -1.0 / (tau - tau.conj());
    let ht = C64::new(0.0, -1.0) * sigma.pair(&pi.map(|z| z.conj()), dpi);
    let dk_t = -ht / h;
    let dw_t = sigma.pair(&g, dpi);
    Ok(FluxResult { w, d_tau: dw_tau + dk_tau * w, d_t: dw_t + dk_t * w })
}

/// Flux superpotential of a model at t, with ∂_tΠ from the model.
pub fn flux_at(flux: &FluxPair, model: &Model, t: C64, sigma: &SymplecticForm) -> Result<FluxResult, AttractorError> {
    let (p, dp) = model.periods_with_derivative(t)?;
    flux_superpotential(flux, &p, &dp, sigma)
}

/// Outcome of the sampled group-perturbation and moment-weight checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub samples: usize,
    pub violations: usize,
    /// Perturbations whose pairing left the positive cone (not counted).
    pub degenerate: usize,
    pub abs_z: f64,
    /// Smallest |Z|(gΠ) − |Z|(Π) over the samples.
    pub worst_margin: f64,
    pub identity_gap: f64,
    /// (t, ⟨μ(exp(itζ)x), ζ⟩/|ζ|) along the ray.
    pub weight_trend: Vec<(f64, f64)>,
    /// Normalized limit estimates for ζ and 2ζ.
    pub weight_limits: (f64, f64),
}

/// Random X in sp(4, ℂ) for the standard Σ, normalized to Frobenius norm 1.
pub fn random_sp4(rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(4, 4, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let s = &a + a.transpose();
    let sig = SymplecticForm::standard().to_cmat();
    let x = -(sig * s);
    let n = x.norm();
    x / C64::new(n, 0.0)
}

fn apply(g: &CMat, p: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| g[(i, j)] * p[j]).sum())
}

/// log|Z| along exp(isζ) applied to Π.
fn log_z_along(q: &[f64; 4], p: &[C64; 4], zeta: &CMat, s: f64, sigma: &SymplecticForm) -> Option<f64> {
    let g = (zeta * C64::new(0.0, s)).exp();
    let gp = apply(&g, p);
    central_charge_raw(q, &gp, sigma).ok().map(|z| z.norm().ln())
}

/// ⟨μ(exp(itζ)x), ζ⟩ taken as d/ds log|Z| along exp(isζ) at s = t.
fn weight_at(q: &[f64; 4], p: &[C64; 4], zeta: &CMat, t: f64, sigma: &SymplecticForm) -> Option<f64> {
    let e = 1e-5;
    let a = log_z_along(q, p, zeta, t + e, sigma)?;
    let b = log_z_along(q, p, zeta, t - e, sigma)?;
    Some((a - b) / (2.0 * e))
}

/// Kirwan–Ness and moment-weight sampling at a point of a model.
pub fn moment_checks(
    model: &Model,
    point: C64,
    q: &[f64; 4],
    samples: usize,
    epsilon: f64,
    tol: f64,
    seed: u64,
    sigma: &SymplecticForm,
) -> Result<MomentReport, AttractorError> {
    let p = *model.periods(point)?.entries();
    let z0 = central_charge_raw(q, &p, sigma)?.norm();
    let id = CMat::identity(4, 4);
    let identity_gap = (central_charge_raw(q, &apply(&id, &p), sigma)?.norm() - z0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut degenerate = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let x = random_sp4(&mut rng);
        let g = (x * C64::new(epsilon, 0.0)).exp();
        match central_charge_raw(q, &apply(&g, &p), sigma) {
            Ok(z) => {
                let margin = z.norm() - z0;
                worst = worst.min(margin);
                if z0 > z.norm() + tol {
                    violations += 1;
                }
            }
            Err(_) => degenerate += 1,
        }
    }
    let x = random_sp4(&mut rng);
    let zeta = (&x - x.adjoint()) / C64::new(2.0, 0.0);
    let zn = zeta.norm();
    let zeta2 = &zeta * C64::new(2.0, 0.0);
    let times = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];
    let weight_trend = times
        .iter()
        .filter_map(|&t| weight_at(q, &p, &zeta, t, sigma).map(|w| (t, w / zn)))
        .collect();
    let last = *times.last().expect("nonempty");
    let w1 = weight_at(q, &p, &zeta, last, sigma).map_or(f64::NAN, |w| w / zn);
    let w2 = weight_at(q, &p, &zeta2, last, sigma).map_or(f64::NAN, |w| w / (2.0 * zn));
    Ok(MomentReport {
        samples,
        violations,
        degenerate,
        abs_z: z0,
        worst_margin: worst,
        identity_gap,
        weight_trend,
        weight_limits: (w1, w2),
    })
}
