//! Generalized hypergeometric series, Frobenius log-bases at t = 0 and
//! solution bases at t = infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{q, q_string, q_to_f64, qi, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("invalid hypergeometric parameters: {0}")]
    InvalidParams(String),
    #[error("series are in different variables")]
    MixedVariables,
    #[error("point {0} is outside the disc of convergence")]
    OutsideDisk(String),
    #[error("exponents at infinity collide: {0}")]
    ResonantExponents(String),
}

/// Expansion variable of a series: `t` near 0 or `u = 1/t` near infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    T,
    InvT,
}

/// Parameters of nF(n-1)(upper; lower | t).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HGParams {
    upper: Vec<Q>,
    lower: Vec<Q>,
}

impl HGParams {
    pub fn new(upper: Vec<Q>, lower: Vec<Q>) -> Result<Self, SeriesError> {
        if upper.is_empty() {
            return Err(SeriesError::InvalidParams("no upper parameters".into()));
        }
        if lower.len() + 1 != upper.len() {
            return Err(SeriesError::InvalidParams(format!(
                "expected {} lower parameters, got {}",
                upper.len() - 1,
                lower.len()
            )));
        }
        if let Some(b) = lower.iter().find(|b| b.is_integer() && !b.is_positive()) {
            return Err(SeriesError::InvalidParams(format!(
                "lower parameter {} is a nonpositive integer",
                q_string(b)
            )));
        }
        Ok(HGParams { upper, lower })
    }

    /// All lower parameters equal to 1.
    pub fn unit_lower(upper: Vec<Q>) -> Result<Self, SeriesError> {
        let n = upper.len();
        Self::new(upper, vec![Q::one(); n.saturating_sub(1)])
    }

    /// Θⁿ − s(Θ+1/2)ⁿ.
    pub fn halfs(n: usize) -> Self {
        Self::unit_lower(vec![q(1, 2); n]).expect("n >= 1")
    }

    /// Mirror family of order n+1 with exponents k/(n+2), k = 1..n+1.
    pub fn dwork(n: usize) -> Self {
        let d = n as i64 + 2;
        Self::unit_lower((1..=n as i64 + 1).map(|k| q(k, d)).collect()).expect("n >= 1")
    }

    /// Parses `halfs-N` or `dwork-N`.
    pub fn preset(name: &str) -> Result<Self, SeriesError> {
        let bad = || SeriesError::InvalidParams(format!("unknown family preset {name:?}"));
        let (kind, num) = name.split_once('-').ok_or_else(bad)?;
        let n: usize = num.parse().map_err(|_| bad())?;
        if n == 0 || n > 12 {
            return Err(bad());
        }
        match kind {
            "halfs" => Ok(Self::halfs(n)),
            "dwork" => Ok(Self::dwork(n)),
            _ => Err(bad()),
        }
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self) -> &[Q] {
        &self.upper
    }

    pub fn lower(&self) -> &[Q] {
        &self.lower
    }

    /// Local exponents at infinity reduced into [0, 1).
    pub fn beta(&self) -> Vec<Q> {
        self.upper.iter().map(|r| r - r.floor()).collect()
    }

    pub fn has_unit_lower(&self) -> bool {
        self.lower.iter().all(One::is_one)
    }
}

/// (ρ)_j = ρ(ρ+1)…(ρ+j−1).
pub fn pochhammer(rho: &Q, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j {
        acc *= rho + qi(i as i64);
    }
    acc
}

/// Truncated power series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    coeffs: Vec<Q>,
    var: Var,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Q>, var: Var) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        PowerSeries { coeffs, var }
    }

    pub fn zero(order: usize, var: Var) -> Self {
        Self::new(vec![Q::zero(); order + 1], var)
    }

    pub fn one(order: usize, var: Var) -> Self {
        let mut s = Self::zero(order, var);
        s.coeffs[0] = Q::one();
        s
    }

    /// Σ xʲ, the identity for the Hadamard product.
    pub fn geometric(order: usize, var: Var) -> Self {
        Self::new(vec![Q::one(); order + 1], var)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Q {
        self.coeffs.get(j).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, Q::zero());
        Self::new(c, self.var)
    }

    fn zip(&self, o: &Self, f: impl Fn(&Q, &Q) -> Q) -> Self {
        let m = self.order().min(o.order());
        Self::new((0..=m).map(|j| f(&self.coeffs[j], &o.coeffs[j])).collect(), self.var)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * s).collect(), self.var)
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, o: &Self) -> Self {
        let m = self.order().min(o.order());
        let mut c = vec![Q::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(m + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self::new(c, self.var)
    }

    /// (Θ + σ) applied termwise: a_j ↦ (j + σ) a_j.
    pub fn theta_shifted(&self, sigma: &Q) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().map(|(j, a)| a * (qi(j as i64) + sigma)).collect(),
            self.var,
        )
    }

    /// Multiplication by the variable, keeping the order.
    pub fn shift_up(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len());
        c.push(Q::zero());
        c.extend(self.coeffs[..self.order()].iter().cloned());
        Self::new(c, self.var)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(q_to_f64).collect()
    }

    /// Horner sum at x (already in the series variable) and a tail estimate.
    pub fn eval_at(&self, x: Complex64) -> (Complex64, f64) {
        let c = self.to_f64();
        eval_f64_series(&c, x)
    }

    /// Exact truncated sum at a rational point.
    pub fn eval_exact(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
    }
}

/// Horner evaluation of a float coefficient list with a geometric-ratio tail estimate.
///
/// The tail estimate takes the largest ratio |a_j/a_{j−1}|·|x| over the last
/// few nonzero coefficients and sums the implied geometric tail. It is a
/// heuristic, not a rigorous bound.
pub fn eval_f64_series(c: &[f64], x: Complex64) -> (Complex64, f64) {
    let mut v = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        v = v * x + a;
    }
    (v, tail_estimate(c, x.norm()))
}

pub fn tail_estimate(c: &[f64], ax: f64) -> f64 {
    let m = c.len() - 1;
    if ax == 0.0 {
        return 0.0;
    }
    let window = 8.min(m);
    let mut ratio: f64 = 0.0;
    let mut seen = false;
    for j in m + 1 - window..=m {
        if j == 0 {
            continue;
        }
        let (a, b) = (c[j].abs(), c[j - 1].abs());
        if b > 0.0 {
            ratio = ratio.max(a / b);
            seen = true;
        } else if a > 0.0 {
            return f64::INFINITY;
        }
    }
    if !seen {
        return 0.0;
    }
    let r = ratio * ax;
    if r >= 1.0 {
        return f64::INFINITY;
    }
    c[m].abs() * ax.powi(m as i32) * r / (1.0 - r)
}

pub fn hadamard(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries, SeriesError> {
    if a.var != b.var {
        return Err(SeriesError::MixedVariables);
    }
    Ok(a.zip(b, |x, y| x * y))
}

/// a_j = ∏(ρ_k)_j / (∏(b_i)_j · j!), built by the term-ratio recursion.
pub fn hg_series(params: &HGParams, order: usize) -> Result<PowerSeries, SeriesError> {
    if order < 1 {
        return Err(SeriesError::InvalidParams("order must be at least 1".into()));
    }
    let mut c = Vec::with_capacity(order + 1);
    c.push(Q::one());
    for j in 0..order {
        let jq = qi(j as i64);
        let mut num = Q::one();
        for r in &params.upper {
            num *= r + &jq;
        }
        let mut den = qi(j as i64 + 1);
        for b in &params.lower {
            den *= b + &jq;
        }
        let next = &c[j] * num / den;
        c.push(next);
    }
    Ok(PowerSeries::new(c, Var::T))
}

/// Σ_j p_j(x)·(log x)^j scaled by (2πi)^k · x^σ.
///
/// The (2πi) power is kept as an integer grading so the parts stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSeries {
    parts: Vec<PowerSeries>,
    exponent: Q,
    two_pi_i_power: i32,
    branch: i64,
}

impl LogSeries {
    pub fn new(parts: Vec<PowerSeries>, exponent: Q, two_pi_i_power: i32) -> Self {
        assert!(!parts.is_empty());
        let var = parts[0].var();
        let order = parts[0].order();
        assert!(parts.iter().all(|p| p.var() == var && p.order() == order));
        LogSeries { parts, exponent, two_pi_i_power, branch: 0 }
    }

    pub fn from_series(p: PowerSeries) -> Self {
        Self::new(vec![p], Q::zero(), 0)
    }

    pub fn with_branch(mut self, branch: i64) -> Self {
        self.branch = branch;
        self
    }

    pub fn parts(&self) -> &[PowerSeries] {
        &self.parts
    }

    pub fn exponent(&self) -> &Q {
        &self.exponent
    }

    pub fn two_pi_i_power(&self) -> i32 {
        self.two_pi_i_power
    }

    pub fn branch(&self) -> i64 {
        self.branch
    }

    pub fn var(&self) -> Var {
        self.parts[0].var()
    }

    pub fn order(&self) -> usize {
        self.parts[0].order()
    }

    /// Highest power of log with a nonzero coefficient series.
    pub fn log_degree(&self) -> Option<usize> {
        self.parts.iter().rposition(|p| !p.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.log_degree().is_none()
    }

    /// Θ = x d/dx, using Θ(x^σ p logʲ) = x^σ((Θ+σ)p logʲ + j p logʲ⁻¹).
    pub fn theta(&self) -> LogSeries {
        let mut parts: Vec<PowerSeries> =
            self.parts.iter().map(|p| p.theta_shifted(&self.exponent)).collect();
        for j in 1..self.parts.len() {
            parts[j - 1] = parts[j - 1].add(&self.parts[j].scale(&qi(j as i64)));
        }
        LogSeries { parts, ..self.clone() }
    }

    /// Multiplication by the expansion variable.
    pub fn shift_up(&self) -> LogSeries {
        LogSeries { parts: self.parts.iter().map(PowerSeries::shift_up).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: &Q) -> LogSeries {
        LogSeries { parts: self.parts.iter().map(|p| p.scale(s)).collect(), ..self.clone() }
    }

    /// Sum of two log series with equal grading, exponent and variable.
    pub fn add(&self, o: &LogSeries) -> LogSeries {
        assert_eq!(self.exponent, o.exponent);
        assert_eq!(self.two_pi_i_power, o.two_pi_i_power);
        let k = self.parts.len().max(o.parts.len());
        let order = self.order().min(o.order());
        let var = self.var();
        let parts = (0..k)
            .map(|j| {
                let a = self.parts.get(j).cloned().unwrap_or_else(|| PowerSeries::zero(order, var));
                let b = o.parts.get(j).cloned().unwrap_or_else(|| PowerSeries::zero(order, var));
                a.add(&b)
            })
            .collect();
        LogSeries { parts, ..self.clone() }
    }

    /// Series variable and its logarithm at the point t.
    fn chart_point(&self, t: Complex64) -> Result<(Complex64, Complex64), SeriesError> {
        let x = match self.var() {
            Var::T => t,
            Var::InvT => {
                if t.norm() == 0.0 {
                    return Err(SeriesError::OutsideDisk(format!("{t}")));
                }
                1.0 / t
            }
        };
        if x.norm() >= 1.0 {
            return Err(SeriesError::OutsideDisk(format!("{t}")));
        }
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let log = x.ln() + two_pi_i * self.branch as f64;
        Ok((x, log))
    }

    /// Value at the point t (given in the t-plane) and a tail estimate.
    pub fn evaluate(&self, t: Complex64) -> Result<(Complex64, f64), SeriesError> {
        let (x, log) = self.chart_point(t)?;
        let needs_log = self.log_degree().unwrap_or(0) > 0 || !self.exponent.is_zero();
        if x.norm() == 0.0 && needs_log {
            return Err(SeriesError::OutsideDisk(format!("{t}")));
        }
        let mut v = Complex64::new(0.0, 0.0);
        let mut tail = 0.0;
        let mut lp = Complex64::new(1.0, 0.0);
        for p in &self.parts {
            let (pv, pt) = p.eval_at(x);
            v += pv * lp;
            tail += pt * lp.norm();
            lp *= log;
        }
        let pref = self.prefactor(log);
        Ok((v * pref, tail * pref.norm()))
    }

    /// Exact truncated values of the parts at a rational point of the series variable.
    pub fn evaluate_parts_exact(&self, x: &Q) -> Vec<Q> {
        self.parts.iter().map(|p| p.eval_exact(x)).collect()
    }

    /// Combines exact part values with the float log and prefactor.
    pub fn combine_parts(&self, parts: &[Q], x: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let log = x.ln() + two_pi_i * self.branch as f64;
        let mut v = Complex64::new(0.0, 0.0);
        let mut lp = Complex64::new(1.0, 0.0);
        for p in parts {
            v += lp * q_to_f64(p);
            lp *= log;
        }
        v * self.prefactor(log)
    }

    fn prefactor(&self, log: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut pref = two_pi_i.powi(self.two_pi_i_power);
        if !self.exponent.is_zero() {
            pref *= (log * q_to_f64(&self.exponent)).exp();
        }
        pref
    }
}

/// Convenience wrapper matching `evaluate(series, t, branch)`.
pub fn evaluate(
    series: &LogSeries,
    t: Complex64,
    branch: i64,
) -> Result<(Complex64, f64), SeriesError> {
    series.clone().with_branch(branch).evaluate(t)
}

/// Truncated power series in α of length n (coefficients of α⁰..α^{n−1}).
#[derive(Clone, Debug)]
struct AlphaPoly(Vec<Q>);

impl AlphaPoly {
    fn mul(&self, o: &AlphaPoly) -> AlphaPoly {
        let n = self.0.len();
        let mut c = vec![Q::zero(); n];
        for i in 0..n {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += &self.0[i] * &o.0[j];
            }
        }
        AlphaPoly(c)
    }

    /// c + α.
    fn linear(c: Q, n: usize) -> AlphaPoly {
        let mut v = vec![Q::zero(); n];
        v[0] = c;
        if n > 1 {
            v[1] = Q::one();
        }
        AlphaPoly(v)
    }

    /// 1/(c + α) expanded in α.
    fn inv_linear(c: &Q, n: usize) -> AlphaPoly {
        let inv = c.recip();
        let mut v = Vec::with_capacity(n);
        let mut term = inv.clone();
        for _ in 0..n {
            v.push(term.clone());
            term = -(term * &inv);
        }
        AlphaPoly(v)
    }
}

/// Coefficient series h̃_k(t) = Σ_j [α^k] c_j(α) tʲ with
/// c_j(α) = ∏_k (ρ_k+α)_j / ((1+α)_j)ⁿ, truncated at αⁿ.
pub fn alpha_coefficient_series(
    params: &HGParams,
    order: usize,
) -> Result<Vec<PowerSeries>, SeriesError> {
    if !params.has_unit_lower() {
        return Err(SeriesError::InvalidParams(
            "the Frobenius construction needs all lower parameters equal to 1".into(),
        ));
    }
    let n = params.n();
    let mut c = AlphaPoly::linear(Q::one(), n);
    c.0.iter_mut().skip(1).for_each(|x| *x = Q::zero());
    let mut rows: Vec<Vec<Q>> = vec![Vec::with_capacity(order + 1); n];
    for (k, row) in rows.iter_mut().enumerate() {
        row.push(c.0[k].clone());
    }
    for j in 0..order {
        let jq = qi(j as i64);
        for r in params.upper() {
            c = c.mul(&AlphaPoly::linear(r + &jq, n));
        }
        let inv = AlphaPoly::inv_linear(&qi(j as i64 + 1), n);
        for _ in 0..n {
            c = c.mul(&inv);
        }
        for (k, row) in rows.iter_mut().enumerate() {
            row.push(c.0[k].clone());
        }
    }
    Ok(rows.into_iter().map(|r| PowerSeries::new(r, Var::T)).collect())
}

fn factorial(m: usize) -> Q {
    (1..=m as i64).fold(Q::one(), |a, k| a * qi(k))
}

fn frobenius_from_alpha(h: &[PowerSeries], var: Var, exponent: &Q) -> Vec<LogSeries> {
    let n = h.len();
    let mut out = Vec::with_capacity(n);
    for l in (0..n).rev() {
        let parts = (0..=l).map(|m| h[l - m].scale(&factorial(m).recip())).collect::<Vec<_>>();
        let parts = parts
            .into_iter()
            .map(|p| PowerSeries::new(p.coeffs().to_vec(), var))
            .collect();
        out.push(LogSeries::new(parts, exponent.clone(), -(l as i32)));
    }
    out
}

/// Frobenius basis (f_{n−1}, …, f_0) at t = 0 with
/// f_l = (2πi)^{−l}/l! · ∂^l_α (t^α F_α)|_{α=0}.
pub fn frobenius_basis(params: &HGParams, order: usize) -> Result<Vec<LogSeries>, SeriesError> {
    let h = alpha_coefficient_series(params, order)?;
    Ok(frobenius_from_alpha(&h, Var::T, &Q::zero()))
}

/// Local solutions at t = ∞ as series in u = 1/t.
///
/// Distinct exponents give t^{−ρ_k}·nF(n−1)(ρ_k,…,ρ_k; 1+ρ_k−ρ_j | 1/t).
/// When every exponent coincides the same α-deformation as at 0 is used
/// in the 1/t chart, returning (F_{n−1}, …, F_0).
pub fn solutions_at_infinity(
    params: &HGParams,
    order: usize,
) -> Result<Vec<LogSeries>, SeriesError> {
    if !params.has_unit_lower() {
        return Err(SeriesError::InvalidParams(
            "solutions at infinity are built for unit lower parameters".into(),
        ));
    }
    let rho = params.upper();
    let n = rho.len();
    let all_equal = rho.iter().all(|r| r == &rho[0]);
    if all_equal {
        let h = alpha_coefficient_series(params, order)?;
        return Ok(frobenius_from_alpha(&h, Var::InvT, &rho[0]));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (&rho[i] - &rho[j]).is_integer() {
                return Err(SeriesError::ResonantExponents(format!(
                    "{} and {} differ by an integer",
                    q_string(&rho[i]),
                    q_string(&rho[j])
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let upper = vec![rho[k].clone(); n];
        let lower: Vec<Q> =
            (0..n).filter(|&j| j != k).map(|j| Q::one() + &rho[k] - &rho[j]).collect();
        let p = HGParams::new(upper, lower)?;
        let s = hg_series(&p, order)?;
        let s = PowerSeries::new(s.coeffs().to_vec(), Var::InvT);
        out.push(LogSeries::new(vec![s], rho[k].clone(), 0));
    }
    Ok(out)
}

/// Float coefficient table for fast evaluation of the Frobenius basis at high order.
#[derive(Clone, Debug)]
pub struct FrobeniusTable {
    n: usize,
    coeffs: Vec<Vec<f64>>,
}

impl FrobeniusTable {
    pub fn new(params: &HGParams, order: usize) -> Result<Self, SeriesError> {
        if !params.has_unit_lower() {
            return Err(SeriesError::InvalidParams(
                "the Frobenius construction needs all lower parameters equal to 1".into(),
            ));
        }
        let n = params.n();
        let rho: Vec<f64> = params.upper().iter().map(q_to_f64).collect();
        let mut coeffs = vec![Vec::with_capacity(order + 1); n];
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        let mul = |a: &[f64], b: &[f64]| {
            let mut r = vec![0.0; n];
            for i in 0..n {
                for j in 0..n - i {
                    r[i + j] += a[i] * b[j];
                }
            }
            r
        };
        for (k, row) in coeffs.iter_mut().enumerate() {
            row.push(c[k]);
        }
        for j in 0..order {
            let jf = j as f64;
            for r in &rho {
                let mut lin = vec![0.0; n];
                lin[0] = r + jf;
                if n > 1 {
                    lin[1] = 1.0;
                }
                c = mul(&c, &lin);
            }
            let d = 1.0 + jf;
            let inv: Vec<f64> = (0..n).map(|k| (-1f64).powi(k as i32) / d.powi(k as i32 + 1)).collect();
            for _ in 0..n {
                c = mul(&c, &inv);
            }
            for (k, row) in coeffs.iter_mut().enumerate() {
                row.push(c[k]);
            }
        }
        Ok(FrobeniusTable { n, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// h̃_k(t) for k = 0..n−1 and the largest tail estimate.
    pub fn holomorphic_parts(&self, t: Complex64) -> Result<(Vec<Complex64>, f64), SeriesError> {
        if t.norm() >= 1.0 {
            return Err(SeriesError::OutsideDisk(format!("{t}")));
        }
        let mut tail: f64 = 0.0;
        let vals = self
            .coeffs
            .iter()
            .map(|c| {
                let (v, e) = eval_f64_series(c, t);
                tail = tail.max(e);
                v
            })
            .collect();
        Ok((vals, tail))
    }

    /// (f_{n−1}, …, f_0) at t on the principal log branch shifted by `branch`.
    pub fn basis(&self, t: Complex64, branch: i64) -> Result<Vec<Complex64>, SeriesError> {
        if t.norm() == 0.0 {
            return Err(SeriesError::OutsideDisk(format!("{t}")));
        }
        let (h, _) = self.holomorphic_parts(t)?;
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let log = t.ln() + two_pi_i * branch as f64;
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        for l in (0..n).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            let mut lp = Complex64::new(1.0, 0.0);
            let mut fact = 1.0;
            for m in 0..=l {
                if m > 0 {
                    lp *= log;
                    fact *= m as f64;
                }
                s += lp / fact * h[l - m];
            }
            out.push(s / two_pi_i.powi(l as i32));
        }
        Ok(out)
    }
}

/// Serializable record {params, order, coefficients as fraction strings}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub upper: Vec<String>,
    pub lower: Vec<String>,
    pub order: usize,
    pub coefficients: Vec<String>,
}

impl SeriesRecord {
    pub fn new(params: &HGParams, series: &PowerSeries) -> Self {
        SeriesRecord {
            upper: params.upper().iter().map(q_string).collect(),
            lower: params.lower().iter().map(q_string).collect(),
            order: series.order(),
            coefficients: series.coeffs().iter().map(q_string).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&q(1, 2), 0), qi(1));
        assert_eq!(pochhammer(&q(1, 2), 2), q(3, 4));
        assert_eq!(pochhammer(&qi(1), 3), qi(6));
    }

    #[test]
    fn binomial_series() {
        let s = hg_series(&HGParams::halfs(1), 3).unwrap();
        assert_eq!(s.coeffs(), &[qi(1), q(1, 2), q(3, 8), q(5, 16)]);
        let s2 = hg_series(&HGParams::halfs(2), 3).unwrap();
        assert_eq!(s2.coeff(1), q(1, 4));
    }

    #[test]
    fn bad_lower_parameter() {
        assert!(matches!(
            HGParams::new(vec![q(1, 2), q(1, 2)], vec![qi(-2)]),
            Err(SeriesError::InvalidParams(_))
        ));
    }

    #[test]
    fn presets() {
        assert_eq!(HGParams::preset("halfs-4").unwrap(), HGParams::halfs(4));
        let d = HGParams::preset("dwork-3").unwrap();
        assert_eq!(d.upper(), &[q(1, 5), q(2, 5), q(3, 5), q(4, 5)]);
        assert!(HGParams::preset("nope-2").is_err());
    }

    #[test]
    fn float_table_matches_exact() {
        let p = HGParams::halfs(4);
        let ex = alpha_coefficient_series(&p, 60).unwrap();
        let fl = FrobeniusTable::new(&p, 60).unwrap();
        for k in 0..4 {
            for j in 0..=60 {
                let a = q_to_f64(&ex[k].coeff(j));
                let b = fl.coeffs()[k][j];
                let scale = q_to_f64(&ex[0].coeff(j)).abs();
                assert!((a - b).abs() <= 1e-12 * scale, "k={k} j={j} {a} {b}");
            }
        }
    }
}
