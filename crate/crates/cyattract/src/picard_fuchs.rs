//! Hypergeometric Picard–Fuchs operators in Θ = x d/dx form and their
//! first-order companion systems.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{q_string, q_to_f64, Matrix, Q};
use crate::hyperseries::{HGParams, LogSeries, Var};

/// Polynomial in Θ as coefficients of Θ⁰, Θ¹, ….
pub type ThetaPoly = Vec<Q>;

fn poly_mul(a: &[Q], b: &[Q]) -> ThetaPoly {
    let mut c = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

fn product_of_linears(shifts: &[Q], extra_theta: bool) -> ThetaPoly {
    let mut p = vec![Q::one()];
    if extra_theta {
        p = poly_mul(&p, &[Q::zero(), Q::one()]);
    }
    for s in shifts {
        p = poly_mul(&p, &[s.clone(), Q::one()]);
    }
    p
}

/// L = P₀(Θ) − x·P₁(Θ) in the variable x (t or 1/t).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaOperator {
    rho: Vec<Q>,
    var: Var,
    p0: ThetaPoly,
    p1: ThetaPoly,
}

impl ThetaOperator {
    pub fn order(&self) -> usize {
        self.p0.len() - 1
    }

    pub fn rho(&self) -> &[Q] {
        &self.rho
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn p0(&self) -> &[Q] {
        &self.p0
    }

    pub fn p1(&self) -> &[Q] {
        &self.p1
    }

    /// The same operator after t → 1/t, normalized so P₀ is monic.
    pub fn to_other_chart(&self) -> ThetaOperator {
        let flip = |p: &[Q]| -> ThetaPoly {
            p.iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect()
        };
        let new_p0 = flip(&self.p1);
        let new_p1 = flip(&self.p0);
        let lead = new_p0.last().cloned().expect("nonempty");
        let norm = |p: ThetaPoly| p.into_iter().map(|c| c / &lead).collect::<ThetaPoly>();
        ThetaOperator {
            rho: self.rho.clone(),
            var: match self.var {
                Var::T => Var::InvT,
                Var::InvT => Var::T,
            },
            p0: norm(new_p0),
            p1: norm(new_p1),
        }
    }
}

impl fmt::Display for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        let theta_pow = |k: usize| if k == 1 { "Θ".to_string() } else { format!("Θ^{k}") };
        if self.var == Var::T && self.p0.iter().take(n).all(Zero::is_zero) {
            write!(f, "{} - s", theta_pow(n))?;
            let all_equal = self.rho.iter().all(|r| r == &self.rho[0]);
            if all_equal && n > 1 {
                write!(f, "(Θ+{})^{}", q_string(&self.rho[0]), n)
            } else {
                for r in &self.rho {
                    write!(f, "(Θ+{})", q_string(r))?;
                }
                Ok(())
            }
        } else {
            let show = |p: &[Q]| {
                p.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| format!("({})Θ^{k}", q_string(c)))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            write!(f, "[{}] - u[{}]", show(&self.p0), show(&self.p1))
        }
    }
}

/// Θⁿ − s∏(Θ+ρ_k) (with Θ∏(Θ+b_i−1) in place of Θⁿ for general lower parameters).
pub fn build_operator(params: &HGParams) -> ThetaOperator {
    let lower_shifts: Vec<Q> = params.lower().iter().map(|b| b - Q::one()).collect();
    ThetaOperator {
        rho: params.upper().to_vec(),
        var: Var::T,
        p0: product_of_linears(&lower_shifts, true),
        p1: product_of_linears(params.upper(), false),
    }
}

fn apply_poly(p: &[Q], f: &LogSeries) -> LogSeries {
    let mut acc = f.scale(&Q::zero());
    let mut power = f.clone();
    for (k, c) in p.iter().enumerate() {
        if k > 0 {
            power = power.theta();
        }
        if !c.is_zero() {
            acc = acc.add(&power.scale(c));
        }
    }
    acc
}

/// L applied to a log series, truncated at the input order.
pub fn apply(op: &ThetaOperator, f: &LogSeries) -> LogSeries {
    assert_eq!(op.var, f.var(), "operator and series use different charts");
    let a = apply_poly(&op.p0, f);
    let b = apply_poly(&op.p1, f).shift_up();
    a.add(&b.scale(&-Q::one()))
}

/// dv/dx = (A₀/x + A₁/(x−1))·v for v = (y, Θy, …, Θⁿ⁻¹y).
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionSystem {
    a0: Matrix<Q>,
    a1: Matrix<Q>,
    var: Var,
}

impl CompanionSystem {
    pub fn dim(&self) -> usize {
        self.a0.rows()
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Residue at x = 0.
    pub fn a0(&self) -> &Matrix<Q> {
        &self.a0
    }

    /// Residue at x = 1.
    pub fn a1(&self) -> &Matrix<Q> {
        &self.a1
    }

    /// Residue at x = ∞, equal to −(A₀ + A₁).
    pub fn residue_at_infinity(&self) -> Matrix<Q> {
        self.a0.add(&self.a1).scale(&-Q::one())
    }

    /// Singular points of the system; the chart change x → 1/x permutes them.
    pub fn singular_points(&self) -> [Option<Complex64>; 3] {
        [Some(Complex64::new(0.0, 0.0)), Some(Complex64::new(1.0, 0.0)), None]
    }

    pub fn a0_f64(&self) -> DMatrix<Complex64> {
        to_cmatrix(&self.a0)
    }

    pub fn a1_f64(&self) -> DMatrix<Complex64> {
        to_cmatrix(&self.a1)
    }

    pub fn eval(&self, x: Complex64) -> DMatrix<Complex64> {
        self.a0_f64() / x + self.a1_f64() / (x - 1.0)
    }
}

pub fn to_cmatrix(m: &Matrix<Q>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(q_to_f64(m.get(i, j)), 0.0))
}

/// Mapping image of a point of the Riemann sphere under x → 1/x (None is ∞).
pub fn invert_point(x: Option<Complex64>) -> Option<Complex64> {
    match x {
        None => Some(Complex64::new(0.0, 0.0)),
        Some(z) if z.norm() == 0.0 => None,
        Some(z) => Some(1.0 / z),
    }
}

/// First-order system equivalent to the operator.
///
/// From P₀(Θ)y = xP₁(Θ)y with both polynomials monic of degree n:
/// A₀ = N − eₙ·p₀ᵀ and A₁ = eₙ·(p₀ − p₁)ᵀ, p_i the lower coefficients.
pub fn companion(op: &ThetaOperator) -> CompanionSystem {
    let n = op.order();
    assert!(op.p0[n].is_one() && op.p1.len() == n + 1 && op.p1[n].is_one());
    let mut a0 = Matrix::<Q>::zeros(n, n);
    let mut a1 = Matrix::<Q>::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        a0.set(i, i + 1, Q::one());
    }
    for k in 0..n {
        let v = a0.get(n - 1, k).clone() - op.p0[k].clone();
        a0.set(n - 1, k, v);
        a1.set(n - 1, k, op.p0[k].clone() - op.p1[k].clone());
    }
    CompanionSystem { a0, a1, var: op.var }
}
