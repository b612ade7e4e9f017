//! Attractor points of K3 × E: the τ quadratic, |Z|, the associated binary
//! quadratic form and Gauss reduction.

use std::fmt;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum K3eError {
    #[error("form is not positive definite (D = {0})")]
    IndefiniteForm(i64),
    #[error("discriminant {0} is not a negative integer congruent to 0 or 1 mod 4")]
    BadDiscriminant(i64),
}

/// Intersection numbers ⟨p,p⟩, ⟨p,q⟩, ⟨q,q⟩ of a charge pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChargePairK3 {
    pub pp: i64,
    pub pq: i64,
    pub qq: i64,
}

impl ChargePairK3 {
    pub fn new(pp: i64, pq: i64, qq: i64) -> Result<Self, K3eError> {
        let c = ChargePairK3 { pp, pq, qq };
        if pp <= 0 || c.discriminant() >= 0 {
            return Err(K3eError::IndefiniteForm(c.discriminant()));
        }
        Ok(c)
    }

    /// D = ⟨p,q⟩² − ⟨p,p⟩⟨q,q⟩, a quarter of the discriminant of the τ quadratic.
    pub fn discriminant(&self) -> i64 {
        self.pq * self.pq - self.pp * self.qq
    }

    fn check(&self) -> Result<i64, K3eError> {
        let d = self.discriminant();
        if self.pp <= 0 || d >= 0 {
            Err(K3eError::IndefiniteForm(d))
        } else {
            Ok(d)
        }
    }
}

/// Root of ⟨p,p⟩τ² − 2⟨p,q⟩τ + ⟨q,q⟩ = 0 in the upper half plane.
pub fn tau_from_charges(c: &ChargePairK3) -> Result<C64, K3eError> {
    let d = c.check()?;
    Ok(C64::new(c.pq as f64, ((-d) as f64).sqrt()) / c.pp as f64)
}

/// |Z| = √(−D).
pub fn central_charge_norm(c: &ChargePairK3) -> Result<f64, K3eError> {
    Ok(((-c.check()?) as f64).sqrt())
}

/// ax² + bxy + cy².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Integer 2×2 matrix [[α, β], [γ, δ]] of determinant 1.
pub type Sl2 = [[i64; 2]; 2];

pub const IDENTITY: Sl2 = [[1, 0], [0, 1]];

pub fn sl2_mul(g: &Sl2, h: &Sl2) -> Sl2 {
    std::array::from_fn(|i| std::array::from_fn(|j| g[i][0] * h[0][j] + g[i][1] * h[1][j]))
}

pub fn sl2_inverse(g: &Sl2) -> Sl2 {
    [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]]
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let b = self.b;
        b.abs() <= self.a && self.a <= self.c && (b >= 0 || (b.abs() != self.a && self.a != self.c))
    }

    /// (x, y) ↦ f(αx + βy, γx + δy).
    pub fn act(&self, g: &Sl2) -> Bqf {
        let [[al, be], [ga, de]] = *g;
        let (a, b, c) = (self.a, self.b, self.c);
        Bqf {
            a: a * al * al + b * al * ga + c * ga * ga,
            b: 2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
            c: a * be * be + b * be * de + c * de * de,
        }
    }

    /// Root of f(τ, 1) = 0 with Im τ > 0.
    pub fn root(&self) -> Result<C64, K3eError> {
        if !self.is_positive_definite() {
            return Err(K3eError::IndefiniteForm(self.discriminant()));
        }
        Ok(C64::new(-self.b as f64, ((-self.discriminant()) as f64).sqrt()) / (2 * self.a) as f64)
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// The form (⟨p,p⟩, −2⟨p,q⟩, ⟨q,q⟩) with Gram matrix [[pp, −pq], [−pq, qq]].
pub fn shioda_inose_form(c: &ChargePairK3) -> Result<Bqf, K3eError> {
    c.check()?;
    Ok(Bqf::new(c.pp, -2 * c.pq, c.qq))
}

/// Gauss reduction; the witness g satisfies f.act(g) == reduced.
pub fn reduce_bqf(f: &Bqf) -> Result<(Bqf, Sl2), K3eError> {
    if !f.is_positive_definite() {
        return Err(K3eError::IndefiniteForm(f.discriminant()));
    }
    const S: Sl2 = [[0, -1], [1, 0]];
    let mut cur = *f;
    let mut g = IDENTITY;
    let mut apply = |cur: &mut Bqf, h: Sl2| {
        *cur = cur.act(&h);
        g = sl2_mul(&g, &h);
    };
    loop {
        if cur.b.abs() > cur.a || cur.b == -cur.a {
            let k = Integer::div_floor(&(cur.a - cur.b), &(2 * cur.a));
            apply(&mut cur, [[1, k], [0, 1]]);
        } else if cur.c < cur.a || (cur.c == cur.a && cur.b < 0) {
            apply(&mut cur, S);
        } else {
            break;
        }
    }
    Ok((cur, g))
}

/// Primitive reduced forms of discriminant `d`.
pub fn class_enumerate(d: i64) -> Result<Vec<Bqf>, K3eError> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(K3eError::BadDiscriminant(d));
    }
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = Bqf::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    Ok(out)
}

/// Moves τ into the standard fundamental domain; returns the image and the
/// matrix g with image = g·τ.
pub fn reduce_tau(tau: C64) -> (C64, Sl2) {
    let mut z = tau;
    let mut g = IDENTITY;
    for _ in 0..10_000 {
        let k = (z.re + 0.5).floor();
        if k != 0.0 {
            z -= k;
            g = sl2_mul(&[[1, -(k as i64)], [0, 1]], &g);
        }
        if z.norm_sqr() < 1.0 - 1e-13 {
            z = -1.0 / z;
            g = sl2_mul(&[[0, -1], [1, 0]], &g);
        } else {
            break;
        }
    }
    // Boundary identifications: Re τ = 1/2 ↔ −1/2 and the unit arc.
    if (z.re - 0.5).abs() < 1e-12 {
        z -= 1.0;
        g = sl2_mul(&[[1, -1], [0, 1]], &g);
    }
    if (z.norm_sqr() - 1.0).abs() < 1e-12 && z.re > 1e-12 {
        z = -1.0 / z;
        g = sl2_mul(&[[0, -1], [1, 0]], &g);
    }
    (z, g)
}

/// g·τ = (ατ + β)/(γτ + δ).
pub fn mobius(g: &Sl2, tau: C64) -> C64 {
    (tau * g[0][0] as f64 + g[0][1] as f64) / (tau * g[1][0] as f64 + g[1][1] as f64)
}
