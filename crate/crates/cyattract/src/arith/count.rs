//! Weighted hypersurfaces and their point counts by enumeration.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{mod_pow, FiniteField};
use super::ArithError;
use crate::exact::{q_string, Q};

/// Default cap on enumerated affine tuples.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: Q,
}

/// Σ terms = 0 in weighted projective space P(k₁, …, k_r) with Σkᵢ = K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedHypersurface {
    weights: Vec<u32>,
    degree: u32,
    terms: Vec<Monomial>,
}

impl WeightedHypersurface {
    pub fn new(weights: Vec<u32>, degree: u32, terms: Vec<Monomial>) -> Result<Self, ArithError> {
        if weights.is_empty() || weights.contains(&0) || weights.iter().sum::<u32>() != degree {
            return Err(ArithError::NotCalabiYau { weights, degree });
        }
        for t in &terms {
            let deg: u32 = t.exponents.iter().zip(&weights).map(|(e, w)| e * w).sum();
            if t.exponents.len() != weights.len() || deg != degree {
                return Err(ArithError::NotQuasiHomogeneous(t.exponents.clone()));
            }
        }
        Ok(WeightedHypersurface { weights, degree, terms })
    }

    /// Σ xᵢ^{K/kᵢ} = 0 with K = Σkᵢ.
    pub fn diagonal(weights: Vec<u32>) -> Result<Self, ArithError> {
        let degree: u32 = weights.iter().sum();
        if weights.iter().any(|&w| w == 0 || degree % w != 0) {
            return Err(ArithError::NotCalabiYau { weights, degree });
        }
        let r = weights.len();
        let terms = (0..r)
            .map(|i| {
                let mut e = vec![0; r];
                e[i] = degree / weights[i];
                Monomial { exponents: e, coeff: Q::from_integer(1.into()) }
            })
            .collect();
        Self::new(weights, degree, terms)
    }

    /// x₁⁸ + x₂⁸ + x₃⁴ + x₄⁴ + x₅⁴ − 8ψ·x₁x₂x₃x₄x₅ − 2φ·x₁⁴x₂⁴ in P(1,1,2,2,2).
    pub fn octic(psi: Q, phi: Q) -> Self {
        let mut x = Self::diagonal(vec![1, 1, 2, 2, 2]).expect("octic weights");
        x.terms.push(Monomial { exponents: vec![1, 1, 1, 1, 1], coeff: psi * Q::from_integer((-8).into()) });
        x.terms.push(Monomial { exponents: vec![4, 4, 0, 0, 0], coeff: phi * Q::from_integer((-2).into()) });
        x
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// dᵢ = K/kᵢ.
    pub fn exponents(&self) -> Vec<u32> {
        self.weights.iter().map(|w| self.degree / w).collect()
    }

    /// Exponent vector of the first deformation monomial with every variable present.
    pub fn deformation_monomial(&self) -> Option<&[u32]> {
        self.terms.iter().map(|t| t.exponents.as_slice()).find(|e| e.iter().all(|&x| x > 0))
    }

    /// Whether the nonzero terms are exactly Σ xᵢ^{dᵢ} with unit coefficients.
    pub fn is_diagonal(&self) -> bool {
        let d = self.exponents();
        let live: Vec<&Monomial> = self.terms.iter().filter(|t| !t.coeff.is_zero()).collect();
        live.len() == d.len()
            && (0..d.len()).all(|i| {
                live.iter().any(|t| {
                    t.coeff == Q::from_integer(1.into())
                        && t.exponents.iter().enumerate().all(|(j, &e)| e == if i == j { d[i] } else { 0 })
                })
            })
    }

    pub fn describe(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .filter(|t| !t.coeff.is_zero())
            .map(|t| {
                let mono: Vec<String> = t
                    .exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                    .collect();
                format!("({})*{}", q_string(&t.coeff), mono.join("*"))
            })
            .collect();
        format!("P{:?}: {} = 0", self.weights, if terms.is_empty() { "0".into() } else { terms.join(" + ") })
    }
}

/// Affine solution counts split by support, and the derived projective count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub q: u64,
    /// Solutions in F_qʳ including the origin.
    pub affine: u64,
    /// by_support[mask]: solutions whose nonzero coordinates are exactly `mask`.
    pub by_support: Vec<u64>,
    /// F_q-rational points counted as orbits of the weighted F_q^× action.
    pub orbits: u64,
    /// (affine − 1)/(q − 1), which ignores stabilizers.
    pub naive: u64,
}

impl PointCount {
    pub fn from_support(weights: &[u32], q: u64, by_support: Vec<u64>) -> Result<Self, ArithError> {
        let affine = by_support.iter().sum();
        let mut orbits = 0u64;
        for (mask, &n) in by_support.iter().enumerate().skip(1) {
            let e = (0..weights.len()).filter(|i| mask >> i & 1 == 1).fold(0u64, |g, i| g.gcd(&(weights[i] as u64)));
            let stab = e.gcd(&(q - 1));
            if (n * stab) % (q - 1) != 0 {
                return Err(ArithError::Inconsistent(format!("support {mask:b} holds {n} points")));
            }
            orbits += n * stab / (q - 1);
        }
        Ok(PointCount { q, affine, by_support, orbits, naive: (affine - 1) / (q - 1) })
    }
}

/// Distance of a threefold count from 1 + h¹¹q + h¹¹q² + q³ against the
/// Weil envelope b₃·q^{3/2}, b₃ = 2h²¹ + 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilEnvelope {
    pub skeleton: u64,
    pub deviation: i128,
    pub bound: f64,
    pub within: bool,
}

pub fn weil_envelope(count: &PointCount, h11: u64, h21: u64) -> WeilEnvelope {
    let q = count.q;
    let skeleton = 1 + h11 * q + h11 * q * q + q * q * q;
    let deviation = count.orbits as i128 - skeleton as i128;
    let bound = (2 * h21 + 2) as f64 * (q as f64).powf(1.5);
    WeilEnvelope { skeleton, deviation, bound, within: (deviation.unsigned_abs() as f64) <= bound }
}

/// Reduces a rational coefficient into F_p ⊆ F_q.
pub fn reduce_coeff(c: &Q, k: &FiniteField) -> Result<u16, ArithError> {
    let p = k.p() as i64;
    let num = (c.numer() % p).to_i64().ok_or_else(|| ArithError::BadReduction(q_string(c), k.p()))?;
    let den = (c.denom() % p).to_i64().ok_or_else(|| ArithError::BadReduction(q_string(c), k.p()))?;
    if den == 0 {
        return Err(ArithError::BadReduction(q_string(c), k.p()));
    }
    let inv = mod_pow(den.rem_euclid(p) as u64, k.p() - 2, k.p()) as i64;
    Ok(k.from_int(num * inv))
}

struct Term {
    coeff: u16,
    exps: Vec<u32>,
}

fn enumerate(k: &FiniteField, terms: &[Term], r: usize, depth: usize, partial: &mut Vec<u16>, mask: usize, counts: &mut [u64]) {
    let q = k.q() as u16;
    if depth + 1 == r {
        for x in 0..q {
            let mut s = 0u16;
            for (t, &pv) in terms.iter().zip(partial.iter()) {
                if pv != 0 {
                    s = k.add(s, k.mul(pv, k.pow(x, t.exps[depth] as u64)));
                }
            }
            if s == 0 {
                counts[mask | if x != 0 { 1 << depth } else { 0 }] += 1;
            }
        }
        return;
    }
    let saved = partial.clone();
    for x in 0..q {
        for (i, t) in terms.iter().enumerate() {
            partial[i] = k.mul(saved[i], k.pow(x, t.exps[depth] as u64));
        }
        let m = mask | if x != 0 { 1 << depth } else { 0 };
        enumerate(k, terms, r, depth + 1, partial, m, counts);
    }
    partial.copy_from_slice(&saved);
}

/// Orbit count of F_q-points by enumerating every affine tuple.
pub fn count_points(x: &WeightedHypersurface, k: &FiniteField, budget: u64) -> Result<PointCount, ArithError> {
    let r = x.nvars();
    let q = k.q() as u64;
    let work = (q as u128).pow(r as u32);
    if work > budget as u128 {
        return Err(ArithError::BudgetExceeded { needed: work, budget });
    }
    let terms: Vec<Term> = x
        .terms
        .iter()
        .filter(|t| !t.coeff.is_zero())
        .map(|t| Ok(Term { coeff: reduce_coeff(&t.coeff, k)?, exps: t.exponents.clone() }))
        .collect::<Result<_, ArithError>>()?;
    let counts = if r == 1 {
        let mut c = vec![0u64; 2];
        let mut partial: Vec<u16> = terms.iter().map(|t| t.coeff).collect();
        enumerate(k, &terms, 1, 0, &mut partial, 0, &mut c);
        c
    } else {
        (0..q as u16)
            .into_par_iter()
            .map(|x0| {
                let mut c = vec![0u64; 1 << r];
                let mut partial: Vec<u16> = terms.iter().map(|t| k.mul(t.coeff, k.pow(x0, t.exps[0] as u64))).collect();
                enumerate(k, &terms, r, 1, &mut partial, if x0 != 0 { 1 } else { 0 }, &mut c);
                c
            })
            .reduce(
                || vec![0u64; 1 << r],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };
    PointCount::from_support(&x.weights, q, counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conic_over_f5() {
        let x = WeightedHypersurface::diagonal(vec![1, 1]).unwrap();
        let k = FiniteField::new(5, 1).unwrap();
        let c = count_points(&x, &k, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.affine, 9);
        assert_eq!(c.orbits, 2);
    }

    #[test]
    fn empty_equation_is_projective_line() {
        let x = WeightedHypersurface::new(vec![1, 1], 2, vec![]).unwrap();
        for (p, f) in [(3, 1), (5, 1), (3, 2)] {
            let k = FiniteField::new(p, f).unwrap();
            assert_eq!(count_points(&x, &k, DEFAULT_BUDGET).unwrap().orbits, k.q() as u64 + 1);
        }
    }
}
