//! Degree-four Frobenius factors (1 − p·c_p·t + p³t²)(1 − d_p·t + p³t²)
//! assembled from the Jacobi-sum spectrum, and Weil checks on them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::count::WeightedHypersurface;
use super::cyclotomic::CycloRing;
use super::jacobi::{frobenius_spectrum, negate, CharTuple, SpectrumOrbit};
use super::ArithError;

/// Integral factor 1 + a₁t + a₂t² of the Frobenius polynomial together with
/// the character orbits it comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticFactor {
    pub coeffs: [i128; 3],
    pub tuples: Vec<CharTuple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobQuartic {
    pub p: u64,
    /// Coefficients of t⁰ … t⁴.
    pub coeffs: [i128; 5],
    pub c_p: i64,
    pub d_p: i64,
    /// How many distinct orbit pairs produce the same d-factor.
    pub multiplicity: usize,
    pub c_tuples: Vec<CharTuple>,
    pub d_tuples: Vec<CharTuple>,
}

impl FrobQuartic {
    pub fn from_split(p: u64, c_p: i64, d_p: i64) -> Self {
        let p3 = (p as i128).pow(3);
        let a = [1, -(p as i128) * c_p as i128, p3];
        let b = [1, -(d_p as i128), p3];
        FrobQuartic {
            p,
            coeffs: poly_mul(&a, &b),
            c_p,
            d_p,
            multiplicity: 1,
            c_tuples: vec![],
            d_tuples: vec![],
        }
    }
}

fn poly_mul(a: &[i128; 3], b: &[i128; 3]) -> [i128; 5] {
    let mut c = [0i128; 5];
    for i in 0..3 {
        for j in 0..3 {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

/// Choice of factors, best first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticReport {
    pub p: u64,
    pub c_p: i64,
    pub candidates: Vec<FrobQuartic>,
}

impl QuarticReport {
    pub fn best(&self) -> &FrobQuartic {
        &self.candidates[0]
    }
}

/// Every quadratic factor with integral coefficients: a conjugate pair of
/// fixed tuples, or a self-conjugate orbit of length two.
pub fn quadratic_factors(spectrum: &[SpectrumOrbit]) -> Vec<QuadraticFactor> {
    let Some(first) = spectrum.first() else { return vec![] };
    let m = first.m;
    let ring = CycloRing::new(m);
    let index: BTreeMap<&CharTuple, usize> =
        spectrum.iter().enumerate().flat_map(|(i, o)| o.tuples.iter().map(move |t| (t, i))).collect();
    let mut out = Vec::new();
    for (i, o) in spectrum.iter().enumerate() {
        let conj = index[&negate(&o.tuples[0], m)];
        match o.len() {
            1 if conj > i => {
                let beta = &spectrum[conj].eigenvalue;
                let tr = ring.add(&o.eigenvalue, beta).as_integer();
                let nm = ring.mul(&o.eigenvalue, beta).as_integer();
                if let (Some(tr), Some(nm)) = (tr, nm) {
                    out.push(QuadraticFactor {
                        coeffs: [1, -tr, nm],
                        tuples: vec![o.tuples[0].clone(), spectrum[conj].tuples[0].clone()],
                    });
                }
            }
            2 if conj == i => {
                if let Some(mu) = o.eigenvalue.as_integer() {
                    out.push(QuadraticFactor { coeffs: [1, 0, -mu], tuples: o.tuples.clone() });
                }
            }
            _ => {}
        }
    }
    out
}

/// Multiples j·b of the character b attached to the deformation monomial.
pub fn deformation_characters(x: &WeightedHypersurface) -> Option<Vec<CharTuple>> {
    let a = x.deformation_monomial()?;
    let d = x.exponents();
    let m = d.iter().fold(1u32, |acc, &v| num_integer::Integer::lcm(&acc, &v));
    let base: Vec<u32> = a.iter().zip(&d).map(|(&ai, &di)| (ai * (m / di)) % m).collect();
    Some((1..m).map(|j| base.iter().map(|&b| (b * j) % m).collect()).collect())
}

/// Splits the Frobenius action on the deformation characters and one
/// further integral pair into (1 − p·c_p·t + p³t²)(1 − d_p·t + p³t²).
///
/// The c-factor must come from the deformation monomial's characters and
/// have middle coefficient divisible by p. Every other integral pair with
/// constant term p³ is a d-candidate; candidates are ranked with p ∤ d_p
/// first, then by how often the same factor recurs, then by d_p.
pub fn quartic_factor(x: &WeightedHypersurface, p: u64, generator_rank: usize) -> Result<QuarticReport, ArithError> {
    let spectrum = frobenius_spectrum(x, p, generator_rank)?;
    quartic_from_spectrum(x, p, spectrum)
}

/// Same as [`quartic_factor`] on a precomputed spectrum, in any order.
pub fn quartic_from_spectrum(x: &WeightedHypersurface, p: u64, mut spectrum: Vec<SpectrumOrbit>) -> Result<QuarticReport, ArithError> {
    let dirs = deformation_characters(x).ok_or(ArithError::NoIntegralQuartic(p))?;
    spectrum.sort_by(|a, b| a.tuples.iter().min().cmp(&b.tuples.iter().min()));
    let factors = quadratic_factors(&spectrum);
    let p3 = (p as i128).pow(3);
    let pi = p as i128;
    let mut c_choice: Option<(i64, &QuadraticFactor)> = None;
    for f in &factors {
        if f.coeffs[2] == p3 && f.coeffs[1] % pi == 0 && f.tuples.iter().all(|t| dirs.contains(t)) {
            c_choice = Some(((-f.coeffs[1] / pi) as i64, f));
            break;
        }
    }
    let (c_p, cf) = c_choice.ok_or(ArithError::NoIntegralQuartic(p))?;
    let mut grouped: BTreeMap<i64, (usize, Vec<CharTuple>)> = BTreeMap::new();
    for f in factors.iter().filter(|f| f.coeffs[2] == p3 && f.tuples != cf.tuples) {
        let e = grouped.entry((-f.coeffs[1]) as i64).or_insert((0, f.tuples.clone()));
        e.0 += 1;
    }
    if grouped.is_empty() {
        return Err(ArithError::NoIntegralQuartic(p));
    }
    let mut candidates: Vec<FrobQuartic> = grouped
        .into_iter()
        .map(|(d_p, (mult, tuples))| {
            let mut q = FrobQuartic::from_split(p, c_p, d_p);
            q.multiplicity = mult;
            q.c_tuples = cf.tuples.clone();
            q.d_tuples = tuples;
            q
        })
        .collect();
    candidates.sort_by_key(|q| ((q.d_p as i128 % pi == 0), std::cmp::Reverse(q.multiplicity), q.d_p));
    Ok(QuarticReport { p, c_p, candidates })
}

/// Outcome of the Riemann-hypothesis and functional-equation checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub p: u64,
    pub weight: u32,
    /// Reciprocal roots of P(t).
    pub roots: Vec<Complex64>,
    /// max |(|α| − p^{w/2})| / p^{w/2}.
    pub modulus_error: f64,
    pub moduli_ok: bool,
    /// α ↦ p^w/α permutes the roots.
    pub pairing_ok: bool,
    /// Leading coefficient equals p^{w·deg/2}.
    pub leading_ok: bool,
    pub passed: bool,
}

pub const WEIL_TOL: f64 = 1e-6;

/// Reciprocal roots of 1 + a₁t + … + a_n tⁿ, i.e. the roots of the monic
/// xⁿ + a₁xⁿ⁻¹ + … + a_n, by Durand–Kerner iteration.
pub fn reciprocal_roots(coeffs: &[i128]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let a: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
    let eval = |x: Complex64| a[1..].iter().fold(Complex64::new(1.0, 0.0), |v, &c| v * x + c);
    // Cauchy bound for the starting circle.
    let radius = 1.0 + a[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::from_polar(0.4 * radius.min(1e6).max(1.0), 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1) / seed.norm().powi(k as i32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |d, j| d * (roots[i] - roots[j]));
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-6 * radius, 1e-6 * radius);
                delta = f64::INFINITY;
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm() / roots[i].norm().max(1.0));
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

pub fn weil_validate_poly(coeffs: &[i128], p: u64, weight: u32) -> WeilReport {
    let roots = reciprocal_roots(coeffs);
    let target = (p as f64).powf(weight as f64 / 2.0);
    let modulus_error = roots.iter().map(|r| (r.norm() - target).abs() / target).fold(0.0, f64::max);
    let pw = (p as f64).powi(weight as i32);
    let pairing_ok = roots.iter().all(|r| {
        let partner = pw / r;
        roots.iter().any(|s| (s - partner).norm() <= WEIL_TOL * target.max(1.0))
    });
    let n = coeffs.len() as u32 - 1;
    let leading_ok = (weight * n) % 2 == 0
        && (p as i128).checked_pow(weight * n / 2).is_some_and(|l| coeffs[n as usize] == l);
    let moduli_ok = modulus_error <= WEIL_TOL;
    WeilReport { p, weight, roots, modulus_error, moduli_ok, pairing_ok, leading_ok, passed: moduli_ok && pairing_ok && leading_ok }
}

/// Weight-3 checks on a quartic.
pub fn weil_validate(q: &FrobQuartic) -> WeilReport {
    weil_validate_poly(&q.coeffs, q.p, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_root_polynomial_fails() {
        let r = weil_validate_poly(&[1, -4, 6, -4, 1], 3, 3);
        assert!(!r.passed);
        assert!(!r.moduli_ok);
    }

    #[test]
    fn constructed_split_passes() {
        let q = FrobQuartic::from_split(3, 0, 4);
        assert_eq!(q.coeffs[4], 729);
        assert!(weil_validate(&q).passed);
    }
}
