//! Exact arithmetic in Z[ζ_m] = Z[x]/Φ_m(x).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn poly_div_exact(a: &[i128], b: &[i128]) -> Vec<i128> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut quot = vec![0i128; a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = r[k + db];
        quot[k] = c;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    quot
}

/// Coefficients of Φ_m from the constant term up.
pub fn cyclotomic_poly(m: u32) -> Vec<i128> {
    let mut p = vec![0i128; m as usize + 1];
    p[0] = -1;
    p[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            p = poly_div_exact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

/// The ring Z[ζ_m] with reduction data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloRing {
    m: u32,
    phi: Vec<i128>,
}

/// Element of Z[ζ_m] in the power basis 1, ζ, …, ζ^{φ(m)−1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cyclo {
    pub m: u32,
    pub coeffs: Vec<i128>,
}

impl CycloRing {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1);
        CycloRing { m, phi: cyclotomic_poly(m) }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduces a group-ring vector Σ c_k ζᵏ (k < m) to the power basis.
    pub fn reduce(&self, group: &[i128]) -> Cyclo {
        let d = self.degree();
        let mut r = group.to_vec();
        for k in (d..r.len()).rev() {
            let c = r[k];
            if c != 0 {
                for (j, pj) in self.phi.iter().enumerate() {
                    r[k - d + j] -= c * pj;
                }
            }
        }
        r.truncate(d);
        r.resize(d, 0);
        Cyclo { m: self.m, coeffs: r }
    }

    pub fn zero(&self) -> Cyclo {
        Cyclo { m: self.m, coeffs: vec![0; self.degree()] }
    }

    pub fn int(&self, n: i128) -> Cyclo {
        let mut z = self.zero();
        z.coeffs[0] = n;
        z
    }

    pub fn zeta_pow(&self, k: i64) -> Cyclo {
        let mut g = vec![0i128; self.m as usize];
        g[k.rem_euclid(self.m as i64) as usize] = 1;
        self.reduce(&g)
    }

    pub fn add(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        Cyclo { m: self.m, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        Cyclo { m: self.m, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }
    }

    pub fn mul(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut prod = vec![0i128; 2 * self.degree()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(&prod)
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self, a: &Cyclo) -> Cyclo {
        let mut g = vec![0i128; self.m as usize];
        for (k, c) in a.coeffs.iter().enumerate() {
            g[(self.m as usize - k % self.m as usize) % self.m as usize] += c;
        }
        self.reduce(&g)
    }
}

impl Cyclo {
    /// The rational integer this element equals, if any.
    pub fn as_integer(&self) -> Option<i128> {
        self.coeffs[1..].iter().all(|&c| c == 0).then(|| self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn to_c64(&self) -> Complex64 {
        let step = 2.0 * std::f64::consts::PI / self.m as f64;
        self.coeffs.iter().enumerate().map(|(k, &c)| Complex64::from_polar(c as f64, step * k as f64)).sum()
    }

    /// Whether every coefficient is divisible by n.
    pub fn divisible_by(&self, n: i128) -> bool {
        self.coeffs.iter().all(|c| c % n == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
    }

    #[test]
    fn roots_sum_to_zero() {
        let r = CycloRing::new(8);
        let s = (0..8).fold(r.zero(), |acc, k| r.add(&acc, &r.zeta_pow(k)));
        assert!(s.is_zero());
        let i = r.zeta_pow(2);
        assert_eq!(r.mul(&i, &i).as_integer(), Some(-1));
        assert_eq!(r.conj(&i), r.zeta_pow(6));
    }
}
