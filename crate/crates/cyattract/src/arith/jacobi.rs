//! Point counts and Frobenius eigenvalues of diagonal hypersurfaces through
//! Jacobi sums J(χ₁, …, χ_r) = Σ_{x₁+…+x_r=1} Πχᵢ(xᵢ), evaluated exactly
//! in Z[ζ_m].

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::count::{PointCount, WeightedHypersurface};
use super::cyclotomic::{Cyclo, CycloRing};
use super::field::FiniteField;
use super::ArithError;

/// Character tuple aᵢ = numerators[i]/m in (Q/Z)ʳ, all entries nonzero.
pub type CharTuple = Vec<u32>;

/// J for χᵢ(gʲ) = ζ_m^{nᵢ·j}, each nᵢ·(q−1) divisible by m.
pub fn jacobi_sum(k: &FiniteField, ring: &CycloRing, numerators: &[u32]) -> Cyclo {
    let q = k.q();
    let m = ring.m() as usize;
    let chi = |n: u32, x: u16| -> Option<usize> { k.log(x).map(|l| (n as u64 * l as u64 % m as u64) as usize) };
    let r = numerators.len();
    if r == 1 {
        let mut g = vec![0i128; m];
        if let Some(e) = chi(numerators[0], 1) {
            g[e] += 1;
        }
        return ring.reduce(&g);
    }
    // dist[x][e]: number of ways to reach partial sum x with character phase ζᵉ.
    let mut dist = vec![0i128; q * m];
    for x in 1..q as u16 {
        dist[x as usize * m + chi(numerators[0], x).unwrap()] += 1;
    }
    for (step, &n) in numerators.iter().enumerate().skip(1) {
        let phases: Vec<Option<usize>> = (0..q as u16).map(|y| chi(n, y)).collect();
        let last = step + 1 == r;
        let mut next = vec![0i128; if last { m } else { q * m }];
        for x in 0..q as u16 {
            let row = &dist[x as usize * m..(x as usize + 1) * m];
            if row.iter().all(|&c| c == 0) {
                continue;
            }
            let targets: Box<dyn Iterator<Item = u16>> = if last { Box::new(std::iter::once(1u16)) } else { Box::new(0..q as u16) };
            for z in targets {
                let y = k.add(z, k.neg(x));
                if let Some(e) = phases[y as usize] {
                    let base = if last { 0 } else { z as usize * m };
                    for (s, &c) in row.iter().enumerate() {
                        if c != 0 {
                            next[base + (s + e) % m] += c;
                        }
                    }
                }
            }
        }
        dist = next;
    }
    ring.reduce(&dist[..m])
}

fn lcm_all(xs: &[u32]) -> u32 {
    xs.iter().fold(1u32, |a, &b| a.lcm(&b))
}

/// All tuples with numerators over m, nᵢ ∈ (m/gᵢ)·{1, …, gᵢ−1}, Σnᵢ ≡ 0 mod m.
pub fn admissible_tuples(orders: &[u32], m: u32) -> Vec<CharTuple> {
    let mut out = vec![vec![]];
    for &g in orders {
        let step = m / g;
        out = out
            .into_iter()
            .flat_map(|t: Vec<u32>| {
                (1..g).map(move |j| {
                    let mut t = t.clone();
                    t.push(j * step);
                    t
                })
            })
            .collect();
    }
    out.retain(|t| t.iter().sum::<u32>() % m == 0);
    out
}

fn diagonal_checked(x: &WeightedHypersurface) -> Result<(), ArithError> {
    if x.is_diagonal() {
        Ok(())
    } else {
        Err(ArithError::NotDiagonal)
    }
}

/// Affine count of Σ_{i∈S} xᵢ^{dᵢ} = 0 in F_q^{|S|}:
/// q^{r−1} − (q−1)·Σ_χ J(χ).
fn affine_subset_count(k: &FiniteField, ring: &CycloRing, d: &[u32]) -> Result<u64, ArithError> {
    let q = k.q() as u64;
    let r = d.len();
    if r == 0 {
        return Ok(1);
    }
    let orders: Vec<u32> = d.iter().map(|&di| di.gcd(&(q as u32 - 1))).collect();
    let tuples = admissible_tuples(&orders, ring.m());
    let total = tuples
        .par_iter()
        .map(|t| jacobi_sum(k, ring, t))
        .reduce(|| ring.zero(), |a, b| ring.add(&a, &b));
    let s = total.as_integer().ok_or_else(|| ArithError::Inconsistent("Jacobi sum total is not rational".into()))?;
    let n = (q as i128).pow(r as u32 - 1) - (q as i128 - 1) * s;
    u64::try_from(n).map_err(|_| ArithError::Inconsistent(format!("negative count {n}")))
}

/// Point count of a diagonal fiber from Jacobi sums, split by support the
/// same way as the enumerating counter.
pub fn jacobi_point_count(x: &WeightedHypersurface, k: &FiniteField) -> Result<PointCount, ArithError> {
    diagonal_checked(x)?;
    let d = x.exponents();
    let r = d.len();
    let ring = CycloRing::new(lcm_all(&d));
    let subset: Vec<u64> = (0..1usize << r)
        .map(|mask| {
            let ds: Vec<u32> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| d[i]).collect();
            affine_subset_count(k, &ring, &ds)
        })
        .collect::<Result<_, _>>()?;
    // Inclusion–exclusion from "zero outside S" to "support exactly T".
    let by_support = (0..1usize << r)
        .map(|t| {
            let mut acc = 0i128;
            let mut s = t;
            loop {
                let sign = if (t.count_ones() - s.count_ones()) % 2 == 0 { 1 } else { -1 };
                acc += sign * subset[s] as i128;
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
            acc as u64
        })
        .collect();
    PointCount::from_support(x.weights(), k.q() as u64, by_support)
}

/// One Frobenius orbit a, p·a, … of character tuples with its eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumOrbit {
    /// Members in orbit order; numerators over `m`.
    pub tuples: Vec<CharTuple>,
    pub m: u32,
    /// Eigenvalue of Frob_{p^s} on each member, s = orbit length: J over F_{p^s}.
    pub eigenvalue: Cyclo,
}

impl SpectrumOrbit {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &CharTuple) -> bool {
        self.tuples.contains(t)
    }
}

pub fn negate(t: &CharTuple, m: u32) -> CharTuple {
    t.iter().map(|&n| (m - n) % m).collect()
}

/// Frobenius orbits on the primitive part of H^{r−2} of a diagonal
/// hypersurface, with exact eigenvalues. `generator_rank` selects the
/// primitive element used for discrete logs.
pub fn frobenius_spectrum(x: &WeightedHypersurface, p: u64, generator_rank: usize) -> Result<Vec<SpectrumOrbit>, ArithError> {
    diagonal_checked(x)?;
    let d = x.exponents();
    let m = lcm_all(&d);
    if m as u64 % p == 0 {
        return Err(ArithError::BadPrime(p));
    }
    let ring = CycloRing::new(m);
    let mut seen = std::collections::BTreeSet::new();
    let mut orbits: Vec<Vec<CharTuple>> = Vec::new();
    for t in admissible_tuples(&d, m) {
        if seen.contains(&t) {
            continue;
        }
        let mut orbit = vec![t.clone()];
        let mut cur: CharTuple = t.iter().map(|&n| ((n as u64 * p) % m as u64) as u32).collect();
        while cur != t {
            orbit.push(cur.clone());
            cur = cur.iter().map(|&n| ((n as u64 * p) % m as u64) as u32).collect();
        }
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit);
    }
    let mut fields = std::collections::BTreeMap::new();
    for o in &orbits {
        if let std::collections::btree_map::Entry::Vacant(e) = fields.entry(o.len()) {
            e.insert(FiniteField::with_generator(p, o.len(), generator_rank)?);
        }
    }
    let out = orbits
        .into_par_iter()
        .map(|tuples| {
            let k = &fields[&tuples.len()];
            let eigenvalue = jacobi_sum(k, &ring, &tuples[0]);
            SpectrumOrbit { tuples, m, eigenvalue }
        })
        .collect();
    Ok(out)
}
