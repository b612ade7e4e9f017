//! Table-driven arithmetic in F_q, q = pᶠ, with elements encoded as the
//! integers 0..q whose base-p digits are polynomial coefficients.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ArithError;

/// Largest field the tables are built for.
pub const MAX_FIELD: u64 = 1 << 11;

/// Environment variable naming the directory for cached discrete-log tables.
pub const CACHE_ENV: &str = "CYATTRACT_CACHE_DIR";

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (f..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (j, m) in modulus.iter().enumerate() {
                let idx = k - f + j;
                prod[idx] = (prod[idx] + (p - c) * m) % p;
            }
        }
    }
    prod.truncate(f);
    prod.resize(f, 0);
    prod
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lead = mod_pow(b[db], p - 2, p);
    while r.len() > db {
        let c = r[r.len() - 1] * inv_lead % p;
        let shift = r.len() - 1 - db;
        for (j, m) in b.iter().enumerate() {
            r[shift + j] = (r[shift + j] + (p - c) * m % p) % p;
        }
        r.pop();
    }
    r
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn digits(mut x: u64, p: u64, n: usize) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// First monic irreducible polynomial of degree f in lexicographic order of
/// the lower coefficients, coefficients listed from the constant term.
pub fn conway_free_modulus(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let count = p.pow(f as u32);
    (0..count)
        .map(|code| {
            let mut m = digits(code, p, f);
            m.push(1);
            m
        })
        .find(|m| {
            m[0] != 0
                && (1..=f / 2).all(|deg| {
                    (0..p.pow(deg as u32)).all(|c| {
                        let mut g = digits(c, p, deg);
                        g.push(1);
                        poly_rem(m, &g, p).iter().any(|&x| x != 0)
                    })
                })
        })
        .expect("irreducible polynomials exist in every degree")
}

/// Stored form of a discrete-log table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTable {
    pub p: u64,
    pub f: usize,
    pub modulus: Vec<u64>,
    /// Which primitive element (in increasing code order) generates.
    pub generator_rank: usize,
    pub generator: u64,
    /// exp[k] = gᵏ for 0 ≤ k < q − 1.
    pub exp: Vec<u32>,
}

impl FieldTable {
    pub fn build(p: u64, f: usize, generator_rank: usize) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let q = p.checked_pow(f as u32).filter(|&q| q <= MAX_FIELD).ok_or(ArithError::FieldTooLarge(p, f))?;
        let modulus = conway_free_modulus(p, f);
        let mut rank = 0;
        for cand in 2.min(q - 1)..q {
            let g = digits(cand, p, f);
            let mut x = g.clone();
            let mut exp = vec![1u32];
            let mut ord = 1;
            while undigits(&x, p) != 1 {
                exp.push(undigits(&x, p) as u32);
                x = poly_mulmod(&x, &g, &modulus, p);
                ord += 1;
            }
            if ord == q - 1 {
                if rank == generator_rank {
                    return Ok(FieldTable { p, f, modulus, generator_rank, generator: cand, exp });
                }
                rank += 1;
            }
        }
        Err(ArithError::NoGenerator(generator_rank))
    }

    fn cache_path(dir: &Path, p: u64, f: usize, rank: usize) -> PathBuf {
        dir.join(format!("field-{p}-{f}-{rank}.json"))
    }

    /// Builds the table, reading and writing JSON under `$CYATTRACT_CACHE_DIR`
    /// when that variable is set.
    pub fn load_or_build(p: u64, f: usize, generator_rank: usize) -> Result<Self, ArithError> {
        let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
            return Self::build(p, f, generator_rank);
        };
        let path = Self::cache_path(&dir, p, f, generator_rank);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(t) = serde_json::from_str::<FieldTable>(&text) {
                if t.p == p && t.f == f && t.generator_rank == generator_rank {
                    return Ok(t);
                }
            }
        }
        let t = Self::build(p, f, generator_rank)?;
        let write = || -> std::io::Result<()> {
            std::fs::create_dir_all(&dir)?;
            std::fs::write(&path, serde_json::to_string(&t).expect("plain data"))
        };
        write().map_err(|e| ArithError::Cache(e.to_string()))?;
        Ok(t)
    }
}

/// F_q with addition, multiplication and discrete-log tables.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u64,
    f: usize,
    q: usize,
    modulus: Vec<u64>,
    generator: u64,
    add: Vec<u16>,
    neg: Vec<u16>,
    exp: Vec<u16>,
    log: Vec<u32>,
}

impl FiniteField {
    pub fn new(p: u64, f: usize) -> Result<Self, ArithError> {
        Self::from_table(FieldTable::load_or_build(p, f, 0)?)
    }

    /// Same field, discrete logs taken to the `rank`-th primitive element.
    pub fn with_generator(p: u64, f: usize, rank: usize) -> Result<Self, ArithError> {
        Self::from_table(FieldTable::load_or_build(p, f, rank)?)
    }

    pub fn from_table(t: FieldTable) -> Result<Self, ArithError> {
        let (p, f) = (t.p, t.f);
        let q = p.pow(f as u32) as usize;
        if t.exp.len() != q - 1 {
            return Err(ArithError::Cache(format!("table for F_{q} has {} entries", t.exp.len())));
        }
        let mut add = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a as u64, p, f);
            for b in a..q {
                let db = digits(b as u64, p, f);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                let v = undigits(&s, p) as u16;
                add[a * q + b] = v;
                add[b * q + a] = v;
            }
        }
        let neg = (0..q)
            .map(|a| undigits(&digits(a as u64, p, f).iter().map(|d| (p - d) % p).collect::<Vec<_>>(), p) as u16)
            .collect();
        let mut log = vec![u32::MAX; q];
        for (k, &x) in t.exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let exp = t.exp.iter().map(|&x| x as u16).collect();
        Ok(FiniteField { p, f, q, modulus: t.modulus, generator: t.generator, add, neg, exp, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) as usize % (self.q - 1);
        self.exp[k]
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.log[a as usize] as u64 * e) % (self.q as u64 - 1);
        self.exp[k as usize]
    }

    /// Discrete logarithm to the chosen generator; None at 0.
    #[inline]
    pub fn log(&self, a: u16) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Image of an integer under Z → F_p ⊆ F_q.
    pub fn from_int(&self, n: i64) -> u16 {
        n.rem_euclid(self.p as i64) as u16
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q as u16
    }
}
