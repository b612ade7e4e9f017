//! Finite-field arithmetic for weighted diagonal hypersurfaces: point
//! counts by enumeration and by Jacobi sums, Frobenius eigenvalues and the
//! split quartic factor.

pub mod count;
pub mod cyclotomic;
pub mod field;
pub mod jacobi;
pub mod quartic;

use thiserror::Error;

pub use count::{count_points, weil_envelope, Monomial, PointCount, WeightedHypersurface, WeilEnvelope, DEFAULT_BUDGET};
pub use field::FiniteField;
pub use jacobi::{frobenius_spectrum, jacobi_point_count, SpectrumOrbit};
pub use quartic::{quartic_factor, quartic_from_spectrum, weil_validate, FrobQuartic, QuarticReport, WeilReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("F_{0}^{1} exceeds the table size limit")]
    FieldTooLarge(u64, usize),
    #[error("no primitive element of rank {0}")]
    NoGenerator(usize),
    #[error("weights {weights:?} do not sum to degree {degree}")]
    NotCalabiYau { weights: Vec<u32>, degree: u32 },
    #[error("monomial {0:?} is not quasi-homogeneous of the hypersurface degree")]
    NotQuasiHomogeneous(Vec<u32>),
    #[error("enumeration needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("Jacobi-sum counting needs a diagonal fiber with unit coefficients")]
    NotDiagonal,
    #[error("no integral split quartic at p = {0}")]
    NoIntegralQuartic(u64),
    #[error("p = {0} divides the exponents")]
    BadPrime(u64),
    #[error("coefficient {0} does not reduce mod {1}")]
    BadReduction(String, u64),
    #[error("inconsistent count: {0}")]
    Inconsistent(String),
    #[error("character-table cache: {0}")]
    Cache(String),
}

/// Primes of good reduction for the default families: odd p not dividing 8K.
pub fn is_good_prime(p: u64, degree: u32) -> bool {
    field::is_prime(p) && p != 2 && (8 * degree as u64) % p != 0
}
