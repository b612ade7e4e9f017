//! Periods, monodromy, attractor flows, limiting mixed Hodge data and
//! finite-field point counts for one-parameter hypergeometric Calabi–Yau
//! families.

pub mod arith;
pub mod attractor;
pub mod boundary;
pub mod exact;
pub mod hyperseries;
pub mod k3e;
pub mod monodromy;
pub mod periods;
pub mod picard_fuchs;
