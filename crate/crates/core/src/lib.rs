//! Finite-instance workbench for the algebra behind cartesian closed
//! varieties: finite Boolean algebras and their partitions, B-sets,
//! monoid actions, matched pairs B ⋈ M and their sets, and finite clone
//! fragments with hyperaffine-unary decomposition.
//!
//! Everything here is exhaustively checkable at desk scale.  Validators
//! return certificates listing each law checked, the number of instances
//! swept, and concrete witnesses on failure; constructions re-verify the
//! universal property they claim instead of assuming it.
//!
//! Heavy sweeps go through [`exec`], which runs them on rayon when the
//! `parallel` feature is enabled (the default) and falls back to plain
//! iterators otherwise.  Results are deterministic in both modes.

pub mod balg;
pub mod bset;
pub mod clone;
pub mod error;
pub mod exec;
pub mod matched;
pub mod mon;
pub mod report;
pub mod schema;

pub mod acceptance;

pub use error::{Error, Result, Witness};
pub use report::{Certificate, Check};

/// Capacity bounds for enumeration-heavy operations.
///
/// Exceeding a bound is reported as [`Error::Capacity`] naming the bound
/// and its configured limit, never as silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Atom count for Boolean algebras (elements are bit vectors).
    pub max_atoms: u32,
    /// Carrier size for monoids in enumeration-heavy paths.
    pub max_monoid: usize,
    /// Arity bound for clone-fragment sweeps.  The hyperaffine test
    /// internally builds operations of squared arity, which is allowed.
    pub max_arity: usize,
    /// Ceiling on brute-force search spaces (naive hom filters, validator
    /// sweeps, the five-variable if-then-else sweep).
    pub max_naive: u64,
}

impl Default for Limits {
    fn default() -> Self {
        // 2^25: admits the 8-element naive Boolean hom filter (8^8) and
        // if-then-else carriers up to 32 (32^5).
        Limits { max_atoms: 16, max_monoid: 12, max_arity: 3, max_naive: 33_554_432 }
    }
}

impl Limits {
    pub fn check_atoms(&self, atoms: u32) -> Result<()> {
        if atoms == 0 || atoms > self.max_atoms {
            return Err(Error::Capacity {
                what: "atoms".into(),
                requested: atoms as u64,
                limit: self.max_atoms as u64,
            });
        }
        Ok(())
    }

    pub fn check_monoid(&self, size: usize) -> Result<()> {
        if size > self.max_monoid {
            return Err(Error::Capacity {
                what: "monoid size".into(),
                requested: size as u64,
                limit: self.max_monoid as u64,
            });
        }
        Ok(())
    }

    pub fn check_arity(&self, arity: usize) -> Result<()> {
        if arity == 0 || arity > self.max_arity {
            return Err(Error::Capacity {
                what: "arity".into(),
                requested: arity as u64,
                limit: self.max_arity as u64,
            });
        }
        Ok(())
    }

    pub fn check_naive(&self, space: u64) -> Result<()> {
        if space > self.max_naive {
            return Err(Error::Capacity {
                what: "search space".into(),
                requested: space,
                limit: self.max_naive,
            });
        }
        Ok(())
    }
}
