//! Error and witness types shared by every module.

use serde::{Deserialize, Serialize};

pub type Result<T> = std::result::Result<T, Error>;

/// A concrete counterexample to a named law.
///
/// `law` is a stable dotted tag (e.g. `"bset.meet"`) and `bindings` the
/// variable assignment that falsifies it, in the order the law quantifies
/// them.  Witnesses are replayable: feeding one back through the checker
/// that produced it re-evaluates exactly that instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub law: String,
    pub bindings: Vec<(String, u64)>,
}

impl Witness {
    pub fn new(law: &str, bindings: &[(&str, u64)]) -> Self {
        Witness {
            law: law.to_string(),
            bindings: bindings.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at ", self.law)?;
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Structurally malformed input: wrong table shape, element out of
    /// range, mismatched algebras, and the like.
    #[error("invalid input: {0}")]
    Input(String),

    /// A law failed with a concrete counterexample.
    #[error("law violated: {0}")]
    Law(Witness),

    /// A configured bound would be exceeded.
    #[error("capacity exceeded: {what} = {requested} over limit {limit}")]
    Capacity { what: String, requested: u64, limit: u64 },

    /// A condition that valid inputs cannot trigger (for example glueing
    /// failing on a validated structure).  Indicates a bug, not bad data.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn law(law: &str, bindings: &[(&str, u64)]) -> Self {
        Error::Law(Witness::new(law, bindings))
    }

    /// The witness carried by a `Law` error, if any.
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Error::Law(w) => Some(w),
            _ => None,
        }
    }
}
