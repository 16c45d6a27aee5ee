//! Symmetric closed relations and the operators the closure rank is built from.
//!
//! Three backends share one interface:
//!
//! - [`FamilyRelation`]: exact relations on a countable presented space.
//! - [`BlockRelation`]: unions of cylinder pairs `[u] x [v]` on a subshift at a
//!   fixed block depth, used as outer approximations.
//! - [`FiniteRelation`]: arbitrary relations on a finite discrete system.

mod block;
mod family;
mod finite;

use std::fmt;

use thiserror::Error;

pub use block::BlockRelation;
pub use family::{Atom, BasicSet, FamilyRelation, SaturationStats};
pub use finite::FiniteRelation;

use crate::space::SpaceError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("block {0:?} is not allowed in the shift")]
    BlockNotAllowed(String),
    #[error("block {block:?} has length {len}, expected {expected}")]
    BlockLength {
        block: String,
        len: usize,
        expected: usize,
    },
    #[error("point {0} is outside the finite system")]
    UnknownFinitePoint(usize),
    #[error("relations live on different backends or spaces")]
    BackendMismatch,
    #[error("relation is not symmetric")]
    Asymmetric,
}

/// How much a computed relation can be trusted.
///
/// Flags are ordered from strongest to weakest; combining two flags keeps the
/// weaker one, so `Exact` never reappears after an approximation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExactnessFlag {
    Exact,
    OuterApprox(usize),
    HeuristicStable(usize),
}

impl ExactnessFlag {
    pub fn weaken(self, other: ExactnessFlag) -> ExactnessFlag {
        self.max(other)
    }
}

impl fmt::Display for ExactnessFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessFlag::Exact => write!(f, "Exact"),
            ExactnessFlag::OuterApprox(k) => write!(f, "OuterApprox({k})"),
            ExactnessFlag::HeuristicStable(b) => write!(f, "HeuristicStable({b})"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Relation {
    Family(FamilyRelation),
    Block(BlockRelation),
    Finite(FiniteRelation),
}

impl Relation {
    pub fn transitive_saturate(&self) -> Relation {
        match self {
            Relation::Family(r) => Relation::Family(r.transitive_saturate()),
            Relation::Block(r) => Relation::Block(r.transitive_saturate()),
            Relation::Finite(r) => Relation::Finite(r.transitive_saturate()),
        }
    }

    pub fn topological_closure(&self) -> Relation {
        match self {
            Relation::Family(r) => Relation::Family(r.topological_closure()),
            Relation::Block(r) => Relation::Block(r.clone()),
            Relation::Finite(r) => Relation::Finite(r.clone()),
        }
    }

    pub fn add_diagonal(&self) -> Relation {
        match self {
            Relation::Family(r) => Relation::Family(r.add_diagonal()),
            Relation::Block(r) => Relation::Block(r.add_diagonal()),
            Relation::Finite(r) => Relation::Finite(r.add_diagonal()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Relation::Family(r) => r.is_symmetric(),
            Relation::Block(r) => r.is_symmetric(),
            Relation::Finite(r) => r.is_symmetric(),
        }
    }

    pub fn flag(&self) -> ExactnessFlag {
        match self {
            Relation::Family(_) | Relation::Finite(_) => ExactnessFlag::Exact,
            Relation::Block(r) => r.flag(),
        }
    }

    /// Containment as sets of point pairs; `None` across backends.
    pub fn is_subset(&self, other: &Relation) -> Option<bool> {
        match (self, other) {
            (Relation::Family(a), Relation::Family(b)) => a.is_subset(b).ok(),
            (Relation::Block(a), Relation::Block(b)) => a.is_subset(b),
            (Relation::Finite(a), Relation::Finite(b)) => a.is_subset(b),
            _ => None,
        }
    }

    pub fn same_set(&self, other: &Relation) -> bool {
        self.is_subset(other) == Some(true) && other.is_subset(self) == Some(true)
    }

    /// Whether the relation is the whole square of its space.
    pub fn is_full(&self) -> bool {
        match self {
            Relation::Family(r) => r.is_full(),
            Relation::Block(r) => r.is_full(),
            Relation::Finite(r) => r.is_full(),
        }
    }

    /// Whether the relation contains the diagonal and is transitively closed.
    pub fn is_equivalence(&self) -> bool {
        self.is_symmetric()
            && self.add_diagonal().same_set(self)
            && self.transitive_saturate().same_set(self)
    }

    /// Size summary used in reports: pairs for the finite backends, normal-form
    /// atoms for the family backend.
    pub fn size(&self) -> usize {
        match self {
            Relation::Family(r) => r.atoms().len(),
            Relation::Block(r) => r.pairs().len(),
            Relation::Finite(r) => r.pairs().len(),
        }
    }

    pub fn backend_name(&self) -> &'static str {
        match self {
            Relation::Family(_) => "family",
            Relation::Block(_) => "block",
            Relation::Finite(_) => "finite",
        }
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.same_set(other)
    }
}
