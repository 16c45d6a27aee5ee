//! Dynamical pair relations on finitely presented topological dynamical systems.
//!
//! The crate is organised around a handful of presentations:
//!
//! - [`symbolic`]: two-sided shifts of finite type as labelled graphs, sliding
//!   block codes and finite self-maps, with language and entropy computations.
//! - [`space`]: countable compact spaces given by finite trees of convergent
//!   sequences.
//! - [`relation`]: closed symmetric relations over either backend together with
//!   the transitive, topological and diagonal closure operators.
//! - [`gamma`]: the closure-rank engine and the full / realizable classifiers.
//! - [`assign`]: entropy (IE), regionally proximal and asymptotic pairs at
//!   block depth, plus the axiom harness.
//! - [`cb`]: Cantor-Bendixson derivatives of automaton-presented closed sets.
//! - [`fixpoint`]: the stage-tracing iteration shared by the rank engines.
//! - [`format`]: the plain-text input formats.

pub mod assign;
pub mod cb;
pub mod fixpoint;
pub mod format;
pub mod gamma;
pub mod relation;
pub mod space;
pub mod symbolic;

pub use cb::{cb_derivative, cb_rank, CbError, DerivativeResult, PathAutomaton, PathCount};
pub use assign::{AssignmentKind, AssignmentResult, IeParams, PairStatus};
pub use gamma::{Rank, RankResult, Verdict, Witness};
pub use fixpoint::{Direction, FixpointError, Iteration, SetLike};
pub use relation::{
    Atom, BasicSet, BlockRelation, ExactnessFlag, FamilyRelation, FiniteRelation, Relation,
};
pub use space::{SpaceError, SpacePresentation, SymbolicPoint};
pub use symbolic::{EdgeShift, FiniteSystem, ShiftError, SftSpec, SlidingBlockCode, Word};
