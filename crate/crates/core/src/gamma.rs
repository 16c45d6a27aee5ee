//! The closure-rank engine: `Gamma(E) = closure(E+ u Delta)`, its iteration,
//! and the full / realizable classifiers.

use std::fmt;

use thiserror::Error;

use crate::fixpoint::{iterate_operator, Direction, FixpointError, SetLike};
use crate::relation::{ExactnessFlag, Relation};
use crate::space::SymbolicPoint;

pub const DEFAULT_CAP: usize = 64;
pub const DEFAULT_MAX_DEPTH: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("relation is not symmetric")]
    Asymmetric,
    #[error(transparent)]
    Fixpoint(#[from] FixpointError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Exact(usize),
    AtLeast(usize),
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Exact(n) => write!(f, "{n}"),
            Rank::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankResult {
    pub rank: Rank,
    /// `stages[n]` is the n-th iterate; the seed is `stages[0]`.
    pub stages: Vec<Relation>,
    pub stable: Relation,
    pub flag: ExactnessFlag,
}

/// A pair outside some relation, in the vocabulary of its backend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Points(SymbolicPoint, SymbolicPoint),
    Blocks(String, String),
    Finite(usize, usize),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Points(a, b) => write!(f, "({a},{b})"),
            Witness::Blocks(a, b) => write!(f, "({a},{b})"),
            Witness::Finite(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Full,
    NotFull(Witness),
    RealizableCertified,
    RefutedAtDepth(usize, Witness),
    UnknownAtBudget,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Full => "Full",
            Verdict::NotFull(_) => "NotFull",
            Verdict::RealizableCertified => "RealizableCertified",
            Verdict::RefutedAtDepth(..) => "RefutedAtDepth",
            Verdict::UnknownAtBudget => "UnknownAtBudget",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::NotFull(w) | Verdict::RefutedAtDepth(_, w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::RefutedAtDepth(k, _) => write!(f, "RefutedAtDepth({k})"),
            v => write!(f, "{}", v.name()),
        }
    }
}

impl SetLike for Relation {
    fn subset_of(&self, other: &Self) -> Option<bool> {
        self.is_subset(other)
    }
}

/// Some pair of the ambient square missing from `r`.
pub fn missing_pair(r: &Relation) -> Option<Witness> {
    match r {
        Relation::Family(r) => r.missing_pair().map(|(a, b)| Witness::Points(a, b)),
        Relation::Block(r) => r
            .missing_pair()
            .map(|(u, v)| Witness::Blocks(r.shift().render(&u), r.shift().render(&v))),
        Relation::Finite(r) => r.missing_pair().map(|(a, b)| Witness::Finite(a, b)),
    }
}

fn step(r: &Relation) -> Relation {
    r.transitive_saturate().add_diagonal().topological_closure()
}

pub fn gamma_step(r: &Relation) -> Result<Relation, GammaError> {
    if !r.is_symmetric() {
        return Err(GammaError::Asymmetric);
    }
    Ok(step(r))
}

pub fn gamma_rank(r: &Relation, cap: usize) -> Result<RankResult, GammaError> {
    if !r.is_symmetric() {
        return Err(GammaError::Asymmetric);
    }
    let it = iterate_operator(r.clone(), step, cap.max(1), Direction::Growing)?;
    let rank = if it.converged {
        Rank::Exact(it.rank)
    } else {
        Rank::AtLeast(it.rank)
    };
    let flag = match r {
        Relation::Block(b) => b.flag().weaken(ExactnessFlag::OuterApprox(b.depth())),
        _ => ExactnessFlag::Exact,
    };
    Ok(RankResult {
        rank,
        stable: it.last().clone(),
        stages: it.stages,
        flag,
    })
}

/// Whether `p` is the whole square. Approximate block relations covering every
/// block pair are not enough for `Full`.
pub fn classify_full(p: &Relation) -> Verdict {
    match missing_pair(p) {
        Some(w) => Verdict::NotFull(w),
        None if p.flag() == ExactnessFlag::Exact => Verdict::Full,
        None => Verdict::UnknownAtBudget,
    }
}

/// Whether the closed equivalence relation generated by `p` is the whole square.
///
/// Exact on the family and finite backends. On blocks a stable relation that
/// misses a pair refutes, since the true relation lies inside its block outer
/// approximation and the operator is monotone.
pub fn classify_realizable(p: &Relation, cap: usize) -> Result<Verdict, GammaError> {
    let res = gamma_rank(p, cap)?;
    if let Rank::AtLeast(_) = res.rank {
        return Ok(Verdict::UnknownAtBudget);
    }
    Ok(match (p, missing_pair(&res.stable)) {
        (Relation::Block(b), Some(w)) => Verdict::RefutedAtDepth(b.depth(), w),
        (_, Some(w)) => Verdict::NotFull(w),
        (_, None) if p.flag() == ExactnessFlag::Exact => Verdict::RealizableCertified,
        (_, None) => Verdict::UnknownAtBudget,
    })
}

/// Runs [`classify_realizable`] on the block relations produced for each depth
/// in turn, stopping at the first refutation.
pub fn classify_realizable_over_depths<F, E>(
    depths: std::ops::RangeInclusive<usize>,
    mut relation_at: F,
    cap: usize,
) -> Result<Verdict, E>
where
    F: FnMut(usize) -> Result<Relation, E>,
    E: From<GammaError>,
{
    let mut all_certified = true;
    for k in depths {
        match classify_realizable(&relation_at(k)?, cap)? {
            v @ (Verdict::RefutedAtDepth(..) | Verdict::NotFull(_)) => return Ok(v),
            Verdict::RealizableCertified => {}
            _ => all_certified = false,
        }
    }
    Ok(if all_certified {
        Verdict::RealizableCertified
    } else {
        Verdict::UnknownAtBudget
    })
}
