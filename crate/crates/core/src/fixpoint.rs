//! Stage-tracing iteration of monotone set operators.
//!
//! Both rank engines are instances: the closure-rank engine iterates a growing
//! operator from a relation, the derivative engine a shrinking one from a
//! closed set. The rank is the number of strict steps before the first repeat.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Growing,
    Shrinking,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixpointError {
    #[error("first step is not {0:?}")]
    DirectionViolated(Direction),
    #[error("stages are not comparable")]
    Incomparable,
}

/// Set-valued things an operator can be iterated on.
pub trait SetLike: Clone {
    /// `Some(true)` when `self` is contained in `other`; `None` if the two
    /// values live in different ambient spaces.
    fn subset_of(&self, other: &Self) -> Option<bool>;

    fn same_as(&self, other: &Self) -> bool {
        self.subset_of(other) == Some(true) && other.subset_of(self) == Some(true)
    }
}

#[derive(Debug, Clone)]
pub struct Iteration<S> {
    /// `stages[0]` is the seed; the last stage is the stable value when
    /// `converged`, otherwise the value reached at the cap.
    pub stages: Vec<S>,
    pub rank: usize,
    pub converged: bool,
}

impl<S> Iteration<S> {
    pub fn last(&self) -> &S {
        self.stages.last().expect("at least the seed")
    }
}

pub fn iterate_operator<S, F>(
    seed: S,
    mut op: F,
    cap: usize,
    direction: Direction,
) -> Result<Iteration<S>, FixpointError>
where
    S: SetLike,
    F: FnMut(&S) -> S,
{
    let mut stages = vec![seed];
    loop {
        let cur = stages.last().expect("nonempty");
        let next = op(cur);
        let ordered = match direction {
            Direction::Growing => cur.subset_of(&next),
            Direction::Shrinking => next.subset_of(cur),
        };
        match ordered {
            None => return Err(FixpointError::Incomparable),
            Some(false) => return Err(FixpointError::DirectionViolated(direction)),
            Some(true) => {}
        }
        if next.same_as(cur) {
            let rank = stages.len() - 1;
            return Ok(Iteration {
                stages,
                rank,
                converged: true,
            });
        }
        stages.push(next);
        if stages.len() - 1 >= cap {
            return Ok(Iteration {
                stages,
                rank: cap,
                converged: false,
            });
        }
    }
}

impl<T: Ord + Clone> SetLike for std::collections::BTreeSet<T> {
    fn subset_of(&self, other: &Self) -> Option<bool> {
        Some(self.is_subset(other))
    }
}
