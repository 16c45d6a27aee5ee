use std::collections::BTreeSet;
use std::sync::Arc;

use super::RelationError;
use crate::symbolic::FiniteSystem;

/// A relation on the points of a finite discrete system.
///
/// Every subset of a finite discrete square is closed, so closure is the identity.
#[derive(Debug, Clone)]
pub struct FiniteRelation {
    system: Arc<FiniteSystem>,
    pairs: BTreeSet<(usize, usize)>,
}

impl FiniteRelation {
    pub fn new(system: Arc<FiniteSystem>, pairs: BTreeSet<(usize, usize)>) -> Result<Self, RelationError> {
        let n = system.len();
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(RelationError::UnknownFinitePoint(a.max(b)));
        }
        Ok(FiniteRelation { system, pairs })
    }

    pub fn empty(system: Arc<FiniteSystem>) -> Self {
        FiniteRelation {
            system,
            pairs: BTreeSet::new(),
        }
    }

    pub fn full(system: Arc<FiniteSystem>) -> Self {
        let n = system.len();
        let pairs = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        FiniteRelation { system, pairs }
    }

    pub fn diagonal(system: Arc<FiniteSystem>) -> Self {
        FiniteRelation::empty(system).add_diagonal()
    }

    pub fn system(&self) -> &Arc<FiniteSystem> {
        &self.system
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn member(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.member(b, a))
    }

    pub fn is_subset(&self, other: &Self) -> Option<bool> {
        (self.system == other.system).then(|| self.pairs.is_subset(&other.pairs))
    }

    pub fn is_full(&self) -> bool {
        self.pairs.len() == self.system.len() * self.system.len()
    }

    pub fn add_diagonal(&self) -> Self {
        let mut r = self.clone();
        r.pairs.extend((0..self.system.len()).map(|a| (a, a)));
        r
    }

    pub fn transitive_saturate(&self) -> Self {
        let n = self.system.len();
        let mut m = vec![vec![false; n]; n];
        for &(a, b) in &self.pairs {
            m[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        if m[k][j] {
                            m[i][j] = true;
                        }
                    }
                }
            }
        }
        let pairs = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j])
            .collect();
        FiniteRelation {
            system: self.system.clone(),
            pairs,
        }
    }

    pub fn missing_pair(&self) -> Option<(usize, usize)> {
        let n = self.system.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.member(i, j))
    }
}

impl PartialEq for FiniteRelation {
    fn eq(&self, other: &Self) -> bool {
        self.is_subset(other) == Some(true) && other.is_subset(self) == Some(true)
    }
}
