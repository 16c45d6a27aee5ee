//! Cantor-Bendixson derivatives of closed subsets of Cantor space presented by
//! deterministic automata: the presented set is the set of label sequences of
//! infinite paths from the initial state.
//!
//! Determinism makes infinite label sequences and infinite paths the same
//! thing, so a point is isolated exactly when some state on its path has a
//! single infinite continuation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::fixpoint::{iterate_operator, Direction, FixpointError, SetLike};
use crate::space::{SpacePresentation, SymbolicPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CbError {
    #[error("state {state:?} has two edges labelled {letter:?}; determinize the automaton first")]
    NondeterministicInput { state: String, letter: char },
    #[error("unknown state {0}")]
    UnknownState(usize),
    #[error(transparent)]
    Fixpoint(#[from] FixpointError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathCount {
    Zero,
    One,
    Many,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAutomaton {
    names: Vec<String>,
    initial: Option<usize>,
    delta: Vec<BTreeMap<char, usize>>,
}

impl PathAutomaton {
    pub fn new(names: Vec<String>, initial: usize, edges: &[(usize, usize, char)]) -> Result<Self, CbError> {
        let n = names.len();
        if initial >= n {
            return Err(CbError::UnknownState(initial));
        }
        let mut delta = vec![BTreeMap::new(); n];
        for &(s, t, c) in edges {
            if s >= n {
                return Err(CbError::UnknownState(s));
            }
            if t >= n {
                return Err(CbError::UnknownState(t));
            }
            if delta[s].insert(c, t).is_some_and(|old| old != t) {
                return Err(CbError::NondeterministicInput {
                    state: names[s].clone(),
                    letter: c,
                });
            }
        }
        Ok(PathAutomaton {
            names,
            initial: Some(initial),
            delta,
        })
    }

    pub fn empty() -> Self {
        PathAutomaton {
            names: Vec::new(),
            initial: None,
            delta: Vec::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn edges(&self) -> Vec<(usize, usize, char)> {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(s, m)| m.iter().map(move |(&c, &t)| (s, t, c)))
            .collect()
    }

    pub fn step(&self, state: usize, letter: char) -> Option<usize> {
        self.delta[state].get(&letter).copied()
    }

    /// States with at least one infinite path.
    fn alive(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if alive[s] && !self.delta[s].values().any(|&t| alive[t]) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    pub fn classify_states(&self) -> Vec<PathCount> {
        let n = self.num_states();
        let alive = self.alive();
        let live_out = |s: usize| self.delta[s].values().filter(|&&t| alive[t]).count();
        // a live state has one infinite path iff every live state it reaches has one live successor
        let mut branching = vec![false; n];
        for s in 0..n {
            branching[s] = alive[s] && live_out(s) > 1;
        }
        // propagate backwards: a state reaching a branching live state is Many
        let mut many = branching.clone();
        loop {
            let mut changed = false;
            for s in 0..n {
                if alive[s] && !many[s] && self.delta[s].values().any(|&t| alive[t] && many[t]) {
                    many[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n)
            .map(|s| {
                if !alive[s] {
                    PathCount::Zero
                } else if many[s] {
                    PathCount::Many
                } else {
                    PathCount::One
                }
            })
            .collect()
    }

    /// Restriction to states satisfying `keep`, then removal of states that are
    /// unreachable or have no infinite path.
    fn restrict(&self, keep: &[bool]) -> PathAutomaton {
        let Some(init) = self.initial else {
            return PathAutomaton::empty();
        };
        let n = self.num_states();
        let mut alive = keep.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if alive[s] && !self.delta[s].values().any(|&t| alive[t]) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !alive[init] {
            return PathAutomaton::empty();
        }
        let mut order = vec![init];
        let mut remap = vec![usize::MAX; n];
        remap[init] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for &t in self.delta[s].values() {
                if alive[t] && remap[t] == usize::MAX {
                    remap[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let delta = order
            .iter()
            .map(|&s| {
                self.delta[s]
                    .iter()
                    .filter(|(_, &t)| alive[t])
                    .map(|(&c, &t)| (c, remap[t]))
                    .collect()
            })
            .collect();
        PathAutomaton {
            names: order.iter().map(|&s| self.names[s].clone()).collect(),
            initial: Some(0),
            delta,
        }
    }

    /// Drops dead and unreachable states.
    pub fn pruned(&self) -> PathAutomaton {
        self.restrict(&vec![true; self.num_states()])
    }

    /// Whether the presented set of `self` is contained in that of `other`.
    ///
    /// Both sets are closed, so containment of the sets is containment of their
    /// finite prefixes, decided by simulating `self` inside `other`.
    pub fn language_subset(&self, other: &PathAutomaton) -> bool {
        let a = self.pruned();
        let b = other.pruned();
        let (Some(ia), ib) = (a.initial, b.initial) else {
            return true;
        };
        let Some(ib) = ib else {
            return false;
        };
        let mut seen = BTreeSet::from([(ia, ib)]);
        let mut queue = VecDeque::from([(ia, ib)]);
        while let Some((p, q)) = queue.pop_front() {
            for (&c, &p2) in &a.delta[p] {
                let Some(q2) = b.step(q, c) else {
                    return false;
                };
                if seen.insert((p2, q2)) {
                    queue.push_back((p2, q2));
                }
            }
        }
        true
    }

    /// Finite words of length `n` that extend to points of the set.
    pub fn prefixes(&self, n: usize) -> BTreeSet<String> {
        let a = self.pruned();
        let Some(init) = a.initial else {
            return BTreeSet::new();
        };
        let mut cur: BTreeSet<(String, usize)> = BTreeSet::from([(String::new(), init)]);
        for _ in 0..n {
            cur = cur
                .iter()
                .flat_map(|(w, s)| {
                    a.delta[*s].iter().map(move |(&c, &t)| {
                        let mut w2 = w.clone();
                        w2.push(c);
                        (w2, t)
                    })
                })
                .collect();
        }
        cur.into_iter().map(|(w, _)| w).collect()
    }

    /// Number of prefixes of length `n`, counted without enumerating them.
    pub fn prefix_count(&self, n: usize) -> u128 {
        let a = self.pruned();
        let Some(init) = a.initial else {
            return 0;
        };
        let mut count = vec![0u128; a.num_states()];
        count[init] = 1;
        for _ in 0..n {
            let mut next = vec![0u128; a.num_states()];
            for (s, &c) in count.iter().enumerate() {
                for &t in a.delta[s].values() {
                    next[t] = next[t].saturating_add(c);
                }
            }
            count = next;
        }
        count.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
    }

    /// A state and two cycles through it starting with different letters;
    /// together they span a copy of the full binary tree inside the set.
    pub fn perfect_witness(&self) -> Option<(String, String, String)> {
        let a = self.pruned();
        for q in 0..a.num_states() {
            let loops: Vec<String> = a.delta[q]
                .iter()
                .filter_map(|(&c, &t)| a.path_to(t, q).map(|w| format!("{c}{w}")))
                .collect();
            if loops.len() >= 2 {
                return Some((a.names[q].clone(), loops[0].clone(), loops[1].clone()));
            }
        }
        None
    }

    fn path_to(&self, from: usize, to: usize) -> Option<String> {
        let mut prev: BTreeMap<usize, (usize, char)> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(s) = queue.pop_front() {
            if s == to {
                let mut w = Vec::new();
                let mut cur = s;
                while cur != from {
                    let (p, c) = prev[&cur];
                    w.push(c);
                    cur = p;
                }
                return Some(w.into_iter().rev().collect());
            }
            for (&c, &t) in &self.delta[s] {
                if seen.insert(t) {
                    prev.insert(t, (s, c));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Encodes a presented countable space as a closed subset of Cantor space.
    ///
    /// The initial state picks a base point by letter. A point with children
    /// owns a chain `t_0, ..., t_K` linked by `0` with a `0`-loop at `t_K`: the
    /// path `0^ω` is the point itself, and a family letter read at `t_j` enters
    /// the member of index `j` (every index `>= K` shares one leaf).
    pub fn from_space(space: &SpacePresentation) -> PathAutomaton {
        const LETTERS: &str = "123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
        let letters: Vec<char> = LETTERS.chars().collect();
        let bound = space.index_bound();
        let mut names = vec!["root".to_string(), "leaf".to_string()];
        let mut edges: Vec<(usize, usize, char)> = vec![(1, 1, '0')];
        fn node(
            space: &SpacePresentation,
            p: &SymbolicPoint,
            bound: u64,
            letters: &[char],
            names: &mut Vec<String>,
            edges: &mut Vec<(usize, usize, char)>,
        ) -> usize {
            let children = space.children_of(p);
            if children.is_empty() {
                return 1;
            }
            let base = names.len();
            for j in 0..=bound {
                names.push(format!("{p}@{j}"));
            }
            for j in 0..=bound {
                let here = base + j as usize;
                let next = if j == bound { here } else { here + 1 };
                edges.push((here, next, '0'));
            }
            for (ci, f) in children.iter().enumerate() {
                for j in 0..=bound {
                    let target = if j == bound {
                        1
                    } else {
                        node(space, &SymbolicPoint::member(&f.name, j), bound, letters, names, edges)
                    };
                    edges.push((base + j as usize, target, letters[ci]));
                }
            }
            base
        }
        for (bi, b) in space.bases().iter().enumerate() {
            let t = node(space, &SymbolicPoint::base(b), bound, &letters, &mut names, &mut edges);
            edges.push((0, t, letters[bi]));
        }
        PathAutomaton::new(names, 0, &edges).expect("encoding is deterministic")
    }
}

impl SetLike for PathAutomaton {
    fn subset_of(&self, other: &Self) -> Option<bool> {
        Some(self.language_subset(other))
    }
}

/// The set of limit points: paths all of whose states have at least two
/// infinite continuations.
pub fn cb_derivative(a: &PathAutomaton) -> PathAutomaton {
    let keep: Vec<bool> = a.classify_states().iter().map(|&c| c == PathCount::Many).collect();
    a.restrict(&keep)
}

#[derive(Debug, Clone)]
pub struct DerivativeResult {
    pub rank: usize,
    /// `stages[0]` is the pruned input.
    pub stages: Vec<PathAutomaton>,
    pub stable: PathAutomaton,
    pub scattered: bool,
}

pub fn cb_rank(a: &PathAutomaton) -> Result<DerivativeResult, CbError> {
    let seed = a.pruned();
    let cap = seed.num_states() + 1;
    let it = iterate_operator(seed, cb_derivative, cap, Direction::Shrinking)?;
    let stable = it.last().clone();
    Ok(DerivativeResult {
        rank: it.rank,
        scattered: stable.is_empty(),
        stable,
        stages: it.stages,
    })
}
