//! Shifts of finite type presented as labelled graphs.
//!
//! A point of an [`EdgeShift`] is the label sequence of a bi-infinite walk in
//! its graph and the dynamics is the left shift. Presentations are trimmed at
//! construction, so every finite path extends to a bi-infinite one and the
//! finite path labels are exactly the language of the subshift.

mod code;
mod entropy;
mod finite;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

pub use code::{apply_code, SlidingBlockCode};
pub use entropy::{spectral_radius, EntropyReport, GROWTH_CHECK_LENGTHS};
pub use finite::FiniteSystem;

/// A finite word, stored as indices into the shift's alphabet.
pub type Word = Vec<u8>;

/// Determinization of image presentations is refused beyond this many subset states.
pub const DETERMINIZATION_CAP: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("the shift is empty")]
    EmptyShift,
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("letter {0:?} appears twice in the alphabet")]
    DuplicateLetter(char),
    #[error("forbidden word {0:?} is listed twice")]
    DuplicateForbidden(String),
    #[error("forbidden words must have length at least 1")]
    EmptyForbidden,
    #[error("edge refers to unknown state {0}")]
    UnknownState(usize),
    #[error("edge label {0} is outside the alphabet")]
    UnknownLabel(u8),
    #[error("local rule has no image for allowed block {0:?}")]
    RuleNotTotal(String),
    #[error("rule block {block:?} has length {len}, expected {expected}")]
    BadRuleBlock {
        block: String,
        len: usize,
        expected: usize,
    },
    #[error("code source alphabet does not match the shift alphabet")]
    AlphabetMismatch,
    #[error("determinization exceeded {0} subset states")]
    ResourceExceeded(usize),
    #[error("power iteration did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: u8,
}

/// Alphabet plus forbidden words; the input format for SFT construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: Vec<char>,
    forbidden: Vec<Word>,
}

impl SftSpec {
    pub fn new(alphabet: Vec<char>, forbidden: &[&str]) -> Result<Self, ShiftError> {
        let forbidden: Vec<String> = forbidden.iter().map(|w| w.to_string()).collect();
        Self::from_strings(alphabet, &forbidden)
    }

    pub fn from_strings(alphabet: Vec<char>, forbidden: &[String]) -> Result<Self, ShiftError> {
        check_alphabet(&alphabet)?;
        let mut seen = BTreeSet::new();
        let mut words = Vec::with_capacity(forbidden.len());
        for w in forbidden {
            if w.is_empty() {
                return Err(ShiftError::EmptyForbidden);
            }
            if !seen.insert(w.clone()) {
                return Err(ShiftError::DuplicateForbidden(w.clone()));
            }
            words.push(parse_word(&alphabet, w)?);
        }
        Ok(SftSpec {
            alphabet,
            forbidden: words,
        })
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }
}

fn check_alphabet(alphabet: &[char]) -> Result<(), ShiftError> {
    let mut seen = BTreeSet::new();
    for &c in alphabet {
        if !seen.insert(c) {
            return Err(ShiftError::DuplicateLetter(c));
        }
    }
    Ok(())
}

fn parse_word(alphabet: &[char], s: &str) -> Result<Word, ShiftError> {
    s.chars()
        .map(|c| {
            alphabet
                .iter()
                .position(|&a| a == c)
                .map(|i| i as u8)
                .ok_or(ShiftError::UnknownLetter(c))
        })
        .collect()
}

/// A trimmed labelled graph presenting a two-sided subshift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeShift {
    alphabet: Vec<char>,
    state_names: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

/// Deterministic subset automaton reading the language from the set of all states.
pub(crate) struct SubsetAutomaton {
    /// `delta[s][a]` is the successor of subset state `s` on letter `a`.
    pub(crate) delta: Vec<Vec<Option<usize>>>,
    pub(crate) subsets: Vec<Vec<usize>>,
}

impl EdgeShift {
    /// Builds and trims a presentation from explicit edges.
    pub fn from_edges(
        alphabet: Vec<char>,
        state_names: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<Self, ShiftError> {
        check_alphabet(&alphabet)?;
        for e in &edges {
            if e.source >= state_names.len() {
                return Err(ShiftError::UnknownState(e.source));
            }
            if e.target >= state_names.len() {
                return Err(ShiftError::UnknownState(e.target));
            }
            if e.label as usize >= alphabet.len() {
                return Err(ShiftError::UnknownLabel(e.label));
            }
        }
        Ok(Self::trimmed(alphabet, state_names, edges))
    }

    /// The empty subshift over `alphabet`.
    pub fn empty(alphabet: Vec<char>) -> Self {
        EdgeShift {
            alphabet,
            state_names: Vec::new(),
            edges: Vec::new(),
            out: Vec::new(),
        }
    }

    /// The full shift on `alphabet`.
    pub fn full(alphabet: Vec<char>) -> Self {
        let edges = (0..alphabet.len())
            .map(|a| Edge {
                source: 0,
                target: 0,
                label: a as u8,
            })
            .collect();
        Self::trimmed(alphabet, vec!["*".to_string()], edges)
    }

    fn trimmed(alphabet: Vec<char>, state_names: Vec<String>, mut edges: Vec<Edge>) -> Self {
        let n = state_names.len();
        let mut alive = vec![true; n];
        loop {
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for e in edges.iter() {
                if alive[e.source] && alive[e.target] {
                    outdeg[e.source] += 1;
                    indeg[e.target] += 1;
                }
            }
            let mut changed = false;
            for s in 0..n {
                if alive[s] && (indeg[s] == 0 || outdeg[s] == 0) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for s in 0..n {
            if alive[s] {
                remap[s] = names.len();
                names.push(state_names[s].clone());
            }
        }
        edges.retain(|e| alive[e.source] && alive[e.target]);
        for e in edges.iter_mut() {
            e.source = remap[e.source];
            e.target = remap[e.target];
        }
        edges.sort();
        edges.dedup();
        let mut out = vec![Vec::new(); names.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        EdgeShift {
            alphabet,
            state_names: names,
            edges,
            out,
        }
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, state: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[state].iter().map(move |&i| &self.edges[i])
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }

    /// Parses a word written with this shift's letters.
    pub fn word(&self, s: &str) -> Result<Word, ShiftError> {
        parse_word(&self.alphabet, s)
    }

    pub fn render(&self, w: &[u8]) -> String {
        w.iter().map(|&a| self.alphabet[a as usize]).collect()
    }

    /// True when every state has at most one outgoing edge per label.
    pub fn is_right_resolving(&self) -> bool {
        self.out.iter().all(|es| {
            let mut seen = BTreeSet::new();
            es.iter().all(|&i| seen.insert(self.edges[i].label))
        })
    }

    /// All words of length `n` labelling paths of the graph.
    pub fn words(&self, n: usize) -> BTreeSet<Word> {
        if self.is_empty() {
            return BTreeSet::new();
        }
        let mut frontier: BTreeMap<Word, BTreeSet<usize>> = BTreeMap::new();
        frontier.insert(Vec::new(), (0..self.num_states()).collect());
        for _ in 0..n {
            let mut next: BTreeMap<Word, BTreeSet<usize>> = BTreeMap::new();
            for (w, ends) in &frontier {
                for &s in ends {
                    for e in self.out_edges(s) {
                        let mut w2 = w.clone();
                        w2.push(e.label);
                        next.entry(w2).or_default().insert(e.target);
                    }
                }
            }
            frontier = next;
        }
        frontier.into_keys().collect()
    }

    /// Allowed central blocks of length `2k+1`, in lexicographic order.
    pub fn blocks(&self, k: usize) -> Vec<Word> {
        self.words(2 * k + 1).into_iter().collect()
    }

    /// Whether some path reads `pattern`, where `None` matches any letter.
    pub fn realizes(&self, pattern: &[Option<u8>]) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut current: Vec<bool> = vec![true; self.num_states()];
        for &p in pattern {
            let mut next = vec![false; self.num_states()];
            let mut any = false;
            for (s, _) in current.iter().enumerate().filter(|(_, &c)| c) {
                for e in self.out_edges(s) {
                    if p.map_or(true, |a| a == e.label) {
                        next[e.target] = true;
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            current = next;
        }
        true
    }

    /// Whether `w` is in the language.
    pub fn accepts(&self, w: &[u8]) -> bool {
        let pattern: Vec<Option<u8>> = w.iter().map(|&a| Some(a)).collect();
        self.realizes(&pattern)
    }

    pub(crate) fn subset_automaton(&self, cap: usize) -> Result<SubsetAutomaton, ShiftError> {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        let start: Vec<usize> = (0..self.num_states()).collect();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut i = 0;
        while i < subsets.len() {
            let mut row = vec![None; self.alphabet.len()];
            for (a, slot) in row.iter_mut().enumerate() {
                let mut targets = BTreeSet::new();
                for &s in &subsets[i] {
                    for e in self.out_edges(s) {
                        if e.label as usize == a {
                            targets.insert(e.target);
                        }
                    }
                }
                if targets.is_empty() {
                    continue;
                }
                let key: Vec<usize> = targets.into_iter().collect();
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= cap {
                            return Err(ShiftError::ResourceExceeded(cap));
                        }
                        let id = subsets.len();
                        index.insert(key.clone(), id);
                        subsets.push(key);
                        id
                    }
                };
                *slot = Some(id);
            }
            delta.push(row);
            i += 1;
        }
        Ok(SubsetAutomaton { delta, subsets })
    }

    /// A right-resolving presentation of the same subshift.
    pub fn determinize(&self, cap: usize) -> Result<EdgeShift, ShiftError> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let dfa = self.subset_automaton(cap)?;
        let names = dfa
            .subsets
            .iter()
            .map(|set| {
                let parts: Vec<&str> = set.iter().map(|&s| self.state_names[s].as_str()).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let mut edges = Vec::new();
        for (s, row) in dfa.delta.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    edges.push(Edge {
                        source: s,
                        target: *t,
                        label: a as u8,
                    });
                }
            }
        }
        Ok(Self::trimmed(self.alphabet.clone(), names, edges))
    }

    /// Natural log of the number of words of length `n`, computed without enumeration.
    pub fn log_word_count(&self, n: usize) -> Result<f64, ShiftError> {
        if self.is_empty() {
            return Err(ShiftError::EmptyShift);
        }
        let dfa = self.subset_automaton(DETERMINIZATION_CAP)?;
        let mut counts = vec![0.0f64; dfa.subsets.len()];
        counts[0] = 1.0;
        let mut log_scale = 0.0f64;
        for _ in 0..n {
            let mut next = vec![0.0f64; counts.len()];
            for (s, row) in dfa.delta.iter().enumerate() {
                if counts[s] == 0.0 {
                    continue;
                }
                for t in row.iter().flatten() {
                    next[*t] += counts[s];
                }
            }
            let total: f64 = next.iter().sum();
            for c in next.iter_mut() {
                *c /= total;
            }
            log_scale += total.ln();
            counts = next;
        }
        Ok(log_scale)
    }

    /// Adjacency matrix counting parallel edges.
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.num_states();
        let mut a = vec![vec![0.0; n]; n];
        for e in &self.edges {
            a[e.source][e.target] += 1.0;
        }
        a
    }

    /// Topological entropy: log of the spectral radius of a right-resolving presentation.
    pub fn entropy(&self) -> Result<f64, ShiftError> {
        if self.is_empty() {
            return Err(ShiftError::EmptyShift);
        }
        if self.is_right_resolving() {
            Ok(spectral_radius(&self.adjacency())?.ln())
        } else {
            self.determinize(DETERMINIZATION_CAP)?.entropy()
        }
    }

    /// Entropy together with the word-growth estimates used to cross-check it.
    pub fn entropy_report(&self) -> Result<EntropyReport, ShiftError> {
        let spectral = self.entropy()?;
        let growth = GROWTH_CHECK_LENGTHS
            .iter()
            .map(|&n| Ok((n, self.log_word_count(n)? / n as f64)))
            .collect::<Result<Vec<_>, ShiftError>>()?;
        Ok(EntropyReport { spectral, growth })
    }

    /// Least `g <= bound` such that every ordered pair of states is joined by a
    /// path of length exactly `g`.
    pub fn mixing_gap_within(&self, bound: usize) -> Option<usize> {
        let n = self.num_states();
        if n == 0 {
            return None;
        }
        let mut step = vec![vec![false; n]; n];
        for e in &self.edges {
            step[e.source][e.target] = true;
        }
        let mut power = step.clone();
        for g in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return Some(g);
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for m in 0..n {
                    if power[i][m] {
                        for j in 0..n {
                            if step[m][j] {
                                next[i][j] = true;
                            }
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    /// [`Self::mixing_gap_within`] with Wielandt's bound `(n-1)^2 + 1`.
    pub fn mixing_gap(&self) -> Option<usize> {
        let n = self.num_states();
        self.mixing_gap_within((n.saturating_sub(1)).pow(2) + 1)
    }
}

/// Builds the higher-block presentation of the SFT described by `spec`.
///
/// States are the allowed words of length `m-1`, where `m` is the longest
/// forbidden word; an empty result is the distinguished empty shift.
pub fn build_edge_shift(spec: &SftSpec) -> EdgeShift {
    let alphabet = spec.alphabet.clone();
    let memory = spec
        .forbidden
        .iter()
        .map(|w| w.len())
        .max()
        .unwrap_or(1)
        .saturating_sub(1);
    let clean_suffix = |w: &[u8]| {
        spec.forbidden
            .iter()
            .all(|f| f.len() > w.len() || &w[w.len() - f.len()..] != f.as_slice())
    };
    // enumerate clean words of length `memory`
    let mut states: Vec<Word> = vec![Vec::new()];
    for _ in 0..memory {
        let mut next = Vec::new();
        for w in &states {
            for a in 0..alphabet.len() as u8 {
                let mut w2 = w.clone();
                w2.push(a);
                if clean_suffix(&w2) {
                    next.push(w2);
                }
            }
        }
        states = next;
    }
    let index: HashMap<Word, usize> = states
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let mut edges = Vec::new();
    for (i, w) in states.iter().enumerate() {
        for a in 0..alphabet.len() as u8 {
            let mut wa = w.clone();
            wa.push(a);
            if !clean_suffix(&wa) {
                continue;
            }
            let target = index[&wa[1..]];
            edges.push(Edge {
                source: i,
                target,
                label: a,
            });
        }
    }
    let names = states
        .iter()
        .map(|w| {
            if w.is_empty() {
                "*".to_string()
            } else {
                w.iter().map(|&a| alphabet[a as usize]).collect()
            }
        })
        .collect();
    EdgeShift::trimmed(alphabet, names, edges)
}
