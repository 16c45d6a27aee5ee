use std::collections::{BTreeMap, HashMap};

use super::{parse_word, Edge, EdgeShift, ShiftError, Word, DETERMINIZATION_CAP};

/// A sliding block code with memory and anticipation `window`.
///
/// The image of a point `x` has `phi(x)_i = rule(x[i-window ..= i+window])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    window: usize,
    source_alphabet: Vec<char>,
    target_alphabet: Vec<char>,
    rule: BTreeMap<Word, u8>,
}

impl SlidingBlockCode {
    pub fn new(
        window: usize,
        source_alphabet: Vec<char>,
        target_alphabet: Vec<char>,
        rules: &[(String, char)],
    ) -> Result<Self, ShiftError> {
        super::check_alphabet(&target_alphabet)?;
        let mut rule = BTreeMap::new();
        for (block, letter) in rules {
            let w = parse_word(&source_alphabet, block)?;
            if w.len() != 2 * window + 1 {
                return Err(ShiftError::BadRuleBlock {
                    block: block.clone(),
                    len: w.len(),
                    expected: 2 * window + 1,
                });
            }
            let t = target_alphabet
                .iter()
                .position(|c| c == letter)
                .ok_or(ShiftError::UnknownLetter(*letter))?;
            rule.insert(w, t as u8);
        }
        Ok(SlidingBlockCode {
            window,
            source_alphabet,
            target_alphabet,
            rule,
        })
    }

    /// The 1-block identity on `alphabet`.
    pub fn identity(alphabet: &[char]) -> Self {
        let rule = (0..alphabet.len() as u8).map(|a| (vec![a], a)).collect();
        SlidingBlockCode {
            window: 0,
            source_alphabet: alphabet.to_vec(),
            target_alphabet: alphabet.to_vec(),
            rule,
        }
    }

    /// A 1-block code given letter by letter.
    pub fn letter_map(source: &[char], target: &[char], map: &[u8]) -> Self {
        let rule = map.iter().enumerate().map(|(a, &b)| (vec![a as u8], b)).collect();
        SlidingBlockCode {
            window: 0,
            source_alphabet: source.to_vec(),
            target_alphabet: target.to_vec(),
            rule,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn source_alphabet(&self) -> &[char] {
        &self.source_alphabet
    }

    pub fn target_alphabet(&self) -> &[char] {
        &self.target_alphabet
    }

    pub fn rules(&self) -> &BTreeMap<Word, u8> {
        &self.rule
    }

    /// Image of a finite word; the result is `2 * window` letters shorter.
    pub fn apply_word(&self, w: &[u8]) -> Option<Word> {
        let span = 2 * self.window + 1;
        if w.len() < span {
            return Some(Vec::new());
        }
        w.windows(span).map(|b| self.rule.get(b).copied()).collect()
    }

    /// Fails with `RuleNotTotal` when an allowed block of `shift` has no image.
    pub fn check_total(&self, shift: &EdgeShift) -> Result<(), ShiftError> {
        if shift.alphabet() != self.source_alphabet.as_slice() {
            return Err(ShiftError::AlphabetMismatch);
        }
        for b in shift.blocks(self.window) {
            if !self.rule.contains_key(&b) {
                return Err(ShiftError::RuleNotTotal(shift.render(&b)));
            }
        }
        Ok(())
    }

    /// Source words up to length `max_len` on which the code fails to commute
    /// with the shift or leaves the image language.
    pub fn equivariance_failures(
        &self,
        shift: &EdgeShift,
        image: &EdgeShift,
        max_len: usize,
    ) -> Vec<Word> {
        let span = 2 * self.window + 1;
        let mut failures = Vec::new();
        for n in span..=max_len {
            for u in shift.words(n) {
                let Some(c) = self.apply_word(&u) else {
                    failures.push(u);
                    continue;
                };
                let shifted_ok = match self.apply_word(&u[1..]) {
                    Some(d) if u.len() > span => d.as_slice() == &c[1..],
                    Some(_) => true,
                    None => false,
                };
                if !shifted_ok || !image.accepts(&c) {
                    failures.push(u);
                }
            }
        }
        failures
    }
}

/// A right-resolving presentation of the image of `shift` under `code`.
///
/// Walks of length `2w+1` in the source graph become edges labelled by the
/// local rule; the resulting (sofic) presentation is then determinized.
pub fn apply_code(code: &SlidingBlockCode, shift: &EdgeShift) -> Result<EdgeShift, ShiftError> {
    code.check_total(shift)?;
    let target = code.target_alphabet.clone();
    if shift.is_empty() {
        return Ok(EdgeShift::empty(target));
    }
    let len = 2 * code.window;
    // vertices: walks of length 2w, keyed by (start state, edge ids)
    let mut walks: Vec<(usize, Vec<usize>)> =
        (0..shift.num_states()).map(|s| (s, Vec::new())).collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for (start, path) in &walks {
            let end = path.last().map_or(*start, |&e| shift.edges()[e].target);
            for &e in &shift.out[end] {
                let mut p = path.clone();
                p.push(e);
                next.push((*start, p));
            }
        }
        walks = next;
    }
    let index: HashMap<(usize, Vec<usize>), usize> = walks
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let mut edges = Vec::new();
    for (i, (start, path)) in walks.iter().enumerate() {
        let end = path.last().map_or(*start, |&e| shift.edges()[e].target);
        for &e in &shift.out[end] {
            let mut full = path.clone();
            full.push(e);
            let labels: Word = full.iter().map(|&x| shift.edges()[x].label).collect();
            let letter = code.rule[&labels];
            let tail_start = shift.edges()[full[0]].target;
            let tail = full[1..].to_vec();
            let j = index[&(tail_start, tail)];
            edges.push(Edge {
                source: i,
                target: j,
                label: letter,
            });
        }
    }
    let names = (0..walks.len()).map(|i| format!("w{i}")).collect();
    let raw = EdgeShift::from_edges(target, names, edges)?;
    raw.determinize(DETERMINIZATION_CAP)
}
