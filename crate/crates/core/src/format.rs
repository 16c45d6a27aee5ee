//! Line-oriented text formats for shifts, codes, spaces, relations and
//! automata, with positioned diagnostics and renderers that parse back to
//! equal values.
//!
//! `#` starts a comment everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::cb::PathAutomaton;
use crate::relation::{Atom, BasicSet, BlockRelation, ExactnessFlag, FamilyRelation};
use crate::space::{Family, SpacePresentation, SymbolicPoint};
use crate::symbolic::{build_edge_shift, Edge, EdgeShift, SftSpec, SlidingBlockCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: expected {expected}")]
    Parse {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

fn parse_err<T>(line: usize, column: usize, expected: &str) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        column,
        expected: expected.to_string(),
    })
}

fn semantic<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Semantic {
        line,
        message: message.into(),
    })
}

/// A cursor over one line; columns are 1-based character positions.
struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err<T>(&self, expected: &str) -> Result<T, FormatError> {
        parse_err(self.line, self.column(), expected)
    }

    fn expect_char(&mut self, c: char) -> Result<(), FormatError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("{c:?}"))
        }
    }

    fn expect_arrow(&mut self) -> Result<(), FormatError> {
        self.skip_ws();
        if self.chars[self.pos..].starts_with(&['-', '>']) {
            self.pos += 2;
            Ok(())
        } else {
            self.err("'->'")
        }
    }

    /// A run of non-space characters not in `stop`.
    fn token(&mut self, what: &str, stop: &[char]) -> Result<(usize, String), FormatError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && !self.chars[self.pos].is_whitespace()
            && !stop.contains(&self.chars[self.pos])
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(what);
        }
        Ok((start + 1, self.chars[start..self.pos].iter().collect()))
    }

    fn name(&mut self) -> Result<String, FormatError> {
        self.token("a name", &['[', ']', '(', ')', ',', '{', '}'])
            .map(|(_, s)| s)
    }

    fn number(&mut self) -> Result<u64, FormatError> {
        self.skip_ws();
        let col = self.column();
        let (_, s) = self.token("a number", &[',', ')', ']', '}'])?;
        s.parse().or_else(|_| parse_err(self.line, col, "a number"))
    }

    fn point(&mut self) -> Result<SymbolicPoint, FormatError> {
        let n = self.name()?;
        if self.peek() == Some('[') {
            self.pos += 1;
            let k = self.number()?;
            self.expect_char(']')?;
            Ok(SymbolicPoint::Member(n, k))
        } else {
            Ok(SymbolicPoint::Base(n))
        }
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("end of line")
        }
    }
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect()
}

fn require_nonempty(text: &str) -> Result<Vec<(usize, &str)>, FormatError> {
    let ls = lines(text);
    if ls.is_empty() {
        return parse_err(1, 1, "at least one declaration");
    }
    Ok(ls)
}

/// Splits `key: rest`, reporting the column of `rest`.
fn keyed(line: &str) -> Option<(&str, &str, usize)> {
    let idx = line.find(':')?;
    let key = line[..idx].trim();
    let rest = &line[idx + 1..];
    let col = line[..idx + 1].chars().count() + 1;
    Some((key, rest, col))
}

fn cursor_at(rest: &str, line: usize, col: usize) -> Cursor {
    let mut c = Cursor::new(rest, line);
    // keep reported columns relative to the whole line
    c.chars = std::iter::repeat(' ').take(col - 1).chain(rest.chars()).collect();
    c.pos = col - 1;
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SftDoc {
    Forbidden(SftSpec),
    Graph {
        alphabet: Vec<char>,
        states: Vec<String>,
        edges: Vec<(String, String, char)>,
    },
}

impl SftDoc {
    pub fn alphabet(&self) -> &[char] {
        match self {
            SftDoc::Forbidden(s) => s.alphabet(),
            SftDoc::Graph { alphabet, .. } => alphabet,
        }
    }

    pub fn build(&self) -> EdgeShift {
        match self {
            SftDoc::Forbidden(spec) => build_edge_shift(spec),
            SftDoc::Graph {
                alphabet,
                states,
                edges,
            } => {
                let idx: BTreeMap<&String, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
                let edges = edges
                    .iter()
                    .map(|(s, t, c)| Edge {
                        source: idx[s],
                        target: idx[t],
                        label: alphabet.iter().position(|a| a == c).expect("validated") as u8,
                    })
                    .collect();
                EdgeShift::from_edges(alphabet.clone(), states.clone(), edges).expect("validated")
            }
        }
    }
}

pub fn parse_sft(text: &str) -> Result<SftDoc, FormatError> {
    let mut alphabet: Option<(usize, Vec<char>)> = None;
    let mut forbidden: Vec<(usize, usize, String)> = Vec::new();
    let mut states: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, String, String, (usize, String))> = Vec::new();
    for (ln, line) in require_nonempty(text)? {
        let Some((key, rest, col)) = keyed(line) else {
            return parse_err(ln, 1, "'alphabet:', 'forbid:', 'state:' or 'edge:'");
        };
        let mut cur = cursor_at(rest, ln, col);
        match key {
            "alphabet" => {
                if alphabet.is_some() {
                    return semantic(ln, "alphabet declared twice");
                }
                let mut letters = Vec::new();
                while !cur.at_end() {
                    let (c, tok) = cur.token("a letter", &[])?;
                    let mut it = tok.chars();
                    match (it.next(), it.next()) {
                        (Some(l), None) => {
                            if letters.contains(&l) {
                                return semantic(ln, format!("letter {l:?} appears twice in the alphabet"));
                            }
                            letters.push(l)
                        }
                        _ => return parse_err(ln, c, "a single-character letter"),
                    }
                }
                if letters.is_empty() {
                    return cur.err("at least one letter");
                }
                alphabet = Some((ln, letters));
            }
            "forbid" => {
                let (c, w) = cur.token("a word", &[])?;
                cur.finish()?;
                forbidden.push((ln, c, w));
            }
            "state" => {
                while !cur.at_end() {
                    states.push((ln, cur.name()?));
                }
            }
            "edge" => {
                let s = cur.name()?;
                let t = cur.name()?;
                let l = cur.token("a letter", &[])?;
                cur.finish()?;
                edges.push((ln, s, t, l));
            }
            _ => return parse_err(ln, 1, "'alphabet:', 'forbid:', 'state:' or 'edge:'"),
        }
    }
    let Some((_, alphabet)) = alphabet else {
        return parse_err(1, 1, "an 'alphabet:' line");
    };
    if !states.is_empty() || !edges.is_empty() {
        if let Some((ln, ..)) = forbidden.first() {
            return semantic(*ln, "'forbid:' cannot be mixed with 'state:'/'edge:'");
        }
        let mut names: Vec<String> = Vec::new();
        for (ln, s) in states {
            if names.contains(&s) {
                return semantic(ln, format!("state {s:?} declared twice"));
            }
            names.push(s);
        }
        let mut out = Vec::new();
        for (ln, s, t, (c, l)) in edges {
            for n in [&s, &t] {
                if !names.contains(n) {
                    return semantic(ln, format!("unknown state {n:?}"));
                }
            }
            let mut it = l.chars();
            let letter = match (it.next(), it.next()) {
                (Some(a), None) if alphabet.contains(&a) => a,
                _ => return semantic(ln, format!("edge label {l:?} at column {c} is not a letter of the alphabet")),
            };
            out.push((s, t, letter));
        }
        return Ok(SftDoc::Graph {
            alphabet,
            states: names,
            edges: out,
        });
    }
    let mut seen = BTreeSet::new();
    for (ln, c, w) in &forbidden {
        if let Some(bad) = w.chars().find(|ch| !alphabet.contains(ch)) {
            return semantic(*ln, format!("forbidden word {w:?} at column {c} uses {bad:?}, not in the alphabet"));
        }
        if !seen.insert(w.clone()) {
            return semantic(*ln, format!("forbidden word {w:?} is listed twice"));
        }
    }
    let words: Vec<String> = forbidden.into_iter().map(|(_, _, w)| w).collect();
    SftSpec::from_strings(alphabet, &words)
        .map(SftDoc::Forbidden)
        .or_else(|e| semantic(1, e.to_string()))
}

fn join_letters(a: &[char]) -> String {
    a.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn render_sft(doc: &SftDoc) -> String {
    let mut out = format!("alphabet: {}\n", join_letters(doc.alphabet()));
    match doc {
        SftDoc::Forbidden(spec) => {
            for w in spec.forbidden() {
                let s: String = w.iter().map(|&a| spec.alphabet()[a as usize]).collect();
                let _ = writeln!(out, "forbid: {s}");
            }
        }
        SftDoc::Graph { states, edges, .. } => {
            for s in states {
                let _ = writeln!(out, "state: {s}");
            }
            for (s, t, c) in edges {
                let _ = writeln!(out, "edge: {s} {t} {c}");
            }
        }
    }
    out
}

/// Parses a sliding block code whose source alphabet is `source`. The target
/// alphabet is given by an optional `target:` line, otherwise it is the sorted
/// set of letters on the right of the rules.
pub fn parse_code(text: &str, source: &[char]) -> Result<SlidingBlockCode, FormatError> {
    let ls = require_nonempty(text)?;
    let (hl, header) = ls[0];
    let mut cur = Cursor::new(header, hl);
    let (_, kw) = cur.token("'code'", &[])?;
    if kw != "code" {
        return parse_err(hl, 1, "'code window=<w>'");
    }
    let (wc, wtok) = cur.token("'window=<w>'", &[])?;
    let window: usize = match wtok.strip_prefix("window=").map(str::parse) {
        Some(Ok(w)) => w,
        _ => return parse_err(hl, wc, "'window=<w>'"),
    };
    cur.finish()?;
    let mut target: Option<Vec<char>> = None;
    let mut rules: Vec<(usize, String, char)> = Vec::new();
    for &(ln, line) in &ls[1..] {
        let Some((key, rest, col)) = keyed(line) else {
            return parse_err(ln, 1, "'rule:' or 'target:'");
        };
        let mut cur = cursor_at(rest, ln, col);
        match key {
            "target" => {
                let mut letters = Vec::new();
                while !cur.at_end() {
                    let (c, t) = cur.token("a letter", &[])?;
                    if t.chars().count() != 1 {
                        return parse_err(ln, c, "a single-character letter");
                    }
                    letters.extend(t.chars());
                }
                target = Some(letters);
            }
            "rule" => {
                let (_, block) = cur.token("a block", &['-'])?;
                cur.expect_arrow()?;
                let (c, l) = cur.token("a letter", &[])?;
                cur.finish()?;
                let mut it = l.chars();
                let letter = match (it.next(), it.next()) {
                    (Some(a), None) => a,
                    _ => return parse_err(ln, c, "a single-character letter"),
                };
                if rules.iter().any(|(_, b, _)| *b == block) {
                    return semantic(ln, format!("rule for block {block:?} given twice"));
                }
                rules.push((ln, block, letter));
            }
            _ => return parse_err(ln, 1, "'rule:' or 'target:'"),
        }
    }
    let target = target.unwrap_or_else(|| {
        rules
            .iter()
            .map(|(_, _, c)| *c)
            .collect::<BTreeSet<char>>()
            .into_iter()
            .collect()
    });
    for (ln, block, letter) in &rules {
        if let Some(bad) = block.chars().find(|c| !source.contains(c)) {
            return semantic(*ln, format!("block {block:?} uses {bad:?}, not in the source alphabet"));
        }
        if block.chars().count() != 2 * window + 1 {
            return semantic(*ln, format!("block {block:?} should have length {}", 2 * window + 1));
        }
        if !target.contains(letter) {
            return semantic(*ln, format!("letter {letter:?} is not in the target alphabet"));
        }
    }
    let pairs: Vec<(String, char)> = rules.into_iter().map(|(_, b, c)| (b, c)).collect();
    SlidingBlockCode::new(window, source.to_vec(), target, &pairs).or_else(|e| semantic(hl, e.to_string()))
}

pub fn render_code(code: &SlidingBlockCode) -> String {
    let mut out = format!(
        "code window={}\ntarget: {}\n",
        code.window(),
        join_letters(code.target_alphabet())
    );
    for (block, &t) in code.rules() {
        let b: String = block.iter().map(|&a| code.source_alphabet()[a as usize]).collect();
        let _ = writeln!(out, "rule: {b} -> {}", code.target_alphabet()[t as usize]);
    }
    out
}

pub fn parse_space(text: &str) -> Result<SpacePresentation, FormatError> {
    let mut bases = Vec::new();
    let mut families = Vec::new();
    for (ln, line) in require_nonempty(text)? {
        let mut cur = Cursor::new(line, ln);
        let (_, kw) = cur.token("'point' or 'family'", &[])?;
        match kw.as_str() {
            "point" => {
                bases.push(cur.name()?);
                cur.finish()?;
            }
            "family" => {
                let name = cur.name()?;
                cur.expect_arrow()?;
                let parent = cur.point()?;
                cur.finish()?;
                families.push((ln, Family { name, parent }));
            }
            _ => return parse_err(ln, 1, "'point' or 'family'"),
        }
    }
    let line_of = |name: &str| {
        families
            .iter()
            .find(|(_, f)| f.name == name)
            .map_or(1, |(l, _)| *l)
    };
    let fams: Vec<Family> = families.iter().map(|(_, f)| f.clone()).collect();
    SpacePresentation::new(bases, fams).or_else(|e| {
        let ln = match &e {
            crate::space::SpaceError::CyclicParent(n) | crate::space::SpaceError::DuplicateName(n) => line_of(n),
            crate::space::SpaceError::UnknownPoint(p) => families
                .iter()
                .find(|(_, f)| f.parent.to_string() == *p)
                .map_or(1, |(l, _)| *l),
            _ => 1,
        };
        semantic(ln, e.to_string())
    })
}

pub fn render_space(space: &SpacePresentation) -> String {
    let mut out = String::new();
    for b in space.bases() {
        let _ = writeln!(out, "point {b}");
    }
    for f in space.families() {
        let _ = writeln!(out, "family {} -> {}", f.name, f.parent);
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationDoc {
    pub atoms: Vec<Atom>,
    pub block_pairs: Vec<(String, String)>,
}

fn basic_set(cur: &mut Cursor) -> Result<BasicSet, FormatError> {
    if cur.peek() == Some('{') {
        cur.pos += 1;
        let mut pts = BTreeSet::new();
        if cur.peek() == Some('}') {
            cur.pos += 1;
            return Ok(BasicSet::Fin(pts));
        }
        loop {
            pts.insert(cur.point()?);
            match cur.peek() {
                Some(',') => cur.pos += 1,
                Some('}') => {
                    cur.pos += 1;
                    return Ok(BasicSet::Fin(pts));
                }
                _ => return cur.err("',' or '}'"),
            }
        }
    }
    let col = cur.column();
    let kind = cur.name()?;
    cur.expect_char('(')?;
    let f = cur.name()?;
    cur.expect_char(',')?;
    let k = cur.number()?;
    cur.expect_char(')')?;
    match kind.as_str() {
        "tail" => Ok(BasicSet::Tail(f, k)),
        "otail" => Ok(BasicSet::OTail(f, k)),
        _ => parse_err(cur.line, col, "'{', 'tail(' or 'otail('"),
    }
}

pub fn parse_relation(text: &str) -> Result<RelationDoc, FormatError> {
    let mut doc = RelationDoc::default();
    for (ln, line) in lines(text) {
        let mut cur = Cursor::new(line, ln);
        let (_, kw) = cur.token("a relation atom", &[])?;
        match kw.as_str() {
            "aligned" => {
                let f = cur.name()?;
                let g = cur.name()?;
                let k = if cur.at_end() { 0 } else { cur.number()? };
                cur.finish()?;
                doc.atoms.push(Atom::Aligned(f, g, k));
            }
            "pair" => {
                let a = cur.point()?;
                let b = cur.point()?;
                cur.finish()?;
                doc.atoms.push(Atom::pair(a, b));
            }
            "rect" => {
                let a = basic_set(&mut cur)?;
                let b = basic_set(&mut cur)?;
                cur.finish()?;
                doc.atoms.push(Atom::Rect(a, b));
            }
            "blockpair" => {
                let (_, u) = cur.token("a block", &[])?;
                let (_, v) = cur.token("a block", &[])?;
                cur.finish()?;
                doc.block_pairs.push((u, v));
            }
            _ => return parse_err(ln, 1, "'aligned', 'pair', 'rect' or 'blockpair'"),
        }
    }
    Ok(doc)
}

pub fn render_relation(doc: &RelationDoc) -> String {
    let mut out = String::new();
    for a in &doc.atoms {
        match a {
            Atom::Rect(BasicSet::Fin(x), BasicSet::Fin(y)) if x.len() == 1 && y.len() == 1 => {
                let _ = writeln!(
                    out,
                    "pair {} {}",
                    x.iter().next().expect("one point"),
                    y.iter().next().expect("one point")
                );
            }
            a => {
                let _ = writeln!(out, "{a}");
            }
        }
    }
    for (u, v) in &doc.block_pairs {
        let _ = writeln!(out, "blockpair {u} {v}");
    }
    out
}

/// A family relation from parsed atoms. Missing transposes are added and
/// reported in the returned warnings.
pub fn family_relation(
    space: Arc<SpacePresentation>,
    doc: &RelationDoc,
) -> Result<(FamilyRelation, Vec<String>), FormatError> {
    if !doc.block_pairs.is_empty() {
        return semantic(1, "block pairs cannot be used with a space");
    }
    let r = FamilyRelation::from_atoms(space, &doc.atoms).or_else(|e| semantic(1, e.to_string()))?;
    let mut warnings = Vec::new();
    if !r.is_symmetric() {
        warnings.push("relation was not symmetric; transposes added".to_string());
        return Ok((r.symmetrized(), warnings));
    }
    Ok((r, warnings))
}

/// A block relation from parsed block pairs; the depth is read off the block length.
pub fn block_relation(
    shift: Arc<EdgeShift>,
    doc: &RelationDoc,
) -> Result<(BlockRelation, Vec<String>), FormatError> {
    if !doc.atoms.is_empty() {
        return semantic(1, "atoms need a space, not a shift");
    }
    let Some((u0, _)) = doc.block_pairs.first() else {
        return semantic(1, "no block pairs given");
    };
    let len = u0.chars().count();
    if len % 2 == 0 {
        return semantic(1, "blocks must have odd length 2k+1");
    }
    let mut pairs = BTreeSet::new();
    for (u, v) in &doc.block_pairs {
        let a = shift.word(u).or_else(|e| semantic(1, e.to_string()))?;
        let b = shift.word(v).or_else(|e| semantic(1, e.to_string()))?;
        pairs.insert((a, b));
    }
    let r = BlockRelation::new(shift, len / 2, pairs, ExactnessFlag::Exact).or_else(|e| semantic(1, e.to_string()))?;
    if !r.is_symmetric() {
        return Ok((r.symmetrized(), vec!["relation was not symmetric; transposes added".to_string()]));
    }
    Ok((r, Vec::new()))
}

pub fn parse_automaton(text: &str) -> Result<PathAutomaton, FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut initial: Option<usize> = None;
    let mut edges: Vec<(usize, String, String, (usize, String))> = Vec::new();
    for (ln, line) in require_nonempty(text)? {
        let mut cur = Cursor::new(line, ln);
        let (_, kw) = cur.token("'state' or 'edge'", &[])?;
        match kw.as_str() {
            "state" => {
                let n = cur.name()?;
                if names.contains(&n) {
                    return semantic(ln, format!("state {n:?} declared twice"));
                }
                if !cur.at_end() {
                    let (c, flag) = cur.token("'initial'", &[])?;
                    if flag != "initial" {
                        return parse_err(ln, c, "'initial'");
                    }
                    if initial.is_some() {
                        return semantic(ln, "two initial states");
                    }
                    initial = Some(names.len());
                }
                cur.finish()?;
                names.push(n);
            }
            "edge" => {
                let s = cur.name()?;
                let t = cur.name()?;
                let l = cur.token("a letter", &[])?;
                cur.finish()?;
                edges.push((ln, s, t, l));
            }
            _ => return parse_err(ln, 1, "'state' or 'edge'"),
        }
    }
    let Some(initial) = initial else {
        return semantic(1, "no initial state");
    };
    let mut es = Vec::new();
    for (ln, s, t, (c, l)) in edges {
        let idx = |n: &str| names.iter().position(|m| m == n);
        let (Some(a), Some(b)) = (idx(&s), idx(&t)) else {
            return semantic(ln, format!("edge {s} -> {t} names an undeclared state"));
        };
        let mut it = l.chars();
        let letter = match (it.next(), it.next()) {
            (Some(x), None) => x,
            _ => return parse_err(ln, c, "a single-character letter"),
        };
        es.push((a, b, letter));
    }
    PathAutomaton::new(names, initial, &es).or_else(|e| semantic(1, e.to_string()))
}

pub fn render_automaton(a: &PathAutomaton) -> String {
    let mut out = String::new();
    for (i, n) in a.names().iter().enumerate() {
        if Some(i) == a.initial() {
            let _ = writeln!(out, "state {n} initial");
        } else {
            let _ = writeln!(out, "state {n}");
        }
    }
    for (s, t, c) in a.edges() {
        let _ = writeln!(out, "edge {} {} {c}", a.names()[s], a.names()[t]);
    }
    out
}
