//! Entropy (IE), regionally proximal (RP) and asymptotic (ASY) pairs at block
//! depth, the checkable part of the assignment axioms, and the finite-system
//! versions of the three assignments.
//!
//! RP and ASY are decided exactly at each depth by reachability in the product
//! of the presentation with itself. IE pairs are three-valued: a pair is
//! certified by an arithmetic progression that is an independence set, refuted
//! when no large enough subset of some interval is independent, and otherwise
//! left unknown.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use thiserror::Error;

use crate::gamma::{self, GammaError, RankResult, Verdict};
use crate::relation::{BlockRelation, ExactnessFlag, FiniteRelation, Relation, RelationError};
use crate::symbolic::{apply_code, EdgeShift, FiniteSystem, ShiftError, SlidingBlockCode, Word};

/// Cap on subset states explored by one IE certificate check.
const CERTIFICATE_SUBSET_CAP: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("invalid IE parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssignmentKind {
    Ie,
    Rp,
    Asy,
}

impl AssignmentKind {
    pub const ALL: [AssignmentKind; 3] = [AssignmentKind::Ie, AssignmentKind::Rp, AssignmentKind::Asy];

    pub fn name(self) -> &'static str {
        match self {
            AssignmentKind::Ie => "ie",
            AssignmentKind::Rp => "rp",
            AssignmentKind::Asy => "asy",
        }
    }
}

impl fmt::Display for AssignmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AssignmentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ie" => Ok(AssignmentKind::Ie),
            "rp" => Ok(AssignmentKind::Rp),
            "asy" => Ok(AssignmentKind::Asy),
            _ => Err(format!("unknown assignment {s:?}, expected ie, rp or asy")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IeParams {
    pub density: Ratio<u64>,
    pub interval_length: usize,
    pub horizon: usize,
    pub max_choice_sets: usize,
}

impl Default for IeParams {
    fn default() -> Self {
        IeParams {
            density: Ratio::new(1, 4),
            interval_length: 8,
            horizon: 12,
            max_choice_sets: 4096,
        }
    }
}

impl IeParams {
    pub fn validate(&self) -> Result<(), AssignError> {
        let bad = |m: &str| Err(AssignError::BadParams(m.to_string()));
        if *self.density.numer() == 0 || self.density > Ratio::from_integer(1) {
            return bad("density must lie in (0, 1]");
        }
        if self.interval_length == 0 || self.interval_length > self.horizon {
            return bad("interval length must satisfy 1 <= l <= horizon");
        }
        if self.max_choice_sets == 0 {
            return bad("max choice sets must be positive");
        }
        Ok(())
    }

    /// Smallest independence-set size the density asks for inside `[0, l)`.
    pub fn required_size(&self, l: usize) -> usize {
        let num = *self.density.numer() as usize * l;
        let den = *self.density.denom() as usize;
        num.div_ceil(den).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    CertifiedIe { gap: usize },
    RefutedAtHorizon(usize),
    UnknownAtBudget,
}

impl PairStatus {
    pub fn name(&self) -> &'static str {
        match self {
            PairStatus::CertifiedIe { .. } => "CertifiedIE",
            PairStatus::RefutedAtHorizon(_) => "RefutedAtHorizon",
            PairStatus::UnknownAtBudget => "UnknownAtBudget",
        }
    }

    pub fn witness(&self) -> String {
        match self {
            PairStatus::CertifiedIe { gap } => format!("gap={gap}"),
            PairStatus::RefutedAtHorizon(l) => format!("interval={l}"),
            PairStatus::UnknownAtBudget => "-".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssignmentResult {
    pub kind: AssignmentKind,
    pub relation: BlockRelation,
    /// IE only.
    pub per_pair: BTreeMap<(Word, Word), PairStatus>,
    pub flag: ExactnessFlag,
}

impl AssignmentResult {
    pub fn depth(&self) -> usize {
        self.relation.depth()
    }

    pub fn shift(&self) -> &Arc<EdgeShift> {
        self.relation.shift()
    }
}

fn step_letter(shift: &EdgeShift, set: &[bool], letter: Option<u8>) -> Vec<bool> {
    let mut next = vec![false; set.len()];
    for (s, _) in set.iter().enumerate().filter(|(_, &b)| b) {
        for e in shift.out_edges(s) {
            if letter.map_or(true, |a| a == e.label) {
                next[e.target] = true;
            }
        }
    }
    next
}

fn read_word(shift: &EdgeShift, set: &[bool], w: &[u8]) -> Vec<bool> {
    w.iter().fold(set.to_vec(), |s, &a| step_letter(shift, &s, Some(a)))
}

fn free_steps(shift: &EdgeShift, set: &[bool], n: usize) -> Vec<bool> {
    (0..n).fold(set.to_vec(), |s, _| step_letter(shift, &s, None))
}

/// Exact check that the progression `0, g, 2g, ...` is an independence set for
/// the cylinders of `u` and `v` (blocks placed at the progression positions).
///
/// Tracks, for every finite choice sequence, the set of vertices where a path
/// realizing it can end; the progression is independent iff no reachable set
/// is empty. `None` when the subset exploration exceeds its cap.
pub fn progression_is_independent(shift: &EdgeShift, u: &[u8], v: &[u8], gap: usize) -> Option<bool> {
    let len = u.len();
    if gap < len || v.len() != len || shift.is_empty() {
        return Some(false);
    }
    let all = vec![true; shift.num_states()];
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut queue = VecDeque::new();
    for w in [u, v] {
        let s = read_word(shift, &all, w);
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if !s.iter().any(|&b| b) {
            return Some(false);
        }
        let spaced = free_steps(shift, &s, gap - len);
        for w in [u, v] {
            let t = read_word(shift, &spaced, w);
            if seen.insert(t.clone()) {
                if seen.len() > CERTIFICATE_SUBSET_CAP {
                    return None;
                }
                queue.push_back(t);
            }
        }
    }
    Some(true)
}

/// Pattern placing `choice[j]` at position `j * gap`, wildcards elsewhere.
pub fn placement_pattern(u: &[u8], v: &[u8], gap: usize, choice: &[bool]) -> Vec<Option<u8>> {
    let len = u.len();
    let total = if choice.is_empty() { 0 } else { (choice.len() - 1) * gap + len };
    let mut pat = vec![None; total];
    for (j, &pick_v) in choice.iter().enumerate() {
        let w = if pick_v { v } else { u };
        for (i, &a) in w.iter().enumerate() {
            pat[j * gap + i] = Some(a);
        }
    }
    pat
}

/// Whether all `2^m` placements over `m` progression positions are realizable.
pub fn placements_realizable(shift: &EdgeShift, u: &[u8], v: &[u8], gap: usize, m: usize) -> bool {
    (0..1u32 << m).all(|bits| {
        let choice: Vec<bool> = (0..m).map(|j| bits >> j & 1 == 1).collect();
        shift.realizes(&placement_pattern(u, v, gap, &choice))
    })
}

/// Searches for a certifying gap, starting at `mixing_gap + 2k` (or the block
/// length when the presentation has no mixing gap).
pub fn certify_pair(
    shift: &EdgeShift,
    mixing_gap: Option<usize>,
    u: &[u8],
    v: &[u8],
    horizon: usize,
) -> Option<usize> {
    let len = u.len();
    let start = match mixing_gap {
        Some(m) => (m + len - 1).max(len),
        None => len,
    };
    let end = (start + len).max(horizon);
    (start..=end).find(|&g| {
        progression_is_independent(shift, u, v, g) == Some(true) && placements_realizable(shift, u, v, g, 3)
    })
}

fn choice_sets(l: usize, s: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    // binomial(l, s) without overflow for desk-scale values
    let mut count: u128 = 1;
    for i in 0..s {
        count = count * (l - i) as u128 / (i + 1) as u128;
        if count > cap as u128 {
            return None;
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn rec(start: usize, l: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..l {
            if l - i < s - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, l, s, cur, out);
            cur.pop();
        }
    }
    rec(0, l, s, &mut cur, &mut out);
    Some(out)
}

/// Whether the block positions `set` form an independence set for `u`, `v`.
pub fn is_independence_set(shift: &EdgeShift, u: &[u8], v: &[u8], set: &[usize]) -> bool {
    let len = u.len();
    let span = set.iter().max().map_or(0, |&m| m + len);
    (0..1u64 << set.len()).all(|bits| {
        let mut pat: Vec<Option<u8>> = vec![None; span];
        for (j, &pos) in set.iter().enumerate() {
            let w = if bits >> j & 1 == 1 { v } else { u };
            for (i, &a) in w.iter().enumerate() {
                match pat[pos + i] {
                    Some(b) if b != a => return false,
                    _ => pat[pos + i] = Some(a),
                }
            }
        }
        shift.realizes(&pat)
    })
}

/// Interval length at which no subset of the required size is independent.
pub fn refute_pair(shift: &EdgeShift, u: &[u8], v: &[u8], params: &IeParams) -> Option<usize> {
    (params.interval_length..=params.horizon).find(|&l| {
        let s = params.required_size(l);
        match choice_sets(l, s, params.max_choice_sets) {
            Some(sets) => sets.iter().all(|f| !is_independence_set(shift, u, v, f)),
            None => false,
        }
    })
}

pub fn ie_status(shift: &EdgeShift, u: &[u8], v: &[u8], params: &IeParams) -> PairStatus {
    status_with_gap(shift, shift.mixing_gap(), u, v, params)
}

fn status_with_gap(shift: &EdgeShift, mixing_gap: Option<usize>, u: &[u8], v: &[u8], params: &IeParams) -> PairStatus {
    if let Some(gap) = certify_pair(shift, mixing_gap, u, v, params.horizon) {
        PairStatus::CertifiedIe { gap }
    } else if let Some(l) = refute_pair(shift, u, v, params) {
        PairStatus::RefutedAtHorizon(l)
    } else {
        PairStatus::UnknownAtBudget
    }
}

pub fn ie_pairs(shift: &Arc<EdgeShift>, depth: usize, params: &IeParams) -> Result<AssignmentResult, AssignError> {
    params.validate()?;
    let blocks = shift.blocks(depth);
    let mixing_gap = shift.mixing_gap();
    let mut per_pair = BTreeMap::new();
    let mut pairs = BTreeSet::new();
    let mut flag = ExactnessFlag::Exact;
    for u in &blocks {
        for v in &blocks {
            // swapping the two blocks does not change independence
            let status = match per_pair.get(&(v.clone(), u.clone())) {
                Some(&s) => s,
                None => status_with_gap(shift, mixing_gap, u, v, params),
            };
            match status {
                PairStatus::RefutedAtHorizon(_) => {}
                PairStatus::UnknownAtBudget => {
                    flag = ExactnessFlag::HeuristicStable(params.max_choice_sets);
                    pairs.insert((u.clone(), v.clone()));
                }
                PairStatus::CertifiedIe { .. } => {
                    pairs.insert((u.clone(), v.clone()));
                }
            }
            per_pair.insert((u.clone(), v.clone()), status);
        }
    }
    let relation = BlockRelation::new(shift.clone(), depth, pairs, flag)?;
    Ok(AssignmentResult {
        kind: AssignmentKind::Ie,
        relation,
        per_pair,
        flag,
    })
}

fn end_states(shift: &EdgeShift, w: &[u8]) -> Vec<usize> {
    let all = vec![true; shift.num_states()];
    read_word(shift, &all, w)
        .into_iter()
        .enumerate()
        .filter_map(|(s, b)| b.then_some(s))
        .collect()
}

/// Whether two points reading `u`, `v` on the central window can be steered
/// so that, at some shift `n >= 0`, they read the same central block.
fn rp_member(shift: &EdgeShift, u: &[u8], v: &[u8]) -> bool {
    let len = u.len();
    let trailing = u.iter().rev().zip(v.iter().rev()).take_while(|(a, b)| a == b).count();
    if trailing >= len {
        return true;
    }
    let n = shift.num_states();
    let idx = |p: usize, q: usize, c: usize| (p * n + q) * (len + 1) + c;
    let mut seen = vec![false; n * n * (len + 1)];
    let mut queue = VecDeque::new();
    for &p in &end_states(shift, u) {
        for &q in &end_states(shift, v) {
            seen[idx(p, q, trailing)] = true;
            queue.push_back((p, q, trailing));
        }
    }
    while let Some((p, q, c)) = queue.pop_front() {
        for e in shift.out_edges(p) {
            for f in shift.out_edges(q) {
                let c2 = if e.label == f.label { (c + 1).min(len) } else { 0 };
                if c2 >= len {
                    return true;
                }
                let id = idx(e.target, f.target, c2);
                if !seen[id] {
                    seen[id] = true;
                    queue.push_back((e.target, f.target, c2));
                }
            }
        }
    }
    false
}

pub fn rp_pairs(shift: &Arc<EdgeShift>, depth: usize) -> Result<AssignmentResult, AssignError> {
    let blocks = shift.blocks(depth);
    let pairs = blocks
        .iter()
        .flat_map(|u| blocks.iter().map(move |v| (u, v)))
        .filter(|(u, v)| rp_member(shift, u, v))
        .map(|(u, v)| (u.clone(), v.clone()))
        .collect();
    Ok(AssignmentResult {
        kind: AssignmentKind::Rp,
        relation: BlockRelation::new(shift.clone(), depth, pairs, ExactnessFlag::Exact)?,
        per_pair: BTreeMap::new(),
        flag: ExactnessFlag::Exact,
    })
}

/// Product states from which two paths can read equal letters forever.
fn synchronizing_core(shift: &EdgeShift) -> Vec<bool> {
    let n = shift.num_states();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n * n];
    for p in 0..n {
        for q in 0..n {
            for e in shift.out_edges(p) {
                for f in shift.out_edges(q).filter(|f| f.label == e.label) {
                    succ[p * n + q].push(e.target * n + f.target);
                }
            }
        }
    }
    let mut alive = vec![true; n * n];
    loop {
        let mut changed = false;
        for s in 0..n * n {
            if alive[s] && !succ[s].iter().any(|&t| alive[t]) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// Whether paths started in lockstep from the two start sets can reach a core pair.
fn reaches_core(shift: &EdgeShift, core: &[bool], starts_u: &[usize], starts_v: &[usize]) -> bool {
    let n = shift.num_states();
    let mut seen = vec![false; n * n];
    let mut stack = Vec::new();
    for &p in starts_u {
        for &q in starts_v {
            if !seen[p * n + q] {
                seen[p * n + q] = true;
                stack.push((p, q));
            }
        }
    }
    while let Some((p, q)) = stack.pop() {
        if core[p * n + q] {
            return true;
        }
        for e in shift.out_edges(p) {
            for f in shift.out_edges(q) {
                let id = e.target * n + f.target;
                if !seen[id] {
                    seen[id] = true;
                    stack.push((e.target, f.target));
                }
            }
        }
    }
    false
}

pub fn asy_pairs(shift: &Arc<EdgeShift>, depth: usize) -> Result<AssignmentResult, AssignError> {
    let core = synchronizing_core(shift);
    let blocks = shift.blocks(depth);
    let ends: BTreeMap<&Word, Vec<usize>> = blocks.iter().map(|b| (b, end_states(shift, b))).collect();
    let mut pairs = BTreeSet::new();
    for u in &blocks {
        for v in &blocks {
            if reaches_core(shift, &core, &ends[u], &ends[v]) {
                pairs.insert((u.clone(), v.clone()));
            }
        }
    }
    Ok(AssignmentResult {
        kind: AssignmentKind::Asy,
        relation: BlockRelation::new(shift.clone(), depth, pairs, ExactnessFlag::Exact)?,
        per_pair: BTreeMap::new(),
        flag: ExactnessFlag::Exact,
    })
}

pub fn assignment(
    shift: &Arc<EdgeShift>,
    kind: AssignmentKind,
    depth: usize,
    params: &IeParams,
) -> Result<AssignmentResult, AssignError> {
    match kind {
        AssignmentKind::Ie => ie_pairs(shift, depth, params),
        AssignmentKind::Rp => rp_pairs(shift, depth),
        AssignmentKind::Asy => asy_pairs(shift, depth),
    }
}

/// Closure rank of the assignment's pair set.
pub fn p_rank(
    shift: &Arc<EdgeShift>,
    kind: AssignmentKind,
    depth: usize,
    params: &IeParams,
    cap: usize,
) -> Result<RankResult, AssignError> {
    let res = assignment(shift, kind, depth, params)?;
    Ok(gamma::gamma_rank(&Relation::Block(res.relation), cap)?)
}

pub fn classify_assignment_full(
    shift: &Arc<EdgeShift>,
    kind: AssignmentKind,
    depth: usize,
    params: &IeParams,
) -> Result<Verdict, AssignError> {
    let res = assignment(shift, kind, depth, params)?;
    Ok(gamma::classify_full(&Relation::Block(res.relation)))
}

pub fn classify_assignment_realizable(
    shift: &Arc<EdgeShift>,
    kind: AssignmentKind,
    depth: usize,
    max_depth: usize,
    params: &IeParams,
    cap: usize,
) -> Result<Verdict, AssignError> {
    gamma::classify_realizable_over_depths(
        depth..=max_depth.max(depth),
        |k| Ok::<_, AssignError>(Relation::Block(assignment(shift, kind, k, params)?.relation)),
        cap,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<(String, String)>,
}

fn report(checked: usize, failures: Vec<(String, String)>) -> AxiomReport {
    AxiomReport {
        passed: failures.is_empty(),
        checked,
        failures,
    }
}

/// Every related pair must be followed, one step later, by a related pair
/// overlapping it.
pub fn check_axiom_invariance(relation: &BlockRelation) -> AxiomReport {
    let shift = relation.shift();
    let pairs = relation.pairs();
    let failures = pairs
        .iter()
        .filter(|(u, v)| {
            !pairs
                .iter()
                .any(|(a, b)| a[..a.len() - 1] == u[1..] && b[..b.len() - 1] == v[1..])
        })
        .map(|(u, v)| (shift.render(u), shift.render(v)))
        .collect();
    report(pairs.len(), failures)
}

/// Pushes the depth-`(k+w)` assignment of the source through the code and
/// checks it lands inside the depth-`k` assignment of the image. For IE only
/// certified source pairs are pushed forward.
pub fn check_axiom_factor(
    kind: AssignmentKind,
    code: &SlidingBlockCode,
    shift: &Arc<EdgeShift>,
    depth: usize,
    params: &IeParams,
) -> Result<AxiomReport, AssignError> {
    let image = Arc::new(apply_code(code, shift)?);
    let source = assignment(shift, kind, depth + code.window(), params)?;
    let target = assignment(&image, kind, depth, params)?;
    let mut failures = Vec::new();
    let mut checked = 0;
    for (u, v) in source.relation.pairs() {
        if kind == AssignmentKind::Ie
            && !matches!(source.per_pair.get(&(u.clone(), v.clone())), Some(PairStatus::CertifiedIe { .. }))
        {
            continue;
        }
        checked += 1;
        let (Some(a), Some(b)) = (code.apply_word(u), code.apply_word(v)) else {
            failures.push((shift.render(u), shift.render(v)));
            continue;
        };
        if !target.relation.member(&a, &b) {
            failures.push((shift.render(u), shift.render(v)));
        }
    }
    Ok(report(checked, failures))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkOutcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub entropy: f64,
    pub positive_entropy: bool,
    pub certified_off_diagonal: bool,
    pub outcome: LinkOutcome,
}

/// Positive entropy should coincide with the existence of an off-diagonal IE pair.
pub fn entropy_link_check(shift: &Arc<EdgeShift>, depth: usize, params: &IeParams) -> Result<LinkReport, AssignError> {
    let entropy = if shift.is_empty() { 0.0 } else { shift.entropy()? };
    let res = ie_pairs(shift, depth, params)?;
    let off: Vec<&PairStatus> = res
        .per_pair
        .iter()
        .filter(|((u, v), _)| u != v)
        .map(|(_, s)| s)
        .collect();
    let certified = off.iter().any(|s| matches!(s, PairStatus::CertifiedIe { .. }));
    let unknown = off.iter().any(|s| matches!(s, PairStatus::UnknownAtBudget));
    let positive = entropy > 1e-9;
    let outcome = if unknown && !certified {
        LinkOutcome::Inconclusive
    } else if certified == positive {
        LinkOutcome::Pass
    } else {
        LinkOutcome::Fail
    };
    Ok(LinkReport {
        entropy,
        positive_entropy: positive,
        certified_off_diagonal: certified,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquicontinuityReport {
    pub equicontinuous: bool,
    /// First depth and block pair where RP leaves the diagonal.
    pub witness: Option<(usize, String, String)>,
}

pub fn equicontinuity_check(shift: &Arc<EdgeShift>, max_depth: usize) -> Result<EquicontinuityReport, AssignError> {
    for k in 0..=max_depth {
        let rp = rp_pairs(shift, k)?;
        if let Some((u, v)) = rp.relation.pairs().iter().find(|(u, v)| u != v) {
            return Ok(EquicontinuityReport {
                equicontinuous: false,
                witness: Some((k, shift.render(u), shift.render(v))),
            });
        }
    }
    Ok(EquicontinuityReport {
        equicontinuous: true,
        witness: None,
    })
}

/// The three assignments on a finite discrete system: RP and ASY relate points
/// whose orbits merge, IE is the diagonal over periodic points.
pub fn finite_assignment(system: &Arc<FiniteSystem>, kind: AssignmentKind) -> FiniteRelation {
    let n = system.len();
    let pairs = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| match kind {
            AssignmentKind::Ie => a == b && system.is_periodic(a),
            AssignmentKind::Rp | AssignmentKind::Asy => system.orbits_merge(a, b),
        })
        .collect();
    FiniteRelation::new(system.clone(), pairs).expect("pairs lie in the system")
}
