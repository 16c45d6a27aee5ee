//! Slow, independent reference computations used by the integration tests
//! and the acceptance suite. Nothing here calls into the graph presentations
//! or the relation engines; shifts are handled as forbidden-word lists and
//! spaces as explicit point tables.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use dynpair::{Atom, BasicSet, SpacePresentation, SymbolicPoint};

/// Corpus of shifts of finite type: name, alphabet, forbidden words.
pub const CORPUS: &[(&str, &str, &[&str])] = &[
    ("full2", "01", &[]),
    ("full3", "012", &[]),
    ("golden", "01", &["11"]),
    ("no111", "01", &["111"]),
    ("no101", "01", &["101"]),
    ("sparse", "01", &["11", "101"]),
    ("period2", "01", &["00", "11"]),
    ("period3", "abc", &["aa", "ac", "ba", "bb", "cb", "cc"]),
    ("twofix", "01", &["01", "10"]),
    ("fixed", "01", &["1"]),
    ("staircase", "01", &["10"]),
];

pub fn corpus_entry(name: &str) -> (&'static str, &'static str, &'static [&'static str]) {
    *CORPUS.iter().find(|(n, _, _)| *n == name).expect("corpus name")
}

/// Extension margin: in presentations with at most this many states, a word
/// extending this far on both sides extends to a bi-infinite point.
pub const MARGIN: usize = 8;

#[derive(Debug, Clone)]
pub struct Sft {
    pub alphabet: Vec<char>,
    pub forbidden: Vec<String>,
    /// Longest forbidden word minus one.
    pub memory: usize,
}

impl Sft {
    pub fn new(alphabet: &str, forbidden: &[&str]) -> Self {
        Sft {
            alphabet: alphabet.chars().collect(),
            forbidden: forbidden.iter().map(|s| s.to_string()).collect(),
            memory: forbidden.iter().map(|w| w.len()).max().unwrap_or(1).saturating_sub(1),
        }
    }

    pub fn from_corpus(name: &str) -> Self {
        let (_, a, f) = corpus_entry(name);
        Sft::new(a, f)
    }

    /// No forbidden word occurs in `w`.
    pub fn locally_allowed(&self, w: &str) -> bool {
        !self.forbidden.iter().any(|f| w.contains(f.as_str()))
    }

    /// No forbidden word ends at the last letter of `w`.
    fn suffix_ok(&self, w: &str) -> bool {
        !self.forbidden.iter().any(|f| w.ends_with(f.as_str()))
    }

    fn prefix_ok(&self, w: &str) -> bool {
        !self.forbidden.iter().any(|f| w.starts_with(f.as_str()))
    }

    fn extends_right(&self, w: &str, steps: usize, memo: &mut HashMap<(String, usize), bool>) -> bool {
        if steps == 0 {
            return true;
        }
        let keep = w.chars().count().saturating_sub(self.memory);
        let tail: String = w.chars().skip(keep).collect();
        if let Some(&b) = memo.get(&(tail.clone(), steps)) {
            return b;
        }
        let ok = self.alphabet.iter().any(|&c| {
            let mut t = tail.clone();
            t.push(c);
            self.suffix_ok(&t) && self.extends_right(&t, steps - 1, memo)
        });
        memo.insert((tail, steps), ok);
        ok
    }

    fn extends_left(&self, w: &str, steps: usize) -> bool {
        if steps == 0 {
            return true;
        }
        let head: String = w.chars().take(self.memory).collect();
        self.alphabet.iter().any(|&c| {
            let t = format!("{c}{head}");
            self.prefix_ok(&t) && self.extends_left(&t, steps - 1)
        })
    }

    /// Whether `w` occurs in some bi-infinite point.
    pub fn extendable(&self, w: &str) -> bool {
        if !self.locally_allowed(w) {
            return false;
        }
        // extend right first, then check that some right extension extends left
        let mut rights = vec![w.to_string()];
        for _ in 0..MARGIN {
            let mut next = Vec::new();
            for r in &rights {
                for &c in &self.alphabet {
                    let mut t = r.clone();
                    t.push(c);
                    if self.suffix_ok(&t) {
                        next.push(t);
                    }
                }
            }
            // keep one representative per memory suffix
            let mut seen = BTreeSet::new();
            next.retain(|t| {
                let m = self.memory.max(1);
                let key: String = t.chars().rev().take(m).collect();
                let pre: String = t.chars().take(w.chars().count() + self.memory).collect();
                seen.insert((pre, key))
            });
            rights = next;
        }
        rights.iter().any(|r| self.extends_left(r, MARGIN))
    }

    /// All words of length `n` over the alphabet, by brute force.
    pub fn all_strings(&self, n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|w| self.alphabet.iter().map(move |&c| format!("{w}{c}")))
                .collect();
        }
        out
    }

    pub fn words(&self, n: usize) -> BTreeSet<String> {
        self.all_strings(n).into_iter().filter(|w| self.extendable(w)).collect()
    }

    pub fn blocks(&self, k: usize) -> Vec<String> {
        self.words(2 * k + 1).into_iter().collect()
    }

    /// Whether some point reads the pattern (`None` is a wildcard) at positions `0..`.
    pub fn pattern_realizable(&self, pattern: &[Option<char>]) -> bool {
        // left context of length `memory`, then the pattern, then a margin
        let lefts: Vec<String> = self
            .all_strings(self.memory)
            .into_iter()
            .filter(|c| self.locally_allowed(c) && self.extends_left(c, MARGIN))
            .collect();
        let mut states: BTreeSet<String> = lefts.into_iter().collect();
        for p in pattern {
            let mut next = BTreeSet::new();
            for s in &states {
                for &c in &self.alphabet {
                    if p.map_or(true, |q| q == c) {
                        let t = format!("{s}{c}");
                        if self.suffix_ok(&t) {
                            let keep = t.chars().count().saturating_sub(self.memory);
                            next.insert(t.chars().skip(keep).collect::<String>());
                        }
                    }
                }
            }
            states = next;
            if states.is_empty() {
                return false;
            }
        }
        let mut memo = HashMap::new();
        states.iter().any(|s| self.extends_right(s, MARGIN, &mut memo))
    }

    /// Contexts of length `memory` that may precede block `u` in a point.
    fn left_contexts(&self, u: &str) -> Vec<String> {
        self.all_strings(self.memory)
            .into_iter()
            .filter(|c| {
                let w = format!("{c}{u}");
                self.locally_allowed(&w) && self.extends_left(&w, MARGIN)
            })
            .collect()
    }

    /// For each number `t <= horizon` of letters appended after `u`, the set of
    /// right-extendable suffixes of length `keep` reachable at that time.
    fn forward_suffixes(&self, u: &str, keep: usize, horizon: usize) -> Vec<BTreeSet<String>> {
        let state_len = keep.max(self.memory);
        let cut = |s: &str| -> String {
            let n = s.chars().count();
            s.chars().skip(n.saturating_sub(state_len)).collect()
        };
        let mut states: BTreeSet<String> = self.left_contexts(u).iter().map(|c| cut(&format!("{c}{u}"))).collect();
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for t in 0..=horizon {
            let visible: BTreeSet<String> = states
                .iter()
                .filter(|s| self.extends_right(s, MARGIN, &mut memo))
                .map(|s| {
                    let n = s.chars().count();
                    s.chars().skip(n.saturating_sub(keep)).collect()
                })
                .collect();
            out.push(visible);
            if t == horizon {
                break;
            }
            let mut next = BTreeSet::new();
            for s in &states {
                for &c in &self.alphabet {
                    let w = format!("{s}{c}");
                    if self.suffix_ok(&w) {
                        next.insert(cut(&w));
                    }
                }
            }
            states = next;
        }
        out
    }

    /// Block pairs `(u, v)` such that points reading them can be found that,
    /// at some shift `0 <= n <= horizon`, read the same central block.
    pub fn rp_pairs(&self, k: usize, horizon: usize) -> BTreeSet<(String, String)> {
        let len = 2 * k + 1;
        let blocks = self.blocks(k);
        let windows: BTreeMap<&String, Vec<BTreeSet<String>>> = blocks
            .iter()
            .map(|u| (u, self.forward_suffixes(u, len, horizon)))
            .collect();
        let mut out = BTreeSet::new();
        for u in &blocks {
            for v in &blocks {
                let (wu, wv) = (&windows[u], &windows[v]);
                if (0..=horizon).any(|n| !wu[n].is_disjoint(&wv[n])) {
                    out.insert((u.clone(), v.clone()));
                }
            }
        }
        out
    }

    /// Block pairs `(u, v)` read by points that agree from some position on:
    /// both reach the same memory-length suffix at the same time, after which
    /// they can continue identically.
    pub fn asy_pairs(&self, k: usize, horizon: usize) -> BTreeSet<(String, String)> {
        let keep = self.memory.max(1);
        let blocks = self.blocks(k);
        let tails: BTreeMap<&String, Vec<BTreeSet<String>>> = blocks
            .iter()
            .map(|u| (u, self.forward_suffixes(u, keep, horizon)))
            .collect();
        let mut out = BTreeSet::new();
        for u in &blocks {
            for v in &blocks {
                let (a, b) = (&tails[u], &tails[v]);
                if (0..=horizon).any(|t| !a[t].is_disjoint(&b[t])) {
                    out.insert((u.clone(), v.clone()));
                }
            }
        }
        out
    }
}

/// Largest root of `x^2 - x - 1` by bisection.
pub fn golden_ratio() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if mid * mid - mid - 1.0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Explicit-point reference evaluator for relations on a presented space:
/// points are the base points and members of index at most `max_index`,
/// limits come from an explicit table, and closure is detected through
/// witnesses in a window of large indices.
#[derive(Debug, Clone)]
pub struct SlowSpace {
    pub points: Vec<SymbolicPoint>,
    index: HashMap<SymbolicPoint, usize>,
    /// family -> limit point
    pub limits: BTreeMap<String, SymbolicPoint>,
    pub max_index: u64,
    pub window_start: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlowRelation {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl SlowRelation {
    fn empty(n: usize) -> Self {
        SlowRelation {
            n,
            rows: vec![vec![0; n.div_ceil(64)]; n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows[i][j / 64] |= 1 << (j % 64);
    }

    pub fn count(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }
}

impl SlowSpace {
    pub fn new(space: &SpacePresentation, max_index: u64, window_start: u64) -> Self {
        let mut points: Vec<SymbolicPoint> = space.bases().iter().map(|b| SymbolicPoint::base(b)).collect();
        let mut limits = BTreeMap::new();
        for f in space.families() {
            limits.insert(f.name.clone(), f.parent.clone());
            for k in 0..=max_index {
                points.push(SymbolicPoint::member(&f.name, k));
            }
        }
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        SlowSpace {
            points,
            index,
            limits,
            max_index,
            window_start,
        }
    }

    pub fn idx(&self, p: &SymbolicPoint) -> usize {
        self.index[p]
    }

    fn in_basic(&self, set: &BasicSet, p: &SymbolicPoint) -> bool {
        match (set, p) {
            (BasicSet::Fin(s), p) => s.contains(p),
            (BasicSet::OTail(f, k0), SymbolicPoint::Member(g, k)) => f == g && k >= k0,
            (BasicSet::Tail(f, k0), SymbolicPoint::Member(g, k)) if f == g && k >= k0 => true,
            (BasicSet::Tail(f, _), p) => &self.limits[f] == p,
            _ => false,
        }
    }

    fn in_atom(&self, atom: &Atom, a: &SymbolicPoint, b: &SymbolicPoint) -> bool {
        match atom {
            Atom::Aligned(f, g, k0) => matches!(
                (a, b),
                (SymbolicPoint::Member(fa, i), SymbolicPoint::Member(gb, j)) if fa == f && gb == g && i == j && i >= k0
            ),
            Atom::Rect(x, y) => self.in_basic(x, a) && self.in_basic(y, b),
        }
    }

    pub fn from_atoms(&self, atoms: &[Atom]) -> SlowRelation {
        let n = self.points.len();
        let mut r = SlowRelation::empty(n);
        for i in 0..n {
            for j in 0..n {
                if atoms.iter().any(|at| self.in_atom(at, &self.points[i], &self.points[j])) {
                    r.set(i, j);
                }
            }
        }
        r
    }

    pub fn saturate(&self, r: &SlowRelation) -> SlowRelation {
        let mut out = r.clone();
        for k in 0..out.n {
            let row_k = out.rows[k].clone();
            for i in 0..out.n {
                if out.get(i, k) {
                    for (a, b) in out.rows[i].iter_mut().zip(&row_k) {
                        *a |= b;
                    }
                }
            }
        }
        out
    }

    pub fn add_diagonal(&self, r: &SlowRelation) -> SlowRelation {
        let mut out = r.clone();
        for i in 0..out.n {
            out.set(i, i);
        }
        out
    }

    /// Members of `f` in the witness window.
    fn window(&self, f: &str) -> Vec<usize> {
        (self.window_start..=self.max_index)
            .map(|k| self.idx(&SymbolicPoint::member(f, k)))
            .collect()
    }

    pub fn closure(&self, r: &SlowRelation) -> SlowRelation {
        let mut out = r.clone();
        let fams: Vec<(&String, usize)> = self.limits.iter().map(|(f, l)| (f, self.idx(l))).collect();
        for a in 0..r.n {
            for &(g, lim) in &fams {
                let hits = self.window(g).into_iter().filter(|&j| r.get(a, j)).count();
                if hits >= 2 {
                    out.set(a, lim);
                }
                let hits = self.window(g).into_iter().filter(|&j| r.get(j, a)).count();
                if hits >= 2 {
                    out.set(lim, a);
                }
            }
        }
        for &(f, lf) in &fams {
            for &(g, lg) in &fams {
                let wf = self.window(f);
                let wg = self.window(g);
                let hits: usize = wf
                    .iter()
                    .map(|&i| wg.iter().filter(|&&j| r.get(i, j)).count())
                    .sum();
                if hits >= 2 {
                    out.set(lf, lg);
                }
            }
        }
        out
    }

    pub fn gamma_step(&self, r: &SlowRelation) -> SlowRelation {
        self.closure(&self.add_diagonal(&self.saturate(r)))
    }

    /// Stages until the first repeat, seed included.
    pub fn stages(&self, seed: SlowRelation, cap: usize) -> Vec<SlowRelation> {
        let mut out = vec![seed];
        for _ in 0..cap {
            let next = self.gamma_step(out.last().expect("seed"));
            if &next == out.last().expect("seed") {
                break;
            }
            out.push(next);
        }
        out
    }

    pub fn member(&self, r: &SlowRelation, a: &SymbolicPoint, b: &SymbolicPoint) -> bool {
        r.get(self.idx(a), self.idx(b))
    }

    /// Points with index at most `bound`, for comparisons away from the truncation edge.
    pub fn low_points(&self, bound: u64) -> Vec<SymbolicPoint> {
        self.points
            .iter()
            .filter(|p| match p {
                SymbolicPoint::Member(_, k) => *k <= bound,
                _ => true,
            })
            .cloned()
            .collect()
    }
}

/// Fixture spaces used by the relation and rank tests.
pub fn fixture_space(name: &str) -> SpacePresentation {
    use dynpair::space::Family;
    let fam = |n: &str, p: SymbolicPoint| Family {
        name: n.into(),
        parent: p,
    };
    let b = SymbolicPoint::base;
    let (bases, families): (Vec<&str>, Vec<Family>) = match name {
        "e1" => (vec!["p", "q"], vec![fam("f", b("p")), fam("g", b("q"))]),
        "e2" => (
            vec!["p", "q", "r"],
            vec![fam("f", b("p")), fam("g", b("q")), fam("g'", b("q")), fam("h", b("r"))],
        ),
        "nested" => (
            vec!["p", "q"],
            vec![
                fam("f", b("p")),
                fam("g", b("q")),
                fam("h", SymbolicPoint::member("f", 2)),
            ],
        ),
        "shared" => (
            vec!["p", "q", "z"],
            vec![fam("f", b("p")), fam("f'", b("p")), fam("g", b("q"))],
        ),
        _ => panic!("unknown fixture space {name}"),
    };
    SpacePresentation::new(bases.into_iter().map(String::from).collect(), families).expect("fixture space")
}

/// Symmetric closure of an atom list.
pub fn sym(atoms: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in atoms {
        for b in [a.clone(), a.transpose()] {
            if !out.contains(&b) {
                out.push(b);
            }
        }
    }
    out
}

pub fn e1_atoms() -> Vec<Atom> {
    sym(&[Atom::Aligned("f".into(), "g".into(), 0)])
}

pub fn e2_atoms() -> Vec<Atom> {
    sym(&[
        Atom::Aligned("f".into(), "g".into(), 0),
        Atom::Aligned("g'".into(), "h".into(), 0),
    ])
}

/// A random symmetric atom list over `space`, driven by `next` (returns values in `0..n`).
pub fn random_atoms(space: &SpacePresentation, count: usize, mut next: impl FnMut(usize) -> usize) -> Vec<Atom> {
    let fams: Vec<String> = space.families().iter().map(|f| f.name.clone()).collect();
    let bases: Vec<String> = space.bases().to_vec();
    let point = |next: &mut dyn FnMut(usize) -> usize| -> SymbolicPoint {
        if next(3) == 0 {
            SymbolicPoint::base(&bases[next(bases.len())])
        } else {
            SymbolicPoint::member(&fams[next(fams.len())], next(5) as u64)
        }
    };
    let mut atoms = Vec::new();
    for _ in 0..count {
        let atom = match next(4) {
            0 => Atom::Aligned(fams[next(fams.len())].clone(), fams[next(fams.len())].clone(), next(4) as u64),
            1 => Atom::pair(point(&mut next), point(&mut next)),
            _ => {
                let set = |next: &mut dyn FnMut(usize) -> usize| match next(3) {
                    0 => BasicSet::fin([point(next), point(next)]),
                    1 => BasicSet::OTail(fams[next(fams.len())].clone(), next(4) as u64),
                    _ => BasicSet::Tail(fams[next(fams.len())].clone(), next(4) as u64),
                };
                let a = set(&mut next);
                let b = set(&mut next);
                Atom::Rect(a, b)
            }
        };
        atoms.push(atom);
    }
    sym(&atoms)
}
