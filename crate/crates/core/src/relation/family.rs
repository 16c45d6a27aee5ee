//! Exact relations on a presented countable space.
//!
//! Relations are given by atoms (aligned sequences and rectangles of basic
//! sets) and kept in a finite normal form. Pick a bound `K` above every index
//! constant of the presentation and of the atoms. Members `f(k)` with `k >= K`
//! are *generic*: no atom distinguishes two generic members of the same
//! family, except through whether two indices coincide. A relation is then
//! determined by
//!
//! - its pairs of explicit points (base points and members below `K`),
//! - for each explicit `x` and family `g`, whether `(x, g(j))` holds for generic `j`,
//! - the mirror table `(f(j), y)`,
//! - for each pair of families, whether `(f(j), g(j))` holds (aligned) and
//!   whether `(f(j), g(i))` holds for generic `i != j` (crossed).
//!
//! Saturation, closure and equality are computed exactly on this table.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::RelationError;
use crate::space::{SpacePresentation, SymbolicPoint};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicSet {
    /// A finite set of points.
    Fin(BTreeSet<SymbolicPoint>),
    /// `{f(k) : k >= k0}`.
    OTail(String, u64),
    /// `{f(k) : k >= k0}` together with the limit of `f`.
    Tail(String, u64),
}

impl BasicSet {
    pub fn fin<I: IntoIterator<Item = SymbolicPoint>>(points: I) -> Self {
        BasicSet::Fin(points.into_iter().collect())
    }

    pub fn contains(&self, space: &SpacePresentation, p: &SymbolicPoint) -> bool {
        match self {
            BasicSet::Fin(s) => s.contains(p),
            BasicSet::OTail(f, k0) => matches!(p, SymbolicPoint::Member(g, k) if g == f && k >= k0),
            BasicSet::Tail(f, k0) => {
                matches!(p, SymbolicPoint::Member(g, k) if g == f && k >= k0)
                    || space.limit_of(f).map_or(false, |l| &l == p)
            }
        }
    }

    fn index_bound(&self) -> u64 {
        match self {
            BasicSet::Fin(s) => s
                .iter()
                .filter_map(|p| match p {
                    SymbolicPoint::Member(_, k) => Some(k + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0),
            BasicSet::OTail(_, k) | BasicSet::Tail(_, k) => *k,
        }
    }

    fn validate(&self, space: &SpacePresentation) -> Result<(), RelationError> {
        match self {
            BasicSet::Fin(s) => {
                for p in s {
                    space.check_point(p)?;
                }
            }
            BasicSet::OTail(f, _) | BasicSet::Tail(f, _) => {
                space.family(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for BasicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicSet::Fin(s) => {
                let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            BasicSet::OTail(g, k) => write!(f, "otail({g},{k})"),
            BasicSet::Tail(g, k) => write!(f, "tail({g},{k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `{(f(k), g(k)) : k >= k0}`.
    Aligned(String, String, u64),
    /// `A x B`.
    Rect(BasicSet, BasicSet),
}

impl Atom {
    pub fn pair(a: SymbolicPoint, b: SymbolicPoint) -> Self {
        Atom::Rect(BasicSet::fin([a]), BasicSet::fin([b]))
    }

    pub fn transpose(&self) -> Atom {
        match self {
            Atom::Aligned(f, g, k) => Atom::Aligned(g.clone(), f.clone(), *k),
            Atom::Rect(a, b) => Atom::Rect(b.clone(), a.clone()),
        }
    }

    pub fn contains(&self, space: &SpacePresentation, a: &SymbolicPoint, b: &SymbolicPoint) -> bool {
        match self {
            Atom::Aligned(f, g, k0) => match (a, b) {
                (SymbolicPoint::Member(fa, ka), SymbolicPoint::Member(gb, kb)) => {
                    fa == f && gb == g && ka == kb && ka >= k0
                }
                _ => false,
            },
            Atom::Rect(x, y) => x.contains(space, a) && y.contains(space, b),
        }
    }

    fn index_bound(&self) -> u64 {
        match self {
            Atom::Aligned(_, _, k) => *k,
            Atom::Rect(a, b) => a.index_bound().max(b.index_bound()),
        }
    }

    fn validate(&self, space: &SpacePresentation) -> Result<(), RelationError> {
        match self {
            Atom::Aligned(f, g, _) => {
                space.family(f)?;
                space.family(g)?;
                Ok(())
            }
            Atom::Rect(a, b) => {
                a.validate(space)?;
                b.validate(space)
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Aligned(a, b, k) => write!(f, "aligned {a} {b} {k}"),
            Atom::Rect(a, b) => write!(f, "rect {a} {b}"),
        }
    }
}

/// Work done by one saturation: nodes of the reachability graph and visits made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaturationStats {
    pub nodes: usize,
    pub visits: usize,
}

type Pairs = BTreeSet<(SymbolicPoint, SymbolicPoint)>;

#[derive(Debug, Clone)]
pub struct FamilyRelation {
    space: Arc<SpacePresentation>,
    bound: u64,
    pairs: Pairs,
    to_tail: BTreeSet<(SymbolicPoint, String)>,
    from_tail: BTreeSet<(String, SymbolicPoint)>,
    aligned: BTreeSet<(String, String)>,
    crossed: BTreeSet<(String, String)>,
}

enum Loc<'a> {
    Explicit,
    Generic(&'a str, u64),
}

impl FamilyRelation {
    pub fn empty(space: Arc<SpacePresentation>) -> Self {
        let bound = space.index_bound();
        FamilyRelation {
            space,
            bound,
            pairs: BTreeSet::new(),
            to_tail: BTreeSet::new(),
            from_tail: BTreeSet::new(),
            aligned: BTreeSet::new(),
            crossed: BTreeSet::new(),
        }
    }

    pub fn from_atoms(space: Arc<SpacePresentation>, atoms: &[Atom]) -> Result<Self, RelationError> {
        for a in atoms {
            a.validate(&space)?;
        }
        let bound = atoms
            .iter()
            .map(Atom::index_bound)
            .chain([space.index_bound()])
            .max()
            .unwrap_or(0);
        let mut r = FamilyRelation::empty(space);
        r.bound = bound;
        let sp = r.space.clone();
        let hit = |a: &SymbolicPoint, b: &SymbolicPoint| atoms.iter().any(|at| at.contains(&sp, a, b));
        let explicit = sp.explicit_points(bound);
        let names: Vec<String> = sp.families().iter().map(|f| f.name.clone()).collect();
        for x in &explicit {
            for y in &explicit {
                if hit(x, y) {
                    r.pairs.insert((x.clone(), y.clone()));
                }
            }
            for g in &names {
                if hit(x, &SymbolicPoint::Member(g.clone(), bound)) {
                    r.to_tail.insert((x.clone(), g.clone()));
                }
                if hit(&SymbolicPoint::Member(g.clone(), bound), x) {
                    r.from_tail.insert((g.clone(), x.clone()));
                }
            }
        }
        for f in &names {
            for g in &names {
                let fk = SymbolicPoint::Member(f.clone(), bound);
                if hit(&fk, &SymbolicPoint::Member(g.clone(), bound)) {
                    r.aligned.insert((f.clone(), g.clone()));
                }
                if hit(&fk, &SymbolicPoint::Member(g.clone(), bound + 1)) {
                    r.crossed.insert((f.clone(), g.clone()));
                }
            }
        }
        Ok(r)
    }

    /// The diagonal of the space.
    pub fn diagonal(space: Arc<SpacePresentation>) -> Self {
        FamilyRelation::empty(space).add_diagonal()
    }

    /// The whole square of the space.
    pub fn full(space: Arc<SpacePresentation>) -> Self {
        let mut r = FamilyRelation::empty(space);
        let explicit = r.space.explicit_points(r.bound);
        let names: Vec<String> = r.space.families().iter().map(|f| f.name.clone()).collect();
        for x in &explicit {
            for y in &explicit {
                r.pairs.insert((x.clone(), y.clone()));
            }
            for g in &names {
                r.to_tail.insert((x.clone(), g.clone()));
                r.from_tail.insert((g.clone(), x.clone()));
            }
        }
        for f in &names {
            for g in &names {
                r.aligned.insert((f.clone(), g.clone()));
                r.crossed.insert((f.clone(), g.clone()));
            }
        }
        r
    }

    pub fn space(&self) -> &Arc<SpacePresentation> {
        &self.space
    }

    /// Index threshold above which members are generic.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    fn loc<'a>(&self, p: &'a SymbolicPoint) -> Loc<'a> {
        match p {
            SymbolicPoint::Member(f, k) if *k >= self.bound => Loc::Generic(f, *k),
            _ => Loc::Explicit,
        }
    }

    /// Exact membership of a point pair.
    pub fn member(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> Result<bool, RelationError> {
        self.space.check_point(a)?;
        self.space.check_point(b)?;
        Ok(match (self.loc(a), self.loc(b)) {
            (Loc::Explicit, Loc::Explicit) => self.pairs.contains(&(a.clone(), b.clone())),
            (Loc::Explicit, Loc::Generic(g, _)) => self.to_tail.contains(&(a.clone(), g.to_string())),
            (Loc::Generic(f, _), Loc::Explicit) => self.from_tail.contains(&(f.to_string(), b.clone())),
            (Loc::Generic(f, i), Loc::Generic(g, j)) => {
                let key = (f.to_string(), g.to_string());
                if i == j {
                    self.aligned.contains(&key)
                } else {
                    self.crossed.contains(&key)
                }
            }
        })
    }

    /// The same relation written with a larger generic threshold.
    pub fn with_bound(&self, bound: u64) -> Self {
        if bound <= self.bound {
            return self.clone();
        }
        let mut r = self.clone();
        r.bound = bound;
        let explicit = self.space.explicit_points(bound);
        let names: Vec<String> = self.space.families().iter().map(|f| f.name.clone()).collect();
        r.pairs.clear();
        r.to_tail.clear();
        r.from_tail.clear();
        let generic_far = |g: &str| SymbolicPoint::Member(g.to_string(), bound + 7);
        for x in &explicit {
            for y in &explicit {
                if self.member(x, y).unwrap_or(false) {
                    r.pairs.insert((x.clone(), y.clone()));
                }
            }
            for g in &names {
                if self.member(x, &generic_far(g)).unwrap_or(false) {
                    r.to_tail.insert((x.clone(), g.clone()));
                }
                if self.member(&generic_far(g), x).unwrap_or(false) {
                    r.from_tail.insert((g.clone(), x.clone()));
                }
            }
        }
        r
    }

    fn aligned_pair(&self, other: &Self) -> Result<(Self, Self), RelationError> {
        if !Arc::ptr_eq(&self.space, &other.space) && self.space != other.space {
            return Err(RelationError::BackendMismatch);
        }
        let b = self.bound.max(other.bound);
        Ok((self.with_bound(b), other.with_bound(b)))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, RelationError> {
        let (a, b) = self.aligned_pair(other)?;
        Ok(a.pairs.is_subset(&b.pairs)
            && a.to_tail.is_subset(&b.to_tail)
            && a.from_tail.is_subset(&b.from_tail)
            && a.aligned.is_subset(&b.aligned)
            && a.crossed.is_subset(&b.crossed))
    }

    /// Whether every pair of `atom` lies in the relation.
    pub fn contains_atom(&self, atom: &Atom) -> Result<bool, RelationError> {
        let single = FamilyRelation::from_atoms(self.space.clone(), std::slice::from_ref(atom))?;
        single.is_subset(self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|(x, y)| self.pairs.contains(&(y.clone(), x.clone())))
            && self.to_tail.iter().all(|(x, g)| self.from_tail.contains(&(g.clone(), x.clone())))
            && self.from_tail.iter().all(|(g, x)| self.to_tail.contains(&(x.clone(), g.clone())))
            && self.aligned.iter().all(|(f, g)| self.aligned.contains(&(g.clone(), f.clone())))
            && self.crossed.iter().all(|(f, g)| self.crossed.contains(&(g.clone(), f.clone())))
    }

    /// Adds the transpose of every pair.
    pub fn symmetrized(&self) -> Self {
        let mut r = self.clone();
        for (x, y) in &self.pairs {
            r.pairs.insert((y.clone(), x.clone()));
        }
        for (x, g) in &self.to_tail {
            r.from_tail.insert((g.clone(), x.clone()));
        }
        for (g, x) in &self.from_tail {
            r.to_tail.insert((x.clone(), g.clone()));
        }
        for (f, g) in &self.aligned {
            r.aligned.insert((g.clone(), f.clone()));
        }
        for (f, g) in &self.crossed {
            r.crossed.insert((g.clone(), f.clone()));
        }
        r
    }

    pub fn is_full(&self) -> bool {
        FamilyRelation::full(self.space.clone())
            .is_subset(self)
            .unwrap_or(false)
    }

    pub fn union(&self, other: &Self) -> Result<Self, RelationError> {
        let (mut a, b) = self.aligned_pair(other)?;
        a.pairs.extend(b.pairs);
        a.to_tail.extend(b.to_tail);
        a.from_tail.extend(b.from_tail);
        a.aligned.extend(b.aligned);
        a.crossed.extend(b.crossed);
        Ok(a)
    }

    pub fn add_diagonal(&self) -> Self {
        let mut r = self.clone();
        for x in self.space.explicit_points(self.bound) {
            r.pairs.insert((x.clone(), x));
        }
        for f in self.space.families() {
            r.aligned.insert((f.name.clone(), f.name.clone()));
        }
        r
    }

    pub fn transitive_saturate(&self) -> Self {
        self.saturate_with_stats().0
    }

    /// Transitive closure by reachability over explicit points and family
    /// tails. Tail nodes carry whether the current index still equals the
    /// starting index (`Same`) or differs from it (`Diff`).
    pub fn saturate_with_stats(&self) -> (Self, SaturationStats) {
        let explicit = self.space.explicit_points(self.bound);
        let names: Vec<String> = self.space.families().iter().map(|f| f.name.clone()).collect();
        let e = explicit.len();
        let xid: BTreeMap<&SymbolicPoint, usize> =
            explicit.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let fid: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let same = |f: usize| e + 2 * f;
        let diff = |f: usize| e + 2 * f + 1;
        let n = e + 2 * names.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (x, y) in &self.pairs {
            adj[xid[x]].push(xid[y]);
        }
        for (x, g) in &self.to_tail {
            let g = fid[g.as_str()];
            adj[xid[x]].extend([same(g), diff(g)]);
        }
        for (f, y) in &self.from_tail {
            let f = fid[f.as_str()];
            adj[same(f)].push(xid[y]);
            adj[diff(f)].push(xid[y]);
        }
        for (f, g) in &self.aligned {
            let (f, g) = (fid[f.as_str()], fid[g.as_str()]);
            adj[same(f)].push(same(g));
            adj[diff(f)].push(diff(g));
        }
        for (f, g) in &self.crossed {
            let (f, g) = (fid[f.as_str()], fid[g.as_str()]);
            adj[same(f)].push(diff(g));
            adj[diff(f)].extend([same(g), diff(g)]);
        }
        let mut visits = 0usize;
        let mut reach = |start: usize| -> Vec<bool> {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = VecDeque::new();
            for &t in &adj[start] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
            while let Some(v) = queue.pop_front() {
                visits += 1;
                for &t in &adj[v] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let mut r = FamilyRelation::empty(self.space.clone());
        r.bound = self.bound;
        for (i, x) in explicit.iter().enumerate() {
            let seen = reach(i);
            for (j, y) in explicit.iter().enumerate() {
                if seen[j] {
                    r.pairs.insert((x.clone(), y.clone()));
                }
            }
            for (g, name) in names.iter().enumerate() {
                if seen[same(g)] || seen[diff(g)] {
                    r.to_tail.insert((x.clone(), name.clone()));
                }
            }
        }
        for (f, fname) in names.iter().enumerate() {
            let seen = reach(same(f));
            for (j, y) in explicit.iter().enumerate() {
                if seen[j] {
                    r.from_tail.insert((fname.clone(), y.clone()));
                }
            }
            for (g, gname) in names.iter().enumerate() {
                if seen[same(g)] {
                    r.aligned.insert((fname.clone(), gname.clone()));
                }
                if seen[diff(g)] {
                    r.crossed.insert((fname.clone(), gname.clone()));
                }
            }
        }
        (r, SaturationStats { nodes: n, visits })
    }

    /// Adds every limit of a convergent sequence of pairs.
    ///
    /// Non-constant convergent sequences run along generic family members, so
    /// the closure only adds pairs involving family limits and one pass suffices.
    pub fn topological_closure(&self) -> Self {
        let mut r = self.clone();
        let lim = |f: &str| self.space.limit_of(f).expect("family exists");
        for (x, h) in &self.to_tail {
            r.pairs.insert((x.clone(), lim(h)));
        }
        for (h, y) in &self.from_tail {
            r.pairs.insert((lim(h), y.clone()));
        }
        for (f, g) in self.aligned.iter().chain(&self.crossed) {
            r.pairs.insert((lim(f), lim(g)));
        }
        for (f, g) in &self.crossed {
            r.to_tail.insert((lim(f), g.clone()));
            r.from_tail.insert((f.clone(), lim(g)));
        }
        r
    }

    /// Normal form written back as atoms, in canonical order.
    pub fn atoms(&self) -> Vec<Atom> {
        let k = self.bound;
        let mut out = BTreeSet::new();
        for (x, y) in &self.pairs {
            out.insert(Atom::pair(x.clone(), y.clone()));
        }
        for (x, g) in &self.to_tail {
            out.insert(Atom::Rect(BasicSet::fin([x.clone()]), BasicSet::OTail(g.clone(), k)));
        }
        for (g, y) in &self.from_tail {
            out.insert(Atom::Rect(BasicSet::OTail(g.clone(), k), BasicSet::fin([y.clone()])));
        }
        for (f, g) in &self.aligned {
            if !self.crossed.contains(&(f.clone(), g.clone())) {
                out.insert(Atom::Aligned(f.clone(), g.clone(), k));
            }
        }
        for (f, g) in &self.crossed {
            if self.aligned.contains(&(f.clone(), g.clone())) {
                out.insert(Atom::Rect(BasicSet::OTail(f.clone(), k), BasicSet::OTail(g.clone(), k)));
            } else {
                // crossed without the same-index pairs: not expressible as one atom
                for (i, j) in [(k, k + 1), (k + 1, k)] {
                    out.insert(Atom::Rect(
                        BasicSet::OTail(f.clone(), i),
                        BasicSet::OTail(g.clone(), j),
                    ));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Some pair of the square missing from the relation.
    pub fn missing_pair(&self) -> Option<(SymbolicPoint, SymbolicPoint)> {
        let full = FamilyRelation::full(self.space.clone()).with_bound(self.bound);
        let k = self.bound;
        if let Some(p) = full.pairs.difference(&self.pairs).next() {
            return Some(p.clone());
        }
        if let Some((x, g)) = full.to_tail.difference(&self.to_tail).next() {
            return Some((x.clone(), SymbolicPoint::Member(g.clone(), k)));
        }
        if let Some((g, y)) = full.from_tail.difference(&self.from_tail).next() {
            return Some((SymbolicPoint::Member(g.clone(), k), y.clone()));
        }
        if let Some((f, g)) = full.aligned.difference(&self.aligned).next() {
            return Some((SymbolicPoint::Member(f.clone(), k), SymbolicPoint::Member(g.clone(), k)));
        }
        if let Some((f, g)) = full.crossed.difference(&self.crossed).next() {
            return Some((
                SymbolicPoint::Member(f.clone(), k),
                SymbolicPoint::Member(g.clone(), k + 1),
            ));
        }
        None
    }
}

impl PartialEq for FamilyRelation {
    fn eq(&self, other: &Self) -> bool {
        matches!(
            (self.is_subset(other), other.is_subset(self)),
            (Ok(true), Ok(true))
        )
    }
}
