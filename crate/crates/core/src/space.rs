//! Countable compact spaces presented by finite trees of convergent sequences.
//!
//! A presentation has finitely many base points and finitely many families.
//! A family `f` with parent `x` denotes fresh points `f(0), f(1), ...`
//! converging to `x`; the parent is either a base point or a member of another
//! family. No other convergence exists, which makes closures exactly computable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("name {0:?} is declared twice")]
    DuplicateName(String),
    #[error("family {0:?} is its own ancestor")]
    CyclicParent(String),
    #[error("the space has no base points")]
    EmptySpace,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicPoint {
    Base(String),
    Member(String, u64),
}

impl SymbolicPoint {
    pub fn base(name: &str) -> Self {
        SymbolicPoint::Base(name.to_string())
    }

    pub fn member(family: &str, index: u64) -> Self {
        SymbolicPoint::Member(family.to_string(), index)
    }
}

impl fmt::Display for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicPoint::Base(n) => write!(f, "{n}"),
            SymbolicPoint::Member(n, k) => write!(f, "{n}[{k}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub parent: SymbolicPoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacePresentation {
    bases: Vec<String>,
    families: Vec<Family>,
    family_index: BTreeMap<String, usize>,
}

impl SpacePresentation {
    pub fn new(bases: Vec<String>, families: Vec<Family>) -> Result<Self, SpaceError> {
        if bases.is_empty() {
            return Err(SpaceError::EmptySpace);
        }
        let mut names = BTreeSet::new();
        for n in bases.iter().chain(families.iter().map(|f| &f.name)) {
            if !names.insert(n.clone()) {
                return Err(SpaceError::DuplicateName(n.clone()));
            }
        }
        let family_index: BTreeMap<String, usize> = families
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.clone(), i))
            .collect();
        let space = SpacePresentation {
            bases,
            families,
            family_index,
        };
        for f in &space.families {
            space.check_point(&f.parent)?;
        }
        for f in &space.families {
            let mut seen = BTreeSet::new();
            let mut cur = f.name.as_str();
            loop {
                if !seen.insert(cur) {
                    return Err(SpaceError::CyclicParent(f.name.clone()));
                }
                match &space.families[space.family_index[cur]].parent {
                    SymbolicPoint::Base(_) => break,
                    SymbolicPoint::Member(g, _) => cur = g,
                }
            }
        }
        Ok(space)
    }

    pub fn bases(&self) -> &[String] {
        &self.bases
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, name: &str) -> Result<&Family, SpaceError> {
        self.family_index
            .get(name)
            .map(|&i| &self.families[i])
            .ok_or_else(|| SpaceError::UnknownFamily(name.to_string()))
    }

    pub fn has_family(&self, name: &str) -> bool {
        self.family_index.contains_key(name)
    }

    pub fn check_point(&self, p: &SymbolicPoint) -> Result<(), SpaceError> {
        let ok = match p {
            SymbolicPoint::Base(n) => self.bases.iter().any(|b| b == n),
            SymbolicPoint::Member(f, _) => self.has_family(f),
        };
        if ok {
            Ok(())
        } else {
            Err(SpaceError::UnknownPoint(p.to_string()))
        }
    }

    /// The declared limit of a family.
    pub fn limit_of(&self, family: &str) -> Result<SymbolicPoint, SpaceError> {
        Ok(self.family(family)?.parent.clone())
    }

    /// Families converging to `p`.
    pub fn children_of(&self, p: &SymbolicPoint) -> Vec<&Family> {
        self.families.iter().filter(|f| &f.parent == p).collect()
    }

    /// Whether `p` is an accumulation point of the space.
    pub fn is_limit(&self, p: &SymbolicPoint) -> bool {
        self.families.iter().any(|f| &f.parent == p)
    }

    /// Level of a point: base points are level 1, members of a family sit one
    /// level below its parent.
    pub fn level(&self, p: &SymbolicPoint) -> usize {
        match p {
            SymbolicPoint::Base(_) => 1,
            SymbolicPoint::Member(f, _) => {
                1 + self.level(&self.families[self.family_index[f]].parent)
            }
        }
    }

    /// Nesting depth: the largest level of any point.
    pub fn depth(&self) -> usize {
        self.families
            .iter()
            .map(|f| 1 + self.level(&f.parent))
            .max()
            .unwrap_or(1)
    }

    /// Smallest index bound above every member index mentioned by the presentation.
    pub fn index_bound(&self) -> u64 {
        self.families
            .iter()
            .filter_map(|f| match &f.parent {
                SymbolicPoint::Member(_, k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Distance from a point to its nearest other point at the same level.
    fn isolation_radius(&self, p: &SymbolicPoint) -> BigRational {
        match p {
            SymbolicPoint::Base(_) => BigRational::one(),
            SymbolicPoint::Member(f, k) => self.scale(f) * pow2(-(*k as i64) - 2),
        }
    }

    /// Scale of a family: half of its parent's isolation radius.
    pub fn scale(&self, family: &str) -> BigRational {
        let parent = &self.families[self.family_index[family]].parent;
        self.isolation_radius(parent) / BigRational::from_integer(BigInt::from(2))
    }

    fn position(&self, p: &SymbolicPoint) -> BTreeMap<String, BigRational> {
        match p {
            SymbolicPoint::Base(b) => {
                let mut m = BTreeMap::new();
                m.insert(format!("base:{b}"), BigRational::new(1.into(), 2.into()));
                m
            }
            SymbolicPoint::Member(f, k) => {
                let parent = &self.families[self.family_index[f]].parent;
                let mut m = self.position(parent);
                m.insert(format!("family:{f}"), self.scale(f) * pow2(-(*k as i64) - 1));
                m
            }
        }
    }

    /// An explicit compatible metric: each family extends along its own axis of
    /// an l1 space, member `f(k)` at distance `2^(-k-1) * scale(f)` from its limit.
    pub fn metrize(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> Result<BigRational, SpaceError> {
        self.check_point(a)?;
        self.check_point(b)?;
        let pa = self.position(a);
        let pb = self.position(b);
        let zero = BigRational::zero();
        let keys: BTreeSet<&String> = pa.keys().chain(pb.keys()).collect();
        Ok(keys.into_iter().fold(BigRational::zero(), |acc, k| {
            let x = pa.get(k).unwrap_or(&zero);
            let y = pb.get(k).unwrap_or(&zero);
            acc + (x - y).abs()
        }))
    }

    /// Base points plus every member with index below `bound`.
    pub fn explicit_points(&self, bound: u64) -> Vec<SymbolicPoint> {
        let mut pts: Vec<SymbolicPoint> = self.bases.iter().map(|b| SymbolicPoint::base(b)).collect();
        for f in &self.families {
            for k in 0..bound {
                pts.push(SymbolicPoint::Member(f.name.clone(), k));
            }
        }
        pts.sort();
        pts
    }
}

fn pow2(e: i64) -> BigRational {
    let two = BigInt::from(2);
    if e >= 0 {
        BigRational::from_integer(two.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), two.pow((-e) as u32))
    }
}
