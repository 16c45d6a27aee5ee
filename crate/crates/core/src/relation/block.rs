use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{ExactnessFlag, RelationError};
use crate::symbolic::{EdgeShift, Word};

/// A union of cylinder rectangles `[u] x [v]` over central `(2k+1)`-blocks.
#[derive(Debug, Clone)]
pub struct BlockRelation {
    shift: Arc<EdgeShift>,
    depth: usize,
    pairs: BTreeSet<(Word, Word)>,
    flag: ExactnessFlag,
}

impl BlockRelation {
    pub fn new(
        shift: Arc<EdgeShift>,
        depth: usize,
        pairs: BTreeSet<(Word, Word)>,
        flag: ExactnessFlag,
    ) -> Result<Self, RelationError> {
        let allowed: BTreeSet<Word> = shift.blocks(depth).into_iter().collect();
        for (u, v) in &pairs {
            for w in [u, v] {
                if w.len() != 2 * depth + 1 {
                    return Err(RelationError::BlockLength {
                        block: shift.render(w),
                        len: w.len(),
                        expected: 2 * depth + 1,
                    });
                }
                if !allowed.contains(w) {
                    return Err(RelationError::BlockNotAllowed(shift.render(w)));
                }
            }
        }
        Ok(BlockRelation {
            shift,
            depth,
            pairs,
            flag,
        })
    }

    pub fn empty(shift: Arc<EdgeShift>, depth: usize) -> Self {
        BlockRelation {
            shift,
            depth,
            pairs: BTreeSet::new(),
            flag: ExactnessFlag::Exact,
        }
    }

    pub fn full(shift: Arc<EdgeShift>, depth: usize) -> Self {
        let blocks = shift.blocks(depth);
        let pairs = blocks
            .iter()
            .flat_map(|u| blocks.iter().map(move |v| (u.clone(), v.clone())))
            .collect();
        BlockRelation {
            shift,
            depth,
            pairs,
            flag: ExactnessFlag::Exact,
        }
    }

    pub fn diagonal(shift: Arc<EdgeShift>, depth: usize) -> Self {
        BlockRelation::empty(shift, depth).add_diagonal()
    }

    pub fn shift(&self) -> &Arc<EdgeShift> {
        &self.shift
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn pairs(&self) -> &BTreeSet<(Word, Word)> {
        &self.pairs
    }

    pub fn flag(&self) -> ExactnessFlag {
        self.flag
    }

    pub fn with_flag(mut self, flag: ExactnessFlag) -> Self {
        self.flag = flag;
        self
    }

    pub fn member(&self, u: &[u8], v: &[u8]) -> bool {
        self.pairs.contains(&(u.to_vec(), v.to_vec()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs
            .iter()
            .all(|(u, v)| self.pairs.contains(&(v.clone(), u.clone())))
    }

    pub fn symmetrized(&self) -> Self {
        let mut r = self.clone();
        for (u, v) in &self.pairs {
            r.pairs.insert((v.clone(), u.clone()));
        }
        r
    }

    fn comparable(&self, other: &Self) -> bool {
        self.depth == other.depth && (Arc::ptr_eq(&self.shift, &other.shift) || self.shift == other.shift)
    }

    pub fn is_subset(&self, other: &Self) -> Option<bool> {
        self.comparable(other)
            .then(|| self.pairs.is_subset(&other.pairs))
    }

    pub fn is_full(&self) -> bool {
        let n = self.shift.blocks(self.depth).len();
        self.pairs.len() == n * n
    }

    pub fn union(&self, other: &Self) -> Option<Self> {
        if !self.comparable(other) {
            return None;
        }
        let mut r = self.clone();
        r.pairs.extend(other.pairs.iter().cloned());
        r.flag = self.flag.weaken(other.flag);
        Some(r)
    }

    pub fn add_diagonal(&self) -> Self {
        let mut r = self.clone();
        for u in self.shift.blocks(self.depth) {
            r.pairs.insert((u.clone(), u));
        }
        r
    }

    /// Transitive closure of the pair graph on blocks.
    pub fn transitive_saturate(&self) -> Self {
        let nodes: Vec<&Word> = self
            .pairs
            .iter()
            .flat_map(|(u, v)| [u, v])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&Word, usize> = nodes.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let n = nodes.len();
        let words = n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; n];
        for (u, v) in &self.pairs {
            let j = index[v];
            rows[index[u]][j / 64] |= 1 << (j % 64);
        }
        for k in 0..n {
            let row_k = rows[k].clone();
            for row in rows.iter_mut() {
                if row[k / 64] >> (k % 64) & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(&row_k) {
                        *a |= b;
                    }
                }
            }
        }
        let mut pairs = BTreeSet::new();
        for (i, row) in rows.iter().enumerate() {
            for j in 0..n {
                if row[j / 64] >> (j % 64) & 1 == 1 {
                    pairs.insert((nodes[i].clone(), nodes[j].clone()));
                }
            }
        }
        BlockRelation {
            pairs,
            ..self.clone()
        }
    }

    /// Pairs of `(2k+3)`-blocks whose central `(2k+1)`-blocks are related.
    ///
    /// Every allowed block of a trimmed presentation extends to a point, so the
    /// extendability pruning removes nothing here.
    pub fn refine(&self) -> Self {
        let k = self.depth + 1;
        let blocks = self.shift.blocks(k);
        let mut by_center: BTreeMap<&[u8], Vec<&Word>> = BTreeMap::new();
        for b in &blocks {
            by_center.entry(&b[1..b.len() - 1]).or_default().push(b);
        }
        let mut pairs = BTreeSet::new();
        for (u, v) in &self.pairs {
            let (Some(us), Some(vs)) = (by_center.get(u.as_slice()), by_center.get(v.as_slice())) else {
                continue;
            };
            for &a in us {
                for &b in vs {
                    pairs.insert((a.clone(), b.clone()));
                }
            }
        }
        BlockRelation {
            shift: self.shift.clone(),
            depth: k,
            pairs,
            flag: self.flag.weaken(ExactnessFlag::OuterApprox(k)),
        }
    }

    /// Central truncation of every pair to depth `k - 1`.
    pub fn truncate(&self) -> Option<Self> {
        if self.depth == 0 {
            return None;
        }
        let pairs = self
            .pairs
            .iter()
            .map(|(u, v)| (u[1..u.len() - 1].to_vec(), v[1..v.len() - 1].to_vec()))
            .collect();
        Some(BlockRelation {
            shift: self.shift.clone(),
            depth: self.depth - 1,
            pairs,
            flag: self.flag,
        })
    }

    /// Some allowed block pair outside the relation, in lexicographic order.
    pub fn missing_pair(&self) -> Option<(Word, Word)> {
        let blocks = self.shift.blocks(self.depth);
        for u in &blocks {
            for v in &blocks {
                if !self.member(u, v) {
                    return Some((u.clone(), v.clone()));
                }
            }
        }
        None
    }
}

impl PartialEq for BlockRelation {
    fn eq(&self, other: &Self) -> bool {
        self.comparable(other) && self.pairs == other.pairs
    }
}
