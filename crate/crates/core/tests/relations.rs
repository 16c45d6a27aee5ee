mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use dynpair::symbolic::Edge;
use dynpair::{Atom, BasicSet, BlockRelation, EdgeShift, ExactnessFlag, FamilyRelation, SpacePresentation, SymbolicPoint};
use oracles::{fixture_space, random_atoms, SlowSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0004;
const DEPTH: usize = 9;

/// Embeds a space into a subshift: a base point is a constant sequence, and
/// member `f[k]` is that sequence with a marker letter for `f` at position `k+1`.
struct Embedding {
    shift: Arc<EdgeShift>,
    base_letter: BTreeMap<String, char>,
    marker: BTreeMap<String, char>,
}

impl Embedding {
    fn new(space: &SpacePresentation) -> Self {
        let base_letter: BTreeMap<String, char> = space
            .bases()
            .iter()
            .zip("abcdefgh".chars())
            .map(|(b, c)| (b.clone(), c))
            .collect();
        let marker: BTreeMap<String, char> = space
            .families()
            .iter()
            .zip("FGHIJKLM".chars())
            .map(|(f, c)| (f.name.clone(), c))
            .collect();
        let alphabet: Vec<char> = base_letter.values().chain(marker.values()).copied().collect();
        let label = |c: char| alphabet.iter().position(|&a| a == c).unwrap() as u8;
        let mut states = Vec::new();
        let mut edges = Vec::new();
        for (b, &c) in &base_letter {
            let (before, after) = (states.len(), states.len() + 1);
            states.extend([format!("{b}0"), format!("{b}1")]);
            edges.push(Edge { source: before, target: before, label: label(c) });
            edges.push(Edge { source: after, target: after, label: label(c) });
            for f in space.families() {
                if root_base(space, &f.name) == *b {
                    edges.push(Edge { source: before, target: after, label: label(marker[&f.name]) });
                }
            }
        }
        let shift = Arc::new(EdgeShift::from_edges(alphabet, states, edges).unwrap());
        Embedding { shift, base_letter, marker }
    }

    fn block(&self, space: &SpacePresentation, p: &SymbolicPoint) -> Vec<u8> {
        let (base, mark) = match p {
            SymbolicPoint::Base(b) => (b.clone(), None),
            SymbolicPoint::Member(f, k) => (root_base(space, f), Some((self.marker[f], *k as usize))),
        };
        let mut s: Vec<char> = vec![self.base_letter[&base]; 2 * DEPTH + 1];
        if let Some((m, k)) = mark {
            if k + 1 <= DEPTH {
                s[DEPTH + k + 1] = m;
            }
        }
        self.shift.word(&s.into_iter().collect::<String>()).unwrap()
    }
}

/// The base point a family's members accumulate at, following parents down.
fn root_base(space: &SpacePresentation, family: &str) -> String {
    match &space.family(family).unwrap().parent {
        SymbolicPoint::Base(b) => b.clone(),
        SymbolicPoint::Member(g, _) => root_base(space, g),
    }
}

fn check_agreement(space_name: &str, atoms: &[Atom]) {
    let space = fixture_space(space_name);
    assert!(space.families().iter().all(|f| matches!(f.parent, SymbolicPoint::Base(_))));
    let emb = Embedding::new(&space);
    let slow = SlowSpace::new(&space, 12, 10);
    let seed = slow.from_atoms(atoms);
    let exact = FamilyRelation::from_atoms(Arc::new(space.clone()), atoms).unwrap().transitive_saturate();
    // block image of the seed: indices past the window look like the base point
    let pts = slow.low_points(12);
    let mut pairs = BTreeSet::new();
    for a in &pts {
        for b in &pts {
            if slow.member(&seed, a, b) {
                pairs.insert((emb.block(&space, a), emb.block(&space, b)));
            }
        }
    }
    let blocks = BlockRelation::new(emb.shift.clone(), DEPTH, pairs, ExactnessFlag::Exact)
        .unwrap()
        .transitive_saturate();
    let members: Vec<&SymbolicPoint> = pts
        .iter()
        .filter(|p| matches!(p, SymbolicPoint::Member(_, k) if *k <= 8))
        .collect();
    for a in &members {
        for b in &members {
            let e = exact.member(a, b).unwrap();
            assert_eq!(blocks.member(&emb.block(&space, a), &emb.block(&space, b)), e, "({a},{b}) {atoms:?}");
        }
    }
    // the block side is an outer approximation everywhere
    for a in &pts {
        for b in &pts {
            if exact.member(a, b).unwrap() {
                assert!(blocks.member(&emb.block(&space, a), &emb.block(&space, b)));
            }
        }
    }
}

#[test]
fn block_encoding_agrees_with_exact_saturation() {
    check_agreement("e1", &oracles::e1_atoms());
    check_agreement("e2", &oracles::e2_atoms());
    let m = SymbolicPoint::member;
    check_agreement(
        "e2",
        &oracles::sym(&[
            Atom::Rect(BasicSet::fin([m("f", 1)]), BasicSet::OTail("g".into(), 2)),
            Atom::pair(m("g", 4), m("h", 0)),
            Atom::Aligned("h".into(), "g'".into(), 3),
        ]),
    );
}

#[test]
fn operators_are_extensive_monotone_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for name in ["e2", "nested", "shared"] {
        let space = Arc::new(fixture_space(name));
        for _ in 0..30 {
            let a = random_atoms(&space, rng.gen_range(1..4), |n| rng.gen_range(0..n));
            let mut b = a.clone();
            b.extend(random_atoms(&space, 2, |n| rng.gen_range(0..n)));
            let r = FamilyRelation::from_atoms(space.clone(), &a).unwrap();
            let s = FamilyRelation::from_atoms(space.clone(), &b).unwrap();
            assert!(r.is_subset(&s).unwrap());
            let ops: [fn(&FamilyRelation) -> FamilyRelation; 3] = [
                FamilyRelation::transitive_saturate,
                FamilyRelation::topological_closure,
                FamilyRelation::add_diagonal,
            ];
            for op in ops {
                let (or, os) = (op(&r), op(&s));
                assert!(r.is_subset(&or).unwrap(), "extensive {a:?}");
                assert!(or.is_subset(&os).unwrap(), "monotone {a:?} {b:?}");
                assert_eq!(op(&or), or, "idempotent {a:?}");
            }
            let (_, stats) = r.saturate_with_stats();
            assert!(stats.visits <= stats.nodes * stats.nodes);
        }
    }
}

#[test]
fn membership_matches_reference_before_any_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    for name in ["e2", "nested", "shared"] {
        let space = Arc::new(fixture_space(name));
        let slow = SlowSpace::new(&space, 32, 16);
        for _ in 0..20 {
            let atoms = random_atoms(&space, 3, |n| rng.gen_range(0..n));
            let r = FamilyRelation::from_atoms(space.clone(), &atoms).unwrap();
            let s = slow.from_atoms(&atoms);
            for a in slow.low_points(10) {
                for b in slow.low_points(10) {
                    assert_eq!(r.member(&a, &b).unwrap(), slow.member(&s, &a, &b), "({a},{b}) {atoms:?}");
                }
            }
        }
    }
}

#[test]
fn basic_membership() {
    let space = Arc::new(fixture_space("e1"));
    let m = SymbolicPoint::member;
    let al = FamilyRelation::from_atoms(space.clone(), &[Atom::Aligned("f".into(), "g".into(), 0)]).unwrap();
    assert!(al.member(&m("f", 3), &m("g", 3)).unwrap());
    assert!(!al.member(&m("f", 3), &m("g", 4)).unwrap());
    let d = FamilyRelation::diagonal(space.clone());
    assert!(d.member(&SymbolicPoint::base("p"), &SymbolicPoint::base("p")).unwrap());
    assert!(d.member(&SymbolicPoint::base("zz"), &SymbolicPoint::base("p")).is_err());
}
