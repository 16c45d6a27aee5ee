mod oracles;

use std::collections::BTreeSet;
use std::sync::Arc;

use dynpair::assign::{asy_pairs, ie_pairs, ie_status, rp_pairs};
use dynpair::symbolic::build_edge_shift;
use dynpair::{BlockRelation, EdgeShift, IeParams, PairStatus, SftSpec};
use num_rational::Ratio;
use oracles::{Sft, CORPUS};

fn shift(name: &str) -> Arc<EdgeShift> {
    let (_, a, f) = oracles::corpus_entry(name);
    Arc::new(build_edge_shift(&SftSpec::new(a.chars().collect(), f).unwrap()))
}

fn rendered(r: &BlockRelation) -> BTreeSet<(String, String)> {
    let s = r.shift();
    r.pairs().iter().map(|(u, v)| (s.render(u), s.render(v))).collect()
}

fn small_corpus() -> impl Iterator<Item = &'static str> {
    CORPUS
        .iter()
        .map(|(n, _, _)| *n)
        .filter(|n| shift(n).num_states() <= 4)
}

#[test]
fn rp_matches_word_oracle() {
    for name in small_corpus() {
        let s = shift(name);
        let o = Sft::from_corpus(name);
        for k in 0..=2 {
            let engine = rendered(&rp_pairs(&s, k).unwrap().relation);
            assert_eq!(engine, o.rp_pairs(k, 32), "{name} k={k}");
        }
    }
}

#[test]
fn asy_matches_word_oracle() {
    for name in small_corpus() {
        let s = shift(name);
        let o = Sft::from_corpus(name);
        for k in 0..=2 {
            let engine = rendered(&asy_pairs(&s, k).unwrap().relation);
            assert_eq!(engine, o.asy_pairs(k, 32), "{name} k={k}");
        }
    }
}

/// Pairs of blocks read by two periodic points of period at most 8 that
/// share a window within 32 steps.
fn periodic_rp(o: &Sft, k: usize) -> BTreeSet<(String, String)> {
    let len = 2 * k + 1;
    let mut points = Vec::new();
    for q in 1..=8 {
        for p in o.all_strings(q) {
            let unrolled: String = p.repeat(64 / q + 2);
            if o.locally_allowed(&unrolled) {
                points.push(unrolled);
            }
        }
    }
    let window = |x: &str, i: usize| x[i..i + len].to_string();
    let mut out = BTreeSet::new();
    for n in 0..=32 {
        let mut groups: std::collections::BTreeMap<String, BTreeSet<String>> = Default::default();
        for x in &points {
            groups.entry(window(x, n)).or_default().insert(window(x, 0));
        }
        for starts in groups.values() {
            for a in starts {
                for b in starts {
                    out.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    out
}

#[test]
fn periodic_witnesses_are_found() {
    for name in small_corpus() {
        let s = shift(name);
        let o = Sft::from_corpus(name);
        for k in 0..=2 {
            let engine = rendered(&rp_pairs(&s, k).unwrap().relation);
            assert!(periodic_rp(&o, k).is_subset(&engine), "{name} k={k}");
        }
    }
}

#[test]
fn structural_properties() {
    for (name, _, _) in CORPUS {
        let s = shift(name);
        for k in 0..=2 {
            let rp = rp_pairs(&s, k).unwrap().relation;
            let asy = asy_pairs(&s, k).unwrap().relation;
            let diag = BlockRelation::diagonal(s.clone(), k);
            assert!(rp.is_symmetric() && asy.is_symmetric(), "{name}");
            assert_eq!(diag.is_subset(&asy), Some(true), "{name}");
            assert_eq!(asy.is_subset(&rp), Some(true), "{name}");
            let next_rp = rp_pairs(&s, k + 1).unwrap().relation.truncate().unwrap();
            assert_eq!(next_rp.is_subset(&rp), Some(true), "{name}");
            let next_asy = asy_pairs(&s, k + 1).unwrap().relation.truncate().unwrap();
            assert_eq!(next_asy.is_subset(&asy), Some(true), "{name}");
        }
    }
}

#[test]
fn ie_examples() {
    let p = IeParams::default();
    assert_eq!(ie_status(&shift("full2"), &[0], &[1], &p), PairStatus::CertifiedIe { gap: 1 });
    assert_eq!(ie_status(&shift("golden"), &[0], &[0], &p), PairStatus::CertifiedIe { gap: 2 });
    let twofix = ie_status(&shift("twofix"), &[0], &[1], &p);
    assert_eq!(twofix, PairStatus::RefutedAtHorizon(8));
    assert_eq!(p.required_size(8), 2);
}

fn placements(o: &Sft, u: &str, v: &str, gap: usize, m: usize) -> bool {
    let len = u.len();
    (0..1u32 << m).all(|mask| {
        let mut pat = vec![None; (m - 1) * gap + len];
        for j in 0..m {
            let w = if mask >> j & 1 == 0 { u } else { v };
            for (i, c) in w.chars().enumerate() {
                pat[j * gap + i] = Some(c);
            }
        }
        o.pattern_realizable(&pat)
    })
}

#[test]
fn certified_gaps_realize_all_placements() {
    let p = IeParams::default();
    for (name, _, _) in CORPUS {
        let s = shift(name);
        let o = Sft::from_corpus(name);
        for k in 0..=1 {
            let res = ie_pairs(&s, k, &p).unwrap();
            for ((u, v), status) in &res.per_pair {
                if let PairStatus::CertifiedIe { gap } = status {
                    for m in [4, 5] {
                        assert!(placements(&o, &s.render(u), &s.render(v), *gap, m), "{name} {u:?} {v:?} gap {gap} m {m}");
                    }
                }
            }
        }
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if n < size {
        return vec![];
    }
    let mut out = subsets(n - 1, size);
    for mut s in subsets(n - 1, size - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

#[test]
fn refutations_hold_by_brute_force() {
    let p = IeParams::default();
    for (name, _, _) in CORPUS {
        let s = shift(name);
        let o = Sft::from_corpus(name);
        let res = ie_pairs(&s, 0, &p).unwrap();
        for ((u, v), status) in &res.per_pair {
            let PairStatus::RefutedAtHorizon(l) = status else { continue };
            let (u, v) = (s.render(u), s.render(v));
            for set in subsets(*l, p.required_size(*l)) {
                let independent = (0..1u32 << set.len()).all(|mask| {
                    let mut pat = vec![None; l + 1];
                    for (j, &pos) in set.iter().enumerate() {
                        let w = if mask >> j & 1 == 0 { &u } else { &v };
                        pat[pos] = w.chars().next();
                    }
                    o.pattern_realizable(&pat)
                });
                assert!(!independent, "{name} ({u},{v}) {set:?}");
            }
        }
    }
}

#[test]
fn larger_budgets_only_resolve_more() {
    let small = IeParams::default();
    let big = IeParams {
        horizon: 16,
        ..IeParams::default()
    };
    for (name, _, _) in CORPUS {
        let s = shift(name);
        for k in 0..=1 {
            let a = ie_pairs(&s, k, &small).unwrap();
            let b = ie_pairs(&s, k, &big).unwrap();
            for (pair, sa) in &a.per_pair {
                let sb = &b.per_pair[pair];
                match (sa, sb) {
                    (PairStatus::CertifiedIe { .. }, other) => {
                        assert!(matches!(other, PairStatus::CertifiedIe { .. }), "{name}")
                    }
                    (PairStatus::RefutedAtHorizon(_), PairStatus::CertifiedIe { .. }) => panic!("{name}: contradiction"),
                    _ => {}
                }
            }
        }
    }
}

#[test]
fn density_changes_required_size() {
    let p = IeParams {
        density: Ratio::new(1, 3),
        ..IeParams::default()
    };
    assert_eq!(p.required_size(9), 3);
    assert_eq!(p.required_size(10), 4);
}
