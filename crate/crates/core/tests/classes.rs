use std::collections::{BTreeMap, BTreeSet};

use starperm::classify::{
    classify_decreasing, p_canonical, primitive, shift_label, switch_canonical, FiveClass, Gamma,
    ShiftLabel,
};
use starperm::explore::enumerate_permutations;
use starperm::pattern::avoids_123;
use starperm::{signature_of, Category, ClassSignature, Permutation, Rule};

fn all_upto(n: usize) -> Vec<Permutation> {
    enumerate_permutations(n).unwrap().collect()
}

fn p(s: &str) -> Permutation {
    s.parse().unwrap()
}

#[test]
fn signatures_are_constant_across_moves() {
    for rule in Rule::all() {
        for q in all_upto(6) {
            let sig = signature_of(&rule, &q);
            let (down, up) = rule.neighbors(&q);
            for n in down.iter().chain(&up) {
                assert_eq!(signature_of(&rule, n), sig, "{}: {q} vs {n}", rule.text());
            }
        }
    }
}

#[test]
fn leftmost_reduction_is_invariant_under_one_drop() {
    for gamma in [Gamma::DropLargest, Gamma::DropMiddle] {
        let rule = gamma.rule();
        for q in all_upto(7) {
            let canon = p_canonical(&q, gamma);
            assert!(avoids_123(&canon));
            for m in rule.forward_sites(&q) {
                let next = rule.apply_forward(&q, m).unwrap();
                assert_eq!(
                    p_canonical(&next, gamma),
                    canon,
                    "{} step from {q}",
                    rule.text()
                );
            }
        }
    }
}

/// Every reduction order reaches the same avoider.
fn all_endpoints(
    rule: &Rule,
    q: &Permutation,
    memo: &mut BTreeMap<Permutation, BTreeSet<Permutation>>,
) -> BTreeSet<Permutation> {
    if let Some(ends) = memo.get(q) {
        return ends.clone();
    }
    let down = rule.down(q);
    let ends = if down.is_empty() {
        BTreeSet::from([q.clone()])
    } else {
        down.iter()
            .flat_map(|n| all_endpoints(rule, n, memo))
            .collect()
    };
    memo.insert(q.clone(), ends.clone());
    ends
}

#[test]
fn drop_only_reduction_is_confluent() {
    for rule in Rule::all()
        .into_iter()
        .filter(|r| r.category() == Category::DropOnly)
    {
        let mut memo = BTreeMap::new();
        for q in all_upto(7) {
            let ends = all_endpoints(&rule, &q, &mut memo);
            assert_eq!(ends.len(), 1, "{} on {q}: {ends:?}", rule.text());
            assert_eq!(ends.first(), Some(&primitive(&q, &rule).unwrap()));
        }
    }
}

#[test]
fn signatures_commute_with_reverse_complement() {
    for rule in Rule::all() {
        let twin = rule.reverse_complement();
        for q in all_upto(7) {
            assert_eq!(
                signature_of(&twin, &q.reverse_complement()),
                signature_of(&rule, &q).reverse_complement(),
                "{} on {q}",
                rule.text()
            );
        }
    }
}

#[test]
fn canonical_member_is_shortest_in_its_signature() {
    for rule in Rule::all()
        .into_iter()
        .filter(|r| r.category() == Category::SwitchNeighborDrop)
    {
        let mut shortest: BTreeMap<ClassSignature, BTreeSet<Permutation>> = BTreeMap::new();
        for q in all_upto(7) {
            let sig = signature_of(&rule, &q);
            let entry = shortest.entry(sig).or_default();
            if entry.first().is_none_or(|f| f.len() == q.len()) {
                entry.insert(q);
            }
        }
        for (sig, members) in shortest {
            if let ClassSignature::SwitchTriple(t) = sig {
                if t.m < 6 {
                    assert_eq!(members.len(), 1, "{} {t}", rule.text());
                    let canon = switch_canonical(t, &rule).unwrap();
                    assert_eq!(Some(&canon), members.first(), "{} {t}", rule.text());
                }
            }
        }
    }
}

#[test]
fn avoiders_are_counted_by_catalan_numbers() {
    let mut counts = [0u64; 9];
    for q in all_upto(8) {
        if avoids_123(&q) {
            counts[q.len()] += 1;
        }
    }
    // C(n) = C(2n, n) / (n + 1)
    let catalan: Vec<u64> = (0..=8u64)
        .map(|n| (0..n).fold(1u64, |acc, i| acc * (2 * n - i) / (i + 1)) / (n + 1))
        .collect();
    assert_eq!(counts.to_vec(), catalan);
}

#[test]
fn five_class_sizes_up_to_five() {
    let mut sizes: BTreeMap<FiveClass, usize> = BTreeMap::new();
    for q in all_upto(5) {
        *sizes.entry(classify_decreasing(&q)).or_default() += 1;
    }
    assert_eq!(sizes[&FiveClass::Empty], 1);
    assert_eq!(sizes[&FiveClass::One], 1);
    assert_eq!(sizes[&FiveClass::Twelve], 1);
    assert_eq!(sizes[&FiveClass::Pair], 2);
    assert_eq!(sizes[&FiveClass::Bulk], 154 - 5);
}

#[test]
fn shift_labels() {
    assert_eq!(shift_label(&p("321")), ShiftLabel::ReverseIdentity(3));
    assert_eq!(shift_label(&p("e")), ShiftLabel::ReverseIdentity(0));
    assert_eq!(shift_label(&p("231")), ShiftLabel::Bulk);
}
