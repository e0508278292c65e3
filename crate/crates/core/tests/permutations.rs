use proptest::prelude::*;
use starperm::pattern::{avoids_123, occurrences};
use starperm::perm::{normalize, Extremum, Style};
use starperm::Permutation;

fn perm(max: usize) -> impl Strategy<Value = Permutation> {
    (0..=max)
        .prop_flat_map(|n| Just((1..=n as u8).collect::<Vec<u8>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_values(&v).unwrap())
}

fn order_isomorphic(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && (0..a.len()).all(|x| (0..a.len()).all(|y| (a[x] < a[y]) == (b[x] < b[y])))
}

/// Every index subset of the right size, by bitmask.
fn brute_occurrences(p: &Permutation, pat: &Permutation) -> Vec<Vec<usize>> {
    let n = p.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != pat.len() {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let vals: Vec<u8> = idx.iter().map(|&i| p.values()[i]).collect();
        if order_isomorphic(&vals, pat.values()) {
            out.push(idx.iter().map(|i| i + 1).collect());
        }
    }
    out.sort();
    out
}

proptest! {
    #[test]
    fn separated_text_round_trips(p in perm(12)) {
        let text = p.format(Style::Separated).unwrap();
        prop_assert_eq!(text.parse::<Permutation>().unwrap(), p.clone());
        prop_assert_eq!(p.to_string().parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn compact_text_round_trips(p in perm(9)) {
        let text = p.format(Style::Compact).unwrap();
        prop_assert_eq!(text.parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn reverse_complement_is_an_involution(p in perm(12)) {
        let rc = p.reverse_complement();
        prop_assert_eq!(rc.len(), p.len());
        prop_assert_eq!(rc.reverse_complement(), p);
    }

    #[test]
    fn normalize_preserves_order(v in proptest::collection::btree_set(1u64..1000, 0..12)
        .prop_flat_map(|s| Just(s.into_iter().collect::<Vec<_>>()).prop_shuffle()))
    {
        let p = normalize(&v).unwrap();
        let ranks: Vec<u64> = p.values().iter().map(|&x| x as u64).collect();
        prop_assert!((0..v.len()).all(|x| (0..v.len()).all(|y| (v[x] < v[y]) == (ranks[x] < ranks[y]))));
        prop_assert_eq!(normalize(p.values()).unwrap(), p);
    }

    #[test]
    fn occurrences_match_subset_search(p in perm(8), q in perm(4)) {
        prop_assert_eq!(occurrences(&p, &q), brute_occurrences(&p, &q));
    }

    #[test]
    fn avoidance_matches_occurrences(p in perm(10)) {
        let pat: Permutation = "123".parse().unwrap();
        prop_assert_eq!(avoids_123(&p), occurrences(&p, &pat).is_empty());
    }

    #[test]
    fn left_to_right_minima(p in perm(12)) {
        let v = p.values();
        let expect: Vec<usize> = (0..v.len())
            .filter(|&i| v[..i].iter().all(|&x| x > v[i]))
            .map(|i| i + 1)
            .collect();
        let got = p.extrema_positions(Extremum::LrMin);
        prop_assert_eq!(&got, &expect);
        if !p.is_empty() {
            prop_assert_eq!(got[0], 1);
            prop_assert_eq!(p.at(*got.last().unwrap()), 1);
        }
        // right-to-left maxima are the reverse complement's left-to-right minima
        let n = p.len();
        let mut mirrored: Vec<usize> = p
            .reverse_complement()
            .extrema_positions(Extremum::LrMin)
            .into_iter()
            .map(|i| n + 1 - i)
            .collect();
        mirrored.sort();
        prop_assert_eq!(p.extrema_positions(Extremum::RlMax), mirrored);
    }
}

#[test]
fn identities_are_monotone() {
    for n in 0..=12 {
        assert!(Permutation::identity(n).is_identity());
        assert!(Permutation::reverse_identity(n).is_reverse_identity());
        assert_eq!(
            Permutation::identity(n).is_reverse_identity(),
            n <= 1,
            "length {n}"
        );
    }
}
