use std::collections::BTreeSet;

use forge_core::words::{covering_pair, is_subword, minimal_period, occurrences, BinaryWord, FactorTable};
use proptest::prelude::*;

fn w(s: &str) -> BinaryWord {
    s.parse().unwrap()
}

fn naive_occurrences(needle: &[u8], hay: &[u8]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return vec![];
    }
    (0..=hay.len() - needle.len()).filter(|&i| &hay[i..i + needle.len()] == needle).collect()
}

#[test]
fn parse_and_display() {
    assert_eq!(w("0110").to_string(), "0110");
    assert!("012".parse::<BinaryWord>().is_err());
    assert_eq!(minimal_period(w("010010").as_slice()), 3);
}

#[test]
fn covering_pair_contains_every_target_word() {
    let (s, t) = (w("0010"), w("0110"));
    for m in 1..=7usize {
        // every length-m factor of every concatenation of s and t
        let mut target = BTreeSet::new();
        let k = m.div_ceil(4) + 1;
        for p in 0..1u32 << k {
            let text: Vec<u8> = (0..k).flat_map(|j| if (p >> j) & 1 == 0 { s.as_slice() } else { t.as_slice() }).copied().collect();
            for f in text.windows(m) {
                target.insert(BinaryWord::new(f.to_vec()).unwrap());
            }
        }
        let (u, v) = covering_pair(&s, &t, m, &target).unwrap();
        assert_eq!(u.len(), v.len());
        assert_ne!(u, v);
        for word in [&u, &v] {
            assert_eq!(word.len() % 4, 0);
            for x in &target {
                assert!(!naive_occurrences(x.as_slice(), word.as_slice()).is_empty(), "m = {m}: {x} missing");
            }
        }
    }
}

proptest! {
    #[test]
    fn occurrences_agree_with_naive_scan(needle in prop::collection::vec(0u8..2, 1..8), hay in prop::collection::vec(0u8..2, 0..200)) {
        let got = occurrences(&needle, &hay);
        prop_assert_eq!(&got, &naive_occurrences(&needle, &hay));
        prop_assert_eq!(is_subword(&needle, &hay), !got.is_empty());
    }

    #[test]
    fn minimal_period_is_the_least_period(v in prop::collection::vec(0u8..2, 1..=64)) {
        let p = minimal_period(&v);
        prop_assert!((0..v.len() - p).all(|i| v[i] == v[i + p]));
        for q in 1..p {
            prop_assert!((0..v.len() - q).any(|i| v[i] != v[i + q]));
        }
    }

    #[test]
    fn factor_table_counts_every_window(v in prop::collection::vec(0u8..2, 1..300), len in 1usize..10) {
        prop_assume!(len <= v.len());
        let table = FactorTable::scan(&v, len);
        prop_assert_eq!(table.total_windows(), (v.len() - len + 1) as u64);
        let distinct: BTreeSet<&[u8]> = v.windows(len).collect();
        prop_assert_eq!(table.distinct(), distinct.len());
        for f in distinct {
            prop_assert_eq!(table.get(f).unwrap().count as usize, naive_occurrences(f, &v).len());
        }
    }
}
