use forge_core::rotation::{find_balanced_scales, gap_spectrum, GapSpectrum, RotationNumber};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn lengths(s: &GapSpectrum) -> Vec<(BigRational, u64)> {
    s.gaps.iter().map(|g| (g.length.clone(), g.multiplicity)).collect()
}

#[test]
fn one_point_leaves_one_arc() {
    let s = gap_spectrum(&RotationNumber::default_alpha(11), 1).unwrap();
    assert_eq!(s.gaps.len(), 1);
    assert!(s.gaps[0].length.is_one());
}

#[test]
fn two_points_cut_alpha_and_its_complement() {
    let rot: RotationNumber = "0;2,20,30".parse().unwrap();
    let s = gap_spectrum(&rot, 2).unwrap();
    assert_eq!(s.gaps.len(), 2, "{s:?}");
    // lengths are exact for the working convergent p/q < 1/2, so the short arc is p/q
    let (p, q) = rot.convergents(3).unwrap().into_iter().find(|c| c.1 == s.denominator as u128).unwrap();
    assert_eq!(s.gaps[0].length, BigRational::new(p.into(), q.into()));
    assert_eq!(s.gaps[1].length, BigRational::new((q - p).into(), q.into()));
    assert_eq!(&s.gaps[0].length + &s.gaps[1].length, BigRational::one());
}

#[test]
fn default_alpha_at_500() {
    let s = gap_spectrum(&RotationNumber::default_alpha(11), 500).unwrap();
    assert!(s.distinct_lengths() <= 3);
    assert!(s.satisfies_three_gap());
    assert_eq!(s.gaps.iter().map(|g| g.multiplicity).sum::<u64>(), 500);
}

#[test]
fn malformed_continued_fractions_are_rejected() {
    for bad in ["", "0;", "1;2,3", "0;2,x", "0,2,3", "0;2,0"] {
        assert!(bad.parse::<RotationNumber>().is_err(), "{bad:?}");
    }
    let ok: RotationNumber = "0;2,20,30".parse().unwrap();
    assert_eq!(ok.to_string(), "0;2,20,30");
}

#[test]
fn balanced_scales_for_default_alpha() {
    let eps = BigRational::new(BigInt::from(1), BigInt::from(8));
    let certs = find_balanced_scales(&RotationNumber::default_alpha(11), &eps, 3, 1, 200_000).unwrap();
    assert_eq!(certs.iter().map(|c| c.n).collect::<Vec<_>>(), vec![2, 41, 1232]);
    assert_eq!(certs.iter().map(|c| c.word_scale()).collect::<Vec<_>>(), vec![1, 40, 1231]);
    for c in &certs {
        assert!(c.is_valid());
        assert_eq!(c.ratio, &c.min_gap / &c.max_gap);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_a_point_splits_one_arc(q in prop::collection::vec(1u64..25, 8..14), n in 2u64..300) {
        let rot = RotationNumber::new(q).unwrap();
        let a = gap_spectrum(&rot, n - 1).unwrap();
        let b = gap_spectrum(&rot, n).unwrap();
        prop_assert_eq!(a.total_length(), BigRational::one());
        prop_assert_eq!(b.total_length(), BigRational::one());
        prop_assert!(b.satisfies_three_gap());
        prop_assume!(a.denominator == b.denominator);
        // in the same units, b = a − {one arc} + {two arcs summing to it}
        let mut removed = Vec::new();
        let mut added = Vec::new();
        let la = lengths(&a);
        let lb = lengths(&b);
        let all: std::collections::BTreeSet<BigRational> = la.iter().chain(&lb).map(|x| x.0.clone()).collect();
        for len in all {
            let ca = la.iter().find(|x| x.0 == len).map_or(0, |x| x.1) as i64;
            let cb = lb.iter().find(|x| x.0 == len).map_or(0, |x| x.1) as i64;
            for _ in 0..(ca - cb).max(0) { removed.push(len.clone()); }
            for _ in 0..(cb - ca).max(0) { added.push(len.clone()); }
        }
        prop_assert_eq!(removed.len(), 1);
        prop_assert_eq!(added.len(), 2);
        prop_assert_eq!(&added[0] + &added[1], removed[0].clone());
    }

    #[test]
    fn doubling_across_one_step(q in prop::collection::vec(1u64..25, 8..14), n in 3u64..300) {
        let rot = RotationNumber::new(q).unwrap();
        let a = gap_spectrum(&rot, n - 1).unwrap();
        let b = gap_spectrum(&rot, n).unwrap();
        prop_assert!(a.max_gap() <= &(b.max_gap() * BigRational::from_integer(2.into())));
        prop_assert!(a.min_gap() >= b.min_gap());
    }
}
