use forge_core::rotation::RotationNumber;
use forge_core::spectrum::{eigenvalues, gap_report, interlaces, period_two_bands, truncation, DEFAULT_TOL};
use forge_core::sturmian::code_origin;
use proptest::prelude::*;

#[test]
fn sturmian_potential_spectrum() {
    let prefix = code_origin(&RotationNumber::default_alpha(11), 400).unwrap();
    let p = prefix.as_slice();
    let mut prev = eigenvalues(&truncation(p, 0, 99).unwrap(), DEFAULT_TOL).unwrap();
    for n in 100..=110 {
        let ev = eigenvalues(&truncation(p, 0, n).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(ev.len(), n);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        assert!(ev.iter().all(|&e| (-3.0..=3.0).contains(&e)));
        assert!(interlaces(&prev, &ev, 2.0 * DEFAULT_TOL));
        // trace is the number of ones on the diagonal
        let trace: f64 = ev.iter().sum();
        let ones = p[..n].iter().filter(|&&c| c == 1).count() as f64;
        assert!((trace - ones).abs() < 1e-6);
        prev = ev;
    }
}

#[test]
fn period_two_gap_from_both_phases() {
    let even: Vec<u8> = (0..500).map(|i| (i % 2) as u8).collect();
    let [(_, b0), (b1, _)] = period_two_bands(0.0, 1.0);
    let ra = gap_report(&even, &[99, 199, 399], DEFAULT_TOL, 1e-3).unwrap();
    let rb = gap_report(&even[1..], &[99, 199, 399], DEFAULT_TOL, 1e-3).unwrap();
    let ga = ra.gap_within(b0 + 0.1, b1 - 0.1).unwrap();
    let gb = rb.gap_within(b0 + 0.1, b1 - 0.1).unwrap();
    assert!((ga.left - b0).abs() < 1e-6, "{ga:?}");
    assert!((gb.right - b1).abs() < 1e-6, "{gb:?}");
    assert!(ra.heuristic && rb.heuristic);
}

#[test]
fn bad_inputs() {
    assert!(gap_report(&[0, 1, 0], &[2, 2], DEFAULT_TOL, 0.1).is_err());
    assert!(gap_report(&[0, 1, 0], &[2, 4], DEFAULT_TOL, 0.1).is_err());
    assert!(gap_report(&[0, 1, 0], &[2], DEFAULT_TOL, 0.0).is_err());
    assert!(gap_report(&[0, 1, 0], &[2], -1.0, 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalue_count_matches_sturm_counts(bits in prop::collection::vec(0u8..2, 1..60)) {
        let m = truncation(&bits, 0, bits.len()).unwrap();
        let ev = eigenvalues(&m, 1e-11).unwrap();
        prop_assert_eq!(ev.len(), bits.len());
        for (k, &e) in ev.iter().enumerate() {
            prop_assert!(m.count_below(e - 1e-9) <= k);
            prop_assert!(m.count_below(e + 1e-9) > k);
        }
    }
}
