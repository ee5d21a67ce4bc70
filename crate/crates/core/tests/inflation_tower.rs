use forge_core::coded::{find_marker, CodePair, SubexponentialSpec};
use forge_core::error::ForgeError;
use forge_core::rotation::RotationNumber;
use forge_core::seed::{Mode, SeedConfig, DEFAULT_DEMO_FACTOR};
use forge_core::tower::{
    build_tower, empirical_ratio, inflate, run_induction, tower_from_seeds, unique_parse, IndexWord, InductionConfig, SamplePoint,
    RATIO_FLOOR,
};
use forge_core::words::BinaryWord;
use proptest::prelude::*;

fn demo_cfg(depth: u32) -> InductionConfig {
    InductionConfig::new(depth, SeedConfig::demo(DEFAULT_DEMO_FACTOR), SubexponentialSpec::Poly { degree: 0 })
}

fn toy_code(a: u32, b: u32, l: usize) -> Option<CodePair> {
    let bits = |p: u32| -> Vec<u8> { (0..l).map(|i| ((p >> (l - 1 - i)) & 1) as u8).collect() };
    let (m, off) = find_marker(&bits(a), &bits(b), l + 1)?;
    let w = |v: Vec<u8>| BinaryWord::new(v).unwrap();
    CodePair::new(w(bits(a)), w(bits(b)), w(m), off as u64, "toy").ok()
}

#[test]
fn demo_depth_one_passes_and_orders_scales() {
    let rot = RotationNumber::default_alpha(11);
    let mut cfg = demo_cfg(1);
    cfg.round_trips = 200;
    let (tower, levels) = run_induction(&rot, &cfg).unwrap();
    assert_eq!(levels.len(), 1);
    let a = &levels[0];
    assert!(a.all_pass(), "{:?}", a.failures());
    assert_eq!(a.mode, Mode::Demo);
    assert!(a.n_k < a.big_n_k && a.big_n_k < a.codeword_bits);
    assert_eq!(a.n_k, 1);
    assert_eq!(a.big_n_k, 3511);
    assert_eq!(a.codeword_bits, 1_064_700);
    for r in &a.ratio_measurements {
        assert!(r.ratio > RATIO_FLOOR && r.ratio <= 1.0);
    }

    // the stored seeds rebuild the same tower
    let seeds = tower.levels.iter().map(|l| l.seed.clone()).collect();
    assert_eq!(tower_from_seeds(seeds, &cfg.sequence).unwrap(), tower);
}

#[test]
fn depth_caps_by_mode() {
    let rot = RotationNumber::default_alpha(11);
    let strict = InductionConfig::new(3, SeedConfig::strict(), SubexponentialSpec::Poly { degree: 2 });
    assert!(matches!(build_tower(&rot, &strict), Err(ForgeError::InvalidInput(_))));
    assert!(matches!(build_tower(&rot, &demo_cfg(5)), Err(ForgeError::InvalidInput(_))));
    assert!(matches!(build_tower(&rot, &demo_cfg(0)), Err(ForgeError::InvalidInput(_))));
}

#[test]
fn point_prefixes_are_deterministic() {
    let rot = RotationNumber::default_alpha(11);
    let tower = build_tower(&rot, &demo_cfg(1)).unwrap();
    let a = SamplePoint::for_seed(&tower, 9).units(&tower, 0, 50_000).unwrap();
    let b = SamplePoint::for_seed(&tower, 9).units(&tower, 0, 50_000).unwrap();
    assert_eq!(a, b);
    // the point reads as a concatenation of the level-1 codewords
    let (u, v) = tower.bit_codewords(1).unwrap();
    assert_eq!(u.len(), 1_064_700);
    assert_ne!(u, v);
}

#[test]
fn index_words_agree_with_their_materialization() {
    for k in 1..=6u32 {
        for reversed in [false, true] {
            let iw = IndexWord::Patterns { k, reversed };
            let m = iw.materialize().unwrap();
            assert_eq!(m.len() as u128, iw.len());
            for i in 0..m.len() {
                assert_eq!(iw.letter(i as u128), m.letter(i));
            }
        }
    }
}

#[test]
fn empirical_frequencies_sum_to_one() {
    let text: Vec<u8> = (0..20_000u32).map(|i| ((i * 7 + i / 3) % 5 < 2) as u8).collect();
    let m = empirical_ratio(&text, 4, 10_000).unwrap();
    let total: u64 = m.counts.iter().map(|c| c.1).sum();
    assert_eq!(total, 10_000);
    assert_eq!(m.distinct, m.counts.len());
    assert!((m.ratio - m.min_freq / m.max_freq).abs() < 1e-12);
    assert!(empirical_ratio(&text, 4, 20_000).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_inverts_inflate(l in 3usize..8, a in 0u32..256, b in 0u32..256, stream in prop::collection::vec(0u8..2, 3..20), cut in 0usize..8) {
        let (a, b) = (a % (1 << l), b % (1 << l));
        prop_assume!(a != b);
        let Some(code) = toy_code(a, b, l) else { return Ok(()) };
        let word = inflate(&code, &stream);
        let r = cut % l;
        let parse = unique_parse(&word.as_slice()[r..], &code).unwrap();
        prop_assert_eq!(parse.phase as usize, r);
        prop_assert_eq!(parse.blocks.len(), stream.len());
        for (i, (got, want)) in parse.blocks.iter().zip(&stream).enumerate() {
            match got {
                Some(g) => prop_assert_eq!(g, want),
                None => prop_assert!(i == 0 && r > 0 || i + 1 == stream.len()),
            }
        }
    }
}
