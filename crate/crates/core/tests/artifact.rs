use forge_core::artifact::{verify, ArtifactFile, FORMAT_VERSION};
use forge_core::coded::SubexponentialSpec;
use forge_core::error::ForgeError;
use forge_core::rotation::RotationNumber;
use forge_core::seed::{SeedConfig, DEFAULT_DEMO_FACTOR};
use forge_core::tower::{run_induction, InductionConfig};

fn demo_artifact() -> ArtifactFile {
    let rot = RotationNumber::default_alpha(11);
    let mut cfg = InductionConfig::new(1, SeedConfig::demo(DEFAULT_DEMO_FACTOR), SubexponentialSpec::Poly { degree: 0 });
    cfg.round_trips = 100;
    let (tower, levels) = run_induction(&rot, &cfg).unwrap();
    ArtifactFile::new(&rot, &cfg, &tower, levels)
}

#[test]
fn save_load_verify() {
    let art = demo_artifact();
    assert!(art.all_pass);
    assert_eq!(art.format_version, FORMAT_VERSION);
    assert_eq!(art.rotation().unwrap(), RotationNumber::default_alpha(11));
    assert!(!art.summary.is_empty() && art.summary.iter().all(|c| c.pass));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    art.save(&path).unwrap();
    let back = ArtifactFile::load(&path).unwrap();
    assert_eq!(back, art);
    let report = verify(&back).unwrap();
    assert!(report.pass(), "{:?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());

    // a changed configuration no longer reproduces the stored levels
    let mut edited = back.clone();
    edited.provenance.config.rng_seed += 1;
    assert!(!verify(&edited).unwrap().pass());

    // corrupt files are refused on load
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(matches!(ArtifactFile::load(&path), Err(e) if e.exit_code() == 2));
    let mut bad = art.clone();
    bad.seeds.clear();
    bad.save(&path).unwrap();
    assert!(matches!(ArtifactFile::load(&path), Err(ForgeError::InvalidInput(_))));
}
