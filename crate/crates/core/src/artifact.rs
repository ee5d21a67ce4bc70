//! The artifact file written by `construct` and re-checked by `verify`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::rotation::RotationNumber;
use crate::seed::{self, build_seed, Mode, NamedCheck, SeedArtifact};
use crate::tower::{check_tower, level_scales, tower_from_seeds, InductionConfig, LevelArtifact, Tower};
use crate::words;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch. The only field that differs between identical runs.
    pub timestamp: u64,
    pub config: InductionConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub level: u32,
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactFile {
    pub format_version: u32,
    /// Partial quotients a_1, a_2, ... of the rotation number.
    pub rotation: Vec<u64>,
    pub mode: Mode,
    pub sequence: String,
    pub seeds: Vec<SeedArtifact>,
    pub levels: Vec<LevelArtifact>,
    pub summary: Vec<CheckSummary>,
    pub all_pass: bool,
    pub provenance: Provenance,
}

fn summarize(levels: &[LevelArtifact]) -> Vec<CheckSummary> {
    let mut out = Vec::new();
    for a in levels {
        for c in &a.checks {
            out.push(CheckSummary { level: a.k, name: c.name.clone(), pass: c.pass });
        }
        for r in &a.ratio_measurements {
            out.push(CheckSummary { level: a.k, name: format!("ratio_{}_{}_{}", r.role, r.j, r.scale), pass: r.pass });
        }
        for c in &a.complexity_checks {
            out.push(CheckSummary { level: a.k, name: format!("complexity_N{}", c.j), pass: c.pass });
        }
    }
    out
}

impl ArtifactFile {
    pub fn new(rot: &RotationNumber, cfg: &InductionConfig, tower: &Tower, levels: Vec<LevelArtifact>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ArtifactFile {
            format_version: FORMAT_VERSION,
            rotation: rot.partial_quotients()[1..].to_vec(),
            mode: cfg.seed.mode,
            sequence: cfg.sequence.to_string(),
            seeds: tower.levels.iter().map(|l| l.seed.clone()).collect(),
            summary: summarize(&levels),
            all_pass: levels.iter().all(LevelArtifact::all_pass),
            levels,
            provenance: Provenance {
                tool: "forge".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                timestamp,
                config: cfg.clone(),
            },
        }
    }

    pub fn rotation(&self) -> Result<RotationNumber> {
        RotationNumber::new(self.rotation.clone())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Parses the file and runs the cheap structural checks; refuses anything malformed.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let art: ArtifactFile = serde_json::from_str(&text)?;
        if art.format_version != FORMAT_VERSION {
            return Err(ForgeError::InvalidInput(format!("unsupported format version {}", art.format_version)));
        }
        if art.seeds.is_empty() || art.seeds.len() != art.levels.len() {
            return Err(ForgeError::InvalidInput("artifact must hold one seed per level".into()));
        }
        for (i, s) in art.seeds.iter().enumerate() {
            if s.s.len() != s.t.len() || s.s.is_empty() {
                return Err(ForgeError::InvalidInput(format!("seed {} has codewords of different lengths", i + 1)));
            }
        }
        Ok(art)
    }

    /// Rebuilds the tower from the stored seeds.
    pub fn tower(&self) -> Result<Tower> {
        tower_from_seeds(self.seeds.clone(), &self.provenance.config.sequence)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<NamedCheck>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Recomputes everything recorded in the artifact: the seeds from the rotation number, each
/// seed's certificates from its stored words, and every level check from the rebuilt tower.
pub fn verify(art: &ArtifactFile) -> Result<VerifyReport> {
    let rot = art.rotation()?;
    let cfg = &art.provenance.config;
    let mut checks = Vec::new();
    checks.push(NamedCheck::new(
        "sequence_matches_config",
        art.sequence == cfg.sequence.to_string(),
        art.sequence.clone(),
    ));
    let certs = level_scales(&rot, cfg)?;
    let mut seeds_ok = true;
    for (i, stored) in art.seeds.iter().enumerate() {
        let k = i + 1;
        for c in seed::reverify(stored)? {
            seeds_ok &= c.pass;
            checks.push(NamedCheck::new(&format!("seed_{k}_{}", c.name), c.pass, c.detail));
        }
        let same = match certs.get(i) {
            Some(cert) => build_seed(&rot, cert, &cfg.seed).map(|s| s == *stored).unwrap_or(false),
            None => false,
        };
        seeds_ok &= same;
        checks.push(NamedCheck::new(&format!("seed_{k}_rebuilds"), same, "seed equals a fresh build from the rotation number"));
        let sw = stored.s.as_slice();
        let tw = stored.t.as_slice();
        checks.push(NamedCheck::new(
            &format!("seed_{k}_codewords_differ"),
            words::lcp(sw, tw) < sw.len(),
            "s ≠ t",
        ));
    }
    if !seeds_ok {
        return Ok(VerifyReport { checks });
    }
    let tower = art.tower()?;
    let levels = check_tower(&tower, cfg)?;
    for (fresh, stored) in levels.iter().zip(&art.levels) {
        checks.push(NamedCheck::new(
            &format!("level_{}_matches", fresh.k),
            fresh == stored,
            "recomputed level artifact equals the stored one",
        ));
        checks.push(NamedCheck::new(&format!("level_{}_passes", fresh.k), fresh.all_pass(), fresh.failures().join("; ")));
    }
    checks.push(NamedCheck::new("level_count", levels.len() == art.levels.len(), format!("{} levels", levels.len())));
    Ok(VerifyReport { checks })
}
