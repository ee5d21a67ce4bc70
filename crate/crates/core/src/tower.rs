//! The nested construction. Level k substitutes the codewords of level k − 1 into a seed code
//! (s_k, t_k), picks a complexity scale, and builds the next codewords 0_k, 1_k from star
//! patterns over covering words u_k, v_k.
//!
//! Codewords are implicit: a level only stores its seed, its covering index words and the
//! star patterns, and letters are produced on demand. Explicit copies are made when small.

use std::collections::{hash_map::Entry, HashMap};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coded::{
    big_string, decipher_window, double_parse_search, find_marker, first_scale_above, inflated_count,
    marker_checks, phase_segments, star_pattern, structural_complexity, CodePair, ScaleChoice, SubexponentialSpec,
};
use crate::error::{ForgeError, Result};
use crate::limits;
use crate::rotation::{find_balanced_scales, RotationNumber, ScaleCertificate, DEFAULT_SCAN_BUDGET};
use crate::seed::{self, build_seed, Mode, NamedCheck, SeedArtifact, SeedConfig};
use crate::words::{self, covering_pattern_len, for_each_occurrence, BinaryWord, FactorTable};

/// Blocks per star word.
pub const STAR_BLOCKS: u128 = 21;

/// Codes up to this many letters are also kept explicitly.
pub const EXPLICIT_CODE_CAP: u128 = 1 << 24;

/// Largest covering pattern length for which index words are listed explicitly.
const EXPLICIT_PATTERN_BITS: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IndexWord {
    Explicit { word: BinaryWord },
    /// Every k-bit pattern in increasing order (decreasing when `reversed`), most significant
    /// bit first, followed by the two letters 0 1.
    Patterns { k: u32, reversed: bool },
}

impl IndexWord {
    pub fn len(&self) -> u128 {
        match self {
            IndexWord::Explicit { word } => word.len() as u128,
            IndexWord::Patterns { k, .. } => ((*k as u128) << k) + 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letter(&self, i: u128) -> u8 {
        match self {
            IndexWord::Explicit { word } => word.letter(i as usize),
            IndexWord::Patterns { k, reversed } => {
                let k = *k as u128;
                let body = k << k;
                if i >= body {
                    return (i - body) as u8;
                }
                let p = i / k;
                let val = if *reversed { (1u128 << k) - 1 - p } else { p };
                ((val >> (k - 1 - i % k)) & 1) as u8
            }
        }
    }

    pub fn materialize(&self) -> Result<BinaryWord> {
        let n = limits::check_word_len(self.len(), "index word")?;
        match self {
            IndexWord::Explicit { word } => Ok(word.clone()),
            _ => BinaryWord::new((0..n as u128).map(|i| self.letter(i)).collect()),
        }
    }
}

/// Common prefix and suffix lengths of two distinct index words, by scanning.
fn index_lcp_lcs(a: &IndexWord, b: &IndexWord) -> Result<(u128, u128)> {
    let n = a.len();
    if n != b.len() {
        return Err(ForgeError::Internal("index words of different lengths".into()));
    }
    let mut p = 0;
    while p < n && a.letter(p) == b.letter(p) {
        p += 1;
    }
    if p == n {
        return Err(ForgeError::ConstructionInvalid("covering index words coincide".into()));
    }
    let mut s = 0;
    while a.letter(n - 1 - s) == b.letter(n - 1 - s) {
        s += 1;
    }
    Ok((p, s))
}

fn overflow(what: &str) -> ForgeError {
    ForgeError::Resource(format!("{what} overflows 128-bit arithmetic"))
}

fn to_u64(v: u128, what: &str) -> Result<u64> {
    u64::try_from(v).map_err(|_| ForgeError::Resource(format!("{what} = {v} does not fit in 64 bits")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerLevel {
    pub k: u32,
    pub seed: SeedArtifact,
    /// The seed code (s_k, t_k), over level-(k−1) codeword indices (bits at level 1).
    pub code: CodePair,
    /// Balanced word scale m_k of the seed.
    pub word_scale: u64,
    /// Complexity scale m*_k in letters, with the bit count N_k = unit_bits·m*_k.
    pub choice: ScaleChoice,
    pub cover_k: u32,
    pub u: IndexWord,
    pub v: IndexWord,
    /// Marker over {u, v} for the two star patterns.
    pub star_marker: BinaryWord,
    pub star_marker_offset: u64,
    /// Bits per letter: the length of a level-(k−1) codeword, 1 at level 1.
    #[serde(with = "u128_string")]
    pub unit_bits: u128,
    /// Common prefix and suffix of 0_k and 1_k, in bits.
    #[serde(with = "u128_string")]
    pub lcp_bits: u128,
    #[serde(with = "u128_string")]
    pub lcs_bits: u128,
}

/// Decimal-string serde for u128.
pub mod u128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl TowerLevel {
    pub fn seed_len(&self) -> u128 {
        self.code.block_len() as u128
    }

    /// Letters in u_k (equivalently v_k) after substituting s_k, t_k.
    pub fn uv_letters(&self) -> u128 {
        self.u.len() * self.seed_len()
    }

    pub fn codeword_letters(&self) -> u128 {
        STAR_BLOCKS * self.uv_letters()
    }

    pub fn codeword_bits(&self) -> u128 {
        self.codeword_letters() * self.unit_bits
    }

    /// n_k in bits: the word scale, measured in units of the previous codewords.
    pub fn n_bits(&self) -> u128 {
        if self.k == 1 {
            self.word_scale as u128
        } else {
            self.unit_bits * (self.word_scale as u128 - 1)
        }
    }

    pub fn big_n_bits(&self) -> u128 {
        self.unit_bits * self.choice.m as u128
    }

    /// The two scales named by the substitution lemma, |β|·m and |β|·(m + 1).
    pub fn lemma_scales(&self) -> [u128; 2] {
        [self.unit_bits * self.word_scale as u128, self.unit_bits * (self.word_scale as u128 + 1)]
    }

    fn seed_word(&self, i: u8) -> &BinaryWord {
        self.code.block(i)
    }

    fn uv(&self, i: u8) -> &IndexWord {
        if i == 0 {
            &self.u
        } else {
            &self.v
        }
    }

    /// Appends letters [start, start + len) of codeword `which`.
    fn emit_letters(&self, which: u8, start: u128, len: u128, out: &mut Vec<u8>) {
        let pattern = star_pattern(which);
        let sl = self.seed_len();
        let block = self.uv_letters();
        let mut pos = start;
        let end = start + len;
        while pos < end {
            let uv = self.uv(pattern[(pos / block) as usize]);
            let idx = uv.letter((pos % block) / sl);
            let off = (pos % sl) as usize;
            let take = ((end - pos) as usize).min(sl as usize - off);
            out.extend_from_slice(&self.seed_word(idx).as_slice()[off..off + take]);
            pos += take as u128;
        }
    }

    /// Codeword `which` over {s_k, t_k}: the star pattern with u, v substituted.
    pub fn index_codeword(&self, which: u8) -> Result<BinaryWord> {
        let n = limits::check_word_len(STAR_BLOCKS * self.u.len(), "index codeword")?;
        let u = self.u.materialize()?;
        let v = self.v.materialize()?;
        let mut out = Vec::with_capacity(n);
        for b in star_pattern(which) {
            out.extend_from_slice(if b == 0 { u.as_slice() } else { v.as_slice() });
        }
        BinaryWord::new(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, k: u32) -> &TowerLevel {
        &self.levels[k as usize - 1]
    }

    /// Bits in one unit of level `unit`: a level-`unit` codeword, or a single bit for 0.
    pub fn unit_size(&self, unit: u32) -> u128 {
        if unit == 0 {
            1
        } else {
            self.level(unit).codeword_bits()
        }
    }

    /// Appends units of level `unit` (< k) at positions [start, start + len) of codeword
    /// `which` of level k.
    pub fn emit_units(&self, k: u32, which: u8, start: u128, len: u128, unit: u32, out: &mut Vec<u8>) {
        let level = self.level(k);
        if unit + 1 == k {
            level.emit_letters(which, start, len, out);
            return;
        }
        let per_letter = self.unit_size(k - 1) / self.unit_size(unit);
        let mut pos = start;
        let end = start + len;
        let mut letter = Vec::with_capacity(1);
        while pos < end {
            letter.clear();
            level.emit_letters(which, pos / per_letter, 1, &mut letter);
            let off = pos % per_letter;
            let take = (end - pos).min(per_letter - off);
            self.emit_units(k - 1, letter[0], off, take, unit, out);
            pos += take;
        }
    }

    /// `len` units of level `unit` of a point, starting `offset` units into a concatenation of
    /// top-level codewords listed in `stream`.
    pub fn point_units(&self, stream: &[u8], offset: u128, len: usize, unit: u32) -> Result<Vec<u8>> {
        let top = self.depth();
        if unit >= top {
            return Err(ForgeError::InvalidInput(format!("unit level {unit} must be below the top level {top}")));
        }
        limits::check_word_len(len as u128, "point prefix")?;
        let per = self.unit_size(top) / self.unit_size(unit);
        let mut out = Vec::with_capacity(len);
        let mut pos = offset;
        while out.len() < len {
            let c = (pos / per) as usize;
            let which = *stream
                .get(c)
                .ok_or_else(|| ForgeError::InvalidInput("codeword stream too short for the prefix".into()))?;
            let off = pos % per;
            let take = ((len - out.len()) as u128).min(per - off);
            self.emit_units(top, which, off, take, unit, &mut out);
            pos += take;
        }
        Ok(out)
    }

    /// Codeword pair of level k at the bit level, if it fits the explicit cap.
    pub fn bit_codewords(&self, k: u32) -> Option<(BinaryWord, BinaryWord)> {
        let n = self.level(k).codeword_bits();
        if n > EXPLICIT_CODE_CAP {
            return None;
        }
        let w = |i: u8| {
            let mut out = Vec::with_capacity(n as usize);
            if k == 1 {
                self.level(1).emit_letters(i, 0, n, &mut out);
            } else {
                self.emit_units(k, i, 0, n, 0, &mut out);
            }
            BinaryWord::new(out).ok()
        };
        Some((w(0)?, w(1)?))
    }
}

/// 0_k, 1_k over {s_k, t_k}, with the star marker substituted, when small enough.
pub fn index_code(level: &TowerLevel) -> Result<Option<CodePair>> {
    if STAR_BLOCKS * level.u.len() > EXPLICIT_CODE_CAP {
        return Ok(None);
    }
    let c0 = level.index_codeword(0)?;
    let c1 = level.index_codeword(1)?;
    let ul = level.u.len() as usize;
    let twice = BinaryWord::concat(&[&c0, &c0])?;
    let marker = twice.factor(level.star_marker_offset as usize * ul, level.star_marker.len() * ul);
    CodePair::new(c0, c1, marker, level.star_marker_offset * ul as u64, format!("index-{}", level.k)).map(Some)
}

/// 0_k, 1_k at the bit level with the star marker substituted down to bits, when small enough.
pub fn bit_code(tower: &Tower, k: u32) -> Result<Option<CodePair>> {
    let Some((c0, c1)) = tower.bit_codewords(k) else { return Ok(None) };
    let level = tower.level(k);
    let block = (level.uv_letters() * level.unit_bits) as usize;
    let twice = BinaryWord::concat(&[&c0, &c0])?;
    let off = level.star_marker_offset as usize * block;
    let marker = twice.factor(off, level.star_marker.len() * block);
    CodePair::new(c0, c1, marker, off as u64, format!("codewords-{k}")).map(Some)
}

/// Concatenation of the codewords named by `indices`.
pub fn inflate(code: &CodePair, indices: &[u8]) -> BinaryWord {
    let mut out = Vec::with_capacity(indices.len() * code.block_len());
    for &i in indices {
        out.extend_from_slice(code.block(i).as_slice());
    }
    BinaryWord::new(out).expect("codewords are binary")
}

/// The first `len` letters of the concatenation named by `indices`.
pub fn inflate_prefix(code: &CodePair, indices: &[u8], len: usize) -> Result<BinaryWord> {
    let l = code.block_len();
    if indices.len() * l < len {
        return Err(ForgeError::InvalidInput(format!("{} codewords give fewer than {len} letters", indices.len())));
    }
    let mut out = Vec::with_capacity(len);
    for &i in &indices[..len.div_ceil(l)] {
        out.extend_from_slice(code.block(i).as_slice());
    }
    out.truncate(len);
    BinaryWord::new(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parse {
    /// Offset of the word's first letter inside its first block.
    pub phase: u64,
    /// One entry per block touched; None where a partial edge block fits both codewords.
    pub blocks: Vec<Option<u8>>,
}

/// Reads a word as a piece of a concatenation, anchored at its first marker occurrence.
pub fn unique_parse(word: &[u8], code: &CodePair) -> Result<Parse> {
    let l = code.block_len();
    let mut first = None;
    for_each_occurrence(code.marker.as_slice(), word, |p| {
        first = Some(p);
        false
    });
    let p = first.ok_or_else(|| ForgeError::NotInShift("no marker occurrence; word too short or not in the shift".into()))?;
    let r = (p as i64 - code.marker_offset as i64).rem_euclid(l as i64) as usize;
    let phase = (l - r) % l;
    let b = [code.beta0.as_slice(), code.beta1.as_slice()];
    let classify = |piece: &[u8], in_block: usize, pos: usize| -> Result<Option<u8>> {
        let fits: Vec<u8> =
            (0..2u8).filter(|&i| &b[i as usize][in_block..in_block + piece.len()] == piece).collect();
        match fits.as_slice() {
            [i] => Ok(Some(*i)),
            [_, _] => Ok(None),
            _ => Err(ForgeError::NotInShift(format!("no codeword fits the block at position {pos}"))),
        }
    };
    let mut blocks = Vec::new();
    let mut pos = 0;
    if phase > 0 {
        let head = r.min(word.len());
        blocks.push(classify(&word[..head], phase, 0)?);
        pos = head;
    }
    while pos < word.len() {
        let take = (word.len() - pos).min(l);
        let piece = &word[pos..pos + take];
        let entry = classify(piece, 0, pos)?;
        if take == l && entry.is_none() {
            return Err(ForgeError::Internal("two distinct codewords matched a full block".into()));
        }
        blocks.push(entry);
        pos += take;
    }
    Ok(Parse { phase: phase as u64, blocks })
}

/// Random streams through inflate and back through unique_parse, each read from a random
/// phase. Returns the number of mismatches.
pub fn round_trip_failures(code: &CodePair, trials: usize, rng: &mut ChaCha8Rng) -> usize {
    let l = code.block_len();
    let mut failures = 0;
    for _ in 0..trials {
        let stream: Vec<u8> = (0..5).map(|_| rng.gen_range(0..2u8)).collect();
        let word = inflate(code, &stream);
        let r = rng.gen_range(0..l);
        let ok = match unique_parse(&word.as_slice()[r..], code) {
            Ok(parse) => {
                let offset = usize::from(r > 0);
                parse.phase == r as u64
                    && parse.blocks.len() == stream.len()
                    && parse.blocks.iter().zip(&stream).enumerate().all(|(i, (got, &want))| match got {
                        Some(g) => *g == want,
                        None => i < offset,
                    })
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    failures
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub scale: u64,
    /// Word counts in the main window. Not serialized.
    #[serde(skip)]
    pub counts: Vec<(BinaryWord, u64)>,
    pub distinct: usize,
    pub window_length: u64,
    pub second_window_length: u64,
    /// Largest relative deviation of a frequency between the two windows.
    pub stability: f64,
    pub min_freq: f64,
    pub max_freq: f64,
    pub ratio: f64,
    pub reliable: bool,
}

/// Stability above this flags a measurement as unreliable.
pub const STABILITY_LIMIT: f64 = 0.05;

/// Frequencies of the length-`scale` factors starting in the first `window` positions, compared
/// against the first `window / 2` positions.
pub fn empirical_ratio(prefix: &[u8], scale: usize, window: usize) -> Result<EmpiricalMeasure> {
    if scale == 0 || window < 2 {
        return Err(ForgeError::InvalidInput("scale must be positive and window at least 2".into()));
    }
    if prefix.len() < window + scale - 1 {
        return Err(ForgeError::InvalidInput(format!(
            "prefix of {} letters is shorter than window + scale − 1 = {}",
            prefix.len(),
            window + scale - 1
        )));
    }
    let half = window / 2;
    let main = FactorTable::scan(&prefix[..window + scale - 1], scale);
    let second = FactorTable::scan(&prefix[..half + scale - 1], scale);
    let counts: Vec<(BinaryWord, u64)> = main.entries().into_iter().map(|(w, st)| (w, st.count)).collect();
    let mut stability: f64 = 0.0;
    let (mut lo, mut hi) = (u64::MAX, 0);
    for (w, c) in &counts {
        let f1 = *c as f64 / window as f64;
        let f2 = second.get(w.as_slice()).map_or(0, |s| s.count) as f64 / half as f64;
        stability = stability.max((f1 - f2).abs() / f1);
        lo = lo.min(*c);
        hi = hi.max(*c);
    }
    Ok(EmpiricalMeasure {
        scale: scale as u64,
        distinct: counts.len(),
        counts,
        window_length: window as u64,
        second_window_length: half as u64,
        stability,
        min_freq: lo as f64 / window as f64,
        max_freq: hi as f64 / window as f64,
        ratio: lo as f64 / hi as f64,
        reliable: stability <= STABILITY_LIMIT,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioMeasurement {
    /// Which scale: "n_j" for the induction scales, "lemma" for the substitution-lemma scales.
    pub role: String,
    pub j: u32,
    #[serde(with = "u128_string")]
    pub scale: u128,
    /// "direct" counts bit words; "inflated" counts inner words and divides by |β|.
    pub method: String,
    pub window: u64,
    pub min_freq: f64,
    pub max_freq: f64,
    pub ratio: f64,
    pub stability: f64,
    pub min_freq_times_scale: f64,
    pub pass: bool,
}

/// Ratio floor at every induction scale.
pub const RATIO_FLOOR: f64 = 1.0 / 16.0;
/// Floor for min-frequency times scale.
pub const MIN_FREQ_FLOOR: f64 = 1.0 / 32.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityCheck {
    pub j: u32,
    #[serde(with = "u128_string")]
    pub n: u128,
    #[serde(with = "big_string")]
    pub p: BigUint,
    pub bound: String,
    pub pass: bool,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelArtifact {
    pub k: u32,
    pub mode: Mode,
    #[serde(with = "u128_string")]
    pub n_k: u128,
    #[serde(with = "u128_string")]
    pub big_n_k: u128,
    #[serde(with = "u128_string")]
    pub codeword_bits: u128,
    pub lemma_scales: Vec<String>,
    pub ratio_measurements: Vec<RatioMeasurement>,
    pub complexity_checks: Vec<ComplexityCheck>,
    pub checks: Vec<NamedCheck>,
    /// Checks that could not run, with the reason.
    pub skipped: Vec<String>,
}

impl LevelArtifact {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
            && self.ratio_measurements.iter().all(|r| r.pass)
            && self.complexity_checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        out.extend(self.ratio_measurements.iter().filter(|r| !r.pass).map(|r| {
            format!("ratio at {} ({}, j = {}): {:.4}, stability {:.4}", r.scale, r.role, r.j, r.ratio, r.stability)
        }));
        out.extend(self.complexity_checks.iter().filter(|c| !c.pass).map(|c| format!("complexity at N_{} = {}", c.j, c.n)));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionConfig {
    pub depth: u32,
    pub seed: SeedConfig,
    pub sequence: SubexponentialSpec,
    pub rng_seed: u64,
    pub round_trips: usize,
    /// Bits (or inner units) in the measured point prefix.
    pub prefix_len: usize,
    /// Measurement windows are at least this many times the scale.
    pub window_factor: u64,
    pub nesting_samples: usize,
}

impl InductionConfig {
    pub fn new(depth: u32, seed: SeedConfig, sequence: SubexponentialSpec) -> Self {
        InductionConfig {
            depth,
            seed,
            sequence,
            rng_seed: 0x5eed,
            round_trips: 1000,
            prefix_len: 4_000_000,
            window_factor: 10_000,
            nesting_samples: 8,
        }
    }

    pub fn max_depth(mode: Mode) -> u32 {
        match mode {
            Mode::Strict => 2,
            Mode::Demo => 4,
        }
    }
}

/// Balanced scales for every level, in order.
pub fn level_scales(rot: &RotationNumber, cfg: &InductionConfig) -> Result<Vec<ScaleCertificate>> {
    find_balanced_scales(rot, &cfg.seed.epsilon, cfg.depth as usize, 1, DEFAULT_SCAN_BUDGET)
}

/// Assembles level k from its seed: complexity scale, covering words, star marker, lengths.
pub fn assemble_level(
    prev: Option<&TowerLevel>,
    seed: SeedArtifact,
    sequence: &SubexponentialSpec,
) -> Result<TowerLevel> {
    let k = prev.map_or(1, |p| p.k + 1);
    let code = CodePair::from_seed(&seed, format!("seed-{k}"))?;
    let l = code.block_len() as u64;
    let (lcp_s, lcs_s, w) = (code.lcp() as u64, code.lcs() as u64, code.sync_window());
    let b = l.max(seed.n_freq).max(w) + 1;
    let (unit_bits, beta_lcp, beta_lcs) = match prev {
        None => (1u128, 0u128, 0u128),
        Some(p) => (p.codeword_bits(), p.lcp_bits, p.lcs_bits),
    };
    let inner = move |c: u64| -> Result<BigUint> {
        if c < w {
            return Err(ForgeError::Internal(format!("inner length {c} below the sync window {w}")));
        }
        structural_complexity(l, lcp_s, lcs_s, c)
    };
    let choice = if k == 1 {
        first_scale_above(b, l, 1, 1 << 20, sequence, &inner)?
    } else {
        let lb = to_u64(unit_bits, "codeword length")?;
        let (bp, bs) = (to_u64(beta_lcp, "codeword prefix")?, to_u64(beta_lcs, "codeword suffix")?);
        let count = |m: u64| -> Result<BigUint> {
            let n = lb.checked_mul(m).ok_or_else(|| overflow("scale"))?;
            inflated_count(lb, bp, bs, n, &inner)
        };
        first_scale_above(b, l, lb, 1 << 20, sequence, &count)?
    };
    let cover = covering_pattern_len(choice.m as u128, l as u128);
    if cover > 100 {
        return Err(ForgeError::Resource(format!("covering patterns of length {cover} exceed 128-bit lengths")));
    }
    let cover_k = cover as u32;
    let (u, v) = if cover_k <= EXPLICIT_PATTERN_BITS {
        let (iu, iv) = words::covering_index_patterns(cover_k)?;
        (IndexWord::Explicit { word: BinaryWord::new(iu)? }, IndexWord::Explicit { word: BinaryWord::new(iv)? })
    } else {
        (IndexWord::Patterns { k: cover_k, reversed: false }, IndexWord::Patterns { k: cover_k, reversed: true })
    };
    let (star_marker, star_off) = find_marker(&star_pattern(0), &star_pattern(1), 22)
        .ok_or_else(|| ForgeError::Internal("star patterns have no marker".into()))?;
    let star_marker = BinaryWord::new(star_marker)?;
    let level = TowerLevel {
        k,
        word_scale: seed.word_scale,
        seed,
        code,
        choice,
        cover_k,
        u,
        v,
        star_marker,
        star_marker_offset: star_off as u64,
        unit_bits,
        lcp_bits: 0,
        lcs_bits: 0,
    };
    let (lcp_bits, lcs_bits) = codeword_overlaps(&level, beta_lcp, beta_lcs)?;
    let level = TowerLevel { lcp_bits, lcs_bits, ..level };
    level.codeword_letters().checked_mul(unit_bits).ok_or_else(|| overflow("codeword length"))?;
    Ok(level)
}

/// lcp and lcs of 0_k and 1_k in bits, descending through the star blocks, the index words,
/// the seed words and the previous codewords.
fn codeword_overlaps(level: &TowerLevel, beta_lcp: u128, beta_lcs: u128) -> Result<(u128, u128)> {
    let (p0, p1) = (star_pattern(0), star_pattern(1));
    let star_lcp = words::lcp(&p0, &p1) as u128;
    let star_lcs = words::lcs(&p0, &p1) as u128;
    let (idx_lcp, idx_lcs) = index_lcp_lcs(&level.u, &level.v)?;
    let s = level.code.beta0.as_slice();
    let t = level.code.beta1.as_slice();
    let (s_lcp, s_lcs) = (words::lcp(s, t) as u128, words::lcs(s, t) as u128);
    let ub = level.unit_bits;
    let seed_bits = level.seed_len().checked_mul(ub).ok_or_else(|| overflow("seed length"))?;
    let uv_bits = level.u.len().checked_mul(seed_bits).ok_or_else(|| overflow("index word length"))?;
    let lcp = star_lcp * uv_bits + idx_lcp * seed_bits + s_lcp * ub + beta_lcp;
    let lcs = star_lcs * uv_bits + idx_lcs * seed_bits + s_lcs * ub + beta_lcs;
    Ok((lcp, lcs))
}

/// Builds every level's seed and assembles the tower.
pub fn build_tower(rot: &RotationNumber, cfg: &InductionConfig) -> Result<Tower> {
    if cfg.depth == 0 {
        return Err(ForgeError::InvalidInput("depth must be at least 1".into()));
    }
    let cap = InductionConfig::max_depth(cfg.seed.mode);
    if cfg.depth > cap {
        return Err(ForgeError::InvalidInput(format!("{} mode allows depth at most {cap}", cfg.seed.mode)));
    }
    let certs = level_scales(rot, cfg)?;
    let mut levels: Vec<TowerLevel> = Vec::new();
    for cert in certs.iter().take(cfg.depth as usize) {
        let seed = build_seed(rot, cert, &cfg.seed)?;
        let level = assemble_level(levels.last(), seed, &cfg.sequence)?;
        levels.push(level);
    }
    Ok(Tower { levels })
}

/// Rebuilds a tower from stored seeds, re-verifying each seed.
pub fn tower_from_seeds(seeds: Vec<SeedArtifact>, sequence: &SubexponentialSpec) -> Result<Tower> {
    let mut levels: Vec<TowerLevel> = Vec::new();
    for (i, seed) in seeds.into_iter().enumerate() {
        let checks = seed::reverify(&seed)?;
        if let Some(bad) = checks.iter().find(|c| !c.pass) {
            return Err(ForgeError::CheckFailed(format!("seed {} check {}: {}", i + 1, bad.name, bad.detail)));
        }
        let level = assemble_level(levels.last(), seed, sequence)?;
        levels.push(level);
    }
    Ok(Tower { levels })
}

/// A point of the deepest level: random top codewords, entered at a random bit offset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub stream: Vec<u8>,
    #[serde(with = "u128_string")]
    pub offset_bits: u128,
}

impl SamplePoint {
    pub fn random(tower: &Tower, rng: &mut ChaCha8Rng) -> Self {
        let stream: Vec<u8> = (0..64).map(|_| rng.gen_range(0..2u8)).collect();
        let offset_bits = rng.gen_range(0..tower.unit_size(tower.depth()));
        SamplePoint { stream, offset_bits }
    }

    /// Units of level `unit` from the offset (rounded down to a unit boundary).
    /// The point `check_tower` measures for a given rng seed.
    pub fn for_seed(tower: &Tower, rng_seed: u64) -> Self {
        Self::random(tower, &mut ChaCha8Rng::seed_from_u64(rng_seed))
    }

    pub fn units(&self, tower: &Tower, unit: u32, len: usize) -> Result<Vec<u8>> {
        tower.point_units(&self.stream, self.offset_bits / tower.unit_size(unit), len, unit)
    }
}

fn measure_direct(prefix: &[u8], scale: u128, j: u32, role: &str) -> Result<RatioMeasurement> {
    let s = limits::check_word_len(scale, "measurement scale")?;
    let window = prefix.len() + 1 - s;
    let m = empirical_ratio(prefix, s, window)?;
    Ok(finish_measurement(role, j, scale, "direct", window as u64, m.min_freq, m.max_freq, m.stability))
}

#[allow(clippy::too_many_arguments)]
fn finish_measurement(
    role: &str,
    j: u32,
    scale: u128,
    method: &str,
    window: u64,
    min_freq: f64,
    max_freq: f64,
    stability: f64,
) -> RatioMeasurement {
    let ratio = min_freq / max_freq;
    let mfs = min_freq * scale as f64;
    let pass = if role == "n_j" {
        ratio > RATIO_FLOOR && ratio <= 1.0 && stability <= STABILITY_LIMIT && mfs >= MIN_FREQ_FLOOR
    } else {
        ratio <= 1.0
    };
    RatioMeasurement {
        role: role.to_string(),
        j,
        scale,
        method: method.to_string(),
        window,
        min_freq,
        max_freq,
        ratio,
        stability,
        min_freq_times_scale: mfs,
        pass,
    }
}

/// Ratio at a bit scale at least the synchronizing window of the level-(j−1) codewords: each
/// bit word is a phase plus an inner word, so its frequency is the inner frequency over |β|.
fn measure_inflated(
    tower: &Tower,
    point: &SamplePoint,
    j: u32,
    scale: u128,
    role: &str,
    cfg: &InductionConfig,
    cache: &mut HashMap<(u32, u64), EmpiricalMeasure>,
) -> Result<RatioMeasurement> {
    let unit = j - 1;
    let lb = to_u64(tower.unit_size(unit), "codeword length")?;
    let prev = tower.level(unit);
    let (lcp, lcs) = (to_u64(prev.lcp_bits, "codeword prefix")?, to_u64(prev.lcs_bits, "codeword suffix")?);
    let n = to_u64(scale, "scale")?;
    let segs = phase_segments(lb, lcp, lcs, n)?;
    let longest = segs.iter().map(|s| s.inner_len()).max().unwrap_or(1);
    let window = (cfg.window_factor * longest) as usize;
    let inner = point.units(tower, unit, window + longest as usize)?;
    let (mut lo, mut hi, mut stab) = (f64::INFINITY, 0.0f64, 0.0f64);
    for seg in &segs {
        let c = seg.inner_len();
        if let Entry::Vacant(e) = cache.entry((j, c)) {
            e.insert(empirical_ratio(&inner, c as usize, window)?);
        }
        let m = &cache[&(j, c)];
        lo = lo.min(m.min_freq);
        hi = hi.max(m.max_freq);
        stab = stab.max(m.stability);
    }
    Ok(finish_measurement(role, j, scale, "inflated", window as u64, lo / lb as f64, hi / lb as f64, stab))
}

/// Runs every check on a built tower and returns one artifact per level.
pub fn check_tower(tower: &Tower, cfg: &InductionConfig) -> Result<Vec<LevelArtifact>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let point = SamplePoint::random(tower, &mut rng);
    let bits = point.units(tower, 0, cfg.prefix_len)?;
    let mut out = Vec::new();
    let mut inner_cache: HashMap<(u32, u64), EmpiricalMeasure> = HashMap::new();
    for k in 1..=tower.depth() {
        out.push(check_level(tower, k, cfg, &point, &bits, &mut rng, &mut inner_cache)?);
    }
    Ok(out)
}

fn check_level(
    tower: &Tower,
    k: u32,
    cfg: &InductionConfig,
    point: &SamplePoint,
    bits: &[u8],
    rng: &mut ChaCha8Rng,
    inner_cache: &mut HashMap<(u32, u64), EmpiricalMeasure>,
) -> Result<LevelArtifact> {
    let level = tower.level(k);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();

    // seed and its code
    checks.push(NamedCheck::new("seed_checks", level.seed.all_checks_pass(), "x/y properties, marker, frequency gates"));
    let l = level.code.block_len() as u64;
    let seed_dp = double_parse_search(&level.code.beta0, &level.code.beta1, 6 * l)?;
    checks.push(NamedCheck::new(
        "seed_code_decipherable",
        seed_dp.is_none(),
        format!("no double parse up to window {}", 6 * l),
    ));
    let fails = round_trip_failures(&level.code, cfg.round_trips, rng);
    checks.push(NamedCheck::new("seed_code_round_trip", fails == 0, format!("{fails} of {} failed", cfg.round_trips)));

    // star patterns and the codewords built from them
    let star_ok = marker_checks(&star_pattern(0), &star_pattern(1), level.star_marker.as_slice(), level.star_marker_offset as usize)
        .iter()
        .all(|c| c.pass);
    checks.push(NamedCheck::new("star_marker", star_ok, format!("{} at {}", level.star_marker.to_string().replace('0', "u").replace('1', "v"), level.star_marker_offset)));
    let cover_ok = match (&level.u, &level.v) {
        (IndexWord::Explicit { word: u }, IndexWord::Explicit { word: v }) => {
            let k = level.cover_k as usize;
            let tu = FactorTable::scan(u.as_slice(), k);
            let tv = FactorTable::scan(v.as_slice(), k);
            tu.distinct() == 1 << k && tv.distinct() == 1 << k
        }
        _ => true,
    };
    checks.push(NamedCheck::new(
        "covering",
        cover_ok && level.cover_k as u128 == covering_pattern_len(level.choice.m as u128, l as u128),
        format!("every {}-block index word occurs in u and v", level.cover_k),
    ));
    match index_code(level) {
        Ok(Some(code)) => {
            let w = 6 * code.block_len() as u64;
            let dp = double_parse_search(&code.beta0, &code.beta1, w)?;
            checks.push(NamedCheck::new("index_code_decipherable", dp.is_none(), format!("window {w}")));
            let fails = round_trip_failures(&code, cfg.round_trips, rng);
            checks.push(NamedCheck::new("index_code_round_trip", fails == 0, format!("{fails} of {} failed", cfg.round_trips)));
        }
        Ok(None) => skipped.push(format!("index code has {} letters; checked over {{u, v}} only", STAR_BLOCKS * level.u.len())),
        Err(e) => checks.push(NamedCheck::new("index_code_marker", false, e.to_string())),
    }
    let bit = bit_code(tower, k);
    match &bit {
        Ok(Some(code)) => {
            let rep = decipher_window(&code.beta0, &code.beta1)?;
            let w = 6 * code.block_len() as u64;
            let ok = rep.window.is_some_and(|x| x <= w);
            checks.push(NamedCheck::new("codewords_decipherable", ok, format!("overlap bound {:?}, window {w}", rep.window)));
            let fails = round_trip_failures(code, cfg.round_trips, rng);
            checks.push(NamedCheck::new("codewords_round_trip", fails == 0, format!("{fails} of {} failed", cfg.round_trips)));
        }
        Ok(None) => skipped.push(format!("codewords have {} bits; bit-level marker and parse not checked", level.codeword_bits())),
        Err(e) => checks.push(NamedCheck::new("codewords_marker", false, e.to_string())),
    }

    // scale ordering
    let n_k = level.n_bits();
    let big_n = level.big_n_bits();
    let mut order_ok = n_k < big_n;
    let mut detail = format!("n_{k} = {n_k} < N_{k} = {big_n}");
    if k > 1 {
        let prev = tower.level(k - 1);
        order_ok &= prev.big_n_bits() < n_k && prev.codeword_bits() < n_k;
        detail.push_str(&format!("; N_{} = {}, |0_{}| = {}", k - 1, prev.big_n_bits(), k - 1, prev.codeword_bits()));
    }
    checks.push(NamedCheck::new("scale_order", order_ok, detail));

    // nesting: the point's bits parse into level-(k−1) codewords matching its unit sequence
    if k > 1 {
        match bit_code(tower, k - 1)? {
            Some(code) => {
                let lb = code.block_len();
                let mut bad = 0;
                for _ in 0..cfg.nesting_samples {
                    let sample = SamplePoint { stream: point.stream.clone(), offset_bits: rng.gen_range(0..tower.unit_size(tower.depth())) };
                    let word = sample.units(tower, 0, 4 * lb)?;
                    let units = sample.units(tower, k - 1, 5)?;
                    let ok = unique_parse(&word, &code).is_ok_and(|p| {
                        p.phase as u128 == sample.offset_bits % lb as u128
                            && p.blocks.iter().zip(&units).all(|(g, w)| g.is_none_or(|g| g == *w))
                            && p.blocks.iter().skip(1).take(3).all(Option::is_some)
                    });
                    bad += usize::from(!ok);
                }
                checks.push(NamedCheck::new("nesting", bad == 0, format!("{bad} of {} prefixes misparsed", cfg.nesting_samples)));
            }
            None => skipped.push("nesting: previous codewords too long to parse explicitly".into()),
        }
    }

    // ratios at every n_j, j ≤ k, on this level's point
    let mut ratios = Vec::new();
    for j in 1..=k {
        let lj = tower.level(j);
        let mut scales = vec![("n_j", lj.n_bits())];
        if j > 1 {
            scales.extend(lj.lemma_scales().into_iter().map(|s| ("lemma", s)));
        }
        for (role, scale) in scales {
            if k == tower.depth() || j == k {
                let m = if j == 1 {
                    measure_direct(bits, scale, j, role)?
                } else {
                    measure_inflated(tower, point, j, scale, role, cfg, inner_cache)?
                };
                ratios.push(m);
            }
        }
    }

    // complexity at every N_j, j ≤ k
    let mut complexity = Vec::new();
    for j in 1..=k {
        let lj = tower.level(j);
        let n = lj.big_n_bits();
        complexity.push(ComplexityCheck {
            j,
            n,
            p: lj.choice.count.clone(),
            bound: lj.choice.bound.clone(),
            pass: cfg.sequence.exceeded_by(&lj.choice.count, lj.choice.n)?,
            method: if j == k {
                "exact phase decomposition".into()
            } else {
                format!("equal to level {j}: level-{j} codewords contain every such word")
            },
        });
    }

    // syndetic occurrence
    for j in 1..=k {
        let lj = tower.level(j);
        let span = 3 * lj.codeword_bits();
        let scale = lj.n_bits();
        if span <= bits.len() as u128 && scale <= 64 {
            let table = FactorTable::scan(bits, scale as usize);
            let room = (span - scale) as usize;
            let tail = bits.len() - scale as usize;
            let ok = table.entries().iter().all(|(_, st)| st.first <= room && st.max_gap <= room + 1 && tail - st.last <= room);
            checks.push(NamedCheck::new(
                &format!("syndetic_{j}"),
                ok,
                format!("every length-{scale} word recurs within {span} bits of the point prefix"),
            ));
        } else {
            let ok = lj.word_scale <= lj.choice.m;
            checks.push(NamedCheck::new(
                &format!("syndetic_{j}"),
                ok && cover_ok,
                format!("structural: length-{scale} words lie in u_{j} and v_{j}, so in both codewords"),
            ));
        }
    }

    Ok(LevelArtifact {
        k,
        mode: level.seed.mode,
        n_k,
        big_n_k: big_n,
        codeword_bits: level.codeword_bits(),
        lemma_scales: level.lemma_scales().iter().map(|s| s.to_string()).collect(),
        ratio_measurements: ratios,
        complexity_checks: complexity,
        checks,
        skipped,
    })
}

/// Builds and checks the tower. Fails if any hard check fails.
pub fn run_induction(rot: &RotationNumber, cfg: &InductionConfig) -> Result<(Tower, Vec<LevelArtifact>)> {
    let tower = build_tower(rot, cfg)?;
    let arts = check_tower(&tower, cfg)?;
    Ok((tower, arts))
}
