//! Concatenation shifts over a pair of equal-length codewords.
//!
//! Counting is exact. For lengths at or above a code's synchronizing window every
//! factor has a unique block phase, so P(n) splits into per-phase counts that only
//! depend on which edge blocks are partial and whether the two codewords agree there.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::seed::{NamedCheck, SeedArtifact};
use crate::words::{self, occurrences, BinaryWord};

/// Letters processed by an explicit enumeration before it gives up.
pub const ENUMERATION_CAP: u64 = 1 << 28;

/// Block patterns of the two star words over {u = 0, v = 1}.
pub const STAR0: &str = "uuvuuvuuvvvvuuvuuvuuv";
pub const STAR1: &str = "uuvuuvuuvvvvvvvuuvuuv";

pub fn star_pattern(which: u8) -> Vec<u8> {
    let p = if which == 0 { STAR0 } else { STAR1 };
    p.bytes().map(|c| u8::from(c == b'v')).collect()
}

/// Decimal-string serde for big integers.
pub mod big_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePair {
    pub beta0: BinaryWord,
    pub beta1: BinaryWord,
    pub marker: BinaryWord,
    pub marker_offset: u64,
    pub label: String,
}

impl CodePair {
    /// Validates lengths and the marker: it must occur exactly once, at `marker_offset`,
    /// in each of the four two-codeword concatenations.
    pub fn new(
        beta0: BinaryWord,
        beta1: BinaryWord,
        marker: BinaryWord,
        marker_offset: u64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if beta0.len() != beta1.len() || beta0.is_empty() {
            return Err(ForgeError::InvalidInput("codewords must be nonempty and of equal length".into()));
        }
        if beta0 == beta1 {
            return Err(ForgeError::InvalidInput("codewords must differ".into()));
        }
        if marker.is_empty() || marker.len() > beta0.len() + 1 {
            return Err(ForgeError::InvalidInput(format!(
                "marker length {} must lie in [1, L + 1] for L = {}",
                marker.len(),
                beta0.len()
            )));
        }
        let code = CodePair { beta0, beta1, marker, marker_offset, label: label.into() };
        let checks = code.marker_checks();
        if !checks.iter().all(|c| c.pass) {
            let bad: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.detail.clone()).collect();
            return Err(ForgeError::ConstructionInvalid(format!("marker fails: {}", bad.join("; "))));
        }
        Ok(code)
    }

    /// The (s, t) code of a seed with marker x·x·x·y at offset 4|x|.
    pub fn from_seed(seed: &SeedArtifact, label: impl Into<String>) -> Result<Self> {
        let x = seed.x()?;
        let y = seed.y()?;
        let marker = BinaryWord::concat(&[&x, &x, &x, &y])?;
        CodePair::new(seed.s.clone(), seed.t.clone(), marker, 4 * x.len() as u64, label)
    }

    pub fn block_len(&self) -> usize {
        self.beta0.len()
    }

    pub fn block(&self, i: u8) -> &BinaryWord {
        if i == 0 {
            &self.beta0
        } else {
            &self.beta1
        }
    }

    /// Every factor at least this long contains an aligned marker and so has one block phase.
    pub fn sync_window(&self) -> u64 {
        (self.block_len() + self.marker.len() - 1) as u64
    }

    pub fn lcp(&self) -> usize {
        words::lcp(self.beta0.as_slice(), self.beta1.as_slice())
    }

    pub fn lcs(&self) -> usize {
        words::lcs(self.beta0.as_slice(), self.beta1.as_slice())
    }

    pub fn marker_checks(&self) -> Vec<NamedCheck> {
        marker_checks(self.beta0.as_slice(), self.beta1.as_slice(), self.marker.as_slice(), self.marker_offset as usize)
    }
}

/// Occurrences of `marker` in each two-codeword concatenation must be exactly `[offset]`.
pub fn marker_checks(b0: &[u8], b1: &[u8], marker: &[u8], offset: usize) -> Vec<NamedCheck> {
    let mut out = Vec::new();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let p = if i == 0 { b0 } else { b1 };
        let q = if j == 0 { b0 } else { b1 };
        let block = [p, q].concat();
        let occ = occurrences(marker, &block);
        out.push(NamedCheck::new(
            &format!("marker_once_in_{i}{j}"),
            occ == vec![offset],
            format!("occurrences at {occ:?}, expected [{offset}]"),
        ));
    }
    out
}

/// Shortest word occurring exactly once, at one common offset, in all four two-codeword
/// concatenations. Quadratic in the codeword length; meant for short index codes.
pub fn find_marker(b0: &[u8], b1: &[u8], max_len: usize) -> Option<(Vec<u8>, usize)> {
    let l = b0.len();
    let first = [b0, b0].concat();
    for len in 1..=max_len.min(l + 1) {
        for off in 0..=2 * l - len {
            let cand = &first[off..off + len];
            if marker_checks(b0, b1, cand, off).iter().all(|c| c.pass) {
                return Some((cand.to_vec(), off));
            }
        }
    }
    None
}

fn index_texts(code: &CodePair, k: u32) -> Vec<Vec<u8>> {
    (0..1u64 << k)
        .map(|p| {
            let mut text = Vec::with_capacity(k as usize * code.block_len());
            for j in (0..k).rev() {
                text.extend_from_slice(code.block(((p >> j) & 1) as u8).as_slice());
            }
            text
        })
        .collect()
}

fn enumeration_blocks(code: &CodePair, n: u64) -> Result<u32> {
    let l = code.block_len() as u64;
    let k = n.div_ceil(l) + 1;
    let work = (k as u128 * l as u128) << k.min(100);
    if k > 40 || work > ENUMERATION_CAP as u128 {
        return Err(ForgeError::Resource(format!(
            "enumerating length-{n} factors needs all {k}-block index words; above the enumeration cap"
        )));
    }
    Ok(k as u32)
}

/// All length-n factors of bi-infinite concatenations, by explicit phase/index enumeration.
pub fn coded_language(code: &CodePair, n: u64) -> Result<BTreeSet<BinaryWord>> {
    if n == 0 {
        return Err(ForgeError::InvalidInput("factor length must be at least 1".into()));
    }
    let k = enumeration_blocks(code, n)?;
    let texts = index_texts(code, k);
    let l = code.block_len();
    let n = n as usize;
    let mut seen: HashSet<&[u8]> = HashSet::new();
    for text in &texts {
        for p in 0..l {
            seen.insert(&text[p..p + n]);
        }
    }
    Ok(seen.into_iter().map(|w| BinaryWord::from_bits(w.to_vec())).collect())
}

/// A run of consecutive phases d (offset of the word's start inside its first block) that
/// share the number of blocks touched and which edge blocks are ambiguous.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseSegment {
    pub first_phase: u64,
    pub count: u64,
    /// Blocks the word touches, partial edges included.
    pub blocks: u64,
    /// The partial first block is a common suffix of both codewords.
    pub merge_first: bool,
    /// The partial last block is a common prefix of both codewords.
    pub merge_last: bool,
}

impl PhaseSegment {
    /// Length of the inner index word that determines a factor at this phase.
    pub fn inner_len(&self) -> u64 {
        self.blocks - self.merge_first as u64 - self.merge_last as u64
    }
}

fn phase_shape(l: u64, lcp: u64, lcs: u64, n: u64, d: u64) -> (u64, bool, bool) {
    if d == 0 {
        let (q, r) = (n / l, n % l);
        if r == 0 {
            (q, false, false)
        } else {
            (q + 1, false, r <= lcp)
        }
    } else {
        let f = l - d;
        let rest = n - f;
        let (k, r) = (rest / l, rest % l);
        let blocks = 1 + k + u64::from(r > 0);
        (blocks, f <= lcs, r > 0 && r <= lcp)
    }
}

/// Phase decomposition of the length-n factors of a concatenation shift with block length
/// `l` whose codewords share a prefix of `lcp` and a suffix of `lcs` letters. Requires n ≥ l.
pub fn phase_segments(l: u64, lcp: u64, lcs: u64, n: u64) -> Result<Vec<PhaseSegment>> {
    if l == 0 || n < l {
        return Err(ForgeError::InvalidInput(format!("phase decomposition needs n ≥ L (n = {n}, L = {l})")));
    }
    let rho = n % l;
    let mut cuts: Vec<u64> = vec![0, 1, l];
    for c in [l - rho, l - rho + 1, l.saturating_sub(lcs), (lcp + 1).saturating_sub(rho), l - rho + lcp + 1] {
        if (1..l).contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let mut out: Vec<PhaseSegment> = Vec::new();
    for w in cuts.windows(2) {
        let (blocks, merge_first, merge_last) = phase_shape(l, lcp, lcs, n, w[0]);
        match out.last_mut() {
            Some(last)
                if last.blocks == blocks && last.merge_first == merge_first && last.merge_last == merge_last =>
            {
                last.count += w[1] - w[0];
            }
            _ => out.push(PhaseSegment { first_phase: w[0], count: w[1] - w[0], blocks, merge_first, merge_last }),
        }
    }
    Ok(out)
}

/// Σ over phases of inner(inner_len): the number of length-n factors of an inflation whose
/// inner shift has complexity `inner`. Valid once n is at least the code's synchronizing window.
pub fn inflated_count(
    l: u64,
    lcp: u64,
    lcs: u64,
    n: u64,
    inner: &dyn Fn(u64) -> Result<BigUint>,
) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for seg in phase_segments(l, lcp, lcs, n)? {
        total += inner(seg.inner_len())? * seg.count;
    }
    Ok(total)
}

/// P(n) of the full concatenation shift, in closed form. Valid for n ≥ the sync window.
pub fn structural_complexity(l: u64, lcp: u64, lcs: u64, n: u64) -> Result<BigUint> {
    inflated_count(l, lcp, lcs, n, &|k| Ok(BigUint::one() << k))
}

/// Exact P(n): closed form at or above the sync window, enumeration below it.
pub fn complexity(code: &CodePair, n: u64) -> Result<BigUint> {
    if n >= code.sync_window() {
        structural_complexity(code.block_len() as u64, code.lcp() as u64, code.lcs() as u64, n)
    } else {
        Ok(BigUint::from(coded_language(code, n)?.len()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub n: u64,
    #[serde(with = "big_string")]
    pub lower: BigUint,
    #[serde(with = "big_string")]
    pub upper: BigUint,
    #[serde(with = "big_string")]
    pub p: BigUint,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub n: u64,
    #[serde(with = "big_string")]
    pub p: BigUint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCurve {
    pub block_len: u64,
    pub entries: Vec<CurveEntry>,
    pub threshold_checks: Vec<ThresholdCheck>,
}

impl ComplexityCurve {
    pub fn p(&self, n: u64) -> Option<&BigUint> {
        self.entries.iter().find(|e| e.n == n).map(|e| &e.p)
    }

    /// Columns n, P, bound, pass. Rows without a threshold leave bound and pass empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,P,bound,pass\n");
        for e in &self.entries {
            match self.threshold_checks.iter().find(|c| c.n == e.n) {
                Some(c) => out.push_str(&format!("{},{},{}..{},{}\n", e.n, e.p, c.lower, c.upper, c.pass)),
                None => out.push_str(&format!("{},{},,\n", e.n, e.p)),
            }
        }
        out
    }

    /// Least-squares slope of ln P(n) against n over the entries with n ≥ `from`.
    pub fn entropy_slope(&self, from: u64) -> Option<f64> {
        let pts: Vec<(f64, f64)> =
            self.entries.iter().filter(|e| e.n >= from).map(|e| (e.n as f64, ln_big(&e.p))).collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top = (v >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// P(n) for n = 1..=n_max in steps of `stride`, plus every multiple of 2L up to n_max, with the
/// sandwich L·2^{n/L} ≤ P(n) ≤ 4L·2^{n/L} checked at the multiples of 2L.
pub fn complexity_curve(code: &CodePair, n_max: u64, stride: u64) -> Result<ComplexityCurve> {
    if n_max == 0 || stride == 0 {
        return Err(ForgeError::InvalidInput("n_max and stride must be positive".into()));
    }
    let l = code.block_len() as u64;
    let mut ns: BTreeSet<u64> = (1..=n_max).step_by(stride as usize).collect();
    ns.extend((1..=n_max / (2 * l)).map(|j| 2 * l * j));
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    for n in ns {
        let p = complexity(code, n)?;
        if n % (2 * l) == 0 {
            let base = BigUint::from(l) << (n / l);
            let upper = &base * 4u32;
            let pass = base <= p && p <= upper;
            checks.push(ThresholdCheck { n, lower: base, upper, p: p.clone(), pass });
        }
        entries.push(CurveEntry { n, p });
    }
    Ok(ComplexityCurve { block_len: l, entries, threshold_checks: checks })
}

/// One way of reading a word as part of a concatenation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWitness {
    /// Offset of the word's first letter inside its first block.
    pub phase: u64,
    /// Codeword indices of every block the word touches.
    pub blocks: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleParse {
    pub word: BinaryWord,
    pub first: ParseWitness,
    pub second: ParseWitness,
}

/// Longest chain of overlap constraints two parses at different phases can satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecipherReport {
    pub block_len: u64,
    /// None when some shift admits an unbounded chain (the code is not uniquely decipherable).
    pub max_chain: Option<u64>,
    /// Shift at which the longest (or an unbounded) chain occurs.
    pub worst_shift: u64,
    /// Every word at least this long has a single parse up to its edge blocks.
    pub window: Option<u64>,
}

/// Per shift δ in (0, L): parse A has blocks at multiples of L, parse B at δ plus multiples of
/// L. Block a of A and block b of B overlap in a tail/head segment of length L − δ (constraint
/// T), then block b and the next A block a' overlap in a segment of length δ (constraint H).
struct OverlapTables {
    l: usize,
    // z arrays of b_j # b_i, indexed [i][j]
    z: [[Vec<usize>; 2]; 2],
}

impl OverlapTables {
    fn new(b0: &[u8], b1: &[u8]) -> Self {
        let b = [b0, b1];
        let z = [0usize, 1].map(|i| {
            [0usize, 1].map(|j| {
                let mut s = Vec::with_capacity(2 * b0.len() + 1);
                s.extend_from_slice(b[j]);
                s.push(2);
                s.extend_from_slice(b[i]);
                words::z_function(&s)
            })
        });
        OverlapTables { l: b0.len(), z }
    }

    /// b_a[δ..] == b_b[..L−δ]
    fn tail(&self, a: usize, b: usize, delta: usize) -> bool {
        self.z[a][b][self.l + 1 + delta] >= self.l - delta
    }

    /// b_b[L−δ..] == b_a'[..δ]
    fn head(&self, b: usize, a2: usize, delta: usize) -> bool {
        self.z[b][a2][self.l + 1 + self.l - delta] >= delta
    }

    /// Longest path (in constraints) of the alternating graph at shift δ, with its nodes;
    /// None if the graph has a cycle.
    fn longest_chain(&self, delta: usize) -> Option<(u64, Vec<(bool, usize)>)> {
        // nodes: (false, a) = A block a, (true, b) = B block b
        let nodes = [(false, 0), (false, 1), (true, 0), (true, 1)];
        let edge = |from: (bool, usize), to: (bool, usize)| -> bool {
            match (from.0, to.0) {
                (false, true) => self.tail(from.1, to.1, delta),
                (true, false) => self.head(from.1, to.1, delta),
                _ => false,
            }
        };
        // best[v] = longest path ending at v, with predecessor
        let mut best: Vec<(u64, Option<usize>)> = vec![(0, None); 4];
        for round in 0..=4 {
            let mut changed = false;
            let snapshot = best.clone();
            for (vi, &v) in nodes.iter().enumerate() {
                for (ui, &u) in nodes.iter().enumerate() {
                    if edge(u, v) && snapshot[ui].0 + 1 > best[vi].0 {
                        best[vi] = (snapshot[ui].0 + 1, Some(ui));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == 4 {
                return None;
            }
        }
        let (end, &(len, _)) = best.iter().enumerate().max_by_key(|(_, b)| b.0).unwrap();
        let mut path = vec![nodes[end]];
        let mut cur = end;
        while let Some(p) = best[cur].1 {
            if path.len() as u64 > len {
                break;
            }
            path.push(nodes[p]);
            cur = p;
        }
        path.reverse();
        Some((len, path))
    }
}

/// Bound on double parses from the overlap graph.
pub fn decipher_window(b0: &BinaryWord, b1: &BinaryWord) -> Result<DecipherReport> {
    if b0.len() != b1.len() || b0.is_empty() || b0 == b1 {
        return Err(ForgeError::InvalidInput("need two distinct nonempty codewords of equal length".into()));
    }
    let tables = OverlapTables::new(b0.as_slice(), b1.as_slice());
    let l = b0.len();
    let mut max_chain = 0;
    let mut worst = 0;
    for delta in 1..l {
        match tables.longest_chain(delta) {
            None => {
                return Ok(DecipherReport { block_len: l as u64, max_chain: None, worst_shift: delta as u64, window: None })
            }
            Some((c, _)) if c > max_chain => {
                max_chain = c;
                worst = delta as u64;
            }
            _ => {}
        }
    }
    Ok(DecipherReport {
        block_len: l as u64,
        max_chain: Some(max_chain),
        worst_shift: worst,
        window: Some((max_chain.div_ceil(2) + 2) * l as u64),
    })
}

/// Searches words of length `window` for two parses at different phases. Returns None when
/// none exists: either proved by the overlap graph, or by exhaustive search when the graph
/// bound is above `window` and the code is small enough to enumerate.
pub fn double_parse_search(b0: &BinaryWord, b1: &BinaryWord, window: u64) -> Result<Option<DoubleParse>> {
    let l = b0.len() as u64;
    if window < 4 * l {
        return Err(ForgeError::InvalidInput(format!("window {window} must be at least 4L = {}", 4 * l)));
    }
    let report = decipher_window(b0, b1)?;
    if let Some(w) = report.window {
        if window >= w {
            return Ok(None);
        }
    } else {
        let tables = OverlapTables::new(b0.as_slice(), b1.as_slice());
        return Ok(Some(cycle_witness(&tables, [b0.as_slice(), b1.as_slice()], report.worst_shift as usize, window)));
    }
    exhaustive_double_parse(b0, b1, window)
}

/// Follows a cycle of the overlap graph long enough to cover `window` letters.
fn cycle_witness(tables: &OverlapTables, b: [&[u8]; 2], delta: usize, window: u64) -> DoubleParse {
    let l = tables.l;
    let blocks_needed = (window as usize + delta).div_ceil(l) + 1;
    // depth-first search for an alternating walk of the required length
    fn walk(
        t: &OverlapTables,
        delta: usize,
        a_seq: &mut Vec<usize>,
        b_seq: &mut Vec<usize>,
        need: usize,
    ) -> bool {
        if a_seq.len() >= need && b_seq.len() >= need {
            return true;
        }
        if a_seq.len() == b_seq.len() {
            let bl = *b_seq.last().unwrap();
            for a2 in 0..2 {
                if t.head(bl, a2, delta) {
                    a_seq.push(a2);
                    if walk(t, delta, a_seq, b_seq, need) {
                        return true;
                    }
                    a_seq.pop();
                }
            }
        } else {
            let al = *a_seq.last().unwrap();
            for bn in 0..2 {
                if t.tail(al, bn, delta) {
                    b_seq.push(bn);
                    if walk(t, delta, a_seq, b_seq, need) {
                        return true;
                    }
                    b_seq.pop();
                }
            }
        }
        false
    }
    for a0 in 0..2 {
        let mut a_seq = vec![a0];
        let mut b_seq = Vec::new();
        if walk(tables, delta, &mut a_seq, &mut b_seq, blocks_needed) {
            let text: Vec<u8> = a_seq.iter().flat_map(|&i| b[i].iter().copied()).collect();
            let word = text[delta..delta + window as usize].to_vec();
            let b_blocks = (window as usize).div_ceil(l);
            let a_blocks = (delta + window as usize).div_ceil(l);
            return DoubleParse {
                word: BinaryWord::from_bits(word),
                first: ParseWitness { phase: delta as u64, blocks: a_seq[..a_blocks].iter().map(|&i| i as u8).collect() },
                second: ParseWitness { phase: 0, blocks: b_seq[..b_blocks].iter().map(|&i| i as u8).collect() },
            };
        }
    }
    unreachable!("a cycle in the overlap graph yields walks of every length")
}

fn exhaustive_double_parse(b0: &BinaryWord, b1: &BinaryWord, window: u64) -> Result<Option<DoubleParse>> {
    let l = b0.len() as u64;
    let k = window.div_ceil(l) + 1;
    if k > 40 || ((k as u128 * l as u128) << k) > ENUMERATION_CAP as u128 {
        return Err(ForgeError::Resource(format!(
            "window {window} is below the proven decipherability bound and too large to search exhaustively"
        )));
    }
    let k = k as u32;
    let w = window as usize;
    let texts: Vec<Vec<u8>> = (0..1u64 << k)
        .map(|p| {
            (0..k).rev().flat_map(|j| if (p >> j) & 1 == 0 { b0.as_slice() } else { b1.as_slice() }).copied().collect()
        })
        .collect();
    let mut seen: HashMap<&[u8], (usize, u64)> = HashMap::new();
    for (ti, text) in texts.iter().enumerate() {
        for p in 0..l as usize {
            let word = &text[p..p + w];
            match seen.get(word) {
                Some(&(tj, pj)) if pj != p as u64 => {
                    let blocks_of = |t: usize, phase: u64| -> Vec<u8> {
                        let touched = (phase as usize + w).div_ceil(l as usize);
                        (0..touched).map(|b| ((t as u64 >> (k - 1 - b as u32)) & 1) as u8).collect()
                    };
                    return Ok(Some(DoubleParse {
                        word: BinaryWord::from_bits(word.to_vec()),
                        first: ParseWitness { phase: pj, blocks: blocks_of(tj, pj) },
                        second: ParseWitness { phase: p as u64, blocks: blocks_of(ti, p as u64) },
                    }));
                }
                Some(_) => {}
                None => {
                    seen.insert(word, (ti, p as u64));
                }
            }
        }
    }
    Ok(None)
}

/// word_i = the 21-block star pattern i over {u, v}.
pub fn build_star_words(u: &BinaryWord, v: &BinaryWord) -> Result<(BinaryWord, BinaryWord)> {
    if u.len() != v.len() || u == v {
        return Err(ForgeError::InvalidInput("star words need two distinct words of equal length".into()));
    }
    let build = |which: u8| -> Result<BinaryWord> {
        let pattern = star_pattern(which);
        if pattern.len() != 21 {
            return Err(ForgeError::Internal(format!("star pattern has {} blocks", pattern.len())));
        }
        let parts: Vec<&BinaryWord> = pattern.iter().map(|&c| if c == 0 { u } else { v }).collect();
        BinaryWord::concat(&parts)
    };
    Ok((build(0)?, build(1)?))
}

/// A subexponentially growing sequence a_1, a_2, ...
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SubexponentialSpec {
    /// a_m = m^degree
    Poly { degree: u32 },
    /// a_m = ⌊exp(m^gamma)⌋, 0 < gamma < 1
    Stretch { gamma: f64 },
    /// a_1, a_2, ... listed explicitly
    Table { source: String, values: Vec<u64> },
}

impl fmt::Display for SubexponentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubexponentialSpec::Poly { degree } => write!(f, "preset:poly:{degree}"),
            SubexponentialSpec::Stretch { gamma } => write!(f, "preset:stretch:{gamma}"),
            SubexponentialSpec::Table { source, .. } => write!(f, "file:{source}"),
        }
    }
}

impl SubexponentialSpec {
    /// Parses `preset:poly:<d>`, `preset:stretch:<γ>` or `file:<path>` (whitespace-separated
    /// positive integers a_1, a_2, ...).
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || ForgeError::InvalidInput(format!("malformed sequence spec {spec:?}"));
        if let Some(rest) = spec.strip_prefix("preset:poly:") {
            let degree: u32 = rest.trim().parse().map_err(|_| bad())?;
            if degree > 64 {
                return Err(bad());
            }
            return Ok(SubexponentialSpec::Poly { degree });
        }
        if let Some(rest) = spec.strip_prefix("preset:stretch:") {
            let gamma: f64 = rest.trim().parse().map_err(|_| bad())?;
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(ForgeError::InvalidInput(format!("stretch exponent must lie in (0, 1), got {gamma}")));
            }
            return Ok(SubexponentialSpec::Stretch { gamma });
        }
        if let Some(path) = spec.strip_prefix("file:") {
            let text = std::fs::read_to_string(Path::new(path))?;
            let values: Vec<u64> =
                text.split_whitespace().map(|t| t.parse::<u64>().map_err(|_| bad())).collect::<Result<_>>()?;
            if values.is_empty() || values.contains(&0) {
                return Err(ForgeError::InvalidInput(format!("sequence table {path} must list positive integers")));
            }
            return Ok(SubexponentialSpec::Table { source: path.to_string(), values });
        }
        Err(bad())
    }

    /// Exact a_m where available (not for stretched exponentials).
    pub fn exact(&self, m: u64) -> Result<Option<BigUint>> {
        match self {
            SubexponentialSpec::Poly { degree } => Ok(Some(BigUint::from(m).pow(*degree))),
            SubexponentialSpec::Stretch { .. } => Ok(None),
            SubexponentialSpec::Table { values, .. } => match values.get((m as usize).wrapping_sub(1)) {
                Some(&v) => Ok(Some(BigUint::from(v))),
                None => Err(ForgeError::Resource(format!("sequence table ends before m = {m}"))),
            },
        }
    }

    pub fn ln(&self, m: u64) -> Result<f64> {
        match self {
            SubexponentialSpec::Stretch { gamma } => Ok((m as f64).powf(*gamma)),
            _ => Ok(ln_big(&self.exact(m)?.unwrap())),
        }
    }

    /// (1/m)·ln a_m at the given m, as evidence for subexponential growth.
    pub fn growth_samples(&self, ms: &[u64]) -> Vec<(u64, f64)> {
        ms.iter().filter_map(|&m| self.ln(m).ok().map(|v| (m, v / m as f64))).collect()
    }

    fn nondecreasing(&self) -> bool {
        match self {
            SubexponentialSpec::Table { values, .. } => values.windows(2).all(|w| w[0] <= w[1]),
            _ => true,
        }
    }

    /// Whether `p` > n·a_n. Stretched exponentials compare logarithms with a relative margin
    /// and count a near-tie as not exceeding.
    pub fn exceeded_by(&self, p: &BigUint, n: u64) -> Result<bool> {
        match self.exact(n)? {
            Some(a) => Ok(*p > a * n),
            None => {
                let lhs = ln_big(p);
                let rhs = (n as f64).ln() + self.ln(n)?;
                Ok(lhs > rhs + 1e-9 * rhs.abs().max(1.0))
            }
        }
    }

    pub fn describe_bound(&self, n: u64) -> String {
        match self.exact(n) {
            Ok(Some(a)) => (a * n).to_string(),
            _ => format!("exp({:.6})", (n as f64).ln() + self.ln(n).unwrap_or(f64::NAN)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleChoice {
    /// Smallest m above the bound with count(m) > N·a_N.
    pub m: u64,
    /// N = multiplier·m, the letter-level scale the count refers to.
    pub n: u64,
    #[serde(with = "big_string")]
    pub count: BigUint,
    pub bound: String,
    pub skipped_blocks: u64,
}

/// Smallest m > `b` with count(m) > N·a_N where N = multiplier·m. `count` must be nondecreasing.
/// Scans in strides of `stride`, skipping a stride when its largest count cannot beat the
/// bound at its start (valid for nondecreasing sequences).
pub fn first_scale_above(
    b: u64,
    stride: u64,
    multiplier: u64,
    max_strides: u64,
    seq: &SubexponentialSpec,
    count: &dyn Fn(u64) -> Result<BigUint>,
) -> Result<ScaleChoice> {
    let stride = stride.max(1);
    let monotone = seq.nondecreasing();
    let mut lo = b + 1;
    for skipped in 0..max_strides {
        let hi = lo + stride - 1;
        let top = count(hi)?;
        let n_lo = lo.checked_mul(multiplier).ok_or_else(|| ForgeError::Resource("scale overflows u64".into()))?;
        if !monotone || seq.exceeded_by(&top, n_lo)? {
            for m in lo..=hi {
                let n = m * multiplier;
                let p = count(m)?;
                if seq.exceeded_by(&p, n)? {
                    return Ok(ScaleChoice { m, n, count: p, bound: seq.describe_bound(n), skipped_blocks: skipped });
                }
            }
        }
        lo = hi + 1;
    }
    Err(ForgeError::Resource(format!(
        "no scale up to {} beats the sequence {seq}; try a slower sequence such as preset:poly:0 (demo)",
        lo - 1
    )))
}

/// The scale at which a coded shift Y first exceeds m·a_m, searched above `b`.
pub fn choose_complexity_scale(code: &CodePair, seq: &SubexponentialSpec, b: u64) -> Result<ScaleChoice> {
    let l = code.block_len() as u64;
    if b < l {
        return Err(ForgeError::InvalidInput(format!("bound B = {b} must be at least |s| = {l}")));
    }
    let (lcp, lcs, w) = (code.lcp() as u64, code.lcs() as u64, code.sync_window());
    first_scale_above(b, l, 1, 1 << 20, seq, &|m| {
        if m >= w {
            structural_complexity(l, lcp, lcs, m)
        } else {
            complexity(code, m)
        }
    })
}
