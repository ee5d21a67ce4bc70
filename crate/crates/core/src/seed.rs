//! The level-one seed: from a balanced scale to the codewords s = xxyxx, t = xxyyx.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::limits;
use crate::rotation::{RotationNumber, ScaleCertificate};
use crate::sturmian::{self, frequency_check, membership, right_special, uniform_gap};
use crate::words::{self, is_subword, occurrences, BinaryWord, FactorTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Demo,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Demo => "demo",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "demo" => Ok(Mode::Demo),
            _ => Err(ForgeError::InvalidInput(format!("mode must be strict or demo, got {s:?}"))),
        }
    }
}

/// Smallest factor for which the default rotation's level-one seed avoids a ≈ (01)^k.
pub const DEFAULT_DEMO_FACTOR: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    pub epsilon: BigRational,
    pub mode: Mode,
    /// Demo mode multiplies every length lower bound by this factor.
    pub demo_factor: f64,
    /// Largest exponent tried when searching for e.
    pub e_cap: u64,
    /// How many times N may be doubled after a frequency failure.
    pub n_attempts: usize,
    /// How far past its lower bound m_a or m_b may be pushed.
    pub m_retries: u64,
    /// Demo mode: how many (b, repetition) candidates are tried, shortest x first.
    pub demo_candidates: usize,
}

impl SeedConfig {
    pub fn strict() -> Self {
        SeedConfig {
            epsilon: BigRational::new(1.into(), 8.into()),
            mode: Mode::Strict,
            demo_factor: 1.0,
            e_cap: 64,
            n_attempts: 6,
            m_retries: 4096,
            demo_candidates: 256,
        }
    }

    pub fn demo(factor: f64) -> Self {
        SeedConfig { mode: Mode::Demo, demo_factor: factor, ..SeedConfig::strict() }
    }

    fn scaled(&self, bound: u64) -> u64 {
        match self.mode {
            Mode::Strict => bound,
            Mode::Demo => ((bound as f64) * self.demo_factor).ceil() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl NamedCheck {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        NamedCheck { name: name.to_string(), pass, detail: detail.into() }
    }
}

/// Marker x·x·x·y and where it sits inside every two-codeword block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerCertificate {
    pub marker_len: u64,
    pub offset: u64,
    /// Distance from the start of y inside the marker to the right end of the two-block.
    pub y_from_right: u64,
    pub checks: Vec<NamedCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGate {
    pub scale: u64,
    pub word: String,
    pub absolute_pass: bool,
    pub min_margin: f64,
    pub cyclic_ratio: f64,
    pub ratio_floor: f64,
    pub ratio_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedArtifact {
    pub mode: Mode,
    pub demo_factor: f64,
    pub scale: ScaleCertificate,
    /// Word length m controlled by the balanced step count (m = n − 1).
    pub word_scale: u64,
    /// Length of w (the N of the frequency estimate).
    pub n_freq: u64,
    pub w: BinaryWord,
    pub g: u64,
    pub horizon: u64,
    pub m_a: u64,
    pub a_start: u64,
    pub a: BinaryWord,
    pub e: u64,
    pub m_b: u64,
    pub b_start: u64,
    pub b: BinaryWord,
    /// x = a^x_reps, y = b^y_reps. Strict mode has x_reps = e·|b| and y_reps = |A|.
    pub x_reps: u64,
    pub y_reps: u64,
    pub x_len: u64,
    pub p: u64,
    pub q: u64,
    pub s: BinaryWord,
    pub t: BinaryWord,
    pub property_checks: Vec<NamedCheck>,
    pub marker: MarkerCertificate,
    pub frequency_gates: Vec<FrequencyGate>,
    pub log: Vec<String>,
}

impl SeedArtifact {
    pub fn big_a(&self) -> Result<BinaryWord> {
        words::power(&self.a, self.e)
    }

    pub fn x(&self) -> Result<BinaryWord> {
        words::power(&self.a, self.x_reps)
    }

    pub fn y(&self) -> Result<BinaryWord> {
        words::power(&self.b, self.y_reps)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.property_checks.iter().all(|c| c.pass)
            && self.marker.checks.iter().all(|c| c.pass)
            && self.frequency_gates.iter().all(|g| g.absolute_pass && g.ratio_pass)
    }
}

/// Counts of every length-`scale` factor of the circular word `host`.
fn cyclic_table(host: &BinaryWord, scale: usize) -> Vec<u8> {
    let mut v = host.as_slice().to_vec();
    v.extend_from_slice(&host.as_slice()[..scale.saturating_sub(1).min(host.len())]);
    v
}

/// min/max over `lang` of circular occurrence counts in `host`; 0 if a word is missing.
pub fn cyclic_ratio(host: &BinaryWord, lang: &BTreeSet<BinaryWord>) -> f64 {
    let Some(first) = lang.iter().next() else { return 1.0 };
    let scale = first.len();
    let text = cyclic_table(host, scale);
    let table = FactorTable::scan(&text[..], scale);
    let counts: Vec<u64> =
        lang.iter().map(|w| table.get(w.as_slice()).map_or(0, |s| s.count)).collect();
    let lo = *counts.iter().min().unwrap();
    let hi = *counts.iter().max().unwrap();
    if hi == 0 {
        0.0
    } else {
        lo as f64 / hi as f64
    }
}

struct Ctx<'a> {
    rot: &'a RotationNumber,
    cfg: &'a SeedConfig,
    m: u64,
    n: u64,
    w: BinaryWord,
    g: u64,
    lang_w: BTreeSet<BinaryWord>,
    lang_m: BTreeSet<BinaryWord>,
    lang_m1: BTreeSet<BinaryWord>,
    log: Vec<String>,
}

impl Ctx<'_> {
    /// Words every piece must contain: all of L_{|w|} in strict mode, L_m ∪ L_{m−1} in demo.
    fn w_len(&self) -> usize {
        self.w.len()
    }

    fn contains_required(&self, piece: &BinaryWord) -> Option<BinaryWord> {
        let sets: Vec<&BTreeSet<BinaryWord>> = match self.cfg.mode {
            Mode::Strict => vec![&self.lang_w],
            Mode::Demo => vec![&self.lang_m, &self.lang_m1],
        };
        for set in sets {
            let Some(first) = set.iter().next() else { continue };
            let table = FactorTable::scan(piece.as_slice(), first.len());
            if let Some(miss) = set.iter().find(|x| !table.contains(x.as_slice())) {
                return Some(miss.clone());
            }
        }
        None
    }

    fn gates(&self, name: &str, piece: &BinaryWord) -> Result<Vec<FrequencyGate>> {
        let eps = &self.cfg.epsilon;
        let eps_f = sturmian::to_f64(eps);
        let mut out = Vec::new();
        let scales: Vec<(u64, &BTreeSet<BinaryWord>, f64)> = if self.m >= 2 {
            vec![(self.m, &self.lang_m, 1.0 - 2.0 * eps_f), (self.m - 1, &self.lang_m1, 0.5 - eps_f)]
        } else {
            vec![(self.m, &self.lang_m, 1.0 - 2.0 * eps_f)]
        };
        for (scale, lang, floor) in scales {
            let rep = frequency_check(self.rot, piece, scale, eps)?;
            let min_margin = rep.entries.iter().map(|e| e.margin).fold(f64::INFINITY, f64::min);
            let cr = cyclic_ratio(piece, lang);
            out.push(FrequencyGate {
                scale,
                word: name.to_string(),
                absolute_pass: rep.pass,
                min_margin,
                cyclic_ratio: cr,
                ratio_floor: floor,
                ratio_pass: cr > floor,
            });
        }
        Ok(out)
    }

    /// Length-|w| factors of every junction pq (p, q ∈ pieces) lie in L_{|w|}.
    fn junctions_ok(&self, pieces: &[&BinaryWord]) -> bool {
        let n = self.n as usize;
        for p in pieces {
            for q in pieces {
                let left = &p.as_slice()[p.len().saturating_sub(n - 1)..];
                let right = &q.as_slice()[..(n - 1).min(q.len())];
                let joint = [left, right].concat();
                let table = FactorTable::scan(&joint, n);
                if table.words().iter().any(|x| !self.lang_w.contains(x)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Right-special words are nested suffixes of one another, so one long right-special word
/// serves every shorter m: u(m) is its suffix of length m.
struct Carver {
    len: u64,
    r: BinaryWord,
    w_len: usize,
    /// Occurrences of w0 and w1.
    occ: [Vec<usize>; 2],
    occ_w: Vec<usize>,
}

impl Carver {
    fn new(rot: &RotationNumber, len: u64, w: &BinaryWord) -> Result<Self> {
        let r = right_special(rot, len)?.word;
        if !r.as_slice().ends_with(w.as_slice()) {
            return Err(ForgeError::Internal(format!("right-special word of length {len} does not end with w")));
        }
        let occ = [0u8, 1].map(|c| occurrences(w.with_letter(c).as_slice(), r.as_slice()));
        let occ_w = occurrences(w.as_slice(), r.as_slice());
        Ok(Carver { len, r, w_len: w.len(), occ, occ_w })
    }

    fn ensure(&mut self, rot: &RotationNumber, m: u64, w: &BinaryWord) -> Result<()> {
        if m > self.len {
            *self = Carver::new(rot, m.max(2 * self.len), w)?;
        }
        Ok(())
    }

    fn end(&self) -> usize {
        self.r.len() - self.w_len
    }

    /// Factor of u(m) from its leftmost w·letter to just before the final w, with that
    /// occurrence's index in u(m). None if the index exceeds `g`.
    fn carve(&self, m: u64, letter: u8, g: u64) -> Option<(u64, BinaryWord)> {
        let start = (self.len - m) as usize;
        let occ = &self.occ[letter as usize];
        let o = *occ.get(occ.partition_point(|&o| o < start))?;
        let idx = (o - start) as u64;
        if idx > g || o >= self.end() {
            return None;
        }
        Some((idx, self.r.factor(o, self.end() - o)))
    }
}

/// Builds the seed for the word scale of `cert`.
pub fn build_seed(rot: &RotationNumber, cert: &ScaleCertificate, cfg: &SeedConfig) -> Result<SeedArtifact> {
    if !cert.is_valid() {
        return Err(ForgeError::InvalidInput(format!("scale certificate at n = {} is not valid", cert.n)));
    }
    let m = cert.word_scale();
    if m == 0 {
        return Err(ForgeError::InvalidInput("word scale must be at least 1".into()));
    }
    let mut n = m + 2;
    let mut last_err = None;
    for attempt in 0..cfg.n_attempts {
        match build_with_n(rot, cert, cfg, m, n) {
            Ok(mut art) => {
                art.log.insert(0, format!("accepted N = {n} on attempt {}", attempt + 1));
                return Ok(art);
            }
            Err(SeedFailure::Retry(why)) => {
                last_err = Some(why);
                n *= 2;
            }
            Err(SeedFailure::Fatal(e)) => return Err(e),
        }
    }
    Err(ForgeError::InconsistentParameters(format!(
        "no N up to {} produced a valid seed: {}",
        n / 2,
        last_err.unwrap_or_default()
    )))
}

enum SeedFailure {
    Retry(String),
    Fatal(ForgeError),
}

impl From<ForgeError> for SeedFailure {
    fn from(e: ForgeError) -> Self {
        SeedFailure::Fatal(e)
    }
}

fn gap_with_growing_horizon(rot: &RotationNumber, len: u64) -> Result<(u64, u64)> {
    let mut horizon = 100 * len;
    for _ in 0..10 {
        match uniform_gap(rot, len, horizon) {
            Ok(g) => return Ok((g, horizon)),
            Err(ForgeError::HorizonTooSmall(_)) => horizon *= 2,
            Err(e) => return Err(e),
        }
    }
    Err(ForgeError::HorizonTooSmall(format!("uniform gap for length {len} unstable up to horizon {horizon}")))
}

fn build_with_n(
    rot: &RotationNumber,
    cert: &ScaleCertificate,
    cfg: &SeedConfig,
    m: u64,
    n: u64,
) -> std::result::Result<SeedArtifact, SeedFailure> {
    let w = right_special(rot, n)?.word;
    let (g, horizon) = gap_with_growing_horizon(rot, n + 1)?;
    let mut ctx = Ctx {
        rot,
        cfg,
        m,
        n,
        w: w.clone(),
        g,
        lang_w: sturmian::language(rot, n)?,
        lang_m: sturmian::language(rot, m)?,
        lang_m1: if m >= 2 { sturmian::language(rot, m - 1)? } else { BTreeSet::new() },
        log: Vec::new(),
    };
    ctx.log.push(format!("N = {n}, g = {g} (horizon {horizon})"));

    // a
    let len_floor_a = cfg.scaled((2 * g + 2 * n).max(n));
    let m_a_lb = cfg.scaled(n + 3 * g + 3 * n).max(2 * n + 2);
    let mut carver = Carver::new(rot, m_a_lb + 64, &ctx.w)?;
    let mut found_a = None;
    for m_a in m_a_lb..m_a_lb + cfg.m_retries {
        carver.ensure(rot, m_a, &ctx.w)?;
        let Some((idx, a)) = carver.carve(m_a, 0, g) else { continue };
        if (a.len() as u64) < len_floor_a || ctx.contains_required(&a).is_some() {
            continue;
        }
        found_a = Some((m_a, idx, a));
        break;
    }
    let Some((m_a, a_start, a)) = found_a else {
        return Err(SeedFailure::Fatal(ForgeError::InconsistentParameters(format!(
            "no valid a for m_a in [{m_a_lb}, {})",
            m_a_lb + cfg.m_retries
        ))));
    };
    let mut gates = ctx.gates("a", &a)?;
    if gates.iter().any(|g| !(g.absolute_pass && g.ratio_pass)) {
        return Err(SeedFailure::Retry(format!("frequency gate failed for a at N = {n}")));
    }

    // e and A
    let e = find_e(rot, &a, cfg.e_cap)?;
    let big_a = words::power(&a, e)?;
    ctx.log.push(format!("m_a = {m_a}, |a| = {}, e = {e}, |A| = {}", a.len(), big_a.len()));

    // b
    let len_floor_b = cfg.scaled((2 * g + 2 * n).max(3 * big_a.len() as u64));
    let m_b_lb = cfg.scaled(3 * big_a.len() as u64 + 3 * g + 3 * n).max(2 * n + 2);
    let candidates = match cfg.mode {
        Mode::Strict => strict_b_candidates(&ctx, &mut carver, m_b_lb, a.len() as u64, e)?,
        Mode::Demo => demo_b_candidates(&ctx, &mut carver, m_b_lb, len_floor_b, a.len() as u64, e)?,
    };
    let mut chosen = None;
    // rejection tallies: length/containment, junctions, properties, frequency
    let mut rejected = [0u64; 4];
    let mut last_failure = String::new();
    for cand in candidates {
        let b = &cand.b;
        if (b.len() as u64) < len_floor_b || ctx.contains_required(b).is_some() {
            rejected[0] += 1;
            continue;
        }
        if !ctx.junctions_ok(&[&a, b]) {
            rejected[1] += 1;
            continue;
        }
        let x_len = cand.x_reps as u128 * a.len() as u128;
        limits::check_word_len(5 * x_len, "codeword s")?;
        let x = words::power(&a, cand.x_reps)?;
        let y = words::power(b, cand.y_reps)?;
        let props = verify_xy_properties(&x, &y, &big_a);
        if !props.iter().all(|c| c.pass) {
            if cfg.mode == Mode::Strict {
                return Err(SeedFailure::Fatal(ForgeError::ConstructionInvalid(format!(
                    "x/y properties fail: {}",
                    failing(&props)
                ))));
            }
            rejected[2] += 1;
            last_failure = format!("|b| = {}: {}", b.len(), failing(&props));
            continue;
        }
        let b_gates = ctx.gates("b", b)?;
        if b_gates.iter().any(|g| !(g.absolute_pass && g.ratio_pass)) {
            if cfg.mode == Mode::Strict {
                return Err(SeedFailure::Retry(format!("frequency gate failed for b at N = {n}")));
            }
            rejected[3] += 1;
            continue;
        }
        chosen = Some((cand, x, y, props, b_gates));
        break;
    }
    let Some((cand, x, y, props, b_gates)) = chosen else {
        return Err(SeedFailure::Fatal(ForgeError::InconsistentParameters(format!(
            "no valid b from m_b = {m_b_lb} with |A| = {}; rejections (length/containment, junction, properties, frequency) = {rejected:?}, N = {n}, |a| = {}, last failure: {last_failure}",
            big_a.len(),
            a.len()
        ))));
    };
    let BCandidate { m_b, idx: b_start, b, x_reps, y_reps } = cand;
    gates.extend(b_gates);
    ctx.log.push(format!("m_b = {m_b}, |b| = {}, |x| = |y| = {}", b.len(), x.len()));

    let (s, t, marker) = build_st(&x, &y)?;
    if !marker.checks.iter().all(|c| c.pass) {
        return Err(SeedFailure::Fatal(ForgeError::ConstructionInvalid(format!(
            "marker checks fail: {}",
            failing(&marker.checks)
        ))));
    }
    Ok(SeedArtifact {
        mode: cfg.mode,
        demo_factor: cfg.demo_factor,
        scale: cert.clone(),
        word_scale: m,
        n_freq: n,
        w,
        g,
        horizon,
        m_a,
        a_start,
        a,
        e,
        m_b,
        b_start,
        b,
        x_reps,
        y_reps,
        x_len: x.len() as u64,
        p: words::minimal_period(x.as_slice()) as u64,
        q: words::minimal_period(y.as_slice()) as u64,
        s,
        t,
        property_checks: props,
        marker,
        frequency_gates: gates,
        log: ctx.log,
    })
}

struct BCandidate {
    m_b: u64,
    idx: u64,
    b: BinaryWord,
    x_reps: u64,
    y_reps: u64,
}

/// Strict mode: the first m_b ≥ the lower bound whose carve succeeds, x = A^{|b|}, y = b^{|A|}.
fn strict_b_candidates(
    ctx: &Ctx<'_>,
    carver: &mut Carver,
    m_b_lb: u64,
    a_len: u64,
    e: u64,
) -> Result<Vec<BCandidate>> {
    let mut out = Vec::new();
    for m_b in m_b_lb..m_b_lb + ctx.cfg.m_retries {
        carver.ensure(ctx.rot, m_b, &ctx.w)?;
        if let Some((idx, b)) = carver.carve(m_b, 1, ctx.g) {
            let bl = b.len() as u64;
            out.push(BCandidate { m_b, idx, b, x_reps: e * bl, y_reps: e * a_len });
            break;
        }
    }
    Ok(out)
}

/// Demo mode: b is any factor of a long right-special word that starts with w1, is followed
/// by w, and has length k·|a| for some k ≥ e. Then x = a^k and y = b. Shortest first.
fn demo_b_candidates(
    ctx: &Ctx<'_>,
    carver: &mut Carver,
    m_b_lb: u64,
    len_floor_b: u64,
    a_len: u64,
    e: u64,
) -> Result<Vec<BCandidate>> {
    const KS: u64 = 8;
    const PER_K: usize = 8;
    let n = ctx.n;
    let min_b = len_floor_b.max(m_b_lb.saturating_sub(n));
    let k0 = e.max(min_b.div_ceil(a_len));
    let span = 64 * a_len + 4 * ctx.g;
    carver.ensure(ctx.rot, n + (k0 + KS) * a_len + span, &ctx.w)?;
    let mut out = Vec::new();
    for k in k0..k0 + KS {
        let b_len = (k * a_len) as usize;
        let mut found = 0;
        for &o in &carver.occ[1] {
            if o + b_len + ctx.w_len() > carver.r.len() {
                break;
            }
            if carver.occ_w.binary_search(&(o + b_len)).is_ok() {
                out.push(BCandidate {
                    m_b: b_len as u64 + n,
                    idx: 0,
                    b: carver.r.factor(o, b_len),
                    x_reps: k,
                    y_reps: 1,
                });
                found += 1;
                if found == PER_K {
                    break;
                }
            }
        }
    }
    // Fallback: b carved as in strict mode from any w1 occurrence, x = a^k and y = b^j with
    // k·|a| = j·|b| = lcm(|a|, |b|) rounded up so that k ≥ e.
    let end = carver.end();
    let mut pure: Vec<(u64, usize)> = carver.occ[1]
        .iter()
        .filter(|&&o| o < end && (end - o) as u64 >= min_b)
        .map(|&o| {
            let b_len = (end - o) as u64;
            let l = a_len.lcm(&b_len);
            (l * e.div_ceil(l / a_len), o)
        })
        .collect();
    pure.sort_unstable();
    pure.truncate(ctx.cfg.demo_candidates);
    for (l, o) in pure {
        let b_len = end - o;
        out.push(BCandidate {
            m_b: carver.len - o as u64,
            idx: 0,
            b: carver.r.factor(o, b_len),
            x_reps: l / a_len,
            y_reps: l / b_len as u64,
        });
    }
    Ok(out)
}

fn failing(checks: &[NamedCheck]) -> String {
    checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Smallest e ≥ 2 with a^e outside the language.
pub fn find_e(rot: &RotationNumber, a: &BinaryWord, cap: u64) -> Result<u64> {
    if !membership(rot, a)? {
        return Err(ForgeError::InvalidInput("a is not in the Sturmian language".into()));
    }
    for e in 2..=cap {
        if !membership(rot, &words::power(a, e)?)? {
            return Ok(e);
        }
    }
    Err(ForgeError::Resource(format!("a^e stays in the language for every e ≤ {cap}")))
}

/// The five properties of x and y.
pub fn verify_xy_properties(x: &BinaryWord, y: &BinaryWord, big_a: &BinaryWord) -> Vec<NamedCheck> {
    let xx = [x.as_slice(), x.as_slice()].concat();
    let yy = [y.as_slice(), y.as_slice()].concat();
    let xy = [x.as_slice(), y.as_slice()].concat();
    let a_in_y = occurrences(big_a.as_slice(), y.as_slice());
    let x_in_yy = occurrences(x.as_slice(), &yy);
    let y_in_xx = occurrences(y.as_slice(), &xx);
    let x_in_xy = occurrences(x.as_slice(), &xy);
    vec![
        NamedCheck::new("equal_lengths", x.len() == y.len(), format!("|x| = {}, |y| = {}", x.len(), y.len())),
        NamedCheck::new("a_power_not_in_y", a_in_y.is_empty(), first_index(&a_in_y)),
        NamedCheck::new("x_not_in_yy", x_in_yy.is_empty(), first_index(&x_in_yy)),
        NamedCheck::new("y_not_in_xx", y_in_xx.is_empty(), first_index(&y_in_xx)),
        NamedCheck::new("x_once_in_xy", x_in_xy == vec![0], format!("occurrences at {x_in_xy:?}")),
    ]
}

fn first_index(v: &[usize]) -> String {
    match v.first() {
        None => "no occurrence".to_string(),
        Some(i) => format!("occurs at index {i}"),
    }
}

/// s = xxyxx, t = xxyyx, with the marker xxxy checked in ss, st, ts, tt.
pub fn build_st(x: &BinaryWord, y: &BinaryWord) -> Result<(BinaryWord, BinaryWord, MarkerCertificate)> {
    let s = BinaryWord::concat(&[x, x, y, x, x])?;
    let t = BinaryWord::concat(&[x, x, y, y, x])?;
    let marker = BinaryWord::concat(&[x, x, x, y])?;
    let cert = marker_certificate(&s, &t, &marker, 4 * x.len() as u64);
    Ok((s, t, cert))
}

pub fn marker_certificate(s: &BinaryWord, t: &BinaryWord, marker: &BinaryWord, offset: u64) -> MarkerCertificate {
    let mut checks = Vec::new();
    for (name, p, q) in [("ss", s, s), ("st", s, t), ("ts", t, s), ("tt", t, t)] {
        let block = [p.as_slice(), q.as_slice()].concat();
        let occ = occurrences(marker.as_slice(), &block);
        checks.push(NamedCheck::new(
            &format!("marker_once_in_{name}"),
            occ == vec![offset as usize],
            format!("occurrences at {occ:?}, expected [{offset}]"),
        ));
    }
    let y_len = marker.len() as u64 / 4;
    let y_start = offset + 3 * y_len;
    MarkerCertificate {
        marker_len: marker.len() as u64,
        offset,
        y_from_right: 2 * s.len() as u64 - y_start,
        checks,
    }
}

/// Recomputes s and t from the stored generators and re-runs every structural check.
pub fn reverify(seed: &SeedArtifact) -> Result<Vec<NamedCheck>> {
    let big_a = seed.big_a()?;
    let x = seed.x()?;
    let y = seed.y()?;
    let mut out = verify_xy_properties(&x, &y, &big_a);
    let s = BinaryWord::concat(&[&x, &x, &y, &x, &x])?;
    let t = BinaryWord::concat(&[&x, &x, &y, &y, &x])?;
    out.push(NamedCheck::new("s_matches_generators", s == seed.s, "s = xxyxx"));
    out.push(NamedCheck::new("t_matches_generators", t == seed.t, "t = xxyyx"));
    let marker = BinaryWord::concat(&[&x, &x, &x, &y])?;
    let cert = marker_certificate(&seed.s, &seed.t, &marker, 4 * x.len() as u64);
    out.extend(cert.checks);
    out.push(NamedCheck::new(
        "a_starts_with_w0",
        seed.a.as_slice().starts_with(seed.w.with_letter(0).as_slice()),
        "leftmost factor of a",
    ));
    out.push(NamedCheck::new(
        "b_starts_with_w1",
        seed.b.as_slice().starts_with(seed.w.with_letter(1).as_slice()),
        "leftmost factor of b",
    ));
    out.push(NamedCheck::new("y_not_subword_of_xx", !is_subword(y.as_slice(), &[x.as_slice(), x.as_slice()].concat()), ""));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn marker_on_toy_xy() {
        let (s, t, cert) = build_st(&w("0"), &w("1")).unwrap();
        assert_eq!(s, w("00100"));
        assert_eq!(t, w("00110"));
        assert!(cert.checks.iter().all(|c| c.pass), "{:?}", cert.checks);
        assert_eq!(cert.offset, 4);
        assert_eq!(cert.y_from_right, 3);
    }

    #[test]
    fn xy_properties_detect_failures() {
        let ok = verify_xy_properties(&w("0010"), &w("0110"), &w("00"));
        assert!(ok[0].pass);
        let bad = verify_xy_properties(&w("01"), &w("01"), &w("0"));
        assert!(!bad[1].pass && !bad[2].pass && !bad[3].pass);
        assert!(!verify_xy_properties(&w("0"), &w("01"), &w("1"))[0].pass);
    }

    #[test]
    fn cyclic_ratio_counts_wraparound() {
        let lang: BTreeSet<BinaryWord> = [w("01"), w("10"), w("11")].into_iter().collect();
        // circular 011: windows 01, 11, 10
        assert_eq!(cyclic_ratio(&w("011"), &lang), 1.0);
        assert_eq!(cyclic_ratio(&w("0101"), &lang), 0.0);
    }
    fn scales(count: usize) -> (RotationNumber, Vec<ScaleCertificate>) {
        let rot = RotationNumber::default_alpha(11);
        let eps = BigRational::new(1.into(), 8.into());
        let certs = crate::rotation::find_balanced_scales(&rot, &eps, count, 1, 200_000).unwrap();
        (rot, certs)
    }

    #[test]
    fn long_right_special_word_serves_shorter_lengths() {
        let (rot, _) = scales(1);
        let w = right_special(&rot, 5).unwrap().word;
        let carver = Carver::new(&rot, 300, &w).unwrap();
        for m in [6u64, 40, 123, 299] {
            let u = right_special(&rot, m).unwrap().word;
            assert!(carver.r.as_slice().ends_with(u.as_slice()), "m = {m}");
        }
    }

    #[test]
    fn strict_level_one_seed() {
        let (rot, certs) = scales(1);
        let seed = build_seed(&rot, &certs[0], &SeedConfig::strict()).unwrap();
        assert!(seed.all_checks_pass());
        assert_eq!(seed.word_scale, 1);
        assert_eq!(seed.x_reps, seed.e * seed.b.len() as u64);
        assert_eq!(seed.y_reps, seed.e * seed.a.len() as u64);
        assert!(seed.b.len() >= 3 * seed.big_a().unwrap().len());
        assert!(reverify(&seed).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn demo_level_one_seed_is_small() {
        let (rot, certs) = scales(1);
        let seed = build_seed(&rot, &certs[0], &SeedConfig::demo(DEFAULT_DEMO_FACTOR)).unwrap();
        assert!(seed.all_checks_pass());
        assert!(seed.s.len() < 10_000);
        assert!(seed.x_reps >= seed.e);
        assert!(reverify(&seed).unwrap().iter().all(|c| c.pass));
    }
}
