//! Finite binary words and the string machinery the construction leans on.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ForgeError, Result};
use crate::limits;

/// A finite word over {0,1}, one letter per byte.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(i) = letters.iter().position(|&c| c > 1) {
            return Err(ForgeError::InvalidInput(format!(
                "letter {} at index {i} is not binary",
                letters[i]
            )));
        }
        Ok(BinaryWord(letters))
    }

    /// Caller guarantees every byte is 0 or 1.
    pub(crate) fn from_bits(letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&c| c <= 1));
        BinaryWord(letters)
    }

    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn letter(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn factor(&self, start: usize, len: usize) -> BinaryWord {
        BinaryWord(self.0[start..start + len].to_vec())
    }

    pub fn concat(parts: &[&BinaryWord]) -> Result<BinaryWord> {
        let total: u128 = parts.iter().map(|p| p.len() as u128).sum();
        let total = limits::check_word_len(total, "concatenation")?;
        let mut out = Vec::with_capacity(total);
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Ok(BinaryWord(out))
    }

    pub fn push(&mut self, letter: u8) {
        assert!(letter <= 1, "letter must be 0 or 1");
        self.0.push(letter);
    }

    pub fn with_letter(&self, letter: u8) -> BinaryWord {
        let mut v = self.0.clone();
        v.push(letter);
        BinaryWord::from_bits(v)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&c| c == 1).count()
    }

    /// Run-length form: `RLE:<first letter>:<run>,<run>,...`.
    pub fn to_rle(&self) -> String {
        let mut s = String::from("RLE:");
        let Some(&first) = self.0.first() else {
            return s;
        };
        s.push(char::from(b'0' + first));
        s.push(':');
        let mut runs = Vec::new();
        let mut cur = first;
        let mut n = 0u64;
        for &c in &self.0 {
            if c == cur {
                n += 1;
            } else {
                runs.push(n.to_string());
                cur = c;
                n = 1;
            }
        }
        runs.push(n.to_string());
        s.push_str(&runs.join(","));
        s
    }

    fn from_rle(body: &str) -> Result<BinaryWord> {
        if body.is_empty() {
            return Ok(BinaryWord::empty());
        }
        let (first, runs) = body
            .split_once(':')
            .ok_or_else(|| ForgeError::InvalidInput("RLE word lacks ':' separator".into()))?;
        let mut cur = match first {
            "0" => 0u8,
            "1" => 1u8,
            _ => return Err(ForgeError::InvalidInput(format!("bad RLE start letter {first:?}"))),
        };
        let mut out = Vec::new();
        for r in runs.split(',') {
            let n: usize = r
                .trim()
                .parse()
                .map_err(|_| ForgeError::InvalidInput(format!("bad RLE run {r:?}")))?;
            if n == 0 {
                return Err(ForgeError::InvalidInput("RLE run of length 0".into()));
            }
            limits::check_word_len((out.len() + n) as u128, "decoded RLE word")?;
            out.resize(out.len() + n, cur);
            cur ^= 1;
        }
        Ok(BinaryWord(out))
    }

    /// Shortest of the plain and run-length encodings.
    pub fn to_compact_string(&self) -> String {
        if self.len() < 256 {
            return self.to_string();
        }
        let rle = self.to_rle();
        if rle.len() < self.len() {
            rle
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&c| char::from(b'0' + c)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "BinaryWord(\"{self}\")")
        } else {
            write!(f, "BinaryWord(len={})", self.len())
        }
    }
}

impl FromStr for BinaryWord {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("RLE:") {
            return BinaryWord::from_rle(body);
        }
        let mut out = Vec::with_capacity(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => out.push(0),
                '1' => out.push(1),
                _ => {
                    return Err(ForgeError::InvalidInput(format!(
                        "character {ch:?} at index {i} is not 0 or 1"
                    )))
                }
            }
        }
        Ok(BinaryWord(out))
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_compact_string())
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl AsRef<[u8]> for BinaryWord {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Border array: `b[i]` is the length of the longest proper border of `w[..=i]`.
pub fn border_array(w: &[u8]) -> Vec<usize> {
    let mut b = vec![0usize; w.len()];
    let mut k = 0usize;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = b[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        b[i] = k;
    }
    b
}

/// Smallest p ≥ 1 with `w[i] == w[i+p]` wherever both sides exist.
pub fn minimal_period(w: &[u8]) -> usize {
    if w.is_empty() {
        return 1;
    }
    w.len() - border_array(w)[w.len() - 1]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStats {
    pub minimal_period: usize,
    pub borders: Vec<usize>,
}

pub fn word_stats(w: &[u8]) -> WordStats {
    let borders = border_array(w);
    let minimal_period = if w.is_empty() { 1 } else { w.len() - borders[w.len() - 1] };
    WordStats { minimal_period, borders }
}

/// All start indices of `needle` in `haystack` (overlaps included), by KMP.
pub fn occurrences(needle: &[u8], haystack: &[u8]) -> Vec<usize> {
    let mut out = Vec::new();
    for_each_occurrence(needle, haystack, |i| {
        out.push(i);
        true
    });
    out
}

/// Streams occurrences to `f`; stops early when `f` returns false.
pub fn for_each_occurrence(needle: &[u8], haystack: &[u8], mut f: impl FnMut(usize) -> bool) {
    if needle.is_empty() {
        for i in 0..=haystack.len() {
            if !f(i) {
                return;
            }
        }
        return;
    }
    if needle.len() > haystack.len() {
        return;
    }
    let b = border_array(needle);
    let mut k = 0usize;
    for (i, &c) in haystack.iter().enumerate() {
        while k > 0 && c != needle[k] {
            k = b[k - 1];
        }
        if c == needle[k] {
            k += 1;
        }
        if k == needle.len() {
            if !f(i + 1 - k) {
                return;
            }
            k = b[k - 1];
        }
    }
}

pub fn count_occurrences(needle: &[u8], haystack: &[u8]) -> usize {
    let mut n = 0;
    for_each_occurrence(needle, haystack, |_| {
        n += 1;
        true
    });
    n
}

pub fn is_subword(u: &[u8], w: &[u8]) -> bool {
    let mut found = false;
    for_each_occurrence(u, w, |_| {
        found = true;
        false
    });
    found
}

/// Z-function: `z[i]` is the length of the longest common prefix of `s` and `s[i..]`; `z[0] = |s|`.
pub fn z_function(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0usize; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

pub fn power(w: &BinaryWord, e: u64) -> Result<BinaryWord> {
    if e == 0 {
        return Err(ForgeError::InvalidInput("power exponent must be at least 1".into()));
    }
    let total = limits::check_word_len(w.len() as u128 * e as u128, "power")?;
    let mut out = Vec::with_capacity(total);
    for _ in 0..e {
        out.extend_from_slice(w.as_slice());
    }
    Ok(BinaryWord(out))
}

/// Length of the longest common prefix.
pub fn lcp(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Length of the longest common suffix.
pub fn lcs(a: &[u8], b: &[u8]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

/// Occurrence statistics of one factor inside a scanned text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorStats {
    pub count: u64,
    pub first: usize,
    pub last: usize,
    /// Largest distance between consecutive start positions (0 if it occurs once).
    pub max_gap: usize,
}

/// Distinct factors of a fixed length in a text, with counts and return gaps.
///
/// Factors of length ≤ 128 are packed into a `u128`; longer ones borrow slices.
pub struct FactorTable<'a> {
    len: usize,
    total_windows: u64,
    packed: HashMap<u128, FactorStats>,
    slices: HashMap<&'a [u8], FactorStats>,
}

fn record<K: std::hash::Hash + Eq>(map: &mut HashMap<K, FactorStats>, key: K, pos: usize) {
    map.entry(key)
        .and_modify(|st| {
            st.count += 1;
            st.max_gap = st.max_gap.max(pos - st.last);
            st.last = pos;
        })
        .or_insert(FactorStats { count: 1, first: pos, last: pos, max_gap: 0 });
}

fn pack(w: &[u8]) -> u128 {
    w.iter().fold(0u128, |k, &c| (k << 1) | c as u128)
}

impl<'a> FactorTable<'a> {
    pub fn scan(text: &'a [u8], len: usize) -> Self {
        let mut t = FactorTable {
            len,
            total_windows: 0,
            packed: HashMap::new(),
            slices: HashMap::new(),
        };
        if len == 0 || text.len() < len {
            return t;
        }
        t.total_windows = (text.len() - len + 1) as u64;
        if len <= 128 {
            let mask: u128 = if len == 128 { u128::MAX } else { (1u128 << len) - 1 };
            let mut key: u128 = 0;
            for (i, &c) in text.iter().enumerate() {
                key = ((key << 1) | c as u128) & mask;
                if i + 1 >= len {
                    record(&mut t.packed, key, i + 1 - len);
                }
            }
        } else {
            for pos in 0..=text.len() - len {
                record(&mut t.slices, &text[pos..pos + len], pos);
            }
        }
        t
    }

    pub fn factor_len(&self) -> usize {
        self.len
    }

    pub fn distinct(&self) -> usize {
        self.packed.len() + self.slices.len()
    }

    pub fn total_windows(&self) -> u64 {
        self.total_windows
    }

    fn unpack(&self, k: u128) -> BinaryWord {
        BinaryWord((0..self.len).map(|i| ((k >> (self.len - 1 - i)) & 1) as u8).collect())
    }

    pub fn get(&self, w: &[u8]) -> Option<FactorStats> {
        if w.len() != self.len {
            return None;
        }
        if self.len <= 128 {
            self.packed.get(&pack(w)).copied()
        } else {
            self.slices.get(w).copied()
        }
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.get(w).is_some()
    }

    /// Factors in lexicographic order with their statistics.
    pub fn entries(&self) -> Vec<(BinaryWord, FactorStats)> {
        let mut v: Vec<(BinaryWord, FactorStats)> = self
            .packed
            .iter()
            .map(|(&k, st)| (self.unpack(k), *st))
            .chain(self.slices.iter().map(|(k, st)| (BinaryWord(k.to_vec()), *st)))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn words(&self) -> BTreeSet<BinaryWord> {
        self.entries().into_iter().map(|(w, _)| w).collect()
    }
}

/// The two index words behind a covering pair: all `k`-bit patterns in
/// increasing order, and in decreasing order, each followed by the block pair `0 1`.
pub fn covering_index_patterns(k: u32) -> Result<(Vec<u8>, Vec<u8>)> {
    if k == 0 || k > 24 {
        return Err(ForgeError::Resource(format!(
            "{k}-bit index patterns cannot be listed explicitly"
        )));
    }
    let count = 1u64 << k;
    let mut u = Vec::with_capacity((count * k as u64 + 2) as usize);
    let mut v = Vec::with_capacity(u.capacity());
    for i in 0..count {
        push_pattern(&mut u, i, k);
        push_pattern(&mut v, count - 1 - i, k);
    }
    u.extend_from_slice(&[0, 1]);
    v.extend_from_slice(&[0, 1]);
    Ok((u, v))
}

fn push_pattern(out: &mut Vec<u8>, i: u64, k: u32) {
    for j in (0..k).rev() {
        out.push(((i >> j) & 1) as u8);
    }
}

/// Number of consecutive blocks any length-`m` factor can touch: ⌈m/L⌉ + 1.
pub fn covering_pattern_len(m: u128, block_len: u128) -> u128 {
    m.div_ceil(block_len) + 1
}

/// Two distinct equal-length concatenations of `s` and `t` that each contain
/// every word of `target` (all of length `m`).
pub fn covering_pair(
    s: &BinaryWord,
    t: &BinaryWord,
    m: usize,
    target: &BTreeSet<BinaryWord>,
) -> Result<(BinaryWord, BinaryWord)> {
    if s.len() != t.len() || s.is_empty() || s == t {
        return Err(ForgeError::InvalidInput(
            "covering pair needs two distinct nonempty codewords of equal length".into(),
        ));
    }
    if m == 0 {
        return Err(ForgeError::InvalidInput("covering scale must be at least 1".into()));
    }
    let k = covering_pattern_len(m as u128, s.len() as u128) as u32;
    let (iu, iv) = covering_index_patterns(k)?;
    let expand = |idx: &[u8]| -> Result<BinaryWord> {
        let parts: Vec<&BinaryWord> = idx.iter().map(|&i| if i == 0 { s } else { t }).collect();
        BinaryWord::concat(&parts)
    };
    let u = expand(&iu)?;
    let v = expand(&iv)?;
    for (name, word) in [("u", &u), ("v", &v)] {
        let table = FactorTable::scan(word.as_slice(), m);
        if let Some(missing) = target.iter().find(|w| w.len() != m || !table.contains(w.as_slice())) {
            return Err(ForgeError::Internal(format!(
                "covering word {name} misses target factor {missing:?}"
            )));
        }
    }
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    fn brute_period(v: &[u8]) -> usize {
        (1..=v.len().max(1))
            .find(|&p| (0..v.len().saturating_sub(p)).all(|i| v[i] == v[i + p]))
            .unwrap()
    }

    fn brute_occurrences(n: &[u8], h: &[u8]) -> Vec<usize> {
        if n.len() > h.len() {
            return vec![];
        }
        (0..=h.len() - n.len()).filter(|&i| &h[i..i + n.len()] == n).collect()
    }

    #[test]
    fn periods() {
        assert_eq!(minimal_period(w("0000").as_slice()), 1);
        assert_eq!(minimal_period(w("01").as_slice()), 2);
        assert_eq!(minimal_period(w("01001").as_slice()), 3);
    }

    #[test]
    fn occurrence_examples() {
        assert_eq!(occurrences(&[0], w("010").as_slice()), vec![0, 2]);
        assert_eq!(occurrences(&[1, 1], w("1111").as_slice()), vec![0, 1, 2]);
        assert!(is_subword(&[], w("1").as_slice()));
    }

    #[test]
    fn powers() {
        assert_eq!(power(&w("01"), 1).unwrap(), w("01"));
        assert_eq!(power(&w("01"), 3).unwrap(), w("010101"));
        assert!(power(&w("01"), 0).is_err());
    }

    #[test]
    fn rle_round_trip() {
        let x = w("0001101111");
        assert_eq!(x.to_rle(), "RLE:0:3,2,1,4");
        assert_eq!(x.to_rle().parse::<BinaryWord>().unwrap(), x);
        assert_eq!("RLE:".parse::<BinaryWord>().unwrap(), BinaryWord::empty());
        assert!("RLE:0:3,0".parse::<BinaryWord>().is_err());
        assert!("0120".parse::<BinaryWord>().is_err());
    }

    #[test]
    fn serde_round_trip_long_word() {
        let x = BinaryWord::new([vec![0u8; 500], vec![1u8; 300]].concat()).unwrap();
        let js = serde_json::to_string(&x).unwrap();
        assert!(js.contains("RLE:"));
        let back: BinaryWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn factor_table_counts_and_gaps() {
        let text = w("0101101");
        let t = FactorTable::scan(text.as_slice(), 2);
        assert_eq!(t.distinct(), 3);
        let st = t.get(&[0, 1]).unwrap();
        assert_eq!((st.count, st.first, st.last, st.max_gap), (3, 0, 5, 3));
        assert!(!t.contains(&[0, 0]));
        let long: Vec<u8> = (0..600).map(|i| ((i * 7) % 5 == 0) as u8).collect();
        let tl = FactorTable::scan(&long, 200);
        assert!(tl.contains(&long[17..217]));
        assert_eq!(tl.get(&long[0..200]).unwrap().first, 0);
    }

    #[test]
    fn covering_pair_toy() {
        let s = w("001");
        let t = w("011");
        let mut target = BTreeSet::new();
        for a in [&s, &t] {
            for b in [&s, &t] {
                let ab = BinaryWord::concat(&[a, b]).unwrap();
                for i in 0..=ab.len() - 3 {
                    target.insert(ab.factor(i, 3));
                }
            }
        }
        let (u, v) = covering_pair(&s, &t, 3, &target).unwrap();
        assert_ne!(u, v);
        assert_eq!(u.len(), v.len());
        for x in &target {
            assert!(is_subword(x.as_slice(), u.as_slice()));
            assert!(is_subword(x.as_slice(), v.as_slice()));
        }
    }

    #[test]
    fn covering_patterns_shape() {
        let (u, v) = covering_index_patterns(2).unwrap();
        assert_eq!(u, vec![0, 0, 0, 1, 1, 0, 1, 1, 0, 1]);
        assert_eq!(v, vec![1, 1, 1, 0, 0, 1, 0, 0, 0, 1]);
    }

    proptest! {
        #[test]
        fn period_matches_brute(v in prop::collection::vec(0u8..2, 1..64)) {
            prop_assert_eq!(minimal_period(&v), brute_period(&v));
        }

        #[test]
        fn occurrences_match_brute(n in prop::collection::vec(0u8..2, 1..6),
                                   h in prop::collection::vec(0u8..2, 0..80)) {
            let occ = occurrences(&n, &h);
            prop_assert_eq!(&occ, &brute_occurrences(&n, &h));
            prop_assert_eq!(is_subword(&n, &h), !occ.is_empty());
        }

        #[test]
        fn z_matches_brute(v in prop::collection::vec(0u8..2, 1..60)) {
            let z = z_function(&v);
            for i in 1..v.len() {
                prop_assert_eq!(z[i], lcp(&v, &v[i..]));
            }
        }

        #[test]
        fn factor_table_matches_brute(v in prop::collection::vec(0u8..2, 0..120), len in 1usize..8) {
            let t = FactorTable::scan(&v, len);
            let mut brute: BTreeSet<Vec<u8>> = BTreeSet::new();
            if v.len() >= len {
                for i in 0..=v.len() - len { brute.insert(v[i..i + len].to_vec()); }
            }
            let got: BTreeSet<Vec<u8>> = t.words().into_iter().map(|w| w.into_vec()).collect();
            prop_assert_eq!(got, brute);
        }
    }
}
