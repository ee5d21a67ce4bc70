//! The Sturmian shift of α: coding against {[0,α), [α,1)}, cylinders, language.
//!
//! Cylinders of words of length n are the cells of the circle partition cut by
//! the n + 1 points {α, 0, −α, ..., −(n−1)α}. Each cell's word is read off from
//! its left endpoint, which is itself an orbit point, so the whole language of
//! length n is the set of windows of one two-sided coding of 0.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::rotation::{deepen, ratio, ExactPoint, RotationNumber, Truncation};
use crate::words::{BinaryWord, FactorTable};

/// Truncation valid for every comparison behind words of length `n`.
pub fn frame(rot: &RotationNumber, n: u64) -> Result<Truncation> {
    let n = n.max(1);
    let mut tr = rot.truncate_to_rational(2 * (n as u128 + 1))?;
    loop {
        let mg = tr.min_return_units(n + 1, rot)?;
        // cut points move by at most n·err; the boundary α by err
        if 2 * (n as u128) < mg as u128 * tr.next_q {
            return Ok(tr);
        }
        tr = deepen(rot, &tr, "word frame")?;
    }
}

#[inline]
fn letter_at(tr: &Truncation, k: i64) -> u8 {
    let x = if k >= 0 { tr.point(k as u64) } else { tr.neg_point(k.unsigned_abs()) };
    u8::from(x >= tr.p)
}

/// Coding of 0 at positions `from..to` (negative positions allowed).
fn two_sided(tr: &Truncation, from: i64, to: i64) -> Vec<u8> {
    (from..to).map(|k| letter_at(tr, k)).collect()
}

/// Coding of the orbit of `start`: letter i is 0 iff start + iα mod 1 ∈ [0, α).
pub fn code_point(rot: &RotationNumber, start: &ExactPoint, length: u64) -> Result<BinaryWord> {
    let v = start.value();
    let den = v.denom().to_u128().filter(|&d| d < 1u128 << 63).ok_or_else(|| {
        ForgeError::InvalidInput("start point denominator must fit in 63 bits".into())
    })?;
    let num = v.numer().to_u128().unwrap_or(0);
    let mut tr = frame(rot, 1)?;
    'retry: loop {
        let q = tr.q as u128;
        let modulus = den * q;
        let step = tr.p as u128 * den;
        let bound = tr.p as u128 * den;
        let mut y = num * q;
        let mut out = Vec::with_capacity(length as usize);
        for i in 0..length as u128 {
            let letter = u8::from(y >= bound);
            let d0 = y.min(modulus - y);
            let d1 = y.abs_diff(bound);
            // Relative to 0 the point drifts by i·err, relative to α by |i−1|·err, with
            // err < 1/(q q'), i.e. den/q' units of 1/modulus per step. A drift of zero is exact.
            let safe = |d: u128, steps: u128| {
                steps == 0 || d.checked_mul(tr.next_q).is_none_or(|v| v > steps * den)
            };
            let (safe0, safe1) = (safe(d0, i), safe(d1, i.abs_diff(1)));
            if !(safe0 && safe1) {
                tr = deepen(rot, &tr, "orbit coding")?;
                continue 'retry;
            }
            out.push(letter);
            y += step;
            if y >= modulus {
                y -= modulus;
            }
        }
        return Ok(BinaryWord::from_bits(out));
    }
}

/// Coding of the orbit of 0 (the most common case), length `n`.
pub fn code_origin(rot: &RotationNumber, n: u64) -> Result<BinaryWord> {
    code_point(rot, &ExactPoint(BigRational::zero()), n)
}

/// Exact cylinder of a word: an arc of the circle, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderInterval {
    pub word: BinaryWord,
    /// Left endpoint (inclusive); meaningless when empty.
    pub start: ExactPoint,
    /// Right endpoint (exclusive); `end < start` means the arc wraps through 0.
    pub end: ExactPoint,
    pub length: BigRational,
    pub empty: bool,
}

/// Linear half-open intervals in units of 1/q.
fn arc_pieces(start: u64, len: u64, q: u64) -> Vec<(u64, u64)> {
    if len == 0 {
        vec![]
    } else if len >= q {
        vec![(0, q)]
    } else if start + len <= q {
        vec![(start, start + len)]
    } else {
        vec![(0, start + len - q), (start, q)]
    }
}

fn intersect(a: &[(u64, u64)], b: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn cylinder(rot: &RotationNumber, word: &BinaryWord) -> Result<CylinderInterval> {
    if word.is_empty() {
        return Err(ForgeError::InvalidInput("cylinder of the empty word".into()));
    }
    let tr = frame(rot, word.len() as u64)?;
    let q = tr.q;
    let mut set = vec![(0u64, q)];
    for (i, &c) in word.as_slice().iter().enumerate() {
        let ni = tr.neg_point(i as u64);
        let arc = if c == 0 {
            arc_pieces(ni, tr.p, q)
        } else {
            arc_pieces((ni + tr.p) % q, q - tr.p, q)
        };
        set = intersect(&set, &arc);
        if set.is_empty() {
            break;
        }
    }
    let total: u64 = set.iter().map(|&(a, b)| b - a).sum();
    let (start, end) = match set.as_slice() {
        [] => (0, 0),
        [(a, b)] => (*a, *b % q),
        [(0, a), (b, e)] if *e == q => (*b, *a),
        _ => {
            return Err(ForgeError::Internal(format!(
                "cylinder of {word:?} is not a single arc: {set:?}"
            )))
        }
    };
    Ok(CylinderInterval {
        word: word.clone(),
        start: ExactPoint::from_units(start, q),
        end: ExactPoint::from_units(end, q),
        length: ratio(total as u128, q as u128),
        empty: total == 0,
    })
}

pub fn membership(rot: &RotationNumber, word: &BinaryWord) -> Result<bool> {
    if word.is_empty() {
        return Ok(true);
    }
    Ok(!cylinder(rot, word)?.empty)
}

/// Words of length n with their cylinder measures, in lexicographic order.
pub fn language_with_measures(rot: &RotationNumber, n: u64) -> Result<Vec<(BinaryWord, BigRational)>> {
    if n == 0 {
        return Err(ForgeError::InvalidInput("language length must be at least 1".into()));
    }
    let tr = frame(rot, n)?;
    // cut point −jα for j = −1..n−1, with its orbit index −j
    let mut cuts: Vec<(u64, i64)> = (-1..n as i64)
        .map(|j| {
            let x = if j < 0 { tr.point(1) } else { tr.neg_point(j as u64) };
            (x, -j)
        })
        .collect();
    cuts.sort_unstable();
    let n_us = n as usize;
    let coding = two_sided(&tr, -(n as i64) + 1, n as i64 + 1);
    let offset = n as i64 - 1;
    let mut out = Vec::with_capacity(cuts.len());
    for (idx, &(x, k)) in cuts.iter().enumerate() {
        let next = if idx + 1 < cuts.len() { cuts[idx + 1].0 } else { cuts[0].0 + tr.q };
        let s = (k + offset) as usize;
        let w = BinaryWord::from_bits(coding[s..s + n_us].to_vec());
        out.push((w, ratio((next - x) as u128, tr.q as u128)));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in out.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(ForgeError::Internal(format!("two cells code to {:?}", pair[0].0)));
        }
    }
    Ok(out)
}

pub fn language(rot: &RotationNumber, n: u64) -> Result<BTreeSet<BinaryWord>> {
    Ok(language_with_measures(rot, n)?.into_iter().map(|(w, _)| w).collect())
}

/// The unique word w of length m with both w0 and w1 in the language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightSpecialWitness {
    pub word: BinaryWord,
    pub extension_measures: (BigRational, BigRational),
}

pub fn right_special(rot: &RotationNumber, m: u64) -> Result<RightSpecialWitness> {
    if m == 0 {
        return Err(ForgeError::InvalidInput("right-special length must be at least 1".into()));
    }
    let tr = frame(rot, m + 1)?;
    let target = tr.neg_point(m);
    // Left endpoint of the length-m cell containing −mα: the largest cut point ≤ target.
    // 0 is always a cut point, so some cut point lies at or below the target.
    let mut best: Option<(u64, i64)> = None;
    for j in -1..m as i64 {
        let x = if j < 0 { tr.point(1) } else { tr.neg_point(j as u64) };
        if x <= target && best.is_none_or(|(b, _)| x > b) {
            best = Some((x, -j));
        }
    }
    let (_, k) = best.unwrap();
    let word = BinaryWord::from_bits(two_sided(&tr, k, k + m as i64));
    let c0 = cylinder(rot, &word.with_letter(0))?;
    let c1 = cylinder(rot, &word.with_letter(1))?;
    if c0.empty || c1.empty {
        return Err(ForgeError::Internal(format!(
            "right-special candidate of length {m} lacks an extension"
        )));
    }
    Ok(RightSpecialWitness { word, extension_measures: (c0.length, c1.length) })
}

/// Per-word comparison of host counts against cylinder measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub word: BinaryWord,
    pub count: u64,
    pub frequency: f64,
    pub measure: f64,
    /// ε − |count/|host| − ν|, positive when the entry passes.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub scale: u64,
    pub host_len: u64,
    pub epsilon: BigRational,
    pub entries: Vec<FrequencyEntry>,
    pub pass: bool,
}

pub fn frequency_check(
    rot: &RotationNumber,
    host: &BinaryWord,
    scale: u64,
    epsilon: &BigRational,
) -> Result<FrequencyReport> {
    if scale == 0 || (host.len() as u64) < scale {
        return Err(ForgeError::InvalidInput(format!(
            "host of length {} is shorter than scale {scale}",
            host.len()
        )));
    }
    if !membership(rot, host)? {
        return Err(ForgeError::InvalidInput("host word is not in the Sturmian language".into()));
    }
    let table = FactorTable::scan(host.as_slice(), scale as usize);
    let h = BigRational::from_integer(BigInt::from(host.len()));
    let mut entries = Vec::new();
    let mut pass = true;
    for (w, nu) in language_with_measures(rot, scale)? {
        let count = table.get(w.as_slice()).map_or(0, |s| s.count);
        let freq = BigRational::from_integer(BigInt::from(count)) / &h;
        let dev = (&freq - &nu).abs();
        let ok = &dev < epsilon;
        pass &= ok;
        entries.push(FrequencyEntry {
            word: w,
            count,
            frequency: to_f64(&freq),
            measure: to_f64(&nu),
            margin: to_f64(&(epsilon - &dev)),
            pass: ok,
        });
    }
    Ok(FrequencyReport {
        scale,
        host_len: host.len() as u64,
        epsilon: epsilon.clone(),
        entries,
        pass,
    })
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest return time of any word of length `word_length` along the orbit of 0,
/// stable between `horizon` and `2·horizon`.
pub fn uniform_gap(rot: &RotationNumber, word_length: u64, horizon: u64) -> Result<u64> {
    if word_length == 0 {
        return Err(ForgeError::InvalidInput("word length must be at least 1".into()));
    }
    if horizon < 100 * word_length {
        return Err(ForgeError::InvalidInput(format!(
            "horizon {horizon} must be at least 100·{word_length}"
        )));
    }
    let long = code_origin(rot, 2 * horizon)?;
    let gap_over = |len: usize| -> Result<u64> {
        let t = FactorTable::scan(&long.as_slice()[..len], word_length as usize);
        if t.distinct() as u64 != word_length + 1 {
            return Err(ForgeError::HorizonTooSmall(format!(
                "only {} of {} words of length {word_length} seen within {len} letters",
                t.distinct(),
                word_length + 1
            )));
        }
        let mut g = 0u64;
        for (_, st) in t.entries() {
            if st.count < 2 {
                return Err(ForgeError::HorizonTooSmall(format!(
                    "a word of length {word_length} occurs once within {len} letters"
                )));
            }
            g = g.max(st.max_gap as u64);
        }
        Ok(g)
    };
    let g1 = gap_over(horizon as usize)?;
    let g2 = gap_over(2 * horizon as usize)?;
    if g1 != g2 {
        return Err(ForgeError::HorizonTooSmall(format!(
            "gap {g1} at horizon {horizon} but {g2} at {}",
            2 * horizon
        )));
    }
    Ok(g1)
}

/// Sum of cylinder measures over the language of length n (exactly 1).
pub fn total_measure(rot: &RotationNumber, n: u64) -> Result<BigRational> {
    Ok(language_with_measures(rot, n)?
        .into_iter()
        .fold(BigRational::zero(), |a, (_, m)| a + m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_traits::One;

    fn alpha() -> RotationNumber {
        RotationNumber::default_alpha(10)
    }

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn coding_examples() {
        let a = alpha();
        assert_eq!(code_origin(&a, 1).unwrap(), w("0"));
        assert_eq!(code_origin(&a, 2).unwrap(), w("01"));
        // Just below 1 − α both x and x + α land in [α, 1); just above, x + α wraps into [0, α).
        let tr = a.truncation_at(8).unwrap();
        let one_minus = BigRational::one() - ratio(tr.p as u128, tr.q as u128);
        let below = ExactPoint::new(&one_minus - r(1, 1_000_000)).unwrap();
        let above = ExactPoint::new(&one_minus + r(1, 1_000_000)).unwrap();
        assert_eq!(code_point(&a, &below, 2).unwrap(), w("11"));
        assert_eq!(code_point(&a, &above, 2).unwrap(), w("10"));
        assert_eq!(
            code_point(&a, &ExactPoint::new(r(1, 3)).unwrap(), 50).unwrap().as_slice(),
            brute_code(1.0 / 3.0, 50).as_slice()
        );
    }

    /// Floating-point oracle, fine for short orbits away from the boundaries.
    fn brute_code(x: f64, n: usize) -> Vec<u8> {
        let mut alpha = 0.0f64;
        for &a in RotationNumber::default_alpha(10).partial_quotients()[1..].iter().rev() {
            alpha = 1.0 / (a as f64 + alpha);
        }
        (0..n).map(|i| u8::from((x + i as f64 * alpha).fract() >= alpha)).collect()
    }

    #[test]
    fn cylinder_examples() {
        let a = alpha();
        let c0 = cylinder(&a, &w("0")).unwrap();
        let tr = frame(&a, 1).unwrap();
        assert_eq!(c0.length, ratio(tr.p as u128, tr.q as u128));
        assert_eq!(c0.start, ExactPoint(BigRational::zero()));
        assert!(cylinder(&a, &w("00")).unwrap().empty);
        let c11 = cylinder(&a, &w("11")).unwrap();
        assert!(!c11.empty);
        // [α,1) ∩ [−α, 1−α) = [α, 1−α): length 1 − 2α
        let tr = frame(&a, 2).unwrap();
        assert_eq!(c11.length, BigRational::one() - ratio(2 * tr.p as u128, tr.q as u128));
    }

    #[test]
    fn language_examples() {
        let a = alpha();
        assert_eq!(language(&a, 1).unwrap(), [w("0"), w("1")].into_iter().collect());
        assert_eq!(language(&a, 2).unwrap(), [w("01"), w("10"), w("11")].into_iter().collect());
        assert_eq!(language(&a, 5).unwrap().len(), 6);
    }

    #[test]
    fn language_matches_cylinders_and_orbit() {
        let a = alpha();
        let orbit = code_origin(&a, 20_000).unwrap();
        for n in 1..=60u64 {
            let lang = language_with_measures(&a, n).unwrap();
            assert_eq!(lang.len() as u64, n + 1);
            let total = lang.iter().fold(BigRational::zero(), |acc, (_, m)| acc + m);
            assert_eq!(total, BigRational::one());
            for (word, m) in &lang {
                let c = cylinder(&a, word).unwrap();
                assert!(!c.empty);
                assert_eq!(&c.length, m);
            }
            let seen = FactorTable::scan(orbit.as_slice(), n as usize).words();
            let set: BTreeSet<BinaryWord> = lang.into_iter().map(|(x, _)| x).collect();
            assert_eq!(seen, set, "n={n}");
        }
    }

    #[test]
    fn right_special_examples() {
        let a = alpha();
        assert_eq!(right_special(&a, 1).unwrap().word, w("1"));
        let mut prev = right_special(&a, 1).unwrap().word;
        for m in 2..80u64 {
            let rs = right_special(&a, m).unwrap().word;
            assert!(rs.as_slice().ends_with(prev.as_slice()));
            let lang: BTreeSet<BinaryWord> = language(&a, m + 1).unwrap();
            let brute: Vec<BinaryWord> = language(&a, m)
                .unwrap()
                .into_iter()
                .filter(|x| lang.contains(&x.with_letter(0)) && lang.contains(&x.with_letter(1)))
                .collect();
            assert_eq!(brute, vec![rs.clone()]);
            prev = rs;
        }
    }

    #[test]
    fn membership_examples() {
        let a = alpha();
        assert!(membership(&a, &w("0")).unwrap());
        assert!(!membership(&a, &w("00")).unwrap());
    }

    #[test]
    fn frequency_examples() {
        let a = alpha();
        let eps = r(1, 8);
        let host = code_origin(&a, 10_000).unwrap();
        let rep = frequency_check(&a, &host, 3, &eps).unwrap();
        assert!(rep.pass);
        let single = w("101");
        let rep = frequency_check(&a, &single, 3, &eps).unwrap();
        let e = rep.entries.iter().find(|e| e.word == single).unwrap();
        assert_eq!(e.count, 1);
        assert!((e.frequency - 1.0 / 3.0).abs() < 1e-12);
        assert!(frequency_check(&a, &w("10"), 3, &eps).is_err());
        assert!(frequency_check(&a, &w("1001"), 1, &eps).is_err());
    }

    #[test]
    fn uniform_gap_examples() {
        let a = alpha();
        let g1 = uniform_gap(&a, 1, 1000).unwrap();
        assert!(g1 <= 3);
        let mut prev = g1;
        for l in 2..12u64 {
            let g = uniform_gap(&a, l, 5000).unwrap();
            assert!(g >= prev);
            prev = g;
            let orbit = code_origin(&a, 5000).unwrap();
            let t = FactorTable::scan(orbit.as_slice(), l as usize);
            let start = 2 * g as usize;
            for (word, _) in t.entries() {
                for s in (start..4000).step_by(97) {
                    let win = &orbit.as_slice()[s..s + g as usize + l as usize];
                    assert!(crate::words::is_subword(word.as_slice(), win));
                }
            }
        }
        assert!(matches!(uniform_gap(&a, 5, 100), Err(ForgeError::InvalidInput(_))));
    }

    proptest! {
        #[test]
        fn orbit_factors_are_in_language(start in 0u64..1000, n in 1u64..20) {
            let a = alpha();
            let orbit = code_origin(&a, 2000).unwrap();
            let lang = language(&a, n).unwrap();
            let f = orbit.factor(start as usize, n as usize);
            prop_assert!(lang.contains(&f));
        }
    }
}
