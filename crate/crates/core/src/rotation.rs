//! Rotation by an irrational α given by continued-fraction partial quotients.
//!
//! All circle arithmetic happens on a convergent p/q: a point kα' mod 1 is the
//! integer kp mod q in "units" of 1/q. Every operation checks that the
//! truncation error cannot change the combinatorics it reports, and deepens the
//! truncation when it could.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};

/// α ∈ (0,1) by a finite prefix of its continued fraction `[0; a1, a2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationNumber {
    partial_quotients: Vec<u64>,
}

impl RotationNumber {
    /// `quotients` excludes the integer part, which is always 0.
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(ForgeError::InvalidInput("at least one partial quotient is required".into()));
        }
        if let Some(i) = quotients.iter().position(|&a| a == 0) {
            return Err(ForgeError::InvalidInput(format!("partial quotient a{} is 0", i + 1)));
        }
        let mut partial_quotients = Vec::with_capacity(quotients.len() + 1);
        partial_quotients.push(0);
        partial_quotients.extend(quotients);
        Ok(RotationNumber { partial_quotients })
    }

    /// `[0; 2, 20, 30, 40, ...]` with `depth` quotients after the integer part.
    pub fn default_alpha(depth: usize) -> Self {
        let mut q = vec![2u64];
        q.extend((2..=depth as u64).map(|k| 10 * k));
        RotationNumber::new(q).expect("default quotients are positive")
    }

    /// Partial quotients including the leading 0.
    pub fn partial_quotients(&self) -> &[u64] {
        &self.partial_quotients
    }

    /// Number of quotients after the integer part.
    pub fn depth(&self) -> usize {
        self.partial_quotients.len() - 1
    }

    /// The first `k` convergents `(p_i, q_i)`, i = 1..=k.
    pub fn convergents(&self, k: usize) -> Result<Vec<(u128, u128)>> {
        if k > self.depth() {
            return Err(ForgeError::InsufficientDepth { required: k, available: self.depth() });
        }
        let (mut p0, mut q0) = (1u128, 0u128);
        let (mut p1, mut q1) = (0u128, 1u128);
        let mut out = Vec::with_capacity(k);
        for &a in &self.partial_quotients[1..=k] {
            let a = a as u128;
            let p2 = a.checked_mul(p1).and_then(|x| x.checked_add(p0));
            let q2 = a.checked_mul(q1).and_then(|x| x.checked_add(q0));
            let (Some(p2), Some(q2)) = (p2, q2) else {
                return Err(ForgeError::Resource("convergent overflows 128 bits".into()));
            };
            out.push((p2, q2));
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
        Ok(out)
    }

    /// Exact interval guaranteed to contain α whatever the unseen quotients are.
    pub fn enclosure(&self) -> Result<(BigRational, BigRational)> {
        let k = self.depth();
        let c = self.convergents(k)?;
        let (pk, qk) = c[k - 1];
        let (pm, qm) = if k >= 2 { c[k - 2] } else { (0, 1) };
        let a = ratio(pk, qk);
        let b = ratio(pk + pm, qk + qm);
        Ok(if a < b { (a, b) } else { (b, a) })
    }

    /// α provably lies in (3/8, 5/8).
    pub fn is_admissible(&self) -> bool {
        match self.enclosure() {
            Ok((lo, hi)) => lo > ratio(3, 8) && hi < ratio(5, 8),
            Err(_) => false,
        }
    }

    /// Convergent number `k` (1-based) as a working truncation.
    pub fn truncation_at(&self, k: usize) -> Result<Truncation> {
        if k == 0 || k > self.depth() {
            return Err(ForgeError::InsufficientDepth { required: k.max(1), available: self.depth() });
        }
        let conv = self.convergents(k.min(self.depth()))?;
        let (p, q) = conv[k - 1];
        if q >= 1u128 << 63 {
            return Err(ForgeError::DepthExhausted(format!(
                "convergent denominator {q} exceeds 63 bits"
            )));
        }
        let q_prev = if k >= 2 { conv[k - 2].1 } else { 1 };
        // q_{k+1} if the quotient is known, else the smallest value it can take.
        let (next_q, next_known) = if k < self.depth() {
            let a = self.partial_quotients[k + 1] as u128;
            (a * q + q_prev, true)
        } else {
            (q + q_prev, false)
        };
        Ok(Truncation { k, p: p as u64, q: q as u64, next_q, next_known })
    }

    /// The first convergent with denominator ≥ `min_denominator`.
    pub fn truncate_to_rational(&self, min_denominator: u128) -> Result<Truncation> {
        let conv = self.convergents(self.depth())?;
        let k = conv
            .iter()
            .position(|&(_, q)| q >= min_denominator)
            .ok_or_else(|| {
                ForgeError::DepthExhausted(format!(
                    "no convergent with denominator ≥ {min_denominator} among {} quotients",
                    self.depth()
                ))
            })?;
        self.truncation_at(k + 1)
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail: Vec<String> = self.partial_quotients[1..].iter().map(|a| a.to_string()).collect();
        write!(f, "0;{}", tail.join(","))
    }
}

impl FromStr for RotationNumber {
    type Err = ForgeError;

    /// Parses `0;a1,a2,...` (brackets and a trailing ellipsis are tolerated).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (int_part, rest) = s
            .split_once(';')
            .ok_or_else(|| ForgeError::InvalidInput(format!("expected '0;a1,a2,...', got {s:?}")))?;
        if int_part.trim() != "0" {
            return Err(ForgeError::InvalidInput(format!(
                "integer part must be 0 for α in (0,1), got {int_part:?}"
            )));
        }
        let mut q = Vec::new();
        for tok in rest.split(',') {
            let tok = tok.trim();
            if tok.is_empty() || tok == "..." || tok == "…" {
                continue;
            }
            let a: u64 = tok
                .parse()
                .map_err(|_| ForgeError::InvalidInput(format!("bad partial quotient {tok:?}")))?;
            q.push(a);
        }
        RotationNumber::new(q)
    }
}

pub(crate) fn ratio(n: u128, d: u128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// α' = p/q, the k-th convergent, with |α − α'| < 1/(q · next_q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    /// q_{k+1} when known, otherwise the lower bound q_k + q_{k-1}.
    pub next_q: u128,
    pub next_known: bool,
}

impl Truncation {
    pub fn value(&self) -> ExactPoint {
        ExactPoint(ratio(self.p as u128, self.q as u128))
    }

    /// Upper bound on |α − p/q|.
    pub fn error_bound(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.q as u128 * self.next_q))
    }

    /// Point jα' mod 1 in units of 1/q.
    #[inline]
    pub fn point(&self, j: u64) -> u64 {
        (((j % self.q) as u128 * self.p as u128) % self.q as u128) as u64
    }

    /// Point −jα' mod 1 in units of 1/q.
    #[inline]
    pub fn neg_point(&self, j: u64) -> u64 {
        let x = self.point(j);
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    /// min_{1 ≤ i < n} ||iα'|| in units, for 2 ≤ n ≤ q (best approximation by convergents).
    pub fn min_return_units(&self, n: u64, rot: &RotationNumber) -> Result<u64> {
        if n < 2 || n > self.q {
            return Err(ForgeError::Internal(format!("min return needs 2 ≤ n ≤ q, got n={n}")));
        }
        let conv = rot.convergents(self.k)?;
        let qj = conv.iter().rev().map(|&(_, q)| q as u64).find(|&q| q < n).unwrap_or(1);
        let x = self.point(qj);
        Ok(x.min(self.q - x))
    }

    /// True when every one of the first `n` points of α and of α' lie in the same
    /// order and no gap collapses: 2(n−1)·err < min gap.
    pub fn guards_points(&self, n: u64, min_gap_units: u64) -> bool {
        // 2(n−1)/(q·q') < g/q  ⇔  2(n−1) < g·q'
        2 * (n.saturating_sub(1) as u128) < min_gap_units as u128 * self.next_q
    }
}

/// A point of the circle, exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExactPoint(pub BigRational);

impl ExactPoint {
    pub fn new(v: BigRational) -> Result<Self> {
        if v.is_negative() || v >= BigRational::one() {
            return Err(ForgeError::InvalidInput(format!("point {v} not in [0,1)")));
        }
        Ok(ExactPoint(v))
    }

    pub fn from_units(units: u64, q: u64) -> Self {
        ExactPoint(ratio(units as u128, q as u128))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub length: BigRational,
    pub multiplicity: u64,
}

/// Arc lengths cut out by {iα' mod 1 : 0 ≤ i < n}, sorted by length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSpectrum {
    pub step_count: u64,
    pub denominator: u64,
    pub gaps: Vec<Gap>,
}

impl GapSpectrum {
    fn from_units(step_count: u64, q: u64, counts: &BTreeMap<u64, u64>) -> Self {
        let gaps = counts
            .iter()
            .map(|(&len, &m)| Gap { length: ratio(len as u128, q as u128), multiplicity: m })
            .collect();
        GapSpectrum { step_count, denominator: q, gaps }
    }

    pub fn total_length(&self) -> BigRational {
        self.gaps
            .iter()
            .fold(BigRational::zero(), |acc, g| acc + &g.length * BigRational::from_integer(g.multiplicity.into()))
    }

    pub fn distinct_lengths(&self) -> usize {
        self.gaps.len()
    }

    pub fn min_gap(&self) -> &BigRational {
        &self.gaps[0].length
    }

    pub fn max_gap(&self) -> &BigRational {
        &self.gaps[self.gaps.len() - 1].length
    }

    /// At most three lengths; with three, the largest is the sum of the others.
    pub fn satisfies_three_gap(&self) -> bool {
        match self.gaps.len() {
            1 | 2 => true,
            3 => self.gaps[2].length == &self.gaps[0].length + &self.gaps[1].length,
            _ => false,
        }
    }
}

/// Sorted circle points with the multiset of arcs between neighbours.
pub(crate) struct CirclePartition {
    q: u64,
    points: BTreeSet<u64>,
    gaps: BTreeMap<u64, u64>,
}

impl CirclePartition {
    pub(crate) fn new(q: u64) -> Self {
        CirclePartition { q, points: BTreeSet::new(), gaps: BTreeMap::new() }
    }

    fn add_gap(&mut self, len: u64) {
        *self.gaps.entry(len).or_insert(0) += 1;
    }

    fn remove_gap(&mut self, len: u64) {
        let c = self.gaps.get_mut(&len).expect("gap present");
        *c -= 1;
        if *c == 0 {
            self.gaps.remove(&len);
        }
    }

    /// Inserts a point; returns the split arc length and its two pieces.
    pub(crate) fn insert(&mut self, x: u64) -> Option<(u64, u64, u64)> {
        if self.points.contains(&x) {
            return None;
        }
        if self.points.is_empty() {
            self.points.insert(x);
            self.add_gap(self.q);
            return None;
        }
        let pred = self
            .points
            .range(..x)
            .next_back()
            .or_else(|| self.points.iter().next_back())
            .copied()
            .unwrap();
        let succ = self
            .points
            .range(x..)
            .next()
            .or_else(|| self.points.iter().next())
            .copied()
            .unwrap();
        let arc = |a: u64, b: u64| -> u64 {
            let d = (b + self.q - a) % self.q;
            if d == 0 {
                self.q
            } else {
                d
            }
        };
        let old = arc(pred, succ);
        let left = arc(pred, x);
        let right = arc(x, succ);
        self.remove_gap(old);
        self.add_gap(left);
        self.add_gap(right);
        self.points.insert(x);
        Some((old, left, right))
    }

    pub(crate) fn min_gap(&self) -> u64 {
        *self.gaps.keys().next().unwrap()
    }

    pub(crate) fn max_gap(&self) -> u64 {
        *self.gaps.keys().next_back().unwrap()
    }

}

/// Gap spectrum of the first `n` orbit points, deepening the truncation until
/// the error guard holds.
pub fn gap_spectrum(rot: &RotationNumber, n: u64) -> Result<GapSpectrum> {
    if n == 0 {
        return Err(ForgeError::InvalidInput("step count must be at least 1".into()));
    }
    // q ≥ 2n keeps distinct lengths |kα − l| (|k| < n) distinct after truncation.
    let mut tr = rot.truncate_to_rational(2 * n as u128)?;
    loop {
        let mut pts: Vec<u64> = (0..n).map(|i| tr.point(i)).collect();
        pts.sort_unstable();
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for i in 0..pts.len() {
            let next = if i + 1 < pts.len() { pts[i + 1] } else { pts[0] + tr.q };
            *counts.entry(next - pts[i]).or_insert(0) += 1;
        }
        let min_gap = *counts.keys().next().unwrap();
        if tr.guards_points(n, min_gap) {
            return Ok(GapSpectrum::from_units(n, tr.q, &counts));
        }
        tr = deepen(rot, &tr, "gap spectrum")?;
    }
}

pub(crate) fn deepen(rot: &RotationNumber, tr: &Truncation, what: &str) -> Result<Truncation> {
    if tr.k >= rot.depth() {
        return Err(ForgeError::DepthExhausted(format!(
            "{what}: truncation guard fails at the deepest convergent ({} quotients)",
            rot.depth()
        )));
    }
    rot.truncation_at(tr.k + 1)
}

/// Certified balanced scale: min gap / max gap > 1 − ε at step count n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleCertificate {
    pub n: u64,
    pub min_gap: BigRational,
    pub max_gap: BigRational,
    pub ratio: BigRational,
    pub epsilon: BigRational,
    /// Ratio at n − 1 points.
    pub prev_ratio: BigRational,
    /// prev_ratio ≥ ratio / 2.
    pub doubling_holds: bool,
    /// prev_ratio > 1/2 − ε/2.
    pub shorter_holds: bool,
    /// Denominator of the truncation the lengths are exact for.
    pub denominator: u64,
    /// The ratio bound still holds for α itself after accounting for truncation error.
    pub robust: bool,
}

impl ScaleCertificate {
    pub fn is_valid(&self) -> bool {
        self.ratio == &self.min_gap / &self.max_gap
            && self.ratio > BigRational::one() - &self.epsilon
            && self.robust
    }

    /// Word length whose cylinders are the cells of this n-point partition.
    pub fn word_scale(&self) -> u64 {
        self.n - 1
    }
}

/// Default cap on the number of step counts [`find_balanced_scales`] examines.
pub const DEFAULT_SCAN_BUDGET: u64 = 200_000;

/// The first `count` step counts n > `n_min` whose gap ratio exceeds 1 − ε.
pub fn find_balanced_scales(
    rot: &RotationNumber,
    epsilon: &BigRational,
    count: usize,
    n_min: u64,
    budget: u64,
) -> Result<Vec<ScaleCertificate>> {
    if epsilon <= &BigRational::zero() || epsilon > &BigRational::one() {
        return Err(ForgeError::InvalidInput(format!("epsilon {epsilon} outside (0, 1]")));
    }
    if count == 0 {
        return Err(ForgeError::InvalidInput("count must be at least 1".into()));
    }
    let n_max = n_min.saturating_add(budget).max(2);
    let mut tr = rot.truncate_to_rational(2 * n_max as u128)?;
    'restart: loop {
        let mut part = CirclePartition::new(tr.q);
        let mut out = Vec::new();
        let mut prev: Option<(u64, u64)> = None;
        for n in 1..=n_max {
            part.insert(tr.point(n - 1));
            let (lo, hi) = (part.min_gap(), part.max_gap());
            if !tr.guards_points(n, lo) {
                tr = deepen(rot, &tr, "balanced scale scan")?;
                continue 'restart;
            }
            if n > n_min && n >= 2 {
                let (plo, phi) = prev.unwrap();
                let r = ratio(lo as u128, hi as u128);
                if r > BigRational::one() - epsilon {
                    let pr = ratio(plo as u128, phi as u128);
                    let half = BigRational::new(BigInt::one(), BigInt::from(2));
                    // Gaps of α differ from those of α' by at most 2(n−1)·err.
                    let delta = BigRational::new(
                        BigInt::from(2 * (n as u128 - 1)),
                        BigInt::from(tr.q as u128 * tr.next_q),
                    );
                    let qq = ratio(tr.q as u128, 1);
                    let lo_r = ratio(lo as u128, 1) / &qq - &delta;
                    let hi_r = ratio(hi as u128, 1) / &qq + &delta;
                    let robust = lo_r.clone() / hi_r > BigRational::one() - epsilon;
                    out.push(ScaleCertificate {
                        n,
                        min_gap: ratio(lo as u128, tr.q as u128),
                        max_gap: ratio(hi as u128, tr.q as u128),
                        ratio: r.clone(),
                        epsilon: epsilon.clone(),
                        doubling_holds: pr >= &r * &half,
                        shorter_holds: pr > &half - epsilon * &half,
                        prev_ratio: pr,
                        denominator: tr.q,
                        robust,
                    });
                    if out.len() == count {
                        return Ok(out);
                    }
                }
            }
            prev = Some((lo, hi));
        }
        return Err(ForgeError::BudgetExhausted(format!(
            "found {} of {count} balanced scales with ε = {epsilon} for n in ({n_min}, {n_max}]",
            out.len()
        )));
    }
}

/// Number of circle units as a natural number (for exact sums in tests and reports).
pub fn units_to_ratio(units: u64, q: u64) -> BigRational {
    ratio(units as u128, q as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_and_display() {
        let a: RotationNumber = "0;2,20,30".parse().unwrap();
        assert_eq!(a.partial_quotients(), &[0, 2, 20, 30]);
        assert_eq!(a.to_string(), "0;2,20,30");
        assert_eq!("[0;2,20,…]".parse::<RotationNumber>().unwrap().depth(), 2);
        assert!("1;2".parse::<RotationNumber>().is_err());
        assert!("0;2,0".parse::<RotationNumber>().is_err());
        assert!("2,3".parse::<RotationNumber>().is_err());
        assert!("0;".parse::<RotationNumber>().is_err());
    }

    #[test]
    fn convergent_examples() {
        let a = RotationNumber::new(vec![2]).unwrap();
        assert_eq!(a.convergents(1).unwrap(), vec![(1, 2)]);
        let b = RotationNumber::new(vec![2, 20]).unwrap();
        assert_eq!(b.convergents(2).unwrap(), vec![(1, 2), (20, 41)]);
        let g = RotationNumber::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(g.convergents(4).unwrap(), vec![(1, 1), (1, 2), (2, 3), (3, 5)]);
        match g.convergents(5) {
            Err(ForgeError::InsufficientDepth { required: 5, available: 4 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_examples() {
        let a = RotationNumber::default_alpha(6);
        let t = a.truncate_to_rational(40).unwrap();
        assert_eq!((t.p, t.q), (20, 41));
        assert_eq!(t.next_q, 1232);
        assert_eq!(t.error_bound(), r(1, 41 * 1232));
        let h = RotationNumber::new(vec![2]).unwrap();
        let t = h.truncate_to_rational(1).unwrap();
        assert_eq!((t.p, t.q), (1, 2));
        assert!(!t.next_known);
        let g = RotationNumber::new(vec![1; 10]).unwrap();
        let t = g.truncate_to_rational(5).unwrap();
        assert_eq!((t.p, t.q), (3, 5));
        assert!(matches!(g.truncate_to_rational(1000), Err(ForgeError::DepthExhausted(_))));
    }

    #[test]
    fn admissibility() {
        assert!(RotationNumber::default_alpha(8).is_admissible());
        assert!(RotationNumber::new(vec![1, 1, 1, 1, 1, 1, 1, 1]).unwrap().is_admissible());
        assert!(!RotationNumber::new(vec![1, 2, 1, 1, 1]).unwrap().is_admissible());
        assert!(!RotationNumber::new(vec![3, 5, 5]).unwrap().is_admissible());
    }

    #[test]
    fn small_spectra() {
        let a = RotationNumber::default_alpha(8);
        let s1 = gap_spectrum(&a, 1).unwrap();
        assert_eq!(s1.gaps, vec![Gap { length: r(1, 1), multiplicity: 1 }]);
        let s2 = gap_spectrum(&a, 2).unwrap();
        assert_eq!(s2.gaps.len(), 2);
        assert_eq!(&s2.gaps[0].length + &s2.gaps[1].length, r(1, 1));
        let s3 = gap_spectrum(&a, 3).unwrap();
        assert!(s3.satisfies_three_gap());
        assert_eq!(s3.total_length(), r(1, 1));
    }

    /// Independent oracle: sort the points as exact rationals.
    fn brute_spectrum(p: i64, q: i64, n: i64) -> BTreeMap<BigRational, u64> {
        let mut pts: Vec<BigRational> = (0..n).map(|i| r((i * p) % q, q)).collect();
        pts.sort();
        let mut m = BTreeMap::new();
        for i in 0..pts.len() {
            let next = if i + 1 < pts.len() { pts[i + 1].clone() } else { &pts[0] + r(1, 1) };
            *m.entry(next - &pts[i]).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn spectrum_matches_rational_oracle() {
        let a = RotationNumber::default_alpha(8);
        for n in 1..60u64 {
            let s = gap_spectrum(&a, n).unwrap();
            let tr = (1..=a.depth())
                .map(|k| a.truncation_at(k).unwrap())
                .find(|t| t.q == s.denominator)
                .unwrap();
            let m = brute_spectrum(tr.p as i64, tr.q as i64, n as i64);
            let got: BTreeMap<BigRational, u64> =
                s.gaps.iter().map(|g| (g.length.clone(), g.multiplicity)).collect();
            assert_eq!(got, m, "n = {n}");
        }
    }

    #[test]
    fn min_return_matches_sort() {
        let a = RotationNumber::default_alpha(8);
        let tr = a.truncation_at(5).unwrap();
        for n in 2..2000u64 {
            let brute = (1..n).map(|i| {
                let x = tr.point(i);
                x.min(tr.q - x)
            });
            assert_eq!(tr.min_return_units(n, &a).unwrap(), brute.min().unwrap(), "n={n}");
        }
    }

    #[test]
    fn balanced_scale_default_alpha() {
        let a = RotationNumber::default_alpha(10);
        let eps = r(1, 8);
        let c = find_balanced_scales(&a, &eps, 2, 1, 10_000).unwrap();
        assert!(c[0].is_valid());
        assert!(c[0].ratio > r(7, 8));
        assert!(c[0].shorter_holds && c[0].doubling_holds);
        assert_eq!(c[0].n, 2);
        assert_eq!(c[1].n, 41);
    }

    #[test]
    fn epsilon_one_accepts_everything() {
        let a = RotationNumber::default_alpha(8);
        let c = find_balanced_scales(&a, &r(1, 1), 30, 1, 100).unwrap();
        let ns: Vec<u64> = c.iter().map(|c| c.n).collect();
        assert_eq!(ns, (2..32).collect::<Vec<u64>>());
    }

    #[test]
    fn golden_ratio_exhausts_budget() {
        let g = RotationNumber::new(vec![1; 40]).unwrap();
        let e = find_balanced_scales(&g, &r(1, 100), 1, 1, 5_000).unwrap_err();
        assert!(matches!(e, ForgeError::BudgetExhausted(_)), "{e}");
    }

    proptest! {
        #[test]
        fn three_gap_random(q in prop::collection::vec(1u64..30, 6..10), n in 1u64..400) {
            let a = RotationNumber::new(q).unwrap();
            if let Ok(s) = gap_spectrum(&a, n) {
                prop_assert!(s.satisfies_three_gap());
                prop_assert_eq!(s.total_length(), r(1, 1));
            }
        }

        #[test]
        fn refinement_and_doubling(q in prop::collection::vec(1u64..30, 8..10)) {
            let a = RotationNumber::new(q).unwrap();
            let tr = a.truncation_at(a.depth()).unwrap();
            let mut part = CirclePartition::new(tr.q);
            let mut last: Option<(u64, u64)> = None;
            for n in 1..tr.q.min(300) {
                let split = part.insert(tr.point(n - 1));
                if let Some((old, l, rr)) = split { prop_assert_eq!(old, l + rr); }
                let (lo, hi) = (part.min_gap(), part.max_gap());
                if let Some((plo, phi)) = last {
                    prop_assert!(phi <= 2 * hi);
                    prop_assert!(plo >= lo);
                }
                last = Some((lo, hi));
            }
        }
    }
}
