//! Finite truncations of the discrete Schrödinger operator
//! (Hu)(n) = u(n − 1) + u(n + 1) + y_n u(n) with a 0/1 potential read from a point.
//!
//! Eigenvalues come from bisection on Sturm sign counts, so output is deterministic. Gap reports
//! are heuristic: a finite truncation says nothing certain about the infinite operator.

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalTruncation {
    /// Potential values on the diagonal; every off-diagonal entry is 1.
    pub diagonal: Vec<f64>,
}

impl TridiagonalTruncation {
    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - 1.0 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (1.0 + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn bounds(&self) -> (f64, f64) {
        let lo = self.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diagonal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - 2.0, hi + 2.0)
    }
}

/// Diagonal from letters offset..offset + n of a 0/1 prefix.
pub fn truncation(prefix: &[u8], offset: usize, n: usize) -> Result<TridiagonalTruncation> {
    if n == 0 {
        return Err(ForgeError::InvalidInput("truncation size must be at least 1".into()));
    }
    let end = offset.checked_add(n).filter(|&e| e <= prefix.len()).ok_or_else(|| {
        ForgeError::InvalidInput(format!("prefix of {} letters is shorter than offset + N = {}", prefix.len(), offset + n))
    })?;
    if let Some(&bad) = prefix[offset..end].iter().find(|&&c| c > 1) {
        return Err(ForgeError::InvalidInput(format!("potential letter {bad} is not 0 or 1")));
    }
    Ok(TridiagonalTruncation { diagonal: prefix[offset..end].iter().map(|&c| c as f64).collect() })
}

/// All eigenvalues in ascending order, each bracketed to width ≤ tol.
pub fn eigenvalues(mat: &TridiagonalTruncation, tol: f64) -> Result<Vec<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(ForgeError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let (lo0, hi0) = mat.bounds();
    let n = mat.size();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // smallest x with more than k eigenvalues below it
        let (mut lo, mut hi) = (out.last().copied().unwrap_or(lo0).max(lo0) - tol, hi0 + tol);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mat.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Eigenvalues of the zero-potential truncation: 2cos(kπ/(N + 1)), ascending.
pub fn free_eigenvalues(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> =
        (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Cauchy interlacing between sizes N and N + 1: big[i] ≤ small[i] ≤ big[i + 1], up to `slack`.
pub fn interlaces(small: &[f64], big: &[f64], slack: f64) -> bool {
    big.len() == small.len() + 1
        && small.iter().enumerate().all(|(i, &x)| big[i] <= x + slack && x <= big[i + 1] + slack)
}

/// Bands of the period-two operator with potential (v0, v1): |tr M(E)| ≤ 2 where
/// tr M(E) = (E − v0)(E − v1) − 2.
pub fn period_two_bands(v0: f64, v1: f64) -> [(f64, f64); 2] {
    // (E − v0)(E − v1) ∈ [0, 4]
    let c = 0.5 * (v0 + v1);
    let h = 0.5 * (v1 - v0).abs();
    let outer = (h * h + 4.0).sqrt();
    [(c - outer, c - h), (c + h, c + outer)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub size: usize,
    pub tol: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub left: f64,
    pub right: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Always true: gaps of finite truncations are a heuristic.
    pub heuristic: bool,
    pub resolution: f64,
    pub spectra: Vec<SpectrumReport>,
    /// Intervals of [−3, 3] free of eigenvalues at every size, at least `resolution` wide.
    pub gaps: Vec<Gap>,
}

/// Eigenvalues of the leading truncations of each size, and the gaps they leave open.
pub fn gap_report(prefix: &[u8], sizes: &[usize], tol: f64, resolution: f64) -> Result<GapReport> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ForgeError::InvalidInput("sizes must be nonempty and strictly increasing".into()));
    }
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(ForgeError::InvalidInput("resolution must be positive".into()));
    }
    let mut spectra = Vec::new();
    let mut all = Vec::new();
    for &n in sizes {
        let ev = eigenvalues(&truncation(prefix, 0, n)?, tol)?;
        all.extend_from_slice(&ev);
        spectra.push(SpectrumReport { size: n, tol, eigenvalues: ev });
    }
    all.sort_by(f64::total_cmp);
    let mut points = vec![-3.0];
    points.extend(all.iter().map(|&x| x.clamp(-3.0, 3.0)));
    points.push(3.0);
    let gaps = points
        .windows(2)
        .filter(|w| w[1] - w[0] >= resolution)
        .map(|w| Gap { left: w[0], right: w[1], width: w[1] - w[0] })
        .collect();
    Ok(GapReport { heuristic: true, resolution, spectra, gaps })
}

impl GapReport {
    /// Columns size, index, eigenvalue.
    pub fn eigenvalue_csv(&self) -> String {
        let mut out = String::from("size,index,eigenvalue\n");
        for s in &self.spectra {
            for (i, e) in s.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{},{},{:.12}\n", s.size, i, e));
            }
        }
        out
    }

    /// Columns left, right, width.
    pub fn gap_csv(&self) -> String {
        let mut out = String::from("left,right,width\n");
        for g in &self.gaps {
            out.push_str(&format!("{:.12},{:.12},{:.12}\n", g.left, g.right, g.width));
        }
        out
    }

    /// The widest reported gap meeting (a, b), if any.
    pub fn gap_within(&self, a: f64, b: f64) -> Option<&Gap> {
        self.gaps.iter().filter(|g| g.left < b && g.right > a).max_by(|x, y| x.width.total_cmp(&y.width))
    }
}
