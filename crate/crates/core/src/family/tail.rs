//! Geometric sampling of `h → 0` and tail statistics standing in for `lim`
//! and `lim sup`.

use std::fmt;
use std::str::FromStr;

use super::FamilyError;

/// Samples `h_k = h0·r^k` for `k = 0..=K`; the last `m` form the tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HGrid {
    pub h0: f64,
    pub ratio: f64,
    pub count: usize,
    pub tail: usize,
}

impl Default for HGrid {
    fn default() -> Self {
        Self {
            h0: 1.0,
            ratio: 0.5,
            count: 40,
            tail: 6,
        }
    }
}

impl HGrid {
    pub fn new(h0: f64, ratio: f64, count: usize, tail: usize) -> Result<Self, FamilyError> {
        let bad = |msg: &str| Err(FamilyError::InvalidGrid(msg.to_string()));
        if !(h0 > 0.0 && h0 <= 1.0) {
            return bad("h0 must lie in (0, 1]");
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return bad("ratio must lie in (0, 1)");
        }
        if tail < 3 {
            return bad("tail must hold at least 3 samples");
        }
        if tail > count + 1 {
            return bad("tail longer than the grid");
        }
        Ok(Self { h0, ratio, count, tail })
    }

    /// All `K+1` samples, strictly decreasing.
    pub fn samples(&self) -> Vec<f64> {
        (0..=self.count).map(|k| self.h0 * self.ratio.powi(k as i32)).collect()
    }

    pub fn tail_samples(&self) -> Vec<f64> {
        let all = self.samples();
        all[all.len() - self.tail..].to_vec()
    }

    pub fn smallest(&self) -> f64 {
        self.h0 * self.ratio.powi(self.count as i32)
    }

    pub fn with_tail(self, tail: usize) -> Result<Self, FamilyError> {
        Self::new(self.h0, self.ratio, self.count, tail)
    }
}

impl fmt::Display for HGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.h0, self.ratio, self.count, self.tail)
    }
}

impl FromStr for HGrid {
    type Err = FamilyError;

    /// Parses `h0:r:K:m`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || FamilyError::InvalidGrid(format!("expected h0:r:K:m, got `{s}`"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let h0 = parts[0].parse().map_err(|_| bad())?;
        let r = parts[1].parse().map_err(|_| bad())?;
        let k = parts[2].parse().map_err(|_| bad())?;
        let m = parts[3].parse().map_err(|_| bad())?;
        Self::new(h0, r, k, m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitVerdict {
    ToZero,
    BoundedPositive,
    Unbounded,
    Inconclusive,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitVerdict::ToZero => "to-zero",
            LimitVerdict::BoundedPositive => "bounded-positive",
            LimitVerdict::Unbounded => "unbounded",
            LimitVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailParams {
    /// Tail maxima below this may count as vanishing.
    pub eps_tail: f64,
    /// Values at or below this are numerically zero.
    pub zero_floor: f64,
    /// `|trend|` up to this counts as flat.
    pub flat_tol: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        Self {
            eps_tail: 1e-7,
            zero_floor: 1e-12,
            flat_tol: 0.05,
        }
    }
}

impl TailParams {
    /// Same thresholds, multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            eps_tail: self.eps_tail * scale,
            zero_floor: self.zero_floor * scale,
            flat_tol: self.flat_tol,
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.zero_floor = floor;
        self
    }
}

/// Tail summary of a sampled nonnegative quantity `f(h_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailStats {
    pub values: Vec<f64>,
    pub tail_len: usize,
    pub tail_max: f64,
    /// Least-squares exponent `s` in `f(h) ≈ C·(1/h)^s` over the tail;
    /// `−∞` when the whole tail is numerically zero.
    pub tail_trend: f64,
    pub limit_verdict: LimitVerdict,
    /// Verdict from the samples alone, before any catalog certificate.
    pub sampled_verdict: LimitVerdict,
    /// Catalog certificate that the quantity tends to zero, where available.
    pub certificate: Option<bool>,
}

impl TailStats {
    /// Analyses `values[k] = f(hs[k])`, using the last `tail` entries.
    pub fn analyze(hs: &[f64], values: Vec<f64>, tail: usize, p: &TailParams) -> Self {
        assert_eq!(hs.len(), values.len(), "one value per sample");
        let tail = tail.min(values.len()).max(1);
        let start = values.len() - tail;
        let tail_vals = &values[start..];
        let tail_hs = &hs[start..];

        let non_finite = tail_vals.iter().any(|v| !v.is_finite());
        let tail_max = tail_vals.iter().copied().fold(0.0, f64::max);
        let numerically_zero = !non_finite && tail_max <= p.zero_floor;

        let tail_trend = if non_finite {
            f64::INFINITY
        } else if numerically_zero {
            f64::NEG_INFINITY
        } else {
            let xs: Vec<f64> = tail_hs.iter().map(|h| -h.ln()).collect();
            let ys: Vec<f64> = tail_vals.iter().map(|v| v.max(p.zero_floor).ln()).collect();
            least_squares_slope(&xs, &ys)
        };

        let verdict = if non_finite {
            LimitVerdict::Unbounded
        } else if numerically_zero {
            LimitVerdict::ToZero
        } else if tail_trend > p.flat_tol {
            LimitVerdict::Unbounded
        } else if tail_max < p.eps_tail {
            // A small tail that decays into the zero floor has the same
            // meaning as one that decays along a clean power law.
            let reaches_floor = tail_vals.last().is_some_and(|&v| v <= p.zero_floor);
            if tail_trend < -p.flat_tol || reaches_floor {
                LimitVerdict::ToZero
            } else {
                LimitVerdict::Inconclusive
            }
        } else if tail_trend >= -p.flat_tol {
            LimitVerdict::BoundedPositive
        } else {
            LimitVerdict::Inconclusive
        };

        Self {
            values,
            tail_len: tail,
            tail_max,
            tail_trend,
            limit_verdict: verdict,
            sampled_verdict: verdict,
            certificate: None,
        }
    }

    /// Tail analysis over a whole grid of a sampled function.
    pub fn sample(g: &HGrid, p: &TailParams, f: impl FnMut(f64) -> f64) -> Self {
        let hs = g.samples();
        let values = hs.iter().copied().map(f).collect();
        Self::analyze(&hs, values, g.tail, p)
    }

    /// Tail analysis evaluating `f` only on the tail samples.
    pub fn sample_tail(g: &HGrid, p: &TailParams, f: impl FnMut(f64) -> f64) -> Self {
        let hs = g.tail_samples();
        let values: Vec<f64> = hs.iter().copied().map(f).collect();
        let n = values.len();
        Self::analyze(&hs, values, n, p)
    }

    /// Folds a catalog certificate into the verdict: agreement keeps the
    /// sampled verdict, disagreement yields `Inconclusive`.
    pub fn with_certificate(mut self, cert: Option<bool>) -> Self {
        self.certificate = cert;
        self.limit_verdict = match (cert, self.sampled_verdict) {
            (None, v) => v,
            (Some(true), LimitVerdict::ToZero) => LimitVerdict::ToZero,
            (Some(true), _) => LimitVerdict::Inconclusive,
            (Some(false), LimitVerdict::ToZero) => LimitVerdict::Inconclusive,
            (Some(false), v) => v,
        };
        self
    }

    pub fn to_zero(&self) -> bool {
        self.limit_verdict == LimitVerdict::ToZero
    }

    pub fn tail_min(&self) -> f64 {
        self.values[self.values.len() - self.tail_len..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
