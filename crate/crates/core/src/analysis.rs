//! Burst intervals, paper classification and hazard curves of a fitted
//! model.

use std::fmt;

use crate::model::{hazard, ComponentParams, ModelParams, ProcessingTime};
use crate::{Error, Result};

/// Largest `k` examined by [`burst_interval`].
pub const BURST_SCAN_MAX: u64 = 1_000_000;

/// Inclusive interval `[k_lo, k_hi]`; `k_hi = None` means the inequality
/// still held at [`BURST_SCAN_MAX`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BurstInterval {
    pub k_lo: u64,
    pub k_hi: Option<u64>,
}

impl BurstInterval {
    pub fn contains(&self, k: u64) -> bool {
        k >= self.k_lo && self.k_hi.is_none_or(|hi| k <= hi)
    }

    fn width(&self) -> u64 {
        self.k_hi.map_or(u64::MAX, |hi| hi - self.k_lo + 1)
    }
}

/// Range of `k` where the repeated-citation term dominates:
/// `(1-c) P2(k) > c P1(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BurstPartition {
    pub interval: Option<BurstInterval>,
    /// The inequality holds on more than one disjoint run of `k`;
    /// `interval` is the widest.
    pub multiple: bool,
}

impl BurstPartition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.interval.is_none()
    }
}

impl fmt::Display for BurstPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.interval {
            None => f.write_str("empty"),
            Some(BurstInterval { k_lo, k_hi: Some(hi) }) => write!(f, "[{k_lo}, {hi}]"),
            Some(BurstInterval { k_lo, k_hi: None }) => write!(f, "[{k_lo}, inf)"),
        }
    }
}

/// `ln((1-c) P2(k)) - ln(c P1(k))`.
fn dominance(m: &ModelParams, k: u64) -> f64 {
    let (first, second) = m.weighted_ln_pmfs(k);
    second - first
}

/// Scan `k = 1 ..= BURST_SCAN_MAX` for runs where the second regime
/// dominates and return the widest.
///
/// The scan is done in log space over the whole range; no tail cut-off is
/// applied, so the result is exactly the exhaustive answer on that range.
pub fn burst_interval(m: &ModelParams) -> BurstPartition {
    if m.c() >= 1.0 {
        return BurstPartition::empty();
    }
    let mut runs = 0usize;
    let mut best: Option<BurstInterval> = None;
    let mut open: Option<u64> = None;
    let mut close = |lo: u64, hi: Option<u64>, best: &mut Option<BurstInterval>| {
        runs += 1;
        let cand = BurstInterval { k_lo: lo, k_hi: hi };
        if best.is_none_or(|b| cand.width() > b.width()) {
            *best = Some(cand);
        }
    };
    for k in 1..=BURST_SCAN_MAX {
        let holds = dominance(m, k) > 0.0;
        match (holds, open) {
            (true, None) => open = Some(k),
            (false, Some(lo)) => {
                close(lo, Some(k - 1), &mut best);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        close(lo, None, &mut best);
    }
    BurstPartition {
        interval: best,
        multiple: runs > 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PaperClass {
    /// Below the burst interval.
    NotAcknowledged,
    Burst,
    /// Above the burst interval.
    Classic,
}

impl PaperClass {
    pub fn name(self) -> &'static str {
        match self {
            PaperClass::NotAcknowledged => "not_acknowledged",
            PaperClass::Burst => "burst",
            PaperClass::Classic => "classic",
        }
    }
}

impl fmt::Display for PaperClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Class of a paper with `k` citations. With an empty partition no paper
/// reaches the burst, so every `k` is not acknowledged.
pub fn classify(k: u64, p: &BurstPartition) -> Result<PaperClass> {
    if k == 0 {
        return Err(Error::domain("classification is defined for k >= 1"));
    }
    Ok(match p.interval {
        None => PaperClass::NotAcknowledged,
        Some(iv) if k < iv.k_lo => PaperClass::NotAcknowledged,
        Some(iv) if iv.contains(k) => PaperClass::Burst,
        Some(_) => PaperClass::Classic,
    })
}

/// Hazard of one regime's processing time on a grid of `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardCurve {
    /// `(τ, h(τ))`, increasing in `τ`.
    pub points: Vec<(f64, f64)>,
    /// `E(τ) = μ`, the axis scale.
    pub mean_time: f64,
}

impl HazardCurve {
    /// `(τ/E(τ), h·E(τ))`.
    pub fn normalized(&self) -> Vec<(f64, f64)> {
        let e = self.mean_time;
        self.points.iter().map(|&(t, h)| (t / e, h * e)).collect()
    }
}

/// Tabulate [`hazard`] on `grid`. Fails on the first `τ` whose survival can
/// no longer be resolved, naming the largest safe `τ`.
pub fn hazard_curve(p: &ComponentParams, grid: &[f64]) -> Result<HazardCurve> {
    if grid.is_empty() {
        return Err(Error::domain("hazard grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("hazard grid must be strictly increasing"));
    }
    let points = grid
        .iter()
        .map(|&t| Ok((t, hazard(p, ProcessingTime::new(t)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HazardCurve {
        points,
        mean_time: p.mean_time(),
    })
}

/// `E(β2) / E(β1)`.
pub fn mean_rate_ratio(m: &ModelParams) -> f64 {
    m.comp2().mean_rate() / m.comp1().mean_rate()
}
