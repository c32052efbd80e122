use std::collections::BTreeMap;

use crate::{Error, Result};

/// Frequency table of citation counts.
///
/// Only `k >= 1` enters `bins`; papers with zero citations are held in
/// `uncited` and never take part in fitting. Empty bins are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    bins: BTreeMap<u64, u64>,
    uncited: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from one citation count per paper. Zeros go to `uncited`.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut h = Self::new();
        for k in counts {
            h.add(k, 1);
        }
        h
    }

    /// Build from `(k, n_k)` pairs with `k >= 1`. Pairs may repeat; their
    /// counts add up.
    pub fn from_bins<I: IntoIterator<Item = (u64, u64)>>(bins: I) -> Result<Self> {
        let mut h = Self::new();
        for (k, n) in bins {
            if k == 0 {
                return Err(Error::domain(
                    "k = 0 is outside the model support; record uncited papers with set_uncited",
                ));
            }
            h.add(k, n);
        }
        Ok(h)
    }

    /// Add `n` papers with `k` citations (`k = 0` counts as uncited).
    pub fn add(&mut self, k: u64, n: u64) {
        if n == 0 {
            return;
        }
        if k == 0 {
            self.uncited += n;
        } else {
            *self.bins.entry(k).or_insert(0) += n;
        }
    }

    pub fn set_uncited(&mut self, n: u64) {
        self.uncited = n;
    }

    pub fn with_uncited(mut self, n: u64) -> Self {
        self.uncited = n;
        self
    }

    /// `(k, n_k)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.bins.iter().map(|(&k, &n)| (k, n))
    }

    pub fn count(&self, k: u64) -> u64 {
        if k == 0 {
            self.uncited
        } else {
            self.bins.get(&k).copied().unwrap_or(0)
        }
    }

    pub fn uncited(&self) -> u64 {
        self.uncited
    }

    /// Papers cited at least once.
    pub fn n_cited(&self) -> u64 {
        self.bins.values().sum()
    }

    pub fn n_papers(&self) -> u64 {
        self.n_cited() + self.uncited
    }

    /// `Σ k n_k`.
    pub fn total_citations(&self) -> u64 {
        self.bins.iter().map(|(&k, &n)| k * n).sum()
    }

    pub fn max_k(&self) -> Option<u64> {
        self.bins.keys().next_back().copied()
    }

    pub fn distinct(&self) -> usize {
        self.bins.len()
    }

    /// No paper with `k >= 1`.
    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            bins: self.bins.iter().map(|(&k, &n)| (k, n * factor)).filter(|&(_, n)| n > 0).collect(),
            uncited: self.uncited * factor,
        }
    }

    /// Fraction of all papers that are uncited.
    pub fn uncited_fraction(&self) -> f64 {
        let n = self.n_papers();
        if n == 0 {
            0.0
        } else {
            self.uncited as f64 / n as f64
        }
    }
}

impl FromIterator<u64> for Histogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self::from_counts(iter)
    }
}
