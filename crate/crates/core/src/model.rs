//! The citation-count model.
//!
//! One concept collects a geometric number of citations with rate `β`:
//! `P(s | β) = (e^β - 1) e^{-sβ}` on `s >= 1`. Rates are the reciprocals of
//! Wald (inverse-Gaussian) processing times with mean `μ` and shape `λ`, and
//! two such regimes are mixed with weight `c`. Integrating the rate out
//! gives, per regime,
//!
//! ```text
//! P(k) = e^{λ/μ} √λ ( e^{-√(λ(2k-2+λ))/μ} / √(2k-2+λ) - e^{-√(λ(2k+λ))/μ} / √(2k+λ) )
//! ```
//!
//! which telescopes, so the survival function `Pr[K > k]` is the second
//! term alone. Everything is evaluated in log space: `e^{λ/μ}` overflows
//! long before the model stops being meaningful.

use std::f64::consts::PI;

use crate::histogram::Histogram;
use crate::numerics::{ln_std_normal_sf, log1m_exp, log_add_exp};
use crate::{Error, Result};

/// Relative accuracy demanded of a log-space survival evaluation before a
/// hazard value is trusted.
const SURVIVAL_REL_TOL: f64 = 1e-8;

/// Citation rate `β > 0` of a single concept.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rate(f64);

impl Rate {
    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(Self(beta))
        } else {
            Err(Error::domain(format!("rate must be finite and positive, got {beta}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Processing time `τ > 0` of a concept.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ProcessingTime(f64);

impl ProcessingTime {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau.is_finite() {
            Ok(Self(tau))
        } else {
            Err(Error::domain(format!("processing time must be finite and positive, got {tau}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// One inverse-Gaussian regime: integration time `μ` (mean processing
/// time) and precision `λ`.
///
/// The Wald first-passage form uses barrier 1, drift `α = 1/μ` and
/// diffusion `σ = 1/√λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentParams {
    mu: f64,
    lambda: f64,
}

impl ComponentParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain(format!("mu must be finite and positive, got {mu}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("lambda must be finite and positive, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Drift of the underlying diffusion.
    pub fn drift(&self) -> f64 {
        1.0 / self.mu
    }

    /// Diffusion constant of the underlying diffusion.
    pub fn diffusion(&self) -> f64 {
        1.0 / self.lambda.sqrt()
    }

    /// `E(β) = 1/μ + 1/λ`.
    pub fn mean_rate(&self) -> f64 {
        1.0 / self.mu + 1.0 / self.lambda
    }

    /// `Var(β) = (2μ + λ) / (μ λ²)`.
    pub fn rate_variance(&self) -> f64 {
        (2.0 * self.mu + self.lambda) / (self.mu * self.lambda * self.lambda)
    }

    /// `E(τ) = μ`.
    pub fn mean_time(&self) -> f64 {
        self.mu
    }

    /// `(λ - √(λ(2j+λ)))/μ - ln(2j+λ)/2`, with the leading difference
    /// rewritten to avoid cancellation when `λ >> j`.
    #[inline]
    fn log_tail_term(&self, j: f64) -> (f64, f64) {
        let lam = self.lambda;
        let root = (lam * (2.0 * j + lam)).sqrt();
        let shift = -2.0 * j * lam / (self.mu * (lam + root));
        (shift - 0.5 * (2.0 * j + lam).ln(), root)
    }

    /// `ln P(K = k)` for this regime alone; `-∞` at `k = 0`.
    #[inline]
    pub fn ln_pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return f64::NEG_INFINITY;
        }
        let j = (k - 1) as f64;
        let lam = self.lambda;
        let (prev, root_prev) = self.log_tail_term(j);
        let root_k = (lam * (2.0 * j + 2.0 + lam)).sqrt();
        // Log-ratio of consecutive tail terms, formed directly.
        let gap = 2.0 * lam / (self.mu * (root_k + root_prev)) + 0.5 * (2.0 / (2.0 * j + lam)).ln_1p();
        0.5 * lam.ln() + prev + log1m_exp(-gap)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// `ln Pr[K > k]`.
    #[inline]
    pub fn ln_ccdf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        0.5 * self.lambda.ln() + self.log_tail_term(k as f64).0
    }

    pub fn ccdf(&self, k: u64) -> f64 {
        self.ln_ccdf(k).exp()
    }
}

/// Parameters of the two-regime citation model.
///
/// `c` weighs the first-occurrence regime `comp1`; `comp2` is the
/// repeated-citation regime. `c = 1` is allowed and makes `comp2` inert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    c: f64,
    comp1: ComponentParams,
    comp2: ComponentParams,
    ln_c: f64,
    ln_1mc: f64,
}

impl ModelParams {
    pub fn new(c: f64, comp1: ComponentParams, comp2: ComponentParams) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::domain(format!("c must lie in (0, 1], got {c}")));
        }
        Ok(Self {
            c,
            comp1,
            comp2,
            ln_c: c.ln(),
            ln_1mc: (-c).ln_1p(),
        })
    }

    /// From `[c, μ1, λ1, μ2, λ2]`.
    pub fn from_array(p: [f64; 5]) -> Result<Self> {
        Self::new(
            p[0],
            ComponentParams::new(p[1], p[2])?,
            ComponentParams::new(p[3], p[4])?,
        )
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.c, self.comp1.mu, self.comp1.lambda, self.comp2.mu, self.comp2.lambda]
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn comp1(&self) -> &ComponentParams {
        &self.comp1
    }

    pub fn comp2(&self) -> &ComponentParams {
        &self.comp2
    }

    /// Relabel so that `E(β2) >= E(β1)`.
    ///
    /// The likelihood is invariant under swapping the components together
    /// with `c -> 1 - c`. At `c = 1` a swap is impossible; `comp2` carries
    /// no weight there and is replaced by `comp1`.
    pub fn canonical(&self) -> Self {
        if self.comp1.mean_rate() <= self.comp2.mean_rate() {
            return *self;
        }
        if self.c < 1.0 {
            Self::new(1.0 - self.c, self.comp2, self.comp1).expect("1 - c lies in (0, 1)")
        } else {
            Self::new(1.0, self.comp1, self.comp1).expect("valid")
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.comp1.mean_rate() <= self.comp2.mean_rate()
    }

    /// `ln c P1(k)` and `ln (1-c) P2(k)`.
    #[inline]
    pub fn weighted_ln_pmfs(&self, k: u64) -> (f64, f64) {
        let first = self.ln_c + self.comp1.ln_pmf(k);
        let second = if self.c < 1.0 {
            self.ln_1mc + self.comp2.ln_pmf(k)
        } else {
            f64::NEG_INFINITY
        };
        (first, second)
    }

    #[inline]
    pub fn ln_pmf(&self, k: u64) -> f64 {
        let (a, b) = self.weighted_ln_pmfs(k);
        log_add_exp(a, b)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    pub fn ccdf(&self, k: u64) -> f64 {
        let first = self.c * self.comp1.ccdf(k);
        if self.c < 1.0 {
            first + (1.0 - self.c) * self.comp2.ccdf(k)
        } else {
            first
        }
    }
}

/// A discrete distribution on `k >= 1`, as consumed by the goodness-of-fit
/// machinery.
pub trait CountDistribution {
    fn ln_pmf(&self, k: u64) -> f64;

    /// `Pr[K > k]`.
    fn ccdf(&self, k: u64) -> f64;

    fn pmf(&self, k: u64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// `Pr[lo <= K <= hi]`, or `Pr[K >= lo]` when `hi` is `None`.
    fn mass(&self, lo: u64, hi: Option<u64>) -> f64 {
        match hi {
            Some(hi) if hi == lo => self.pmf(lo),
            Some(hi) => self.ccdf(lo - 1) - self.ccdf(hi),
            None => self.ccdf(lo - 1),
        }
    }
}

impl CountDistribution for ModelParams {
    fn ln_pmf(&self, k: u64) -> f64 {
        ModelParams::ln_pmf(self, k)
    }

    fn ccdf(&self, k: u64) -> f64 {
        ModelParams::ccdf(self, k)
    }
}

/// `(e^β - 1) e^{-sβ}`, zero at `s = 0`.
pub fn geometric_pmf(beta: Rate, s: u64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    let b = beta.0;
    // ln(e^β - 1) = β + ln(1 - e^{-β})
    (log1m_exp(-b) - (s - 1) as f64 * b).exp()
}

/// `e^β / (e^β - 1)`, the mean of [`geometric_pmf`].
pub fn geometric_mean(beta: Rate) -> f64 {
    1.0 / -(-beta.0).exp_m1()
}

/// `c P(s | β1) + (1 - c) P(s | β2)`.
pub fn mixture_pmf(c: f64, beta1: Rate, beta2: Rate, s: u64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::domain(format!("c must lie in (0, 1], got {c}")));
    }
    Ok(c * geometric_pmf(beta1, s) + (1.0 - c) * geometric_pmf(beta2, s))
}

/// Density of the rate `β = 1/τ` when `τ` is Wald distributed:
/// `√(λ/(2πβ)) exp(-λ(βμ - 1)² / (2βμ²))`.
pub fn rate_density(p: &ComponentParams, beta: Rate) -> f64 {
    let (mu, lam, b) = (p.mu, p.lambda, beta.0);
    let dev = b * mu - 1.0;
    ((lam / (2.0 * PI * b)).ln() * 0.5 - lam * dev * dev / (2.0 * b * mu * mu)).exp()
}

/// Wald first-passage density with barrier 1, drift `1/μ`, diffusion
/// `1/√λ`: `√(λ/(2πτ³)) exp(-λ(τ - μ)² / (2μ²τ))`.
pub fn wald_density(p: &ComponentParams, tau: ProcessingTime) -> f64 {
    ln_wald_density(p, tau.0).exp()
}

fn ln_wald_density(p: &ComponentParams, t: f64) -> f64 {
    let (mu, lam) = (p.mu, p.lambda);
    let dev = t - mu;
    0.5 * (lam / (2.0 * PI * t * t * t)).ln() - lam * dev * dev / (2.0 * mu * mu * t)
}

/// The two normal-tail logs whose exponentials make up the Wald CDF:
/// `F = Φ(z1) + e^{2λ/μ} Φ(-z2)`, `S = Φ(-z1) - e^{2λ/μ} Φ(-z2)`.
fn wald_log_terms(p: &ComponentParams, t: f64) -> (f64, f64, f64) {
    let (mu, lam) = (p.mu, p.lambda);
    let s = (lam / t).sqrt();
    let z1 = s * (t / mu - 1.0);
    let z2 = s * (t / mu + 1.0);
    let second = 2.0 * lam / mu + ln_std_normal_sf(z2);
    (ln_std_normal_sf(-z1), ln_std_normal_sf(z1), second)
}

/// Wald CDF, combined in log space so `e^{2λ/μ}` never overflows.
pub fn wald_cdf(p: &ComponentParams, tau: ProcessingTime) -> f64 {
    let (ln_phi, _, second) = wald_log_terms(p, tau.0);
    log_add_exp(ln_phi, second).exp().min(1.0)
}

/// `ln(1 - F(τ))` with the relative accuracy of the result.
fn ln_wald_sf_checked(p: &ComponentParams, t: f64) -> (f64, f64) {
    let (_, a, b) = wald_log_terms(p, t);
    if !(a > b) {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let frac = -(b - a).exp_m1();
    let rel_err = 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) / frac;
    (a + log1m_exp(b - a), rel_err)
}

/// `ln(1 - F(τ))`.
pub fn ln_wald_sf(p: &ComponentParams, tau: ProcessingTime) -> f64 {
    ln_wald_sf_checked(p, tau.0).0
}

/// `1 - F(τ)`.
pub fn wald_sf(p: &ComponentParams, tau: ProcessingTime) -> f64 {
    ln_wald_sf(p, tau).exp()
}

/// Largest `τ` at which the survival function is still evaluated to
/// relative accuracy `1e-8`.
pub fn largest_safe_tau(p: &ComponentParams) -> f64 {
    let safe = |t: f64| ln_wald_sf_checked(p, t).1 <= SURVIVAL_REL_TOL;
    let mut lo = p.mu;
    if !safe(lo) {
        return lo;
    }
    let mut hi = 2.0 * lo;
    while safe(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if safe(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Hazard rate `h(τ) = f(τ) / (1 - F(τ))` of the processing time.
///
/// Fails once the survival function can no longer be resolved, naming the
/// largest `τ` that can.
pub fn hazard(p: &ComponentParams, tau: ProcessingTime) -> Result<f64> {
    let t = tau.0;
    let (ln_s, rel_err) = ln_wald_sf_checked(p, t);
    if rel_err > SURVIVAL_REL_TOL {
        return Err(Error::SurvivalUnderflow {
            tau: t,
            largest_safe: largest_safe_tau(p),
        });
    }
    Ok((ln_wald_density(p, t) - ln_s).exp())
}

/// One regime of the citation PMF.
pub fn component_pmf(p: &ComponentParams, k: u64) -> f64 {
    p.pmf(k)
}

/// The two-regime citation PMF.
pub fn citation_pmf(m: &ModelParams, k: u64) -> f64 {
    m.pmf(k)
}

/// `Pr[K > k]`; equals 1 at `k = 0`.
pub fn citation_ccdf(m: &ModelParams, k: u64) -> f64 {
    m.ccdf(k)
}

/// Continuous analogue of one regime, the density whose integral over
/// `[k-1, k]` is [`component_pmf`]:
/// `(λ√(2x+λ) + μ√λ) / (μ (2x+λ)^{3/2}) · exp((λ - √(λ(2x+λ)))/μ)`.
pub fn continuous_pdf(p: &ComponentParams, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("x must be finite and positive, got {x}")));
    }
    let (mu, lam) = (p.mu, p.lambda);
    let w = 2.0 * x + lam;
    let root = (lam * w).sqrt();
    let exponent = -2.0 * x * lam / (mu * (lam + root));
    Ok((lam * w.sqrt() + mu * lam.sqrt()) / (mu * w * w.sqrt()) * exponent.exp())
}

/// Large-`μ` limit of [`continuous_pdf`]: `√λ (2x+λ)^{-3/2}`.
pub fn limit_power_law(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0 && x > 0.0) || !lambda.is_finite() || !x.is_finite() {
        return Err(Error::domain(format!("need finite lambda, x > 0, got {lambda}, {x}")));
    }
    Ok(lambda.sqrt() * (2.0 * x + lambda).powf(-1.5))
}

/// Large-`λ` limit of [`continuous_pdf`]: `e^{-x/μ} / μ`.
pub fn limit_exponential(mu: f64, x: f64) -> Result<f64> {
    if !(mu > 0.0 && x > 0.0) || !mu.is_finite() || !x.is_finite() {
        return Err(Error::domain(format!("need finite mu, x > 0, got {mu}, {x}")));
    }
    Ok((-x / mu).exp() / mu)
}

/// `Σ_k n_k ln P(k)` over the cited papers of `h`.
pub fn log_likelihood(m: &ModelParams, h: &Histogram) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::domain("log-likelihood of an empty histogram"));
    }
    Ok(h.iter().map(|(k, n)| n as f64 * m.ln_pmf(k)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, integrate_with_breaks, Interval};
    use proptest::prelude::*;

    fn comp(mu: f64, lambda: f64) -> ComponentParams {
        ComponentParams::new(mu, lambda).unwrap()
    }

    fn rate(b: f64) -> Rate {
        Rate::new(b).unwrap()
    }

    fn reference() -> ModelParams {
        ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn geometric_examples() {
        let ln2 = 2f64.ln();
        assert!((geometric_pmf(rate(ln2), 1) - 0.5).abs() < 1e-15);
        assert!((geometric_pmf(rate(ln2), 3) - 0.125).abs() < 1e-15);
        assert_eq!(geometric_pmf(rate(ln2), 0), 0.0);
        assert!((geometric_mean(rate(ln2)) - 2.0).abs() < 1e-15);
        // Series: e^β/(e^β-1) = 1/β + 1/2 + β/12 + O(β³)
        let b = 1e-3;
        assert!((geometric_mean(rate(b)) - (1.0 / b + 0.5 + b / 12.0)).abs() < 1e-9);
        let big = geometric_mean(rate(50.0));
        assert!(big >= 1.0 && big - 1.0 < 3e-22);
    }

    #[test]
    fn geometric_sums_to_one() {
        for b in [0.05, 0.7, 3.0] {
            let s: f64 = (1..5000).map(|s| geometric_pmf(rate(b), s)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_examples() {
        let ln2 = 2f64.ln();
        for s in 1..10 {
            let m = mixture_pmf(1.0, rate(0.3), rate(2.0), s).unwrap();
            assert_eq!(m, geometric_pmf(rate(0.3), s));
        }
        assert!((mixture_pmf(0.5, rate(ln2), rate(ln2), 2).unwrap() - 0.25).abs() < 1e-15);
        // Direct transcription of the formula.
        let direct = 0.3 * (0.5f64.exp() - 1.0) * (-5.0f64).exp()
            + 0.7 * (0.05f64.exp() - 1.0) * (-0.5f64).exp();
        assert!(rel(mixture_pmf(0.3, rate(0.5), rate(0.05), 10).unwrap(), direct) < 1e-14);
        assert!(mixture_pmf(0.0, rate(1.0), rate(1.0), 1).is_err());
        assert!(mixture_pmf(1.2, rate(1.0), rate(1.0), 1).is_err());
    }

    #[test]
    fn rate_density_moments() {
        let p = comp(2.0, 4.0);
        let dom = Interval::to_infinity(0.0).unwrap();
        let f = |b: f64| if b > 0.0 { rate_density(&p, rate(b)) } else { 0.0 };
        let z = integrate(f, dom, 1e-11).unwrap();
        let m1 = integrate(|b| b * f(b), dom, 1e-11).unwrap();
        let m2 = integrate(|b| b * b * f(b), dom, 1e-11).unwrap();
        assert!((z - 1.0).abs() < 1e-8);
        assert!(rel(m1, 0.75) < 1e-8);
        assert!(rel(m2 - m1 * m1, 0.25) < 1e-8);
        assert_eq!(p.mean_rate(), 0.75);
        assert_eq!(p.rate_variance(), 0.25);
    }

    #[test]
    fn wald_density_examples() {
        let p = comp(1.0, 1.0);
        let v = wald_density(&p, ProcessingTime::new(1.0).unwrap());
        assert!((v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        for (mu, lam) in [(1.0, 1.0), (2.0, 0.3), (50.0, 0.5)] {
            let p = comp(mu, lam);
            let f = |t: f64| if t > 0.0 { wald_density(&p, ProcessingTime(t)) } else { 0.0 };
            let z = integrate_with_breaks(f, Interval::to_infinity(0.0).unwrap(), &[mu], 1e-11).unwrap();
            assert!((z - 1.0).abs() < 1e-8, "({mu},{lam}) -> {z}");
        }
    }

    #[test]
    fn change_of_variables_identity() {
        for (mu, lam) in [(2.0, 4.0), (0.3, 7.0), (50.0, 0.5)] {
            let p = comp(mu, lam);
            for b in [0.1, 1.0, 10.0] {
                let lhs = wald_density(&p, ProcessingTime(1.0 / b)) / (b * b);
                let rhs = rate_density(&p, rate(b));
                assert!(rel(lhs, rhs) < 1e-12, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn wald_cdf_examples() {
        let p = comp(1.0, 1.0);
        assert!(wald_cdf(&p, ProcessingTime(1e-12)) <= 1e-10);
        let q = integrate(
            |t| if t > 0.0 { wald_density(&p, ProcessingTime(t)) } else { 0.0 },
            Interval::new(0.0, 1.0).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!((wald_cdf(&p, ProcessingTime(1.0)) - q).abs() < 1e-8);
        let spike = comp(2.0, 1e6);
        assert!((wald_cdf(&spike, ProcessingTime(2.02)) - 1.0).abs() < 1e-3);
        // CDF + survival = 1
        for t in [0.01, 0.5, 3.0, 20.0] {
            let tau = ProcessingTime(t);
            assert!((wald_cdf(&p, tau) + wald_sf(&p, tau) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hazard_definition_and_derivative() {
        let p = comp(2.0, 1.0);
        for t in [0.5, 2.0, 8.0] {
            let tau = ProcessingTime(t);
            let h = hazard(&p, tau).unwrap();
            let lhs = h * (1.0 - wald_cdf(&p, tau));
            assert!(rel(lhs, wald_density(&p, tau)) < 1e-10);
        }
        // h = -d/dτ ln S by central differences.
        let p = comp(1.0, 1.0);
        let d = 1e-5;
        let fd = -(ln_wald_sf(&p, ProcessingTime(1.0 + d)) - ln_wald_sf(&p, ProcessingTime(1.0 - d))) / (2.0 * d);
        assert!((hazard(&p, ProcessingTime(1.0)).unwrap() - fd).abs() < 1e-4);
    }

    #[test]
    fn hazard_approaches_asymptote() {
        // h(τ) = λ/(2μ²) + 3/(2τ) + O(τ⁻²).
        for (mu, lam) in [(2.0, 1.0), (5.0, 0.5)] {
            let p = comp(mu, lam);
            let t = 2000.0 * mu;
            let h = hazard(&p, ProcessingTime(t)).unwrap();
            let asym = lam / (2.0 * mu * mu);
            assert!(rel(h, asym) < 2e-2, "({mu},{lam}): {h} vs {asym}");
            assert!(rel(h - asym, 1.5 / t) < 0.05);
        }
    }

    #[test]
    fn hazard_reports_safe_limit() {
        let p = comp(1.0, 1.0);
        match hazard(&p, ProcessingTime(1e9)) {
            Err(Error::SurvivalUnderflow { largest_safe, .. }) => {
                assert!(largest_safe > 1.0 && largest_safe < 1e9);
                assert!(hazard(&p, ProcessingTime(largest_safe * 0.99)).is_ok());
            }
            other => panic!("expected underflow error, got {other:?}"),
        }
    }

    #[test]
    fn power_law_limit_of_k1() {
        let p = comp(1e9, 2.0);
        assert!((p.pmf(1) - (1.0 - 0.5f64.sqrt())).abs() < 1e-8);
    }

    #[test]
    fn component_pmf_matches_compounding_integral() {
        for (mu, lam) in [(2.0, 1.0), (50.0, 0.5), (0.7, 3.0)] {
            let p = comp(mu, lam);
            for k in [1u64, 10, 100, 1000] {
                let integrand = |b: f64| {
                    if b > 0.0 {
                        geometric_pmf(rate(b), k) * rate_density(&p, rate(b))
                    } else {
                        0.0
                    }
                };
                let brk = [0.1 / k as f64, 1.0 / k as f64, 10.0 / k as f64, 1.0 / mu];
                let q = integrate_with_breaks(integrand, Interval::to_infinity(0.0).unwrap(), &brk, 1e-11)
                    .unwrap();
                assert!(rel(p.pmf(k), q) < 1e-6, "({mu},{lam}) k={k}: {} vs {q}", p.pmf(k));
            }
        }
    }

    #[test]
    fn pmf_is_integral_of_continuous_density() {
        let p = comp(5.0, 0.8);
        for k in [1u64, 2, 7, 40] {
            let q = integrate(
                |x| if x > 0.0 { continuous_pdf(&p, x).unwrap() } else { 0.0 },
                Interval::new(k as f64 - 1.0, k as f64).unwrap(),
                1e-12,
            )
            .unwrap();
            assert!(rel(p.pmf(k), q) < 1e-10);
        }
    }

    #[test]
    fn component_normalization() {
        let p = comp(2.0, 4.0);
        let mut sum = 0.0;
        for k in 1..=1_000_000u64 {
            sum += p.pmf(k);
        }
        let total = sum + p.ccdf(1_000_000);
        assert!(total >= 1.0 - 1e-6 && total <= 1.0 + 1e-9, "{total}");
    }

    #[test]
    fn ccdf_examples() {
        let m = reference();
        assert_eq!(m.ccdf(0), 1.0);
        let head: f64 = (1..=4).map(|k| m.pmf(k)).sum();
        assert!((m.ccdf(4) + head - 1.0).abs() < 1e-9);
        for k in 1..200 {
            let diff = m.ccdf(k - 1) - m.ccdf(k);
            assert!((diff - m.pmf(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn ccdf_matches_brute_force_summation() {
        // Pr[K > 100] = Σ_{k=101}^{10^7} P(k) + Pr[K > 10^7]; the remainder
        // beyond 10^7 is bounded by the ccdf there and is ~1e-4, so the
        // brute-force part is checked against the ccdf difference.
        let m = reference();
        let mut s = 0.0;
        let mut c = 0.0;
        for k in 101..=10_000_000u64 {
            let y = m.pmf(k) - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        let want = m.ccdf(100) - m.ccdf(10_000_000);
        assert!((s - want).abs() < 1e-8, "{s} vs {want}");
    }

    #[test]
    fn degenerate_mixtures() {
        let a = comp(3.0, 0.4);
        let b = comp(20.0, 2.0);
        let m = ModelParams::new(1.0, a, b).unwrap();
        for k in [1, 5, 300] {
            assert_eq!(m.pmf(k), a.pmf(k));
        }
        let same1 = ModelParams::new(0.2, a, a).unwrap();
        let same2 = ModelParams::new(0.9, a, a).unwrap();
        for k in [1, 5, 300] {
            assert!(rel(same1.pmf(k), same2.pmf(k)) < 1e-14);
        }
        assert!(ModelParams::new(0.0, a, b).is_err());
    }

    #[test]
    fn canonical_relabeling() {
        let m = ModelParams::from_array([0.3, 50.0, 0.5, 2.0, 1.0]).unwrap();
        assert!(!m.is_canonical());
        let c = m.canonical();
        assert!(c.is_canonical());
        assert!((c.c() - 0.7).abs() < 1e-15);
        for k in [1, 3, 50, 10_000] {
            assert!(rel(c.pmf(k), m.pmf(k)) < 1e-13);
        }
    }

    #[test]
    fn continuous_pdf_examples() {
        for (mu, lam) in [(2.0, 1.0), (50.0, 0.5)] {
            let p = comp(mu, lam);
            let z = integrate(
                |x| if x > 0.0 { continuous_pdf(&p, x).unwrap() } else { 0.0 },
                Interval::to_infinity(0.0).unwrap(),
                1e-11,
            )
            .unwrap();
            assert!((z - 1.0).abs() < 1e-8, "{z}");
        }
        let v = continuous_pdf(&comp(1e9, 2.0), 1.0).unwrap();
        assert!((v - 0.176_776_695_296_636_9).abs() < 1e-6);
        let v = continuous_pdf(&comp(2.0, 1e9), 1.0).unwrap();
        assert!((v - 0.5 * (-0.5f64).exp()).abs() < 1e-3);
        assert!(continuous_pdf(&comp(1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn limiting_forms() {
        assert!((limit_power_law(2.0, 1.0).unwrap() - 2f64.sqrt() / 8.0).abs() < 1e-15);
        let z = integrate(
            |x| if x > 0.0 { limit_power_law(2.0, x).unwrap() } else { 0.0 },
            Interval::to_infinity(0.0).unwrap(),
            1e-11,
        )
        .unwrap();
        assert!((z - 1.0).abs() < 1e-8);
        let slope = (limit_power_law(2.0, 1e4).unwrap().ln() - limit_power_law(2.0, 1e3).unwrap().ln())
            / (1e4f64.ln() - 1e3f64.ln());
        assert!((slope + 1.5).abs() < 1e-3);

        assert!((limit_exponential(2.0, 1e-300).unwrap() - 0.5).abs() < 1e-15);
        let mean = integrate(
            |x| if x > 0.0 { x * limit_exponential(2.0, x).unwrap() } else { 0.0 },
            Interval::to_infinity(0.0).unwrap(),
            1e-11,
        )
        .unwrap();
        assert!((mean - 2.0).abs() < 1e-9);
        let p = comp(2.0, 1e6);
        let sup = (1..=2000)
            .map(|i| 0.01 * f64::from(i))
            .map(|x| (continuous_pdf(&p, x).unwrap() - limit_exponential(2.0, x).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 1e-3, "{sup}");
    }

    #[test]
    fn log_likelihood_examples() {
        let m = ModelParams::new(1.0, comp(2.0, 1.0), comp(3.0, 3.0)).unwrap();
        let h = Histogram::from_bins([(1, 10)]).unwrap();
        let ll = log_likelihood(&m, &h).unwrap();
        assert!((ll - 10.0 * m.comp1().pmf(1).ln()).abs() < 1e-12);
        assert!(log_likelihood(&m, &Histogram::new()).is_err());

        let m = reference();
        let h = Histogram::from_bins([(1, 7), (4, 3), (40, 2)]).unwrap();
        let oracle: f64 = [(1u64, 7.0), (4, 3.0), (40, 2.0)]
            .iter()
            .map(|&(k, n)| n * (0.7 * m.comp1().pmf(k) + 0.3 * m.comp2().pmf(k)).ln())
            .sum();
        assert!((log_likelihood(&m, &h).unwrap() - oracle).abs() < 1e-12);
        let doubled = log_likelihood(&m, &h.scaled(2)).unwrap();
        assert!((doubled - 2.0 * oracle).abs() < 1e-12);
    }

    #[test]
    fn large_lambda_regime_is_finite() {
        // e^{λ/μ} alone would overflow here.
        let p = comp(0.5, 1e4);
        let s: f64 = (1..200).map(|k| p.pmf(k)).sum();
        assert!(p.pmf(1).is_finite() && (s + p.ccdf(199) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn component_pmf_strictly_decreasing(mu in 0.1f64..200.0, lam in 0.05f64..50.0) {
            let p = comp(mu, lam);
            let mut prev = p.ln_pmf(1);
            for k in (2..100_000u64).step_by(7) {
                let cur = p.ln_pmf(k);
                prop_assert!(cur < prev, "k={} ln pmf {} !< {}", k, cur, prev);
                prev = cur;
            }
        }

        #[test]
        fn mean_count_inverse_of_first_mass(b in 1e-6f64..40.0) {
            let r = rate(b);
            prop_assert!((geometric_mean(r) * geometric_pmf(r, 1) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn swap_invariance(c in 0.01f64..0.99, m1 in 0.1f64..100.0, l1 in 0.1f64..10.0,
                           m2 in 0.1f64..100.0, l2 in 0.1f64..10.0, k in 1u64..100_000) {
            let a = ModelParams::from_array([c, m1, l1, m2, l2]).unwrap();
            let b = ModelParams::from_array([1.0 - c, m2, l2, m1, l1]).unwrap();
            prop_assert!(rel(a.pmf(k), b.pmf(k)) < 1e-12);
        }
    }
}
