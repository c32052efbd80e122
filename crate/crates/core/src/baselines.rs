//! Competitor models for citation counts, each a normalized PMF on `k >= 1`.
//!
//! | kind        | kernel (up to a constant)                 |
//! |-------------|-------------------------------------------|
//! | `dpl`       | `w PL(a1) + (1-w) PL(a2)`, `PL(a) ∝ k^-a` |
//! | `lognormal` | `exp(-b ln k - c ln² k)`                  |
//! | `stretched` | `(k/a)^(b-1) exp(-(k/a)^b)`               |
//! | `bessel`    | `2a I0(2√(ak))`                           |
//! | `tsallis`   | `(1 + (q-1)λk)^(-q/(q-1))`                |
//!
//! On unbounded support the normalizing sum is taken directly over the
//! first [`HEAD_TERMS`] values of `k` and the remainder by a midpoint
//! integral with its first Euler-Maclaurin correction. The Bessel kernel
//! grows without bound and is normalized only on a finite support.

use std::fmt;
use std::str::FromStr;

use crate::estimation::{self, FitMethod, FitReport, GofConfig};
use crate::histogram::Histogram;
use crate::model::CountDistribution;
use crate::numerics::{ln_bessel_i0, ln_std_normal_sf, log_add_exp, OptimizerConfig};
use crate::{Error, Result};

/// Terms summed explicitly before the tail integral takes over.
pub const HEAD_TERMS: u64 = 1000;

/// Largest finite support that is summed term by term.
const MAX_FINITE_SUPPORT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineKind {
    DoublePowerLaw,
    Lognormal,
    StretchedExp,
    Bessel,
    Tsallis,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [
        BaselineKind::DoublePowerLaw,
        BaselineKind::Lognormal,
        BaselineKind::StretchedExp,
        BaselineKind::Bessel,
        BaselineKind::Tsallis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::DoublePowerLaw => "dpl",
            BaselineKind::Lognormal => "lognormal",
            BaselineKind::StretchedExp => "stretched",
            BaselineKind::Bessel => "bessel",
            BaselineKind::Tsallis => "tsallis",
        }
    }

    /// Number of free parameters. The Bessel support bound is fixed by the
    /// data and not counted.
    pub fn n_params(self) -> usize {
        match self {
            BaselineKind::DoublePowerLaw => 3,
            BaselineKind::Bessel => 1,
            _ => 2,
        }
    }

    /// The estimation method conventionally paired with each model.
    pub fn default_method(self) -> FitMethod {
        match self {
            BaselineKind::DoublePowerLaw => FitMethod::LogLogLeastSquares,
            BaselineKind::Lognormal | BaselineKind::Tsallis => FitMethod::Chi2,
            BaselineKind::StretchedExp | BaselineKind::Bessel => FitMethod::Mle,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            BaselineKind::DoublePowerLaw => &["a1", "a2", "w"],
            BaselineKind::Lognormal => &["b", "c"],
            BaselineKind::StretchedExp => &["a", "b"],
            BaselineKind::Bessel => &["a", "support_max"],
            BaselineKind::Tsallis => &["q", "lambda"],
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown baseline model '{s}'")))
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// Weighted sum of two power laws, each normalized on `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublePowerLawParams {
    a1: f64,
    a2: f64,
    w: f64,
}

impl DoublePowerLawParams {
    /// Exponents must exceed 1 so each power law is summable.
    pub fn new(a1: f64, a2: f64, w: f64) -> Result<Self> {
        check(a1 > 1.0 && a1.is_finite() && a2 > 1.0 && a2.is_finite(), || {
            format!("power-law exponents must be finite and > 1, got {a1}, {a2}")
        })?;
        check(w > 0.0 && w < 1.0, || format!("w must lie in (0, 1), got {w}"))?;
        Ok(Self { a1, a2, w })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// Smallest integer `k >= 2` at which the second power law's weighted
    /// mass overtakes the first's. `None` if they never cross on `k >= 2`.
    pub fn k_break(&self) -> Option<u64> {
        if self.a1 == self.a2 {
            return None;
        }
        let l1 = self.w.ln() - ln_zeta(self.a1);
        let l2 = (-self.w).ln_1p() - ln_zeta(self.a2);
        let ln_k = (l1 - l2) / (self.a1 - self.a2);
        let k = ln_k.exp().ceil();
        (k.is_finite() && k >= 2.0 && k < u64::MAX as f64).then_some(k as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    b: f64,
    c: f64,
}

impl LognormalParams {
    pub fn new(b: f64, c: f64) -> Result<Self> {
        check(b.is_finite(), || format!("b must be finite, got {b}"))?;
        check(c > 0.0 && c.is_finite(), || format!("c must be finite and positive, got {c}"))?;
        Ok(Self { b, c })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchedExpParams {
    a: f64,
    b: f64,
}

impl StretchedExpParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check(a > 0.0 && a.is_finite(), || format!("a must be finite and positive, got {a}"))?;
        check(b > 0.0 && b <= 2.0, || format!("b must lie in (0, 2], got {b}"))?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselParams {
    a: f64,
    support_max: u64,
}

impl BesselParams {
    pub fn new(a: f64, support_max: u64) -> Result<Self> {
        check(a > 0.0 && a.is_finite(), || format!("a must be finite and positive, got {a}"))?;
        check(support_max >= 1, || "support_max must be at least 1".to_owned())?;
        Ok(Self { a, support_max })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn support_max(&self) -> u64 {
        self.support_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsallisParams {
    q: f64,
    lam: f64,
}

impl TsallisParams {
    pub fn new(q: f64, lam: f64) -> Result<Self> {
        check(q > 1.0 && q.is_finite(), || format!("q must be finite and > 1, got {q}"))?;
        check(lam > 0.0 && lam.is_finite(), || format!("lambda must be finite and positive, got {lam}"))?;
        Ok(Self { q, lam })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    /// Tail exponent `q/(q-1)`.
    fn p(&self) -> f64 {
        self.q / (self.q - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineParams {
    DoublePowerLaw(DoublePowerLawParams),
    Lognormal(LognormalParams),
    StretchedExp(StretchedExpParams),
    Bessel(BesselParams),
    Tsallis(TsallisParams),
}

impl BaselineParams {
    pub fn kind(&self) -> BaselineKind {
        match self {
            BaselineParams::DoublePowerLaw(_) => BaselineKind::DoublePowerLaw,
            BaselineParams::Lognormal(_) => BaselineKind::Lognormal,
            BaselineParams::StretchedExp(_) => BaselineKind::StretchedExp,
            BaselineParams::Bessel(_) => BaselineKind::Bessel,
            BaselineParams::Tsallis(_) => BaselineKind::Tsallis,
        }
    }

    /// Values in the order of [`BaselineKind::param_names`].
    pub fn values(&self) -> Vec<f64> {
        match *self {
            BaselineParams::DoublePowerLaw(p) => vec![p.a1, p.a2, p.w],
            BaselineParams::Lognormal(p) => vec![p.b, p.c],
            BaselineParams::StretchedExp(p) => vec![p.a, p.b],
            BaselineParams::Bessel(p) => vec![p.a, p.support_max as f64],
            BaselineParams::Tsallis(p) => vec![p.q, p.lam],
        }
    }

    /// Inverse of [`values`](Self::values).
    pub fn from_values(kind: BaselineKind, v: &[f64]) -> Result<Self> {
        let want = kind.param_names().len();
        if v.len() != want {
            return Err(Error::domain(format!("{kind} takes {want} values, got {}", v.len())));
        }
        Ok(match kind {
            BaselineKind::DoublePowerLaw => Self::DoublePowerLaw(DoublePowerLawParams::new(v[0], v[1], v[2])?),
            BaselineKind::Lognormal => Self::Lognormal(LognormalParams::new(v[0], v[1])?),
            BaselineKind::StretchedExp => Self::StretchedExp(StretchedExpParams::new(v[0], v[1])?),
            BaselineKind::Bessel => {
                let s = v[1];
                if !(s >= 1.0 && s.fract() == 0.0 && s < u64::MAX as f64) {
                    return Err(Error::domain(format!("support_max must be a positive integer, got {s}")));
                }
                Self::Bessel(BesselParams::new(v[0], s as u64)?)
            }
            BaselineKind::Tsallis => Self::Tsallis(TsallisParams::new(v[0], v[1])?),
        })
    }

    /// The support this model is normalized on by default.
    pub fn natural_domain(&self) -> NormalizationDomain {
        match self {
            BaselineParams::Bessel(p) => NormalizationDomain::up_to(p.support_max).expect("support_max >= 1"),
            _ => NormalizationDomain::unbounded(),
        }
    }
}

/// `k ∈ [1, k_max]`, or `k >= 1` when `k_max` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationDomain {
    k_max: Option<u64>,
}

impl NormalizationDomain {
    pub fn unbounded() -> Self {
        Self { k_max: None }
    }

    pub fn up_to(k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::domain("k_max must be at least 1"));
        }
        Ok(Self { k_max: Some(k_max) })
    }

    pub fn k_min(&self) -> u64 {
        1
    }

    pub fn k_max(&self) -> Option<u64> {
        self.k_max
    }
}

/// `ln Σ_{k>=1} k^-a` for `a > 1`.
fn ln_zeta(a: f64) -> f64 {
    let ln_f = |x: f64| -a * x.ln();
    let ln_tail = |x: f64| (1.0 - a) * x.ln() - (a - 1.0).ln();
    let head = (1..=HEAD_TERMS).rev().map(|k| ln_f(k as f64).exp()).sum::<f64>();
    (head + tail_sum(&ln_f, &ln_tail, HEAD_TERMS, 0.0)).ln()
}

/// `Σ_{k>K} f(k) e^{-shift}` from the tail integral over `[K+1/2, ∞)` plus
/// `f'(K+1/2)/24`.
fn tail_sum(ln_f: &dyn Fn(f64) -> f64, ln_tail: &dyn Fn(f64) -> f64, k: u64, shift: f64) -> f64 {
    let x = k as f64 + 0.5;
    let h = 1e-3 * x;
    let dln = (ln_f(x + h) - ln_f(x - h)) / (2.0 * h);
    let integral = (ln_tail(x) - shift).exp();
    let correction = (ln_f(x) - shift).exp() * dln / 24.0;
    let total = integral + correction;
    if total.is_nan() {
        0.0
    } else {
        total.max(0.0)
    }
}

/// A kernel with its parameter-dependent constants prepared.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    params: BaselineParams,
    /// `ln w - ln ζ(a1)` and `ln(1-w) - ln ζ(a2)` for the double power law.
    dpl: [f64; 2],
}

impl Kernel {
    fn new(params: BaselineParams) -> Self {
        let dpl = match params {
            BaselineParams::DoublePowerLaw(p) => [p.w.ln() - ln_zeta(p.a1), (-p.w).ln_1p() - ln_zeta(p.a2)],
            _ => [0.0; 2],
        };
        Self { params, dpl }
    }

    fn ln_eval(&self, x: f64) -> f64 {
        match self.params {
            BaselineParams::DoublePowerLaw(p) => {
                let lx = x.ln();
                log_add_exp(self.dpl[0] - p.a1 * lx, self.dpl[1] - p.a2 * lx)
            }
            BaselineParams::Lognormal(p) => {
                let u = x.ln();
                -p.b * u - p.c * u * u
            }
            BaselineParams::StretchedExp(p) => {
                let r = x / p.a;
                (p.b - 1.0) * r.ln() - r.powf(p.b)
            }
            BaselineParams::Bessel(p) => {
                (2.0 * p.a).ln() + ln_bessel_i0(2.0 * (p.a * x).sqrt()).expect("non-negative argument")
            }
            BaselineParams::Tsallis(p) => -p.p() * ((p.q - 1.0) * p.lam * x).ln_1p(),
        }
    }

    /// `ln ∫_x^∞ kernel`, or `None` if the integral diverges.
    fn ln_tail_integral(&self, x: f64) -> Option<f64> {
        match self.params {
            BaselineParams::DoublePowerLaw(p) => {
                let lx = x.ln();
                let t1 = self.dpl[0] + (1.0 - p.a1) * lx - (p.a1 - 1.0).ln();
                let t2 = self.dpl[1] + (1.0 - p.a2) * lx - (p.a2 - 1.0).ln();
                Some(log_add_exp(t1, t2))
            }
            BaselineParams::Lognormal(p) => {
                // u = ln x: ∫ exp((1-b)u - c u²) du, a shifted Gaussian.
                let centre = (1.0 - p.b) / (2.0 * p.c);
                let z = (2.0 * p.c).sqrt() * (x.ln() - centre);
                Some(p.c * centre * centre + 0.5 * (std::f64::consts::PI / p.c).ln() + ln_std_normal_sf(z))
            }
            BaselineParams::StretchedExp(p) => Some((p.a / p.b).ln() - (x / p.a).powf(p.b)),
            BaselineParams::Bessel(_) => None,
            BaselineParams::Tsallis(p) => Some((1.0 - p.p()) * ((p.q - 1.0) * p.lam * x).ln_1p() - p.lam.ln()),
        }
    }
}

/// The printed kernel at `k`, without normalization.
///
/// For the double power law each component is already normalized on
/// `k >= 1`, so the kernel is itself a PMF there.
pub fn unnormalized(params: &BaselineParams, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(Kernel::new(*params).ln_eval(k as f64).exp())
}

/// A baseline PMF with its normalization precomputed.
#[derive(Debug, Clone)]
pub struct Baseline {
    kernel: Kernel,
    domain: NormalizationDomain,
    /// All kernel values are handled as `kernel · e^{-shift}`.
    shift: f64,
    /// `suffix[k] = Σ_{j>k} kernel(j) e^{-shift}` for `k < suffix.len()`.
    suffix: Vec<f64>,
    ln_z: f64,
}

impl Baseline {
    pub fn new(params: BaselineParams, domain: NormalizationDomain) -> Result<Self> {
        let kernel = Kernel::new(params);
        let (head_end, ln_tail_at_end) = match domain.k_max {
            Some(k_max) => {
                if k_max > MAX_FINITE_SUPPORT {
                    return Err(Error::domain(format!("finite support above {MAX_FINITE_SUPPORT} is not supported")));
                }
                (k_max, None)
            }
            None => {
                let lt = kernel.ln_tail_integral(HEAD_TERMS as f64 + 0.5).ok_or_else(|| {
                    Error::domain(format!("the {} kernel is not summable on unbounded support", params.kind()))
                })?;
                (HEAD_TERMS, Some(lt))
            }
        };
        let ln_vals: Vec<f64> = (1..=head_end).map(|k| kernel.ln_eval(k as f64)).collect();
        let shift = ln_vals
            .iter()
            .copied()
            .chain(ln_tail_at_end)
            .fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::domain(format!("{} kernel is not finite for {params:?}", params.kind())));
        }
        let mut suffix = vec![0.0; head_end as usize + 1];
        let mut acc = if domain.k_max.is_none() {
            tail_sum(&|x| kernel.ln_eval(x), &|x| kernel.ln_tail_integral(x).unwrap_or(f64::NEG_INFINITY), head_end, shift)
        } else {
            0.0
        };
        for k in (1..=head_end as usize).rev() {
            suffix[k] = acc;
            acc += (ln_vals[k - 1] - shift).exp();
        }
        suffix[0] = acc;
        let ln_z = shift + acc.ln();
        if !ln_z.is_finite() {
            return Err(Error::domain(format!("normalization of {} failed for {params:?}", params.kind())));
        }
        Ok(Self {
            kernel,
            domain,
            shift,
            suffix,
            ln_z,
        })
    }

    /// Normalized on the model's natural domain.
    pub fn with_natural_domain(params: BaselineParams) -> Result<Self> {
        Self::new(params, params.natural_domain())
    }

    pub fn params(&self) -> &BaselineParams {
        &self.kernel.params
    }

    pub fn domain(&self) -> NormalizationDomain {
        self.domain
    }

    /// `ln Z`.
    pub fn ln_normalizer(&self) -> f64 {
        self.ln_z
    }

    fn in_support(&self, k: u64) -> bool {
        k >= 1 && self.domain.k_max.is_none_or(|m| k <= m)
    }
}

impl CountDistribution for Baseline {
    fn ln_pmf(&self, k: u64) -> f64 {
        if !self.in_support(k) {
            return f64::NEG_INFINITY;
        }
        self.kernel.ln_eval(k as f64) - self.ln_z
    }

    fn ccdf(&self, k: u64) -> f64 {
        let z = self.suffix[0];
        if let Some(&s) = self.suffix.get(k as usize) {
            return (s / z).min(1.0);
        }
        if self.domain.k_max.is_some() {
            return 0.0;
        }
        let lf = |x| self.kernel.ln_eval(x);
        let lt = |x| self.kernel.ln_tail_integral(x).unwrap_or(f64::NEG_INFINITY);
        (tail_sum(&lf, &lt, k, self.shift) / z).min(1.0)
    }
}

/// The normalizing constant `Z = Σ kernel(k)` over `domain`.
pub fn normalize(params: &BaselineParams, domain: NormalizationDomain) -> Result<f64> {
    Ok(Baseline::new(*params, domain)?.ln_z.exp())
}

/// `kernel(k) / Z`, zero outside the domain.
pub fn baseline_pmf(params: &BaselineParams, domain: NormalizationDomain, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(Baseline::new(*params, domain)?.pmf(k))
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Map between unconstrained optimizer coordinates and parameters.
pub(crate) fn params_from_free(kind: BaselineKind, x: &[f64], support_max: u64) -> Result<BaselineParams> {
    Ok(match kind {
        BaselineKind::DoublePowerLaw => BaselineParams::DoublePowerLaw(DoublePowerLawParams::new(
            1.0 + x[0].exp(),
            1.0 + x[1].exp(),
            logistic(x[2]),
        )?),
        BaselineKind::Lognormal => BaselineParams::Lognormal(LognormalParams::new(x[0], x[1].exp())?),
        BaselineKind::StretchedExp => {
            BaselineParams::StretchedExp(StretchedExpParams::new(x[0].exp(), 2.0 * logistic(x[1]))?)
        }
        BaselineKind::Bessel => BaselineParams::Bessel(BesselParams::new(x[0].exp(), support_max)?),
        BaselineKind::Tsallis => BaselineParams::Tsallis(TsallisParams::new(1.0 + x[0].exp(), x[1].exp())?),
    })
}

fn default_start(kind: BaselineKind, h: &Histogram) -> Vec<f64> {
    let mean = h.total_citations() as f64 / h.n_cited() as f64;
    match kind {
        BaselineKind::DoublePowerLaw => vec![(0.5f64).ln(), (1.5f64).ln(), logit(0.5)],
        BaselineKind::Lognormal => vec![1.0, (0.1f64).ln()],
        BaselineKind::StretchedExp => vec![mean.ln(), logit(0.25)],
        BaselineKind::Bessel => vec![(1.0 / mean).ln()],
        BaselineKind::Tsallis => vec![(0.5f64).ln(), (1.0 / mean).ln()],
    }
}

/// Fit one baseline model to `h`.
pub fn fit_baseline(
    kind: BaselineKind,
    h: &Histogram,
    method: FitMethod,
    gof: &GofConfig,
    config: &OptimizerConfig,
) -> Result<FitReport> {
    estimation::check_fittable(h)?;
    let support_max = h.max_k().expect("non-empty");
    let start = default_start(kind, h);
    let build = |x: &[f64]| -> Option<Baseline> {
        let params = params_from_free(kind, x, support_max).ok()?;
        Baseline::with_natural_domain(params).ok()
    };
    estimation::fit_family(
        h,
        estimation::ModelKind::Baseline(kind),
        method,
        &[start],
        build,
        |b: &Baseline| estimation::FittedParams::Baseline(*b.params()),
        gof,
        config,
    )
}
