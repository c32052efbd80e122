//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const MAX_SEGMENTS: usize = 5000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Integration domain `[lo, hi]`. `hi` may be `+∞`, in which case the
/// integral is improper: `[lo, lo+1]` is integrated directly (shifted to
/// `t ∈ [0, 1]`) and the tail through `x = lo - 1/t`, `t ∈ [-1, 0)`, so that
/// both the left endpoint and infinity sit at `t = 0` where floating point
/// resolution is finest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || hi.is_nan() || !(lo < hi) || hi == f64::NEG_INFINITY {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, ∞)`.
    pub fn to_infinity(lo: f64) -> Result<Self> {
        Self::new(lo, f64::INFINITY)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_improper(&self) -> bool {
        self.hi.is_infinite()
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err < floor {
        err = floor;
    }
    err
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    if !value.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let error = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    Ok(Segment { a, b, value, error })
}

/// Adaptive integral of `f` over `domain` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Interval, rel_tol: f64) -> Result<f64> {
    integrate_with_breaks(f, domain, &[], rel_tol)
}

/// As [`integrate`], with the domain pre-split at `breaks`. Useful when the
/// integrand has a narrow peak whose location is known, which a 15-point
/// rule on the whole domain could step over entirely.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    domain: Interval,
    breaks: &[f64],
    rel_tol: f64,
) -> Result<f64> {
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return Err(Error::domain(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")));
    }
    let lo = domain.lo;
    let improper = domain.is_improper();
    let to_t = |x: f64| {
        if !improper {
            x
        } else if x - lo <= 1.0 {
            x - lo
        } else {
            -1.0 / (x - lo)
        }
    };
    let g = |t: f64| {
        if !improper {
            f(t)
        } else if t >= 0.0 {
            f(lo + t)
        } else {
            let v = f(lo - 1.0 / t);
            if v == 0.0 {
                0.0
            } else {
                v / t / t
            }
        }
    };
    let (t0, t1) = if improper { (-1.0, 1.0) } else { (domain.lo, domain.hi) };

    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > domain.lo && x < domain.hi)
        .map(to_t)
        .collect();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(t0);
    if improper {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    edges.extend(cuts);
    edges.push(t1);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let seg = kronrod15(&g, w[0], w[1])?;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }
    let mut frozen_err = 0.0;
    let mut n_segments = heap.len();
    let span = t1 - t0;

    loop {
        let target = rel_tol * total.abs();
        if total_err <= target || total_err == 0.0 {
            return Ok(total);
        }
        if n_segments >= MAX_SEGMENTS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * (worst.a.abs() + worst.b.abs())
            || (worst.b - worst.a) <= 1e-250 * span
        {
            // Cannot split further; its error stays in the budget.
            frozen_err += worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod15(&g, worst.a, mid)?;
        let right = kronrod15(&g, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        n_segments += 1;
        // Recompute sums occasionally to shed accumulated rounding.
        if n_segments % 256 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
        }
    }
    total = heap.iter().map(|s| s.value).sum();
    total_err = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    if total_err <= rel_tol * total.abs() {
        return Ok(total);
    }
    Err(Error::Convergence {
        what: "adaptive quadrature",
        estimate: total,
        error_estimate: total_err,
    })
}
