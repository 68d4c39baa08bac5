// Coefficients are kept at their published precision.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

// Kronrod 15-point abscissae (symmetric, last is the centre) and weights,
// with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Absolute/relative accuracy target; the integral is accepted once the
/// estimated error is at most `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Self { abs, rel, max_subdivisions: 2000 }
    }

    pub fn with_max_subdivisions(self, n: usize) -> Self {
        Self { max_subdivisions: n, ..self }
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-12), T::lit(1e-10))
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs_mass: T,
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let centre = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut abs_mass = fc.abs() * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kronrod = kronrod + T::lit(WGK[j]) * (f1 + f2);
        abs_mass = abs_mass + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half_len,
        error: ((kronrod - gauss) * half_len).abs(),
        abs_mass: abs_mass * half_len.abs(),
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration over `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate meets the tolerance. Error estimates are the raw `|K15 - G7|`
/// differences, which bound the error of the returned Kronrod value for
/// smooth integrands.
pub fn integrate<T, F>(f: F, a: T, b: T, tol: Tolerance<T>) -> Result<Quadrature<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(Quadrature { value: T::zero(), abs_error: T::zero(), evaluations: 0 });
    }
    let mut segments = vec![gk15(&f, a, b)];
    let mut evaluations = 15;
    // roundoff floor: cannot resolve below a few ulps of ∫|f|
    let ulp_floor = T::lit(50.0) * T::epsilon();
    loop {
        let value = segments.iter().fold(T::zero(), |s, g| s + g.value);
        let error = segments.iter().fold(T::zero(), |s, g| s + g.error);
        let mass = segments.iter().fold(T::zero(), |s, g| s + g.abs_mass);
        let target = tol.abs.max(tol.rel * value.abs()).max(ulp_floor * mass);
        if !(value.is_finite() && error.is_finite()) {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        if error <= target {
            return Ok(Quadrature { value, abs_error: error, evaluations });
        }
        if segments.len() >= tol.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "error estimate {error:e} above target {target:e} after {} subdivisions",
                    segments.len()
                ),
            });
        }
        let (worst, _) = segments.iter().enumerate().fold((0, T::neg_infinity()), |(bi, be), (i, s)| {
            if s.error > be {
                (i, s.error)
            } else {
                (bi, be)
            }
        });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval exhausted at machine resolution; keep its estimate
            segments.push(Segment { error: T::zero(), ..seg });
            continue;
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
        evaluations += 30;
    }
}

/// `∫_a^∞ f` through `x = a + scale·t/(1-t)`.
fn integrate_tail<T, F>(f: &F, a: T, scale: T, tol: Tolerance<T>) -> Result<Quadrature<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let g = |t: T| {
        let one_minus = T::one() - t;
        let x = a + scale * t / one_minus;
        if !x.is_finite() {
            return T::zero();
        }
        let v = f(x) * scale / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    integrate(g, T::zero(), T::one(), tol)
}

/// `∫_0^∞ f` split at the given interior points; the last piece is mapped
/// onto a finite interval using `tail_scale` as its length scale.
pub fn integrate_semi_infinite_with_breaks<T, F>(
    f: F,
    breaks: &[T],
    tail_scale: T,
    tol: Tolerance<T>,
) -> Result<Quadrature<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let mut points: Vec<T> = breaks.iter().copied().filter(|b| *b > T::zero() && b.is_finite()).collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite break points"));
    points.dedup();
    let pieces = T::lit((points.len() + 1) as f64);
    let piece_tol = Tolerance { abs: tol.abs / pieces, ..tol };
    let mut total = Quadrature { value: T::zero(), abs_error: T::zero(), evaluations: 0 };
    let mut lo = T::zero();
    for &hi in &points {
        let q = integrate(&f, lo, hi, piece_tol)?;
        total.value = total.value + q.value;
        total.abs_error = total.abs_error + q.abs_error;
        total.evaluations += q.evaluations;
        lo = hi;
    }
    let scale = if tail_scale > T::zero() { tail_scale } else { T::one() };
    let q = integrate_tail(&f, lo, scale, piece_tol)?;
    total.value = total.value + q.value;
    total.abs_error = total.abs_error + q.abs_error;
    total.evaluations += q.evaluations;
    Ok(total)
}

/// `∫_0^∞ f(x) dx` for integrands decaying at least exponentially.
///
/// A logarithmic scan over `[1e-6, 1e4]` locates the mode of `|f|`; the
/// range is split there and the right tail is mapped with a length scale
/// taken from where `|f|` falls to 1e-3 of its peak.
pub fn integrate_semi_infinite<T, F>(f: F, tol: Tolerance<T>) -> Result<Quadrature<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let grid: Vec<T> = (-48..=32).map(|k| T::lit(10f64.powf(k as f64 / 8.0))).collect();
    let values: Vec<T> = grid.iter().map(|&x| f(x).abs()).collect();
    let (peak_idx, peak) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold((0, T::zero()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if peak == T::zero() {
        return integrate_tail(&f, T::zero(), T::one(), tol);
    }
    let mode = grid[peak_idx];
    let cut = peak * T::lit(1e-3);
    let right = (peak_idx + 1..grid.len()).find(|&i| values[i] < cut).map(|i| grid[i]).unwrap_or(mode * T::lit(10.0));
    let scale = (right - mode).max(mode * T::lit(0.1));
    integrate_semi_infinite_with_breaks(f, &[mode], scale, tol)
}
