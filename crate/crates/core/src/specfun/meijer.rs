use num_complex::Complex;

use super::gamma::ln_gamma_complex;
use super::quadrature::{integrate, Tolerance};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of `G^{m,n}_{p,q}[z | a_1..a_p ; b_1..b_q]`, with `p = a.len()`
/// and `q = b.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec<T> {
    pub m: usize,
    pub n: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> MeijerGSpec<T> {
    pub fn new(m: usize, n: usize, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::invalid(format!("Meijer-G indices m={m}, n={n} exceed q={}, p={}", b.len(), a.len())));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("Meijer-G parameters must be finite"));
        }
        Ok(Self { m, n, a, b })
    }

    /// `G^{1,2}_{2,2}[z | 1,1 ; 1,0] = ln(1+z)`.
    pub fn ln1p() -> Self {
        Self { m: 1, n: 2, a: vec![T::one(), T::one()], b: vec![T::one(), T::zero()] }
    }

    /// `G^{1,1}_{1,2}[z | 1 ; 1,0] = 1 - e^{-z}`.
    pub fn one_minus_exp() -> Self {
        Self { m: 1, n: 1, a: vec![T::one()], b: vec![T::one(), T::zero()] }
    }

    /// The `G^{2,1}_{3,4}[· | -2,-1,1/2 ; 0,-2,0,1/2]` instance appearing in
    /// the Meijer-G closed form of the Rician-averaged SNR.
    pub fn rician_average_snr() -> Self {
        let h = T::lit(0.5);
        Self { m: 2, n: 1, a: vec![T::lit(-2.0), T::lit(-1.0), h], b: vec![T::zero(), T::lit(-2.0), T::zero(), h] }
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    /// `m + n - (p + q)/2`; the vertical contour converges for `δ > 0`.
    pub fn delta(&self) -> T {
        T::lit((self.m + self.n) as f64) - T::lit((self.p() + self.q()) as f64) * T::lit(0.5)
    }

    /// Real part of a contour line separating the poles of `Γ(b_j - s)`,
    /// `j ≤ m` (to its right) from those of `Γ(1 - a_j + s)`, `j ≤ n` (to its
    /// left): the midpoint of the gap between the two families.
    pub fn separating_shift(&self) -> Result<T> {
        let right = self.b[..self.m].iter().copied().fold(T::infinity(), T::min);
        let left = self.a[..self.n].iter().map(|&a| a - T::one()).fold(T::neg_infinity(), T::max);
        if self.m == 0 {
            return Err(Error::ContourFailure("m = 0 leaves no pole family to enclose".into()));
        }
        if left >= right {
            return Err(Error::ContourFailure(format!(
                "rightmost left pole {left} is not below leftmost right pole {right}"
            )));
        }
        Ok(if left.is_finite() { T::lit(0.5) * (left + right) } else { right - T::lit(0.5) })
    }

    fn log_kernel(&self, s: Complex<T>, ln_z: T) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let mut acc = s * ln_z;
        for (j, &b) in self.b.iter().enumerate() {
            acc = if j < self.m {
                acc + ln_gamma_complex(Complex::new(b, T::zero()) - s)
            } else {
                acc - ln_gamma_complex(one - b + s)
            };
        }
        for (j, &a) in self.a.iter().enumerate() {
            acc = if j < self.n {
                acc + ln_gamma_complex(one - a + s)
            } else {
                acc - ln_gamma_complex(Complex::new(a, T::zero()) - s)
            };
        }
        acc
    }
}

/// Path of the Mellin–Barnes integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape<T> {
    /// Vertical when `δ > 0`, otherwise a right-opening parabola (`p < q`).
    Auto,
    /// `s = c + it`.
    Vertical,
    /// `s = c + κt² + it`: loops around the right pole family, converging
    /// for every `p < q`.
    Parabolic { curvature: T },
}

#[derive(Debug, Clone, Copy)]
pub struct ContourConfig<T> {
    pub shape: ContourShape<T>,
    /// Real part where the contour crosses the real axis; `None` uses the
    /// separating midpoint.
    pub shift: Option<T>,
    /// Truncate once the integrand stays below `floor × peak`.
    pub floor: T,
    pub scan_step: T,
    pub max_extent: T,
    /// Quadrature tolerance; `abs` is relative to the integrand peak.
    pub tolerance: Tolerance<T>,
}

impl<T: Real> Default for ContourConfig<T> {
    fn default() -> Self {
        Self {
            shape: ContourShape::Auto,
            shift: None,
            floor: T::lit(1e-16),
            scan_step: T::lit(0.25),
            max_extent: T::lit(200.0),
            tolerance: Tolerance::new(T::lit(1e-15), T::lit(1e-12)).with_max_subdivisions(4000),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MellinBarnes<T> {
    pub value: T,
    pub abs_error: T,
    pub shift: T,
    pub shape: ContourShape<T>,
    /// Parameter `t` where the integrand was truncated.
    pub extent: T,
}

/// Numerical Meijer-G evaluation by contour integration of the Mellin–Barnes
/// integrand `Π Γ(b_j - s) Π Γ(1 - a_j + s) / (Π Γ(1 - b_j + s) Π Γ(a_j - s)) z^s`
/// for real `z > 0`.
///
/// Conjugate symmetry of the integrand halves the path:
/// `G = (1/π) ∫_0^T Im[Φ(s(t)) z^{s(t)} s'(t)] dt`.
pub fn meijer_g_mellin_barnes<T: Real>(
    spec: &MeijerGSpec<T>,
    z: T,
    contour: &ContourConfig<T>,
) -> Result<MellinBarnes<T>> {
    if !(z > T::zero() && z.is_finite()) {
        return Err(Error::invalid(format!("Meijer-G argument must be positive and finite, got {z}")));
    }
    let shift = match contour.shift {
        Some(c) => c,
        None => spec.separating_shift()?,
    };
    let shape = match contour.shape {
        ContourShape::Auto if spec.delta() > T::zero() => ContourShape::Vertical,
        ContourShape::Auto if spec.p() < spec.q() => ContourShape::Parabolic { curvature: T::one() },
        ContourShape::Auto => {
            return Err(Error::ContourFailure(format!(
                "no convergent contour for p={} ≥ q={} with δ ≤ 0",
                spec.p(),
                spec.q()
            )))
        }
        other => other,
    };
    let curvature = match shape {
        ContourShape::Parabolic { curvature } => curvature,
        _ => T::zero(),
    };
    let ln_z = z.ln();
    let point = |t: T| {
        let s = Complex::new(shift + curvature * t * t, t);
        let ds = Complex::new(T::lit(2.0) * curvature * t, T::one());
        (s, ds)
    };
    let magnitude = |t: T| {
        let (s, ds) = point(t);
        spec.log_kernel(s, ln_z).re.exp() * ds.norm()
    };

    let mut peak = T::zero();
    let mut below = 0usize;
    let mut t = T::zero();
    let extent = loop {
        let mag = magnitude(t);
        if mag.is_nan() {
            return Err(Error::NonConvergence {
                what: "Mellin-Barnes integrand",
                detail: format!("undefined at t={t}"),
            });
        }
        if mag > peak {
            peak = mag;
        }
        if peak.is_infinite() {
            return Err(Error::NonConvergence { what: "Mellin-Barnes integrand", detail: "overflow".into() });
        }
        if mag < contour.floor * peak {
            below += 1;
            if below >= 8 {
                break t;
            }
        } else {
            below = 0;
        }
        t = t + contour.scan_step;
        if t > contour.max_extent {
            return Err(Error::NonConvergence {
                what: "Mellin-Barnes tail truncation",
                detail: format!("integrand still above {:e} of its peak at t={}", contour.floor.as_f64(), t),
            });
        }
    };
    if peak == T::zero() {
        return Ok(MellinBarnes { value: T::zero(), abs_error: T::zero(), shift, shape, extent });
    }

    let integrand = |t: T| {
        let (s, ds) = point(t);
        (spec.log_kernel(s, ln_z).exp() * ds).im
    };
    let tol = Tolerance { abs: contour.tolerance.abs * peak, ..contour.tolerance };
    let q = integrate(integrand, T::zero(), extent, tol)?;
    let truncation = contour.floor * peak * contour.scan_step * T::lit(8.0);
    Ok(MellinBarnes { value: q.value / T::PI(), abs_error: (q.abs_error + truncation) / T::PI(), shift, shape, extent })
}

/// `G^{1,2}_{2,2}[z | 1,1 ; 1,0]`, which equals `ln(1+z)`; evaluated directly.
/// [`meijer_g_mellin_barnes`] with [`MeijerGSpec::ln1p`] gives the same
/// value by contour integration.
pub fn meijer_g_ln1p<T: Real>(z: T) -> T {
    z.ln_1p()
}
