use crate::scalar::Real;

// Above this argument the asymptotic expansion is accurate to well below
// f64 epsilon (smallest term ~ e^{-2x}).
const ASYMPTOTIC_FROM: f64 = 20.0;
const TRAPEZOID_NODES: usize = 64;

/// Exponentially scaled modified Bessel function `e^{-x} I0(x)` for `x ≥ 0`.
///
/// Small arguments use the trapezoid rule on `(1/π)∫₀^π e^{x(cos θ - 1)} dθ`,
/// which converges geometrically for periodic integrands; large arguments
/// use the Hankel asymptotic series.
pub fn bessel_i0_scaled<T: Real>(x: T) -> T {
    let x = x.abs();
    if x.as_f64() < ASYMPTOTIC_FROM {
        let n = TRAPEZOID_NODES;
        let step = T::PI() / T::lit(n as f64);
        let mut acc = T::zero();
        for k in 0..=n {
            let w = if k == 0 || k == n { T::lit(0.5) } else { T::one() };
            let theta = step * T::lit(k as f64);
            acc = acc + w * (x * (theta.cos() - T::one())).exp();
        }
        acc / T::lit(n as f64)
    } else {
        let inv8x = T::one() / (T::lit(8.0) * x);
        let mut term = T::one();
        let mut sum = T::one();
        for k in 1..60 {
            let odd = T::lit((2 * k - 1) as f64);
            let next = term * odd * odd * inv8x / T::lit(k as f64);
            if next >= term {
                break;
            }
            term = next;
            sum = sum + term;
            if term < T::epsilon() * sum {
                break;
            }
        }
        sum / (T::lit(2.0) * T::PI() * x).sqrt()
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0<T: Real>(x: T) -> T {
    bessel_i0_scaled(x) * x.abs().exp()
}
