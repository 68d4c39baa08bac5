// Coefficients are kept at their published precision.
#![allow(clippy::excessive_precision)]

use num_complex::Complex;

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln sin(πz)` on any branch, stable for large `|Im z|` where `sin` itself
/// overflows.
pub fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let w = z * T::PI();
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    if w.im >= T::zero() {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        -i * w
            + Complex::new(T::zero(), half).ln()
            + (Complex::new(T::one(), T::zero()) - (i * w * T::lit(2.0)).exp()).ln()
    } else {
        // sin w = (-i/2) e^{iw} (1 - e^{-2iw})
        i * w
            + Complex::new(T::zero(), -half).ln()
            + (Complex::new(T::one(), T::zero()) - (-i * w * T::lit(2.0)).exp()).ln()
    }
}

/// Complex log-gamma (Lanczos, g = 7) with reflection for `Re z < 1/2`.
///
/// Only `exp` of the result is meaningful; the imaginary part is not
/// reduced to the principal branch.
pub fn ln_gamma_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    if z.re < T::lit(0.5) {
        return Complex::new(T::PI().ln(), T::zero()) - ln_sin_pi(z) - ln_gamma_complex(one - z);
    }
    let z = z - one;
    let mut acc = Complex::new(T::lit(LANCZOS_COEF[0]), T::zero());
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + Complex::new(T::lit(c), T::zero()) / (z + T::lit(k as f64));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.5) * (T::lit(2.0) * T::PI()).ln();
    (z + T::lit(0.5)) * t.ln() - t + acc.ln() + half_ln_2pi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn real_axis_values() {
        // Γ(n) = (n-1)!
        let mut fact = 1.0;
        for n in 1..20 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let g = ln_gamma_complex(c(n as f64, 0.0)).exp();
            assert!((g.re / fact - 1.0).abs() < 1e-13, "n={n}");
            assert!(g.im.abs() < 1e-10 * fact);
        }
        let half = ln_gamma_complex(c(0.5, 0.0)).exp();
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        // reflection branch: Γ(-1.5) = 4√π/3
        let g = ln_gamma_complex(c(-1.5, 0.0)).exp();
        assert!((g.re - 4.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[0.3, 1.0, 4.0, 25.0] {
            let g = ln_gamma_complex(c(0.0, y));
            let expect = 0.5 * (std::f64::consts::PI / (y * (std::f64::consts::PI * y).sinh())).ln();
            assert!((g.re - expect).abs() < 1e-12, "y={y}");
        }
        // far from the real axis sinh overflows but the log form must not
        let g = ln_gamma_complex(c(0.25, 400.0));
        assert!(g.re.is_finite());
    }

    #[test]
    fn recurrence() {
        let z = c(1.3, 2.7);
        let lhs = ln_gamma_complex(z + 1.0).exp();
        let rhs = z * ln_gamma_complex(z).exp();
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }
}
