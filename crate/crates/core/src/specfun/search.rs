use crate::scalar::Real;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmin, min)` once the bracket is narrower than `x_tol`.
pub fn golden_section_min<T, F>(f: F, mut a: T, mut b: T, x_tol: T) -> (T, T)
where
    T: Real,
    F: Fn(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let tol = x_tol.max(T::epsilon());
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
