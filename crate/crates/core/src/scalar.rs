use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the numerical core: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// dB → linear power ratio.
#[inline]
pub fn db_to_lin<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Linear power ratio → dB.
#[inline]
pub fn lin_to_db<T: Real>(lin: T) -> T {
    T::lit(10.0) * lin.log10()
}

#[inline]
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    db_to_lin(dbm - T::lit(30.0))
}

#[inline]
pub fn watts_to_dbm<T: Real>(w: T) -> T {
    lin_to_db(w) + T::lit(30.0)
}
