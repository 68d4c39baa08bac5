//! Node placement: 3D distances and elevation angles.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Node position in meters; `z` is the height above ground.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position3D<T> {
    #[serde(rename = "x_m")]
    pub x: T,
    #[serde(rename = "y_m")]
    pub y: T,
    #[serde(rename = "z_m")]
    pub z: T,
}

impl<T: Real> Position3D<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn ground(x: T, y: T) -> Self {
        Self { x, y, z: T::zero() }
    }

    pub fn is_ground(&self) -> bool {
        self.z == T::zero()
    }

    pub fn with_height(self, z: T) -> Self {
        Self { z, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) {
            return Err(Error::invalid("node coordinates must be finite"));
        }
        if self.z < T::zero() {
            return Err(Error::invalid(format!("node height {} below ground", self.z)));
        }
        Ok(())
    }
}

impl<T: Real> Add for Position3D<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Position3D<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Euclidean 3D distance.
pub fn distance<T: Real>(a: &Position3D<T>, b: &Position3D<T>) -> T {
    let d = *a - *b;
    // hypot twice avoids overflow for far-apart nodes
    d.x.hypot(d.y).hypot(d.z)
}

/// Elevation angle in degrees above the horizontal plane, `asin(|Δz| / d)`.
///
/// Symmetric in its arguments, so air-to-air links use the same definition
/// as ground-to-air ones.
pub fn elevation_angle<T: Real>(from: &Position3D<T>, to: &Position3D<T>) -> Result<T> {
    let d = distance(from, to);
    if d == T::zero() {
        return Err(Error::CoincidentNodes);
    }
    let ratio = ((to.z - from.z).abs() / d).min(T::one());
    Ok(ratio.asin().to_degrees())
}
