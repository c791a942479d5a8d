//! Float helpers over `libm` and a small 2-vector.

use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[inline]
pub fn sqrt(v: f64) -> f64 {
    libm::sqrt(v)
}

#[inline]
pub fn floor(v: f64) -> f64 {
    libm::floor(v)
}

#[inline]
pub fn ceil(v: f64) -> f64 {
    libm::ceil(v)
}

#[inline]
pub fn round(v: f64) -> f64 {
    libm::round(v)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Degrees to radians.
#[inline]
pub fn rad(deg: f64) -> f64 {
    deg * core::f64::consts::PI / 180.0
}

#[inline]
pub fn deg(rad: f64) -> f64 {
    rad * 180.0 / core::f64::consts::PI
}

/// Heading into `[0, 360)`.
pub fn normalize_heading(deg: f64) -> f64 {
    let h = deg % 360.0;
    let h = if h < 0.0 { h + 360.0 } else { h };
    // -1e-18 % 360 + 360 rounds to exactly 360.0
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

/// Signed smallest difference `to - from` in `(-180, 180]`.
pub fn angle_diff(from_deg: f64, to_deg: f64) -> f64 {
    let d = normalize_heading(to_deg - from_deg);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Unit vector for a heading in degrees.
pub fn heading_vec(deg_: f64) -> Vec2 {
    let r = rad(deg_);
    Vec2::new(libm::cos(r), libm::sin(r))
}

/// Heading of a vector in degrees, `[0, 360)`.
pub fn vec_heading(v: Vec2) -> f64 {
    normalize_heading(deg(libm::atan2(v.y, v.x)))
}

/// Round to one decimal, mapping `-0.0` to `0.0`.
pub fn round_tenth(v: f64) -> f64 {
    let r = round(v * 10.0) / 10.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 1e-12).then(|| Vec2::new(self.x / n, self.y / n))
    }

    /// Rotated +90 degrees.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}
