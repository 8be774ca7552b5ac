// libm keeps results identical with and without `std`.
pub(crate) use libm::{atan2, cos, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

/// `x mod w` in `[0, w)`.
#[inline]
pub(crate) fn wrap(x: f64, w: f64) -> f64 {
    let r = x - w * libm::floor(x / w);
    if r >= w {
        0.0
    } else {
        r
    }
}
