//! Vectors, rays and the axis-aligned / yaw-oriented box kernels.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    /// Component-wise product.
    pub fn mul_elem(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn axis(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn unit_axis(axis: usize, sign: f64) -> Vec3 {
        match axis {
            0 => Vec3::new(sign, 0.0, 0.0),
            1 => Vec3::new(0.0, sign, 0.0),
            _ => Vec3::new(0.0, 0.0, sign),
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
    inv_dir: Vec3,
}

impl Ray {
    /// `dir` is expected to be unit length so that hit parameters are
    /// Euclidean distances.
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        Self {
            origin,
            dir,
            inv_dir: Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z),
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }

    pub fn inv_dir(&self) -> Vec3 {
        self.inv_dir
    }
}

/// Distance along `ray` to the plane `axis = c`. Infinite or negative when
/// the plane is parallel or behind. Shared by every planar surface so that
/// coplanar surfaces produce bit-identical distances.
#[inline]
pub fn plane_distance(ray: &Ray, axis: usize, c: f64) -> f64 {
    (c - ray.origin.axis(axis)) / ray.dir.axis(axis)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

/// Entry (or exit, for rays starting inside) of a box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxHit {
    pub t: f64,
    /// Outward face normal of the face that was crossed.
    pub normal: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn empty() -> Self {
        Self::new(Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY))
    }

    pub fn from_center_half(center: Vec3, half: Vec3) -> Self {
        Self::new(center - half, center + half)
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb::new(self.min.min(o.min), self.max.max(o.max))
    }

    pub fn grow(&self, p: Vec3) -> Aabb {
        Aabb::new(self.min.min(p), self.max.max(p))
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Strict interior test.
    pub fn contains_strict(&self, p: Vec3) -> bool {
        p.x > self.min.x
            && p.x < self.max.x
            && p.y > self.min.y
            && p.y < self.max.y
            && p.z > self.min.z
            && p.z < self.max.z
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        other.min.x >= self.min.x
            && other.min.y >= self.min.y
            && other.min.z >= self.min.z
            && other.max.x <= self.max.x
            && other.max.y <= self.max.y
            && other.max.z <= self.max.z
    }

    /// Slab interval `(t_enter, t_exit)` clipped to `[0, t_max]`, or `None`.
    #[inline]
    pub fn slab(&self, ray: &Ray, t_max: f64) -> Option<(f64, f64)> {
        let inv = ray.inv_dir();
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for axis in 0..3 {
            let o = ray.origin.axis(axis);
            let i = inv.axis(axis);
            let mut ta = (self.min.axis(axis) - o) * i;
            let mut tb = (self.max.axis(axis) - o) * i;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            // NaN from 0 * inf (origin on a slab plane of a parallel ray)
            // fails both comparisons and leaves the interval untouched.
            if ta > t0 {
                t0 = ta;
            }
            if tb < t1 {
                t1 = tb;
            }
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }

    /// Nearest strictly positive crossing of the box surface.
    pub fn intersect(&self, ray: &Ray) -> Option<BoxHit> {
        let mut enter = (f64::NEG_INFINITY, 0usize, 0.0f64);
        let mut exit = (f64::INFINITY, 0usize, 0.0f64);
        for axis in 0..3 {
            let o = ray.origin.axis(axis);
            let d = ray.dir.axis(axis);
            if d == 0.0 {
                if o < self.min.axis(axis) || o > self.max.axis(axis) {
                    return None;
                }
                continue;
            }
            let i = ray.inv_dir().axis(axis);
            let t_lo = (self.min.axis(axis) - o) * i;
            let t_hi = (self.max.axis(axis) - o) * i;
            // Entering through the min face means travelling +axis, whose
            // outward normal is -axis.
            let (near, far, near_sign, far_sign) = if t_lo < t_hi {
                (t_lo, t_hi, -1.0, 1.0)
            } else {
                (t_hi, t_lo, 1.0, -1.0)
            };
            if near > enter.0 {
                enter = (near, axis, near_sign);
            }
            if far < exit.0 {
                exit = (far, axis, far_sign);
            }
        }
        if enter.0 > exit.0 || exit.0 <= 0.0 {
            return None;
        }
        let (t, axis, sign) = if enter.0 > 0.0 { enter } else { exit };
        Some(BoxHit {
            t,
            normal: Vec3::unit_axis(axis, sign),
        })
    }
}

/// A box rotated about the vertical axis through its center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YawBox {
    pub center: Vec3,
    pub half: Vec3,
    pub cos: f64,
    pub sin: f64,
}

impl YawBox {
    pub fn new(center: Vec3, half: Vec3, yaw_rad: f64) -> Self {
        Self {
            center,
            half,
            cos: yaw_rad.cos(),
            sin: yaw_rad.sin(),
        }
    }

    /// Local-to-world rotation. Local +z maps to `(sin, 0, cos)`.
    pub fn to_world(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            v.x * self.cos + v.z * self.sin,
            v.y,
            -v.x * self.sin + v.z * self.cos,
        )
    }

    pub fn to_local(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            v.x * self.cos - v.z * self.sin,
            v.y,
            v.x * self.sin + v.z * self.cos,
        )
    }

    pub fn bounds(&self) -> Aabb {
        let ex = self.half.x * self.cos.abs() + self.half.z * self.sin.abs();
        let ez = self.half.x * self.sin.abs() + self.half.z * self.cos.abs();
        Aabb::from_center_half(self.center, Vec3::new(ex, self.half.y, ez))
    }

    pub fn contains_strict(&self, p: Vec3) -> bool {
        let local = self.to_local(p - self.center);
        Aabb::from_center_half(Vec3::ZERO, self.half).contains_strict(local)
    }

    pub fn intersect(&self, ray: &Ray) -> Option<BoxHit> {
        let local = Ray::new(
            self.to_local(ray.origin - self.center),
            self.to_local(ray.dir),
        );
        Aabb::from_center_half(Vec3::ZERO, self.half)
            .intersect(&local)
            .map(|h| BoxHit {
                t: h.t,
                normal: self.to_world(h.normal),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Aabb {
        Aabb::new(Vec3::ZERO, Vec3::splat(1.0))
    }

    #[test]
    fn box_entry_from_outside() {
        let ray = Ray::new(Vec3::new(-2.0, 0.5, 0.5), Vec3::new(1.0, 0.0, 0.0));
        let hit = unit_box().intersect(&ray).unwrap();
        assert_eq!(hit.t, 2.0);
        assert_eq!(hit.normal, Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn box_exit_from_inside() {
        let ray = Ray::new(Vec3::new(0.25, 0.5, 0.5), Vec3::new(0.0, 0.0, -1.0));
        let hit = unit_box().intersect(&ray).unwrap();
        assert_eq!(hit.t, 0.5);
        assert_eq!(hit.normal, Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn box_miss_and_behind() {
        let up = Ray::new(Vec3::new(2.0, 0.5, 0.5), Vec3::new(0.0, 1.0, 0.0));
        assert!(unit_box().intersect(&up).is_none());
        let away = Ray::new(Vec3::new(2.0, 0.5, 0.5), Vec3::new(1.0, 0.0, 0.0));
        assert!(unit_box().intersect(&away).is_none());
        assert!(unit_box().slab(&away, f64::INFINITY).is_none());
    }

    #[test]
    fn slab_agrees_with_intersect_entry() {
        let d = Vec3::new(1.0, 0.3, 0.2).normalized();
        let ray = Ray::new(Vec3::new(-1.0, 0.1, 0.2), d);
        let (t0, _) = unit_box().slab(&ray, f64::INFINITY).unwrap();
        assert!((unit_box().intersect(&ray).unwrap().t - t0).abs() < 1e-12);
    }

    #[test]
    fn yaw_box_quarter_turn_swaps_extents() {
        let b = YawBox::new(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 1.0, 0.5),
            std::f64::consts::FRAC_PI_2,
        );
        let bounds = b.bounds();
        assert!((bounds.max.x - 0.5).abs() < 1e-12);
        assert!((bounds.max.z - 2.0).abs() < 1e-12);
        let ray = Ray::new(Vec3::new(-5.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0));
        let hit = b.intersect(&ray).unwrap();
        assert!((hit.t - 4.5).abs() < 1e-12);
        assert!((hit.normal.x + 1.0).abs() < 1e-12);
    }

    #[test]
    fn yaw_rotation_round_trips() {
        let b = YawBox::new(Vec3::ZERO, Vec3::splat(1.0), 0.7);
        let v = Vec3::new(0.3, -1.2, 2.5);
        let back = b.to_world(b.to_local(v));
        assert!((back - v).length() < 1e-12);
        let fwd = b.to_world(Vec3::new(0.0, 0.0, 1.0));
        assert!((fwd.x - 0.7f64.sin()).abs() < 1e-12);
    }
}
