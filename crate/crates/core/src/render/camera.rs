use crate::error::{Error, Result};
use crate::geometry::{Ray, Vec3};
use crate::scenegen::CameraSpec;

/// Pinhole camera producing unit-length rays through continuous pixel
/// coordinates. Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`, row 0 at the top.
#[derive(Clone, Copy, Debug)]
pub struct PinholeCamera {
    origin: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    tan_half_v: f64,
    aspect: f64,
    width: f64,
    height: f64,
}

impl PinholeCamera {
    pub fn new(spec: &CameraSpec, width: u32, height: u32) -> Result<Self> {
        let angles_ok = [spec.yaw_deg, spec.pitch_deg, spec.roll_deg]
            .iter()
            .all(|a| a.is_finite());
        if !spec.position.is_finite()
            || !angles_ok
            || !(spec.vfov_deg > 0.0 && spec.vfov_deg < 180.0)
            || width == 0
            || height == 0
        {
            return Err(Error::Internal(format!("degenerate camera {spec:?}")));
        }
        let (yaw, pitch, roll) = (
            spec.yaw_deg.to_radians(),
            spec.pitch_deg.to_radians(),
            spec.roll_deg.to_radians(),
        );
        let forward = Vec3::new(
            yaw.sin() * pitch.cos(),
            pitch.sin(),
            yaw.cos() * pitch.cos(),
        );
        let flat_right = Vec3::new(yaw.cos(), 0.0, -yaw.sin());
        let flat_up = forward.cross(flat_right);
        let right = flat_right * roll.cos() + flat_up * roll.sin();
        let up = flat_up * roll.cos() - flat_right * roll.sin();
        Ok(Self {
            origin: spec.position,
            forward,
            right,
            up,
            tan_half_v: (spec.vfov_deg.to_radians() * 0.5).tan(),
            aspect: f64::from(width) / f64::from(height),
            width: f64::from(width),
            height: f64::from(height),
        })
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn ray(&self, px: f64, py: f64) -> Ray {
        let sx = (2.0 * px / self.width - 1.0) * self.tan_half_v * self.aspect;
        let sy = (1.0 - 2.0 * py / self.height) * self.tan_half_v;
        let dir = (self.forward + self.right * sx + self.up * sy).normalized();
        Ray::new(self.origin, dir)
    }

    /// Ray through the center of pixel `(i, j)`.
    pub fn pixel_ray(&self, i: u32, j: u32) -> Ray {
        self.ray(f64::from(i) + 0.5, f64::from(j) + 0.5)
    }
}
