//! Parametric classroom scenes.
//!
//! Room frame: `x` runs across the room (`0..width`), `y` is up
//! (`0..height`) and `z` runs from the back wall (`z = 0`) to the blackboard
//! wall (`z = depth`). Positions on a wall are `(u, v)` in meters: `u` along
//! the wall in the direction of increasing `x` (front/back) or `z`
//! (left/right), `v` up from the floor.

mod ranges;
mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3, YawBox};

pub use ranges::{
    CountRange, Interval, RoomRanges, CAMERA_BACK_OFFSET_M, CAMERA_SIDE_OFFSET_M, EYE_HEIGHT_M,
    OPENING_MARGIN_M,
};
pub use sample::{
    sample_camera, sample_chairs, sample_clutter, sample_light, sample_room, sample_scene,
    VERTICAL_FOV_DEG,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    /// `z = depth`, carries the blackboard.
    Front,
    /// `z = 0`, behind the camera.
    Back,
    /// `x = 0`.
    Left,
    /// `x = width`.
    Right,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Front, Wall::Back, Wall::Left, Wall::Right];

    pub fn opposite(self) -> Wall {
        match self {
            Wall::Front => Wall::Back,
            Wall::Back => Wall::Front,
            Wall::Left => Wall::Right,
            Wall::Right => Wall::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningKind {
    Window,
    Door,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallOpening {
    pub host_wall: Wall,
    pub u_offset: f64,
    pub sill_height_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub kind: OpeningKind,
}

impl WallOpening {
    pub fn rect(&self) -> WallRect {
        WallRect {
            wall: self.host_wall,
            u_offset: self.u_offset,
            v_offset: self.sill_height_m,
            width_m: self.width_m,
            height_m: self.height_m,
        }
    }
}

/// Axis-aligned rectangle lying in a wall plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallRect {
    pub wall: Wall,
    pub u_offset: f64,
    pub v_offset: f64,
    pub width_m: f64,
    pub height_m: f64,
}

impl WallRect {
    /// Closed containment in wall coordinates.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_offset
            && u <= self.u_offset + self.width_m
            && v >= self.v_offset
            && v <= self.v_offset + self.height_m
    }

    pub fn overlaps_u(&self, other: &WallRect) -> bool {
        self.u_offset < other.u_offset + other.width_m
            && other.u_offset < self.u_offset + self.width_m
    }
}

/// Diffuse albedo of the room shell, linear RGB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellMaterials {
    pub wall: Vec3,
    pub floor: Vec3,
    pub ceiling: Vec3,
    pub door: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub width_m: f64,
    pub depth_m: f64,
    pub height_m: f64,
    pub windows: Vec<WallOpening>,
    pub doors: Vec<WallOpening>,
    /// Pure-black diffuse rectangle on the front wall.
    pub blackboard: WallRect,
    pub materials: ShellMaterials,
}

impl RoomSpec {
    pub fn wall_length(&self, wall: Wall) -> f64 {
        match wall {
            Wall::Front | Wall::Back => self.width_m,
            Wall::Left | Wall::Right => self.depth_m,
        }
    }

    /// World point at wall coordinates `(u, v)`, pushed `inset` meters into
    /// the room.
    pub fn wall_point(&self, wall: Wall, u: f64, v: f64, inset: f64) -> Vec3 {
        match wall {
            Wall::Front => Vec3::new(u, v, self.depth_m - inset),
            Wall::Back => Vec3::new(u, v, inset),
            Wall::Left => Vec3::new(inset, v, u),
            Wall::Right => Vec3::new(self.width_m - inset, v, u),
        }
    }

    /// Unit normal of a wall pointing into the room.
    pub fn inward_normal(wall: Wall) -> Vec3 {
        match wall {
            Wall::Front => Vec3::new(0.0, 0.0, -1.0),
            Wall::Back => Vec3::new(0.0, 0.0, 1.0),
            Wall::Left => Vec3::new(1.0, 0.0, 0.0),
            Wall::Right => Vec3::new(-1.0, 0.0, 0.0),
        }
    }

    /// Windows followed by doors, the order used for surface ids.
    pub fn openings(&self) -> impl Iterator<Item = &WallOpening> {
        self.windows.iter().chain(self.doors.iter())
    }

    pub fn interior(&self) -> Aabb {
        Aabb::new(
            Vec3::ZERO,
            Vec3::new(self.width_m, self.height_m, self.depth_m),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostSurface {
    Floor,
    Ceiling,
    Wall(Wall),
}

/// A randomly scattered box. `dims_m` is `(w, h, d)`: on the floor and
/// ceiling `w` runs along `x` and `d` along `z`; on a wall `w` runs along
/// the wall, `h` is vertical and `d` is how far the box protrudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClutterBox {
    pub host_surface: HostSurface,
    pub u: f64,
    pub v: f64,
    pub dims_m: Vec3,
    pub albedo_hsv: [f64; 3],
}

/// Centers `size` at `t * extent` without leaving `[0, extent]`.
fn clamp_center(t: f64, size: f64, extent: f64) -> f64 {
    let half = size * 0.5;
    (t * extent).max(half).min(extent - half)
}

impl ClutterBox {
    /// World-space bounds: the affine `(u, v)` placement with the footprint
    /// clamped inside the host surface.
    pub fn bounds(&self, room: &RoomSpec) -> Aabb {
        let (w, h, d) = (self.dims_m.x, self.dims_m.y, self.dims_m.z);
        let (width, height, depth) = (room.width_m, room.height_m, room.depth_m);
        match self.host_surface {
            HostSurface::Floor | HostSurface::Ceiling => {
                let cx = clamp_center(self.u, w, width);
                let cz = clamp_center(self.v, d, depth);
                let (y0, y1) = if self.host_surface == HostSurface::Floor {
                    (0.0, h)
                } else {
                    (height - h, height)
                };
                Aabb::new(
                    Vec3::new(cx - w * 0.5, y0, cz - d * 0.5),
                    Vec3::new(cx + w * 0.5, y1, cz + d * 0.5),
                )
            }
            HostSurface::Wall(wall) => {
                let cu = clamp_center(self.u, w, room.wall_length(wall));
                let cv = clamp_center(self.v, h, height);
                let (u0, u1, v0, v1) = (cu - w * 0.5, cu + w * 0.5, cv - h * 0.5, cv + h * 0.5);
                match wall {
                    Wall::Front => {
                        Aabb::new(Vec3::new(u0, v0, depth - d), Vec3::new(u1, v1, depth))
                    }
                    Wall::Back => Aabb::new(Vec3::new(u0, v0, 0.0), Vec3::new(u1, v1, d)),
                    Wall::Left => Aabb::new(Vec3::new(0.0, v0, u0), Vec3::new(d, v1, u1)),
                    Wall::Right => {
                        Aabb::new(Vec3::new(width - d, v0, u0), Vec3::new(width, v1, u1))
                    }
                }
            }
        }
    }

    pub fn albedo(&self) -> Vec3 {
        hsv_to_rgb(self.albedo_hsv)
    }
}

/// Nominal chair part sizes `(w, h, d)` and centers, before scaling. The
/// seat faces local `+z`.
const CHAIR_PARTS: [([f64; 3], [f64; 3]); 6] = [
    ([0.46, 0.04, 0.44], [0.0, 0.45, 0.0]),
    ([0.46, 0.42, 0.04], [0.0, 0.68, -0.20]),
    ([0.04, 0.43, 0.04], [-0.20, 0.215, -0.19]),
    ([0.04, 0.43, 0.04], [0.20, 0.215, -0.19]),
    ([0.04, 0.43, 0.04], [-0.20, 0.215, 0.19]),
    ([0.04, 0.43, 0.04], [0.20, 0.215, 0.19]),
];

/// Horizontal radius of the unscaled chair footprint.
pub const CHAIR_RADIUS_M: f64 = 0.3325;

pub const CHAIR_ALBEDO: Vec3 = Vec3::new(0.18, 0.12, 0.08);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChairSpec {
    pub u: f64,
    pub v: f64,
    pub yaw_rad: f64,
    pub scale: f64,
}

impl ChairSpec {
    pub fn position(&self, room: &RoomSpec) -> Vec3 {
        Vec3::new(self.u * room.width_m, 0.0, self.v * room.depth_m)
    }

    /// Seat, back and four legs as yaw-rotated boxes.
    pub fn parts(&self, room: &RoomSpec) -> [YawBox; 6] {
        let origin = self.position(room);
        let pivot = YawBox::new(Vec3::ZERO, Vec3::ZERO, self.yaw_rad);
        CHAIR_PARTS.map(|(size, center)| {
            let local = Vec3::from(center) * self.scale;
            YawBox {
                center: origin + pivot.to_world(local),
                half: Vec3::from(size) * (0.5 * self.scale),
                cos: pivot.cos,
                sin: pivot.sin,
            }
        })
    }

    pub fn bounds(&self, room: &RoomSpec) -> Aabb {
        self.parts(room)
            .iter()
            .fold(Aabb::empty(), |acc, p| acc.union(&p.bounds()))
    }
}

/// Pinhole camera. Only `yaw_deg` and `position.x` vary between scenes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: Vec3,
    /// Rotation about `+y`; positive turns the view toward `+x`.
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
    pub vfov_deg: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightSpec {
    /// Radiance of the sky seen through windows.
    pub sky_radiance: Vec3,
    /// Uniform ambient irradiance term.
    pub ambient: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub room: RoomSpec,
    pub chairs: Vec<ChairSpec>,
    pub clutter: Vec<ClutterBox>,
    pub camera: CameraSpec,
    pub light: LightSpec,
}

impl SceneSpec {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_canonical_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        crate::json::from_str(text, "scene")
    }

    /// `scene_{seed:08}.json`; seeds wider than eight digits are written in full.
    pub fn file_name(seed: u64) -> String {
        format!("scene_{seed:08}.json")
    }

    /// Same scene with clutter and chairs removed.
    pub fn architecture_only(&self) -> Self {
        Self {
            chairs: Vec::new(),
            clutter: Vec::new(),
            ..self.clone()
        }
    }

    /// Structural checks on a scene, used before rendering scenes read from
    /// disk.
    pub fn check(&self) -> Result<()> {
        let room = &self.room;
        for (field, x) in [
            ("room.width_m", room.width_m),
            ("room.depth_m", room.depth_m),
            ("room.height_m", room.height_m),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Input(format!("{field} must be positive")));
            }
        }
        for o in room.openings() {
            let r = o.rect();
            if r.u_offset < 0.0
                || r.u_offset + r.width_m > room.wall_length(r.wall)
                || r.v_offset < 0.0
                || r.v_offset + r.height_m > room.height_m
            {
                return Err(Error::Input(format!(
                    "{:?} opening on the {:?} wall leaves its wall",
                    o.kind, o.host_wall
                )));
            }
        }
        let cam = &self.camera;
        if !cam.position.is_finite()
            || !room.interior().contains_strict(cam.position)
            || !(cam.vfov_deg > 0.0 && cam.vfov_deg < 180.0)
        {
            return Err(Error::Input(
                "camera must sit inside the room with a valid field of view".into(),
            ));
        }
        Ok(())
    }
}

/// HSV in `[0, 1]^3` to linear RGB.
pub fn hsv_to_rgb(hsv: [f64; 3]) -> Vec3 {
    let [h, s, v] = hsv;
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector as u32 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    Vec3::new(r, g, b)
}
