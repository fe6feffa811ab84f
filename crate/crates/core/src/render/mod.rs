//! Photo, label and depth passes.
//!
//! The photo pass shades the full scene. Label and depth passes trace one
//! ray through each pixel center against the architecture alone, so clutter
//! and chairs never reach the ground truth.

mod camera;
mod world;

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use image::{GrayImage, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Ray, Vec3};
use crate::rng::{substream_key, Stream};
use crate::scenegen::{LightSpec, SceneSpec};

pub use camera::PinholeCamera;
pub use world::{Hit, ShellFace, SurfaceClass, SurfaceId, WindowPatch, World, SHELL_FACES};

/// Display gamma applied after tone mapping.
pub const GAMMA: f64 = 2.2;
/// Offset along the surface normal for shadow-ray origins.
const SHADOW_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoorLabel {
    /// Doors get their own color.
    #[default]
    Magenta,
    /// Doors are labeled as wall.
    Wall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSettings {
    /// Width and height in pixels.
    pub resolution: u32,
    /// Jittered primary rays per pixel in the photo pass.
    pub samples_per_pixel: u32,
    /// Shadow rays per window per primary ray.
    pub shadow_samples: u32,
    /// Distance mapped to depth value 255; farther hits clamp.
    pub depth_max_m: f64,
    pub render_seed: u64,
    pub door_label: DoorLabel,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            resolution: 512,
            samples_per_pixel: 16,
            shadow_samples: 1,
            depth_max_m: 20.0,
            render_seed: 0,
            door_label: DoorLabel::Magenta,
        }
    }
}

impl RenderSettings {
    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::config("resolution", "must be positive"));
        }
        if self.samples_per_pixel == 0 {
            return Err(Error::config("samples_per_pixel", "must be at least 1"));
        }
        if !(self.depth_max_m.is_finite() && self.depth_max_m > 0.0) {
            return Err(Error::config("depth_max_m", "must be positive"));
        }
        Ok(())
    }

    /// SHA-256 over the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        let text = crate::json::to_canonical_string(self).expect("settings serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Exact 8-bit label colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPalette {
    pub wall: [u8; 3],
    pub ceiling: [u8; 3],
    pub floor: [u8; 3],
    pub window: [u8; 3],
    pub door: [u8; 3],
}

impl LabelPalette {
    pub const DEFAULT: LabelPalette = LabelPalette {
        wall: [255, 0, 0],
        ceiling: [0, 255, 0],
        floor: [0, 0, 255],
        window: [255, 255, 0],
        door: [255, 0, 255],
    };

    pub fn for_door_label(door: DoorLabel) -> Self {
        match door {
            DoorLabel::Magenta => Self::DEFAULT,
            DoorLabel::Wall => Self {
                door: Self::DEFAULT.wall,
                ..Self::DEFAULT
            },
        }
    }

    /// Color for an architectural class. The blackboard is part of its wall.
    pub fn color(&self, class: SurfaceClass) -> Option<[u8; 3]> {
        match class {
            SurfaceClass::Wall | SurfaceClass::Blackboard => Some(self.wall),
            SurfaceClass::Ceiling => Some(self.ceiling),
            SurfaceClass::Floor => Some(self.floor),
            SurfaceClass::Window => Some(self.window),
            SurfaceClass::Door => Some(self.door),
            SurfaceClass::Clutter | SurfaceClass::Chair => None,
        }
    }

    /// Distinct colors in palette order.
    pub fn colors(&self) -> Vec<[u8; 3]> {
        let mut out: Vec<[u8; 3]> = Vec::with_capacity(5);
        for c in [self.wall, self.ceiling, self.floor, self.window, self.door] {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub scene_seed: u64,
    pub settings_hash: String,
}

/// The three aligned passes of one scene.
#[derive(Clone, Debug)]
pub struct RenderTriple {
    pub photo: RgbImage,
    pub label: RgbImage,
    pub depth: GrayImage,
    pub provenance: Provenance,
}

/// `round(255 * min(d, max) / max)`.
pub fn encode_depth(distance: f64, depth_max_m: f64) -> u8 {
    (255.0 * distance.min(depth_max_m) / depth_max_m).round() as u8
}

/// Exponential tone curve followed by gamma encoding.
pub fn tone_map(radiance: f64) -> u8 {
    let mapped = 1.0 - (-radiance.max(0.0)).exp();
    (255.0 * mapped.powf(1.0 / GAMMA)).round() as u8
}

fn setup(scene: &SceneSpec, settings: &RenderSettings) -> Result<PinholeCamera> {
    settings.validate()?;
    PinholeCamera::new(&scene.camera, settings.resolution, settings.resolution)
}

/// Label and depth passes from one shared set of primary rays.
pub fn render_ground_truth(
    scene: &SceneSpec,
    settings: &RenderSettings,
) -> Result<(RgbImage, GrayImage)> {
    let camera = setup(scene, settings)?;
    let world = World::architecture(scene);
    let palette = LabelPalette::for_door_label(settings.door_label);
    let n = settings.resolution as usize;
    let mut label = vec![0u8; n * n * 3];
    let mut depth = vec![0u8; n * n];
    let missed = AtomicBool::new(false);

    label
        .par_chunks_mut(n * 3)
        .zip(depth.par_chunks_mut(n))
        .enumerate()
        .for_each(|(j, (label_row, depth_row))| {
            for i in 0..n {
                let ray = camera.pixel_ray(i as u32, j as u32);
                match world
                    .intersect(&ray)
                    .and_then(|h| palette.color(h.class).map(|c| (h, c)))
                {
                    Some((hit, color)) => {
                        label_row[3 * i..3 * i + 3].copy_from_slice(&color);
                        depth_row[i] = encode_depth(hit.t, settings.depth_max_m);
                    }
                    None => {
                        missed.store(true, Ordering::Relaxed);
                        depth_row[i] = 255;
                    }
                }
            }
        });

    if missed.load(Ordering::Relaxed) {
        return Err(Error::Internal(format!(
            "scene {}: primary ray left the room shell",
            scene.seed
        )));
    }
    let size = settings.resolution;
    Ok((
        RgbImage::from_raw(size, size, label).expect("label buffer size"),
        GrayImage::from_raw(size, size, depth).expect("depth buffer size"),
    ))
}

pub fn render_label(scene: &SceneSpec, settings: &RenderSettings) -> Result<RgbImage> {
    render_ground_truth(scene, settings).map(|(label, _)| label)
}

pub fn render_depth(scene: &SceneSpec, settings: &RenderSettings) -> Result<GrayImage> {
    render_ground_truth(scene, settings).map(|(_, depth)| depth)
}

/// Shaded photo of the full scene.
///
/// Radiance at a diffuse hit is `albedo * (ambient + E / pi)`, where `E` is
/// the irradiance from the sky through every window, estimated with
/// `shadow_samples` area samples per window and shadowed by clutter and
/// chairs. Windows seen directly show the sky radiance. Pixel `k` draws its
/// jitter and light samples from stream `k` under a key derived from the
/// render seed and scene seed, so output is independent of thread count.
pub fn render_photo(scene: &SceneSpec, settings: &RenderSettings) -> Result<RgbImage> {
    let camera = setup(scene, settings)?;
    let world = World::full(scene);
    let key = substream_key(settings.render_seed ^ scene.seed.rotate_left(32), "photo");
    let n = settings.resolution as usize;
    let spp = settings.samples_per_pixel;
    let mut photo = vec![0u8; n * n * 3];

    photo
        .par_chunks_mut(n * 3)
        .enumerate()
        .for_each(|(j, row)| {
            for i in 0..n {
                let mut stream = Stream::from_key(key, (j * n + i) as u64);
                let mut sum = Vec3::ZERO;
                for _ in 0..spp {
                    let (dx, dy) = if spp == 1 {
                        (0.5, 0.5)
                    } else {
                        (stream.unit(), stream.unit())
                    };
                    let ray = camera.ray(i as f64 + dx, j as f64 + dy);
                    sum = sum
                        + radiance(
                            &world,
                            &scene.light,
                            &ray,
                            settings.shadow_samples,
                            &mut stream,
                        );
                }
                let c = sum / f64::from(spp);
                row[3 * i] = tone_map(c.x);
                row[3 * i + 1] = tone_map(c.y);
                row[3 * i + 2] = tone_map(c.z);
            }
        });

    let size = settings.resolution;
    Ok(RgbImage::from_raw(size, size, photo).expect("photo buffer size"))
}

fn radiance(
    world: &World,
    light: &LightSpec,
    ray: &Ray,
    shadow_samples: u32,
    stream: &mut Stream,
) -> Vec3 {
    let Some(hit) = world.intersect(ray) else {
        return Vec3::ZERO;
    };
    if hit.class == SurfaceClass::Window {
        return light.sky_radiance;
    }
    let albedo = world.albedo(hit.id);
    if albedo == Vec3::ZERO {
        return Vec3::ZERO;
    }
    let p = ray.at(hit.t) + hit.normal * SHADOW_EPSILON;
    let mut irradiance = Vec3::ZERO;
    if shadow_samples > 0 && light.sky_radiance != Vec3::ZERO {
        let weight = 1.0 / f64::from(shadow_samples);
        for window in world.windows() {
            let mut visible = 0.0;
            for _ in 0..shadow_samples {
                let q =
                    window.corner + window.edge_u * stream.unit() + window.edge_v * stream.unit();
                let to = q - p;
                let dist2 = to.dot(to);
                let dist = dist2.sqrt();
                let dir = to / dist;
                let cos_p = hit.normal.dot(dir);
                let cos_w = -window.normal.dot(dir);
                if cos_p <= 0.0 || cos_w <= 0.0 {
                    continue;
                }
                if world.occluded(&Ray::new(p, dir), dist * (1.0 - 1e-9)) {
                    continue;
                }
                visible += cos_p * cos_w / dist2;
            }
            irradiance = irradiance + light.sky_radiance * (visible * window.area * weight);
        }
    }
    albedo.mul_elem(light.ambient + irradiance / PI)
}

/// All three passes plus their provenance.
pub fn render_triple(scene: &SceneSpec, settings: &RenderSettings) -> Result<RenderTriple> {
    let photo = render_photo(scene, settings)?;
    let (label, depth) = render_ground_truth(scene, settings)?;
    Ok(RenderTriple {
        photo,
        label,
        depth,
        provenance: Provenance {
            scene_seed: scene.seed,
            settings_hash: settings.hash(),
        },
    })
}
