use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::rng::{q6, quantize_within, Stream};

use super::ranges::max_fit;
use super::{
    hsv_to_rgb, CameraSpec, ChairSpec, ClutterBox, CountRange, HostSurface, Interval, LightSpec,
    OpeningKind, RoomRanges, RoomSpec, SceneSpec, ShellMaterials, Wall, WallOpening, WallRect,
    CAMERA_BACK_OFFSET_M, CAMERA_SIDE_OFFSET_M, CHAIR_RADIUS_M, EYE_HEIGHT_M, OPENING_MARGIN_M,
};

pub const VERTICAL_FOV_DEG: f64 = 60.0;
const MAX_YAW_DEG: f64 = 30.0;
const CHAIR_YAW_JITTER_RAD: f64 = 0.26;
const CHAIR_SCALE: Interval = Interval::new(0.9, 1.1);

fn draw(stream: &mut Stream, i: Interval) -> f64 {
    stream.uniform_q6(i.min, i.max)
}

fn count(stream: &mut Stream, r: CountRange) -> u32 {
    stream.int_inclusive(r.min, r.max)
}

fn draw_albedo(stream: &mut Stream, hue: Interval, sat: Interval, val: Interval) -> Vec3 {
    let hsv = [draw(stream, hue), draw(stream, sat), draw(stream, val)];
    let rgb = hsv_to_rgb(hsv);
    Vec3::new(q6(rgb.x), q6(rgb.y), q6(rgb.z))
}

/// Widths for `n` openings on a wall of `length`, shrunk toward the minimum
/// when the draws would not fit with margins.
fn opening_widths(stream: &mut Stream, n: usize, width: Interval, length: f64) -> Vec<f64> {
    let mut widths: Vec<f64> = (0..n)
        .map(|_| stream.uniform(width.min, width.max))
        .collect();
    let room_for = length - OPENING_MARGIN_M * (n as f64 + 1.0);
    let total: f64 = widths.iter().sum();
    if total > room_for {
        let base = width.min * n as f64;
        let factor = ((room_for - base) / (total - base)).max(0.0);
        for w in &mut widths {
            *w = width.min + (*w - width.min) * factor;
        }
    }
    widths
        .into_iter()
        .map(|w| quantize_within(w, width.min, width.max))
        .collect()
}

/// Left offsets for consecutive spans of `widths` along `length`, leaving
/// at least [`OPENING_MARGIN_M`] (less one grid step) between spans and wall
/// ends; the remaining slack is split at random.
fn place_along(stream: &mut Stream, widths: &[f64], length: f64) -> Vec<f64> {
    let gaps = widths.len() + 1;
    let used: f64 = widths.iter().sum::<f64>() + OPENING_MARGIN_M * gaps as f64;
    let slack = (length - used).max(0.0);
    let weights: Vec<f64> = (0..gaps).map(|_| -(1.0 - stream.unit()).ln()).collect();
    let norm: f64 = weights.iter().sum();
    let mut offsets = Vec::with_capacity(widths.len());
    let mut cursor = 0.0;
    for (w, weight) in widths.iter().zip(&weights) {
        cursor += OPENING_MARGIN_M + slack * weight / norm;
        offsets.push(q6(cursor));
        cursor += w;
    }
    offsets
}

fn sample_openings(
    stream: &mut Stream,
    kind: OpeningKind,
    wall: Wall,
    length: f64,
    room_height: f64,
    ranges: &RoomRanges,
) -> Vec<WallOpening> {
    let (count_range, width, height) = match kind {
        OpeningKind::Window => (
            ranges.window_count,
            ranges.window_width_m,
            ranges.window_height_m,
        ),
        OpeningKind::Door => (ranges.door_count, ranges.door_width_m, ranges.door_height_m),
    };
    let n = count(stream, count_range).min(max_fit(length, width.min)) as usize;
    let widths = opening_widths(stream, n, width, length);
    let offsets = place_along(stream, &widths, length);
    widths
        .iter()
        .zip(offsets)
        .map(|(&w, u)| {
            let (sill, h) = match kind {
                OpeningKind::Window => {
                    let sill = draw(stream, ranges.window_sill_m);
                    let h = draw(stream, height).min(q6(room_height - sill));
                    (sill, h)
                }
                OpeningKind::Door => (0.0, draw(stream, height).min(room_height)),
            };
            WallOpening {
                host_wall: wall,
                u_offset: u,
                sill_height_m: sill,
                width_m: w,
                height_m: h,
                kind,
            }
        })
        .collect()
}

/// Room box, openings, blackboard and shell materials.
///
/// Windows go on one side wall chosen at random, doors on the opposite side
/// wall, and the blackboard alone on the front wall.
pub fn sample_room(stream: &mut Stream, ranges: &RoomRanges) -> Result<RoomSpec> {
    ranges.validate()?;
    let width = draw(stream, ranges.width_m);
    let depth = draw(stream, ranges.depth_m);
    let height = draw(stream, ranges.height_m);

    let window_wall = if stream.coin() {
        Wall::Left
    } else {
        Wall::Right
    };
    let windows = sample_openings(
        stream,
        OpeningKind::Window,
        window_wall,
        depth,
        height,
        ranges,
    );
    let doors = sample_openings(
        stream,
        OpeningKind::Door,
        window_wall.opposite(),
        depth,
        height,
        ranges,
    );

    let bb = ranges.blackboard_width_m;
    let bb_width = quantize_within(
        stream
            .uniform(bb.min, bb.max)
            .min(width - 2.0 * OPENING_MARGIN_M),
        bb.min,
        bb.max,
    );
    let bb_u = place_along(stream, &[bb_width], width)[0];
    let blackboard = WallRect {
        wall: Wall::Front,
        u_offset: bb_u,
        v_offset: draw(stream, ranges.blackboard_sill_m),
        width_m: bb_width,
        height_m: draw(stream, ranges.blackboard_height_m),
    };

    let any_hue = Interval::new(0.0, 1.0);
    let materials = ShellMaterials {
        wall: draw_albedo(
            stream,
            any_hue,
            Interval::new(0.0, 0.15),
            Interval::new(0.6, 0.85),
        ),
        floor: draw_albedo(
            stream,
            any_hue,
            Interval::new(0.1, 0.4),
            Interval::new(0.2, 0.5),
        ),
        ceiling: draw_albedo(
            stream,
            any_hue,
            Interval::new(0.0, 0.05),
            Interval::new(0.8, 0.9),
        ),
        door: draw_albedo(
            stream,
            Interval::new(0.05, 0.12),
            Interval::new(0.4, 0.7),
            Interval::new(0.25, 0.5),
        ),
    };

    Ok(RoomSpec {
        width_m: width,
        depth_m: depth,
        height_m: height,
        windows,
        doors,
        blackboard,
        materials,
    })
}

/// Boxes scattered on the floor, the ceiling and the four walls with
/// uniform `(u, v)` in `[0, 1)` and HSV colors from the configured ranges.
pub fn sample_clutter(
    stream: &mut Stream,
    room: &RoomSpec,
    ranges: &RoomRanges,
) -> Vec<ClutterBox> {
    let n_floor = count(stream, ranges.clutter_floor);
    let n_ceiling = count(stream, ranges.clutter_ceiling);
    let n_wall = count(stream, ranges.clutter_wall);
    let mut hosts = Vec::with_capacity((n_floor + n_ceiling + n_wall) as usize);
    hosts.extend((0..n_floor).map(|_| HostSurface::Floor));
    hosts.extend((0..n_ceiling).map(|_| HostSurface::Ceiling));
    for _ in 0..n_wall {
        hosts.push(HostSurface::Wall(
            Wall::ALL[stream.int_inclusive(0, 3) as usize],
        ));
    }

    hosts
        .into_iter()
        .map(|host| {
            let u = q6(stream.unit()).min(0.999999);
            let v = q6(stream.unit()).min(0.999999);
            let mut dims = Vec3::new(
                draw(stream, ranges.box_width_m),
                draw(stream, ranges.box_height_m),
                draw(stream, ranges.box_depth_m),
            );
            // Only reachable with ranges that bypassed validation.
            let (span_w, span_h) = match host {
                HostSurface::Floor | HostSurface::Ceiling => (room.width_m, room.depth_m),
                HostSurface::Wall(w) => (room.wall_length(w), room.height_m),
            };
            dims.x = dims.x.min(span_w);
            if matches!(host, HostSurface::Wall(_)) {
                dims.y = dims.y.min(span_h);
            } else {
                dims.z = dims.z.min(span_h);
            }
            let hsv = [
                q6(stream.unit()).min(0.999999),
                draw(stream, ranges.saturation),
                draw(stream, ranges.value),
            ];
            ClutterBox {
                host_surface: host,
                u,
                v,
                dims_m: dims,
                albedo_hsv: hsv,
            }
        })
        .collect()
}

/// Yaw within ±30°, lateral position at least 0.5 m from the side walls,
/// fixed eye height and distance from the back wall, no pitch or roll.
pub fn sample_camera(stream: &mut Stream, room: &RoomSpec) -> Result<CameraSpec> {
    if room.width_m <= 2.0 * CAMERA_SIDE_OFFSET_M {
        return Err(Error::config(
            "width_m",
            format!(
                "room width {} m leaves no admissible camera position",
                room.width_m
            ),
        ));
    }
    let x = stream.uniform_q6(CAMERA_SIDE_OFFSET_M, room.width_m - CAMERA_SIDE_OFFSET_M);
    let yaw = stream.uniform_q6(-MAX_YAW_DEG, MAX_YAW_DEG);
    Ok(CameraSpec {
        position: Vec3::new(x, EYE_HEIGHT_M, CAMERA_BACK_OFFSET_M),
        yaw_deg: yaw,
        pitch_deg: 0.0,
        roll_deg: 0.0,
        vfov_deg: VERTICAL_FOV_DEG,
    })
}

/// Chairs on a jittered grid between the camera and the blackboard, facing
/// the blackboard.
pub fn sample_chairs(stream: &mut Stream, room: &RoomSpec, ranges: &RoomRanges) -> Vec<ChairSpec> {
    let n = count(stream, ranges.chair_count) as usize;
    if n == 0 {
        return Vec::new();
    }
    let reach = CHAIR_RADIUS_M * CHAIR_SCALE.max + 0.01;
    let (x_lo, x_hi) = span(
        reach.max(1.0),
        room.width_m - reach.max(1.0),
        room.width_m,
        reach,
    );
    let (z_lo, z_hi) = span(1.5, room.depth_m - 2.5, room.depth_m, reach);

    let region_w = x_hi - x_lo;
    let region_d = z_hi - z_lo;
    let aspect = if region_d > 0.0 {
        region_w / region_d
    } else {
        1.0
    };
    let cols = ((n as f64 * aspect.max(1e-3)).sqrt().ceil() as usize).clamp(1, n);
    let rows = n.div_ceil(cols);
    let cell_w = region_w / cols as f64;
    let cell_d = region_d / rows as f64;

    (0..n)
        .map(|k| {
            let (row, col) = (k / cols, k % cols);
            let jx = stream.uniform(-0.25, 0.25) * cell_w;
            let jz = stream.uniform(-0.25, 0.25) * cell_d;
            let x = (x_lo + (col as f64 + 0.5) * cell_w + jx)
                .max(reach)
                .min(room.width_m - reach);
            let z = (z_lo + (row as f64 + 0.5) * cell_d + jz)
                .max(reach)
                .min(room.depth_m - reach);
            ChairSpec {
                u: q6(x / room.width_m),
                v: q6(z / room.depth_m),
                yaw_rad: stream.uniform_q6(-CHAIR_YAW_JITTER_RAD, CHAIR_YAW_JITTER_RAD),
                scale: draw(stream, CHAIR_SCALE),
            }
        })
        .collect()
}

/// `[lo, hi]` if non-empty, otherwise the admissible middle of `extent`.
fn span(lo: f64, hi: f64, extent: f64, reach: f64) -> (f64, f64) {
    if lo < hi {
        (lo, hi)
    } else {
        let mid = extent * 0.5;
        (
            mid.max(reach).min(extent - reach),
            mid.max(reach).min(extent - reach),
        )
    }
}

pub fn sample_light(stream: &mut Stream, ranges: &RoomRanges) -> LightSpec {
    let sky = draw(stream, ranges.sky_radiance);
    // Slightly cool daylight with a random tint.
    let tint = Vec3::new(
        stream.uniform(0.9, 1.0),
        stream.uniform(0.95, 1.0),
        stream.uniform(0.95, 1.05),
    );
    let ambient = draw(stream, ranges.ambient);
    LightSpec {
        sky_radiance: Vec3::new(q6(sky * tint.x), q6(sky * tint.y), q6(sky * tint.z)),
        ambient: Vec3::splat(ambient),
    }
}

/// Full scene for `seed`. Room, clutter, chairs, camera and light each draw
/// from their own substream, so changing one range leaves the other parts
/// of the scene untouched.
pub fn sample_scene(seed: u64, ranges: &RoomRanges) -> Result<SceneSpec> {
    let room = sample_room(&mut Stream::new(seed, "room"), ranges)?;
    let clutter = sample_clutter(&mut Stream::new(seed, "clutter"), &room, ranges);
    let chairs = sample_chairs(&mut Stream::new(seed, "chairs"), &room, ranges);
    let camera = sample_camera(&mut Stream::new(seed, "camera"), &room)?;
    let light = sample_light(&mut Stream::new(seed, "light"), ranges);
    Ok(SceneSpec {
        seed,
        room,
        chairs,
        clutter,
        camera,
        light,
    })
}
