use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Camera eye height above the floor.
pub const EYE_HEIGHT_M: f64 = 1.6;
/// Distance of the camera from the back wall.
pub const CAMERA_BACK_OFFSET_M: f64 = 0.5;
/// Clearance between the camera and the side walls.
pub const CAMERA_SIDE_OFFSET_M: f64 = 0.5;
/// Minimum spacing between openings, and between openings and wall ends.
pub const OPENING_MARGIN_M: f64 = 0.15;

/// Closed real interval. Serialized as `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    fn check(&self, field: &str, lower: f64, upper: f64) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::config(field, "bounds must be finite"));
        }
        if self.min > self.max {
            return Err(Error::config(
                field,
                format!("min {} exceeds max {}", self.min, self.max),
            ));
        }
        if self.min < lower || self.max > upper {
            return Err(Error::config(
                field,
                format!("interval must lie within [{lower}, {upper}]"),
            ));
        }
        Ok(())
    }

    fn check_positive(&self, field: &str) -> Result<()> {
        self.check(field, 0.0, f64::MAX)?;
        if self.min <= 0.0 {
            return Err(Error::config(field, "bounds must be positive"));
        }
        Ok(())
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.min, i.max]
    }
}

/// Closed integer interval. Serialized as `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub const fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, n: u32) -> bool {
        n >= self.min && n <= self.max
    }

    fn check(&self, field: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::config(
                field,
                format!("min {} exceeds max {}", self.min, self.max),
            ));
        }
        Ok(())
    }
}

impl From<[u32; 2]> for CountRange {
    fn from(v: [u32; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<CountRange> for [u32; 2] {
    fn from(r: CountRange) -> Self {
        [r.min, r.max]
    }
}

/// Sampling ranges for every randomized scene quantity.
///
/// Lengths are meters, colors are HSV components in `[0, 1]`, light
/// quantities are linear radiance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomRanges {
    pub width_m: Interval,
    pub depth_m: Interval,
    pub height_m: Interval,
    pub window_count: CountRange,
    pub window_width_m: Interval,
    pub window_height_m: Interval,
    pub window_sill_m: Interval,
    pub door_count: CountRange,
    pub door_width_m: Interval,
    pub door_height_m: Interval,
    pub blackboard_width_m: Interval,
    pub blackboard_height_m: Interval,
    pub blackboard_sill_m: Interval,
    pub clutter_floor: CountRange,
    pub clutter_ceiling: CountRange,
    pub clutter_wall: CountRange,
    pub box_width_m: Interval,
    pub box_height_m: Interval,
    pub box_depth_m: Interval,
    pub saturation: Interval,
    pub value: Interval,
    pub chair_count: CountRange,
    pub sky_radiance: Interval,
    pub ambient: Interval,
}

impl Default for RoomRanges {
    fn default() -> Self {
        Self {
            width_m: Interval::new(6.0, 12.0),
            depth_m: Interval::new(7.0, 14.0),
            height_m: Interval::new(2.8, 4.0),
            window_count: CountRange::new(1, 4),
            window_width_m: Interval::new(0.8, 1.8),
            window_height_m: Interval::new(1.2, 1.6),
            window_sill_m: Interval::new(0.8, 1.0),
            door_count: CountRange::new(1, 2),
            door_width_m: Interval::new(0.9, 1.2),
            door_height_m: Interval::new(2.0, 2.3),
            blackboard_width_m: Interval::new(2.4, 4.0),
            blackboard_height_m: Interval::new(1.0, 1.3),
            blackboard_sill_m: Interval::new(0.85, 0.95),
            clutter_floor: CountRange::new(3, 10),
            clutter_ceiling: CountRange::new(3, 10),
            clutter_wall: CountRange::new(3, 10),
            box_width_m: Interval::new(0.1, 1.2),
            box_height_m: Interval::new(0.1, 1.2),
            box_depth_m: Interval::new(0.1, 1.2),
            saturation: Interval::new(0.2, 0.9),
            // Capped below the blown-out window intensity.
            value: Interval::new(0.15, 0.9),
            chair_count: CountRange::new(6, 24),
            sky_radiance: Interval::new(20.0, 40.0),
            ambient: Interval::new(0.02, 0.06),
        }
    }
}

impl RoomRanges {
    /// Same ranges with every clutter count forced to zero.
    pub fn without_clutter(&self) -> Self {
        Self {
            clutter_floor: CountRange::new(0, 0),
            clutter_ceiling: CountRange::new(0, 0),
            clutter_wall: CountRange::new(0, 0),
            ..self.clone()
        }
    }

    /// Same ranges with no clutter and no chairs.
    pub fn architecture_only(&self) -> Self {
        Self {
            chair_count: CountRange::new(0, 0),
            ..self.without_clutter()
        }
    }

    /// Checks interval sanity and that every configured element can fit in
    /// the smallest admissible room. Errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.width_m.check_positive("width_m")?;
        self.depth_m.check_positive("depth_m")?;
        self.height_m.check_positive("height_m")?;
        for (field, r) in [
            ("window_count", self.window_count),
            ("door_count", self.door_count),
            ("clutter_floor", self.clutter_floor),
            ("clutter_ceiling", self.clutter_ceiling),
            ("clutter_wall", self.clutter_wall),
            ("chair_count", self.chair_count),
        ] {
            r.check(field)?;
        }
        for (field, i) in [
            ("window_width_m", self.window_width_m),
            ("window_height_m", self.window_height_m),
            ("door_width_m", self.door_width_m),
            ("door_height_m", self.door_height_m),
            ("blackboard_width_m", self.blackboard_width_m),
            ("blackboard_height_m", self.blackboard_height_m),
            ("box_width_m", self.box_width_m),
            ("box_height_m", self.box_height_m),
            ("box_depth_m", self.box_depth_m),
        ] {
            i.check_positive(field)?;
        }
        self.window_sill_m.check("window_sill_m", 0.0, f64::MAX)?;
        self.blackboard_sill_m
            .check("blackboard_sill_m", 0.0, f64::MAX)?;
        self.saturation.check("saturation", 0.0, 1.0)?;
        self.value.check("value", 0.0, 1.0)?;
        self.sky_radiance.check("sky_radiance", 0.0, f64::MAX)?;
        self.ambient.check("ambient", 0.0, f64::MAX)?;

        if self.width_m.min <= 2.0 * CAMERA_SIDE_OFFSET_M {
            return Err(Error::config(
                "width_m",
                "rooms must be wider than 1.0 m to leave room for the camera",
            ));
        }
        if self.depth_m.min <= 2.0 * CAMERA_BACK_OFFSET_M {
            return Err(Error::config("depth_m", "rooms must be deeper than 1.0 m"));
        }
        if self.height_m.min <= EYE_HEIGHT_M {
            return Err(Error::config(
                "height_m",
                format!("rooms must be taller than the {EYE_HEIGHT_M} m eye height"),
            ));
        }

        let smallest = self
            .width_m
            .min
            .min(self.depth_m.min)
            .min(self.height_m.min);
        for (field, i) in [
            ("box_width_m", self.box_width_m),
            ("box_height_m", self.box_height_m),
            ("box_depth_m", self.box_depth_m),
        ] {
            if i.max >= smallest {
                return Err(Error::config(
                    field,
                    format!(
                        "box dimension {} must be below the smallest room dimension {smallest}",
                        i.max
                    ),
                ));
            }
        }

        // Windows sit on a side wall, doors on the opposite one. Both have
        // length `depth_m`.
        fits_on_wall(
            "window_width_m",
            self.window_count,
            self.window_width_m,
            self.depth_m.min,
        )?;
        fits_on_wall(
            "door_width_m",
            self.door_count,
            self.door_width_m,
            self.depth_m.min,
        )?;
        fits_on_wall(
            "blackboard_width_m",
            CountRange::new(1, 1),
            self.blackboard_width_m,
            self.width_m.min,
        )?;
        if self.window_count.max > 0
            && self.window_sill_m.max + self.window_height_m.max > self.height_m.min
        {
            return Err(Error::config(
                "window_height_m",
                "window sill plus height exceeds the lowest admissible ceiling",
            ));
        }
        if self.door_count.max > 0 && self.door_height_m.max > self.height_m.min {
            return Err(Error::config(
                "door_height_m",
                "doors are taller than the lowest admissible ceiling",
            ));
        }
        if self.blackboard_sill_m.max + self.blackboard_height_m.max > self.height_m.min {
            return Err(Error::config(
                "blackboard_height_m",
                "blackboard sill plus height exceeds the lowest admissible ceiling",
            ));
        }
        Ok(())
    }
}

/// Largest number of openings of width `min_width` that fit on `length`
/// with [`OPENING_MARGIN_M`] around each.
pub(crate) fn max_fit(length: f64, min_width: f64) -> u32 {
    ((length - OPENING_MARGIN_M) / (min_width + OPENING_MARGIN_M))
        .floor()
        .max(0.0) as u32
}

fn fits_on_wall(field: &str, count: CountRange, width: Interval, wall_min: f64) -> Result<()> {
    if count.max == 0 {
        return Ok(());
    }
    let needed = count.min.max(1);
    if max_fit(wall_min, width.min) < needed {
        return Err(Error::config(
            field,
            format!(
                "{needed} opening(s) of width {} m do not fit on a {wall_min} m wall",
                width.min
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn defaults_are_valid() {
        RoomRanges::default().validate().unwrap();
    }

    #[test]
    fn inverted_interval_names_field() {
        let r = RoomRanges {
            height_m: Interval::new(4.0, 3.0),
            ..Default::default()
        };
        assert_eq!(field_of(r.validate().unwrap_err()), "height_m");
    }

    #[test]
    fn five_meter_window_on_four_meter_walls() {
        let r = RoomRanges {
            width_m: Interval::new(3.0, 4.0),
            depth_m: Interval::new(3.0, 4.0),
            box_width_m: Interval::new(0.1, 1.0),
            box_height_m: Interval::new(0.1, 1.0),
            box_depth_m: Interval::new(0.1, 1.0),
            blackboard_width_m: Interval::new(2.0, 2.5),
            window_width_m: Interval::new(5.0, 5.0),
            ..Default::default()
        };
        assert_eq!(field_of(r.validate().unwrap_err()), "window_width_m");
    }

    #[test]
    fn oversized_boxes_rejected() {
        let r = RoomRanges {
            box_height_m: Interval::new(0.1, 2.8),
            ..Default::default()
        };
        assert_eq!(field_of(r.validate().unwrap_err()), "box_height_m");
    }

    #[test]
    fn hsv_bounds_and_low_ceiling() {
        let r = RoomRanges {
            value: Interval::new(0.1, 1.5),
            ..Default::default()
        };
        assert_eq!(field_of(r.validate().unwrap_err()), "value");
        let r = RoomRanges {
            height_m: Interval::new(1.5, 4.0),
            ..Default::default()
        };
        assert_eq!(field_of(r.validate().unwrap_err()), "height_m");
    }

    #[test]
    fn zero_openings_skip_fit_checks() {
        let r = RoomRanges {
            window_count: CountRange::new(0, 0),
            window_width_m: Interval::new(50.0, 60.0),
            ..Default::default()
        };
        r.validate().unwrap();
    }

    #[test]
    fn max_fit_counts() {
        // 0.15 + 4 * (1.0 + 0.15) = 4.75
        assert_eq!(max_fit(4.8, 1.0), 4);
        assert_eq!(max_fit(4.7, 1.0), 3);
        assert_eq!(max_fit(0.1, 1.0), 0);
    }
}
