//! Shared fixtures for the benchmarks.

use archsynth::geometry::{Ray, Vec3};
use archsynth::rng::Stream;
use archsynth::{sample_scene, RoomRanges, SceneSpec};
use image::{Rgb, RgbImage};

/// Default-range scene with a fixed seed.
pub fn scene(seed: u64) -> SceneSpec {
    sample_scene(seed, &RoomRanges::default()).expect("default ranges are feasible")
}

/// `n` rays from the camera in uniformly random directions.
pub fn camera_rays(scene: &SceneSpec, n: usize) -> Vec<Ray> {
    let mut s = Stream::new(scene.seed, "bench-rays");
    (0..n)
        .map(|_| {
            let z = s.uniform(-1.0, 1.0);
            let phi = s.uniform(0.0, std::f64::consts::TAU);
            let r = (1.0 - z * z).sqrt();
            Ray::new(
                scene.camera.position,
                Vec3::new(r * phi.cos(), z, r * phi.sin()),
            )
        })
        .collect()
}

/// Pseudo-random image of the given size.
pub fn noise_image(size: u32, seed: u64) -> RgbImage {
    let mut s = Stream::new(seed, "bench-image");
    RgbImage::from_fn(size, size, |_, _| {
        let v = s.next_u64().to_le_bytes();
        Rgb([v[0], v[1], v[2]])
    })
}
