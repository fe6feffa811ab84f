use std::hint::black_box;

use archsynth::evalmetrics::{thresh_accuracy, EvalConfig};
use archsynth::render::{render_ground_truth, render_photo, RenderSettings, World};
use archsynth_bench::{camera_rays, noise_image, scene};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_intersect(c: &mut Criterion) {
    let scene = scene(7);
    let world = World::full(&scene);
    let rays = camera_rays(&scene, 4096);
    c.bench_function("intersect_4096_rays", |b| {
        b.iter(|| {
            rays.iter()
                .filter_map(|r| world.intersect(black_box(r)))
                .count()
        })
    });
}

fn bench_render(c: &mut Criterion) {
    let scene = scene(7);
    let settings = RenderSettings {
        resolution: 128,
        samples_per_pixel: 4,
        ..Default::default()
    };
    let mut group = c.benchmark_group("render_128");
    group.sample_size(10);
    group.bench_function("photo_4spp", |b| {
        b.iter(|| render_photo(black_box(&scene), &settings).unwrap())
    });
    group.bench_function("label_depth", |b| {
        b.iter(|| render_ground_truth(black_box(&scene), &settings).unwrap())
    });
    group.finish();
}

fn bench_metric(c: &mut Criterion) {
    let a = noise_image(256, 1);
    let b = noise_image(256, 2);
    c.bench_function("thresh_accuracy_256", |bench| {
        bench.iter(|| thresh_accuracy(black_box(&a), black_box(&b), EvalConfig::default()).unwrap())
    });
}

criterion_group!(benches, bench_intersect, bench_render, bench_metric);
criterion_main!(benches);
