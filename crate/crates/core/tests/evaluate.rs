use std::fs;
use std::path::Path;

use archsynth::evalmetrics::{evaluate_directory, EvalConfig, REPORT_FILE, SCORES_FILE};
use archsynth::rng::Stream;
use image::{GrayImage, Luma, Rgb, RgbImage};

fn gt_image(seed: u64) -> RgbImage {
    let mut s = Stream::new(seed, "gt");
    RgbImage::from_fn(20, 20, |_, _| {
        Rgb([0; 3].map(|_: u8| s.int_inclusive(0, 200) as u8))
    })
}

fn write_set(dir: &Path, seeds: &[u64], f: impl Fn(u64) -> RgbImage) {
    for &seed in seeds {
        f(seed)
            .save(dir.join(format!("{seed:08}_label.png")))
            .unwrap();
    }
}

#[test]
fn copies_score_one() {
    let gt = tempfile::tempdir().unwrap();
    let pred = tempfile::tempdir().unwrap();
    let seeds: Vec<u64> = (0..50).collect();
    write_set(gt.path(), &seeds, gt_image);
    write_set(pred.path(), &seeds, gt_image);
    let report = evaluate_directory(pred.path(), gt.path(), None, EvalConfig::default()).unwrap();
    assert_eq!(report.summary.count, 50);
    assert_eq!(
        (report.summary.mean, report.summary.min, report.summary.max),
        (1.0, 1.0, 1.0)
    );
    assert_eq!(report.summary.histogram[19], 50);
    let seeds_seen: Vec<u64> = report.scores.iter().map(|s| s.seed).collect();
    assert_eq!(seeds_seen, seeds);
}

#[test]
fn ten_percent_corruption_scores_point_nine() {
    let gt = tempfile::tempdir().unwrap();
    let pred = tempfile::tempdir().unwrap();
    let seeds: Vec<u64> = (0..5).collect();
    write_set(gt.path(), &seeds, gt_image);
    // 40 of 400 pixels get +50 in the red channel.
    write_set(pred.path(), &seeds, |seed| {
        let mut img = gt_image(seed);
        for x in 0..20 {
            for y in 0..2 {
                img.get_pixel_mut(x, y)[0] += 50;
            }
        }
        img
    });
    let report =
        evaluate_directory(pred.path(), gt.path(), Some("label"), EvalConfig::default()).unwrap();
    assert!(report.scores.iter().all(|s| s.score == 0.9));
    assert_eq!(report.summary.mean, 0.9);
}

#[test]
fn orphan_prediction_is_named() {
    let gt = tempfile::tempdir().unwrap();
    let pred = tempfile::tempdir().unwrap();
    write_set(gt.path(), &[1, 2], gt_image);
    write_set(pred.path(), &[1, 2, 3], gt_image);
    let err = evaluate_directory(pred.path(), gt.path(), None, EvalConfig::default()).unwrap_err();
    assert!(err.to_string().contains("00000003_label.png"), "{err}");
}

#[test]
fn extra_ground_truth_is_ignored() {
    let gt = tempfile::tempdir().unwrap();
    let pred = tempfile::tempdir().unwrap();
    write_set(gt.path(), &[1, 2, 3], gt_image);
    write_set(pred.path(), &[2], gt_image);
    let report = evaluate_directory(pred.path(), gt.path(), None, EvalConfig::default()).unwrap();
    assert_eq!(report.summary.count, 1);
}

#[test]
fn target_filter_pairs_dataset_directories() {
    // A dataset split directory holds photo, label and depth per seed.
    let gt = tempfile::tempdir().unwrap();
    let pred = tempfile::tempdir().unwrap();
    for seed in [4u64, 9] {
        gt_image(seed)
            .save(gt.path().join(format!("{seed:08}_photo.png")))
            .unwrap();
        gt_image(seed + 1)
            .save(gt.path().join(format!("{seed:08}_label.png")))
            .unwrap();
        GrayImage::from_pixel(20, 20, Luma([7]))
            .save(gt.path().join(format!("{seed:08}_depth.png")))
            .unwrap();
        GrayImage::from_pixel(20, 20, Luma([9]))
            .save(pred.path().join(format!("{seed:08}.png")))
            .unwrap();
    }
    let depth =
        evaluate_directory(pred.path(), gt.path(), Some("depth"), EvalConfig::default()).unwrap();
    assert_eq!(depth.summary.mean, 1.0);
    let exact = evaluate_directory(
        pred.path(),
        gt.path(),
        Some("depth"),
        EvalConfig::with_threshold(0),
    )
    .unwrap();
    assert_eq!(exact.summary.mean, 0.0);
    // Against labels the channel layout differs.
    assert!(
        evaluate_directory(pred.path(), gt.path(), Some("label"), EvalConfig::default()).is_err()
    );
    // Without a filter the ground-truth seeds are ambiguous.
    assert!(evaluate_directory(pred.path(), gt.path(), None, EvalConfig::default()).is_err());
}

#[test]
fn report_files_written() {
    let gt = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    write_set(gt.path(), &[5, 6], gt_image);
    let report = evaluate_directory(gt.path(), gt.path(), None, EvalConfig::default()).unwrap();
    report.write(out.path()).unwrap();
    let csv = fs::read_to_string(out.path().join(SCORES_FILE)).unwrap();
    assert_eq!(csv, "seed,score\n5,1.000000\n6,1.000000\n");
    let json = fs::read_to_string(out.path().join(REPORT_FILE)).unwrap();
    assert!(json.contains("\"mean\": 1.000000"));
    assert!(json.contains("\"threshold\": 10"));
}
