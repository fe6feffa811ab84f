use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use image::{Rgb, RgbImage};

const SMALL: &str = "[render]\nresolution = 24\nsamples_per_pixel = 2\n";

fn archsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_archsynth"))
        .args(args)
        .env_remove("ARCHSYNTH_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().display().to_string(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn generate_writes_one_scene_per_seed_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    let run = archsynth(&[
        "generate",
        "--seed-start",
        "0",
        "--seed-count",
        "5",
        "--out",
        o,
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let first = tree(&out.join("scenes"));
    let names: Vec<&str> = first.keys().map(String::as_str).collect();
    assert_eq!(
        names,
        [
            "scene_00000000.json",
            "scene_00000001.json",
            "scene_00000002.json",
            "scene_00000003.json",
            "scene_00000004.json"
        ]
    );
    let again = archsynth(&["generate", "--seed-count", "5", "--out", o]);
    assert!(again.status.success());
    assert_eq!(tree(&out.join("scenes")), first);
}

#[test]
fn inverted_interval_names_field_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[ranges]\nwidth_m = [9.0, 7.0]\n");
    let run = archsynth(&[
        "--config",
        &cfg,
        "generate",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("width_m"), "{}", stderr(&run));
}

#[test]
fn unknown_key_and_bad_flag_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sed_count = 3\n");
    let run = archsynth(&["--config", &cfg, "generate"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("sed_count"), "{}", stderr(&run));
    assert_eq!(
        archsynth(&["generate", "--seed-count", "many"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(archsynth(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(archsynth(&["--help"]).status.code(), Some(0));
}

#[test]
fn build_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("nested/missing/b");
    for (out, workers) in [(&a, "1"), (&b, "8")] {
        let run = archsynth(&[
            "--config",
            &cfg,
            "build",
            "--seed-count",
            "10",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(run.status.success(), "{}", stderr(&run));
        assert!(stdout(&run).contains("10 entries"), "{}", stdout(&run));
    }
    let ta = tree(&a);
    assert_eq!(ta, tree(&b));
    assert_eq!(ta.keys().filter(|k| k.ends_with(".png")).count(), 50);
    let manifest = String::from_utf8(ta["dataset_manifest.json"].clone()).unwrap();
    assert_eq!(manifest.matches("\"seed\":").count(), 10);
}

#[test]
fn dataset_alias_and_render_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().to_str().unwrap();
    let run = archsynth(&[
        "--config",
        &cfg,
        "dataset",
        "--seed-count",
        "2",
        "--out",
        out,
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    let gen = archsynth(&[
        "generate",
        "--seed-start",
        "3",
        "--seed-count",
        "1",
        "--out",
        out,
    ]);
    assert!(gen.status.success());
    let run = archsynth(&[
        "--config",
        &cfg,
        "render",
        "scenes/scene_00000003.json",
        "--out",
        out,
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    for pass in ["photo", "label", "depth"] {
        assert!(dir
            .path()
            .join(format!("renders/00000003_{pass}.png"))
            .is_file());
    }
    let missing = archsynth(&["render", "scenes/nope.json", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));
}

fn noisy(seed: u8) -> RgbImage {
    RgbImage::from_fn(16, 16, |x, y| {
        Rgb([x as u8 * 9, y as u8 * 7, seed.wrapping_mul(31)])
    })
}

#[test]
fn evaluate_copies_and_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt");
    let pred = dir.path().join("pred");
    fs::create_dir_all(&gt).unwrap();
    fs::create_dir_all(&pred).unwrap();
    for seed in 0..4u8 {
        noisy(seed)
            .save(gt.join(format!("{seed:08}_label.png")))
            .unwrap();
        let mut p = noisy(seed);
        // Shift a quarter of the pixels by 5 in one channel.
        for x in 0..16 {
            for y in 0..4 {
                let v = &mut p.get_pixel_mut(x, y)[2];
                *v = v.wrapping_add(5);
            }
        }
        p.save(pred.join(format!("{seed:08}.png"))).unwrap();
    }
    let out = dir.path().to_str().unwrap();

    let same = archsynth(&["evaluate", "gt", "gt", "--out", out]);
    assert!(same.status.success(), "{}", stderr(&same));
    assert!(
        stdout(&same).contains("mean       1.000"),
        "{}",
        stdout(&same)
    );
    assert!(dir.path().join("eval_report.json").is_file());
    assert!(dir.path().join("eval_scores.csv").is_file());

    let loose = archsynth(&["evaluate", "pred", "gt", "--target", "label", "--out", out]);
    assert!(
        stdout(&loose).contains("mean       1.000"),
        "{}",
        stdout(&loose)
    );
    let strict = archsynth(&[
        "evaluate",
        "pred",
        "gt",
        "--target",
        "label",
        "--threshold",
        "0",
        "--out",
        out,
    ]);
    assert!(strict.status.success());
    assert!(
        stdout(&strict).contains("mean       0.750"),
        "{}",
        stdout(&strict)
    );
    let csv = fs::read_to_string(dir.path().join("eval_scores.csv")).unwrap();
    assert_eq!(
        csv,
        "seed,score\n0,0.750000\n1,0.750000\n2,0.750000\n3,0.750000\n"
    );
}

#[test]
fn evaluate_orphan_fails() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt");
    let pred = dir.path().join("pred");
    fs::create_dir_all(&gt).unwrap();
    fs::create_dir_all(&pred).unwrap();
    noisy(1).save(gt.join("00000001_label.png")).unwrap();
    noisy(1).save(pred.join("00000001.png")).unwrap();
    noisy(2).save(pred.join("00000002.png")).unwrap();
    let run = archsynth(&[
        "evaluate",
        "pred",
        "gt",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_ne!(run.status.code(), Some(0));
    assert!(stderr(&run).contains("00000002.png"), "{}", stderr(&run));
}
