//! Pixel accuracy of predicted images against ground truth.
//!
//! A pixel is correct under threshold `t` when every channel satisfies
//! `(pred - gt)^2 <= t^2`. The summed rule compares the sum of squared
//! channel errors against `t^2` instead. Both reduce to exact match at
//! `t = 0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Pixel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: u32 = 10;
pub const HISTOGRAM_BINS: usize = 20;
pub const REPORT_FILE: &str = "eval_report.json";
pub const SCORES_FILE: &str = "eval_scores.csv";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelRule {
    /// Every channel within the threshold.
    #[default]
    PerChannel,
    /// Sum of squared channel errors within the squared threshold.
    Summed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub threshold: u32,
    pub rule: ChannelRule,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            rule: ChannelRule::PerChannel,
        }
    }
}

impl EvalConfig {
    pub fn with_threshold(threshold: u32) -> Self {
        Self {
            threshold,
            ..Self::default()
        }
    }
}

fn check_shapes(pred: (u32, u32), gt: (u32, u32)) -> Result<()> {
    if pred != gt {
        return Err(Error::Input(format!(
            "image sizes differ: prediction {}x{}, ground truth {}x{}",
            pred.0, pred.1, gt.0, gt.1
        )));
    }
    Ok(())
}

/// Fraction of pixels meeting `config`, over interleaved 8-bit samples.
fn score_samples(pred: &[u8], gt: &[u8], channels: usize, config: EvalConfig) -> f64 {
    debug_assert_eq!(pred.len(), gt.len());
    let pixels = pred.len() / channels;
    if pixels == 0 {
        return 1.0;
    }
    let limit = u64::from(config.threshold) * u64::from(config.threshold);
    let correct = pred
        .chunks_exact(channels)
        .zip(gt.chunks_exact(channels))
        .filter(|(p, g)| {
            let sq = p.iter().zip(g.iter()).map(|(&a, &b)| {
                let d = u64::from(a.abs_diff(b));
                d * d
            });
            match config.rule {
                ChannelRule::PerChannel => sq.into_iter().all(|e| e <= limit),
                ChannelRule::Summed => sq.sum::<u64>() <= limit,
            }
        })
        .count();
    correct as f64 / pixels as f64
}

/// Fraction of pixels equal in every channel.
pub fn exact_accuracy<P>(
    pred: &ImageBuffer<P, Vec<u8>>,
    gt: &ImageBuffer<P, Vec<u8>>,
) -> Result<f64>
where
    P: Pixel<Subpixel = u8>,
{
    thresh_accuracy(pred, gt, EvalConfig::with_threshold(0))
}

pub fn thresh_accuracy<P>(
    pred: &ImageBuffer<P, Vec<u8>>,
    gt: &ImageBuffer<P, Vec<u8>>,
    config: EvalConfig,
) -> Result<f64>
where
    P: Pixel<Subpixel = u8>,
{
    check_shapes(pred.dimensions(), gt.dimensions())?;
    Ok(score_samples(
        pred.as_raw(),
        gt.as_raw(),
        usize::from(P::CHANNEL_COUNT),
        config,
    ))
}

/// [`thresh_accuracy`] for decoded images of any 8-bit color type. Both
/// images must share size and channel layout.
pub fn thresh_accuracy_dynamic(
    pred: &DynamicImage,
    gt: &DynamicImage,
    config: EvalConfig,
) -> Result<f64> {
    check_shapes((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let (pc, gc) = (pred.color(), gt.color());
    if pc != gc {
        return Err(Error::Input(format!(
            "color types differ: {pc:?} vs {gc:?}"
        )));
    }
    if pc.bytes_per_pixel() != pc.channel_count() {
        return Err(Error::Input(format!(
            "only 8-bit images are scored, got {pc:?}"
        )));
    }
    Ok(score_samples(
        pred.as_bytes(),
        gt.as_bytes(),
        usize::from(pc.channel_count()),
        config,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Bin `k` counts scores in `[k/20, (k+1)/20)`; the last bin includes 1.
    pub histogram: Vec<u64>,
}

/// Summary statistics of scores in `[0, 1]`. The mean is summed in
/// ascending order so it does not depend on input order.
pub fn aggregate(scores: &[f64]) -> Result<Aggregate> {
    if scores.is_empty() {
        return Err(Error::Input("no scores to aggregate".into()));
    }
    if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::Input(format!("score {bad} outside [0, 1]")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let mean = (sorted.iter().sum::<f64>() / sorted.len() as f64).clamp(min, max);
    let mut histogram = vec![0u64; HISTOGRAM_BINS];
    for &s in &sorted {
        let bin = (1..HISTOGRAM_BINS)
            .take_while(|&k| s >= k as f64 / HISTOGRAM_BINS as f64)
            .count();
        histogram[bin] += 1;
    }
    Ok(Aggregate {
        count: sorted.len(),
        mean,
        min,
        max,
        histogram,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub seed: u64,
    pub prediction: String,
    pub ground_truth: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub summary: Aggregate,
    /// Sorted by seed.
    pub scores: Vec<ImageScore>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_canonical_string(self)
    }

    /// `seed,score` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,score\n");
        for s in &self.scores {
            let _ = writeln!(out, "{},{:.6}", s.seed, s.score);
        }
        out
    }

    /// Human-readable summary for a terminal.
    pub fn table(&self) -> String {
        let s = &self.summary;
        let rule = match self.config.rule {
            ChannelRule::PerChannel => "per-channel",
            ChannelRule::Summed => "summed",
        };
        let mut out = String::new();
        let _ = writeln!(out, "threshold  {} ({rule})", self.config.threshold);
        let _ = writeln!(out, "images     {}", s.count);
        let _ = writeln!(out, "mean       {:.3}", s.mean);
        let _ = writeln!(out, "min        {:.3}", s.min);
        let _ = writeln!(out, "max        {:.3}", s.max);
        let peak = s.histogram.iter().copied().max().unwrap_or(0).max(1);
        for (k, &n) in s.histogram.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let bar = "#".repeat(((n * 40).div_ceil(peak)) as usize);
            let _ = writeln!(
                out,
                "  [{:.2}, {:.2}{} {:>5} {bar}",
                k as f64 / 20.0,
                (k + 1) as f64 / 20.0,
                if k + 1 == HISTOGRAM_BINS { "]" } else { ")" },
                n
            );
        }
        out
    }

    /// Writes [`REPORT_FILE`] and [`SCORES_FILE`] into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        crate::dataset::write_atomic(&dir.join(REPORT_FILE), self.to_json()?.as_bytes())?;
        crate::dataset::write_atomic(&dir.join(SCORES_FILE), self.to_csv().as_bytes())
    }
}

/// Leading decimal digits of a file stem and the remainder after them.
fn split_seed(stem: &str) -> Option<(u64, &str)> {
    let digits = stem.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    stem[..digits]
        .parse()
        .ok()
        .map(|seed| (seed, &stem[digits..]))
}

/// PNG files in `dir` keyed by seed. With a target, only stems `{seed}` and
/// `{seed}_{target}` count; other files are ignored.
fn index_dir(dir: &Path, target: Option<&str>) -> Result<BTreeMap<u64, PathBuf>> {
    let mut out = BTreeMap::new();
    let read = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for item in read {
        let path = item.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png || !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let Some((seed, rest)) = split_seed(stem) else {
            continue;
        };
        if let Some(t) = target {
            let suffix_ok = rest.is_empty() || rest.strip_prefix('_') == Some(t);
            if !suffix_ok {
                continue;
            }
        }
        if let Some(prev) = out.insert(seed, path.clone()) {
            return Err(Error::Input(format!(
                "seed {seed} is ambiguous in {}: {} and {}",
                dir.display(),
                prev.display(),
                path.display()
            )));
        }
    }
    Ok(out)
}

fn load(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|e| Error::image(path, e))
}

/// Scores every prediction in `pred_dir` against the ground-truth file with
/// the same leading seed in `gt_dir`.
///
/// `target` (for example `"label"`) restricts both directories to files named
/// `{seed}.png` or `{seed}_{target}.png`. Predictions without ground truth
/// are an error; ground truth without a prediction is ignored.
pub fn evaluate_directory(
    pred_dir: &Path,
    gt_dir: &Path,
    target: Option<&str>,
    config: EvalConfig,
) -> Result<EvalReport> {
    let preds = index_dir(pred_dir, target)?;
    let gts = index_dir(gt_dir, target)?;
    let orphans: Vec<String> = preds
        .iter()
        .filter(|(seed, _)| !gts.contains_key(seed))
        .map(|(_, p)| p.display().to_string())
        .collect();
    if !orphans.is_empty() {
        return Err(Error::Input(format!(
            "predictions without ground truth: {}",
            orphans.join(", ")
        )));
    }
    if preds.is_empty() {
        return Err(Error::Input(format!(
            "no predictions found in {}",
            pred_dir.display()
        )));
    }
    let pairs: Vec<(u64, &PathBuf, &PathBuf)> = preds
        .iter()
        .map(|(&seed, p)| (seed, p, &gts[&seed]))
        .collect();
    let scores = pairs
        .par_iter()
        .map(|&(seed, p, g)| {
            let score = thresh_accuracy_dynamic(&load(p)?, &load(g)?, config)
                .map_err(|e| Error::Input(format!("{} vs {}: {e}", p.display(), g.display())))?;
            Ok(ImageScore {
                seed,
                prediction: p.display().to_string(),
                ground_truth: g.display().to_string(),
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = scores.iter().map(|s| s.score).collect();
    Ok(EvalReport {
        config,
        summary: aggregate(&values)?,
        scores,
    })
}
