//! Paired training images, split assignment and the on-disk dataset.
//!
//! Layout under the output root:
//!
//! ```text
//! {split}/{seed:08}_photo.png   RGB, full resolution
//! {split}/{seed:08}_label.png   RGB, palette colors only
//! {split}/{seed:08}_depth.png   grayscale
//! {split}/{seed:08}_scene.json  the SceneSpec that produced the images
//! {split}/{seed:08}_meta.json   provenance, written last
//! pairs/label/{split}/{seed:08}.png
//! pairs/depth/{split}/{seed:08}.png
//! dataset_manifest.json
//! ```
//!
//! Pairs hold the input photo on the left and the target on the right, each
//! downscaled by two.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, ImageFormat, Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::render::{render_triple, RenderSettings};
use crate::rng::Stream;
use crate::scenegen::{sample_scene, RoomRanges};

pub const MANIFEST_FILE: &str = "dataset_manifest.json";
pub const FORMAT_VERSION: u32 = 1;
/// Default split proportions, applied by largest remainder.
pub const SPLIT_WEIGHTS: [u64; 3] = [750, 200, 50];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [SplitName::Train, SplitName::Val, SplitName::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Val => "val",
            SplitName::Test => "test",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which ground-truth pass forms the right half of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairTarget {
    Label,
    Depth,
}

impl PairTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            PairTarget::Label => "label",
            PairTarget::Depth => "depth",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitCounts {
    pub train: u64,
    pub val: u64,
    pub test: u64,
}

impl SplitCounts {
    pub const fn new(train: u64, val: u64, test: u64) -> Self {
        Self { train, val, test }
    }

    pub fn total(&self) -> u64 {
        self.train + self.val + self.test
    }

    pub fn get(&self, split: SplitName) -> u64 {
        match split {
            SplitName::Train => self.train,
            SplitName::Val => self.val,
            SplitName::Test => self.test,
        }
    }

    /// Splits `n` in the default proportions. Leftover units go to the
    /// largest fractional parts, earlier splits first on ties.
    pub fn proportional(n: u64) -> Self {
        let total: u64 = SPLIT_WEIGHTS.iter().sum();
        let mut parts = SPLIT_WEIGHTS.map(|w| n * w / total);
        let rems = SPLIT_WEIGHTS.map(|w| n * w % total);
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&i| std::cmp::Reverse(rems[i]));
        let short = n - parts.iter().sum::<u64>();
        for &i in order.iter().take(short as usize) {
            parts[i] += 1;
        }
        Self::new(parts[0], parts[1], parts[2])
    }
}

/// A `2n x n` RGB image: downscaled input left, downscaled target right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedImage(RgbImage);

impl PairedImage {
    pub fn image(&self) -> &RgbImage {
        &self.0
    }

    pub fn into_image(self) -> RgbImage {
        self.0
    }

    pub fn input_half(&self) -> RgbImage {
        let h = self.0.height();
        image::imageops::crop_imm(&self.0, 0, 0, h, h).to_image()
    }

    pub fn target_half(&self) -> RgbImage {
        let h = self.0.height();
        image::imageops::crop_imm(&self.0, h, 0, h, h).to_image()
    }
}

/// 2x2 box filter with round-half-up.
pub fn downscale_area(img: &RgbImage) -> RgbImage {
    let (w, h) = (img.width() / 2, img.height() / 2);
    RgbImage::from_fn(w, h, |x, y| {
        let mut px = [0u8; 3];
        for (c, out) in px.iter_mut().enumerate() {
            let sum: u32 = [(0, 0), (1, 0), (0, 1), (1, 1)]
                .iter()
                .map(|&(dx, dy)| u32::from(img.get_pixel(2 * x + dx, 2 * y + dy)[c]))
                .sum();
            *out = ((sum + 2) / 4) as u8;
        }
        Rgb(px)
    })
}

/// Keeps the top-left pixel of every 2x2 block.
pub fn downscale_nearest(img: &RgbImage) -> RgbImage {
    RgbImage::from_fn(img.width() / 2, img.height() / 2, |x, y| {
        *img.get_pixel(2 * x, 2 * y)
    })
}

/// Grayscale replicated into three channels.
pub fn gray_to_rgb(img: &GrayImage) -> RgbImage {
    RgbImage::from_fn(img.width(), img.height(), |x, y| {
        let v = img.get_pixel(x, y)[0];
        Rgb([v, v, v])
    })
}

/// Photo is area-averaged, target is nearest-neighbor so label colors and
/// depth codes survive unblended.
pub fn compose_pair(input: &RgbImage, target: &RgbImage) -> Result<PairedImage> {
    let (w, h) = input.dimensions();
    if target.dimensions() != (w, h) {
        return Err(Error::Input(format!(
            "pair sources differ in size: {w}x{h} vs {}x{}",
            target.width(),
            target.height()
        )));
    }
    if w != h || w == 0 || w % 2 != 0 {
        return Err(Error::Input(format!(
            "pair sources must be square with even side, got {w}x{h}"
        )));
    }
    let half = w / 2;
    let mut out = RgbImage::new(w, half);
    image::imageops::replace(&mut out, &downscale_area(input), 0, 0);
    image::imageops::replace(&mut out, &downscale_nearest(target), i64::from(half), 0);
    Ok(PairedImage(out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub seed: u64,
    pub split: SplitName,
    /// Paths relative to the dataset root, `/`-separated.
    pub photo: String,
    pub label: String,
    pub depth: String,
    pub scene: String,
    pub meta: String,
    pub label_pair: String,
    pub depth_pair: String,
}

impl ManifestEntry {
    pub fn new(seed: u64, split: SplitName) -> Self {
        let base = format!("{split}/{seed:08}");
        Self {
            seed,
            split,
            photo: format!("{base}_photo.png"),
            label: format!("{base}_label.png"),
            depth: format!("{base}_depth.png"),
            scene: format!("{base}_scene.json"),
            meta: format!("{base}_meta.json"),
            label_pair: format!("pairs/label/{split}/{seed:08}.png"),
            depth_pair: format!("pairs/depth/{split}/{seed:08}.png"),
        }
    }

    pub fn pair(&self, target: PairTarget) -> &str {
        match target {
            PairTarget::Label => &self.label_pair,
            PairTarget::Depth => &self.depth_pair,
        }
    }

    fn files(&self) -> [&str; 7] {
        [
            &self.photo,
            &self.label,
            &self.depth,
            &self.scene,
            &self.label_pair,
            &self.depth_pair,
            &self.meta,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub split_seed: u64,
    pub counts: SplitCounts,
    /// Sorted by seed.
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_canonical_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Self = crate::json::from_str(text, "dataset manifest")?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported manifest format_version {}",
                manifest.format_version
            )));
        }
        Ok(manifest)
    }

    pub fn read(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_json(&text)
    }

    pub fn split(&self, split: SplitName) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

/// Deterministic shuffled partition of `seeds` into the three splits.
pub fn split_manifest(
    seeds: &[u64],
    counts: SplitCounts,
    split_seed: u64,
) -> Result<DatasetManifest> {
    if counts.total() != seeds.len() as u64 {
        return Err(Error::Input(format!(
            "split counts {}+{}+{} do not sum to {} entries",
            counts.train,
            counts.val,
            counts.test,
            seeds.len()
        )));
    }
    let distinct: BTreeSet<u64> = seeds.iter().copied().collect();
    if distinct.len() != seeds.len() {
        return Err(Error::Input("duplicate seeds in dataset".into()));
    }
    let mut order: Vec<u64> = distinct.into_iter().collect();
    Stream::new(split_seed, "split").shuffle(&mut order);

    let mut entries = Vec::with_capacity(order.len());
    let mut rest = order.as_slice();
    for split in SplitName::ALL {
        let (head, tail) = rest.split_at(counts.get(split) as usize);
        entries.extend(head.iter().map(|&seed| ManifestEntry::new(seed, split)));
        rest = tail;
    }
    entries.sort_by_key(|e| e.seed);
    Ok(DatasetManifest {
        format_version: FORMAT_VERSION,
        split_seed,
        counts,
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct DatasetConfig {
    pub seed_start: u64,
    pub seed_count: u64,
    /// `None` applies [`SplitCounts::proportional`].
    pub counts: Option<SplitCounts>,
    pub split_seed: u64,
    pub ranges: RoomRanges,
    pub settings: RenderSettings,
}

impl DatasetConfig {
    pub fn new(seed_start: u64, seed_count: u64) -> Self {
        Self {
            seed_start,
            seed_count,
            counts: None,
            split_seed: 0,
            ranges: RoomRanges::default(),
            settings: RenderSettings::default(),
        }
    }

    pub fn seeds(&self) -> Result<Vec<u64>> {
        let end = self
            .seed_start
            .checked_add(self.seed_count)
            .ok_or_else(|| Error::config("seed_count", "seed range overflows u64"))?;
        Ok((self.seed_start..end).collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.ranges.validate()?;
        self.settings.validate()?;
        if !self.settings.resolution.is_multiple_of(2) {
            return Err(Error::config("resolution", "must be even to form pairs"));
        }
        if let Some(c) = self.counts {
            if c.total() != self.seed_count {
                return Err(Error::config(
                    "split_counts",
                    format!(
                        "sum {} differs from seed_count {}",
                        c.total(),
                        self.seed_count
                    ),
                ));
            }
        }
        self.seeds().map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneMeta {
    pub format_version: u32,
    pub scene_seed: u64,
    /// SHA-256 of the canonical scene document.
    pub scene_hash: String,
    pub settings_hash: String,
}

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub manifest: DatasetManifest,
    /// Seeds rendered in this run, ascending.
    pub rendered: Vec<u64>,
    /// Seeds whose outputs were already complete, ascending.
    pub skipped: Vec<u64>,
}

/// Renders every scene of `config` under `root` and writes the manifest.
///
/// A scene is skipped when its meta file matches the current scene and
/// settings and every output file exists. Scenes run in parallel on the
/// current rayon pool; failures carry the seed.
pub fn build_dataset(config: &DatasetConfig, root: &Path) -> Result<BuildOutcome> {
    config.validate()?;
    let seeds = config.seeds()?;
    let counts = config
        .counts
        .unwrap_or_else(|| SplitCounts::proportional(config.seed_count));
    let manifest = split_manifest(&seeds, counts, config.split_seed)?;
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;

    let results: Vec<Result<(u64, bool)>> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            build_scene(config, root, entry)
                .map(|rendered| (entry.seed, rendered))
                .map_err(|e| Error::Scene {
                    seed: entry.seed,
                    source: Box::new(e),
                })
        })
        .collect();

    let mut rendered = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        let (seed, did_render) = r?;
        if did_render {
            rendered.push(seed);
        } else {
            skipped.push(seed);
        }
    }
    write_atomic(&root.join(MANIFEST_FILE), manifest.to_json()?.as_bytes())?;
    log::info!(
        "dataset at {}: {} rendered, {} skipped",
        root.display(),
        rendered.len(),
        skipped.len()
    );
    Ok(BuildOutcome {
        manifest,
        rendered,
        skipped,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Returns whether the scene had to be rendered.
fn build_scene(config: &DatasetConfig, root: &Path, entry: &ManifestEntry) -> Result<bool> {
    let scene = sample_scene(entry.seed, &config.ranges)?;
    let scene_json = scene.to_json()?;
    let meta = SceneMeta {
        format_version: FORMAT_VERSION,
        scene_seed: entry.seed,
        scene_hash: sha256_hex(scene_json.as_bytes()),
        settings_hash: config.settings.hash(),
    };
    let meta_json = crate::json::to_canonical_string(&meta)?;
    if is_complete(root, entry, &meta_json) {
        log::debug!("scene {}: up to date", entry.seed);
        return Ok(false);
    }

    let path = |rel: &str| root.join(rel);
    // An interrupted earlier build must not look complete.
    remove_if_present(&path(&entry.meta))?;
    let triple = render_triple(&scene, &config.settings)?;
    let depth_rgb = gray_to_rgb(&triple.depth);
    let label_pair = compose_pair(&triple.photo, &triple.label)?;
    let depth_pair = compose_pair(&triple.photo, &depth_rgb)?;

    write_png(&path(&entry.photo), &triple.photo)?;
    write_png(&path(&entry.label), &triple.label)?;
    write_png(&path(&entry.depth), &triple.depth)?;
    write_png(&path(&entry.label_pair), label_pair.image())?;
    write_png(&path(&entry.depth_pair), depth_pair.image())?;
    write_atomic(&path(&entry.scene), scene_json.as_bytes())?;
    write_atomic(&path(&entry.meta), meta_json.as_bytes())?;
    log::debug!("scene {}: rendered", entry.seed);
    Ok(true)
}

fn is_complete(root: &Path, entry: &ManifestEntry, meta_json: &str) -> bool {
    let matches = fs::read_to_string(root.join(&entry.meta)).is_ok_and(|t| t == meta_json);
    matches && entry.files().iter().all(|f| root.join(f).is_file())
}

fn remove_if_present(path: &Path) -> Result<()> {
    match fs::remove_file(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        None => Ok(()),
    }
}

/// Writes through a sibling temp file and renames into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    let tmp = temp_path(path);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_png<P>(path: &Path, img: &image::ImageBuffer<P, Vec<u8>>) -> Result<()>
where
    P: image::PixelWithColorType<Subpixel = u8>,
{
    ensure_parent(path)?;
    let tmp = temp_path(path);
    img.save_with_format(&tmp, ImageFormat::Png)
        .map_err(|e| Error::image(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
