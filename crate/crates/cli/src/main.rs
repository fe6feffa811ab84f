//! `archsynth` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archsynth::dataset::{build_dataset, write_png};
use archsynth::evalmetrics::{evaluate_directory, ChannelRule};
use archsynth::render::render_triple;
use archsynth::{sample_scene, SceneSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "archsynth",
    version,
    about = "Synthetic classroom datasets and pixel-accuracy scoring"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Flags override the config file.
#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed_start: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    seed_count: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Output root; relative input paths are resolved against it.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one scene file per seed to {out}/scenes.
    Generate,
    /// Render photo, label and depth images to {out}/renders.
    Render {
        /// Scene files to render instead of sampling the seed range.
        scenes: Vec<PathBuf>,
    },
    /// Build the paired dataset under {out}.
    #[command(alias = "dataset")]
    Build,
    /// Score predictions against ground truth.
    Evaluate(EvaluateArgs),
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Directory of predicted PNGs.
    pred: PathBuf,
    /// Directory of ground-truth PNGs.
    gt: PathBuf,
    /// Per-channel value tolerance.
    #[arg(long, value_name = "N")]
    threshold: Option<u32>,
    /// Only pair `{seed}.png` and `{seed}_{target}.png` files.
    #[arg(long, value_enum)]
    target: Option<Target>,
    /// Compare summed squared error over channels.
    #[arg(long)]
    summed: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Label,
    Depth,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<archsynth::Error> for Failure {
    fn from(e: archsynth::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ARCHSYNTH_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.seed_start {
        cfg.seed_start = v;
    }
    if let Some(v) = common.seed_count {
        cfg.seed_count = v;
    }
    if let Some(v) = common.workers {
        cfg.workers = v;
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load_config(&cli.common)?;
    if let Command::Evaluate(args) = &cli.command {
        if let Some(t) = args.threshold {
            cfg.eval.threshold = t;
        }
        if args.summed {
            cfg.eval.rule = ChannelRule::Summed;
        }
    }
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Generate => generate(&cfg),
        Command::Render { scenes } => render(&cfg, scenes),
        Command::Build => build(&cfg),
        Command::Evaluate(args) => evaluate(&cfg, args),
    })
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn seeds(cfg: &RunConfig) -> Result<Vec<u64>, Failure> {
    Ok(cfg.dataset().seeds()?)
}

fn generate(cfg: &RunConfig) -> Result<(), Failure> {
    let dir = cfg.out.join("scenes");
    create_dir(&dir)?;
    for seed in seeds(cfg)? {
        let scene = sample_scene(seed, &cfg.ranges)?;
        write_text(&dir.join(SceneSpec::file_name(seed)), &scene.to_json()?)?;
    }
    println!("wrote {} scene files to {}", cfg.seed_count, dir.display());
    Ok(())
}

fn render(cfg: &RunConfig, files: &[PathBuf]) -> Result<(), Failure> {
    let scenes = if files.is_empty() {
        seeds(cfg)?
            .into_iter()
            .map(|seed| sample_scene(seed, &cfg.ranges).map_err(Failure::from))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        files
            .iter()
            .map(|f| {
                let path = cfg.resolve(f);
                let text = fs::read_to_string(&path)
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                let scene = SceneSpec::from_json(&text)
                    .and_then(|s| s.check().map(|()| s))
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                Ok(scene)
            })
            .collect::<Result<Vec<_>, Failure>>()?
    };
    let dir = cfg.out.join("renders");
    create_dir(&dir)?;
    for scene in &scenes {
        let triple = render_triple(scene, &cfg.render)?;
        let base = dir.join(format!("{:08}", scene.seed));
        let with = |suffix: &str| PathBuf::from(format!("{}_{suffix}.png", base.display()));
        write_png(&with("photo"), &triple.photo)?;
        write_png(&with("label"), &triple.label)?;
        write_png(&with("depth"), &triple.depth)?;
    }
    println!("rendered {} scenes to {}", scenes.len(), dir.display());
    Ok(())
}

fn build(cfg: &RunConfig) -> Result<(), Failure> {
    let outcome = build_dataset(&cfg.dataset(), &cfg.out)?;
    let c = outcome.manifest.counts;
    println!(
        "dataset at {}: {} entries (train {}, val {}, test {}); {} rendered, {} up to date",
        cfg.out.display(),
        outcome.manifest.entries.len(),
        c.train,
        c.val,
        c.test,
        outcome.rendered.len(),
        outcome.skipped.len()
    );
    Ok(())
}

fn evaluate(cfg: &RunConfig, args: &EvaluateArgs) -> Result<(), Failure> {
    let target = args.target.map(|t| match t {
        Target::Label => "label",
        Target::Depth => "depth",
    });
    let report = evaluate_directory(
        &cfg.resolve(&args.pred),
        &cfg.resolve(&args.gt),
        target,
        cfg.eval,
    )?;
    report.write(&cfg.out)?;
    print!("{}", report.table());
    Ok(())
}
