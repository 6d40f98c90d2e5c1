use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use chromabench::distribution::AlphaSearch;
use chromabench::features::{extract_features, save_cfs};
use chromabench::harness::{
    clean_prompts, correct_dir, load_dir, run_benchmark, saturation_sweep, sweep_csv, synth_set,
    Cell, EvalConfig, RunOptions, SynthMode,
};
use chromabench::PixelStatsExtractor;

#[derive(Parser)]
#[command(name = "chromabench", version, about = "Colorization evaluation toolkit")]
struct Cli {
    /// Worker threads for per-image work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Extractor {
    PixelStats,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Smooth,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a JSON config.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Treat unpaired files and metric failures as errors.
        #[arg(long)]
        strict: bool,
        /// Take lightness from the ground truth before scoring (512×512).
        #[arg(long)]
        luminance_replace: bool,
    },
    /// Compute features for every image in a directory and write a CFS file.
    Extract {
        #[arg(long, value_enum, default_value = "pixel-stats")]
        extractor: Extractor,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a deterministic synthetic image set.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "64x64", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, value_enum, default_value = "smooth")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Colorfulness and FID of a set under a range of chroma factors.
    Sweep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Strip captioner artifacts from a prompt file.
    CleanCaptions {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rescale predicted chroma to match the ground truth's mean colorfulness.
    Correct {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = AlphaSearch::default().lo)]
        alpha_min: f64,
        #[arg(long, default_value_t = AlphaSearch::default().hi)]
        alpha_max: f64,
        #[arg(long, default_value_t = AlphaSearch::default().tol)]
        alpha_tol: f64,
    },
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(w)?, parse(h)?))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Eval { config, strict, luminance_replace } => {
            let cfg = EvalConfig::from_file(&config)?;
            let report = run_benchmark(&cfg, &RunOptions { strict, luminance_replace })?;
            report.write(&cfg.output.path, cfg.output.format)?;
            let failed = report
                .rows
                .iter()
                .flat_map(|r| r.cells.values())
                .filter(|c| matches!(c, Cell::Error(_)))
                .count();
            if failed > 0 {
                log::warn!("{failed} metric cell(s) could not be computed");
            }
            println!("wrote {}", cfg.output.path.display());
        }
        Command::Extract { extractor: Extractor::PixelStats, input, out } => {
            let images = load_dir(&input)?;
            if images.is_empty() {
                bail!("no images in {}", input.display());
            }
            let features = extract_features(&PixelStatsExtractor, &images)?;
            save_cfs(&features, &out)?;
            println!("wrote {} x {} features to {}", features.len(), features.dim(), out.display());
        }
        Command::Synth { seed, n, size, mode, out } => {
            let mode = match mode {
                Mode::Smooth => SynthMode::SmoothNonclipping,
                Mode::General => SynthMode::General,
            };
            let written = synth_set(seed, n, size, mode, &out)?;
            println!("wrote {} images to {}", written.len(), out.display());
        }
        Command::Sweep { input, alphas, out } => {
            let points = saturation_sweep(&input, &alphas, &PixelStatsExtractor)?;
            fs::write(&out, sweep_csv(&points)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} points to {}", points.len(), out.display());
        }
        Command::CleanCaptions { input, out } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            fs::write(&out, clean_prompts(&text))
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Correct { gt, pred, out, alpha_min, alpha_max, alpha_tol } => {
            let search = AlphaSearch { lo: alpha_min, hi: alpha_max, tol: alpha_tol };
            let c = correct_dir(&gt, &pred, &out, &search)?;
            println!(
                "alpha*={:.6} residual={:.3e} clipped={:.4} images={}",
                c.alpha.alpha_star, c.alpha.residual, c.alpha.clipped_fraction, c.written
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
