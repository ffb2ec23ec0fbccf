//! `floodseg`: run the segmentation pipeline on a Netpbm image, dump the
//! stages, write a JSON report and optionally time repeated runs.

mod bench;
mod report;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use floodseg::morphology::StructuringElement;
use floodseg::pipeline::{
    compare_outcomes, run_pipeline, Mode, PipelineConfig, PipelineError, PipelineResult,
};
use floodseg::raster::{read_image, write_image, RasterError};
use floodseg::watershed::{colorize_labels, Connectivity};

use crate::bench::BenchStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Threshold,
    NoThreshold,
    Both,
}

impl ModeArg {
    fn modes(self) -> &'static [Mode] {
        match self {
            ModeArg::Threshold => &[Mode::WithThreshold],
            ModeArg::NoThreshold => &[Mode::WithoutThreshold],
            ModeArg::Both => &Mode::ALL,
        }
    }
}

/// Threshold, gradient-mask, dilate and watershed a PGM/PPM image.
#[derive(Debug, Parser)]
#[command(name = "floodseg", version)]
struct Args {
    /// Input image (P2, P3, P5 or P6, maxval 255)
    #[arg(long)]
    input: PathBuf,

    /// Which pipeline variant(s) to run
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,

    /// Directory for stage dumps
    #[arg(long, default_value = "./out")]
    out_dir: PathBuf,

    /// Pixel adjacency for the watershed: 4 or 8
    #[arg(long, default_value = "4")]
    connectivity: Connectivity,

    /// Structuring element: `square3` or `offsets:(dx,dy);(dx,dy);...`
    #[arg(long, default_value = "square3")]
    se: StructuringElement,

    /// Multiplier on the gradient-mask threshold
    #[arg(long, default_value = "1.0", value_parser = parse_fudge)]
    fudge: f64,

    /// Fixed binarization level used without thresholding
    #[arg(long, default_value = "127")]
    fixed_t: u8,

    /// Write s0..s5 images under OUT_DIR/threshold and OUT_DIR/no-threshold
    #[arg(long)]
    dump_stages: bool,

    /// Write a JSON report to this path
    #[arg(long)]
    report_json: Option<PathBuf>,

    /// Time this many runs per mode (I/O excluded)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    bench: Option<u32>,

    /// Seed for the label colours in s5_labels.ppm
    #[arg(long, default_value = "1")]
    color_seed: u64,
}

fn parse_fudge(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

/// Failure with its exit status.
enum Failure {
    Usage(String),
    Io(String),
    Degenerate(String),
}

impl Failure {
    fn io(what: impl Display, err: impl Display) -> Self {
        Failure::Io(format!("{what}: {err}"))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Degenerate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Degenerate(m) => m,
        }
    }
}

fn degenerate(mode: Mode, err: &PipelineError) -> Failure {
    Failure::Degenerate(format!("mode {}: {err}", mode.name()))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let reason = rendered
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error: {reason}");
            eprintln!("Usage: floodseg --input <INPUT> [OPTIONS]  (see --help)");
            return ExitCode::from(1);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    let base = PipelineConfig {
        mode: Mode::WithThreshold,
        connectivity: args.connectivity,
        se: args.se.clone(),
        fudge: args.fudge,
        fixed_binarize_t: args.fixed_t,
        color_seed: args.color_seed,
    };
    base.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let input = read_image(&args.input).map_err(|e| Failure::io(args.input.display(), e))?;

    let modes = args.mode.modes();
    let outcomes: Vec<(Mode, Result<PipelineResult, PipelineError>)> = modes
        .iter()
        .map(|&m| (m, run_pipeline(&input, &base.clone().with_mode(m))))
        .collect();

    if args.dump_stages {
        for (mode, outcome) in &outcomes {
            if let Ok(r) = outcome {
                dump_stages(&args.out_dir.join(mode.name()), r, args.color_seed)?;
            }
        }
    }

    // A degenerate run ends the command; the first one in mode order is reported.
    if let Some((mode, Err(e))) = outcomes.iter().find(|(_, o)| o.is_err()) {
        return Err(degenerate(*mode, e));
    }
    let results: Vec<&PipelineResult> = outcomes
        .iter()
        .filter_map(|(_, o)| o.as_ref().ok())
        .collect();

    let mut benches: Vec<Option<BenchStats>> = vec![None; results.len()];
    if let Some(reps) = args.bench {
        for (slot, (mode, _)) in benches.iter_mut().zip(&outcomes) {
            let stats = bench::bench(&input, &base.clone().with_mode(*mode), reps as usize)
                .map_err(|e| degenerate(*mode, &e))?;
            println!(
                "bench {}: runs={} min={:.3}ms median={:.3}ms mean={:.3}ms max={:.3}ms",
                mode.name(),
                stats.samples.len(),
                stats.min(),
                stats.median(),
                stats.mean(),
                stats.max()
            );
            *slot = Some(stats);
        }
    }

    for r in &results {
        let s = r.summary();
        let t = s
            .threshold
            .map_or_else(|| format!("fixed {}", args.fixed_t), |t| t.to_string());
        println!(
            "{}: threshold={} basins={} watershed_pixels={} total={:.3}ms",
            s.mode.name(),
            t,
            s.basin_count,
            s.watershed_pixels,
            s.total_ms
        );
    }
    let agreement = if let [(_, a), (_, b)] = &outcomes[..] {
        compare_outcomes(a, b).agreement
    } else {
        None
    };
    if let Some(a) = agreement {
        println!("agreement: {a:.6}");
    }

    if let Some(path) = &args.report_json {
        let doc = report::build(args.mode == ModeArg::Both, &results, &benches, agreement);
        let text = report::to_json(&doc);
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir.display(), e))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::io(path.display(), e))
}

fn dump_stages(dir: &Path, r: &PipelineResult, seed: u64) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir.display(), e))?;
    let save = |name: &str, res: Result<(), RasterError>| {
        res.map_err(|e| Failure::io(dir.join(name).display(), e))
    };
    save(
        "s0_gray.pgm",
        write_image(&r.s0_gray, dir.join("s0_gray.pgm")),
    )?;
    save(
        "s1_binary.pgm",
        write_image(&r.s1_binary, dir.join("s1_binary.pgm")),
    )?;
    save("s2_bgm.pgm", write_image(&r.s2_bgm, dir.join("s2_bgm.pgm")))?;
    save(
        "s3_gradmag.pgm",
        write_image(&r.s3_gradmag, dir.join("s3_gradmag.pgm")),
    )?;
    save(
        "s4_dilated.pgm",
        write_image(&r.s4_dilated, dir.join("s4_dilated.pgm")),
    )?;
    let colored = colorize_labels(&r.s5_labels, seed);
    save(
        "s5_labels.ppm",
        write_image(&colored, dir.join("s5_labels.ppm")),
    )
}
