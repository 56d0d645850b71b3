mod commands;
mod error;
mod overlay;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "lesioncam",
    version,
    about = "Lesion boxes from class activation maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CAM from features and class weights; writes a normalized, resampled map
    Cam {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        map: MapArgs,
    },
    /// GradCAM from features and class-score gradients
    Gradcam {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        grads: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Threshold, open, label and filter maps into scored boxes
    Detect {
        /// A map file or a directory of `*.camt` maps
        #[arg(long)]
        map: PathBuf,
        /// Output CSV (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Ground-truth boxes from a directory of binary PGM lesion masks
    ConvertMasks {
        #[arg(long)]
        masks_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AP and success rate of detections against ground truth
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        det: PathBuf,
        /// Also write the report as TOML
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Draw ground truth (green) and detections (red) over a PGM image
    Overlay {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long)]
        det: Option<PathBuf>,
    },
    /// Evaluate a grid of floor thresholds and minimum box areas
    Sweep {
        /// Directory of `*.camt` maps
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.2")]
        t_floor: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "25")]
        min_area: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        open_kernel: usize,
        #[arg(long, default_value_t = 3)]
        open_iters: usize,
        #[arg(long, default_value_t = 1.0)]
        max_area_frac: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct MapArgs {
    /// Clamp negative evidence to zero
    #[arg(long)]
    relu: bool,
    #[arg(long, default_value_t = lesioncam::pipeline::DEFAULT_MAP_SIZE)]
    width: usize,
    #[arg(long, default_value_t = lesioncam::pipeline::DEFAULT_MAP_SIZE)]
    height: usize,
}

#[derive(Args, Debug, Clone)]
struct DetectArgs {
    #[arg(long, default_value_t = 0.2)]
    t_floor: f64,
    #[arg(long, default_value_t = 3)]
    open_kernel: usize,
    #[arg(long, default_value_t = 3)]
    open_iters: usize,
    #[arg(long, default_value_t = 25)]
    min_area: u64,
    #[arg(long, default_value_t = 1.0)]
    max_area_frac: f64,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    #[arg(long, default_value_t = 0.001)]
    iou: f64,
    #[arg(long, default_value_t = 1.0)]
    coverage: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    use lesioncam::{DetectConfig, EvalConfig, MapSize, SizeFilter, ThresholdConfig};

    let detect_config =
        |t_floor, kernel, iters, min_area, max_frac| -> Result<DetectConfig, CliError> {
            Ok(DetectConfig {
                threshold: ThresholdConfig::new(t_floor, kernel, iters)?,
                size_filter: SizeFilter::new(min_area, max_frac)?,
            })
        };

    match cli.command {
        Command::Cam {
            features,
            weights,
            out,
            map,
        } => {
            let size = MapSize::new(map.height, map.width)?;
            commands::cam(&features, &weights, &out, map.relu, size)
        }
        Command::Gradcam {
            features,
            grads,
            out,
            map,
        } => {
            let size = MapSize::new(map.height, map.width)?;
            commands::gradcam(&features, &grads, &out, map.relu, size)
        }
        Command::Detect { map, out, detect } => {
            let cfg = detect_config(
                detect.t_floor,
                detect.open_kernel,
                detect.open_iters,
                detect.min_area,
                detect.max_area_frac,
            )?;
            commands::detect(&map, out.as_deref(), &cfg)
        }
        Command::ConvertMasks { masks_dir, out } => {
            commands::convert_masks(&masks_dir, out.as_deref())
        }
        Command::Eval { gt, det, out, eval } => {
            let cfg = EvalConfig::new(eval.iou, eval.coverage)?;
            commands::eval(&gt, &det, out.as_deref(), &cfg)
        }
        Command::Overlay {
            image,
            out,
            gt,
            det,
        } => commands::overlay(&image, &out, gt.as_deref(), det.as_deref()),
        Command::Sweep {
            map,
            gt,
            t_floor,
            min_area,
            open_kernel,
            open_iters,
            max_area_frac,
            out,
            eval,
        } => {
            let mut grid = Vec::new();
            for &t in &t_floor {
                for &a in &min_area {
                    grid.push(detect_config(t, open_kernel, open_iters, a, max_area_frac)?);
                }
            }
            let cfg = EvalConfig::new(eval.iou, eval.coverage)?;
            commands::sweep(&map, &gt, grid, &cfg, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lesioncam: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
