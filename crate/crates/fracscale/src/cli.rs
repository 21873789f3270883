//! Command-line front end: `scale` resizes image files, `bench` times the
//! pipeline against the oracle over a factor grid, `kernels` prints or dumps
//! a kernel bank.
//!
//! Diagnostics go to stderr; data (the scale shape line, CSV, JSON, kernel
//! matrices) goes to the chosen file or stdout. Exit code 0 means no error
//! path was taken.

use crate::error::{Error, Result};
use crate::imageio::{from_tensor, read_image, to_tensor, write_image, ImageFormat};
use crate::kernel::{build_bank, RationalScale, ScalingMethod};
use crate::metrics::{compare, CompareOpts, QualityReport};
use crate::pattern::test_pattern;
use crate::pipeline::{scale, ScaleJob};
use crate::tensor::{PadMode, Tensor};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "fracscale",
    version,
    about = "Rescale images by exact rational factors via strided convolution",
    long_about = "Rescale images by any rational factor r/s. The resize runs as \
pad -> strided multi-channel convolution -> pixel shuffle, and every result can \
be cross-checked against a direct per-pixel interpolation oracle. The \
FRACSCALE_THREADS environment variable caps worker threads (0 = all cores, \
1 = sequential)."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rescale an image file (pgm, ppm, or png, by extension).
    Scale {
        /// Scale factor "r/s", or "rh/sh,rw/sw" to scale axes differently.
        #[arg(long)]
        factor: String,
        /// Interpolation: nearest, bilinear, or bicubic.
        #[arg(long, default_value = "bilinear")]
        method: String,
        /// Border handling: replicate, reflect, or zero.
        #[arg(long, default_value = "replicate")]
        padding: String,
        /// Input image.
        input: PathBuf,
        /// Output image; the format follows its extension.
        output: PathBuf,
    },
    /// Time the pipeline against the oracle on a synthetic pattern.
    #[command(after_help = "\
CSV columns: factor,method,height,width,psnr_db,ssim,t_fcfs_s,t_oracle_s
  factor      scale factor applied to both axes (r/s)
  method      nearest | bilinear | bicubic
  height      input pattern height in pixels (square, so width matches)
  width       input pattern width in pixels
  psnr_db     PSNR between pipeline and oracle outputs; \"inf\" when identical
  ssim        SSIM between the same two outputs
  t_fcfs_s    median seconds per pipeline run (sequential)
  t_oracle_s  median seconds per oracle run
The default factor grid is a representative six-down/six-up set:
2/11 1/4 1/2 2/3 5/6 10/11 and 11/10 6/5 3/2 2/1 27/11 4/1.")]
    Bench {
        /// Comma-separated square input sizes.
        #[arg(long, default_value = "128")]
        sizes: String,
        /// Comma-separated "r/s" list; defaults to the twelve-factor grid.
        #[arg(long)]
        factors: Option<String>,
        /// Comma-separated method list.
        #[arg(long, default_value = "nearest,bilinear,bicubic")]
        methods: String,
        /// Timed repetitions per cell; the median is reported.
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print a factor's kernel bank as JSON, or one phase as a matrix.
    Kernels {
        /// Scale factor "r/s", or "rh/sh,rw/sw" (banks are 2-D).
        #[arg(long)]
        factor: String,
        /// Interpolation: nearest, bilinear, or bicubic.
        #[arg(long, default_value = "bilinear")]
        method: String,
        /// Print only this phase's weights ("j1,j2"), two decimals.
        #[arg(long)]
        phase: Option<String>,
        /// Write the bank as pretty JSON to this path.
        #[arg(long)]
        dump_kernels: Option<PathBuf>,
    },
}

/// The bench grid used when `--factors` is not given: six downscaling and
/// six upscaling factors.
pub fn default_bench_factors() -> Vec<RationalScale> {
    [(2, 11), (1, 4), (1, 2), (2, 3), (5, 6), (10, 11), (11, 10), (6, 5), (3, 2), (2, 1), (27, 11), (4, 1)]
        .into_iter()
        .map(|(r, s)| RationalScale::new(r, s).expect("static factors are valid"))
        .collect()
}

/// Parses argv, runs the requested command, and maps errors to exit code 1
/// (with the message on stderr).
pub fn run() -> i32 {
    let cli = Cli::parse();
    match check_threads_env().and_then(|()| dispatch(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Writes data output to stdout, treating a closed pipe as a normal end of
/// transmission (so `fracscale kernels | head` exits cleanly).
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

/// The library treats a garbled FRACSCALE_THREADS as "all cores"; the CLI is
/// stricter and refuses to run with one.
fn check_threads_env() -> Result<()> {
    match std::env::var(crate::exec::THREADS_ENV) {
        Err(_) => Ok(()),
        Ok(v) if v.trim().parse::<usize>().is_ok() => Ok(()),
        Ok(v) => Err(Error::InvalidArgument(format!(
            "{}={v:?} is not a thread count",
            crate::exec::THREADS_ENV
        ))),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Scale { factor, method, padding, input, output } => {
            cmd_scale(&factor, &method, &padding, &input, &output)
        }
        Command::Bench { sizes, factors, methods, reps, csv } => {
            cmd_bench(&sizes, factors.as_deref(), &methods, reps, csv.as_deref())
        }
        Command::Kernels { factor, method, phase, dump_kernels } => {
            cmd_kernels(&factor, &method, phase.as_deref(), dump_kernels.as_deref())
        }
    }
}

fn parse_factor_pair(text: &str) -> Result<Vec<RationalScale>> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [one] => {
            let f: RationalScale = one.parse()?;
            Ok(vec![f, f])
        }
        [h, w] => Ok(vec![h.parse()?, w.parse()?]),
        _ => Err(Error::InvalidFactor(format!(
            "{text:?}: expected \"r/s\" or \"rh/sh,rw/sw\""
        ))),
    }
}

fn parse_padding(text: &str) -> Result<PadMode> {
    match text.trim().to_ascii_lowercase().as_str() {
        "replicate" => Ok(PadMode::Replicate),
        "reflect" => Ok(PadMode::Reflect),
        "zero" => Ok(PadMode::Zero),
        other => Err(Error::InvalidArgument(format!(
            "unknown padding {other:?} (expected replicate, reflect, or zero)"
        ))),
    }
}

fn cmd_scale(factor: &str, method: &str, padding: &str, input: &Path, output: &Path) -> Result<()> {
    let factors = parse_factor_pair(factor)?;
    let method = ScalingMethod::from_name(method)?;
    let mode = parse_padding(padding)?;
    let out_format = ImageFormat::from_path(output)?;

    let img = read_image(input)?;
    let t = to_tensor(&img);
    let job = ScaleJob::new(factors, method)?.with_padding(mode);

    let scaled = match t.rank() {
        2 => scale(&t, &job)?,
        _ => {
            // RGB: the channel axis is never scaled; run each plane through
            // the same 2-D job.
            let (c, h, w) = (t.shape()[0], t.shape()[1], t.shape()[2]);
            let plane = h * w;
            let mut out_data = Vec::new();
            let mut out_hw = [0usize; 2];
            for ch in 0..c {
                let p = Tensor::new(&[h, w], t.data()[ch * plane..(ch + 1) * plane].to_vec())?;
                let y = scale(&p, &job)?;
                out_hw.copy_from_slice(y.shape());
                out_data.extend_from_slice(y.data());
            }
            Tensor::new(&[c, out_hw[0], out_hw[1]], out_data)?
        }
    };

    let out_img = from_tensor(&scaled)?;
    write_image(&out_img, output, out_format)?;
    emit(&format!(
        "({},{}) -> ({},{})\n",
        img.height(),
        img.width(),
        out_img.height(),
        out_img.width()
    ))
}

fn cmd_bench(
    sizes: &str,
    factors: Option<&str>,
    methods: &str,
    reps: usize,
    csv: Option<&Path>,
) -> Result<()> {
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad size {s:?}")))
        })
        .collect::<Result<_>>()?;
    let factors: Vec<RationalScale> = match factors {
        Some(list) => list.split(',').map(|f| f.parse()).collect::<Result<_>>()?,
        None => default_bench_factors(),
    };
    let methods: Vec<ScalingMethod> = methods
        .split(',')
        .map(ScalingMethod::from_name)
        .collect::<Result<_>>()?;
    if sizes.is_empty() || factors.is_empty() || methods.is_empty() {
        return Err(Error::InvalidArgument("empty bench grid".into()));
    }

    let mut lines = vec![QualityReport::CSV_HEADER.to_string()];
    eprintln!(
        "{:>6} {:>7} {:>9} {:>10} {:>12} {:>12} {:>12}",
        "size", "factor", "method", "psnr_db", "ssim", "t_fcfs_s", "t_oracle_s"
    );
    for &size in &sizes {
        let x = test_pattern(size, size);
        for &f in &factors {
            for &m in &methods {
                let job = ScaleJob::uniform(f, 2, m)?;
                let rep = compare(&x, &job, &CompareOpts { reps, max_value: 1.0 })?;
                eprintln!(
                    "{:>6} {:>7} {:>9} {:>10.2} {:>12.9} {:>12.6} {:>12.6}",
                    size,
                    f.to_string(),
                    m.name(),
                    rep.psnr_db,
                    rep.ssim,
                    rep.elapsed_fcfs_s,
                    rep.elapsed_oracle_s
                );
                lines.push(rep.csv_row());
            }
        }
    }

    let doc = lines.join("\n") + "\n";
    match csv {
        Some(path) => {
            std::fs::write(path, doc)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => emit(&doc),
    }
}

fn cmd_kernels(
    factor: &str,
    method: &str,
    phase: Option<&str>,
    dump: Option<&Path>,
) -> Result<()> {
    let factors = parse_factor_pair(factor)?;
    let method = ScalingMethod::from_name(method)?;
    let bank = build_bank(&factors, method)?;
    let json = serde_json::to_string_pretty(&bank.to_json())
        .expect("kernel banks are plain finite data");

    if let Some(path) = dump {
        std::fs::write(path, json.clone() + "\n")?;
        eprintln!("wrote {}", path.display());
    }
    match phase {
        Some(spec) => {
            let idx: Vec<usize> = spec
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad phase index {p:?}")))
                })
                .collect::<Result<_>>()?;
            let k = bank.kernel_at(&idx).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "phase {spec:?} out of range for factors {factor:?}"
                ))
            })?;
            eprintln!("phase {:?}  anchor {:?}  extent {:?}", k.phase(), k.anchor(), k.extent());
            let cols = *k.extent().last().expect("kernels have at least one dim");
            let mut matrix = String::new();
            for row in k.weights().chunks(cols) {
                let cells: Vec<String> = row.iter().map(|w| format!("{w:.2}")).collect();
                matrix.push_str(&cells.join(" "));
                matrix.push('\n');
            }
            emit(&matrix)?;
        }
        None if dump.is_none() => emit(&format!("{json}\n"))?,
        None => {}
    }
    Ok(())
}
