//! Image sameness metrics (PSNR, SSIM) and the pipeline-vs-oracle compare
//! harness that the bench command is built on.
//!
//! SSIM comes in two independent implementations: the fast separable one
//! (`ssim`) and a brute-force double loop (`ssim_naive`) kept as a check on
//! the fast path. Both use the standard 11×11 Gaussian window with σ = 1.5
//! and only evaluate positions where the window fits entirely (valid mode),
//! so inputs must be at least 11×11.

use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::oracle::direct_resize;
use crate::pipeline::{scale_with, ScaleJob};
use crate::tensor::Tensor;
use crate::kernel::{RationalScale, ScalingMethod};
use std::hint::black_box;
use std::time::Instant;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Peak signal-to-noise ratio in dB: 10·log10(max² / MSE). Identical inputs
/// give +∞ (serialized as "inf" in CSV rows).
pub fn psnr(a: &Tensor, b: &Tensor, max_value: f64) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "psnr inputs {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    check_max(max_value)?;
    let mse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max_value * max_value / mse).log10())
}

/// Structural similarity over an 11×11 Gaussian window (σ = 1.5), mean of
/// the valid-mode SSIM map. Requires rank-2 inputs of identical shape, both
/// dimensions ≥ 11. `ssim(a, a, m)` is exactly 1.0.
pub fn ssim(a: &Tensor, b: &Tensor, max_value: f64) -> Result<f64> {
    let (h, w) = check_ssim_pair(a, b, max_value)?;
    let g = gaussian_window();

    let pa = a.data();
    let pb = b.data();
    let mut aa = vec![0.0; pa.len()];
    let mut bb = vec![0.0; pa.len()];
    let mut ab = vec![0.0; pa.len()];
    for i in 0..pa.len() {
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
    }

    let mua = valid_filter(pa, h, w, &g);
    let mub = valid_filter(pb, h, w, &g);
    let eaa = valid_filter(&aa, h, w, &g);
    let ebb = valid_filter(&bb, h, w, &g);
    let eab = valid_filter(&ab, h, w, &g);

    let (c1, c2) = stabilizers(max_value);
    let mut sum = 0.0;
    for i in 0..mua.len() {
        let (ma, mb) = (mua[i], mub[i]);
        let va = eaa[i] - ma * ma;
        let vb = ebb[i] - mb * mb;
        let vab = eab[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * vab + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        sum += num / den;
    }
    Ok(sum / mua.len() as f64)
}

/// Reference SSIM: the same statistic accumulated window by window with
/// plain double loops. Slow on purpose; exists to cross-check [`ssim`].
pub fn ssim_naive(a: &Tensor, b: &Tensor, max_value: f64) -> Result<f64> {
    let (h, w) = check_ssim_pair(a, b, max_value)?;
    let g = gaussian_window();
    let pa = a.data();
    let pb = b.data();
    let (c1, c2) = stabilizers(max_value);

    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..=h - WINDOW {
        for x in 0..=w - WINDOW {
            let (mut ma, mut mb) = (0.0, 0.0);
            let (mut eaa, mut ebb, mut eab) = (0.0, 0.0, 0.0);
            for i in 0..WINDOW {
                for j in 0..WINDOW {
                    let wt = g[i] * g[j];
                    let va = pa[(y + i) * w + (x + j)];
                    let vb = pb[(y + i) * w + (x + j)];
                    ma += wt * va;
                    mb += wt * vb;
                    eaa += wt * va * va;
                    ebb += wt * vb * vb;
                    eab += wt * va * vb;
                }
            }
            let sa = eaa - ma * ma;
            let sb = ebb - mb * mb;
            let sab = eab - ma * mb;
            sum += ((2.0 * ma * mb + c1) * (2.0 * sab + c2))
                / ((ma * ma + mb * mb + c1) * (sa + sb + c2));
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

fn check_max(max_value: f64) -> Result<()> {
    if !max_value.is_finite() || max_value <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "max_value {max_value} must be finite and positive"
        )));
    }
    Ok(())
}

fn check_ssim_pair(a: &Tensor, b: &Tensor, max_value: f64) -> Result<(usize, usize)> {
    check_max(max_value)?;
    if a.rank() != 2 || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "ssim needs two rank-2 tensors of one shape, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (h, w) = (a.shape()[0], a.shape()[1]);
    if h < WINDOW || w < WINDOW {
        return Err(Error::ShapeMismatch(format!(
            "ssim window is {WINDOW}x{WINDOW}, image is {h}x{w}"
        )));
    }
    Ok((h, w))
}

fn stabilizers(max_value: f64) -> (f64, f64) {
    ((K1 * max_value).powi(2), (K2 * max_value).powi(2))
}

fn gaussian_window() -> [f64; WINDOW] {
    let mut g = [0.0; WINDOW];
    let mid = (WINDOW / 2) as f64;
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - mid;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = g.iter().sum();
    for v in g.iter_mut() {
        *v /= sum;
    }
    g
}

/// Valid-mode separable filtering: rows then columns, output
/// (h-10) × (w-10).
fn valid_filter(plane: &[f64], h: usize, w: usize, g: &[f64; WINDOW]) -> Vec<f64> {
    let vw = w - WINDOW + 1;
    let vh = h - WINDOW + 1;
    let mut rows = vec![0.0; h * vw];
    for y in 0..h {
        for x in 0..vw {
            let mut acc = 0.0;
            for (i, &gi) in g.iter().enumerate() {
                acc += gi * plane[y * w + x + i];
            }
            rows[y * vw + x] = acc;
        }
    }
    let mut out = vec![0.0; vh * vw];
    for y in 0..vh {
        for x in 0..vw {
            let mut acc = 0.0;
            for (i, &gi) in g.iter().enumerate() {
                acc += gi * rows[(y + i) * vw + x];
            }
            out[y * vw + x] = acc;
        }
    }
    out
}

/// Knobs for [`compare`]: timing repetitions and the metric peak value.
#[derive(Debug, Clone, Copy)]
pub struct CompareOpts {
    pub reps: usize,
    pub max_value: f64,
}

impl Default for CompareOpts {
    fn default() -> Self {
        CompareOpts { reps: 100, max_value: 1.0 }
    }
}

/// One pipeline-vs-oracle measurement; serializes to a CSV row.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub factors: Vec<RationalScale>,
    pub method: ScalingMethod,
    pub height: usize,
    pub width: usize,
    pub psnr_db: f64,
    pub ssim: f64,
    pub elapsed_fcfs_s: f64,
    pub elapsed_oracle_s: f64,
}

impl QualityReport {
    pub const CSV_HEADER: &'static str =
        "factor,method,height,width,psnr_db,ssim,t_fcfs_s,t_oracle_s";

    /// The row matching [`Self::CSV_HEADER`]. A uniform factor prints as one
    /// "r/s"; mixed per-axis factors are joined with 'x' so the field stays
    /// comma-free. +∞ PSNR prints as "inf".
    pub fn csv_row(&self) -> String {
        let factor = if self.factors.windows(2).all(|p| p[0] == p[1]) {
            self.factors[0].to_string()
        } else {
            self.factors
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join("x")
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            factor,
            self.method.name(),
            self.height,
            self.width,
            self.psnr_db,
            self.ssim,
            self.elapsed_fcfs_s,
            self.elapsed_oracle_s
        )
    }
}

/// Runs the convolutional pipeline and the oracle on the same job, reporting
/// PSNR/SSIM between the two outputs and the median wall time of each over
/// `opts.reps` timed runs (after one untimed warm-up per side).
///
/// The pipeline is forced onto its sequential path so the numbers measure
/// the algorithm rather than the thread pool. The input must be rank-2 and
/// large enough that the outputs fit the 11×11 SSIM window.
pub fn compare(x: &Tensor, job: &ScaleJob, opts: &CompareOpts) -> Result<QualityReport> {
    if x.rank() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "compare works on rank-2 inputs, got rank {}",
            x.rank()
        )));
    }
    if opts.reps == 0 {
        return Err(Error::InvalidArgument("compare needs reps >= 1".into()));
    }

    // Warm-up runs double as the outputs the metrics are computed on.
    let y_fcfs = scale_with(x, job, Parallelism::Sequential)?;
    let y_oracle = direct_resize(x, job)?;
    let psnr_db = psnr(&y_fcfs, &y_oracle, opts.max_value)?;
    let ssim_v = ssim(&y_fcfs, &y_oracle, opts.max_value)?;

    let mut t_fcfs = Vec::with_capacity(opts.reps);
    for _ in 0..opts.reps {
        let t0 = Instant::now();
        black_box(scale_with(black_box(x), job, Parallelism::Sequential)?);
        t_fcfs.push(t0.elapsed().as_secs_f64());
    }
    let mut t_oracle = Vec::with_capacity(opts.reps);
    for _ in 0..opts.reps {
        let t0 = Instant::now();
        black_box(direct_resize(black_box(x), job)?);
        t_oracle.push(t0.elapsed().as_secs_f64());
    }

    Ok(QualityReport {
        factors: job.factors().to_vec(),
        method: job.method(),
        height: x.shape()[0],
        width: x.shape()[1],
        psnr_db,
        ssim: ssim_v,
        elapsed_fcfs_s: median(t_fcfs),
        elapsed_oracle_s: median(t_oracle),
    })
}

/// Median of a non-empty sample list; even counts average the middle two.
pub(crate) fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}
