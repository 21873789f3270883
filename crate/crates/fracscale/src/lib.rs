//! Fractional image scaling as a convolution pipeline.
//!
//! Resizing by a rational factor r/s usually means sampling the input at
//! fractional positions, one output pixel at a time. This crate runs the
//! same computation as three dense tensor ops instead:
//!
//! 1. pad the input (replicate, reflect, or zero),
//! 2. slide one multi-output-channel convolution over it with stride s,
//! 3. rearrange the channels back into space with an r-fold pixel shuffle.
//!
//! Each output channel holds one "phase": one of the r distinct fractional
//! positions the resampler visits before the pattern repeats. Because the
//! kernel weights are precomputed per phase, the pipeline output matches a
//! direct per-pixel interpolator ([`direct_resize`]) bit for bit, and that
//! oracle ships in the crate so the claim stays checkable.
//!
//! An input axis of length n scaled by r/s comes out at r * ceil(n / s).
//!
//! ```
//! use fracscale::{scale, RationalScale, ScaleJob, ScalingMethod, Tensor};
//!
//! let x = Tensor::from_fn(&[10, 20], |i| (i[0] * 20 + i[1]) as f64).unwrap();
//! let job = ScaleJob::uniform(RationalScale::new(1, 2).unwrap(), 2, ScalingMethod::Bilinear).unwrap();
//! let y = scale(&x, &job).unwrap();
//! assert_eq!(y.shape(), &[5, 10]);
//! ```
//!
//! The `fracscale` binary fronts the same library: `scale` for image files,
//! `bench` for pipeline-vs-oracle timing grids, `kernels` to inspect the
//! generated filter banks.

mod error;
mod exec;
mod imageio;
mod kernel;
mod metrics;
mod oracle;
mod pattern;
mod pipeline;
mod tensor;

pub mod cli;

pub use error::{Error, Result};
pub use imageio::{
    from_tensor, read_image, to_tensor, write_image, Image, ImageFormat,
};
pub use kernel::{
    build_bank, cubic_weight, phase_fraction, weights_1d, CubicParam, KernelBank, PhaseKernel,
    RationalScale, ScalingMethod,
};
pub use metrics::{compare, psnr, ssim, ssim_naive, CompareOpts, QualityReport};
pub use oracle::direct_resize;
pub use pattern::{test_pattern, test_pattern_image};
pub use pipeline::{hidden_shape, output_shape, scale, ScaleJob};
pub use tensor::{
    pad, pixelshuffle, pixelunshuffle, strided_conv, ChannelTensor, PadMode, PaddingSpec, Tensor,
};
