//! Dense row-major tensors and the three primitives the scaling pipeline is
//! built from: `pad`, `strided_conv`, and `pixelshuffle`/`pixelunshuffle`.
//!
//! Everything here is shape-generic over 1 to 3 spatial dimensions. The
//! convolution uses cross-correlation indexing (no kernel flip) and only
//! evaluates positions where the whole kernel window is in bounds, so callers
//! pad first.

use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::kernel::KernelBank;
use rayon::prelude::*;

/// Row-major element strides for a shape.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut st = vec![1usize; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        st[d] = st[d + 1] * shape[d + 1];
    }
    st
}

/// Advance a row-major index odometer. Returns false once the iteration
/// space is exhausted.
pub(crate) fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < shape[d] {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// A dense row-major tensor of `f64` with 1 to 3 dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Builds a tensor from a shape and row-major data.
    ///
    /// Fails if the rank is outside 1..=3, any dimension is zero, or the
    /// data length does not match the shape product.
    pub fn new(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        check_shape(shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} needs {} elements, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(Tensor { shape: shape.to_vec(), data })
    }

    /// All-zero tensor of the given shape.
    pub fn zeros(shape: &[usize]) -> Result<Self> {
        check_shape(shape)?;
        Ok(Tensor { shape: shape.to_vec(), data: vec![0.0; shape.iter().product()] })
    }

    /// Builds a tensor by evaluating `f` at every index, row-major.
    pub fn from_fn<F: FnMut(&[usize]) -> f64>(shape: &[usize], mut f: F) -> Result<Self> {
        check_shape(shape)?;
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        loop {
            data.push(f(&idx));
            if !next_index(&mut idx, shape) {
                break;
            }
        }
        Ok(Tensor { shape: shape.to_vec(), data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Row-major data slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Element at a multi-index. Panics on a rank mismatch or an
    /// out-of-bounds index; meant for tests and small inspections.
    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        let mut flat = 0usize;
        for (d, &i) in idx.iter().enumerate() {
            assert!(i < self.shape[d], "index out of bounds");
            flat = flat * self.shape[d] + i;
        }
        self.data[flat]
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.len() > 3 {
        return Err(Error::UnsupportedRank(shape.len()));
    }
    if shape.contains(&0) {
        return Err(Error::ShapeMismatch(format!(
            "zero-length dimension in shape {:?}",
            shape
        )));
    }
    Ok(())
}

/// How out-of-range positions are filled when padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    /// Repeat the edge value (clamp).
    Replicate,
    /// Mirror without repeating the edge: `[1,2,3] -> 2|123|2`. Each side's
    /// pad must be smaller than the dimension.
    Reflect,
    /// Fill with zeros.
    Zero,
}

/// Per-dimension `(left, right)` padding amounts plus a fill mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddingSpec {
    pub amounts: Vec<(usize, usize)>,
    pub mode: PadMode,
}

/// Pads a tensor according to `spec`.
pub fn pad(x: &Tensor, spec: &PaddingSpec) -> Result<Tensor> {
    let n = x.rank();
    if spec.amounts.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "padding lists {} dimensions, tensor has {}",
            spec.amounts.len(),
            n
        )));
    }
    if spec.mode == PadMode::Reflect {
        for (d, &(l, r)) in spec.amounts.iter().enumerate() {
            if l >= x.shape[d] || r >= x.shape[d] {
                return Err(Error::InvalidPadding(format!(
                    "reflect pad ({},{}) needs both sides < {} in dimension {}",
                    l, r, x.shape[d], d
                )));
            }
        }
    }

    let out_shape: Vec<usize> = (0..n)
        .map(|d| x.shape[d] + spec.amounts[d].0 + spec.amounts[d].1)
        .collect();
    let xs = strides(&x.shape);
    let mut data = Vec::with_capacity(out_shape.iter().product());
    let mut idx = vec![0usize; n];
    loop {
        let mut flat = 0usize;
        let mut zero = false;
        for d in 0..n {
            let pos = idx[d] as i64 - spec.amounts[d].0 as i64;
            let len = x.shape[d] as i64;
            let src = if (0..len).contains(&pos) {
                pos
            } else {
                match spec.mode {
                    PadMode::Replicate => pos.clamp(0, len - 1),
                    PadMode::Reflect => {
                        if pos < 0 {
                            -pos
                        } else {
                            2 * (len - 1) - pos
                        }
                    }
                    PadMode::Zero => {
                        zero = true;
                        break;
                    }
                }
            };
            flat += src as usize * xs[d];
        }
        data.push(if zero { 0.0 } else { x.data[flat] });
        if !next_index(&mut idx, &out_shape) {
            break;
        }
    }
    Tensor::new(&out_shape, data)
}

/// A multi-channel tensor: `channels` spatial blocks of identical shape,
/// stored channel-major (channel 0's data first). This is the hidden layout
/// between the strided convolution and the pixel shuffle.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    channels: usize,
    spatial: Vec<usize>,
    data: Vec<f64>,
}

impl ChannelTensor {
    pub fn new(channels: usize, spatial: &[usize], data: Vec<f64>) -> Result<Self> {
        check_shape(spatial)?;
        if channels == 0 {
            return Err(Error::ShapeMismatch("zero channels".into()));
        }
        let len = channels * spatial.iter().product::<usize>();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "{} channels of shape {:?} need {} elements, got {}",
                channels,
                spatial,
                len,
                data.len()
            )));
        }
        Ok(ChannelTensor { channels, spatial: spatial.to_vec(), data })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn spatial(&self) -> &[usize] {
        &self.spatial
    }

    /// One channel's spatial block, row-major.
    pub fn channel(&self, c: usize) -> &[f64] {
        let len: usize = self.spatial.iter().product();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Strided cross-correlation of `x` with every kernel in `bank`, one output
/// channel per kernel.
///
/// Output positions are exactly those where each kernel's window (shifted by
/// the bank's per-dimension anchor range) stays inside `x`; per dimension
/// that is `(len - span) / stride + 1` positions, with `span` the union of
/// all kernel windows. No implicit padding happens here.
pub fn strided_conv(x: &Tensor, bank: &KernelBank) -> Result<ChannelTensor> {
    strided_conv_with(x, bank, exec::from_env())
}

pub(crate) fn strided_conv_with(
    x: &Tensor,
    bank: &KernelBank,
    par: Parallelism,
) -> Result<ChannelTensor> {
    let n = x.rank();
    if bank.rank() != n {
        return Err(Error::ShapeMismatch(format!(
            "kernel bank has rank {}, tensor has rank {}",
            bank.rank(),
            n
        )));
    }
    let span = bank.window_span();
    let stride = bank.stride();
    let mut hidden = vec![0usize; n];
    for d in 0..n {
        if x.shape[d] < span[d] {
            return Err(Error::ShapeMismatch(format!(
                "dimension {} has length {} but the kernel window spans {}",
                d, x.shape[d], span[d]
            )));
        }
        hidden[d] = (x.shape[d] - span[d]) / stride[d] + 1;
    }

    let hidden_len: usize = hidden.iter().product();
    let channels = bank.kernels().len();
    let xs = strides(&x.shape);
    // Stride in flat elements per unit step of each hidden index.
    let ss: Vec<usize> = (0..n).map(|d| stride[d] * xs[d]).collect();
    let left = bank.left_pad();

    // Flat tap offsets per channel; all non-negative because the left shift
    // absorbs the most negative anchor in the bank.
    let taps_of = |c: usize| -> Vec<usize> {
        let k = &bank.kernels()[c];
        let mut offsets = Vec::with_capacity(k.weights().len());
        let mut t = vec![0usize; n];
        loop {
            let mut flat = 0usize;
            for d in 0..n {
                let pos = left[d] as i64 + k.anchor()[d] + t[d] as i64;
                flat += pos as usize * xs[d];
            }
            offsets.push(flat);
            if !next_index(&mut t, k.extent()) {
                break;
            }
        }
        offsets
    };

    let fill = |c: usize, row0: usize, dst: &mut [f64]| {
        let offsets = taps_of(c);
        let weights = bank.kernels()[c].weights();
        let mut idx = vec![0usize; n];
        idx[0] = row0;
        for out in dst.iter_mut() {
            let base: usize = idx.iter().zip(&ss).map(|(i, s)| i * s).sum();
            let mut acc = 0.0;
            for (&o, &w) in offsets.iter().zip(weights) {
                acc += x.data[base + o] * w;
            }
            *out = acc;
            next_index(&mut idx, &hidden);
        }
    };

    let mut out = vec![0.0; channels * hidden_len];
    let parallel = par == Parallelism::Parallel && channels * hidden_len >= 4096;
    if parallel && channels > 1 {
        out.par_chunks_mut(hidden_len)
            .enumerate()
            .for_each(|(c, chunk)| fill(c, 0, chunk));
    } else if parallel && hidden[0] > 1 {
        // Single channel (pure downscale): split along the first hidden axis.
        let row_len = hidden_len / hidden[0];
        out.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, chunk)| fill(0, r, chunk));
    } else {
        for c in 0..channels {
            fill(c, 0, &mut out[c * hidden_len..(c + 1) * hidden_len]);
        }
    }
    ChannelTensor::new(channels, &hidden, out)
}

/// Rearranges channels into sub-pixel positions, growing every spatial
/// dimension by its factor.
///
/// With factors `(r_1..r_n)` and zero-based output index `(i_1..i_n)`, the
/// source channel is `sum_d (i_d mod r_d) * prod_{e>d} r_e` (first dimension
/// slowest) and the source position is `(i_d / r_d)`. Requires
/// `channels == prod r_d`.
pub fn pixelshuffle(x: &ChannelTensor, factors: &[usize]) -> Result<Tensor> {
    let n = x.spatial().len();
    if factors.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} shuffle factors for a rank-{} tensor",
            factors.len(),
            n
        )));
    }
    if factors.contains(&0) {
        return Err(Error::InvalidFactor("shuffle factor 0".into()));
    }
    let needed: usize = factors.iter().product();
    if x.channels() != needed {
        return Err(Error::ShapeMismatch(format!(
            "factors {:?} need {} channels, tensor has {}",
            factors,
            needed,
            x.channels()
        )));
    }

    let out_shape: Vec<usize> = (0..n).map(|d| factors[d] * x.spatial()[d]).collect();
    let sstrides = strides(x.spatial());
    let spat_len: usize = x.spatial().iter().product();
    let mut data = Vec::with_capacity(out_shape.iter().product());
    let mut idx = vec![0usize; n];
    loop {
        let mut c = 0usize;
        let mut src = 0usize;
        for d in 0..n {
            c = c * factors[d] + idx[d] % factors[d];
            src += (idx[d] / factors[d]) * sstrides[d];
        }
        data.push(x.data()[c * spat_len + src]);
        if !next_index(&mut idx, &out_shape) {
            break;
        }
    }
    Tensor::new(&out_shape, data)
}

/// Exact inverse of [`pixelshuffle`]: splits each spatial dimension by its
/// factor and moves the sub-pixel phases into channels. Every dimension must
/// be divisible by its factor.
pub fn pixelunshuffle(x: &Tensor, factors: &[usize]) -> Result<ChannelTensor> {
    let n = x.rank();
    if factors.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} shuffle factors for a rank-{} tensor",
            factors.len(),
            n
        )));
    }
    if factors.contains(&0) {
        return Err(Error::InvalidFactor("shuffle factor 0".into()));
    }
    let mut spatial = vec![0usize; n];
    for d in 0..n {
        if !x.shape[d].is_multiple_of(factors[d]) {
            return Err(Error::ShapeMismatch(format!(
                "dimension {} of length {} not divisible by factor {}",
                d, x.shape[d], factors[d]
            )));
        }
        spatial[d] = x.shape[d] / factors[d];
    }

    let channels: usize = factors.iter().product();
    let xs = strides(&x.shape);
    let spat_len: usize = spatial.iter().product();
    let mut data = vec![0.0; channels * spat_len];
    for c in 0..channels {
        // Decompose the channel into its per-dimension phase, first
        // dimension slowest, mirroring pixelshuffle.
        let mut phase = vec![0usize; n];
        let mut rem = c;
        for d in (0..n).rev() {
            phase[d] = rem % factors[d];
            rem /= factors[d];
        }
        let mut idx = vec![0usize; n];
        for slot in data[c * spat_len..(c + 1) * spat_len].iter_mut() {
            let mut flat = 0usize;
            for d in 0..n {
                flat += (idx[d] * factors[d] + phase[d]) * xs[d];
            }
            *slot = x.data[flat];
            next_index(&mut idx, &spatial);
        }
    }
    ChannelTensor::new(channels, &spatial, data)
}
