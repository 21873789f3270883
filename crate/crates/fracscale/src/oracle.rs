//! Direct per-output-pixel resizing, used as ground truth for the
//! convolutional pipeline.
//!
//! `direct_resize` never builds a kernel bank, never pads, and never strides:
//! for every output index it computes the source coordinate m·s/r in exact
//! integer arithmetic, fetches the interpolation weights for the fractional
//! part, and gathers input samples with out-of-range positions resolved
//! virtually (clamp, mirror, or zero). It shares only the weight formulas
//! (`weights_1d` / `cubic_weight`) with the pipeline, so agreement between
//! the two is evidence the pad/conv/shuffle plumbing is right, not a
//! tautology. Both sides accumulate taps in the same row-major order, which
//! makes the agreement bit-exact rather than merely close.

use crate::error::{Error, Result};
use crate::kernel::weights_into;
use crate::pipeline::{output_shape, ScaleJob};
use crate::tensor::{next_index, strides, PadMode, Tensor};

/// Resizes by evaluating the interpolation definition at every output pixel.
///
/// Same contract as [`crate::pipeline::scale`], including the error for
/// Reflect padding when a single mirror bounce cannot cover the kernel
/// overhang.
pub fn direct_resize(x: &Tensor, job: &ScaleJob) -> Result<Tensor> {
    let n = x.rank();
    if n != job.factors().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for a rank-{} tensor",
            job.factors().len(),
            n
        )));
    }
    if job.padding() == PadMode::Reflect {
        check_reflect_feasible(x.shape(), job)?;
    }

    let out_shape = output_shape(x.shape(), job.factors())?;
    let xs = strides(x.shape());
    let method = job.method();
    let mode = job.padding();

    let mut data = Vec::with_capacity(out_shape.iter().product());
    let mut m = vec![0usize; n];
    let mut wbuf = [[0.0f64; 4]; 3];
    let mut taps = [0usize; 3];
    let mut start = [0i64; 3];
    loop {
        for d in 0..n {
            let f = job.factors()[d];
            let p = m[d] as u64 * f.s();
            let (t, anchor) = weights_into((p % f.r(), f.r()), method, &mut wbuf[d]);
            taps[d] = t;
            start[d] = (p / f.r()) as i64 + anchor;
        }

        let mut acc = 0.0;
        let mut k = [0usize; 3];
        loop {
            let mut w = wbuf[0][k[0]];
            for d in 1..n {
                w *= wbuf[d][k[d]];
            }
            let mut flat = 0usize;
            let mut dead = false;
            for d in 0..n {
                match resolve(start[d] + k[d] as i64, x.shape()[d] as i64, mode) {
                    Some(q) => flat += q as usize * xs[d],
                    None => {
                        dead = true;
                        break;
                    }
                }
            }
            // A dead tap reads the zero fill; keep the add so the arithmetic
            // matches the pipeline's convolution over an actual zero pad.
            acc += w * if dead { 0.0 } else { x.data()[flat] };
            if !next_index(&mut k[..n], &taps[..n]) {
                break;
            }
        }
        data.push(acc);
        if !next_index(&mut m, &out_shape) {
            break;
        }
    }
    Tensor::new(&out_shape, data)
}

/// Maps a possibly out-of-range position to a source index, or None for the
/// zero fill.
fn resolve(pos: i64, len: i64, mode: PadMode) -> Option<i64> {
    if (0..len).contains(&pos) {
        return Some(pos);
    }
    match mode {
        PadMode::Replicate => Some(pos.clamp(0, len - 1)),
        PadMode::Zero => None,
        PadMode::Reflect => {
            let q = if pos < 0 { -pos } else { 2 * (len - 1) - pos };
            debug_assert!((0..len).contains(&q), "reflect overhang not prechecked");
            Some(q)
        }
    }
}

/// Mirrors the pipeline's padding feasibility rule for Reflect: each side's
/// virtual overhang must be smaller than the dimension. Recomputed here from
/// the phase arithmetic so the oracle does not depend on the bank builder.
fn check_reflect_feasible(shape: &[usize], job: &ScaleJob) -> Result<()> {
    let mut buf = [0.0f64; 4];
    for (d, &dim) in shape.iter().enumerate() {
        let f = job.factors()[d];
        let mut first_tap = i64::MAX;
        let mut reach = i64::MIN;
        for j in 0..f.r() {
            let p = j * f.s();
            let (t, anchor) = weights_into((p % f.r(), f.r()), job.method(), &mut buf);
            let a = (p / f.r()) as i64 + anchor;
            first_tap = first_tap.min(a);
            reach = reach.max(a + t as i64);
        }
        let len = dim as i64;
        let positions = f.hidden_len(dim) as i64;
        let left = (-first_tap).max(0);
        let right = ((positions - 1) * f.s() as i64 + reach - len).max(0);
        if left >= len || right >= len {
            return Err(Error::InvalidPadding(format!(
                "reflect pad ({},{}) needs both sides < {} in dimension {}",
                left, right, len, d
            )));
        }
    }
    Ok(())
}
