//! The scaling pipeline: pad, strided multi-channel convolution, pixel
//! shuffle.
//!
//! Scaling a length-N dimension by r/s pads just enough for ⌈N/s⌉ stride
//! positions, convolves with the r-phase kernel bank (one output channel per
//! phase tuple), and shuffles channels back into space, giving r·⌈N/s⌉
//! samples per dimension. The same job can be evaluated by
//! [`crate::oracle::direct_resize`] one output pixel at a time; the two
//! agree to the last bit for replicate and zero padding, which is what the
//! acceptance suite pins down.

use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::kernel::{build_bank, RationalScale, ScalingMethod};
use crate::tensor::{pad, pixelshuffle, strided_conv_with, PadMode, Tensor};

/// A scaling request: one factor per dimension, a method, and a padding
/// mode (default Replicate).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleJob {
    factors: Vec<RationalScale>,
    method: ScalingMethod,
    padding: PadMode,
}

impl ScaleJob {
    pub fn new(factors: Vec<RationalScale>, method: ScalingMethod) -> Result<Self> {
        if factors.is_empty() || factors.len() > 3 {
            return Err(Error::UnsupportedRank(factors.len()));
        }
        Ok(ScaleJob { factors, method, padding: PadMode::Replicate })
    }

    /// Same factor along every one of `rank` dimensions.
    pub fn uniform(factor: RationalScale, rank: usize, method: ScalingMethod) -> Result<Self> {
        ScaleJob::new(vec![factor; rank], method)
    }

    pub fn with_padding(mut self, mode: PadMode) -> Self {
        self.padding = mode;
        self
    }

    pub fn factors(&self) -> &[RationalScale] {
        &self.factors
    }

    pub fn method(&self) -> ScalingMethod {
        self.method
    }

    pub fn padding(&self) -> PadMode {
        self.padding
    }
}

/// Output shape for an input shape under per-dimension factors:
/// r·⌈N/s⌉ per dimension.
pub fn output_shape(in_shape: &[usize], factors: &[RationalScale]) -> Result<Vec<usize>> {
    if in_shape.len() != factors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for a rank-{} shape",
            factors.len(),
            in_shape.len()
        )));
    }
    Ok(in_shape
        .iter()
        .zip(factors)
        .map(|(&n, f)| f.out_len(n))
        .collect())
}

/// Shape of the hidden multi-channel tensor between the convolution and the
/// shuffle: `(prod r_d, [⌈N_d/s_d⌉])`.
pub fn hidden_shape(in_shape: &[usize], factors: &[RationalScale]) -> Result<(usize, Vec<usize>)> {
    if in_shape.len() != factors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for a rank-{} shape",
            factors.len(),
            in_shape.len()
        )));
    }
    let channels = factors.iter().map(|f| f.r() as usize).product();
    let spatial = in_shape
        .iter()
        .zip(factors)
        .map(|(&n, f)| f.hidden_len(n))
        .collect();
    Ok((channels, spatial))
}

/// Scales a tensor through pad, strided convolution, and pixel shuffle.
///
/// Worker threads follow `FRACSCALE_THREADS` (see the crate docs); the result
/// does not depend on the thread count.
pub fn scale(x: &Tensor, job: &ScaleJob) -> Result<Tensor> {
    scale_with(x, job, exec::from_env())
}

pub(crate) fn scale_with(x: &Tensor, job: &ScaleJob, par: Parallelism) -> Result<Tensor> {
    if x.rank() != job.factors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for a rank-{} tensor",
            job.factors.len(),
            x.rank()
        )));
    }
    let bank = build_bank(&job.factors, job.method)?;
    let spec = bank.required_padding(x.shape(), job.padding)?;
    let padded = pad(x, &spec)?;
    let hidden = strided_conv_with(&padded, &bank, par)?;
    debug_assert_eq!(
        (hidden.channels(), hidden.spatial().to_vec()),
        hidden_shape(x.shape(), &job.factors)?
    );
    let out = pixelshuffle(&hidden, &bank.shuffle_factors())?;
    debug_assert_eq!(out.shape(), output_shape(x.shape(), &job.factors)?.as_slice());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ScalingMethod::{Bilinear, Nearest};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rs(r: u64, s: u64) -> RationalScale {
        RationalScale::new(r, s).unwrap()
    }

    fn rand_tensor(shape: &[usize], seed: u64) -> Tensor {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Tensor::from_fn(shape, |_| rng.gen_range(-10.0..10.0)).unwrap()
    }

    #[test]
    fn integer_nearest_upscale_follows_the_sample_grid() {
        let x = Tensor::new(&[2], vec![10.0, 20.0]).unwrap();
        let job = ScaleJob::new(vec![rs(2, 1)], Nearest).unwrap();
        assert_eq!(scale(&x, &job).unwrap().data(), &[10.0, 10.0, 20.0, 20.0]);

        // Output m samples u = m/3: indices 0,1/3,2/3,1,... round (ties low)
        // to 0,0,1,1,1,2,..., so the first repeat block is one short and the
        // last absorbs the clamped tail.
        let x = Tensor::new(&[3], vec![1.0, 2.0, 3.0]).unwrap();
        let job = ScaleJob::new(vec![rs(3, 1)], Nearest).unwrap();
        assert_eq!(
            scale(&x, &job).unwrap().data(),
            &[1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 3.0, 3.0]
        );
    }

    #[test]
    fn bilinear_three_halves_on_a_pair() {
        let x = Tensor::new(&[2], vec![0.0, 3.0]).unwrap();
        let job = ScaleJob::new(vec![rs(3, 2)], Bilinear).unwrap();
        // Output samples sit at input coordinates 0, 2/3, 4/3; the last one
        // clamps into the replicated edge.
        assert_eq!(scale(&x, &job).unwrap().data(), &[0.0, 2.0, 3.0]);
    }

    #[test]
    fn five_by_five_grows_to_nine_by_nine() {
        for method in [Nearest, Bilinear, ScalingMethod::bicubic()] {
            let x = rand_tensor(&[5, 5], 7);
            let job = ScaleJob::uniform(rs(3, 2), 2, method).unwrap();
            assert_eq!(scale(&x, &job).unwrap().shape(), &[9, 9]);
        }
    }

    #[test]
    fn output_and_hidden_shapes() {
        assert_eq!(output_shape(&[5, 5], &[rs(3, 2), rs(3, 2)]).unwrap(), vec![9, 9]);
        assert_eq!(output_shape(&[1024], &[rs(2, 11)]).unwrap(), vec![188]);
        assert_eq!(
            hidden_shape(&[11, 11], &[rs(27, 11), rs(27, 11)]).unwrap(),
            (729, vec![1, 1])
        );
        assert!(output_shape(&[5], &[rs(3, 2), rs(3, 2)]).is_err());
    }

    #[test]
    fn identity_factor_is_bit_exact_for_every_method() {
        for method in [Nearest, Bilinear, ScalingMethod::bicubic()] {
            let x = rand_tensor(&[7, 6], 11);
            let job = ScaleJob::uniform(rs(1, 1), 2, method).unwrap();
            assert_eq!(scale(&x, &job).unwrap(), x, "{method}");
        }
    }

    #[test]
    fn per_axis_factors_scale_each_dimension_independently() {
        let x = rand_tensor(&[4, 6], 3);
        let job = ScaleJob::new(vec![rs(3, 2), rs(1, 3)], Bilinear).unwrap();
        let y = scale(&x, &job).unwrap();
        assert_eq!(y.shape(), &[6, 2]);
    }

    #[test]
    fn constant_input_stays_constant() {
        for method in [Nearest, Bilinear, ScalingMethod::bicubic()] {
            for f in [rs(3, 2), rs(2, 11), rs(27, 11), rs(1, 2)] {
                let x = Tensor::from_fn(&[9, 8], |_| 7.0).unwrap();
                let job = ScaleJob::uniform(f, 2, method).unwrap();
                let y = scale(&x, &job).unwrap();
                for &v in y.data() {
                    assert!((v - 7.0).abs() < 1e-12, "{method} {f}: {v}");
                }
            }
        }
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let x = rand_tensor(&[4, 4], 0);
        let job = ScaleJob::new(vec![rs(3, 2)], Bilinear).unwrap();
        assert!(matches!(scale(&x, &job), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn reflect_padding_fails_when_the_input_is_too_small() {
        // 27/11 bicubic on 3 samples needs a right pad of 10, far beyond
        // what a single mirror bounce can supply.
        let x = rand_tensor(&[3], 5);
        let job = ScaleJob::new(vec![rs(27, 11)], ScalingMethod::bicubic())
            .unwrap()
            .with_padding(PadMode::Reflect);
        assert!(matches!(scale(&x, &job), Err(Error::InvalidPadding(_))));
    }

    #[test]
    fn reflect_padding_works_when_feasible() {
        let x = rand_tensor(&[16], 9);
        let job = ScaleJob::new(vec![rs(3, 2)], ScalingMethod::bicubic())
            .unwrap()
            .with_padding(PadMode::Reflect);
        assert_eq!(scale(&x, &job).unwrap().shape(), &[24]);
    }

    proptest! {
        #[test]
        fn shape_contract_holds(
            n in 1usize..=40,
            r in 1u64..=8,
            s in 1u64..=8,
            seed in any::<u64>(),
        ) {
            let f = rs(r, s);
            let x = rand_tensor(&[n], seed);
            let job = ScaleJob::new(vec![f], Bilinear).unwrap();
            let y = scale(&x, &job).unwrap();
            prop_assert_eq!(y.shape(), &[f.out_len(n)]);
        }

        #[test]
        fn nearest_and_bilinear_outputs_stay_in_range(
            n in 2usize..=20,
            r in 1u64..=6,
            s in 1u64..=6,
            method_pick in 0usize..2,
            seed in any::<u64>(),
        ) {
            let method = if method_pick == 0 { Nearest } else { Bilinear };
            let x = rand_tensor(&[n, n], seed);
            let lo = x.data().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let job = ScaleJob::uniform(rs(r, s), 2, method).unwrap();
            let y = scale(&x, &job).unwrap();
            for &v in y.data() {
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }
}
