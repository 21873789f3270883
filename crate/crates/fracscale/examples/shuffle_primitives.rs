//! Run the three pipeline stages by hand on a tiny input and show that the
//! result matches the one-call `scale`. Useful for seeing what the hidden
//! channel tensor actually holds: one downsampled plane per sub-pixel phase.
//!
//!     cargo run --example shuffle_primitives

use fracscale::{
    build_bank, pad, pixelshuffle, pixelunshuffle, scale, strided_conv, RationalScale, ScaleJob,
    ScalingMethod, Tensor,
};

fn main() -> fracscale::Result<()> {
    let x = Tensor::new(&[4], vec![0.0, 2.0, 4.0, 6.0])?;
    let f = RationalScale::new(3, 2)?;
    let job = ScaleJob::new(vec![f], ScalingMethod::Bilinear)?;

    // Stage 1: pad so every stride window and kernel tap lands in bounds.
    let bank = build_bank(&[f], ScalingMethod::Bilinear)?;
    let spec = bank.required_padding(x.shape(), job.padding())?;
    let padded = pad(&x, &spec)?;
    println!("input  {:?}", x.data());
    println!("padded {:?} (amounts {:?})", padded.data(), spec.amounts);

    // Stage 2: one strided convolution, r output channels per dimension.
    let hidden = strided_conv(&padded, &bank)?;
    for c in 0..hidden.channels() {
        println!("phase {c}: {:?}", hidden.channel(c));
    }

    // Stage 3: interleave the phases back into a spatial axis.
    let y = pixelshuffle(&hidden, &bank.shuffle_factors())?;
    println!("shuffled {:?}", y.data());
    assert_eq!(y, scale(&x, &job)?, "staged result must match the one-call path");

    // The shuffle is a pure permutation; unshuffle recovers the phases.
    let back = pixelunshuffle(&y, &bank.shuffle_factors())?;
    assert_eq!(back.data(), hidden.data());
    println!("pixelunshuffle(pixelshuffle(h)) == h");
    Ok(())
}
