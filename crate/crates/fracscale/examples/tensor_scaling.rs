//! Scale raw tensors: a 1-D signal, a 2-D grid with per-axis factors, and a
//! 3-D volume, plus the three border modes side by side.
//!
//!     cargo run --example tensor_scaling

use fracscale::{scale, PadMode, RationalScale, ScaleJob, ScalingMethod, Tensor};

fn main() -> fracscale::Result<()> {
    // A ramp, stretched to three halves its length.
    let x = Tensor::new(&[4], vec![0.0, 1.0, 2.0, 3.0])?;
    let job = ScaleJob::new(vec![RationalScale::new(3, 2)?], ScalingMethod::Bilinear)?;
    println!("1-D ramp {:?} at 3/2 -> {:?}", x.data(), scale(&x, &job)?.data());

    // Different factors per axis: double the rows, third the columns.
    let grid = Tensor::from_fn(&[4, 6], |i| (i[0] * 6 + i[1]) as f64)?;
    let job = ScaleJob::new(
        vec![RationalScale::new(2, 1)?, RationalScale::new(1, 3)?],
        ScalingMethod::Nearest,
    )?;
    let y = scale(&grid, &job)?;
    println!("2-D {:?} at (2/1, 1/3) -> {:?}", grid.shape(), y.shape());
    for r in 0..y.shape()[0] {
        println!("  {:?}", &y.data()[r * y.shape()[1]..(r + 1) * y.shape()[1]]);
    }

    // Volumes work the same way; each axis gets r * ceil(n / s) samples.
    let vol = Tensor::from_fn(&[3, 4, 5], |i| (i[0] + i[1] + i[2]) as f64)?;
    let job = ScaleJob::uniform(RationalScale::new(2, 1)?, 3, ScalingMethod::Bilinear)?;
    println!("3-D {:?} at 2/1 -> {:?}", vol.shape(), scale(&vol, &job)?.shape());

    // Border handling only matters where a kernel reads past the edge.
    let edge = Tensor::new(&[3], vec![8.0, 8.0, 8.0])?;
    for mode in [PadMode::Replicate, PadMode::Reflect, PadMode::Zero] {
        let job = ScaleJob::new(vec![RationalScale::new(2, 1)?], ScalingMethod::Bilinear)?
            .with_padding(mode);
        println!("constant 8s at 2/1, {mode:?}: {:?}", scale(&edge, &job)?.data());
    }
    Ok(())
}
