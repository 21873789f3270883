//! Resize an image file end to end: write a synthetic source image, scale it
//! by 3/2 with bicubic interpolation, and save the result next to it.
//!
//!     cargo run --example scale_image -- [out_dir]
//!
//! Grayscale images map to rank-2 tensors and scale directly. RGB images map
//! to a [3, h, w] tensor whose channel axis is never scaled; run each plane
//! through the same job (the `fracscale scale` subcommand does exactly that).

use fracscale::{
    from_tensor, read_image, scale, test_pattern_image, to_tensor, write_image, ImageFormat,
    RationalScale, ScaleJob, ScalingMethod,
};
use std::path::Path;

fn main() -> fracscale::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    let src_path = Path::new(&dir).join("pattern.pgm");
    let dst_path = Path::new(&dir).join("pattern_3over2.pgm");

    write_image(&test_pattern_image(96, 128), &src_path, ImageFormat::Pgm)?;

    let img = read_image(&src_path)?;
    let x = to_tensor(&img);
    let job = ScaleJob::uniform(RationalScale::new(3, 2)?, 2, ScalingMethod::bicubic())?;
    let y = scale(&x, &job)?;
    write_image(&from_tensor(&y)?, &dst_path, ImageFormat::Pgm)?;

    println!(
        "{} ({}x{}) -> {} ({}x{})",
        src_path.display(),
        x.shape()[0],
        x.shape()[1],
        dst_path.display(),
        y.shape()[0],
        y.shape()[1]
    );
    Ok(())
}
