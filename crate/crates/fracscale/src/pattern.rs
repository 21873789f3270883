//! Deterministic synthetic test image: a radial gradient crossed with a
//! checkerboard, so it has both smooth ramps and hard edges to exercise the
//! interpolators. Used by the bench command, the examples, and the tests.

use crate::imageio::{from_tensor, Image};
use crate::tensor::Tensor;

/// The pattern as a rank-2 tensor with values in [0, 1].
///
/// Panics if either dimension is zero.
pub fn test_pattern(height: usize, width: usize) -> Tensor {
    assert!(height > 0 && width > 0, "pattern needs nonzero dimensions");
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    // Normalize the radius so the gradient reaches 0 at the corners.
    let rmax = (cy * cy + cx * cx).sqrt().max(1.0);
    Tensor::from_fn(&[height, width], |idx| {
        let dy = idx[0] as f64 - cy;
        let dx = idx[1] as f64 - cx;
        let radial = 1.0 - (dy * dy + dx * dx).sqrt() / rmax;
        let checker = ((idx[0] / 8 + idx[1] / 8) % 2) as f64;
        0.65 * radial + 0.35 * checker
    })
    .expect("pattern dimensions checked above")
}

/// The same pattern quantized to an 8-bit gray image.
pub fn test_pattern_image(height: usize, width: usize) -> Image {
    let t = test_pattern(height, width);
    let scaled = Tensor::new(t.shape(), t.data().iter().map(|v| v * 255.0).collect())
        .expect("same shape");
    from_tensor(&scaled).expect("rank-2 tensor always converts")
}
