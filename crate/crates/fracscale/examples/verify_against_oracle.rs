//! Check the convolution pipeline against the direct per-pixel oracle on
//! random inputs and print the worst absolute difference per cell. Every
//! line should end in 0e0: the two paths are built to agree bit for bit.
//!
//!     cargo run --example verify_against_oracle

use fracscale::{direct_resize, scale, RationalScale, ScaleJob, ScalingMethod, Tensor};
use rand::{Rng, SeedableRng};

fn main() -> fracscale::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let factors = [(2u64, 11u64), (1, 2), (3, 2), (27, 11), (4, 1)];
    let methods = [ScalingMethod::Nearest, ScalingMethod::Bilinear, ScalingMethod::bicubic()];

    println!("{:>7} {:>9} {:>12}", "factor", "method", "max |diff|");
    for &(r, s) in &factors {
        let f = RationalScale::new(r, s)?;
        for &m in &methods {
            let job = ScaleJob::uniform(f, 2, m)?;
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let n = rng.gen_range(3..48);
                let x = Tensor::from_fn(&[n, n], |_| rng.gen_range(-1.0..1.0))?;
                let a = scale(&x, &job)?;
                let b = direct_resize(&x, &job)?;
                for (p, q) in a.data().iter().zip(b.data()) {
                    worst = worst.max((p - q).abs());
                }
            }
            println!("{:>7} {:>9} {:>12.1e}", f.to_string(), m.name(), worst);
        }
    }
    Ok(())
}
