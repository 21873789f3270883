//! Library-level benchmarking: run `compare` over a small factor grid and
//! print the same CSV the `fracscale bench` subcommand emits.
//!
//!     cargo run --release --example bench_grid

use fracscale::{compare, test_pattern, CompareOpts, QualityReport, RationalScale, ScaleJob, ScalingMethod};

fn main() -> fracscale::Result<()> {
    let x = test_pattern(96, 96);
    let opts = CompareOpts { reps: 9, max_value: 1.0 };

    println!("{}", QualityReport::CSV_HEADER);
    for (r, s) in [(1u64, 2u64), (3, 2), (2, 1)] {
        let f = RationalScale::new(r, s)?;
        for method in [ScalingMethod::Nearest, ScalingMethod::Bilinear, ScalingMethod::bicubic()] {
            let job = ScaleJob::uniform(f, 2, method)?;
            println!("{}", compare(&x, &job, &opts)?.csv_row());
        }
    }
    Ok(())
}
