//! Print the polyphase kernel bank for a factor: one small convolution
//! kernel per output phase, plus the stride and padding the bank implies.
//!
//!     cargo run --example inspect_kernels

use fracscale::{build_bank, RationalScale, ScalingMethod};

fn main() -> fracscale::Result<()> {
    let f = RationalScale::new(3, 2)?;

    for method in [ScalingMethod::Nearest, ScalingMethod::Bilinear, ScalingMethod::bicubic()] {
        let bank = build_bank(&[f, f], method)?;
        println!(
            "factor {f} x {f}, {}: {} kernels, stride {:?}, left pad {:?}",
            method.name(),
            bank.kernels().len(),
            bank.stride(),
            bank.left_pad()
        );
        for k in bank.kernels() {
            let sum: f64 = k.weights().iter().sum();
            println!("  phase {:?}  anchor {:?}  sum {sum:.3}", k.phase(), k.anchor());
            let cols = k.extent()[1];
            for row in k.weights().chunks(cols) {
                let cells: Vec<String> = row.iter().map(|w| format!("{w:5.2}")).collect();
                println!("    [{}]", cells.join(" "));
            }
        }
        println!();
    }

    // The same bank serializes to JSON (what `fracscale kernels` emits).
    let bank = build_bank(&[f, f], ScalingMethod::Bilinear)?;
    println!("{}", serde_json::to_string_pretty(&bank.to_json()).unwrap());
    Ok(())
}
