//! The release gate. Every capability claim the crate makes is checked here
//! end to end, one labelled line per criterion:
//!
//!     cargo test --test acceptance -- --nocapture
//!
//! The suite pins FRACSCALE_THREADS=1 so its timing checks measure the
//! algorithm, not the thread pool.

use fracscale::{
    build_bank, compare, direct_resize, pixelshuffle, pixelunshuffle, psnr, scale, ssim,
    ssim_naive, test_pattern, ChannelTensor, CompareOpts, Image, ImageFormat, QualityReport,
    RationalScale, ScaleJob, ScalingMethod, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

type Check = fn() -> Result<(), String>;

#[test]
fn acceptance_gate() {
    std::env::set_var("FRACSCALE_THREADS", "1");

    let criteria: &[(&str, Check)] = &[
        ("pipeline matches the direct oracle across the factor grid", oracle_equivalence),
        ("5x5 input at factor 3/2 scales to 9x9", shape_contract),
        ("kernel bank reproduces the pinned 3/2 matrices", pinned_kernels),
        ("cubic weight knots and partition of unity", cubic_partition_of_unity),
        ("pixelshuffle round trip is bit-exact", shuffle_round_trip),
        ("pipeline-vs-oracle metrics saturate on the default grid", metric_saturation),
        ("timing bounds hold and the bench CSV parses back", timing_sanity),
        ("windowed ssim agrees with the naive reference", ssim_dual_implementation),
        ("images round trip losslessly and cli identity is exact", image_round_trip),
    ];

    let mut failures = 0;
    for (label, check) in criteria {
        let verdict = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(())) => "PASS".to_string(),
            Ok(Err(msg)) => {
                failures += 1;
                format!("FAIL: {msg}")
            }
            Err(payload) => {
                failures += 1;
                format!("FAIL: panicked: {}", panic_text(&payload))
            }
        };
        println!("[acceptance] {label}: {verdict}");
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

fn rs(r: u64, s: u64) -> RationalScale {
    RationalScale::new(r, s).expect("test factors are valid")
}

fn methods() -> [ScalingMethod; 3] {
    [ScalingMethod::Nearest, ScalingMethod::Bilinear, ScalingMethod::bicubic()]
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Pipeline output equals the oracle within 1e-9 for ranks 1 and 2, seven
/// sizes, seven factors, all methods, replicate padding, ten random inputs
/// per cell, inside a 60 s sequential budget.
fn oracle_equivalence() -> Result<(), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let factors = [(2, 11), (1, 2), (2, 3), (3, 2), (5, 3), (2, 1), (27, 11)];

    for rank in 1..=2usize {
        for n in [3usize, 5, 8, 11, 16, 33, 64] {
            let shape = vec![n; rank];
            for (r, s) in factors {
                for m in methods() {
                    let job = ScaleJob::uniform(rs(r, s), rank, m).map_err(|e| e.to_string())?;
                    for _ in 0..10 {
                        let x = Tensor::from_fn(&shape, |_| rng.gen_range(-1.0..1.0)).unwrap();
                        let got = scale(&x, &job).map_err(|e| e.to_string())?;
                        let want = direct_resize(&x, &job).map_err(|e| e.to_string())?;
                        let diff = got
                            .data()
                            .iter()
                            .zip(want.data())
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0f64, f64::max);
                        if diff > 1e-9 {
                            return Err(format!(
                                "max diff {diff:e} at n={n} rank={rank} factor={r}/{s} {}",
                                m.name()
                            ));
                        }
                    }
                }
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        return Err(format!("grid took {elapsed:.1} s, budget is 60 s"));
    }
    Ok(())
}

fn shape_contract() -> Result<(), String> {
    let x = Tensor::from_fn(&[5, 5], |i| (i[0] * 5 + i[1]) as f64).unwrap();
    for m in methods() {
        let job = ScaleJob::uniform(rs(3, 2), 2, m).map_err(|e| e.to_string())?;
        let y = scale(&x, &job).map_err(|e| e.to_string())?;
        if y.shape() != [9, 9] {
            return Err(format!("{}: got shape {:?}", m.name(), y.shape()));
        }
    }
    Ok(())
}

/// The 2-D bilinear bank for (3/2, 3/2) contains the two-decimal kernels
/// [[.44,.22],[.22,.11]] and [[.22,.44],[.11,.22]]; the nearest bank is all
/// exact one-hots and, embedded in the 2x2 anchor box, contains
/// [[1,0],[0,0]] and [[0,1],[0,0]].
fn pinned_kernels() -> Result<(), String> {
    let matches_2x2 = |k: &fracscale::PhaseKernel, target: &[f64; 4]| {
        k.extent() == [2, 2]
            && k.weights().iter().zip(target).all(|(w, t)| (w - t).abs() <= 0.005)
    };

    let bil = build_bank(&[rs(3, 2), rs(3, 2)], ScalingMethod::Bilinear)
        .map_err(|e| e.to_string())?;
    for target in [[0.44, 0.22, 0.22, 0.11], [0.22, 0.44, 0.11, 0.22]] {
        if !bil.kernels().iter().any(|k| matches_2x2(k, &target)) {
            return Err(format!("no bilinear kernel within 0.005 of {target:?}"));
        }
    }

    let near = build_bank(&[rs(3, 2), rs(3, 2)], ScalingMethod::Nearest)
        .map_err(|e| e.to_string())?;
    let amin: Vec<i64> = (0..2)
        .map(|d| near.kernels().iter().map(|k| k.anchor()[d]).min().unwrap())
        .collect();
    let mut embedded = Vec::new();
    for k in near.kernels() {
        if k.extent() != [1, 1] || k.weights() != [1.0] {
            return Err(format!(
                "nearest phase {:?} is not an exact one-hot: extent {:?} weights {:?}",
                k.phase(),
                k.extent(),
                k.weights()
            ));
        }
        let (i, j) = ((k.anchor()[0] - amin[0]) as usize, (k.anchor()[1] - amin[1]) as usize);
        if i > 1 || j > 1 {
            return Err(format!("nearest anchors span more than a 2x2 box ({i},{j})"));
        }
        let mut m = [[0.0; 2]; 2];
        m[i][j] = 1.0;
        embedded.push(m);
    }
    for target in [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 1.0], [0.0, 0.0]]] {
        if !embedded.contains(&target) {
            return Err(format!("nearest bank misses the one-hot {target:?}"));
        }
    }
    Ok(())
}

fn cubic_partition_of_unity() -> Result<(), String> {
    if fracscale::cubic_weight(0.0, -0.5) != 1.0 {
        return Err("cubic_weight(0) != 1".into());
    }
    if fracscale::cubic_weight(1.0, -0.5) != 0.0 {
        return Err("cubic_weight(1) != 0".into());
    }
    for factors in [vec![rs(3, 2)], vec![rs(27, 11)], vec![rs(3, 2), rs(5, 3)]] {
        let bank =
            build_bank(&factors, ScalingMethod::bicubic()).map_err(|e| e.to_string())?;
        for k in bank.kernels() {
            let sum: f64 = k.weights().iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(format!("phase {:?} sums to {sum:.15}", k.phase()));
            }
        }
    }
    Ok(())
}

fn shuffle_round_trip() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for case in 0..200 {
        let rank = rng.gen_range(1..=3usize);
        let spatial: Vec<usize> = (0..rank).map(|_| rng.gen_range(1..=8)).collect();
        let factors: Vec<usize> = (0..rank).map(|_| rng.gen_range(1..=4)).collect();
        let channels: usize = factors.iter().product();
        let len = channels * spatial.iter().product::<usize>();
        let data: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let h = ChannelTensor::new(channels, &spatial, data).map_err(|e| e.to_string())?;
        let y = pixelshuffle(&h, &factors).map_err(|e| e.to_string())?;
        let back = pixelunshuffle(&y, &factors).map_err(|e| e.to_string())?;
        let same = back.channels() == h.channels()
            && back.spatial() == h.spatial()
            && back
                .data()
                .iter()
                .zip(h.data())
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(format!(
                "case {case}: spatial {spatial:?} factors {factors:?} did not round trip"
            ));
        }
    }
    Ok(())
}

/// On the 128x128 test pattern, pipeline and oracle outputs are so close
/// that PSNR hits the +inf sentinel (or at least 120 dB) and SSIM is within
/// 1e-9 of 1, for every default bench factor and method.
fn metric_saturation() -> Result<(), String> {
    let x = test_pattern(128, 128);
    let opts = CompareOpts { reps: 1, max_value: 1.0 };
    for f in fracscale::cli::default_bench_factors() {
        for m in methods() {
            let job = ScaleJob::uniform(f, 2, m).map_err(|e| e.to_string())?;
            let rep = compare(&x, &job, &opts).map_err(|e| e.to_string())?;
            if !(rep.psnr_db.is_infinite() || rep.psnr_db >= 120.0) {
                return Err(format!("{f} {}: psnr {} dB", m.name(), rep.psnr_db));
            }
            if rep.ssim < 1.0 - 1e-9 {
                return Err(format!("{f} {}: ssim {}", m.name(), rep.ssim));
            }
        }
    }
    Ok(())
}

/// Three timing claims: a 1024x1024 bilinear 3/2 scale stays under 2 s
/// sequentially; the bench CSV at size 256 parses back row for row; and the
/// median pipeline time stays within 25x the median oracle time.
fn timing_sanity() -> Result<(), String> {
    let x = test_pattern(1024, 1024);
    let job = ScaleJob::uniform(rs(3, 2), 2, ScalingMethod::Bilinear).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let y = scale(&x, &job).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    if y.shape() != [1536, 1536] {
        return Err(format!("unexpected output shape {:?}", y.shape()));
    }
    if elapsed >= 2.0 {
        return Err(format!("1024x1024 at 3/2 took {elapsed:.2} s, budget is 2 s"));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv_path = dir.path().join("bench.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_fracscale"))
        .args(["bench", "--sizes", "256", "--reps", "3", "--csv"])
        .arg(&csv_path)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("bench failed: {}", String::from_utf8_lossy(&out.stderr)));
    }

    let text = std::fs::read_to_string(&csv_path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    if lines.next() != Some(QualityReport::CSV_HEADER) {
        return Err("csv header mismatch".into());
    }
    let mut t_fcfs = Vec::new();
    let mut t_oracle = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(format!("row has {} fields: {line}", fields.len()));
        }
        for idx in [4, 5, 6, 7] {
            fields[idx]
                .parse::<f64>()
                .map_err(|_| format!("field {idx} not numeric in: {line}"))?;
        }
        t_fcfs.push(fields[6].parse::<f64>().unwrap());
        t_oracle.push(fields[7].parse::<f64>().unwrap());
    }
    if t_fcfs.len() != 36 {
        return Err(format!("expected 36 rows (12 factors x 3 methods), got {}", t_fcfs.len()));
    }
    let (mf, mo) = (median(t_fcfs), median(t_oracle));
    if mf > 25.0 * mo {
        return Err(format!("median pipeline {mf:.6} s > 25x median oracle {mo:.6} s"));
    }
    Ok(())
}

fn ssim_dual_implementation() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3232);
    for case in 0..20 {
        let a = Tensor::from_fn(&[32, 32], |_| rng.gen_range(0.0..1.0)).unwrap();
        let b = Tensor::from_fn(&[32, 32], |_| rng.gen_range(0.0..1.0)).unwrap();
        let fast = ssim(&a, &b, 1.0).map_err(|e| e.to_string())?;
        let slow = ssim_naive(&a, &b, 1.0).map_err(|e| e.to_string())?;
        if (fast - slow).abs() > 1e-10 {
            return Err(format!("case {case}: windowed {fast} vs naive {slow}"));
        }
        // While both values are on hand, sanity-check the saturation story.
        let p = psnr(&a, &a, 1.0).map_err(|e| e.to_string())?;
        if !p.is_infinite() {
            return Err("psnr of identical tensors must be the +inf sentinel".into());
        }
    }
    Ok(())
}

/// 100 random images survive PNM and PNG write/read byte-exact, and the CLI
/// at factor 1/1 reproduces input pixels exactly.
fn image_round_trip() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(909);

    for case in 0..100 {
        let (w, h) = (rng.gen_range(1..40), rng.gen_range(1..40));
        let channels = if rng.gen_bool(0.5) { 1 } else { 3 };
        let samples: Vec<u8> = (0..w * h * channels).map(|_| rng.gen()).collect();
        let img = Image::new(w, h, channels, samples).map_err(|e| e.to_string())?;

        let pnm_ext = if channels == 1 { "pgm" } else { "ppm" };
        for ext in [pnm_ext, "png"] {
            let path = dir.path().join(format!("rt{case}.{ext}"));
            let format = ImageFormat::from_path(&path).map_err(|e| e.to_string())?;
            fracscale::write_image(&img, &path, format).map_err(|e| e.to_string())?;
            let back = fracscale::read_image(&path).map_err(|e| e.to_string())?;
            let same = back.width() == img.width()
                && back.height() == img.height()
                && back.channels() == img.channels()
                && back.samples() == img.samples();
            if !same {
                return Err(format!("case {case}: {ext} round trip is not byte-exact"));
            }
        }
    }

    // CLI identity: factor 1/1 through each container format.
    for (ext, channels) in [("ppm", 3), ("png", 1)] {
        let samples: Vec<u8> = (0..23 * 17 * channels).map(|_| rng.gen()).collect();
        let img = Image::new(23, 17, channels, samples).map_err(|e| e.to_string())?;
        let src = dir.path().join(format!("id_src.{ext}"));
        let dst = dir.path().join(format!("id_dst.{ext}"));
        let format = ImageFormat::from_path(&src).map_err(|e| e.to_string())?;
        fracscale::write_image(&img, &src, format).map_err(|e| e.to_string())?;

        let out = Command::new(env!("CARGO_BIN_EXE_fracscale"))
            .args(["scale", "--factor", "1/1"])
            .arg(&src)
            .arg(&dst)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("cli scale failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        let back = fracscale::read_image(&dst).map_err(|e| e.to_string())?;
        if back.samples() != img.samples() {
            return Err(format!("{ext}: cli identity changed pixel values"));
        }
    }
    Ok(())
}
