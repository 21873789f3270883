//! Rational scale factors and the polyphase kernel banks that realize them.
//!
//! Scaling by r/s evaluates r interleaved sampling phases per dimension;
//! phase j reads the input at offset j·s/r from its base pixel. Each phase
//! gets one small 1-D weight vector (`weights_1d`), and an n-D bank takes
//! outer products across dimensions, one kernel per phase tuple. The kernel
//! order matches `pixelshuffle`'s channel order, so the bank can be fed
//! straight into `strided_conv`.

use crate::error::{Error, Result};
use serde_json::json;
use std::fmt;
use std::str::FromStr;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A scale factor r/s, always stored in lowest terms.
///
/// Scaling a length-N dimension by r/s produces r·⌈N/s⌉ samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalScale {
    r: u64,
    s: u64,
}

impl RationalScale {
    pub fn new(r: u64, s: u64) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::InvalidFactor(format!("{r}/{s}: both parts must be nonzero")));
        }
        let g = gcd(r, s);
        Ok(RationalScale { r: r / g, s: s / g })
    }

    /// Numerator (upsampling part).
    pub fn r(&self) -> u64 {
        self.r
    }

    /// Denominator (downsampling stride).
    pub fn s(&self) -> u64 {
        self.s
    }

    /// Output length for an input of length `n`: r·⌈n/s⌉.
    pub fn out_len(&self, n: usize) -> usize {
        (self.r as usize) * self.hidden_len(n)
    }

    /// Number of stride positions for an input of length `n`: ⌈n/s⌉.
    pub fn hidden_len(&self, n: usize) -> usize {
        n.div_ceil(self.s as usize)
    }
}

impl fmt::Display for RationalScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.r, self.s)
    }
}

impl FromStr for RationalScale {
    type Err = Error;

    /// Parses "r/s"; a bare integer means an integer upscale ("2" == "2/1").
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidFactor(format!("cannot parse {text:?} as r/s"));
        match text.split_once('/') {
            Some((r, s)) => RationalScale::new(
                r.trim().parse().map_err(|_| bad())?,
                s.trim().parse().map_err(|_| bad())?,
            ),
            None => RationalScale::new(text.parse().map_err(|_| bad())?, 1),
        }
    }
}

/// The Keys cubic parameter, kept in the stable range [-1, 0].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicParam(f64);

impl CubicParam {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || !(-1.0..=0.0).contains(&a) {
            return Err(Error::InvalidArgument(format!(
                "cubic parameter {a} outside [-1, 0]"
            )));
        }
        Ok(CubicParam(a))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for CubicParam {
    fn default() -> Self {
        CubicParam(-0.5)
    }
}

/// Interpolation method. Tap counts: 1 (nearest), 2 (bilinear), 4 (bicubic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingMethod {
    Nearest,
    Bilinear,
    Bicubic(CubicParam),
}

impl ScalingMethod {
    /// Bicubic with the default a = -0.5.
    pub fn bicubic() -> Self {
        ScalingMethod::Bicubic(CubicParam::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScalingMethod::Nearest => "nearest",
            ScalingMethod::Bilinear => "bilinear",
            ScalingMethod::Bicubic(_) => "bicubic",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "nearest" => Ok(ScalingMethod::Nearest),
            "bilinear" => Ok(ScalingMethod::Bilinear),
            "bicubic" => Ok(ScalingMethod::bicubic()),
            other => Err(Error::InvalidArgument(format!(
                "unknown method {other:?} (expected nearest, bilinear, or bicubic)"
            ))),
        }
    }

    /// Number of input taps per dimension.
    pub fn taps(&self) -> usize {
        match self {
            ScalingMethod::Nearest => 1,
            ScalingMethod::Bilinear => 2,
            ScalingMethod::Bicubic(_) => 4,
        }
    }
}

impl fmt::Display for ScalingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fractional part of phase j's sampling offset, exact: ((j·s) mod r, r).
///
/// Phase j samples the input at j·s/r; the integer part shifts the kernel
/// anchor and this remainder picks the interpolation weights.
pub fn phase_fraction(j: u64, scale: RationalScale) -> (u64, u64) {
    ((j * scale.s) % scale.r, scale.r)
}

/// The Keys piecewise-cubic interpolation kernel.
///
/// |Δ| ≤ 1: (a+2)|Δ|³ − (a+3)|Δ|² + 1;  1 < |Δ| < 2: a|Δ|³ − 5a|Δ|² + 8a|Δ| − 4a;
/// 0 elsewhere. `cubic_weight(0.0, a) == 1.0` and `cubic_weight(1.0, a) == 0.0`
/// hold exactly.
pub fn cubic_weight(delta: f64, a: f64) -> f64 {
    let d = delta.abs();
    if d <= 1.0 {
        (a + 2.0) * d.powi(3) - (a + 3.0) * d.powi(2) + 1.0
    } else if d < 2.0 {
        a * d.powi(3) - 5.0 * a * d.powi(2) + 8.0 * a * d - 4.0 * a
    } else {
        0.0
    }
}

/// 1-D interpolation weights for a fractional offset, plus the anchor of the
/// first tap relative to the base pixel.
///
/// `frac` is an exact rational (numerator, denominator) in [0, 1). Nearest
/// returns one weight at anchor 0 or 1; ties at exactly 1/2 stay on the lower
/// pixel so integer upscales degenerate to plain sample repetition. Bilinear
/// returns `[1-f, f]` at anchor 0. Bicubic returns four Keys weights at
/// anchor -1, renormalized to sum to exactly the partition of unity.
pub fn weights_1d(frac: (u64, u64), method: ScalingMethod) -> (Vec<f64>, i64) {
    let mut buf = [0.0; 4];
    let (taps, anchor) = weights_into(frac, method, &mut buf);
    (buf[..taps].to_vec(), anchor)
}

/// Allocation-free core of [`weights_1d`]; shared by the bank builder and the
/// oracle so both sides evaluate identical arithmetic.
pub(crate) fn weights_into(
    frac: (u64, u64),
    method: ScalingMethod,
    buf: &mut [f64; 4],
) -> (usize, i64) {
    let (num, den) = frac;
    debug_assert!(den > 0 && num < den, "fraction {num}/{den} outside [0, 1)");
    match method {
        ScalingMethod::Nearest => {
            buf[0] = 1.0;
            (1, if 2 * num > den { 1 } else { 0 })
        }
        ScalingMethod::Bilinear => {
            let f = num as f64 / den as f64;
            buf[0] = 1.0 - f;
            buf[1] = f;
            (2, 0)
        }
        ScalingMethod::Bicubic(p) => {
            let a = p.value();
            let f = num as f64 / den as f64;
            buf[0] = cubic_weight(f + 1.0, a);
            buf[1] = cubic_weight(f, a);
            buf[2] = cubic_weight(1.0 - f, a);
            buf[3] = cubic_weight(2.0 - f, a);
            let sum: f64 = buf.iter().sum();
            for w in buf.iter_mut() {
                *w /= sum;
            }
            (4, -1)
        }
    }
}

/// One phase's convolution kernel: a small dense weight box with an integer
/// anchor per dimension (input offset of the first tap relative to the
/// phase's stride position).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseKernel {
    phase: Vec<usize>,
    anchor: Vec<i64>,
    extent: Vec<usize>,
    weights: Vec<f64>,
}

impl PhaseKernel {
    pub fn new(
        phase: Vec<usize>,
        anchor: Vec<i64>,
        extent: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = phase.len();
        if n == 0 || n > 3 {
            return Err(Error::UnsupportedRank(n));
        }
        if anchor.len() != n || extent.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "phase/anchor/extent ranks disagree: {}/{}/{}",
                n,
                anchor.len(),
                extent.len()
            )));
        }
        if extent.contains(&0) {
            return Err(Error::ShapeMismatch("kernel extent 0".into()));
        }
        let len: usize = extent.iter().product();
        if weights.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "extent {:?} needs {} weights, got {}",
                extent,
                len,
                weights.len()
            )));
        }
        Ok(PhaseKernel { phase, anchor, extent, weights })
    }

    pub fn phase(&self) -> &[usize] {
        &self.phase
    }

    pub fn anchor(&self) -> &[i64] {
        &self.anchor
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    /// Row-major weights over the extent box.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A complete polyphase bank: one kernel per phase tuple, enumerated
/// row-major so kernel index equals the channel index `pixelshuffle` expects.
#[derive(Debug, Clone)]
pub struct KernelBank {
    factors: Vec<RationalScale>,
    method: ScalingMethod,
    stride: Vec<usize>,
    kernels: Vec<PhaseKernel>,
    left_pad: Vec<usize>,
    reach: Vec<i64>,
    window_span: Vec<usize>,
}

impl KernelBank {
    /// Wraps explicit kernels into a bank. The kernel count must equal the
    /// product of the factor numerators so the shuffle stage stays
    /// well-defined; anchors may be arbitrary.
    pub fn custom(
        factors: &[RationalScale],
        method: ScalingMethod,
        kernels: Vec<PhaseKernel>,
    ) -> Result<Self> {
        let n = factors.len();
        if n == 0 || n > 3 {
            return Err(Error::UnsupportedRank(n));
        }
        let phases: usize = factors.iter().map(|f| f.r() as usize).product();
        if kernels.len() != phases {
            return Err(Error::ShapeMismatch(format!(
                "factors {:?} need {} kernels, got {}",
                factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                phases,
                kernels.len()
            )));
        }
        if kernels.iter().any(|k| k.phase.len() != n) {
            return Err(Error::ShapeMismatch("kernel rank differs from factor rank".into()));
        }

        let mut left_pad = vec![0usize; n];
        let mut reach = vec![i64::MIN; n];
        let mut window_span = vec![0usize; n];
        for d in 0..n {
            let amin = kernels.iter().map(|k| k.anchor[d]).min().unwrap();
            reach[d] = kernels
                .iter()
                .map(|k| k.anchor[d] + k.extent[d] as i64)
                .max()
                .unwrap();
            left_pad[d] = (-amin).max(0) as usize;
            window_span[d] = (left_pad[d] as i64 + reach[d]) as usize;
        }
        Ok(KernelBank {
            factors: factors.to_vec(),
            method,
            stride: factors.iter().map(|f| f.s() as usize).collect(),
            kernels,
            left_pad,
            reach,
            window_span,
        })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[RationalScale] {
        &self.factors
    }

    pub fn method(&self) -> ScalingMethod {
        self.method
    }

    /// Convolution stride per dimension (the factor denominators).
    pub fn stride(&self) -> &[usize] {
        &self.stride
    }

    pub fn kernels(&self) -> &[PhaseKernel] {
        &self.kernels
    }

    /// Upsampling factor per dimension (the factor numerators), in the form
    /// `pixelshuffle` takes.
    pub fn shuffle_factors(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.r() as usize).collect()
    }

    /// Left shift that makes every anchor non-negative, per dimension.
    pub fn left_pad(&self) -> &[usize] {
        &self.left_pad
    }

    /// Extent of the union of all kernel windows, per dimension; the
    /// convolution emits `(len - span) / stride + 1` positions.
    pub fn window_span(&self) -> &[usize] {
        &self.window_span
    }

    /// Kernel for a phase tuple (row-major lookup).
    pub fn kernel_at(&self, phase: &[usize]) -> Option<&PhaseKernel> {
        if phase.len() != self.rank() {
            return None;
        }
        let mut c = 0usize;
        for (d, &p) in phase.iter().enumerate() {
            let r = self.factors[d].r() as usize;
            if p >= r {
                return None;
            }
            c = c * r + p;
        }
        self.kernels.get(c)
    }

    /// Exact padding for an input shape: the left pad absorbs negative
    /// anchors, the right pad completes the final stride window so the
    /// convolution emits exactly ⌈N/s⌉ positions per dimension.
    pub fn required_padding(
        &self,
        in_shape: &[usize],
        mode: crate::tensor::PadMode,
    ) -> Result<crate::tensor::PaddingSpec> {
        let n = self.rank();
        if in_shape.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "bank rank {} vs input rank {}",
                n,
                in_shape.len()
            )));
        }
        let mut amounts = Vec::with_capacity(n);
        for (d, &len) in in_shape.iter().enumerate() {
            let positions = self.factors[d].hidden_len(len);
            let last_start = ((positions - 1) * self.stride[d]) as i64;
            let right = (last_start + self.reach[d] - len as i64).max(0) as usize;
            amounts.push((self.left_pad[d], right));
        }
        Ok(crate::tensor::PaddingSpec { amounts, mode })
    }

    /// The bank in a stable JSON form: factor strings, method name, and one
    /// object per kernel with its phase, anchor, extent, and row-major
    /// weights.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "factors": self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "method": self.method.name(),
            "kernels": self.kernels.iter().map(|k| json!({
                "phase": k.phase(),
                "anchor": k.anchor(),
                "extent": k.extent(),
                "weights": k.weights(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds the polyphase kernel bank for a per-dimension factor list.
///
/// Per dimension d and phase j, the kernel anchors at ⌊j·s/r⌋ plus the
/// method's own anchor, with `weights_1d` of the remaining fraction; the n-D
/// weight box is the outer product across dimensions. Phases are enumerated
/// row-major (last dimension fastest).
pub fn build_bank(factors: &[RationalScale], method: ScalingMethod) -> Result<KernelBank> {
    let n = factors.len();
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedRank(n));
    }

    // Per dimension: (anchor, weights) for each phase.
    let mut per_dim: Vec<Vec<(i64, Vec<f64>)>> = Vec::with_capacity(n);
    for f in factors {
        let mut phases = Vec::with_capacity(f.r() as usize);
        for j in 0..f.r() {
            let int_part = (j * f.s() / f.r()) as i64;
            let (w, a) = weights_1d(phase_fraction(j, *f), method);
            phases.push((int_part + a, w));
        }
        per_dim.push(phases);
    }

    let shape: Vec<usize> = factors.iter().map(|f| f.r() as usize).collect();
    let mut kernels = Vec::with_capacity(shape.iter().product());
    let mut phase = vec![0usize; n];
    loop {
        let mut anchor = Vec::with_capacity(n);
        let mut extent = Vec::with_capacity(n);
        let mut weights = vec![1.0];
        for d in 0..n {
            let (a, wd) = &per_dim[d][phase[d]];
            anchor.push(*a);
            extent.push(wd.len());
            let mut next = Vec::with_capacity(weights.len() * wd.len());
            for &acc in &weights {
                for &w in wd {
                    next.push(acc * w);
                }
            }
            weights = next;
        }
        kernels.push(PhaseKernel::new(phase.clone(), anchor, extent, weights)?);
        if !crate::tensor::next_index(&mut phase, &shape) {
            break;
        }
    }
    KernelBank::custom(factors, method, kernels)
}
