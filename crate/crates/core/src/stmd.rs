//! Small target motion detector: directional three-way correlation of
//! medulla outputs, lateral inhibition, and threshold detection.

use crate::config::{DirectionSet, ModelConfig};
use crate::conv::{convolve2d, convolve_cols, convolve_rows};
use crate::detect::{detect, Detection};
use crate::error::Result;
use crate::frame::Frame;
use crate::kernels::{inhibition_kernel, SpatialKernel};
use crate::medulla::MedullaOutputs;
use crate::volume::ResponseVolume;
use std::f64::consts::PI;

/// Integer pixel offset of the delayed correlation partner for a
/// preferred direction: round(alpha1 * cos(theta), alpha1 * sin(theta)).
/// Rounding rather than interpolating keeps detection cheap.
pub fn correlation_offset(alpha1: f64, theta: f64) -> (isize, isize) {
    (
        (alpha1 * theta.cos()).round() as isize,
        (alpha1 * theta.sin()).round() as isize,
    )
}

/// Pixel offset at which the *delayed* signals are sampled for a neuron
/// preferring motion along `theta`. The delayed partner must sit where
/// the target was earlier, i.e. behind the current pixel along the
/// motion direction, so the correlation samples at theta + pi.
pub fn partner_offset(alpha1: f64, theta: f64) -> (isize, isize) {
    correlation_offset(alpha1, theta + std::f64::consts::PI)
}

/// Three-way STMD correlation, one response frame per preferred
/// direction. Offsets falling outside the frame contribute zero.
pub fn correlate(
    medulla: &MedullaOutputs,
    directions: &DirectionSet,
    config: &ModelConfig,
) -> ResponseVolume {
    let (w, h) = (medulla.tm3.width(), medulla.tm3.height());
    let channels = directions
        .angles()
        .iter()
        .map(|&theta| {
            let (dx, dy) = partner_offset(config.alpha1, theta);
            let mut out = Frame::zeros(w, h);
            for y in 0..h {
                for x in 0..w {
                    let on = medulla.tm3.get(x, y);
                    if on == 0.0 {
                        continue;
                    }
                    let (px, py) = (x as isize + dx, y as isize + dy);
                    let mi1 = medulla.mi1_stmd.get_or_zero(px, py);
                    let tm1_off = medulla.tm1_offset.get_or_zero(px, py);
                    let d = on * (medulla.tm1_center.get(x, y) + mi1) * tm1_off;
                    out.set(x, y, d);
                }
            }
            out
        })
        .collect();
    ResponseVolume::from_channels(directions.clone(), channels)
}

/// Build the lateral-inhibition kernel from the config.
pub fn build_inhibition_kernel(config: &ModelConfig) -> Result<SpatialKernel> {
    inhibition_kernel(
        config.sigma2,
        config.sigma3,
        config.e,
        config.rho,
        config.a,
        config.b,
        config.spatial_kernel_radius_factor,
    )
}

/// Lateral inhibition convolution, decomposed for speed when possible.
///
/// The kernel is W = A [g]+ + B [g]- with g a difference of Gaussians,
/// which rewrites exactly as W = B g + (A - B) [g]+. The B g term splits
/// into two separable Gaussian passes, and [g]+ only has support on the
/// small disc where the narrow Gaussian dominates, leaving a dense
/// convolution a fraction of the full kernel's size. For a nonzero
/// baseline rho the rewrite gains nothing, so the dense kernel is used
/// directly.
pub struct InhibitionFilter {
    dense: SpatialKernel,
    /// 1-D samples of G_sigma2 over the full kernel radius.
    center_taps: Vec<f64>,
    /// 1-D samples of G_sigma3, e folded in on one axis.
    surround_taps: Vec<f64>,
    /// (A - B) [g]+, trimmed to its support.
    positive: Option<SpatialKernel>,
    b: f64,
    decomposed: bool,
}

fn gaussian_taps_1d(sigma: f64, radius: usize, scale: f64) -> Vec<f64> {
    (-(radius as isize)..=radius as isize)
        .map(|d| {
            let d = d as f64;
            scale * (-d * d / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).sqrt() * sigma)
        })
        .collect()
}

impl InhibitionFilter {
    pub fn new(config: &ModelConfig) -> Result<InhibitionFilter> {
        let dense = build_inhibition_kernel(config)?;
        let radius = dense.radius();
        // Trim (A - B) [g]+ to the largest offset with a positive g.
        let r = radius as isize;
        let mut support = 0isize;
        for dy in -r..=r {
            for dx in -r..=r {
                let g = dense.get(dx, dy);
                if g > 0.0 {
                    support = support.max(dx.abs()).max(dy.abs());
                }
            }
        }
        let factor = (config.a - config.b) / config.a.max(f64::MIN_POSITIVE);
        let positive = if config.a == 0.0 {
            None
        } else {
            let side = 2 * support as usize + 1;
            let mut weights = Vec::with_capacity(side * side);
            for dy in -support..=support {
                for dx in -support..=support {
                    // Dense weights are A g on the positive support.
                    weights.push(factor * dense.get(dx, dy).max(0.0));
                }
            }
            Some(SpatialKernel::from_weights(support as usize, weights))
        };
        Ok(InhibitionFilter {
            center_taps: gaussian_taps_1d(config.sigma2, radius, 1.0),
            surround_taps: gaussian_taps_1d(config.sigma3, radius, config.e),
            positive,
            b: config.b,
            decomposed: config.rho == 0.0 && config.a != 0.0,
            dense,
        })
    }

    /// The equivalent dense kernel.
    pub fn kernel(&self) -> &SpatialKernel {
        &self.dense
    }

    pub fn apply(&self, d: &Frame) -> Frame {
        if !self.decomposed {
            return convolve2d(d, &self.dense);
        }
        let center = convolve_cols(&convolve_rows(d, &self.center_taps), &self.center_taps);
        let surround = convolve_cols(&convolve_rows(d, &self.surround_taps), &self.surround_taps);
        let mut out = match &self.positive {
            Some(kernel) => convolve2d(d, kernel),
            None => Frame::zeros(d.width(), d.height()),
        };
        for ((slot, c), s) in out
            .data_mut()
            .iter_mut()
            .zip(center.data())
            .zip(surround.data())
        {
            *slot += self.b * (c - s);
        }
        out
    }
}

/// Lateral inhibition: convolve each direction channel of D with the
/// inhibition kernel independently, clamp-to-edge borders.
pub fn inhibit(d: &ResponseVolume, filter: &InhibitionFilter) -> ResponseVolume {
    let channels = d.channels().iter().map(|ch| filter.apply(ch)).collect();
    ResponseVolume::from_channels(d.directions().clone(), channels)
}

/// Threshold the inhibited response at beta and extract detections.
pub fn detect_stmd(e: &ResponseVolume, beta: f64, t: usize) -> Vec<Detection> {
    detect(e, beta, t)
}
