//! First two pipeline stages: ommatidium spatial smoothing and the LMC
//! temporal band-pass that extracts luminance change over time.

use crate::config::ModelConfig;
use crate::conv::{convolve2d_separable, TemporalConv};
use crate::error::Result;
use crate::frame::Frame;
use crate::kernels::{bandpass_kernel, gaussian1d};

/// Ommatidium layer: Gaussian blur with a unit-sum kernel, implemented
/// separably. Borders replicate the edge pixel.
pub fn ommatidia(frame: &Frame, config: &ModelConfig) -> Result<Frame> {
    let taps = gaussian1d(config.sigma1, config.spatial_kernel_radius_factor)?;
    Ok(convolve2d_separable(frame, &taps))
}

/// Reusable blur for streaming use: precomputes the 1-D taps once.
#[derive(Debug, Clone)]
pub struct OmmatidiaStage {
    taps: Vec<f64>,
}

impl OmmatidiaStage {
    pub fn new(config: &ModelConfig) -> Result<OmmatidiaStage> {
        Ok(OmmatidiaStage {
            taps: gaussian1d(config.sigma1, config.spatial_kernel_radius_factor)?,
        })
    }

    pub fn apply(&self, frame: &Frame) -> Frame {
        convolve2d_separable(frame, &self.taps)
    }
}

/// LMC layer: per-pixel causal convolution with the band-pass impulse
/// response (difference of two Gamma kernels). History starts zero
/// filled, so the first `len()` frames are a warm-up transient.
#[derive(Debug, Clone)]
pub struct LmcStage {
    filter: TemporalConv,
}

impl LmcStage {
    pub fn new(config: &ModelConfig) -> Result<LmcStage> {
        let kernel = bandpass_kernel(
            config.n1,
            config.tau1,
            config.n2,
            config.tau2,
            config.kernel_truncation_factor,
        )?;
        Ok(LmcStage {
            filter: TemporalConv::new(kernel),
        })
    }

    /// Length of the impulse response, i.e. the warm-up extent of this stage.
    pub fn len(&self) -> usize {
        self.filter.kernel().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn push(&mut self, photoreceptor_frame: Frame) -> Result<Frame> {
        self.filter.push(photoreceptor_frame)
    }
}
