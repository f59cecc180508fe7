//! Medulla layer: half-wave rectification of the LMC signal into ON
//! (Tm3) and OFF (Tm2) channels, plus Gamma-kernel delayed versions
//! (Mi1 for ON, Tm1 for OFF) at every (n, tau) the detectors consume.

use crate::config::ModelConfig;
use crate::conv::{FrameRing, TemporalConv};
use crate::error::Result;
use crate::frame::Frame;
use crate::kernels::{gamma_kernel, TemporalKernel};

/// Split an LMC frame into nonnegative ON and OFF components.
pub fn rectify(lmc_frame: &Frame) -> (Frame, Frame) {
    let tm3 = lmc_frame.map(|v| v.max(0.0));
    let tm2 = lmc_frame.map(|v| (-v).max(0.0));
    (tm3, tm2)
}

/// A single Gamma delay line over a frame stream.
#[derive(Debug, Clone)]
pub struct DelayLine {
    filter: TemporalConv,
}

impl DelayLine {
    pub fn new(n: u32, tau: f64, truncation_factor: f64) -> Result<DelayLine> {
        Ok(DelayLine {
            filter: TemporalConv::new(gamma_kernel(n, tau, truncation_factor)?),
        })
    }

    pub fn len(&self) -> usize {
        self.filter.kernel().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn push(&mut self, frame: Frame) -> Result<Frame> {
        self.filter.push(frame)
    }
}

/// Snapshot of every medulla signal for one time step. The delayed
/// frames are computed once and shared by the STMD and LPTC detectors.
#[derive(Debug, Clone)]
pub struct MedullaOutputs {
    /// ON channel, elementwise >= 0.
    pub tm3: Frame,
    /// OFF channel, elementwise >= 0.
    pub tm2: Frame,
    /// ON delayed by (n3, tau3), the STMD offset-pixel partner.
    pub mi1_stmd: Frame,
    /// OFF delayed by (n4, tau4), the STMD same-pixel partner.
    pub tm1_center: Frame,
    /// OFF delayed by (n5, tau5), the STMD offset-pixel partner.
    pub tm1_offset: Frame,
    /// ON delayed by (n6, tau6) for the LPTC.
    pub mi1_lptc: Frame,
    /// OFF delayed by (n6, tau6) for the LPTC.
    pub tm1_lptc: Frame,
}

/// Streaming medulla stage. The ON and OFF histories are each buffered
/// once in a shared ring sized for the longest kernel on that channel.
#[derive(Debug)]
pub struct MedullaStage {
    on_ring: FrameRing,
    off_ring: FrameRing,
    k_mi1_stmd: TemporalKernel,
    k_tm1_center: TemporalKernel,
    k_tm1_offset: TemporalKernel,
    k_lptc: TemporalKernel,
    max_delay: usize,
}

impl MedullaStage {
    pub fn new(config: &ModelConfig) -> Result<MedullaStage> {
        let tf = config.kernel_truncation_factor;
        let k_mi1_stmd = gamma_kernel(config.n3, config.tau3, tf)?;
        let k_tm1_center = gamma_kernel(config.n4, config.tau4, tf)?;
        let k_tm1_offset = gamma_kernel(config.n5, config.tau5, tf)?;
        let k_lptc = gamma_kernel(config.n6, config.tau6, tf)?;
        let on_cap = k_mi1_stmd.len().max(k_lptc.len());
        let off_cap = k_tm1_center.len().max(k_tm1_offset.len()).max(k_lptc.len());
        let max_delay = on_cap.max(off_cap);
        Ok(MedullaStage {
            on_ring: FrameRing::new(on_cap),
            off_ring: FrameRing::new(off_cap),
            k_mi1_stmd,
            k_tm1_center,
            k_tm1_offset,
            k_lptc,
            max_delay,
        })
    }

    /// Longest delay-kernel support, in frames.
    pub fn max_delay(&self) -> usize {
        self.max_delay
    }

    pub fn push(&mut self, lmc_frame: &Frame) -> Result<MedullaOutputs> {
        let (tm3, tm2) = rectify(lmc_frame);
        self.on_ring.push(tm3.clone())?;
        self.off_ring.push(tm2.clone())?;
        Ok(MedullaOutputs {
            mi1_stmd: self.on_ring.convolve(&self.k_mi1_stmd),
            tm1_center: self.off_ring.convolve(&self.k_tm1_center),
            tm1_offset: self.off_ring.convolve(&self.k_tm1_offset),
            mi1_lptc: self.on_ring.convolve(&self.k_lptc),
            tm1_lptc: self.off_ring.convolve(&self.k_lptc),
            tm3,
            tm2,
        })
    }
}
