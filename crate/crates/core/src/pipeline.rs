//! Streaming execution of the whole visual system, one frame at a time.
//! Memory stays bounded by the temporal kernel supports; no stage ever
//! materializes the full sequence.

use crate::config::{DirectionSet, ModelConfig};
use crate::error::Result;
use crate::frame::Frame;
use crate::lptc::lptc_correlate;
use crate::medulla::MedullaStage;
use crate::retina::{LmcStage, OmmatidiaStage};
use crate::stmd::{correlate, inhibit, InhibitionFilter};
use crate::tsdn::{estimate_background_direction, integrate};
use crate::volume::ResponseVolume;
use std::time::{Duration, Instant};

/// Everything the pipeline produces for one input frame.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Frame index.
    pub t: usize,
    /// STMD correlation before lateral inhibition.
    pub d: ResponseVolume,
    /// STMD output after lateral inhibition.
    pub e: ResponseVolume,
    /// LPTC output.
    pub f: ResponseVolume,
    /// TSDN output.
    pub t_volume: ResponseVolume,
    /// Index of the estimated background direction channel.
    pub psi_index: usize,
}

/// Wall-clock time spent in each stage, accumulated across frames.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub frames: usize,
    pub retina: Duration,
    pub medulla: Duration,
    pub lptc: Duration,
    pub stmd: Duration,
    pub tsdn: Duration,
}

impl StageTimings {
    /// One line per stage: name and throughput in frames per second.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let fps = |d: Duration| {
            if d.as_secs_f64() > 0.0 {
                format!("{:.1}", self.frames as f64 / d.as_secs_f64())
            } else {
                "inf".to_string()
            }
        };
        for (name, d) in [
            ("retina", self.retina),
            ("medulla", self.medulla),
            ("lptc", self.lptc),
            ("stmd", self.stmd),
            ("tsdn", self.tsdn),
        ] {
            out.push_str(&format!("{name}: {} frames/s\n", fps(d)));
        }
        out
    }
}

/// Stateful frame-at-a-time pipeline. One writer per instance; create a
/// fresh pipeline per stream.
pub struct Pipeline {
    config: ModelConfig,
    directions: DirectionSet,
    ommatidia: OmmatidiaStage,
    lmc: LmcStage,
    medulla: MedullaStage,
    inhibition: InhibitionFilter,
    /// When false, the STMD/TSDN side is skipped and D/E/T come back
    /// zero; the LPTC output is still computed. Used by wide-field-only
    /// experiments where lateral inhibition would dominate the runtime.
    pub compute_stmd: bool,
    t: usize,
    timings: StageTimings,
}

impl Pipeline {
    pub fn new(config: &ModelConfig) -> Result<Pipeline> {
        config.validate()?;
        Ok(Pipeline {
            directions: config.directions()?,
            ommatidia: OmmatidiaStage::new(config)?,
            lmc: LmcStage::new(config)?,
            medulla: MedullaStage::new(config)?,
            inhibition: InhibitionFilter::new(config)?,
            config: config.clone(),
            compute_stmd: true,
            t: 0,
            timings: StageTimings::default(),
        })
    }

    pub fn timings(&self) -> &StageTimings {
        &self.timings
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    /// Warm-up transient of the full cascade: the LMC impulse response
    /// plus the longest medulla delay. Frames before this index carry
    /// startup transients and are excluded from metrics.
    pub fn warmup(&self) -> usize {
        self.lmc.len() + self.medulla.max_delay()
    }

    /// Process one input frame (luminance in [0, 255]).
    pub fn step(&mut self, frame: &Frame) -> Result<PipelineOutput> {
        let clock = Instant::now();
        let blurred = self.ommatidia.apply(frame);
        let lmc_out = self.lmc.push(blurred)?;
        let after_retina = Instant::now();
        self.timings.retina += after_retina - clock;
        let medulla_out = self.medulla.push(&lmc_out)?;
        let after_medulla = Instant::now();
        self.timings.medulla += after_medulla - after_retina;

        let f = lptc_correlate(&medulla_out, &self.directions, &self.config);
        let psi_index = estimate_background_direction(&f);
        let after_lptc = Instant::now();
        self.timings.lptc += after_lptc - after_medulla;
        self.timings.frames += 1;

        let (d, e, t_volume) = if self.compute_stmd {
            let d = correlate(&medulla_out, &self.directions, &self.config);
            let e = inhibit(&d, &self.inhibition);
            let after_stmd = Instant::now();
            self.timings.stmd += after_stmd - after_lptc;
            let t_volume = integrate(&e, &f, psi_index, self.config.alpha2)?;
            self.timings.tsdn += after_stmd.elapsed();
            (d, e, t_volume)
        } else {
            let zero = ResponseVolume::zeros(frame.width(), frame.height(), self.directions.clone());
            (zero.clone(), zero.clone(), zero)
        };

        let out = PipelineOutput {
            t: self.t,
            d,
            e,
            f,
            t_volume,
            psi_index,
        };
        self.t += 1;
        Ok(out)
    }
}
