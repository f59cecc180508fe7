//! Synthetic stimulus generation with exact ground truth: a panorama
//! background translating horizontally (wrap-around sampling), plus an
//! optional small rectangular target composited opaquely along a
//! configurable trajectory.

use crate::error::{Error, Result};
use crate::frame::{Frame, ImageSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Background content of a stimulus.
#[derive(Debug, Clone)]
pub enum Background {
    /// Procedurally generated clutter, deterministic for a fixed seed.
    Procedural { seed: u64 },
    /// Uniform luminance, for clutter-free tuning experiments.
    Uniform { level: f64 },
    /// Caller-supplied panorama (e.g. loaded from a PGM file).
    Panorama(Frame),
}

/// Target centre position over time.
#[derive(Debug, Clone)]
pub enum Trajectory {
    /// Constant velocity along a fixed direction. Speed in px/s,
    /// direction in radians (y axis points down the rows).
    Linear {
        start_x: f64,
        start_y: f64,
        speed: f64,
        direction: f64,
    },
    /// Linear motion that wraps back to the start after travelling
    /// `span` pixels, keeping the target on screen indefinitely.
    LinearLoop {
        start_x: f64,
        start_y: f64,
        speed: f64,
        direction: f64,
        span: f64,
    },
    /// The reference curvilinear trajectory
    /// (500 - 250 (t+300)/1000, 125 + 15 sin(4 pi (t+300)/1000)), t in ms.
    ReferenceSinusoid,
    /// Waypoints visited at evenly spaced times over the duration,
    /// linearly interpolated.
    Waypoints(Vec<(f64, f64)>),
}

/// Reference sinusoidal trajectory evaluated at time t in milliseconds.
pub fn reference_sinusoid(t_ms: f64) -> Result<(f64, f64)> {
    if !(0.0..=1000.0).contains(&t_ms) {
        return Err(Error::invalid("t", format!("{t_ms} ms outside [0, 1000]")));
    }
    let u = (t_ms + 300.0) / 1000.0;
    Ok((500.0 - 250.0 * u, 125.0 + 15.0 * (4.0 * PI * u).sin()))
}

impl Trajectory {
    /// Centre position at frame `t` of `duration` at `sample_rate` fps.
    pub fn position(&self, t: usize, duration: usize, sample_rate: f64) -> Result<(f64, f64)> {
        let secs = t as f64 / sample_rate;
        match self {
            Trajectory::Linear {
                start_x,
                start_y,
                speed,
                direction,
            } => Ok((
                start_x + speed * direction.cos() * secs,
                start_y + speed * direction.sin() * secs,
            )),
            Trajectory::LinearLoop {
                start_x,
                start_y,
                speed,
                direction,
                span,
            } => {
                let travelled = (speed * secs).rem_euclid(*span);
                Ok((
                    start_x + travelled * direction.cos(),
                    start_y + travelled * direction.sin(),
                ))
            }
            Trajectory::ReferenceSinusoid => reference_sinusoid(t as f64 * 1000.0 / sample_rate),
            Trajectory::Waypoints(points) => {
                if points.is_empty() {
                    return Err(Error::invalid("waypoints", "list is empty"));
                }
                if points.len() == 1 || duration <= 1 {
                    return Ok(points[0]);
                }
                let pos = t as f64 / (duration - 1) as f64 * (points.len() - 1) as f64;
                let i = (pos.floor() as usize).min(points.len() - 2);
                let frac = pos - i as f64;
                let (x0, y0) = points[i];
                let (x1, y1) = points[i + 1];
                Ok((x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)))
            }
        }
    }

    /// Instantaneous motion direction at frame `t`: atan2 of the central
    /// difference of the position (one-sided at the sequence ends).
    pub fn direction(&self, t: usize, duration: usize, sample_rate: f64) -> Result<f64> {
        let t0 = t.saturating_sub(1);
        let t1 = (t + 1).min(duration.saturating_sub(1));
        if t1 == t0 {
            return Ok(0.0);
        }
        let (x0, y0) = self.position(t0, duration, sample_rate)?;
        let (x1, y1) = self.position(t1, duration, sample_rate)?;
        Ok((y1 - y0).atan2(x1 - x0))
    }
}

/// Rectangular target composited over the background.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    /// Luminance in [0, 255]; the reference experiments use 0.
    pub luminance: f64,
    /// Extent parallel to the motion direction.
    pub width: usize,
    /// Extent orthogonal to the motion direction.
    pub height: usize,
    pub trajectory: Trajectory,
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone)]
pub struct StimulusSpec {
    pub width: usize,
    pub height: usize,
    /// Number of frames.
    pub duration: usize,
    /// Frames per second.
    pub sample_rate: f64,
    pub background: Background,
    /// Signed horizontal background velocity, px/s (positive = rightward).
    pub background_velocity: f64,
    pub target: Option<TargetSpec>,
}

impl Default for StimulusSpec {
    fn default() -> Self {
        StimulusSpec {
            width: 500,
            height: 250,
            duration: 1001,
            sample_rate: 1000.0,
            background: Background::Procedural { seed: 0 },
            background_velocity: 250.0,
            target: Some(TargetSpec {
                luminance: 0.0,
                width: 5,
                height: 5,
                trajectory: Trajectory::ReferenceSinusoid,
            }),
        }
    }
}

/// Per-frame true target centre (real-valued pixels) and instantaneous
/// motion direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthTrack {
    pub positions: Vec<(f64, f64)>,
    pub directions: Vec<f64>,
}

impl GroundTruthTrack {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Deterministic clutter panorama: coarse multi-scale value noise for
/// large structure, overlaid with a dense field of small fixed-amplitude
/// speckles, rescaled so the histogram spans [10, 245].
pub fn procedural_background(seed: u64, width: usize, height: usize) -> Frame {
    assert!(width > 0 && height > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0f64; width * height];

    // Low-frequency structure: bilinearly upsampled random grids.
    let octaves: [(usize, f64); 2] = [(48, 0.55), (24, 0.3)];
    for (cell, weight) in octaves {
        let gw = width / cell + 2;
        let gh = height / cell + 2;
        let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(0.0..1.0)).collect();
        for y in 0..height {
            for x in 0..width {
                let fx = x as f64 / cell as f64;
                let fy = y as f64 / cell as f64;
                let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
                let (tx, ty) = (fx - ix as f64, fy - iy as f64);
                let v00 = grid[iy * gw + ix];
                let v10 = grid[iy * gw + ix + 1];
                let v01 = grid[(iy + 1) * gw + ix];
                let v11 = grid[(iy + 1) * gw + ix + 1];
                let v = v00 * (1.0 - tx) * (1.0 - ty)
                    + v10 * tx * (1.0 - ty)
                    + v01 * (1.0 - tx) * ty
                    + v11 * tx * ty;
                data[y * width + x] += weight * v;
            }
        }
    }

    // Speckle field: small bright 3x3 bumps of fixed amplitude.
    let speck_count = (width * height / 1250).max(8);
    let speck_amp = 0.18;
    for _ in 0..speck_count {
        let cx = rng.gen_range(0..width.saturating_sub(2).max(1));
        let cy = rng.gen_range(0..height.saturating_sub(2).max(1));
        let amp = speck_amp;
        for dy in 0..3usize {
            for dx in 0..3usize {
                let (x, y) = (cx + dx, cy + dy);
                if x < width && y < height {
                    data[y * width + x] += amp;
                }
            }
        }
    }

    let min = data.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = if max > min { 235.0 / (max - min) } else { 0.0 };
    for v in &mut data {
        *v = 10.0 + (*v - min) * scale;
    }
    Frame::from_data(width, height, data).expect("dimensions validated above")
}

/// Panorama width needed to cover the background drift without reuse.
fn required_panorama_width(spec: &StimulusSpec) -> usize {
    let drift = (spec.background_velocity.abs() * spec.duration as f64 / spec.sample_rate).ceil();
    spec.width + drift as usize + 1
}

fn sample_panorama(pano: &Frame, x: f64, y: usize) -> f64 {
    let w = pano.width() as f64;
    let xw = x.rem_euclid(w);
    let x0 = xw.floor() as usize % pano.width();
    let x1 = (x0 + 1) % pano.width();
    let frac = xw - xw.floor();
    pano.get(x0, y) * (1.0 - frac) + pano.get(x1, y) * frac
}

/// Render the full sequence and its ground truth. Deterministic for a
/// fixed spec.
pub fn generate(spec: &StimulusSpec) -> Result<(ImageSequence, GroundTruthTrack)> {
    if spec.duration == 0 {
        return Err(Error::invalid("duration", "must be positive"));
    }
    if spec.sample_rate <= 0.0 {
        return Err(Error::invalid("sample_rate", "must be positive"));
    }
    let pano_width = required_panorama_width(spec);
    let panorama = match &spec.background {
        Background::Procedural { seed } => procedural_background(*seed, pano_width, spec.height),
        Background::Uniform { level } => Frame::constant(pano_width, spec.height, *level),
        Background::Panorama(frame) => {
            if frame.height() != spec.height {
                return Err(Error::invalid(
                    "panorama",
                    format!(
                        "panorama height {} does not match frame height {}",
                        frame.height(),
                        spec.height
                    ),
                ));
            }
            if frame.width() < pano_width {
                return Err(Error::invalid(
                    "panorama",
                    format!(
                        "panorama width {} is narrower than the required {pano_width}",
                        frame.width()
                    ),
                ));
            }
            frame.clone()
        }
    };

    // Validate the target trajectory up front so ground truth and frames
    // cannot disagree.
    let mut track = GroundTruthTrack {
        positions: Vec::new(),
        directions: Vec::new(),
    };
    if let Some(target) = &spec.target {
        for t in 0..spec.duration {
            let (cx, cy) = target
                .trajectory
                .position(t, spec.duration, spec.sample_rate)?;
            let x0 = (cx - (target.width as f64 - 1.0) / 2.0).round() as isize;
            let y0 = (cy - (target.height as f64 - 1.0) / 2.0).round() as isize;
            if x0 < 0
                || y0 < 0
                || x0 + target.width as isize > spec.width as isize
                || y0 + target.height as isize > spec.height as isize
            {
                return Err(Error::invalid(
                    "trajectory",
                    format!("target leaves the frame at frame {t} (centre {cx:.1}, {cy:.1})"),
                ));
            }
            track.positions.push((cx, cy));
            track
                .directions
                .push(target.trajectory.direction(t, spec.duration, spec.sample_rate)?);
        }
    }

    let mut frames = Vec::with_capacity(spec.duration);
    for t in 0..spec.duration {
        let shift = spec.background_velocity * t as f64 / spec.sample_rate;
        let mut frame = Frame::from_fn(spec.width, spec.height, |x, y| {
            sample_panorama(&panorama, x as f64 - shift, y)
        });
        if let Some(target) = &spec.target {
            let (cx, cy) = track.positions[t];
            let x0 = (cx - (target.width as f64 - 1.0) / 2.0).round() as usize;
            let y0 = (cy - (target.height as f64 - 1.0) / 2.0).round() as usize;
            for y in y0..y0 + target.height {
                for x in x0..x0 + target.width {
                    frame.set(x, y, target.luminance);
                }
            }
        }
        frames.push(frame);
    }

    Ok((ImageSequence::new(frames, spec.sample_rate)?, track))
}
