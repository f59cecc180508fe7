//! Quantitative evaluation: Weber contrast, detection matching against
//! ground truth, detection/false-alarm rates, ROC sweeps over the
//! detection threshold, and tuning-curve experiments.

use crate::config::{DirectionSet, ModelConfig};
use crate::detect::{detect_from_maps, Detection};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::pipeline::Pipeline;
use crate::stimulus::{generate, Background, StimulusSpec, TargetSpec, Trajectory};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Weber contrast |mu_t - mu_b| / 255 of a w x h rectangle centred at
/// `center`, against the surrounding annulus of margin d.
pub fn weber_contrast(
    frame: &Frame,
    center: (f64, f64),
    w: usize,
    h: usize,
    d: usize,
) -> Result<f64> {
    let x0 = (center.0 - (w as f64 - 1.0) / 2.0).round() as isize;
    let y0 = (center.1 - (h as f64 - 1.0) / 2.0).round() as isize;
    let (bx0, by0) = (x0 - d as isize, y0 - d as isize);
    let (bx1, by1) = (x0 + w as isize + d as isize, y0 + h as isize + d as isize);
    if bx0 < 0 || by0 < 0 || bx1 > frame.width() as isize || by1 > frame.height() as isize {
        return Err(Error::invalid(
            "center",
            "background rectangle extends outside the frame",
        ));
    }
    let mut target_sum = 0.0;
    let mut annulus_sum = 0.0;
    let mut annulus_count = 0usize;
    for y in by0..by1 {
        for x in bx0..bx1 {
            let v = frame.get(x as usize, y as usize);
            let inside = x >= x0 && x < x0 + w as isize && y >= y0 && y < y0 + h as isize;
            if inside {
                target_sum += v;
            } else {
                annulus_sum += v;
                annulus_count += 1;
            }
        }
    }
    let mu_t = target_sum / (w * h) as f64;
    let mu_b = annulus_sum / annulus_count as f64;
    Ok((mu_t - mu_b).abs() / 255.0)
}

/// Outcome of matching one frame's detections against its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecord {
    pub t: usize,
    pub truth: Option<(f64, f64)>,
    /// Index (within the frame's detection list) of the true detection.
    pub matched: Option<usize>,
    pub false_count: usize,
}

/// Detection rate and false alarm rate over an evaluated window.
#[derive(Debug, Clone)]
pub struct EvalReport {
    /// True detections / actual targets, in [0, 1].
    pub detection_rate: f64,
    /// False detections / frames evaluated.
    pub false_alarm_rate: f64,
    pub frames_evaluated: usize,
    pub actual_targets: usize,
    pub true_detections: usize,
    pub false_detections: usize,
    pub records: Vec<MatchRecord>,
}

/// Match per-frame detections against the true target centre. A
/// detection within `radius` (Euclidean) of the truth is true, at most
/// one per frame: the nearest wins, distance ties go to the larger
/// response, then the smaller index. Frames before `warmup` are the
/// startup transient and are skipped.
pub fn match_and_score(
    detections: &[Vec<Detection>],
    truth: &[Option<(f64, f64)>],
    radius: f64,
    warmup: usize,
) -> Result<EvalReport> {
    if radius <= 0.0 {
        return Err(Error::invalid("radius", "must be positive"));
    }
    if detections.len() != truth.len() {
        return Err(Error::invalid(
            "truth",
            format!(
                "detections cover {} frames but truth covers {}",
                detections.len(),
                truth.len()
            ),
        ));
    }
    let mut report = EvalReport {
        detection_rate: 0.0,
        false_alarm_rate: 0.0,
        frames_evaluated: 0,
        actual_targets: 0,
        true_detections: 0,
        false_detections: 0,
        records: Vec::new(),
    };
    for t in warmup..detections.len() {
        let dets = &detections[t];
        let mut matched = None;
        if let Some((tx, ty)) = truth[t] {
            report.actual_targets += 1;
            let mut best: Option<(usize, f64, f64)> = None; // (index, dist, response)
            for (i, det) in dets.iter().enumerate() {
                let dist = ((det.x as f64 - tx).powi(2) + (det.y as f64 - ty).powi(2)).sqrt();
                if dist > radius {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((_, bd, br)) => dist < bd || (dist == bd && det.response > br),
                };
                if better {
                    best = Some((i, dist, det.response));
                }
            }
            if let Some((i, _, _)) = best {
                matched = Some(i);
                report.true_detections += 1;
            }
        }
        let false_count = dets.len() - matched.map_or(0, |_| 1);
        report.false_detections += false_count;
        report.frames_evaluated += 1;
        report.records.push(MatchRecord {
            t,
            truth: truth[t],
            matched,
            false_count,
        });
    }
    if report.actual_targets > 0 {
        report.detection_rate = report.true_detections as f64 / report.actual_targets as f64;
    }
    if report.frames_evaluated > 0 {
        report.false_alarm_rate = report.false_detections as f64 / report.frames_evaluated as f64;
    }
    Ok(report)
}

/// One point of an ROC sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub beta: f64,
    pub false_alarm_rate: f64,
    pub detection_rate: f64,
}

/// Sweep the detection threshold over per-frame maps of the per-pixel
/// maximum response (one map per frame, as produced by
/// [`ResponseVolume::max_over_directions`]). Grid must be sorted
/// ascending; output is one point per threshold, in grid order.
///
/// [`ResponseVolume::max_over_directions`]: crate::volume::ResponseVolume::max_over_directions
pub fn roc_sweep(
    max_maps: &[Frame],
    directions: &DirectionSet,
    truth: &[Option<(f64, f64)>],
    beta_grid: &[f64],
    radius: f64,
    warmup: usize,
) -> Result<Vec<RocPoint>> {
    if beta_grid.is_empty() {
        return Err(Error::invalid("beta_grid", "must be nonempty"));
    }
    if beta_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("beta_grid", "must be sorted ascending"));
    }
    beta_grid
        .par_iter()
        .map(|&beta| {
            let detections: Vec<Vec<Detection>> = max_maps
                .iter()
                .enumerate()
                .map(|(t, map)| {
                    let argdir = vec![0u8; map.width() * map.height()];
                    detect_from_maps(map, &argdir, directions, beta, t)
                })
                .collect();
            let report = match_and_score(&detections, truth, radius, warmup)?;
            Ok(RocPoint {
                beta,
                false_alarm_rate: report.false_alarm_rate,
                detection_rate: report.detection_rate,
            })
        })
        .collect()
}

/// Linearly interpolated detection rate of a curve at a given false
/// alarm rate. Points outside the curve's F_A range clamp to the
/// nearest endpoint.
fn interpolate_dr(curve: &[(f64, f64)], fa: f64) -> f64 {
    // curve: sorted by fa ascending
    if fa <= curve[0].0 {
        return curve[0].1;
    }
    if fa >= curve[curve.len() - 1].0 {
        return curve[curve.len() - 1].1;
    }
    for w in curve.windows(2) {
        let ((fa0, dr0), (fa1, dr1)) = (w[0], w[1]);
        if fa >= fa0 && fa <= fa1 {
            if fa1 == fa0 {
                return dr0.max(dr1);
            }
            return dr0 + (dr1 - dr0) * (fa - fa0) / (fa1 - fa0);
        }
    }
    curve[curve.len() - 1].1
}

fn sorted_by_fa(points: &[RocPoint]) -> Vec<(f64, f64)> {
    let mut c: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.false_alarm_rate, p.detection_rate))
        .collect();
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c
}

/// Check whether curve `upper` dominates curve `lower`:
/// DR_upper(fa) >= DR_lower(fa) - tolerance at every common F_A taken
/// from both curves' points (linear interpolation in between). Also
/// returns the number of evaluation points with a strict improvement.
pub fn roc_dominates(upper: &[RocPoint], lower: &[RocPoint], tolerance: f64) -> (bool, usize) {
    let cu = sorted_by_fa(upper);
    let cl = sorted_by_fa(lower);
    let lo = cu[0].0.max(cl[0].0);
    let hi = cu[cu.len() - 1].0.min(cl[cl.len() - 1].0);
    let mut dominated = true;
    let mut strict = 0usize;
    for &(fa, _) in cu.iter().chain(cl.iter()) {
        if fa < lo || fa > hi {
            continue;
        }
        let du = interpolate_dr(&cu, fa);
        let dl = interpolate_dr(&cl, fa);
        if du < dl - tolerance {
            dominated = false;
        }
        if du > dl + 1e-12 {
            strict += 1;
        }
    }
    (dominated, strict)
}

/// Attribute swept by a tuning experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningAttribute {
    WeberContrast,
    Velocity,
    Width,
    Height,
}

impl std::str::FromStr for TuningAttribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<TuningAttribute> {
        match s {
            "contrast" | "weber_contrast" => Ok(TuningAttribute::WeberContrast),
            "velocity" => Ok(TuningAttribute::Velocity),
            "width" => Ok(TuningAttribute::Width),
            "height" => Ok(TuningAttribute::Height),
            other => Err(Error::invalid(
                "attribute",
                format!("unknown attribute `{other}` (expected contrast|velocity|width|height)"),
            )),
        }
    }
}

/// Peak STMD and LPTC responses across an attribute sweep, each
/// normalized to 1 at its own maximum.
#[derive(Debug, Clone)]
pub struct TuningCurve {
    pub attribute: TuningAttribute,
    pub values: Vec<f64>,
    pub stmd: Vec<f64>,
    pub lptc: Vec<f64>,
}

/// Scene scale for tuning experiments.
#[derive(Debug, Clone, Copy)]
pub struct TuningScale {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
}

impl Default for TuningScale {
    fn default() -> Self {
        TuningScale {
            width: 100,
            height: 100,
            frames: 500,
        }
    }
}

/// Base stimulus for tuning: Weber contrast 1, 250 px/s, 5 x 5 px, dark
/// target drifting leftward over a uniform bright background. One
/// attribute is varied per sweep; the pre-threshold peak of E (STMD) and
/// F (LPTC) within a window around the true target position is recorded
/// over the steady-state frames and max-normalized per neuron.
pub fn tuning_experiment(
    attribute: TuningAttribute,
    grid: &[f64],
    config: &ModelConfig,
    scale: TuningScale,
) -> Result<TuningCurve> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must be nonempty"));
    }
    let results: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&value| tuning_point(attribute, value, config, scale))
        .collect::<Result<_>>()?;
    let mut stmd: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mut lptc: Vec<f64> = results.iter().map(|r| r.1).collect();
    for series in [&mut stmd, &mut lptc] {
        let max = series.iter().cloned().fold(0.0f64, f64::max);
        if max > 0.0 {
            for v in series.iter_mut() {
                *v /= max;
            }
        }
    }
    Ok(TuningCurve {
        attribute,
        values: grid.to_vec(),
        stmd,
        lptc,
    })
}

fn tuning_point(
    attribute: TuningAttribute,
    value: f64,
    config: &ModelConfig,
    scale: TuningScale,
) -> Result<(f64, f64)> {
    let mut contrast = 1.0;
    let mut velocity = 250.0;
    let mut width = 5usize;
    let mut height = 5usize;
    match attribute {
        TuningAttribute::WeberContrast => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::invalid("grid", "Weber contrast must be in [0, 1]"));
            }
            contrast = value;
        }
        TuningAttribute::Velocity => {
            if value <= 0.0 {
                return Err(Error::invalid("grid", "velocity must be positive"));
            }
            velocity = value;
        }
        TuningAttribute::Width => width = value.round().max(1.0) as usize,
        TuningAttribute::Height => height = value.round().max(1.0) as usize,
    }
    let background_level = 255.0;
    let target_luminance = 255.0 * (1.0 - contrast);
    let margin = 5.0 + width.max(height) as f64 / 2.0;
    let span = scale.width as f64 - 2.0 * margin;
    let spec = StimulusSpec {
        width: scale.width,
        height: scale.height,
        duration: scale.frames,
        sample_rate: 1000.0,
        background: Background::Uniform {
            level: background_level,
        },
        background_velocity: 0.0,
        target: Some(TargetSpec {
            luminance: target_luminance,
            width,
            height,
            trajectory: Trajectory::LinearLoop {
                start_x: scale.width as f64 - margin,
                start_y: scale.height as f64 / 2.0,
                speed: velocity,
                direction: PI,
                span,
            },
        }),
    };
    let (seq, track) = generate(&spec)?;
    let mut pipe = Pipeline::new(config)?;
    let warmup = pipe.warmup();
    // The response smears along the motion axis (delayed correlates and
    // the leading/trailing edges), so the readout window follows the
    // target's extent there. Orthogonally it stays fixed: the statistic
    // reads the response at the target's row, not end-of-edge effects.
    let window_x = 8 + width as isize / 2;
    let window_y = 4;
    let window = window_x.max(window_y);
    // The loop wrap makes the target pop in and out at the span
    // endpoints, and those appearance transients would contaminate the
    // peak. Their footprint is local (ommatidia blur + inhibition
    // surround + correlation offset, ~16 px) and dies off within the
    // longest delay kernel, so a frame is clean once the target is far
    // from both endpoints or the last wrap is old enough.
    let exclusion_radius = window as f64 + 16.0;
    let flash_decay = 0.15;
    let mut peak_e = 0.0f64;
    let mut peak_f = 0.0f64;
    for (t, frame) in seq.frames.iter().enumerate() {
        let out = pipe.step(frame)?;
        if t < warmup {
            continue;
        }
        let phase = (velocity * t as f64 / spec.sample_rate) % span;
        let clear_of_endpoints = phase > exclusion_radius && span - phase > exclusion_radius;
        if phase / velocity <= flash_decay && !clear_of_endpoints {
            continue;
        }
        let (cx, cy) = track.positions[t];
        let (cx, cy) = (cx.round() as isize, cy.round() as isize);
        for dir in 0..out.e.directions().len() {
            for dy in -window_y..=window_y {
                for dx in -window_x..=window_x {
                    let (x, y) = (cx + dx, cy + dy);
                    if x < 0 || y < 0 || x >= scale.width as isize || y >= scale.height as isize {
                        continue;
                    }
                    let (x, y) = (x as usize, y as usize);
                    peak_e = peak_e.max(out.e.get(x, y, dir));
                    peak_f = peak_f.max(out.f.get(x, y, dir));
                }
            }
        }
    }
    Ok((peak_e, peak_f))
}
