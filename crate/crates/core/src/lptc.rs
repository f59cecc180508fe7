//! Wide-field motion detector: two-quadrant correlator over the medulla
//! outputs (ON x delayed-ON plus OFF x delayed-OFF), one response frame
//! per preferred direction.

use crate::config::{DirectionSet, ModelConfig};
use crate::detect::{detect, Detection};
use crate::frame::Frame;
use crate::medulla::MedullaOutputs;
use crate::stmd::partner_offset;
use crate::volume::ResponseVolume;

/// Two-quadrant correlation. Offset rounding and out-of-bounds rules are
/// identical to the STMD correlator; the same alpha1 baseline is reused.
pub fn lptc_correlate(
    medulla: &MedullaOutputs,
    directions: &DirectionSet,
    config: &ModelConfig,
) -> ResponseVolume {
    let (w, h) = (medulla.tm3.width(), medulla.tm3.height());
    let channels = directions
        .angles()
        .iter()
        .map(|&psi| {
            let (dx, dy) = partner_offset(config.alpha1, psi);
            let mut out = Frame::zeros(w, h);
            for y in 0..h {
                for x in 0..w {
                    let (px, py) = (x as isize + dx, y as isize + dy);
                    let f = medulla.tm3.get(x, y) * medulla.mi1_lptc.get_or_zero(px, py)
                        + medulla.tm2.get(x, y) * medulla.tm1_lptc.get_or_zero(px, py);
                    out.set(x, y, f);
                }
            }
            out
        })
        .collect();
    ResponseVolume::from_channels(directions.clone(), channels)
}

/// Threshold F at gamma and extract background-object detections.
pub fn detect_background(f: &ResponseVolume, gamma: f64, t: usize) -> Vec<Detection> {
    detect(f, gamma, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_medulla(w: usize, h: usize) -> MedullaOutputs {
        MedullaOutputs {
            tm3: Frame::zeros(w, h),
            tm2: Frame::zeros(w, h),
            mi1_stmd: Frame::zeros(w, h),
            tm1_center: Frame::zeros(w, h),
            tm1_offset: Frame::zeros(w, h),
            mi1_lptc: Frame::zeros(w, h),
            tm1_lptc: Frame::zeros(w, h),
        }
    }

    #[test]
    fn zero_medulla_gives_zero_f() {
        let med = zero_medulla(8, 8);
        let dirs = DirectionSet::new(8).unwrap();
        let f = lptc_correlate(&med, &dirs, &ModelConfig::default());
        for ch in f.channels() {
            assert_eq!(ch.max_abs(), 0.0);
        }
    }

    #[test]
    fn on_only_stimulus_reduces_to_first_term() {
        let mut med = zero_medulla(9, 5);
        med.tm3.set(5, 2, 2.0);
        med.mi1_lptc.set(2, 2, 1.5);
        med.tm1_lptc.set(2, 2, 9.0); // must not contribute: tm2 = 0
        let dirs = DirectionSet::new(8).unwrap();
        let f = lptc_correlate(&med, &dirs, &ModelConfig::default());
        assert_eq!(f.get(5, 2, 0), 3.0);
    }

    #[test]
    fn f_is_nonnegative() {
        let mut med = zero_medulla(7, 7);
        for y in 0..7 {
            for x in 0..7 {
                med.tm3.set(x, y, x as f64);
                med.tm2.set(x, y, y as f64);
                med.mi1_lptc.set(x, y, 0.5);
                med.tm1_lptc.set(x, y, 0.25);
            }
        }
        let dirs = DirectionSet::new(8).unwrap();
        let f = lptc_correlate(&med, &dirs, &ModelConfig::default());
        for ch in f.channels() {
            assert!(ch.data().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn negative_gamma_detects_on_nonzero_f() {
        let mut med = zero_medulla(9, 5);
        med.tm3.set(5, 2, 2.0);
        med.mi1_lptc.set(2, 2, 1.5);
        let dirs = DirectionSet::new(8).unwrap();
        let f = lptc_correlate(&med, &dirs, &ModelConfig::default());
        assert!(detect_background(&f, 100.0, 0).is_empty());
        assert_eq!(detect_background(&f, -1.0, 0).len(), 1);
    }
}
