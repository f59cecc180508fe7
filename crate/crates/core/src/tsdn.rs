//! TSDN integration: estimate the dominant background motion direction
//! from the LPTC output and subtract it from the STMD response on that
//! direction channel only.

use crate::detect::{detect, Detection};
use crate::error::{Error, Result};
use crate::volume::ResponseVolume;

/// Direction channel whose full-frame LPTC response sum is largest.
/// Ties (including an all-zero F) resolve to the smallest index.
pub fn estimate_background_direction(f: &ResponseVolume) -> usize {
    let mut best = 0;
    let mut best_sum = f.channel_sum(0);
    for i in 1..f.directions().len() {
        let s = f.channel_sum(i);
        if s > best_sum {
            best_sum = s;
            best = i;
        }
    }
    best
}

/// T = E - alpha2 * F(psi) on the background direction channel; every
/// other channel passes E through unchanged.
pub fn integrate(
    e: &ResponseVolume,
    f: &ResponseVolume,
    psi_index: usize,
    alpha2: f64,
) -> Result<ResponseVolume> {
    if e.directions() != f.directions() {
        return Err(Error::invalid("directions", "E and F direction sets differ"));
    }
    if e.width() != f.width() || e.height() != f.height() {
        return Err(Error::invalid("dimensions", "E and F dimensions differ"));
    }
    if psi_index >= e.directions().len() {
        return Err(Error::invalid("psi", "not in the direction set"));
    }
    let mut t = e.clone();
    {
        let inhibition = f.channel(psi_index);
        let ch = t.channel_mut(psi_index);
        for (v, &sup) in ch.data_mut().iter_mut().zip(inhibition.data()) {
            *v -= alpha2 * sup;
        }
    }
    Ok(t)
}

/// Threshold T at beta; same extraction as the STMD path.
pub fn detect_tsdn(t_volume: &ResponseVolume, beta: f64, t: usize) -> Vec<Detection> {
    detect(t_volume, beta, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DirectionSet;
    use crate::stmd::detect_stmd;
    use std::f64::consts::PI;

    fn dirs() -> DirectionSet {
        DirectionSet::new(8).unwrap()
    }

    #[test]
    fn background_direction_is_argmax_of_channel_sums() {
        let mut f = ResponseVolume::zeros(4, 4, dirs());
        f.channel_mut(4).set(1, 1, 3.0); // channel 4 is pi
        assert_eq!(estimate_background_direction(&f), 4);
        assert!((f.directions().angle(4) - PI).abs() < 1e-15);
    }

    #[test]
    fn all_zero_f_ties_to_index_zero() {
        let f = ResponseVolume::zeros(4, 4, dirs());
        assert_eq!(estimate_background_direction(&f), 0);
        assert_eq!(f.directions().angle(0), 0.0);
    }

    #[test]
    fn argmax_with_mixed_sums() {
        let mut f = ResponseVolume::zeros(4, 4, dirs());
        f.channel_mut(0).set(0, 0, 1.0);
        f.channel_mut(2).set(0, 0, 2.5); // pi/2
        for i in [1, 3, 5, 6, 7] {
            f.channel_mut(i).set(0, 0, 0.3);
        }
        let psi = estimate_background_direction(&f);
        assert_eq!(psi, 2);
        assert!((f.directions().angle(psi) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gain_passes_e_through() {
        let mut e = ResponseVolume::zeros(4, 4, dirs());
        e.channel_mut(3).set(2, 2, 7.0);
        let mut f = ResponseVolume::zeros(4, 4, dirs());
        f.channel_mut(3).set(2, 2, 100.0);
        let t = integrate(&e, &f, 3, 0.0).unwrap();
        assert_eq!(&t, &e);
    }

    #[test]
    fn only_psi_channel_is_suppressed() {
        let mut e = ResponseVolume::zeros(4, 4, dirs());
        let mut f = ResponseVolume::zeros(4, 4, dirs());
        for d in 0..8 {
            e.channel_mut(d).set(1, 1, 200.0);
            f.channel_mut(d).set(1, 1, 20.0);
        }
        let t = integrate(&e, &f, 0, 3.5).unwrap();
        assert_eq!(t.get(1, 1, 0), 200.0 - 3.5 * 20.0);
        for d in 1..8 {
            // Bit-for-bit identical off the psi channel.
            assert_eq!(t.channel(d), e.channel(d));
        }
    }

    #[test]
    fn psi_out_of_range_is_rejected() {
        let e = ResponseVolume::zeros(4, 4, dirs());
        let f = ResponseVolume::zeros(4, 4, dirs());
        assert!(integrate(&e, &f, 8, 1.0).is_err());
    }

    #[test]
    fn suppressed_blob_is_dropped_but_other_channels_detect() {
        // E = 160 on the psi channel with F = 20 there, alpha2 = 3.5,
        // beta = 150: suppressed to 90, no detection. The same blob on a
        // non-psi channel passes through at 160 and is detected.
        let mut e = ResponseVolume::zeros(8, 8, dirs());
        e.channel_mut(0).set(3, 3, 160.0);
        let mut f = ResponseVolume::zeros(8, 8, dirs());
        f.channel_mut(0).set(3, 3, 20.0);
        let t = integrate(&e, &f, 0, 3.5).unwrap();
        assert_eq!(t.get(3, 3, 0), 90.0);
        assert!(detect_tsdn(&t, 150.0, 0).is_empty());

        let mut e2 = ResponseVolume::zeros(8, 8, dirs());
        e2.channel_mut(2).set(3, 3, 160.0); // psi + pi/2
        let t2 = integrate(&e2, &f, 0, 3.5).unwrap();
        let dets = detect_tsdn(&t2, 150.0, 0);
        assert_eq!(dets.len(), 1);
        assert_eq!(dets[0].response, 160.0);
    }

    #[test]
    fn alpha2_zero_matches_stmd_detections() {
        let mut e = ResponseVolume::zeros(8, 8, dirs());
        e.channel_mut(5).set(2, 6, 180.0);
        e.channel_mut(1).set(6, 1, 151.0);
        let mut f = ResponseVolume::zeros(8, 8, dirs());
        f.channel_mut(5).set(2, 6, 50.0);
        let t = integrate(&e, &f, 5, 0.0).unwrap();
        assert_eq!(detect_tsdn(&t, 150.0, 3), detect_stmd(&e, 150.0, 3));
    }

    #[test]
    fn increasing_gain_never_raises_psi_channel() {
        // Well-separated single-pixel responses: the count is then simply
        // the number of supra-threshold pixels, monotone in the gain.
        let mut e = ResponseVolume::zeros(32, 8, dirs());
        let mut f = ResponseVolume::zeros(32, 8, dirs());
        for k in 0..6 {
            e.channel_mut(0).set(2 + 5 * k, 4, 160.0 + 8.0 * k as f64);
            f.channel_mut(0).set(2 + 5 * k, 4, 2.0 * k as f64);
        }
        let mut prev_count = usize::MAX;
        let mut prev_max = f64::INFINITY;
        for alpha2 in [0.0, 1.0, 2.0, 3.5, 10.0] {
            let t = integrate(&e, &f, 0, alpha2).unwrap();
            let max = t.channel(0).data().iter().cloned().fold(f64::MIN, f64::max);
            assert!(max <= prev_max);
            let count = detect_tsdn(&t, 150.0, 0).len();
            assert!(count <= prev_count);
            prev_max = max;
            prev_count = count;
        }
    }
}
