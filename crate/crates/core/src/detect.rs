//! Detection extraction shared by the STMD, LPTC and TSDN outputs:
//! threshold the per-pixel maximum over direction channels, group
//! supra-threshold pixels into 8-connected components, and report one
//! detection per component at its strongest pixel.

use crate::config::DirectionSet;
use crate::frame::Frame;
use crate::volume::ResponseVolume;

/// One detected object at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Frame index within the sequence.
    pub t: usize,
    pub x: usize,
    pub y: usize,
    /// Preferred direction of the maximally responding channel, radians.
    pub direction: f64,
    /// Response value at the detection pixel.
    pub response: f64,
}

/// Threshold a response volume and extract detections.
pub fn detect(volume: &ResponseVolume, threshold: f64, t: usize) -> Vec<Detection> {
    let (max, argdir) = volume.max_over_directions();
    detect_from_maps(&max, &argdir, volume.directions(), threshold, t)
}

/// Same extraction given the precomputed per-pixel maximum map and the
/// index of the maximizing direction.
pub fn detect_from_maps(
    max: &Frame,
    argdir: &[u8],
    directions: &DirectionSet,
    threshold: f64,
    t: usize,
) -> Vec<Detection> {
    let (w, h) = (max.width(), max.height());
    debug_assert_eq!(argdir.len(), w * h);
    let data = max.data();
    let mut visited = vec![false; w * h];
    let mut detections = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if visited[start] || data[start] <= threshold {
            continue;
        }
        // Flood-fill one 8-connected component, tracking its peak.
        let mut best = start;
        visited[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            if data[idx] > data[best] {
                best = idx;
            }
            let (x, y) = (idx % w, idx / w);
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if !visited[nidx] && data[nidx] > threshold {
                        visited[nidx] = true;
                        stack.push(nidx);
                    }
                }
            }
        }
        detections.push(Detection {
            t,
            x: best % w,
            y: best / w,
            direction: directions.angle(argdir[best] as usize),
            response: data[best],
        });
    }
    detections
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DirectionSet;
    use std::f64::consts::PI;

    fn dirs() -> DirectionSet {
        DirectionSet::new(8).unwrap()
    }

    #[test]
    fn all_below_threshold_yields_nothing() {
        let vol = ResponseVolume::zeros(8, 8, dirs());
        assert!(detect(&vol, 0.5, 0).is_empty());
    }

    #[test]
    fn isolated_pixel_reports_its_direction() {
        let mut vol = ResponseVolume::zeros(8, 8, dirs());
        vol.channel_mut(1).set(3, 4, 10.0); // channel 1 is pi/4
        let dets = detect(&vol, 5.0, 7);
        assert_eq!(dets.len(), 1);
        let d = &dets[0];
        assert_eq!((d.t, d.x, d.y), (7, 3, 4));
        assert!((d.direction - PI / 4.0).abs() < 1e-15);
        assert_eq!(d.response, 10.0);
    }

    #[test]
    fn two_distant_blobs_give_two_detections() {
        let mut vol = ResponseVolume::zeros(60, 10, dirs());
        for dx in 0..3 {
            vol.channel_mut(0).set(5 + dx, 5, 8.0);
            vol.channel_mut(0).set(45 + dx, 5, 9.0);
        }
        vol.channel_mut(0).set(6, 5, 12.0);
        let dets = detect(&vol, 5.0, 0);
        assert_eq!(dets.len(), 2);
        assert_eq!((dets[0].x, dets[0].y), (6, 5));
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let mut vol = ResponseVolume::zeros(8, 8, dirs());
        vol.channel_mut(0).set(2, 2, 7.0);
        vol.channel_mut(0).set(3, 3, 9.0);
        let dets = detect(&vol, 5.0, 0);
        assert_eq!(dets.len(), 1);
        assert_eq!((dets[0].x, dets[0].y), (3, 3));
    }

    #[test]
    fn threshold_is_strict() {
        let mut vol = ResponseVolume::zeros(4, 4, dirs());
        vol.channel_mut(0).set(1, 1, 5.0);
        assert!(detect(&vol, 5.0, 0).is_empty());
        assert_eq!(detect(&vol, 4.999, 0).len(), 1);
    }

    #[test]
    fn raising_threshold_never_adds_detections() {
        // Isolated unimodal blobs on a zero background: each blob shrinks
        // as beta rises and never splits, so the count is monotone.
        let mut vol = ResponseVolume::zeros(40, 20, dirs());
        let bump = |cx: f64, cy: f64, amp: f64, x: usize, y: usize| {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            if d2 < 16.0 {
                amp * (-d2 / 4.0).exp()
            } else {
                0.0
            }
        };
        for y in 0..20 {
            for x in 0..40 {
                let v = bump(8.0, 10.0, 10.0, x, y) + bump(30.0, 6.0, 6.0, x, y);
                vol.channel_mut(2).set(x, y, v);
            }
        }
        let mut prev = usize::MAX;
        for beta in [0.5, 2.0, 4.0, 6.5, 8.0, 11.0] {
            let n = detect(&vol, beta, 0).len();
            assert!(n <= prev, "count rose from {prev} to {n} at beta {beta}");
            prev = n;
        }
        assert_eq!(detect(&vol, 0.5, 0).len(), 2);
        assert_eq!(detect(&vol, 8.0, 0).len(), 1);
        assert!(detect(&vol, 11.0, 0).is_empty());
    }
}
