use crate::config::DirectionSet;
use crate::frame::Frame;

/// Per-frame, per-direction scalar field (the D, E, F and T signals).
/// Stored channel-major: one full frame per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVolume {
    directions: DirectionSet,
    channels: Vec<Frame>,
}

impl ResponseVolume {
    pub fn zeros(width: usize, height: usize, directions: DirectionSet) -> ResponseVolume {
        let channels = (0..directions.len())
            .map(|_| Frame::zeros(width, height))
            .collect();
        ResponseVolume {
            directions,
            channels,
        }
    }

    pub fn from_channels(directions: DirectionSet, channels: Vec<Frame>) -> ResponseVolume {
        assert_eq!(directions.len(), channels.len());
        if let Some(first) = channels.first() {
            assert!(channels.iter().all(|c| c.same_dims(first)));
        }
        ResponseVolume {
            directions,
            channels,
        }
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn channel(&self, index: usize) -> &Frame {
        &self.channels[index]
    }

    pub fn channel_mut(&mut self, index: usize) -> &mut Frame {
        &mut self.channels[index]
    }

    pub fn channels(&self) -> &[Frame] {
        &self.channels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, dir: usize) -> f64 {
        self.channels[dir].get(x, y)
    }

    /// Full-frame sum of one direction channel.
    pub fn channel_sum(&self, dir: usize) -> f64 {
        self.channels[dir].data().iter().sum()
    }

    /// Per-pixel maximum over directions together with the index of the
    /// maximizing direction (ties go to the smallest index).
    pub fn max_over_directions(&self) -> (Frame, Vec<u8>) {
        let (w, h) = (self.width(), self.height());
        let mut max = self.channels[0].clone();
        let mut arg = vec![0u8; w * h];
        for (d, ch) in self.channels.iter().enumerate().skip(1) {
            for (i, (&v, m)) in ch.data().iter().zip(max.data_mut()).enumerate() {
                if v > *m {
                    *m = v;
                    arg[i] = d as u8;
                }
            }
        }
        (max, arg)
    }
}
