use crate::error::{Error, Result};

/// One grayscale image of a sequence. Input luminance lies in [0, 255];
/// intermediate pipeline stages may produce values outside that range.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Frame {
    pub fn zeros(width: usize, height: usize) -> Frame {
        Frame::constant(width, height, 0.0)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Frame {
        assert!(width > 0 && height > 0, "frame dimensions must be positive");
        Frame {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Frame {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Frame {
            width,
            height,
            data,
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Result<Frame> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("frame", "dimensions must be positive"));
        }
        if data.len() != width * height {
            return Err(Error::invalid(
                "frame",
                format!(
                    "data length {} does not match {}x{}",
                    data.len(),
                    width,
                    height
                ),
            ));
        }
        Ok(Frame {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    /// Value at (x, y) with the coordinate clamped to the frame border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Value at (x, y), or 0 when the coordinate falls outside the frame.
    #[inline]
    pub fn get_or_zero(&self, x: isize, y: isize) -> f64 {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            0.0
        } else {
            self.get(x as usize, y as usize)
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Frame {
        Frame {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// An ordered list of equally sized frames sampled at a fixed rate.
#[derive(Debug, Clone)]
pub struct ImageSequence {
    pub frames: Vec<Frame>,
    /// Frames per second; the reference stimuli use 1000.
    pub sample_rate: f64,
}

impl ImageSequence {
    pub fn new(frames: Vec<Frame>, sample_rate: f64) -> Result<ImageSequence> {
        if sample_rate <= 0.0 {
            return Err(Error::invalid("sample_rate", "must be positive"));
        }
        if let Some(first) = frames.first() {
            for (i, f) in frames.iter().enumerate() {
                if !f.same_dims(first) {
                    return Err(Error::Stream {
                        frame: i,
                        message: format!(
                            "frame is {}x{}, expected {}x{}",
                            f.width(),
                            f.height(),
                            first.width(),
                            first.height()
                        ),
                    });
                }
            }
        }
        Ok(ImageSequence {
            frames,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}
