//! Spatial and temporal convolution primitives. Spatial convolutions use
//! clamp-to-edge borders; temporal convolutions are causal with a
//! zero-filled history at stream start.

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::kernels::{SpatialKernel, TemporalKernel};
use rayon::prelude::*;

/// Dense 2-D convolution with clamp-to-edge border handling. Work is
/// confined to the bounding box of the nonzero input, expanded by the
/// kernel radius: every output pixel beyond that box only ever reads
/// zeros (clamped reads near the image border stay within the kernel
/// radius of the output pixel), so it is zero by construction.
pub fn convolve2d(input: &Frame, kernel: &SpatialKernel) -> Frame {
    let (w, h) = (input.width(), input.height());
    let r = kernel.radius() as isize;
    let mut out = Frame::zeros(w, h);
    let Some((x0, y0, x1, y1)) = nonzero_bbox(input) else {
        return out;
    };
    let row0 = (y0 as isize - r).max(0) as usize;
    let row1 = ((y1 as isize + r) as usize).min(h - 1);
    let col0 = (x0 as isize - r).max(0) as usize;
    let col1 = ((x1 as isize + r) as usize).min(w - 1);
    out.data_mut()[row0 * w..(row1 + 1) * w]
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(i, row)| {
            let y = (row0 + i) as isize;
            for (xu, slot) in row.iter_mut().enumerate().take(col1 + 1).skip(col0) {
                let x = xu as isize;
                let mut acc = 0.0;
                for dy in -r..=r {
                    for dx in -r..=r {
                        acc += input.get_clamped(x - dx, y - dy) * kernel.get(dx, dy);
                    }
                }
                *slot = acc;
            }
        });
    out
}

/// 1-D horizontal convolution with clamp-to-edge borders and odd-length
/// taps. Output rows outside the nonzero input rows stay zero; columns
/// are covered out to the tap radius around the nonzero columns.
pub fn convolve_rows(input: &Frame, taps: &[f64]) -> Frame {
    assert!(taps.len() % 2 == 1);
    let (w, h) = (input.width(), input.height());
    let r = taps.len() / 2;
    let mut out = Frame::zeros(w, h);
    let Some((x0, y0, x1, y1)) = nonzero_bbox(input) else {
        return out;
    };
    let col0 = x0.saturating_sub(r);
    let col1 = (x1 + r).min(w - 1);
    let data = input.data();
    let out_data = out.data_mut();
    for y in y0..=y1 {
        let row = &data[y * w..(y + 1) * w];
        let out_row = &mut out_data[y * w..(y + 1) * w];
        let interior0 = col0.max(r);
        let interior1 = if w > r { col1.min(w - 1 - r) } else { 0 };
        for x in col0..interior0.min(col1 + 1) {
            out_row[x] = clamped_dot_row(row, w, x, taps, r);
        }
        for (x, slot) in out_row
            .iter_mut()
            .enumerate()
            .take(interior1 + 1)
            .skip(interior0)
        {
            // dx = i - r, reads row[x - dx] = row[x + r - i]
            let window = &row[x - r..=x + r];
            *slot = taps
                .iter()
                .enumerate()
                .map(|(i, &t)| t * window[2 * r - i])
                .sum();
        }
        for x in (interior1 + 1).max(col0)..=col1 {
            out_row[x] = clamped_dot_row(row, w, x, taps, r);
        }
    }
    out
}

fn clamped_dot_row(row: &[f64], w: usize, x: usize, taps: &[f64], r: usize) -> f64 {
    taps.iter()
        .enumerate()
        .map(|(i, &t)| {
            let xx = (x as isize - (i as isize - r as isize)).clamp(0, w as isize - 1);
            t * row[xx as usize]
        })
        .sum()
}

/// 1-D vertical convolution with clamp-to-edge borders and odd-length
/// taps; the transpose of [`convolve_rows`].
pub fn convolve_cols(input: &Frame, taps: &[f64]) -> Frame {
    assert!(taps.len() % 2 == 1);
    let (w, h) = (input.width(), input.height());
    let r = taps.len() / 2;
    let mut out = Frame::zeros(w, h);
    let Some((x0, y0, x1, y1)) = nonzero_bbox(input) else {
        return out;
    };
    let row0 = y0.saturating_sub(r);
    let row1 = (y1 + r).min(h - 1);
    let data = input.data();
    let out_data = out.data_mut();
    for y in row0..=row1 {
        let out_row = &mut out_data[y * w..(y + 1) * w];
        for (i, &t) in taps.iter().enumerate() {
            let yy = (y as isize - (i as isize - r as isize)).clamp(0, h as isize - 1) as usize;
            let in_row = &data[yy * w..(yy + 1) * w];
            for x in x0..=x1 {
                out_row[x] += t * in_row[x];
            }
        }
    }
    out
}

/// Inclusive bounding box (x0, y0, x1, y1) of the nonzero pixels, or
/// `None` for an all-zero frame.
fn nonzero_bbox(input: &Frame) -> Option<(usize, usize, usize, usize)> {
    let (w, h) = (input.width(), input.height());
    let data = input.data();
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        let first = row.iter().position(|&v| v != 0.0);
        let Some(first) = first else { continue };
        let last = w - 1 - row.iter().rev().position(|&v| v != 0.0).unwrap();
        bbox = Some(match bbox {
            None => (first, y, last, y),
            Some((x0, y0, x1, _)) => (x0.min(first), y0, x1.max(last), y),
        });
    }
    bbox
}

/// Reference nested-loop convolution, kept free of the access-pattern
/// optimizations of `convolve2d` so it can serve as its oracle.
pub fn convolve2d_reference(input: &Frame, kernel: &SpatialKernel) -> Frame {
    let (w, h) = (input.width(), input.height());
    let r = kernel.radius() as isize;
    Frame::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                acc += input.get_clamped(x as isize - dx, y as isize - dy) * kernel.get(dx, dy);
            }
        }
        acc
    })
}

/// Separable convolution with the same 1-D taps applied horizontally then
/// vertically, clamp-to-edge on both passes.
pub fn convolve2d_separable(input: &Frame, taps: &[f64]) -> Frame {
    let (w, h) = (input.width(), input.height());
    let r = (taps.len() / 2) as isize;
    let mut horizontal = Frame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                let dx = i as isize - r;
                acc += input.get_clamped(x as isize - dx, y as isize) * t;
            }
            horizontal.set(x, y, acc);
        }
    }
    let mut out = Frame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                let dy = i as isize - r;
                acc += horizontal.get_clamped(x as isize, y as isize - dy) * t;
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Ring buffer of the most recent frames of a stream. Lag 0 is the frame
/// pushed last; lags beyond what has been pushed read as zero frames.
#[derive(Debug, Clone)]
pub struct FrameRing {
    capacity: usize,
    frames: Vec<Frame>,
    head: usize,
    pushed: usize,
    width: usize,
    height: usize,
}

impl FrameRing {
    pub fn new(capacity: usize) -> FrameRing {
        assert!(capacity >= 1);
        FrameRing {
            capacity,
            frames: Vec::new(),
            head: 0,
            pushed: 0,
            width: 0,
            height: 0,
        }
    }

    pub fn push(&mut self, frame: Frame) -> Result<()> {
        if self.pushed == 0 {
            self.width = frame.width();
            self.height = frame.height();
        } else if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::Stream {
                frame: self.pushed,
                message: format!(
                    "frame is {}x{}, expected {}x{}",
                    frame.width(),
                    frame.height(),
                    self.width,
                    self.height
                ),
            });
        }
        if self.frames.len() < self.capacity {
            self.frames.push(frame);
            self.head = self.frames.len() - 1;
        } else {
            self.head = (self.head + 1) % self.capacity;
            self.frames[self.head] = frame;
        }
        self.pushed += 1;
        Ok(())
    }

    /// Frame `lag` steps in the past, or None during warm-up when that
    /// frame was never pushed (treated as zero by the convolutions).
    pub fn get(&self, lag: usize) -> Option<&Frame> {
        if lag >= self.capacity || lag >= self.pushed {
            return None;
        }
        let idx = (self.head + self.capacity - lag) % self.capacity;
        self.frames.get(idx)
    }

    pub fn pushed(&self) -> usize {
        self.pushed
    }

    /// Causal convolution of the buffered history with `kernel`,
    /// evaluated at the current time step.
    pub fn convolve(&self, kernel: &TemporalKernel) -> Frame {
        assert!(kernel.len() <= self.capacity, "kernel longer than ring");
        let mut out = Frame::zeros(self.width.max(1), self.height.max(1));
        for (lag, &tap) in kernel.taps().iter().enumerate() {
            if tap == 0.0 {
                continue;
            }
            if let Some(past) = self.get(lag) {
                let data = out.data_mut();
                for (o, &p) in data.iter_mut().zip(past.data()) {
                    *o += tap * p;
                }
            }
        }
        out
    }
}

/// A causal temporal filter over a frame stream: push one input frame,
/// get the convolution of the recent history with a fixed kernel.
/// One writer per instance; distinct instances are independent.
#[derive(Debug, Clone)]
pub struct TemporalConv {
    kernel: TemporalKernel,
    ring: FrameRing,
}

impl TemporalConv {
    pub fn new(kernel: TemporalKernel) -> TemporalConv {
        let capacity = kernel.len().max(1);
        TemporalConv {
            kernel,
            ring: FrameRing::new(capacity),
        }
    }

    pub fn kernel(&self) -> &TemporalKernel {
        &self.kernel
    }

    pub fn push(&mut self, frame: Frame) -> Result<Frame> {
        self.ring.push(frame)?;
        Ok(self.ring.convolve(&self.kernel))
    }
}
