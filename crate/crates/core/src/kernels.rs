//! Filter kernel construction: 2-D Gaussians, temporal Gamma kernels,
//! the LMC band-pass impulse response, and the STMD lateral-inhibition
//! kernel (rectified difference of Gaussians).

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Square spatial kernel with support |dx|, |dy| <= radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialKernel {
    radius: usize,
    weights: Vec<f64>,
}

impl SpatialKernel {
    pub(crate) fn from_weights(radius: usize, weights: Vec<f64>) -> SpatialKernel {
        debug_assert_eq!(weights.len(), (2 * radius + 1) * (2 * radius + 1));
        SpatialKernel { radius, weights }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    #[inline]
    pub fn get(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius as isize;
        debug_assert!(dx.abs() <= r && dy.abs() <= r);
        self.weights[((dy + r) * (2 * r + 1) + (dx + r)) as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Causal temporal kernel; `taps[s]` weights the input `s` frames ago.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalKernel {
    taps: Vec<f64>,
}

impl TemporalKernel {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

fn gaussian_value(sigma: f64, x: f64, y: f64) -> f64 {
    (-(x * x + y * y) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

/// Unit-sum 2-D Gaussian sampled at integer offsets with
/// radius = ceil(radius_factor * sigma). Renormalization preserves mean
/// luminance regardless of the truncation radius.
pub fn gaussian2d(sigma: f64, radius_factor: f64) -> Result<SpatialKernel> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    if !(radius_factor >= 2.0) {
        return Err(Error::invalid("radius_factor", "must be >= 2"));
    }
    let radius = (radius_factor * sigma).ceil() as usize;
    let side = 2 * radius + 1;
    let mut weights = Vec::with_capacity(side * side);
    for dy in -(radius as isize)..=radius as isize {
        for dx in -(radius as isize)..=radius as isize {
            weights.push(gaussian_value(sigma, dx as f64, dy as f64));
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(SpatialKernel { radius, weights })
}

/// Unit-sum 1-D Gaussian taps over [-radius, radius]. The outer product
/// of two of these equals the renormalized 2-D kernel exactly, which is
/// what makes the separable blur path bit-equivalent to the dense one.
pub fn gaussian1d(sigma: f64, radius_factor: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    let radius = (radius_factor * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    Ok(taps)
}

/// Discrete Gamma kernel samples
/// taps[t] = (n t)^n exp(-n t / tau) / ((n-1)! tau^(n+1)),
/// truncated at ceil(truncation_factor * tau) and left unnormalized:
/// rescaling the taps would silently rescale every detection threshold.
pub fn gamma_kernel(n: u32, tau: f64, truncation_factor: f64) -> Result<TemporalKernel> {
    if n < 1 {
        return Err(Error::invalid("n", "Gamma order must be >= 1"));
    }
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", "must be positive"));
    }
    let length = ((truncation_factor * tau).ceil() as usize).max(1);
    let mut factorial = 1.0f64;
    for k in 2..n {
        factorial *= k as f64;
    }
    let norm = factorial * tau.powi(n as i32 + 1);
    let taps = (0..length)
        .map(|t| {
            let t = t as f64;
            (n as f64 * t).powi(n as i32) * (-(n as f64) * t / tau).exp() / norm
        })
        .collect();
    Ok(TemporalKernel { taps })
}

/// LMC band-pass impulse response: difference of two Gamma kernels,
/// zero-padded to the longer support.
pub fn bandpass_kernel(
    n1: u32,
    tau1: f64,
    n2: u32,
    tau2: f64,
    truncation_factor: f64,
) -> Result<TemporalKernel> {
    let fast = gamma_kernel(n1, tau1, truncation_factor)?;
    let slow = gamma_kernel(n2, tau2, truncation_factor)?;
    let length = fast.len().max(slow.len());
    let taps = (0..length)
        .map(|t| {
            fast.taps().get(t).copied().unwrap_or(0.0) - slow.taps().get(t).copied().unwrap_or(0.0)
        })
        .collect();
    Ok(TemporalKernel { taps })
}

/// Lateral inhibition kernel W_s = A [g]+ + B [g]- with
/// g = G_sigma2 - e*G_sigma3 - rho, sampled on radius
/// ceil(radius_factor * sigma3). Not renormalized.
pub fn inhibition_kernel(
    sigma2: f64,
    sigma3: f64,
    e: f64,
    rho: f64,
    a: f64,
    b: f64,
    radius_factor: f64,
) -> Result<SpatialKernel> {
    if !(sigma2 > 0.0) {
        return Err(Error::invalid("sigma2", "must be positive"));
    }
    if sigma3 <= sigma2 {
        return Err(Error::invalid(
            "sigma3",
            "must exceed sigma2 (difference-of-Gaussians shape)",
        ));
    }
    let radius = (radius_factor * sigma3).ceil() as usize;
    let side = 2 * radius + 1;
    let mut weights = Vec::with_capacity(side * side);
    for dy in -(radius as isize)..=radius as isize {
        for dx in -(radius as isize)..=radius as isize {
            let g = gaussian_value(sigma2, dx as f64, dy as f64)
                - e * gaussian_value(sigma3, dx as f64, dy as f64)
                - rho;
            weights.push(a * g.max(0.0) + b * g.min(0.0));
        }
    }
    Ok(SpatialKernel { radius, weights })
}
