use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Evenly spaced preferred directions for the STMD/LPTC arrays,
/// angles theta_i = 2*pi*i/count starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    angles: Vec<f64>,
}

impl DirectionSet {
    pub fn new(count: usize) -> Result<DirectionSet> {
        if count < 2 {
            return Err(Error::invalid("direction_count", "must be at least 2"));
        }
        let angles = (0..count).map(|i| 2.0 * PI * i as f64 / count as f64).collect();
        Ok(DirectionSet { angles })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, index: usize) -> f64 {
        self.angles[index]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Index of the set angle closest to `angle` (mod 2*pi).
    pub fn index_of(&self, angle: f64) -> usize {
        let n = self.angles.len() as f64;
        let a = angle.rem_euclid(2.0 * PI);
        ((a * n / (2.0 * PI)).round() as usize) % self.angles.len()
    }
}

/// Every model parameter, defaulting to the reference parameter table.
/// Time constants are in frames (one frame = 1 ms at the reference
/// 1000 Hz sampling rate); distances are in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Ommatidium blur std-dev.
    pub sigma1: f64,
    /// LMC band-pass Gamma orders and time constants.
    pub n1: u32,
    pub tau1: f64,
    pub n2: u32,
    pub tau2: f64,
    /// STMD delay parameters (delayed ON, same-pixel delayed OFF, offset delayed OFF).
    pub n3: u32,
    pub tau3: f64,
    pub n4: u32,
    pub tau4: f64,
    pub n5: u32,
    pub tau5: f64,
    /// LPTC delay parameters.
    pub n6: u32,
    pub tau6: f64,
    /// Correlation baseline between the two sampled pixels.
    pub alpha1: f64,
    /// Lateral inhibition kernel constants.
    pub a: f64,
    pub b: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub e: f64,
    pub rho: f64,
    /// TSDN inhibition gain.
    pub alpha2: f64,
    /// STMD/TSDN detection threshold.
    pub beta: f64,
    /// LPTC background-object detection threshold.
    pub gamma: f64,
    /// Number of quantized preferred directions.
    pub direction_count: usize,
    /// Gamma kernel support length as a multiple of tau.
    pub kernel_truncation_factor: f64,
    /// Gaussian support radius as a multiple of sigma.
    pub spatial_kernel_radius_factor: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            sigma1: 1.0,
            n1: 2,
            tau1: 3.0,
            n2: 6,
            tau2: 9.0,
            n3: 3,
            tau3: 15.0,
            n4: 5,
            tau4: 25.0,
            n5: 8,
            tau5: 40.0,
            n6: 5,
            tau6: 15.0,
            alpha1: 3.0,
            a: 1.0,
            b: 3.0,
            sigma2: 1.5,
            sigma3: 3.0,
            e: 1.0,
            rho: 0.0,
            alpha2: 3.5,
            beta: 150.0,
            gamma: 100.0,
            direction_count: 8,
            kernel_truncation_factor: 5.0,
            spatial_kernel_radius_factor: 3.0,
        }
    }
}

macro_rules! config_fields {
    ($m:ident) => {
        $m!(
            (sigma1, f64),
            (n1, u32),
            (tau1, f64),
            (n2, u32),
            (tau2, f64),
            (n3, u32),
            (tau3, f64),
            (n4, u32),
            (tau4, f64),
            (n5, u32),
            (tau5, f64),
            (n6, u32),
            (tau6, f64),
            (alpha1, f64),
            (a, f64),
            (b, f64),
            (sigma2, f64),
            (sigma3, f64),
            (e, f64),
            (rho, f64),
            (alpha2, f64),
            (beta, f64),
            (gamma, f64),
            (direction_count, usize),
            (kernel_truncation_factor, f64),
            (spatial_kernel_radius_factor, f64)
        )
    };
}

impl ModelConfig {
    /// Parse a `key = value` document; missing keys keep their defaults,
    /// unknown keys are rejected. `#` starts a comment.
    pub fn parse(text: &str) -> Result<ModelConfig> {
        let mut cfg = ModelConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.set_field(key, value).map_err(|message| Error::Parse {
                line: lineno + 1,
                message,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_field(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        macro_rules! setter {
            ($(($name:ident, $ty:ty)),+) => {
                match key {
                    $(stringify!($name) => {
                        self.$name = value
                            .parse::<$ty>()
                            .map_err(|e| format!("bad value for {key}: {e}"))?;
                        Ok(())
                    })+
                    _ => Err(format!("unknown key `{key}`")),
                }
            };
        }
        config_fields!(setter)
    }

    /// Serialize as the same `key = value` document `parse` accepts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        macro_rules! emit {
            ($(($name:ident, $ty:ty)),+) => {
                $(writeln!(out, "{} = {}", stringify!($name), self.$name).unwrap();)+
            };
        }
        config_fields!(emit);
        out
    }

    pub fn validate(&self) -> Result<()> {
        macro_rules! positive {
            ($($f:ident),+) => {
                $(if !(self.$f > 0.0) {
                    return Err(Error::invalid(stringify!($f), "must be positive"));
                })+
            };
        }
        positive!(sigma1, sigma2, sigma3, tau1, tau2, tau3, tau4, tau5, tau6, alpha1);
        macro_rules! order {
            ($($f:ident),+) => {
                $(if self.$f < 1 {
                    return Err(Error::invalid(stringify!($f), "order must be >= 1"));
                })+
            };
        }
        order!(n1, n2, n3, n4, n5, n6);
        if self.alpha2 < 0.0 {
            return Err(Error::invalid("alpha2", "must be nonnegative"));
        }
        if self.sigma3 <= self.sigma2 {
            return Err(Error::invalid(
                "sigma3",
                "must exceed sigma2 (difference-of-Gaussians shape)",
            ));
        }
        if self.direction_count < 2 {
            return Err(Error::invalid("direction_count", "must be at least 2"));
        }
        if !(self.kernel_truncation_factor >= 1.0) {
            return Err(Error::invalid("kernel_truncation_factor", "must be >= 1"));
        }
        if !(self.spatial_kernel_radius_factor >= 2.0) {
            return Err(Error::invalid("spatial_kernel_radius_factor", "must be >= 2"));
        }
        Ok(())
    }

    pub fn directions(&self) -> Result<DirectionSet> {
        DirectionSet::new(self.direction_count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_yields_reference_defaults() {
        let cfg = ModelConfig::parse("").unwrap();
        assert_eq!(cfg, ModelConfig::default());
        assert_eq!(cfg.sigma1, 1.0);
        assert_eq!((cfg.n1, cfg.tau1, cfg.n2, cfg.tau2), (2, 3.0, 6, 9.0));
        assert_eq!((cfg.n3, cfg.tau3), (3, 15.0));
        assert_eq!((cfg.n4, cfg.tau4), (5, 25.0));
        assert_eq!((cfg.n5, cfg.tau5), (8, 40.0));
        assert_eq!((cfg.n6, cfg.tau6), (5, 15.0));
        assert_eq!(cfg.alpha1, 3.0);
        assert_eq!((cfg.a, cfg.b), (1.0, 3.0));
        assert_eq!((cfg.sigma2, cfg.sigma3, cfg.e, cfg.rho), (1.5, 3.0, 1.0, 0.0));
        assert_eq!(cfg.alpha2, 3.5);
    }

    #[test]
    fn single_override_keeps_other_defaults() {
        let cfg = ModelConfig::parse("alpha2 = 0").unwrap();
        let expected = ModelConfig {
            alpha2: 0.0,
            ..ModelConfig::default()
        };
        assert_eq!(cfg, expected);
    }

    #[test]
    fn invariant_violation_names_field() {
        let err = ModelConfig::parse("tau1 = -3").unwrap_err();
        match err {
            Error::Invalid { field, .. } => assert_eq!(field, "tau1"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = ModelConfig::parse("sigma1 = 1\nnot a line\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(ModelConfig::parse("sigma9 = 1").is_err());
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = ModelConfig::parse("# comment\n\nbeta = 90 # trailing\n").unwrap();
        assert_eq!(cfg.beta, 90.0);
    }

    #[test]
    fn serialization_round_trips() {
        let cfg = ModelConfig {
            beta: 42.5,
            direction_count: 16,
            ..ModelConfig::default()
        };
        let reparsed = ModelConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn direction_set_even_spacing() {
        let d = DirectionSet::new(4).unwrap();
        assert_eq!(d.angles(), &[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        let d8 = DirectionSet::new(8).unwrap();
        assert_eq!(d8.len(), 8);
        assert!((d8.angle(1) - PI / 4.0).abs() < 1e-15);
        assert!((d8.angle(7) - 7.0 * PI / 4.0).abs() < 1e-15);
        assert!(DirectionSet::new(1).is_err());
    }

    #[test]
    fn index_of_wraps() {
        let d = DirectionSet::new(8).unwrap();
        assert_eq!(d.index_of(0.0), 0);
        assert_eq!(d.index_of(PI), 4);
        assert_eq!(d.index_of(-PI / 4.0), 7);
        assert_eq!(d.index_of(2.0 * PI - 1e-9), 0);
    }
}
