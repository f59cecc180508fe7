//! On-disk formats: binary PGM (P5) frames, sequence directories with a
//! text manifest, ground truth and result CSVs, and the text form of a
//! stimulus spec.

use crate::detect::Detection;
use crate::error::{Error, Result};
use crate::eval::{RocPoint, TuningCurve};
use crate::frame::{Frame, ImageSequence};
use crate::stimulus::{Background, GroundTruthTrack, StimulusSpec, TargetSpec, Trajectory};
use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Formats a float with 10 significant digits.
fn num(x: f64) -> String {
    format!("{x:.9e}")
}

/// Write a frame as binary 8-bit grayscale PGM, values rounded and
/// clamped to [0, 255].
pub fn write_pgm(path: &Path, frame: &Frame) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    bytes.extend(
        frame
            .data()
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8),
    );
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Read a binary 8-bit grayscale PGM (maxval 255). `#` comments in the
/// header are skipped.
pub fn read_pgm(path: &Path) -> Result<Frame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: &str| Error::Parse {
        line: 0,
        message: format!("{}: {message}", path.display()),
    };

    // Header: magic, width, height, maxval as whitespace-separated
    // tokens, with # comments running to end of line.
    let mut pos = 0usize;
    let mut next_token = |bytes: &[u8]| -> Option<(usize, usize)> {
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        (pos > start).then_some((start, pos))
    };

    let mut fields = Vec::new();
    for _ in 0..4 {
        let (s, e) = next_token(&bytes).ok_or_else(|| bad("truncated header"))?;
        fields.push(std::str::from_utf8(&bytes[s..e]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("not a binary PGM (expected magic P5)"));
    }
    let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
    if fields[3] != "255" {
        return Err(bad("unsupported maxval (expected 255)"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data_start = pos + 1;
    let expected = width * height;
    if bytes.len() < data_start + expected {
        return Err(bad("truncated pixel data"));
    }
    let data = bytes[data_start..data_start + expected]
        .iter()
        .map(|&b| b as f64)
        .collect();
    Frame::from_data(width, height, data)
}

fn frame_name(t: usize) -> String {
    format!("frame_{t:06}.pgm")
}

/// Write a sequence directory: numbered PGM frames, a `manifest.txt`
/// listing them, and `ground_truth.csv` when a track is supplied.
pub fn write_sequence(
    dir: &Path,
    seq: &ImageSequence,
    truth: Option<&GroundTruthTrack>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let first = seq
        .frames
        .first()
        .ok_or_else(|| Error::invalid("seq", "sequence has no frames"))?;
    let mut manifest = String::new();
    manifest.push_str(&format!("width = {}\n", first.width()));
    manifest.push_str(&format!("height = {}\n", first.height()));
    manifest.push_str(&format!("frame_count = {}\n", seq.frames.len()));
    manifest.push_str(&format!("sample_rate = {}\n", seq.sample_rate));
    for (t, frame) in seq.frames.iter().enumerate() {
        let name = frame_name(t);
        write_pgm(&dir.join(&name), frame)?;
        manifest.push_str(&format!("frame = {name}\n"));
    }
    let manifest_path = dir.join("manifest.txt");
    fs::write(&manifest_path, manifest).map_err(|e| Error::io(manifest_path, e))?;
    if let Some(track) = truth {
        write_ground_truth(&dir.join("ground_truth.csv"), track)?;
    }
    Ok(())
}

/// Load a sequence directory written by [`write_sequence`]. The ground
/// truth track is returned when `ground_truth.csv` is present.
pub fn read_sequence(dir: &Path) -> Result<(ImageSequence, Option<GroundTruthTrack>)> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut width = None;
    let mut height = None;
    let mut frame_count = None;
    let mut sample_rate = None;
    let mut names: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{raw}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        match key {
            "width" => width = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?),
            "height" => {
                height = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
            }
            "frame_count" => {
                frame_count = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
            }
            "sample_rate" => {
                sample_rate = Some(value.parse::<f64>().map_err(|e| parse_err(e.to_string()))?)
            }
            "frame" => names.push(value.to_string()),
            other => return Err(parse_err(format!("unknown manifest key `{other}`"))),
        }
    }
    let width = width.ok_or_else(|| Error::invalid("manifest", "missing width"))?;
    let height = height.ok_or_else(|| Error::invalid("manifest", "missing height"))?;
    let sample_rate = sample_rate.ok_or_else(|| Error::invalid("manifest", "missing sample_rate"))?;
    if let Some(count) = frame_count {
        if count != names.len() {
            return Err(Error::invalid(
                "manifest",
                format!("frame_count = {count} but {} frames listed", names.len()),
            ));
        }
    }
    if names.is_empty() {
        return Err(Error::invalid("manifest", "no frames listed"));
    }
    let mut frames = Vec::with_capacity(names.len());
    for (t, name) in names.iter().enumerate() {
        let frame = read_pgm(&dir.join(name))?;
        if frame.width() != width || frame.height() != height {
            return Err(Error::Stream {
                frame: t,
                message: format!(
                    "{name} is {}x{}, manifest says {width}x{height}",
                    frame.width(),
                    frame.height()
                ),
            });
        }
        frames.push(frame);
    }
    let seq = ImageSequence::new(frames, sample_rate)?;
    let truth_path = dir.join("ground_truth.csv");
    let truth = if truth_path.exists() {
        Some(read_ground_truth(&truth_path)?)
    } else {
        None
    };
    Ok((seq, truth))
}

/// Ground truth CSV: header `t,x,y,theta`, one row per frame.
pub fn write_ground_truth(path: &Path, track: &GroundTruthTrack) -> Result<()> {
    let mut out = String::from("t,x,y,theta\n");
    for (t, (&(x, y), &theta)) in track
        .positions
        .iter()
        .zip(track.directions.iter())
        .enumerate()
    {
        out.push_str(&format!("{t},{},{},{}\n", num(x), num(y), num(theta)));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruthTrack> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut positions = Vec::new();
    let mut directions = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != "t,x,y,theta" {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `t,x,y,theta`, got `{line}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        if fields.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, got {}", fields.len())));
        }
        let t: usize = fields[0].parse().map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?;
        if t != i - 1 {
            return Err(parse_err(format!("expected frame {}, got {t}", i - 1)));
        }
        let mut vals = [0.0f64; 3];
        for (v, f) in vals.iter_mut().zip(&fields[1..]) {
            *v = f
                .parse()
                .map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?;
        }
        positions.push((vals[0], vals[1]));
        directions.push(vals[2]);
    }
    Ok(GroundTruthTrack {
        positions,
        directions,
    })
}

/// Detections CSV: header `t,x,y,theta,response`.
pub fn write_detections(path: &Path, detections: &[Detection]) -> Result<()> {
    let mut out = String::from("t,x,y,theta,response\n");
    for d in detections {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.t,
            d.x,
            d.y,
            num(d.direction),
            num(d.response)
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// ROC CSV: header `beta,fa,dr`.
pub fn write_roc(path: &Path, points: &[RocPoint]) -> Result<()> {
    let mut out = String::from("beta,fa,dr\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            num(p.beta),
            num(p.false_alarm_rate),
            num(p.detection_rate)
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Tuning CSV: header `value,stmd,lptc`.
pub fn write_tuning(path: &Path, curve: &TuningCurve) -> Result<()> {
    let mut out = String::from("value,stmd,lptc\n");
    for ((&v, &s), &l) in curve
        .values
        .iter()
        .zip(curve.stmd.iter())
        .zip(curve.lptc.iter())
    {
        out.push_str(&format!("{},{},{}\n", num(v), num(s), num(l)));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Append lines to a text file, creating it if needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Parse a stimulus spec from `key = value` text. Unset keys keep the
/// defaults of the reference scene. `base_dir` resolves relative
/// panorama paths.
pub fn parse_stimulus_spec(text: &str, base_dir: &Path) -> Result<StimulusSpec> {
    let mut map: HashMap<&str, (usize, &str)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{raw}`"),
        })?;
        map.insert(key.trim(), (i + 1, value.trim()));
    }

    const KNOWN: &[&str] = &[
        "width",
        "height",
        "duration",
        "sample_rate",
        "background",
        "background_seed",
        "background_level",
        "background_panorama",
        "background_velocity",
        "target",
        "target_luminance",
        "target_width",
        "target_height",
        "trajectory",
        "trajectory_start_x",
        "trajectory_start_y",
        "trajectory_speed",
        "trajectory_direction",
        "trajectory_span",
        "waypoints",
    ];
    for (key, (line, _)) in &map {
        if !KNOWN.contains(key) {
            return Err(Error::Parse {
                line: *line,
                message: format!("unknown stimulus key `{key}`"),
            });
        }
    }

    fn get<T: std::str::FromStr>(
        map: &HashMap<&str, (usize, &str)>,
        key: &str,
        default: T,
    ) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match map.get(key) {
            None => Ok(default),
            Some(&(line, value)) => value.parse().map_err(|e: T::Err| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            }),
        }
    }

    let defaults = StimulusSpec::default();
    let default_target = defaults.target.clone().unwrap();

    let background = match map.get("background").map(|&(_, v)| v).unwrap_or("procedural") {
        "procedural" => Background::Procedural {
            seed: get(&map, "background_seed", 0u64)?,
        },
        "uniform" => Background::Uniform {
            level: get(&map, "background_level", 128.0)?,
        },
        "panorama" => {
            let (line, rel) = *map.get("background_panorama").ok_or_else(|| {
                Error::invalid("background_panorama", "required for background = panorama")
            })?;
            let path = base_dir.join(rel);
            let frame = read_pgm(&path).map_err(|e| match e {
                Error::Io { path, source } => Error::Io { path, source },
                other => Error::Parse {
                    line,
                    message: other.to_string(),
                },
            })?;
            Background::Panorama(frame)
        }
        other => {
            return Err(Error::invalid(
                "background",
                format!("unknown background `{other}` (expected procedural|uniform|panorama)"),
            ))
        }
    };

    let target = match map.get("target").map(|&(_, v)| v).unwrap_or("rect") {
        "none" => None,
        "rect" => {
            let trajectory = match map.get("trajectory").map(|&(_, v)| v).unwrap_or("sinusoid") {
                "sinusoid" => Trajectory::ReferenceSinusoid,
                "linear" => Trajectory::Linear {
                    start_x: get(&map, "trajectory_start_x", 0.0)?,
                    start_y: get(&map, "trajectory_start_y", 0.0)?,
                    speed: get(&map, "trajectory_speed", 250.0)?,
                    direction: get(&map, "trajectory_direction", 0.0)?,
                },
                "linear_loop" => Trajectory::LinearLoop {
                    start_x: get(&map, "trajectory_start_x", 0.0)?,
                    start_y: get(&map, "trajectory_start_y", 0.0)?,
                    speed: get(&map, "trajectory_speed", 250.0)?,
                    direction: get(&map, "trajectory_direction", 0.0)?,
                    span: get(&map, "trajectory_span", 100.0)?,
                },
                "waypoints" => {
                    let (line, text) = *map
                        .get("waypoints")
                        .ok_or_else(|| Error::invalid("waypoints", "required for trajectory = waypoints"))?;
                    let mut points = Vec::new();
                    for tok in text.split_whitespace() {
                        let (x, y) = tok.split_once(':').ok_or_else(|| Error::Parse {
                            line,
                            message: format!("waypoint `{tok}` is not `x:y`"),
                        })?;
                        let parse = |s: &str| {
                            s.parse::<f64>().map_err(|e| Error::Parse {
                                line,
                                message: format!("waypoint `{tok}`: {e}"),
                            })
                        };
                        points.push((parse(x)?, parse(y)?));
                    }
                    Trajectory::Waypoints(points)
                }
                other => {
                    return Err(Error::invalid(
                        "trajectory",
                        format!(
                            "unknown trajectory `{other}` (expected sinusoid|linear|linear_loop|waypoints)"
                        ),
                    ))
                }
            };
            Some(TargetSpec {
                luminance: get(&map, "target_luminance", default_target.luminance)?,
                width: get(&map, "target_width", default_target.width)?,
                height: get(&map, "target_height", default_target.height)?,
                trajectory,
            })
        }
        other => {
            return Err(Error::invalid(
                "target",
                format!("unknown target `{other}` (expected rect|none)"),
            ))
        }
    };

    Ok(StimulusSpec {
        width: get(&map, "width", defaults.width)?,
        height: get(&map, "height", defaults.height)?,
        duration: get(&map, "duration", defaults.duration)?,
        sample_rate: get(&map, "sample_rate", defaults.sample_rate)?,
        background,
        background_velocity: get(&map, "background_velocity", defaults.background_velocity)?,
        target,
    })
}

/// Render a stimulus spec back to its text form. Panorama backgrounds
/// reference the given path.
pub fn stimulus_spec_to_text(spec: &StimulusSpec, panorama_path: Option<&Path>) -> String {
    let mut out = String::new();
    out.push_str(&format!("width = {}\n", spec.width));
    out.push_str(&format!("height = {}\n", spec.height));
    out.push_str(&format!("duration = {}\n", spec.duration));
    out.push_str(&format!("sample_rate = {}\n", spec.sample_rate));
    match &spec.background {
        Background::Procedural { seed } => {
            out.push_str("background = procedural\n");
            out.push_str(&format!("background_seed = {seed}\n"));
        }
        Background::Uniform { level } => {
            out.push_str("background = uniform\n");
            out.push_str(&format!("background_level = {level}\n"));
        }
        Background::Panorama(_) => {
            out.push_str("background = panorama\n");
            if let Some(p) = panorama_path {
                out.push_str(&format!("background_panorama = {}\n", p.display()));
            }
        }
    }
    out.push_str(&format!(
        "background_velocity = {}\n",
        spec.background_velocity
    ));
    match &spec.target {
        None => out.push_str("target = none\n"),
        Some(t) => {
            out.push_str("target = rect\n");
            out.push_str(&format!("target_luminance = {}\n", t.luminance));
            out.push_str(&format!("target_width = {}\n", t.width));
            out.push_str(&format!("target_height = {}\n", t.height));
            match &t.trajectory {
                Trajectory::ReferenceSinusoid => out.push_str("trajectory = sinusoid\n"),
                Trajectory::Linear {
                    start_x,
                    start_y,
                    speed,
                    direction,
                } => {
                    out.push_str("trajectory = linear\n");
                    out.push_str(&format!("trajectory_start_x = {start_x}\n"));
                    out.push_str(&format!("trajectory_start_y = {start_y}\n"));
                    out.push_str(&format!("trajectory_speed = {speed}\n"));
                    out.push_str(&format!("trajectory_direction = {direction}\n"));
                }
                Trajectory::LinearLoop {
                    start_x,
                    start_y,
                    speed,
                    direction,
                    span,
                } => {
                    out.push_str("trajectory = linear_loop\n");
                    out.push_str(&format!("trajectory_start_x = {start_x}\n"));
                    out.push_str(&format!("trajectory_start_y = {start_y}\n"));
                    out.push_str(&format!("trajectory_speed = {speed}\n"));
                    out.push_str(&format!("trajectory_direction = {direction}\n"));
                    out.push_str(&format!("trajectory_span = {span}\n"));
                }
                Trajectory::Waypoints(points) => {
                    out.push_str("trajectory = waypoints\n");
                    let toks: Vec<String> =
                        points.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                    out.push_str(&format!("waypoints = {}\n", toks.join(" ")));
                }
            }
        }
    }
    out
}

/// `PathBuf` of a sequence directory's manifest.
pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.txt")
}
