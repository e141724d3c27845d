//! On-disk formats: binary point files, text pose files, JSON lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Pose};

/// Bytes per point record: x, y, z, intensity as little-endian `f32`.
pub const POINT_STRIDE: usize = 16;

/// Rotation tolerance accepted when reading pose files.
pub const POSE_TOLERANCE: f64 = 1e-6;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

pub fn decode_points(bytes: &[u8], path: &Path) -> Result<Vec<Point3>> {
    if !bytes.len().is_multiple_of(POINT_STRIDE) {
        return Err(Error::parse(
            path,
            format!("byte offset {}", bytes.len() - bytes.len() % POINT_STRIDE),
            format!(
                "truncated point record: file size {} is not a multiple of {POINT_STRIDE}",
                bytes.len()
            ),
        ));
    }
    bytes
        .chunks_exact(POINT_STRIDE)
        .enumerate()
        .map(|(i, rec)| {
            let f = |k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap());
            let v = [f(0), f(1), f(2), f(3)];
            if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::parse(
                    path,
                    format!("byte offset {}", i * POINT_STRIDE + 4 * k),
                    format!("non-finite value {}", v[k]),
                ));
            }
            Ok(Point3::new(
                v[0] as f64,
                v[1] as f64,
                v[2] as f64,
                v[3] as f64,
            ))
        })
        .collect()
}

pub fn encode_points(points: &[Point3]) -> Vec<u8> {
    let mut out = Vec::with_capacity(points.len() * POINT_STRIDE);
    for p in points {
        for v in [p.x, p.y, p.z, p.intensity] {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn read_points(path: &Path) -> Result<Vec<Point3>> {
    let mut bytes = Vec::new();
    open(path)?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    decode_points(&bytes, path)
}

/// Writes points as `f32`; values are rounded to single precision.
pub fn write_points(path: &Path, points: &[Point3]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(&encode_points(points))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads one sensor → world pose per line as 12 row-major numbers.
pub fn read_poses(path: &Path) -> Result<Vec<Pose>> {
    let mut poses = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let at = format!("line {}", i + 1);
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, &at, format!("bad number {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let m: [f64; 12] = values.as_slice().try_into().map_err(|_| {
            Error::parse(
                path,
                &at,
                format!("expected 12 values, got {}", values.len()),
            )
        })?;
        let pose = Pose::from_row_major(&m, POSE_TOLERANCE)
            .map_err(|e| Error::parse(path, &at, e.to_string()))?;
        poses.push(pose);
    }
    Ok(poses)
}

pub fn write_poses(path: &Path, poses: &[Pose]) -> Result<()> {
    let mut w = create(path)?;
    for pose in poses {
        let row: Vec<String> = pose.to_row_major().iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads one JSON record per line; blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {}", i + 1), e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pretty-printed JSON document with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::parse(
            path,
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}
