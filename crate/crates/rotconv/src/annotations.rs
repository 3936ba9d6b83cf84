//! Pose annotation records and their file formats.
//!
//! The JSON format is an array of records:
//!
//! ```json
//! [
//!   {
//!     "image_id": "img_0001",
//!     "convention": "W300LP",
//!     "bbox": [120.0, 80.0, 96.0, 96.0],
//!     "rotation": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
//!     "euler_deg": [0.0, 0.0, 0.0]
//!   }
//! ]
//! ```
//!
//! `bbox` is `[x, y, width, height]` in pixels and optional. At least one of
//! `rotation` (row-major, validated against SO(3)) and `euler_deg`
//! (pitch, yaw, roll; range-checked under the named convention) must be
//! present; when both are, they must agree to [`EULER_CACHE_TOL`].
//!
//! The CSV format is headerless with five or nine fields per row:
//!
//! ```text
//! image_id,pitch_deg,yaw_deg,roll_deg,convention[,bx,by,bw,bh]
//! ```
//!
//! CSV always goes through degrees, printed with twelve significant digits,
//! so a CSV round trip preserves matrices to about 1e-11 while a JSON round
//! trip preserves them exactly.

use crate::conventions::{euler_to_matrix, ConventionRegistry, EulerAngles};
use crate::error::{Error, Result};
use crate::extract::canonical_euler;
use crate::so3::{frobenius_distance, RotationMatrix};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Frobenius agreement required between a record's `rotation` and the
/// matrix rebuilt from its `euler_deg`.
pub const EULER_CACHE_TOL: f64 = 1e-9;

/// One image's pose label.
#[derive(Debug, Clone)]
pub struct PoseAnnotation {
    pub image_id: String,
    /// `[x, y, width, height]` in pixels.
    pub bbox: Option<[f64; 4]>,
    /// The pose, always materialized as a matrix.
    pub rotation: RotationMatrix,
    /// Euler angles known to reproduce `rotation` under their convention.
    pub euler_cache: Option<EulerAngles>,
    /// Name of the convention the label was expressed in.
    pub source_convention: String,
}

impl PoseAnnotation {
    pub fn new(
        image_id: impl Into<String>,
        bbox: Option<[f64; 4]>,
        rotation: RotationMatrix,
        euler_cache: Option<EulerAngles>,
        source_convention: impl Into<String>,
    ) -> Result<Self> {
        let ann = PoseAnnotation {
            image_id: image_id.into(),
            bbox,
            rotation,
            euler_cache,
            source_convention: source_convention.into(),
        };
        ann.validate()?;
        Ok(ann)
    }

    /// Checks the internal consistency rules (non-empty id, positive bbox,
    /// cache agreement).
    pub fn validate(&self) -> Result<()> {
        if self.image_id.is_empty() {
            return Err(Error::invalid("image_id must be non-empty"));
        }
        if let Some(b) = &self.bbox {
            if !b.iter().all(|v| v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{}: bbox entries must be finite",
                    self.image_id
                )));
            }
            if b[2] <= 0.0 || b[3] <= 0.0 {
                return Err(Error::invalid(format!(
                    "{}: bbox width and height must be positive",
                    self.image_id
                )));
            }
        }
        if let Some(cache) = &self.euler_cache {
            if cache.convention.name() != self.source_convention {
                return Err(Error::invalid(format!(
                    "{}: euler cache is tagged '{}' but the annotation says '{}'",
                    self.image_id,
                    cache.convention.name(),
                    self.source_convention
                )));
            }
            let rebuilt = cache.convention.matrix_of(cache.pitch, cache.yaw, cache.roll);
            let err = frobenius_distance(&rebuilt, &self.rotation);
            if err > EULER_CACHE_TOL {
                return Err(Error::invalid(format!(
                    "{}: euler angles disagree with the rotation matrix \
                     (Frobenius distance {err:.3e} exceeds {EULER_CACHE_TOL:.0e})",
                    self.image_id
                )));
            }
        }
        Ok(())
    }

    /// Bbox center, or `None` without a bbox.
    pub fn bbox_center(&self) -> Option<[f64; 2]> {
        self.bbox
            .map(|b| [b[0] + b[2] / 2.0, b[1] + b[3] / 2.0])
    }
}

/// Annotation file format, normally inferred from the file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationFormat {
    Json,
    Csv,
}

impl AnnotationFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(AnnotationFormat::Json),
            Some("csv") => Ok(AnnotationFormat::Csv),
            _ => Err(Error::unsupported(format!(
                "cannot infer annotation format from '{}' (expected .json or .csv)",
                path.display()
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationRecord {
    image_id: String,
    convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bbox: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<[f64; 9]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    euler_deg: Option<[f64; 3]>,
}

fn record_to_annotation(
    record: AnnotationRecord,
    registry: &ConventionRegistry,
    context: &str,
) -> Result<PoseAnnotation> {
    let ctx = |e: Error| Error::format(format!("{context}: {e}"));
    let convention = registry.get(&record.convention).ok_or_else(|| {
        Error::format(format!(
            "{context}: unknown convention '{}' (known: {})",
            record.convention,
            registry.names().join(", ")
        ))
    })?;

    let euler = match record.euler_deg {
        Some([p, y, r]) => {
            let angles = EulerAngles::from_degrees(convention.clone(), p, y, r).map_err(ctx)?;
            // Range-check and materialize under the declared convention.
            let m = euler_to_matrix(&angles)
                .map_err(|e| Error::format(format!("{context}: {e}")))?;
            Some((angles, m))
        }
        None => None,
    };
    let rotation = match record.rotation {
        Some(flat) => Some(
            RotationMatrix::from_flat(&flat)
                .map_err(|e| Error::format(format!("{context}: {e}")))?,
        ),
        None => None,
    };

    let (rotation, euler_cache) = match (rotation, euler) {
        (Some(m), Some((angles, rebuilt))) => {
            let err = frobenius_distance(&m, &rebuilt);
            if err > EULER_CACHE_TOL {
                return Err(Error::format(format!(
                    "{context}: rotation and euler_deg disagree \
                     (Frobenius distance {err:.3e} exceeds {EULER_CACHE_TOL:.0e})"
                )));
            }
            (m, Some(angles))
        }
        (Some(m), None) => (m, None),
        (None, Some((angles, rebuilt))) => (rebuilt, Some(angles)),
        (None, None) => {
            return Err(Error::format(format!(
                "{context}: record needs 'rotation', 'euler_deg', or both"
            )))
        }
    };

    PoseAnnotation::new(
        record.image_id,
        record.bbox,
        rotation,
        euler_cache,
        record.convention,
    )
    .map_err(|e| Error::format(format!("{context}: {e}")))
}

/// Parses the JSON annotation format.
pub fn parse_annotations_json(
    text: &str,
    registry: &ConventionRegistry,
) -> Result<Vec<PoseAnnotation>> {
    let records: Vec<AnnotationRecord> = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("annotation JSON: {e}")))?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| record_to_annotation(r, registry, &format!("record {}", i + 1)))
        .collect()
}

fn annotation_to_record(ann: &PoseAnnotation) -> Result<AnnotationRecord> {
    ann.validate()?;
    Ok(AnnotationRecord {
        image_id: ann.image_id.clone(),
        convention: ann.source_convention.clone(),
        bbox: ann.bbox,
        rotation: Some(ann.rotation.to_flat()),
        euler_deg: ann.euler_cache.as_ref().map(|e| e.degrees()),
    })
}

/// Serializes annotations as the JSON format. The matrix is always written;
/// numbers use the shortest representation that round-trips exactly.
pub fn annotations_to_json(annotations: &[PoseAnnotation]) -> Result<String> {
    let records: Vec<AnnotationRecord> = annotations
        .iter()
        .map(annotation_to_record)
        .collect::<Result<_>>()?;
    Ok(serde_json::to_string_pretty(&records).expect("annotation serialization cannot fail"))
}

/// Parses the headerless CSV annotation format.
pub fn parse_annotations_csv(
    text: &str,
    registry: &ConventionRegistry,
) -> Result<Vec<PoseAnnotation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let context = format!("row {}", i + 1);
        let row = row.map_err(|e| Error::format(format!("{context}: {e}")))?;
        if row.len() != 5 && row.len() != 9 {
            return Err(Error::format(format!(
                "{context}: expected 5 or 9 fields, found {}",
                row.len()
            )));
        }
        let num = |idx: usize, label: &str| -> Result<f64> {
            row[idx].parse::<f64>().map_err(|_| {
                Error::format(format!(
                    "{context}: {label} '{}' is not a number",
                    &row[idx]
                ))
            })
        };
        let record = AnnotationRecord {
            image_id: row[0].to_string(),
            convention: row[4].to_string(),
            euler_deg: Some([
                num(1, "pitch_deg")?,
                num(2, "yaw_deg")?,
                num(3, "roll_deg")?,
            ]),
            rotation: None,
            bbox: if row.len() == 9 {
                Some([
                    num(5, "bbox x")?,
                    num(6, "bbox y")?,
                    num(7, "bbox width")?,
                    num(8, "bbox height")?,
                ])
            } else {
                None
            },
        };
        out.push(record_to_annotation(record, registry, &context)?);
    }
    Ok(out)
}

/// Serializes annotations as the headerless CSV format.
///
/// CSV carries angles, not matrices, so every annotation must either have an
/// Euler cache or use a convention the crate can extract under (WHENet poses
/// that no in-range triple represents are an error: use JSON for those).
pub fn annotations_to_csv(annotations: &[PoseAnnotation]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_writer(Vec::new());
    for ann in annotations {
        ann.validate()?;
        let euler = match &ann.euler_cache {
            Some(e) => e.clone(),
            None => {
                let convention = crate::conventions::builtin(&ann.source_convention)
                    .ok_or_else(|| {
                        Error::unsupported(format!(
                            "{}: cannot derive angles for custom convention '{}'; \
                             write JSON instead",
                            ann.image_id, ann.source_convention
                        ))
                    })?;
                canonical_euler(&convention, &ann.rotation)?.ok_or_else(|| {
                    Error::invalid(format!(
                        "{}: no in-range '{}' angles represent this pose; \
                         write JSON instead",
                        ann.image_id, ann.source_convention
                    ))
                })?
            }
        };
        let deg = euler.degrees();
        let mut fields = vec![
            ann.image_id.clone(),
            fmt_sig(deg[0], 12),
            fmt_sig(deg[1], 12),
            fmt_sig(deg[2], 12),
            ann.source_convention.clone(),
        ];
        if let Some(b) = &ann.bbox {
            fields.extend(b.iter().map(|v| fmt_sig(*v, 12)));
        }
        writer
            .write_record(&fields)
            .map_err(|e| Error::format(format!("csv write: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::format(format!("csv write: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Loads annotations from a file, inferring the format from its extension.
pub fn load_annotations(
    path: impl AsRef<Path>,
    registry: &ConventionRegistry,
) -> Result<Vec<PoseAnnotation>> {
    let path = path.as_ref();
    let format = AnnotationFormat::from_path(path)?;
    let text = std::fs::read_to_string(path)?;
    match format {
        AnnotationFormat::Json => parse_annotations_json(&text, registry),
        AnnotationFormat::Csv => parse_annotations_csv(&text, registry),
    }
    .map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

/// Saves annotations to a file in the given format (or the one implied by
/// the extension).
pub fn save_annotations(
    annotations: &[PoseAnnotation],
    path: impl AsRef<Path>,
    format: Option<AnnotationFormat>,
) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => AnnotationFormat::from_path(path)?,
    };
    let text = match format {
        AnnotationFormat::Json => annotations_to_json(annotations)?,
        AnnotationFormat::Csv => annotations_to_csv(annotations)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Formats `v` in plain decimal with `sig` significant digits, trimming
/// trailing zeros. Falls back to exponential notation only beyond 10^±21,
/// where plain decimal stops being readable.
pub(crate) fn fmt_sig(v: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        // Callers validate finiteness; render something unambiguous anyway.
        return format!("{v}");
    }
    let formatted = format!("{:.*e}", sig - 1, v);
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if !(-21..=21).contains(&exponent) {
        return formatted;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    // Value is 0.digits * 10^(exponent + 1).
    let point = exponent + 1;
    let mut body = if point <= 0 {
        let mut s = String::from("0.");
        s.extend(std::iter::repeat('0').take((-point) as usize));
        s.push_str(&digits);
        s
    } else if (point as usize) >= digits.len() {
        let mut s = digits.clone();
        s.extend(std::iter::repeat('0').take(point as usize - digits.len()));
        s
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if body.contains('.') {
        body = body.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        format!("-{body}")
    } else {
        body
    }
}
