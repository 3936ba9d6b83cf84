//! Similarity alignment of 3D keypoint sets and the compound head poses
//! some toolchains derive from it.
//!
//! [`horn_align`] solves the classic closed-form absolute-orientation
//! problem: given paired model and observed points, find the scale,
//! rotation, and translation minimizing the least-squares mapping error,
//! via the SVD of the point cross-covariance with a determinant correction
//! that keeps the result a proper rotation.
//!
//! Landmark-based estimators then report not the raw alignment rotation but
//! a compound: the observed frame differs from the model frame by a fixed
//! axis-flip `E = diag(1, -1, -1)` and optionally a camera rotation. Two
//! variants are in circulation — [`panoptic_pose`] composes
//! `E * C * R`, while [`whenet_compound_pose`] conjugates, `E * (C * R) *
//! E^-1` — and they genuinely disagree away from the identity camera.

use crate::conventions::builtin;
use crate::error::{Error, Result};
use crate::so3::{Mat3, RotationMatrix, Vec3};
use serde::Deserialize;

/// Observed keypoints below this confidence are dropped before alignment.
pub const CONFIDENCE_THRESHOLD: f64 = 0.1;

/// Minimum confident correspondences needed for a stable alignment.
pub const MIN_CONFIDENT_POINTS: usize = 6;

/// A set of 3D keypoints, optionally with per-point confidences.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    pub points: Vec<Vec3>,
    pub confidence: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KeypointRecord {
    points: Vec<[f64; 3]>,
    #[serde(default)]
    confidence: Option<Vec<f64>>,
}

impl KeypointSet {
    pub fn new(points: Vec<Vec3>, confidence: Option<Vec<f64>>) -> Result<Self> {
        let set = KeypointSet { points, confidence };
        set.validate()?;
        Ok(set)
    }

    /// Parses `{"points": [[x,y,z], ...], "confidence": [c, ...]?}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        let record: KeypointRecord = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("bad keypoint JSON: {e}")))?;
        KeypointSet::new(
            record.points.into_iter().map(Vec3).collect(),
            record.confidence,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("keypoint set has no points"));
        }
        if !self.points.iter().all(Vec3::is_finite) {
            return Err(Error::invalid("keypoint coordinates must be finite"));
        }
        if let Some(conf) = &self.confidence {
            if conf.len() != self.points.len() {
                return Err(Error::invalid(format!(
                    "{} confidences for {} points",
                    conf.len(),
                    self.points.len()
                )));
            }
            if !conf.iter().all(|c| c.is_finite()) {
                return Err(Error::invalid("confidences must be finite"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A camera's world-from-camera rotation and position offset.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraExtrinsic {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraRecord {
    #[serde(rename = "R")]
    r: [f64; 9],
    t: [f64; 3],
}

impl CameraExtrinsic {
    /// Parses `{"R": [9 row-major numbers], "t": [x, y, z]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        let record: CameraRecord = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("bad camera JSON: {e}")))?;
        let rotation = RotationMatrix::try_new(Mat3::from_flat(&record.r))
            .map_err(|e| Error::format(format!("camera R: {e}")))?;
        if !record.t.iter().all(|v| v.is_finite()) {
            return Err(Error::format("camera t must be finite"));
        }
        Ok(CameraExtrinsic {
            rotation,
            translation: Vec3(record.t),
        })
    }

    pub fn identity() -> Self {
        CameraExtrinsic {
            rotation: RotationMatrix::try_new(Mat3::identity()).expect("identity is a rotation"),
            translation: Vec3([0.0, 0.0, 0.0]),
        }
    }
}

/// The similarity transform mapping model points onto observed points:
/// `observed ~= scale * rotation * model + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub rotation: RotationMatrix,
    pub scale: f64,
    pub translation: Vec3,
    /// Root-mean-square mapping error over the input points.
    pub residual: f64,
}

/// Keeps the correspondences whose observed confidence exceeds `threshold`.
/// The model and observed sets must already correspond index-by-index.
pub fn filter_by_confidence(
    model: &[Vec3],
    observed: &KeypointSet,
    threshold: f64,
) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    observed.validate()?;
    if model.len() != observed.points.len() {
        return Err(Error::invalid(format!(
            "model has {} points but observation has {}",
            model.len(),
            observed.points.len()
        )));
    }
    let (kept_model, kept_obs): (Vec<Vec3>, Vec<Vec3>) = match &observed.confidence {
        None => (model.to_vec(), observed.points.clone()),
        Some(conf) => model
            .iter()
            .zip(&observed.points)
            .zip(conf)
            .filter(|(_, &c)| c > threshold)
            .map(|((m, o), _)| (*m, *o))
            .unzip(),
    };
    if kept_model.len() < MIN_CONFIDENT_POINTS {
        return Err(Error::invalid(format!(
            "only {} keypoints exceed confidence {threshold}; need at least {MIN_CONFIDENT_POINTS}",
            kept_model.len()
        )));
    }
    Ok((kept_model, kept_obs))
}

fn centroid(points: &[Vec3]) -> Vec3 {
    let mut c = [0.0; 3];
    for p in points {
        for i in 0..3 {
            c[i] += p[i];
        }
    }
    let n = points.len() as f64;
    Vec3([c[0] / n, c[1] / n, c[2] / n])
}

/// Least-squares similarity alignment (scale, rotation, translation) of
/// paired point sets. Fails with a degenerate-geometry error when the model
/// points are collinear or coincident, which leaves the rotation
/// underdetermined.
pub fn horn_align(model: &[Vec3], observed: &[Vec3]) -> Result<Alignment> {
    if model.len() != observed.len() {
        return Err(Error::invalid(format!(
            "model has {} points but observation has {}",
            model.len(),
            observed.len()
        )));
    }
    if model.len() < 3 {
        return Err(Error::invalid("alignment needs at least 3 point pairs"));
    }
    if !(model.iter().all(Vec3::is_finite) && observed.iter().all(Vec3::is_finite)) {
        return Err(Error::invalid("point coordinates must be finite"));
    }

    let mc = centroid(model);
    let oc = centroid(observed);
    let centered_model: Vec<Vec3> = model.iter().map(|p| p.sub(&mc)).collect();
    let centered_obs: Vec<Vec3> = observed.iter().map(|p| p.sub(&oc)).collect();

    let model_spread: f64 = centered_model.iter().map(|p| p.dot(p)).sum();
    if model_spread <= 0.0 {
        return Err(Error::degenerate("all model points coincide"));
    }

    // Cross-covariance H = sum model_i observed_i^T over centered points.
    let mut h = [[0.0f64; 3]; 3];
    for (m, o) in centered_model.iter().zip(&centered_obs) {
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] += m[i] * o[j];
            }
        }
    }
    let h = nalgebra::Matrix3::new(
        h[0][0], h[0][1], h[0][2], h[1][0], h[1][1], h[1][2], h[2][0], h[2][1], h[2][2],
    );
    let svd = h.svd(true, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    if sv[1] <= 1e-12 * sv[0].max(f64::MIN_POSITIVE) {
        return Err(Error::degenerate(
            "model points are collinear (or nearly so); the alignment rotation \
             is underdetermined",
        ));
    }
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let d = (v_t.transpose() * u.transpose()).determinant().signum();
    let r = v_t.transpose() * nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, d))
        * u.transpose();

    let mut rm = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rm[i][j] = r[(i, j)];
        }
    }
    let rotation = RotationMatrix::try_new(Mat3(rm))
        .map_err(|e| Error::degenerate(format!("alignment produced an unstable rotation: {e}")))?;

    let projected: f64 = centered_obs
        .iter()
        .zip(&centered_model)
        .map(|(o, m)| o.dot(&rotation.mul_vec(m)))
        .sum();
    let scale = projected / model_spread;
    let translation = oc.sub(&rotation.mul_vec(&mc).scaled(scale));

    let sq_sum: f64 = model
        .iter()
        .zip(observed)
        .map(|(m, o)| {
            let mapped = rotation.mul_vec(m).scaled(scale).add(&translation);
            let e = mapped.sub(o);
            e.dot(&e)
        })
        .sum();
    let residual = (sq_sum / model.len() as f64).sqrt();

    Ok(Alignment {
        rotation,
        scale,
        translation,
        residual,
    })
}

/// The fixed model-to-observed axis flip used by landmark pose estimators:
/// a half turn about x, `diag(1, -1, -1)`. It is its own inverse.
pub fn e_ref() -> RotationMatrix {
    RotationMatrix::try_new(Mat3::diagonal(1.0, -1.0, -1.0)).expect("axis flip is a rotation")
}

/// Compound pose `E * (C * R) * E^-1` (conjugation by the axis flip),
/// given the camera rotation `C` and the alignment rotation `R`.
pub fn whenet_compound_pose(camera: &RotationMatrix, alignment: &RotationMatrix) -> RotationMatrix {
    let e = e_ref();
    e.compose(&camera.compose(alignment)).compose(&e)
}

/// Compound pose `E * C * R` (one-sided flip), given the camera rotation
/// `C` and the alignment rotation `R`.
pub fn panoptic_pose(camera: &RotationMatrix, alignment: &RotationMatrix) -> RotationMatrix {
    e_ref().compose(&camera.compose(alignment))
}

/// A 58-point neutral face/head landmark template: jaw line, brows, nose,
/// eyes, and mouth, symmetric about x = 0, in arbitrary units roughly
/// centimeter-sized.
pub const REFERENCE_HEAD_POINTS: [[f64; 3]; 58] = [
    [-7.308957, 0.913869, 0.000000],
    [-6.775290, -0.730814, -0.012799],
    [-5.665918, -3.286078, 1.022951],
    [-5.011779, -4.876396, 1.047961],
    [-4.056931, -5.947019, 1.636229],
    [-1.833492, -7.056977, 4.061275],
    [0.000000, -7.415691, 4.070434],
    [1.833492, -7.056977, 4.061275],
    [4.056931, -5.947019, 1.636229],
    [5.011779, -4.876396, 1.047961],
    [5.665918, -3.286078, 1.022951],
    [6.775290, -0.730814, -0.012799],
    [7.308957, 0.913869, 0.000000],
    [5.311432, 5.485328, 3.987654],
    [4.461908, 6.189018, 5.594410],
    [3.550622, 6.185143, 5.712299],
    [2.542231, 5.862829, 4.687939],
    [1.789930, 5.393625, 4.413414],
    [2.693583, 5.018237, 5.072837],
    [3.530191, 4.981603, 4.937805],
    [4.490323, 5.186498, 4.694397],
    [-5.311432, 5.485328, 3.987654],
    [-4.461908, 6.189018, 5.594410],
    [-3.550622, 6.185143, 5.712299],
    [-2.542231, 5.862829, 4.687939],
    [-1.789930, 5.393625, 4.413414],
    [-2.693583, 5.018237, 5.072837],
    [-3.530191, 4.981603, 4.937805],
    [-4.490323, 5.186498, 4.694397],
    [1.330353, 7.122144, 6.903745],
    [2.533424, 7.878085, 7.451034],
    [4.861131, 7.878672, 6.601275],
    [6.137002, 7.271266, 5.200823],
    [6.825897, 6.760612, 4.402142],
    [-1.330353, 7.122144, 6.903745],
    [-2.533424, 7.878085, 7.451034],
    [-4.861131, 7.878672, 6.601275],
    [-6.137002, 7.271266, 5.200823],
    [-6.825897, 6.760612, 4.402142],
    [-2.774015, -2.080775, 5.048531],
    [-0.509714, -1.571179, 6.566167],
    [0.000000, -1.646444, 6.704956],
    [0.509714, -1.571179, 6.566167],
    [2.774015, -2.080775, 5.048531],
    [0.589441, -2.958597, 6.109526],
    [0.000000, -3.116408, 6.097667],
    [-0.589441, -2.958597, 6.109526],
    [-0.981972, 4.554081, 6.301271],
    [-0.973987, 1.916389, 7.654050],
    [-2.005628, 1.409845, 6.165652],
    [-1.930245, 0.424351, 5.914376],
    [-0.746313, 0.348381, 6.263227],
    [0.000000, 0.000000, 6.763430],
    [0.746313, 0.348381, 6.263227],
    [1.930245, 0.424351, 5.914376],
    [2.005628, 1.409845, 6.165652],
    [0.973987, 1.916389, 7.654050],
    [0.981972, 4.554081, 6.301271],
];

/// The landmark template scaled then posed: each point becomes
/// `R * (scale * p)` with `R` built from camera-frame pitch/yaw/roll in
/// degrees.
pub fn reference_head(scale: f64, pitch_yaw_roll_deg: [f64; 3]) -> Vec<Vec3> {
    let conv = builtin(crate::conventions::W300LP).expect("builtin");
    let r = conv.matrix_of(
        pitch_yaw_roll_deg[0].to_radians(),
        pitch_yaw_roll_deg[1].to_radians(),
        pitch_yaw_roll_deg[2].to_radians(),
    );
    REFERENCE_HEAD_POINTS
        .iter()
        .map(|p| r.mul_vec(&Vec3([p[0] * scale, p[1] * scale, p[2] * scale])))
        .collect()
}

/// The template at the conventional working size and tilt: scale 0.01 with
/// a 10-degree downward pitch.
pub fn reference_head_default() -> Vec<Vec3> {
    reference_head(0.01, [10.0, 0.0, 0.0])
}
