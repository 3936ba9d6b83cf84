//! Converting poses between conventions.
//!
//! Conventions fall into frame families. Within the camera-facing family
//! (`W300LP`, `WHENET_PANOPTIC`) the matrix itself is the shared object and
//! conversion is the identity. Crossing into the subject frame (`WIKI_ZYX`)
//! conjugates by a fixed axis-relabeling matrix, and `REPNET6D` relates to
//! the camera family by plain transposition. Pairs outside this table are
//! rejected rather than guessed.

use crate::conventions::{
    euler_to_matrix, EulerAngles, RotationConvention, REPNET6D, TDDFA_V2, WHENET_PANOPTIC, W300LP,
    WIKI_ZYX,
};
use crate::error::{Error, Result};
use crate::extract::{extract_for, ExtractionResult};
use crate::so3::{frobenius_distance, Mat3, RotationMatrix, Vec3};
use std::sync::Arc;

/// A change of coordinate frame given by a signed permutation matrix `T`,
/// applied to rotations by conjugation: `R ↦ T R T^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    matrix: Mat3,
}

impl BasisChange {
    /// Validates that `t` is a signed permutation (exactly one entry of
    /// magnitude 1 in every row and column, zeros elsewhere).
    pub fn new(t: Mat3) -> Result<Self> {
        for i in 0..3 {
            let row_ok = (0..3).filter(|&j| t[(i, j)] != 0.0).count() == 1
                && (0..3).all(|j| t[(i, j)] == 0.0 || t[(i, j)].abs() == 1.0);
            let col_ok = (0..3).filter(|&j| t[(j, i)] != 0.0).count() == 1;
            if !row_ok || !col_ok {
                return Err(Error::invalid(
                    "basis change must be a signed permutation matrix",
                ));
            }
        }
        Ok(BasisChange { matrix: t })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn inverse(&self) -> BasisChange {
        BasisChange {
            matrix: self.matrix.transpose(),
        }
    }

    /// Re-expresses a vector's coordinates in the target frame.
    pub fn apply_vec(&self, v: &Vec3) -> Vec3 {
        self.matrix.mul_vec(v)
    }

    /// Re-expresses a rotation in the target frame: `T R T^-1`.
    pub fn apply(&self, r: &RotationMatrix) -> RotationMatrix {
        let m = &(&self.matrix * r.mat()) * &self.matrix.transpose();
        RotationMatrix::from_product(m)
    }
}

/// Frame change from the camera-facing family into the subject frame:
/// coordinates map cyclically, `(a, b, c) ↦ (c, a, b)`.
pub fn camera_to_subject_basis() -> BasisChange {
    BasisChange {
        matrix: Mat3([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
    }
}

/// Frame change from the subject frame into the camera-facing family.
pub fn subject_to_camera_basis() -> BasisChange {
    camera_to_subject_basis().inverse()
}

/// How to move a rotation matrix from one convention's frame to another's.
#[derive(Debug, Clone, PartialEq)]
pub enum ConversionRule {
    /// Same frame family: the matrix is reused as is.
    Identity,
    /// Conjugation by a signed permutation.
    Basis(BasisChange),
    /// The two conventions' matrices are transposes of each other.
    Transpose,
}

/// Which frame a builtin convention's matrix lives in. Conversions exist in
/// closed form only between specific family pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Camera-facing axes (x right, y down, z toward the subject).
    Camera,
    /// Subject-anchored axes (x forward, y left, z up).
    Subject,
    /// Camera-facing axes but the matrix is stored transposed.
    CameraTransposed,
    /// Camera-facing axes with its own internal sign mix; no closed-form
    /// conversion to the other families.
    Tddfa,
}

/// The family of a builtin convention name, if it has one.
pub fn family(name: &str) -> Option<Family> {
    match name {
        W300LP | WHENET_PANOPTIC => Some(Family::Camera),
        WIKI_ZYX => Some(Family::Subject),
        REPNET6D => Some(Family::CameraTransposed),
        TDDFA_V2 => Some(Family::Tddfa),
        _ => None,
    }
}

/// Looks up the conversion rule between two builtin conventions.
///
/// Supported pairs: any two camera-family conventions (identity), camera
/// family to or from `WIKI_ZYX` (basis conjugation), and camera family to or
/// from `REPNET6D` (transpose). Everything else, including any pair touching
/// `TDDFA_V2`, is an [`Error::Unsupported`].
pub fn conversion_rule(from: &str, to: &str) -> Result<ConversionRule> {
    let from_family = family(from)
        .ok_or_else(|| Error::unsupported(format!("unknown convention '{from}'")))?;
    let to_family =
        family(to).ok_or_else(|| Error::unsupported(format!("unknown convention '{to}'")))?;
    match (from_family, to_family) {
        (a, b) if a == b => Ok(ConversionRule::Identity),
        (Family::Camera, Family::Subject) => Ok(ConversionRule::Basis(camera_to_subject_basis())),
        (Family::Subject, Family::Camera) => Ok(ConversionRule::Basis(subject_to_camera_basis())),
        (Family::Camera, Family::CameraTransposed)
        | (Family::CameraTransposed, Family::Camera) => Ok(ConversionRule::Transpose),
        _ => Err(Error::unsupported(format!(
            "no conversion from '{from}' to '{to}'; supported pairs are within \
             {{{W300LP}, {WHENET_PANOPTIC}}}, that family to/from {WIKI_ZYX}, \
             and that family to/from {REPNET6D}"
        ))),
    }
}

/// Applies a conversion rule to a rotation matrix.
pub fn convert_rotation(r: &RotationMatrix, rule: &ConversionRule) -> RotationMatrix {
    match rule {
        ConversionRule::Identity => *r,
        ConversionRule::Basis(basis) => basis.apply(r),
        ConversionRule::Transpose => r.transpose(),
    }
}

/// Converts Euler angles into another convention.
///
/// The input angles are range-checked under their own convention, moved
/// across frames at matrix level, and re-extracted under the target
/// convention, so the result carries both factorizations and any gimbal
/// flag.
pub fn convert_euler(
    angles: &EulerAngles,
    to: &Arc<RotationConvention>,
) -> Result<ExtractionResult> {
    let m = euler_to_matrix(angles)?;
    let rule = conversion_rule(angles.convention.name(), to.name())?;
    extract_for(to, &convert_rotation(&m, &rule))
}

/// Frobenius distance between the original matrix and the one rebuilt from
/// the converted primary solution and mapped back. Zero up to rounding for
/// every supported pair.
pub fn roundtrip_error(angles: &EulerAngles, to: &Arc<RotationConvention>) -> Result<f64> {
    let m = euler_to_matrix(angles)?;
    let converted = convert_euler(angles, to)?;
    let p = &converted.primary;
    let rebuilt = to.matrix_of(p.pitch, p.yaw, p.roll);
    let back_rule = conversion_rule(to.name(), angles.convention.name())?;
    Ok(frobenius_distance(&convert_rotation(&rebuilt, &back_rule), &m))
}
