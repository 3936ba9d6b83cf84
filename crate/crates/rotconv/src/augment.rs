//! Pose-label updates for 2D image augmentations.
//!
//! An in-plane image rotation by `phi` multiplies the pose on the left by a
//! screen-plane rotation; a mirror across the line through the image center
//! at angle `theta` (measured like the rotation angle, with `theta = 0` the
//! horizontal line and `pi/2` the vertical one) multiplies on the left by a
//! screen-plane reflection and on the right by `diag(-1, 1, 1)`, which
//! re-mirrors the face so the label stays a proper rotation. Both label
//! rules live in the camera-facing frame family.
//!
//! The companion 2D maps translate bounding boxes and drawings: image
//! rotations move drawn pose lines rigidly (same 2D rotation about the
//! center), which is one of the consistency tests below.

use crate::annotations::PoseAnnotation;
use crate::conventions::{builtin, W300LP, WHENET_PANOPTIC};
use crate::convert::{conversion_rule, convert_rotation};
use crate::error::{Error, Result};
use crate::extract::canonical_euler;
use crate::so3::{Mat3, RotationMatrix};
use std::f64::consts::{FRAC_PI_2, PI};

/// In-plane rotation of the pose label by `phi` radians.
pub fn rotate_pose(r: &RotationMatrix, phi: f64) -> Result<RotationMatrix> {
    if !phi.is_finite() {
        return Err(Error::invalid("rotation angle must be finite"));
    }
    let (s, c) = phi.sin_cos();
    let screen = Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
    Ok(RotationMatrix::from_product(&screen * r.mat()))
}

/// Mirror of the pose label across the center line at angle `theta`,
/// restricted to `[0, pi/2]` (see [`reduce_flip_angle`] for other angles).
pub fn flip_pose(r: &RotationMatrix, theta: f64) -> Result<RotationMatrix> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::range(format!(
            "flip angle {:.6} deg is outside [0, 90] deg; \
             reduce it first (a flip at theta equals a flip at theta - 90 deg \
             followed by a half-turn rotation)",
            theta.to_degrees()
        )));
    }
    let (s2, c2) = (2.0 * theta).sin_cos();
    let screen = Mat3([[c2, s2, 0.0], [s2, -c2, 0.0], [0.0, 0.0, 1.0]]);
    let remirror = Mat3::diagonal(-1.0, 1.0, 1.0);
    Ok(RotationMatrix::from_product(
        &(&screen * r.mat()) * &remirror,
    ))
}

/// Reduces an arbitrary flip-line angle into `[0, pi/2]`.
///
/// Reflection lines are periodic in half turns, and a reflection across the
/// line at `theta + pi/2` equals the reflection at `theta` followed by a
/// half-turn rotation. Returns the reduced angle and whether that extra
/// half turn is needed.
pub fn reduce_flip_angle(theta: f64) -> (f64, bool) {
    let mut t = theta % PI;
    if t < 0.0 {
        t += PI;
    }
    if t > FRAC_PI_2 {
        (t - FRAC_PI_2, true)
    } else {
        (t, false)
    }
}

/// Applies the flip label rule with an exact screen-reflection factor, so the
/// named flips avoid the last-ulp trigonometric dust of the generic path.
fn flip_with_screen(r: &RotationMatrix, screen: Mat3) -> RotationMatrix {
    let remirror = Mat3::diagonal(-1.0, 1.0, 1.0);
    RotationMatrix::from_product(&(&screen * r.mat()) * &remirror)
}

/// Mirror across the vertical center line (left-right flip); the line angle
/// is `pi/2`, whose reflection matrix has exact `{-1, 0, 1}` entries.
pub fn horizontal_flip_pose(r: &RotationMatrix) -> RotationMatrix {
    flip_with_screen(
        r,
        Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
    )
}

/// Mirror across the horizontal center line (top-bottom flip); line angle 0.
pub fn vertical_flip_pose(r: &RotationMatrix) -> RotationMatrix {
    flip_with_screen(r, Mat3([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]))
}

/// Mirror across the diagonal center line; line angle `pi/4`.
pub fn diagonal_flip_pose(r: &RotationMatrix) -> RotationMatrix {
    flip_with_screen(r, Mat3([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]))
}

/// Both flips composed; identical to a half-turn rotation.
pub fn both_axes_flip_pose(r: &RotationMatrix) -> RotationMatrix {
    horizontal_flip_pose(&vertical_flip_pose(r))
}

/// An image augmentation whose effect on pose labels is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentOp {
    /// In-plane rotation by `phi` radians.
    Rotate { phi: f64 },
    /// Mirror across the center line at `theta` radians in `[0, pi/2]`.
    Flip { theta: f64 },
    HorizontalFlip,
    VerticalFlip,
    BothFlip,
    DiagonalFlip,
    /// Photometric-only change (blur, color jitter): labels are untouched.
    PixelOnly,
}

impl AugmentOp {
    /// Parses the CLI grammar:
    /// `rotate:<deg> | flip:<deg> | hflip | vflip | bothflip | diagflip`.
    ///
    /// `flip:<deg>` must lie in `[0, 90]` unless `reduce` is set, in which
    /// case any angle is folded per [`reduce_flip_angle`] (possibly
    /// returning a flip-plus-half-turn pair via [`AugmentOp::steps`]).
    pub fn parse(text: &str, reduce: bool) -> Result<(AugmentOp, bool)> {
        let usage = "expected rotate:<deg>, flip:<deg>, hflip, vflip, bothflip, or diagflip";
        match text {
            "hflip" => return Ok((AugmentOp::HorizontalFlip, false)),
            "vflip" => return Ok((AugmentOp::VerticalFlip, false)),
            "bothflip" => return Ok((AugmentOp::BothFlip, false)),
            "diagflip" => return Ok((AugmentOp::DiagonalFlip, false)),
            _ => {}
        }
        let (kind, value) = text
            .split_once(':')
            .ok_or_else(|| Error::format(format!("bad op '{text}': {usage}")))?;
        let deg: f64 = value
            .parse()
            .map_err(|_| Error::format(format!("bad op '{text}': '{value}' is not a number")))?;
        if !deg.is_finite() {
            return Err(Error::format(format!("bad op '{text}': angle must be finite")));
        }
        match kind {
            "rotate" => Ok((AugmentOp::Rotate { phi: deg.to_radians() }, false)),
            "flip" => {
                let theta = deg.to_radians();
                if reduce {
                    let (reduced, extra_half_turn) = reduce_flip_angle(theta);
                    Ok((AugmentOp::Flip { theta: reduced }, extra_half_turn))
                } else if (0.0..=FRAC_PI_2).contains(&theta) {
                    Ok((AugmentOp::Flip { theta }, false))
                } else {
                    Err(Error::range(format!(
                        "flip angle {deg} deg is outside [0, 90]; pass the reduce option \
                         to fold it"
                    )))
                }
            }
            _ => Err(Error::format(format!("bad op '{text}': {usage}"))),
        }
    }

    /// Applies the op's label rule to a pose matrix.
    pub fn apply_pose(&self, r: &RotationMatrix) -> Result<RotationMatrix> {
        match self {
            AugmentOp::Rotate { phi } => rotate_pose(r, *phi),
            AugmentOp::Flip { theta } => flip_pose(r, *theta),
            AugmentOp::HorizontalFlip => Ok(horizontal_flip_pose(r)),
            AugmentOp::VerticalFlip => Ok(vertical_flip_pose(r)),
            AugmentOp::BothFlip => Ok(both_axes_flip_pose(r)),
            AugmentOp::DiagonalFlip => Ok(diagonal_flip_pose(r)),
            AugmentOp::PixelOnly => Ok(*r),
        }
    }

    /// The op's 2D point map about the image center, as a matrix acting on
    /// center-relative image coordinates. `None` for pixel-only ops.
    pub fn point_map(&self) -> Option<[[f64; 2]; 2]> {
        match self {
            AugmentOp::Rotate { phi } => {
                let (s, c) = phi.sin_cos();
                Some([[c, s], [-s, c]])
            }
            AugmentOp::Flip { theta } => {
                let (s2, c2) = (2.0 * theta).sin_cos();
                Some([[c2, -s2], [-s2, -c2]])
            }
            // Exact entries: these two must not pick up trig rounding dust.
            AugmentOp::HorizontalFlip => Some([[-1.0, 0.0], [0.0, 1.0]]),
            AugmentOp::VerticalFlip => Some([[1.0, 0.0], [0.0, -1.0]]),
            AugmentOp::DiagonalFlip => AugmentOp::Flip { theta: FRAC_PI_2 / 2.0 }.point_map(),
            AugmentOp::BothFlip => Some([[-1.0, 0.0], [0.0, -1.0]]),
            AugmentOp::PixelOnly => None,
        }
    }

    /// Maps an image point under the op, about the given center.
    pub fn map_point(&self, p: [f64; 2], center: [f64; 2]) -> [f64; 2] {
        match self.point_map() {
            None => p,
            Some(m) => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                [
                    center[0] + m[0][0] * dx + m[0][1] * dy,
                    center[1] + m[1][0] * dx + m[1][1] * dy,
                ]
            }
        }
    }
}

/// Maps an axis-aligned bbox `[x, y, w, h]` under `op` in a `width` by
/// `height` image: the four corners are mapped about the image center, the
/// axis-aligned hull is taken, and the result is clipped to the image.
/// A bbox that leaves no area inside the image is an error.
pub fn map_bbox(
    bbox: [f64; 4],
    op: &AugmentOp,
    width: f64,
    height: f64,
) -> Result<[f64; 4]> {
    let center = [width / 2.0, height / 2.0];
    let corners = [
        [bbox[0], bbox[1]],
        [bbox[0] + bbox[2], bbox[1]],
        [bbox[0], bbox[1] + bbox[3]],
        [bbox[0] + bbox[2], bbox[1] + bbox[3]],
    ];
    let mapped: Vec<[f64; 2]> = corners.iter().map(|&c| op.map_point(c, center)).collect();
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in mapped {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let min_x = min_x.max(0.0);
    let min_y = min_y.max(0.0);
    let max_x = max_x.min(width);
    let max_y = max_y.min(height);
    if max_x - min_x <= 0.0 || max_y - min_y <= 0.0 {
        return Err(Error::invalid(
            "augmented bbox falls entirely outside the image",
        ));
    }
    Ok([min_x, min_y, max_x - min_x, max_y - min_y])
}

/// Applies an augmentation to a whole annotation: pose label, bbox, and
/// Euler cache (refreshed by re-extraction when the convention supports it,
/// dropped otherwise).
pub fn augment_annotation(
    annotation: &PoseAnnotation,
    op: &AugmentOp,
    width: f64,
    height: f64,
) -> Result<PoseAnnotation> {
    if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
        return Err(Error::invalid("image size must be positive and finite"));
    }
    annotation.validate()?;
    let bbox = match annotation.bbox {
        Some(b) => Some(map_bbox(b, op, width, height)?),
        None => None,
    };
    if matches!(op, AugmentOp::PixelOnly) {
        return PoseAnnotation::new(
            annotation.image_id.clone(),
            bbox,
            annotation.rotation.clone(),
            annotation.euler_cache.clone(),
            annotation.source_convention.clone(),
        );
    }
    // The label rules are stated for matrices in the camera-facing frame shared
    // by W300LP and WHENET_PANOPTIC. Records in other conventions are mapped
    // into that frame, transformed there, and mapped back; conventions with no
    // registered conversion cannot be augmented.
    let name = annotation.source_convention.as_str();
    let rotation = if name == W300LP || name == WHENET_PANOPTIC {
        op.apply_pose(&annotation.rotation)?
    } else {
        let to_rule = conversion_rule(name, W300LP).map_err(|_| {
            Error::unsupported(format!(
                "augmentation label updates are defined in the W300LP frame and \
                 no conversion from '{name}' is registered"
            ))
        })?;
        let back_rule =
            conversion_rule(W300LP, name).expect("registered conversions work both ways");
        let in_frame = convert_rotation(&annotation.rotation, &to_rule);
        let transformed = op.apply_pose(&in_frame)?;
        convert_rotation(&transformed, &back_rule)
    };
    let euler_cache = match builtin(name) {
        Some(conv) => canonical_euler(&conv, &rotation).unwrap_or(None),
        None => None,
    };
    PoseAnnotation::new(
        annotation.image_id.clone(),
        bbox,
        rotation,
        euler_cache,
        annotation.source_convention.clone(),
    )
}
