//! Head-pose rotation conventions: representation, conversion, and checking.
//!
//! Pose datasets and estimators all report pitch/yaw/roll, but they disagree
//! about what those words mean: which axis each angle turns about, in which
//! order the elemental rotations compose, which way is positive, and what
//! value range each angle may take. Mixing two of these silently corrupts
//! labels in ways that look plausible on screen.
//!
//! This crate treats the 3x3 rotation matrix as the single source of truth
//! and makes every convention explicit:
//!
//! * [`so3`] — validated rotation matrices, elemental rotations, and
//!   distance metrics;
//! * [`conventions`] — named Euler conventions (factor sequence, handedness,
//!   declared angle ranges), five built-ins, and a JSON registry for custom
//!   ones;
//! * [`extract`] — matrix-to-Euler with both solutions, stable near-pole
//!   formulas, and explicit gimbal-lock reporting;
//! * [`convert`] — exact cross-convention conversion where a closed form
//!   exists (frame-family basis changes and transposes), with everything
//!   else refused rather than approximated;
//! * [`draw`] — the three-line and pose-cube overlay math shared by pose
//!   visualizers, plus SVG output, so identical poses draw identically from
//!   any supported convention;
//! * [`augment`] — label updates for 2D image rotations and mirrors, with
//!   bounding-box and drawing consistency;
//! * [`annotations`] — JSON and CSV annotation files tagged with their
//!   convention;
//! * [`infer`] — recovering an unknown convention from matrix-entry
//!   patterns or numeric (angles, matrix) samples by searching all 288
//!   three-factor factorizations;
//! * [`horn`] — similarity alignment of 3D keypoint sets and the compound
//!   poses landmark-based estimators derive from it.
//!
//! Angles are radians internally ([`f64`]); file formats and the CLI speak
//! degrees.

pub mod annotations;
pub mod augment;
pub mod conventions;
pub mod convert;
pub mod draw;
pub mod error;
pub mod extract;
pub mod horn;
pub mod infer;
pub mod so3;

pub use annotations::{
    annotations_to_csv, annotations_to_json, load_annotations, parse_annotations_csv,
    parse_annotations_json, save_annotations, AnnotationFormat, PoseAnnotation,
};
pub use augment::{augment_annotation, map_bbox, reduce_flip_angle, AugmentOp};
pub use conventions::{
    builtin, builtin_conventions, euler_to_matrix, sequence_matrix, wrap_angle, AngleInterval,
    AngleRanges, AngleRole, ConventionRegistry, ElementalSpec, EulerAngles, RotationConvention,
    REPNET6D, TDDFA_V2, W300LP, WHENET_PANOPTIC, WIKI_ZYX,
};
pub use convert::{
    camera_to_subject_basis, conversion_rule, convert_euler, convert_rotation, family,
    roundtrip_error, subject_to_camera_basis, BasisChange, ConversionRule, Family,
};
pub use draw::{
    draw_axis_reference, emit_svg, pose_cube_endpoints, three_line_endpoints, Color,
    CubeProjection, Drawing, LineProjection,
};
pub use error::{Error, Result};
pub use extract::{
    canonical_euler, extract_300wlp, extract_for, extract_repnet, extract_tddfa,
    extract_wiki_zyx, whenet_select_euler, ConstrainedPair, ExtractionResult, GimbalConstraint,
};
pub use horn::{
    filter_by_confidence, horn_align, panoptic_pose, reference_head, reference_head_default,
    whenet_compound_pose, Alignment, CameraExtrinsic, KeypointSet, REFERENCE_HEAD_POINTS,
};
pub use infer::{
    enumerate_candidates, infer_from_numeric_samples, match_pattern, EntryPattern, EulerTriple,
    FactorizationCandidate, InferenceOutcome,
};
pub use so3::{
    elemental, frobenius_distance, geodesic_distance, Axis, Handedness, Mat3, RotationMatrix,
    Vec3,
};
