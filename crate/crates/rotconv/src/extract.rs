//! Euler-angle extraction from rotation matrices.
//!
//! Every non-degenerate rotation has exactly two Euler factorizations under a
//! given three-distinct-axes convention; the extractors here return both. The
//! pivot angle (the one whose sine appears alone in a matrix entry) is
//! recovered with `atan2(pivot_sine, hypot(q1, q2))` rather than `asin`,
//! which keeps round-trip error at the 1e-15 level even within 1e-7 rad of
//! the poles, where `asin` loses digits.
//!
//! Gimbal handling has two tiers:
//!
//! * **Flag tier** (`|cos pivot| < GIMBAL_FLAG_COS`, about 0.0256 deg from a
//!   pole): the matrix no longer pins pitch and roll individually, only one
//!   signed combination of them. The result is flagged, the determined
//!   combination is reported, and both solutions are still returned since
//!   they remain numerically exact reconstructions.
//! * **Collapse tier** (`|cos pivot| < GIMBAL_COLLAPSE_COS`): the two
//!   solution branches coincide to machine precision. Only one canonical
//!   solution is returned, built by splitting the determined combination
//!   evenly between the two free angles.

use crate::conventions::{
    builtin, wrap_angle, AngleRole, EulerAngles, RotationConvention, REPNET6D, TDDFA_V2,
    WHENET_PANOPTIC, W300LP, WIKI_ZYX,
};
use crate::error::{Error, Result};
use crate::so3::RotationMatrix;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

/// Cosine threshold below which a pose is flagged as gimbal-locked.
/// Equal to `sqrt(1 - 0.9999999^2)`: the flag trips exactly when the pivot
/// sine magnitude exceeds 0.9999999.
pub const GIMBAL_FLAG_COS: f64 = 4.472135842108574e-4;

/// Cosine threshold below which the two solution branches are fused into
/// the single canonical split.
pub const GIMBAL_COLLAPSE_COS: f64 = 1e-13;

/// `hypot(M[0,0], M[1,0])` threshold for the single-solution REPNET6D
/// reference extractor's degenerate branch.
pub const REPNET_SINGULAR_SY: f64 = 1e-6;

/// The signed angle combination that stays determined at a gimbal pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstrainedPair {
    PitchPlusRoll,
    PitchMinusRoll,
    RollPlusYaw,
    RollMinusYaw,
}

impl ConstrainedPair {
    pub fn describe(&self) -> &'static str {
        match self {
            ConstrainedPair::PitchPlusRoll => "pitch + roll",
            ConstrainedPair::PitchMinusRoll => "pitch - roll",
            ConstrainedPair::RollPlusYaw => "roll + yaw",
            ConstrainedPair::RollMinusYaw => "roll - yaw",
        }
    }
}

/// What a gimbal-locked matrix still determines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GimbalConstraint {
    /// The angle pinned at a pole.
    pub pivot_role: AngleRole,
    /// The pole itself, `+pi/2` or `-pi/2`.
    pub pivot_value: f64,
    /// Which combination of the remaining two angles is determined.
    pub pair: ConstrainedPair,
    /// The value of that combination, radians.
    pub value: f64,
}

impl GimbalConstraint {
    pub fn note(&self, collapsed: bool) -> String {
        let tail = if collapsed {
            "; returned angles split it evenly"
        } else {
            ""
        };
        format!(
            "gimbal lock: {} is at {:+.0} deg, so only {} is determined ({} = {:.9} deg){}",
            self.pivot_role.name(),
            self.pivot_value.to_degrees(),
            self.pair.describe(),
            self.pair.describe(),
            self.value.to_degrees(),
            tail,
        )
    }
}

/// Both Euler factorizations of a matrix under one convention.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    /// The solution whose pivot angle lies in `[-pi/2, pi/2]`.
    pub primary: EulerAngles,
    /// The mirrored solution; `None` only in the collapse tier, where the
    /// two branches are numerically identical.
    pub secondary: Option<EulerAngles>,
    /// True within the flag tier of a gimbal pole.
    pub gimbal_lock: bool,
    /// Present exactly when `gimbal_lock` is true.
    pub constraint: Option<GimbalConstraint>,
    /// Human-readable rendering of `constraint`.
    pub constraint_note: Option<String>,
}

impl ExtractionResult {
    /// Primary followed by the secondary, if one exists.
    pub fn solutions(&self) -> Vec<&EulerAngles> {
        let mut out = vec![&self.primary];
        if let Some(s) = &self.secondary {
            out.push(s);
        }
        out
    }

    fn retagged(mut self, convention: &Arc<RotationConvention>) -> Self {
        self.primary.convention = convention.clone();
        if let Some(s) = &mut self.secondary {
            s.convention = convention.clone();
        }
        self
    }
}

/// Maps an atan2 output into `(-pi, pi]` (only `-pi` itself needs moving).
fn canon(a: f64) -> f64 {
    if a <= -PI {
        a + TAU
    } else if a > PI {
        a - TAU
    } else {
        a
    }
}

/// The second solution for a non-pivot angle: shifted by pi toward zero.
fn shift_pi(a: f64) -> f64 {
    canon(if a >= 0.0 { a - PI } else { a + PI })
}

/// The second solution for the pivot angle: reflected about the pole.
fn mirror_pivot(a: f64) -> f64 {
    canon(if a >= 0.0 { PI - a } else { -PI - a })
}

/// Shared assembly once a convention-specific front end has computed the
/// primary triple, the pivot cosine, and the constraint for poles.
struct RawExtraction {
    pitch: f64,
    yaw: f64,
    roll: f64,
    pivot_role: AngleRole,
    pivot_cos: f64,
    constraint: GimbalConstraint,
}

fn assemble(convention: &Arc<RotationConvention>, raw: RawExtraction) -> ExtractionResult {
    let RawExtraction {
        pitch,
        yaw,
        roll,
        pivot_role,
        pivot_cos,
        constraint,
    } = raw;
    let wrap = |p: f64, y: f64, r: f64| {
        EulerAngles::new(convention.clone(), canon(p), canon(y), canon(r))
            .expect("extracted angles are always finite and in (-pi, pi]")
    };

    if pivot_cos < GIMBAL_COLLAPSE_COS {
        // Even split of the determined combination.
        let half = constraint.value / 2.0;
        let (p, r) = match constraint.pair {
            ConstrainedPair::PitchPlusRoll => (half, half),
            ConstrainedPair::PitchMinusRoll => (half, -half),
            _ => unreachable!("yaw pairs belong to a pitch-pivot convention"),
        };
        let (p, y, r) = match pivot_role {
            AngleRole::Yaw => (p, constraint.pivot_value, r),
            _ => unreachable!("collapse splitting is wired per convention"),
        };
        let note = constraint.note(true);
        return ExtractionResult {
            primary: wrap(p, y, r),
            secondary: None,
            gimbal_lock: true,
            constraint: Some(constraint),
            constraint_note: Some(note),
        };
    }

    let (p2, y2, r2) = match pivot_role {
        AngleRole::Yaw => (shift_pi(pitch), mirror_pivot(yaw), shift_pi(roll)),
        AngleRole::Pitch => (mirror_pivot(pitch), shift_pi(yaw), shift_pi(roll)),
        AngleRole::Roll => (shift_pi(pitch), shift_pi(yaw), mirror_pivot(roll)),
    };
    let flagged = pivot_cos < GIMBAL_FLAG_COS;
    ExtractionResult {
        primary: wrap(pitch, yaw, roll),
        secondary: Some(wrap(p2, y2, r2)),
        gimbal_lock: flagged,
        constraint_note: flagged.then(|| constraint.note(false)),
        constraint: flagged.then_some(constraint),
    }
}

/// Collapse-tier assembly for the pitch-pivot (WIKI_ZYX) layout, where the
/// determined pair mixes roll and yaw.
fn assemble_wiki_collapse(
    convention: &Arc<RotationConvention>,
    constraint: GimbalConstraint,
) -> ExtractionResult {
    let half = constraint.value / 2.0;
    let (y, r) = match constraint.pair {
        ConstrainedPair::RollMinusYaw => (-half, half),
        ConstrainedPair::RollPlusYaw => (half, half),
        _ => unreachable!("pitch pairs belong to a yaw-pivot convention"),
    };
    let note = constraint.note(true);
    ExtractionResult {
        primary: EulerAngles::new(convention.clone(), constraint.pivot_value, y, r)
            .expect("split angles are finite and in range"),
        secondary: None,
        gimbal_lock: true,
        constraint: Some(constraint),
        constraint_note: Some(note),
    }
}

/// Dual-solution extraction under the `W300LP` convention.
pub fn extract_300wlp(m: &RotationMatrix) -> ExtractionResult {
    let convention = builtin(W300LP).expect("builtin exists");
    let pivot_cos = f64::hypot(m[(1, 2)], m[(2, 2)]);
    let pivot_sin = -m[(0, 2)];
    let constraint = if pivot_sin > 0.0 {
        GimbalConstraint {
            pivot_role: AngleRole::Yaw,
            pivot_value: FRAC_PI_2,
            pair: ConstrainedPair::PitchMinusRoll,
            value: f64::atan2(m[(1, 0)], m[(1, 1)]),
        }
    } else {
        GimbalConstraint {
            pivot_role: AngleRole::Yaw,
            pivot_value: -FRAC_PI_2,
            pair: ConstrainedPair::PitchPlusRoll,
            value: f64::atan2(-m[(1, 0)], m[(1, 1)]),
        }
    };
    assemble(
        &convention,
        RawExtraction {
            pitch: f64::atan2(m[(1, 2)], m[(2, 2)]),
            yaw: f64::atan2(pivot_sin, pivot_cos),
            roll: f64::atan2(m[(0, 1)], m[(0, 0)]),
            pivot_role: AngleRole::Yaw,
            pivot_cos,
            constraint,
        },
    )
}

/// Dual-solution extraction under the `WIKI_ZYX` convention.
pub fn extract_wiki_zyx(m: &RotationMatrix) -> ExtractionResult {
    let convention = builtin(WIKI_ZYX).expect("builtin exists");
    let pivot_cos = f64::hypot(m[(2, 1)], m[(2, 2)]);
    let pivot_sin = -m[(2, 0)];
    let constraint = if pivot_sin > 0.0 {
        GimbalConstraint {
            pivot_role: AngleRole::Pitch,
            pivot_value: FRAC_PI_2,
            pair: ConstrainedPair::RollMinusYaw,
            value: f64::atan2(m[(0, 1)], m[(0, 2)]),
        }
    } else {
        GimbalConstraint {
            pivot_role: AngleRole::Pitch,
            pivot_value: -FRAC_PI_2,
            pair: ConstrainedPair::RollPlusYaw,
            value: f64::atan2(-m[(0, 1)], -m[(0, 2)]),
        }
    };
    if pivot_cos < GIMBAL_COLLAPSE_COS {
        return assemble_wiki_collapse(&convention, constraint);
    }
    assemble(
        &convention,
        RawExtraction {
            pitch: f64::atan2(pivot_sin, pivot_cos),
            yaw: f64::atan2(m[(1, 0)], m[(0, 0)]),
            roll: f64::atan2(m[(2, 1)], m[(2, 2)]),
            pivot_role: AngleRole::Pitch,
            pivot_cos,
            constraint,
        },
    )
}

/// Dual-solution extraction under the `TDDFA_V2` convention.
pub fn extract_tddfa(m: &RotationMatrix) -> ExtractionResult {
    let convention = builtin(TDDFA_V2).expect("builtin exists");
    let pivot_cos = f64::hypot(m[(2, 1)], m[(2, 2)]);
    let pivot_sin = m[(2, 0)];
    let constraint = if pivot_sin > 0.0 {
        GimbalConstraint {
            pivot_role: AngleRole::Yaw,
            pivot_value: FRAC_PI_2,
            pair: ConstrainedPair::PitchPlusRoll,
            value: f64::atan2(-m[(0, 1)], m[(1, 1)]),
        }
    } else {
        GimbalConstraint {
            pivot_role: AngleRole::Yaw,
            pivot_value: -FRAC_PI_2,
            pair: ConstrainedPair::PitchMinusRoll,
            value: f64::atan2(m[(0, 1)], m[(1, 1)]),
        }
    };
    assemble(
        &convention,
        RawExtraction {
            pitch: f64::atan2(m[(2, 1)], m[(2, 2)]),
            yaw: f64::atan2(pivot_sin, pivot_cos),
            roll: f64::atan2(m[(1, 0)], m[(0, 0)]),
            pivot_role: AngleRole::Yaw,
            pivot_cos,
            constraint,
        },
    )
}

/// Single-solution reference extraction under `REPNET6D`.
///
/// This mirrors the widely copied OpenCV-style decomposition: near the
/// `hypot(M[0,0], M[1,0])` singularity it pins roll to zero and folds the
/// undetermined combination into pitch. Prefer [`extract_for`], which
/// resolves the same convention with full dual-solution handling; this
/// function exists as the compatibility reference.
pub fn extract_repnet(m: &RotationMatrix) -> EulerAngles {
    let convention = builtin(REPNET6D).expect("builtin exists");
    let sy = f64::hypot(m[(0, 0)], m[(1, 0)]);
    let (pitch, roll) = if sy >= REPNET_SINGULAR_SY {
        (
            f64::atan2(m[(2, 1)], m[(2, 2)]),
            f64::atan2(m[(1, 0)], m[(0, 0)]),
        )
    } else {
        (f64::atan2(-m[(1, 2)], m[(1, 1)]), 0.0)
    };
    let yaw = f64::atan2(-m[(2, 0)], sy);
    EulerAngles::new(convention, canon(pitch), canon(yaw), canon(roll))
        .expect("extracted angles are finite and in (-pi, pi]")
}

/// Picks the factorization whose pitch and roll both lie strictly inside
/// (-90, 90) degrees and tags it `WHENET_PANOPTIC`. Exactly one of the two
/// solutions qualifies unless the pose sits on the boundary, in which case
/// `None` is returned.
pub fn whenet_select_euler(result: &ExtractionResult) -> Option<EulerAngles> {
    let convention = builtin(WHENET_PANOPTIC).expect("builtin exists");
    for candidate in result.solutions() {
        let yaw = wrap_angle(candidate.yaw);
        if candidate.pitch.abs() < FRAC_PI_2 && candidate.roll.abs() < FRAC_PI_2 {
            return Some(
                EulerAngles::new(convention, candidate.pitch, yaw, candidate.roll)
                    .expect("selected angles are finite and in (-pi, pi]"),
            );
        }
    }
    None
}

/// The convention's preferred single Euler triple for a matrix, or `None`
/// when the convention cannot represent the pose at all (a
/// `WHENET_PANOPTIC` pose whose pitch or roll reaches 90 degrees in both
/// factorizations). Unsupported conventions are an error.
pub fn canonical_euler(
    convention: &Arc<RotationConvention>,
    m: &RotationMatrix,
) -> Result<Option<EulerAngles>> {
    match convention.name() {
        WHENET_PANOPTIC => Ok(whenet_select_euler(&extract_300wlp(m))),
        _ => extract_for(convention, m).map(|res| Some(res.primary)),
    }
}

/// Extraction dispatch by convention.
///
/// `WHENET_PANOPTIC` shares the `W300LP` factors, so its result is the
/// `W300LP` extraction retagged (note the angles may leave WHENet's declared
/// open ranges; apply [`whenet_select_euler`] to choose the representative).
/// `REPNET6D` is resolved through its transpose relationship with `W300LP`,
/// which upgrades it to full dual-solution handling.
pub fn extract_for(
    convention: &Arc<RotationConvention>,
    m: &RotationMatrix,
) -> Result<ExtractionResult> {
    match convention.name() {
        W300LP => Ok(extract_300wlp(m)),
        WIKI_ZYX => Ok(extract_wiki_zyx(m)),
        TDDFA_V2 => Ok(extract_tddfa(m)),
        WHENET_PANOPTIC => Ok(extract_300wlp(m).retagged(convention)),
        REPNET6D => Ok(extract_300wlp(&m.transpose()).retagged(convention)),
        other => Err(Error::unsupported(format!(
            "no extraction for convention '{other}' (supported: {WIKI_ZYX}, {W300LP}, {TDDFA_V2}, {REPNET6D}, {WHENET_PANOPTIC})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{frobenius_distance, Mat3};
    use proptest::prelude::*;

    const TRIPLE_A: [f64; 3] = [0.4, -0.25, 1.1];

    // A near-gimbal face annotation matrix (yaw about -89.9986 deg),
    // frozen from an independent implementation.
    const NEAR_POLE: [[f64; 3]; 3] = [
        [2.4574904911049375e-5, -2.9540960060506106e-6, 0.9999999996936737],
        [0.38985413075117326, 0.9208766240323313, -6.860270237372096e-6],
        [-0.9208766237299767, 0.3898541308003412, 2.378212200099708e-5],
    ];

    fn assert_triple(ea: &EulerAngles, want: [f64; 3], tol: f64) {
        let got = ea.radians();
        for i in 0..3 {
            assert!(
                (got[i] - want[i]).abs() <= tol,
                "angle {i}: got {:.17}, want {:.17}",
                got[i],
                want[i]
            );
        }
    }

    fn rebuild_error(ea: &EulerAngles, m: &RotationMatrix) -> f64 {
        let back = ea.convention.matrix_of(ea.pitch, ea.yaw, ea.roll);
        frobenius_distance(&back, m)
    }

    #[test]
    fn w300lp_duals_match_frozen_values() {
        let [p, y, r] = TRIPLE_A;
        let m = builtin(W300LP).unwrap().matrix_of(p, y, r);
        let res = extract_300wlp(&m);
        assert!(!res.gimbal_lock);
        assert!(res.constraint.is_none() && res.constraint_note.is_none());
        assert_triple(&res.primary, [0.4, -0.25, 1.1], 1e-15);
        assert_triple(
            res.secondary.as_ref().unwrap(),
            [-2.741592653589793, -2.891592653589793, -2.041592653589793],
            1e-15,
        );
        assert!(rebuild_error(&res.primary, &m) <= 1e-15);
        assert!(rebuild_error(res.secondary.as_ref().unwrap(), &m) <= 1e-14);
    }

    #[test]
    fn wiki_duals_match_frozen_values() {
        let [p, y, r] = TRIPLE_A;
        let m = builtin(WIKI_ZYX).unwrap().matrix_of(p, y, r);
        let res = extract_wiki_zyx(&m);
        assert!(!res.gimbal_lock);
        assert_triple(&res.primary, [0.4, -0.25000000000000006, 1.1], 1e-15);
        assert_triple(
            res.secondary.as_ref().unwrap(),
            [2.741592653589793, 2.891592653589793, -2.041592653589793],
            1e-15,
        );
        assert!(rebuild_error(&res.primary, &m) <= 1e-15);
        assert!(rebuild_error(res.secondary.as_ref().unwrap(), &m) <= 1e-14);
    }

    #[test]
    fn tddfa_duals_invert_the_product() {
        let [p, y, r] = TRIPLE_A;
        let m = builtin(TDDFA_V2).unwrap().matrix_of(p, y, r);
        let res = extract_tddfa(&m);
        assert_triple(&res.primary, TRIPLE_A, 1e-14);
        assert!(rebuild_error(res.secondary.as_ref().unwrap(), &m) <= 1e-14);
    }

    #[test]
    fn identity_extracts_to_zero_and_half_turn_pair() {
        let res = extract_300wlp(&RotationMatrix::identity());
        assert_triple(&res.primary, [0.0, 0.0, 0.0], 0.0);
        // The mirrored branch sits at the half turn; -pi aliases are
        // canonicalized to +pi so the angles stay within (-pi, pi].
        assert_triple(res.secondary.as_ref().unwrap(), [PI, PI, PI], 0.0);
        assert!(rebuild_error(res.secondary.as_ref().unwrap(), &RotationMatrix::identity()) <= 1e-15);
    }

    #[test]
    fn near_pole_matrix_is_flagged_with_both_solutions_kept() {
        let m = RotationMatrix::try_new(Mat3(NEAR_POLE)).unwrap();
        let res = extract_300wlp(&m);
        assert!(res.gimbal_lock);
        assert!(res.secondary.is_some());

        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::PitchPlusRoll);
        assert_eq!(c.pivot_role, AngleRole::Yaw);
        assert_eq!(c.pivot_value, -FRAC_PI_2);
        // Frozen: atan2(-M[1,0], M[1,1]) in degrees.
        assert!((c.value.to_degrees() - -22.94542329731833).abs() <= 1e-9);
        assert!(res.constraint_note.as_ref().unwrap().contains("pitch + roll"));

        // Frozen primary, in degrees.
        let deg = res.primary.degrees();
        let want = [-16.0909114014583, -89.9985818251308, -6.854511900533988];
        for i in 0..3 {
            assert!((deg[i] - want[i]).abs() <= 1e-9, "angle {i}");
        }
        // Even this close to the pole, both solutions stay exact.
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);
        assert!(rebuild_error(res.secondary.as_ref().unwrap(), &m) <= 1e-12);
    }

    #[test]
    fn exact_pole_collapses_to_even_split() {
        let conv = builtin(W300LP).unwrap();

        let m = conv.matrix_of(0.3, FRAC_PI_2, -0.2);
        let res = extract_300wlp(&m);
        assert!(res.gimbal_lock);
        assert!(res.secondary.is_none());
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::PitchMinusRoll);
        assert!((c.value - 0.5).abs() <= 1e-12);
        assert_triple(&res.primary, [0.25, FRAC_PI_2, -0.25], 1e-12);
        assert!(res.constraint_note.as_ref().unwrap().contains("split"));
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);

        let m = conv.matrix_of(0.3, -FRAC_PI_2, -0.2);
        let res = extract_300wlp(&m);
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::PitchPlusRoll);
        assert!((c.value - 0.1).abs() <= 1e-12);
        assert_triple(&res.primary, [0.05, -FRAC_PI_2, 0.05], 1e-12);
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);
    }

    #[test]
    fn wiki_and_tddfa_collapse_at_both_poles() {
        let wiki = builtin(WIKI_ZYX).unwrap();
        let m = wiki.matrix_of(FRAC_PI_2, 0.4, 0.7);
        let res = extract_wiki_zyx(&m);
        assert!(res.gimbal_lock && res.secondary.is_none());
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::RollMinusYaw);
        assert!((c.value - 0.3).abs() <= 1e-12);
        assert_triple(&res.primary, [FRAC_PI_2, -0.15, 0.15], 1e-12);
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);

        let m = wiki.matrix_of(-FRAC_PI_2, 0.4, 0.7);
        let res = extract_wiki_zyx(&m);
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::RollPlusYaw);
        assert!((c.value - 1.1).abs() <= 1e-12);
        assert_triple(&res.primary, [-FRAC_PI_2, 0.55, 0.55], 1e-12);
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);

        let tddfa = builtin(TDDFA_V2).unwrap();
        let m = tddfa.matrix_of(0.3, FRAC_PI_2, -0.2);
        let res = extract_tddfa(&m);
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::PitchPlusRoll);
        assert!((c.value - 0.1).abs() <= 1e-12);
        assert_triple(&res.primary, [0.05, FRAC_PI_2, 0.05], 1e-12);
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);

        let m = tddfa.matrix_of(0.3, -FRAC_PI_2, -0.2);
        let res = extract_tddfa(&m);
        let c = res.constraint.unwrap();
        assert_eq!(c.pair, ConstrainedPair::PitchMinusRoll);
        assert!((c.value - 0.5).abs() <= 1e-12);
        assert_triple(&res.primary, [0.25, -FRAC_PI_2, -0.25], 1e-12);
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);
    }

    #[test]
    fn repnet_reference_matches_dual_extraction_away_from_singularity() {
        let [p, y, r] = TRIPLE_A;
        let conv = builtin(REPNET6D).unwrap();
        let m = conv.matrix_of(p, y, r);
        let single = extract_repnet(&m);
        assert_triple(&single, TRIPLE_A, 1e-14);

        let dual = extract_for(&conv, &m).unwrap();
        assert_eq!(dual.primary.convention.name(), REPNET6D);
        for i in 0..3 {
            assert!((dual.primary.radians()[i] - single.radians()[i]).abs() <= 1e-13);
        }
        assert!(rebuild_error(&dual.primary, &m) <= 1e-14);
        assert!(rebuild_error(dual.secondary.as_ref().unwrap(), &m) <= 1e-13);
    }

    #[test]
    fn repnet_reference_singular_branch_pins_roll() {
        let conv = builtin(REPNET6D).unwrap();
        let m = conv.matrix_of(0.2, FRAC_PI_2 - 1e-9, 0.1);
        let single = extract_repnet(&m);
        assert_eq!(single.roll, 0.0);
        assert!((single.yaw - FRAC_PI_2).abs() <= 1e-6);
        // With roll pinned, pitch absorbs the determined combination p - r.
        assert!((single.pitch - 0.1).abs() <= 1e-6);
    }

    #[test]
    fn whenet_selection_picks_the_in_range_branch() {
        let conv = builtin(W300LP).unwrap();

        // Primary (150, 20, -168) deg is out of range; its mirror
        // (-30, 160, 12) deg qualifies.
        let m = conv.matrix_of(
            150f64.to_radians(),
            20f64.to_radians(),
            -168f64.to_radians(),
        );
        let picked = whenet_select_euler(&extract_300wlp(&m)).unwrap();
        assert_eq!(picked.convention.name(), WHENET_PANOPTIC);
        let deg = picked.degrees();
        assert!((deg[0] - -30.0).abs() <= 1e-9);
        assert!((deg[1] - 160.0).abs() <= 1e-9);
        assert!((deg[2] - 12.0).abs() <= 1e-9);

        // Neither branch of (150, 20, 10) deg qualifies: the mirror has
        // roll -170 deg.
        let m = conv.matrix_of(
            150f64.to_radians(),
            20f64.to_radians(),
            10f64.to_radians(),
        );
        assert!(whenet_select_euler(&extract_300wlp(&m)).is_none());

        // A flagged near-pole pose still selects normally.
        let m = RotationMatrix::try_new(Mat3(NEAR_POLE)).unwrap();
        let picked = whenet_select_euler(&extract_300wlp(&m)).unwrap();
        assert!((picked.degrees()[1] - -89.9985818251308).abs() <= 1e-9);
    }

    #[test]
    fn extract_for_dispatches_and_rejects_unknown() {
        let m = builtin(W300LP).unwrap().matrix_of(0.2, 0.3, -0.1);
        let whenet = builtin(WHENET_PANOPTIC).unwrap();
        let res = extract_for(&whenet, &m).unwrap();
        assert_eq!(res.primary.convention.name(), WHENET_PANOPTIC);
        assert_triple(&res.primary, [0.2, 0.3, -0.1], 1e-14);

        let custom = Arc::new(
            RotationConvention::new(
                "CUSTOM",
                *builtin(W300LP).unwrap().sequence(),
                "",
                *builtin(W300LP).unwrap().angle_ranges(),
            )
            .unwrap(),
        );
        assert!(matches!(
            extract_for(&custom, &m),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn primary_lies_within_declared_ranges() {
        // Deliberately out-of-range inputs still extract to an in-range
        // primary describing the same matrix.
        let conv = builtin(W300LP).unwrap();
        let m = conv.matrix_of(2.8, 2.0, -3.0);
        let res = extract_300wlp(&m);
        let [p, y, r] = res.primary.radians();
        assert!(conv.check_ranges(p, y, r).is_ok());
        assert!(rebuild_error(&res.primary, &m) <= 1e-12);
    }

    proptest! {
        // The core dual-solution contract: for every extractable builtin
        // and any input matrix, both returned factorizations rebuild the
        // matrix to 1e-12 and the primary respects the declared ranges.
        #[test]
        fn duals_rebuild_everywhere(
            idx in 0usize..4,
            p in -PI..PI, y in -PI..PI, r in -PI..PI,
        ) {
            let conv = match idx {
                0 => builtin(WIKI_ZYX).unwrap(),
                1 => builtin(W300LP).unwrap(),
                2 => builtin(TDDFA_V2).unwrap(),
                _ => builtin(REPNET6D).unwrap(),
            };
            let m = conv.matrix_of(p, y, r);
            let res = extract_for(&conv, &m).unwrap();
            for sol in res.solutions() {
                prop_assert!(rebuild_error(sol, &m) <= 1e-12);
            }
            let [pp, py, pr] = res.primary.radians();
            prop_assert!(conv.check_ranges(pp, py, pr).is_ok());
        }

        // Same contract inside the flag tier, where asin-based extractors
        // lose digits: approach the pole as closely as 1e-9 rad.
        #[test]
        fn duals_rebuild_in_the_near_pole_band(
            sign in prop::bool::ANY,
            eps in 1e-9f64..1e-4,
            p in -PI..PI, r in -PI..PI,
        ) {
            let y = if sign { FRAC_PI_2 - eps } else { -FRAC_PI_2 + eps };
            let conv = builtin(W300LP).unwrap();
            let m = conv.matrix_of(p, y, r);
            let res = extract_300wlp(&m);
            prop_assert_eq!(res.gimbal_lock, eps.sin() < GIMBAL_FLAG_COS);
            prop_assert!(res.secondary.is_some());
            for sol in res.solutions() {
                prop_assert!(rebuild_error(sol, &m) <= 1e-12);
            }
        }

        // The two solutions are genuinely distinct factorizations.
        #[test]
        fn secondary_differs_from_primary(
            p in -1.0f64..1.0, y in -1.0f64..1.0, r in -1.0f64..1.0,
        ) {
            let conv = builtin(W300LP).unwrap();
            let m = conv.matrix_of(p, y, r);
            let res = extract_300wlp(&m);
            let s = res.secondary.as_ref().unwrap();
            prop_assert!((res.primary.pitch - s.pitch).abs() > 1.0);
        }

        // WHENet selection finds at most one representative away from the
        // (-90, 90) boundary.
        #[test]
        fn whenet_selection_is_single_valued(
            p in -PI..PI, y in -PI..PI, r in -PI..PI,
        ) {
            let margin = 1e-6;
            let near_boundary = |a: f64| (a.abs() - FRAC_PI_2).abs() < margin;
            prop_assume!(!near_boundary(p) && !near_boundary(r));
            let conv = builtin(W300LP).unwrap();
            let m = conv.matrix_of(p, y, r);
            let res = extract_300wlp(&m);
            let qualifying = res
                .solutions()
                .iter()
                .filter(|s| s.pitch.abs() < FRAC_PI_2 && s.roll.abs() < FRAC_PI_2)
                .count();
            prop_assert!(qualifying <= 1);
            if let Some(sel) = whenet_select_euler(&res) {
                let rebuilt = conv.matrix_of(sel.pitch, sel.yaw, sel.roll);
                prop_assert!(frobenius_distance(&rebuilt, &m) <= 1e-12);
            }
        }
    }
}
