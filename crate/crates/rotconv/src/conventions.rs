//! Named Euler-angle conventions and the registry that stores them.
//!
//! A convention is an ordered product of three elemental rotations, each
//! bound to one of the angle roles pitch / yaw / roll, plus declared angle
//! ranges and a free-text note describing the coordinate frame. The sequence
//! is written leftmost factor first: `[Z+yaw, Y+pitch, X+roll]` means
//! `R = Z(yaw) * Y(pitch) * X(roll)` acting on column vectors, with `+` for
//! the right-handed elemental and `-` for its transpose.
//!
//! Angle arguments throughout this crate are radians in `(-pi, pi]` and are
//! always passed in the fixed order (pitch, yaw, roll), independent of where
//! each role sits in a convention's sequence.

use crate::error::{Error, Result};
use crate::so3::{elemental, Axis, Handedness, RotationMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;
use std::sync::OnceLock;

/// Which input slot an elemental rotation consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AngleRole {
    Pitch,
    Yaw,
    Roll,
}

impl AngleRole {
    pub fn name(&self) -> &'static str {
        match self {
            AngleRole::Pitch => "pitch",
            AngleRole::Yaw => "yaw",
            AngleRole::Roll => "roll",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pitch" => Ok(AngleRole::Pitch),
            "yaw" => Ok(AngleRole::Yaw),
            "roll" => Ok(AngleRole::Roll),
            other => Err(Error::format(format!(
                "unknown angle role '{other}' (expected pitch, yaw, or roll)"
            ))),
        }
    }
}

/// One factor of a convention: an axis, a handedness, and the angle role
/// whose value it consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementalSpec {
    pub axis: Axis,
    pub handedness: Handedness,
    pub role: AngleRole,
}

impl ElementalSpec {
    pub fn new(axis: Axis, handedness: Handedness, role: AngleRole) -> Self {
        ElementalSpec {
            axis,
            handedness,
            role,
        }
    }

    /// Parses tokens like `"Z+yaw"` or `"X-pitch"`.
    pub fn parse(token: &str) -> Result<Self> {
        let mut chars = token.chars();
        let axis = match chars.next() {
            Some('X') => Axis::X,
            Some('Y') => Axis::Y,
            Some('Z') => Axis::Z,
            _ => {
                return Err(Error::format(format!(
                    "bad sequence token '{token}': expected axis X, Y, or Z first"
                )))
            }
        };
        let handedness = match chars.next() {
            Some('+') => Handedness::Right,
            Some('-') => Handedness::Left,
            _ => {
                return Err(Error::format(format!(
                    "bad sequence token '{token}': expected '+' or '-' after the axis"
                )))
            }
        };
        let role = AngleRole::parse(chars.as_str()).map_err(|_| {
            Error::format(format!(
                "bad sequence token '{token}': expected pitch, yaw, or roll after the sign"
            ))
        })?;
        Ok(ElementalSpec::new(axis, handedness, role))
    }
}

impl fmt::Display for ElementalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.axis.letter(),
            self.handedness.sign_char(),
            self.role.name()
        )
    }
}

/// An angle interval with independently inclusive or exclusive endpoints,
/// stored in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleInterval {
    pub min: f64,
    pub max: f64,
    pub min_inclusive: bool,
    pub max_inclusive: bool,
}

impl AngleInterval {
    pub fn from_degrees(
        min_deg: f64,
        max_deg: f64,
        min_inclusive: bool,
        max_inclusive: bool,
    ) -> Self {
        AngleInterval {
            min: min_deg.to_radians(),
            max: max_deg.to_radians(),
            min_inclusive,
            max_inclusive,
        }
    }

    /// The default range `(-180, 180]` degrees.
    pub fn full_turn() -> Self {
        AngleInterval::from_degrees(-180.0, 180.0, false, true)
    }

    pub fn contains(&self, v: f64) -> bool {
        let lower_ok = if self.min_inclusive {
            v >= self.min
        } else {
            v > self.min
        };
        let upper_ok = if self.max_inclusive {
            v <= self.max
        } else {
            v < self.max
        };
        lower_ok && upper_ok
    }

    fn describe_degrees(&self) -> String {
        format!(
            "{}{:.6}, {:.6}{} deg",
            if self.min_inclusive { '[' } else { '(' },
            self.min.to_degrees(),
            self.max.to_degrees(),
            if self.max_inclusive { ']' } else { ')' },
        )
    }
}

/// Declared per-role ranges of a convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRanges {
    pub pitch: AngleInterval,
    pub yaw: AngleInterval,
    pub roll: AngleInterval,
}

impl AngleRanges {
    pub fn full() -> Self {
        AngleRanges {
            pitch: AngleInterval::full_turn(),
            yaw: AngleInterval::full_turn(),
            roll: AngleInterval::full_turn(),
        }
    }

    pub fn get(&self, role: AngleRole) -> &AngleInterval {
        match role {
            AngleRole::Pitch => &self.pitch,
            AngleRole::Yaw => &self.yaw,
            AngleRole::Roll => &self.roll,
        }
    }
}

/// A named Euler-angle convention.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationConvention {
    name: String,
    sequence: [ElementalSpec; 3],
    frame_note: String,
    angle_ranges: AngleRanges,
}

impl RotationConvention {
    /// Builds a convention. The three factors must consume pitch, yaw, and
    /// roll exactly once each; axes may repeat (proper-Euler style sequences
    /// are legal even though no extraction ships for them).
    pub fn new(
        name: impl Into<String>,
        sequence: [ElementalSpec; 3],
        frame_note: impl Into<String>,
        angle_ranges: AngleRanges,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("convention name must be non-empty"));
        }
        let mut roles: Vec<AngleRole> = sequence.iter().map(|s| s.role).collect();
        roles.sort();
        if roles != [AngleRole::Pitch, AngleRole::Yaw, AngleRole::Roll] {
            return Err(Error::invalid(format!(
                "convention '{name}' must use each of pitch, yaw, roll exactly once"
            )));
        }
        Ok(RotationConvention {
            name,
            sequence,
            frame_note: frame_note.into(),
            angle_ranges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The factors, leftmost first in the matrix product.
    pub fn sequence(&self) -> &[ElementalSpec; 3] {
        &self.sequence
    }

    pub fn frame_note(&self) -> &str {
        &self.frame_note
    }

    pub fn angle_ranges(&self) -> &AngleRanges {
        &self.angle_ranges
    }

    /// Sequence rendered as tokens, e.g. `"X-pitch, Y-yaw, Z-roll"`.
    pub fn sequence_string(&self) -> String {
        let parts: Vec<String> = self.sequence.iter().map(|s| s.to_string()).collect();
        parts.join(", ")
    }

    /// The rotation matrix at the given angles (radians).
    ///
    /// No range check is applied: any finite angles produce the product the
    /// sequence defines. This is what extraction round-trips rely on, since a
    /// secondary Euler solution may leave the declared ranges while still
    /// reproducing the matrix. Range enforcement lives in [`euler_to_matrix`].
    pub fn matrix_of(&self, pitch: f64, yaw: f64, roll: f64) -> RotationMatrix {
        sequence_matrix(&self.sequence, pitch, yaw, roll)
    }

    /// Checks the given angles against the declared ranges.
    pub fn check_ranges(&self, pitch: f64, yaw: f64, roll: f64) -> Result<()> {
        for (role, value) in [
            (AngleRole::Pitch, pitch),
            (AngleRole::Yaw, yaw),
            (AngleRole::Roll, roll),
        ] {
            let interval = self.angle_ranges.get(role);
            if !interval.contains(value) {
                return Err(Error::range(format!(
                    "{} = {:.9} deg is outside {} declared by convention '{}'",
                    role.name(),
                    value.to_degrees(),
                    interval.describe_degrees(),
                    self.name,
                )));
            }
        }
        Ok(())
    }
}

/// The product of a three-factor sequence at the given angles (radians),
/// leftmost factor applied last to column vectors.
pub fn sequence_matrix(
    sequence: &[ElementalSpec; 3],
    pitch: f64,
    yaw: f64,
    roll: f64,
) -> RotationMatrix {
    let angle_of = |role: AngleRole| match role {
        AngleRole::Pitch => pitch,
        AngleRole::Yaw => yaw,
        AngleRole::Roll => roll,
    };
    let a = elemental(
        sequence[0].axis,
        sequence[0].handedness,
        angle_of(sequence[0].role),
    );
    let b = elemental(
        sequence[1].axis,
        sequence[1].handedness,
        angle_of(sequence[1].role),
    );
    let c = elemental(
        sequence[2].axis,
        sequence[2].handedness,
        angle_of(sequence[2].role),
    );
    &(&a * &b) * &c
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % TAU;
    if x <= -PI {
        x += TAU;
    } else if x > PI {
        x -= TAU;
    }
    x
}

/// Euler angles bound to a convention.
///
/// Construction checks that every angle is finite and inside the global
/// interval `(-pi, pi]`. The convention's own declared ranges are *not*
/// enforced here (see [`RotationConvention::matrix_of`] for why); they are
/// enforced by [`euler_to_matrix`].
#[derive(Debug, Clone)]
pub struct EulerAngles {
    pub convention: Arc<RotationConvention>,
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
}

impl EulerAngles {
    pub fn new(
        convention: Arc<RotationConvention>,
        pitch: f64,
        yaw: f64,
        roll: f64,
    ) -> Result<Self> {
        for (label, v) in [("pitch", pitch), ("yaw", yaw), ("roll", roll)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{label} is not finite")));
            }
            if v <= -PI || v > PI {
                return Err(Error::range(format!(
                    "{label} = {:.9} deg is outside the global interval (-180, 180] deg",
                    v.to_degrees()
                )));
            }
        }
        Ok(EulerAngles {
            convention,
            pitch,
            yaw,
            roll,
        })
    }

    pub fn from_degrees(
        convention: Arc<RotationConvention>,
        pitch_deg: f64,
        yaw_deg: f64,
        roll_deg: f64,
    ) -> Result<Self> {
        EulerAngles::new(
            convention,
            pitch_deg.to_radians(),
            yaw_deg.to_radians(),
            roll_deg.to_radians(),
        )
    }

    /// `[pitch, yaw, roll]` in radians.
    pub fn radians(&self) -> [f64; 3] {
        [self.pitch, self.yaw, self.roll]
    }

    /// `[pitch, yaw, roll]` in degrees.
    pub fn degrees(&self) -> [f64; 3] {
        [
            self.pitch.to_degrees(),
            self.yaw.to_degrees(),
            self.roll.to_degrees(),
        ]
    }

    pub fn angle(&self, role: AngleRole) -> f64 {
        match role {
            AngleRole::Pitch => self.pitch,
            AngleRole::Yaw => self.yaw,
            AngleRole::Roll => self.roll,
        }
    }
}

/// Converts Euler angles to a rotation matrix, enforcing the convention's
/// declared per-angle ranges first.
pub fn euler_to_matrix(angles: &EulerAngles) -> Result<RotationMatrix> {
    angles
        .convention
        .check_ranges(angles.pitch, angles.yaw, angles.roll)?;
    Ok(angles
        .convention
        .matrix_of(angles.pitch, angles.yaw, angles.roll))
}

/// Name of the builtin aerospace-style intrinsic z-y'-x'' convention.
pub const WIKI_ZYX: &str = "WIKI_ZYX";
/// Name of the builtin 300W-LP-style convention (left-handed X pitch,
/// Y yaw, Z roll).
pub const W300LP: &str = "W300LP";
/// Name of the builtin 3DDFA_V2-style mixed-handedness convention.
pub const TDDFA_V2: &str = "TDDFA_V2";
/// Name of the builtin 6D-rep-net-style convention (transpose of W300LP).
pub const REPNET6D: &str = "REPNET6D";
/// Name of the builtin WHENet/Panoptic convention: W300LP factors with
/// pitch and roll restricted to the open interval (-90, 90) degrees.
pub const WHENET_PANOPTIC: &str = "WHENET_PANOPTIC";

fn make_builtins() -> Vec<Arc<RotationConvention>> {
    use AngleRole::*;
    use Axis::*;
    use Handedness::*;

    let closed_90 = AngleInterval::from_degrees(-90.0, 90.0, true, true);
    let open_90 = AngleInterval::from_degrees(-90.0, 90.0, false, false);
    let full = AngleInterval::full_turn();

    let wiki = RotationConvention::new(
        WIKI_ZYX,
        [
            ElementalSpec::new(Z, Right, Yaw),
            ElementalSpec::new(Y, Right, Pitch),
            ElementalSpec::new(X, Right, Roll),
        ],
        "Subject frame: x out of the face, y to the right in image space, z up. \
         Equivalent to intrinsic z-y'-x'' applied yaw, pitch, roll.",
        AngleRanges {
            pitch: closed_90,
            yaw: full,
            roll: full,
        },
    )
    .expect("builtin convention is well-formed");

    let w300lp = RotationConvention::new(
        W300LP,
        [
            ElementalSpec::new(X, Left, Pitch),
            ElementalSpec::new(Y, Left, Yaw),
            ElementalSpec::new(Z, Left, Roll),
        ],
        "Camera-facing frame: x right, y up, z toward the viewer. \
         All three factors are left-handed (transposed) elementals.",
        AngleRanges {
            pitch: full,
            yaw: closed_90,
            roll: full,
        },
    )
    .expect("builtin convention is well-formed");

    let tddfa = RotationConvention::new(
        TDDFA_V2,
        [
            ElementalSpec::new(Z, Right, Roll),
            ElementalSpec::new(Y, Left, Yaw),
            ElementalSpec::new(X, Right, Pitch),
        ],
        "Camera-facing frame as in W300LP, with mixed handedness across the \
         three factors.",
        AngleRanges {
            pitch: full,
            yaw: closed_90,
            roll: full,
        },
    )
    .expect("builtin convention is well-formed");

    let repnet = RotationConvention::new(
        REPNET6D,
        [
            ElementalSpec::new(Z, Right, Roll),
            ElementalSpec::new(Y, Right, Yaw),
            ElementalSpec::new(X, Right, Pitch),
        ],
        "Camera-facing frame; every matrix equals the transpose of the W300LP \
         matrix at the same angles.",
        AngleRanges {
            pitch: full,
            yaw: closed_90,
            roll: full,
        },
    )
    .expect("builtin convention is well-formed");

    let whenet = RotationConvention::new(
        WHENET_PANOPTIC,
        [
            ElementalSpec::new(X, Left, Pitch),
            ElementalSpec::new(Y, Left, Yaw),
            ElementalSpec::new(Z, Left, Roll),
        ],
        "Same frame and factors as W300LP; full yaw range with pitch and roll \
         confined to (-90, 90) degrees so every pose has one representative.",
        AngleRanges {
            pitch: open_90,
            yaw: full,
            roll: open_90,
        },
    )
    .expect("builtin convention is well-formed");

    vec![
        Arc::new(wiki),
        Arc::new(w300lp),
        Arc::new(tddfa),
        Arc::new(repnet),
        Arc::new(whenet),
    ]
}

/// The five builtin conventions, in a stable order.
pub fn builtin_conventions() -> &'static [Arc<RotationConvention>] {
    static BUILTINS: OnceLock<Vec<Arc<RotationConvention>>> = OnceLock::new();
    BUILTINS.get_or_init(make_builtins)
}

/// Looks up a builtin convention by name.
pub fn builtin(name: &str) -> Option<Arc<RotationConvention>> {
    builtin_conventions()
        .iter()
        .find(|c| c.name() == name)
        .cloned()
}

/// Verifies a convention's matrix against its independent closed-form entry
/// table at `samples` random angle triples, returning the largest absolute
/// per-entry deviation. Only `WIKI_ZYX` and `W300LP` have tables.
///
/// A doctored registry entry that reuses one of those names with a different
/// sequence shows up as a large deviation.
pub fn matrix_entry_formula_check(
    convention: &RotationConvention,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    type EntryTable = fn(f64, f64, f64) -> [[f64; 3]; 3];

    fn wiki_entries(p: f64, y: f64, r: f64) -> [[f64; 3]; 3] {
        let (sp, cp) = p.sin_cos();
        let (sy, cy) = y.sin_cos();
        let (sr, cr) = r.sin_cos();
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    }

    fn w300lp_entries(p: f64, y: f64, r: f64) -> [[f64; 3]; 3] {
        let (sp, cp) = p.sin_cos();
        let (sy, cy) = y.sin_cos();
        let (sr, cr) = r.sin_cos();
        [
            [cy * cr, cy * sr, -sy],
            [sp * sy * cr - cp * sr, sp * sy * sr + cp * cr, sp * cy],
            [cp * sy * cr + sp * sr, cp * sy * sr - sp * cr, cp * cy],
        ]
    }

    let table: EntryTable = match convention.name() {
        WIKI_ZYX => wiki_entries,
        W300LP => w300lp_entries,
        other => {
            return Err(Error::unsupported(format!(
                "no closed-form entry table for convention '{other}'"
            )))
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let p = rng.random_range(-PI..PI);
        let y = rng.random_range(-PI..PI);
        let r = rng.random_range(-PI..PI);
        let m = convention.matrix_of(p, y, r);
        let want = table(p, y, r);
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((m[(i, j)] - want[i][j]).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalRecord {
    min_deg: f64,
    max_deg: f64,
    min_inclusive: bool,
    max_inclusive: bool,
}

impl IntervalRecord {
    fn to_interval(&self) -> Result<AngleInterval> {
        if !self.min_deg.is_finite() || !self.max_deg.is_finite() {
            return Err(Error::format("angle range bounds must be finite"));
        }
        if self.min_deg >= self.max_deg {
            return Err(Error::format(format!(
                "angle range [{}, {}] is empty",
                self.min_deg, self.max_deg
            )));
        }
        Ok(AngleInterval::from_degrees(
            self.min_deg,
            self.max_deg,
            self.min_inclusive,
            self.max_inclusive,
        ))
    }

    fn from_interval(i: &AngleInterval) -> Self {
        IntervalRecord {
            min_deg: i.min.to_degrees(),
            max_deg: i.max.to_degrees(),
            min_inclusive: i.min_inclusive,
            max_inclusive: i.max_inclusive,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangesRecord {
    pitch: IntervalRecord,
    yaw: IntervalRecord,
    roll: IntervalRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConventionRecord {
    name: String,
    sequence: [String; 3],
    #[serde(default)]
    frame_note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_ranges: Option<RangesRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    conventions: Vec<ConventionRecord>,
}

/// A name-keyed collection of conventions: the five builtins plus any custom
/// ones loaded from JSON.
#[derive(Debug, Clone)]
pub struct ConventionRegistry {
    map: BTreeMap<String, Arc<RotationConvention>>,
}

impl ConventionRegistry {
    /// A registry holding exactly the builtins.
    pub fn with_builtins() -> Self {
        let mut map = BTreeMap::new();
        for c in builtin_conventions() {
            map.insert(c.name().to_string(), c.clone());
        }
        ConventionRegistry { map }
    }

    pub fn get(&self, name: &str) -> Option<Arc<RotationConvention>> {
        self.map.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&str> {
        self.map.keys().map(|s| s.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Adds a custom convention. Builtin names cannot be shadowed because
    /// extraction and conversion dispatch on them.
    pub fn insert(&mut self, convention: RotationConvention) -> Result<()> {
        let name = convention.name().to_string();
        if builtin(&name).is_some() {
            return Err(Error::invalid(format!(
                "convention name '{name}' is reserved for a builtin"
            )));
        }
        if self.map.contains_key(&name) {
            return Err(Error::invalid(format!(
                "convention '{name}' is already registered"
            )));
        }
        self.map.insert(name, Arc::new(convention));
        Ok(())
    }

    /// Parses a registry file and merges its conventions into `self`.
    /// The merge is atomic: if any record is bad, nothing is added.
    pub fn load_json(&mut self, text: &str) -> Result<usize> {
        let file: RegistryFile =
            serde_json::from_str(text).map_err(|e| Error::format(format!("registry JSON: {e}")))?;
        let mut parsed = Vec::with_capacity(file.conventions.len());
        for record in file.conventions {
            let mut sequence = Vec::with_capacity(3);
            for token in &record.sequence {
                sequence.push(ElementalSpec::parse(token)?);
            }
            let sequence: [ElementalSpec; 3] =
                sequence.try_into().expect("exactly three tokens");
            let ranges = match record.angle_ranges {
                Some(r) => AngleRanges {
                    pitch: r.pitch.to_interval()?,
                    yaw: r.yaw.to_interval()?,
                    roll: r.roll.to_interval()?,
                },
                None => AngleRanges::full(),
            };
            parsed.push(RotationConvention::new(
                record.name,
                sequence,
                record.frame_note,
                ranges,
            )?);
        }
        for (i, a) in parsed.iter().enumerate() {
            if self.map.contains_key(a.name()) || builtin(a.name()).is_some() {
                return Err(Error::invalid(format!(
                    "convention name '{}' is already taken",
                    a.name()
                )));
            }
            if parsed[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::invalid(format!(
                    "convention '{}' appears twice in the file",
                    a.name()
                )));
            }
        }
        let added = parsed.len();
        for convention in parsed {
            self.insert(convention)?;
        }
        Ok(added)
    }

    /// Serializes every non-builtin convention (builtins are implied).
    pub fn to_json(&self) -> String {
        let records: Vec<ConventionRecord> = self
            .map
            .values()
            .filter(|c| builtin(c.name()).is_none())
            .map(|c| ConventionRecord {
                name: c.name().to_string(),
                sequence: [
                    c.sequence()[0].to_string(),
                    c.sequence()[1].to_string(),
                    c.sequence()[2].to_string(),
                ],
                frame_note: c.frame_note().to_string(),
                angle_ranges: Some(RangesRecord {
                    pitch: IntervalRecord::from_interval(&c.angle_ranges().pitch),
                    yaw: IntervalRecord::from_interval(&c.angle_ranges().yaw),
                    roll: IntervalRecord::from_interval(&c.angle_ranges().roll),
                }),
            })
            .collect();
        serde_json::to_string_pretty(&RegistryFile {
            conventions: records,
        })
        .expect("registry serialization cannot fail")
    }
}
