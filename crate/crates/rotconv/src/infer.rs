//! Recovering an unknown Euler convention from evidence.
//!
//! The search space is every ordered factorization of a rotation into three
//! elemental rotations about distinct axes: 6 axis orders, 6 assignments of
//! the pitch/yaw/roll names to the three slots, and an independent
//! handedness choice per factor — 288 candidates in all.
//!
//! Two kinds of evidence are supported:
//! * an *entry pattern*: claims about individual matrix cells as products of
//!   sines and cosines of the named angles ([`match_pattern`]), checked on
//!   randomly generated generic angle triples;
//! * *numeric samples*: concrete (angles, matrix) pairs read from data
//!   ([`infer_from_numeric_samples`]).

use crate::conventions::{sequence_matrix, wrap_angle, AngleRole, ElementalSpec};
use crate::error::{Error, Result};
use crate::so3::{Axis, Handedness, RotationMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Cell-level tolerance when checking a symbolic pattern on generic samples.
pub const PATTERN_MATCH_TOL: f64 = 1e-9;

/// Entry-level tolerance when checking numeric (angles, matrix) pairs.
pub const NUMERIC_MATCH_TOL: f64 = 1e-6;

/// Fewer generic samples than this give patterns too little evidence.
pub const MIN_PATTERN_SAMPLES: usize = 16;

/// Angles closer than this (radians) to a multiple of a quarter turn make a
/// sample degenerate: too many candidates agree there.
pub const DEGENERATE_MARGIN: f64 = 0.1;

/// A sine or cosine applied to one named angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigFn {
    Cos,
    Sin,
}

/// One factor inside a pattern cell, e.g. `cos(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellFactor {
    pub func: TrigFn,
    pub role: AngleRole,
}

impl CellFactor {
    fn eval(&self, pitch: f64, yaw: f64, roll: f64) -> f64 {
        let angle = match self.role {
            AngleRole::Pitch => pitch,
            AngleRole::Yaw => yaw,
            AngleRole::Roll => roll,
        };
        match self.func {
            TrigFn::Cos => angle.cos(),
            TrigFn::Sin => angle.sin(),
        }
    }
}

/// A signed product of trig factors, e.g. `-sin(r)*cos(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellExpr {
    pub negated: bool,
    pub factors: Vec<CellFactor>,
}

impl CellExpr {
    fn eval(&self, pitch: f64, yaw: f64, roll: f64) -> f64 {
        let mut v = if self.negated { -1.0 } else { 1.0 };
        for f in &self.factors {
            v *= f.eval(pitch, yaw, roll);
        }
        v
    }
}

/// A claim about one matrix cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellConstraint {
    Zero,
    One,
    Free,
    Expr(CellExpr),
}

impl CellConstraint {
    /// Parses the cell grammar:
    /// `"0" | "1" | "free" | [-]factor(*factor)*` where a factor is
    /// `cos(<angle>)` or `sin(<angle>)` and `<angle>` is one of
    /// `p`/`pitch`, `y`/`yaw`, `r`/`roll`.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        match s {
            "0" => return Ok(CellConstraint::Zero),
            "1" => return Ok(CellConstraint::One),
            "free" => return Ok(CellConstraint::Free),
            "" => return Err(Error::format("empty pattern cell")),
            _ => {}
        }
        let (negated, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let mut factors = Vec::new();
        for token in body.split('*') {
            let token = token.trim();
            let inner = token
                .strip_suffix(')')
                .ok_or_else(|| bad_cell(s, token))?;
            let (func, role) = inner.split_once('(').ok_or_else(|| bad_cell(s, token))?;
            let func = match func {
                "cos" => TrigFn::Cos,
                "sin" => TrigFn::Sin,
                _ => return Err(bad_cell(s, token)),
            };
            let role = match role {
                "p" | "pitch" => AngleRole::Pitch,
                "y" | "yaw" => AngleRole::Yaw,
                "r" | "roll" => AngleRole::Roll,
                _ => return Err(bad_cell(s, token)),
            };
            factors.push(CellFactor { func, role });
        }
        Ok(CellConstraint::Expr(CellExpr { negated, factors }))
    }

    fn matches(&self, entry: f64, pitch: f64, yaw: f64, roll: f64) -> bool {
        match self {
            CellConstraint::Free => true,
            CellConstraint::Zero => entry.abs() <= PATTERN_MATCH_TOL,
            CellConstraint::One => (entry - 1.0).abs() <= PATTERN_MATCH_TOL,
            CellConstraint::Expr(e) => (entry - e.eval(pitch, yaw, roll)).abs() <= PATTERN_MATCH_TOL,
        }
    }
}

fn bad_cell(cell: &str, token: &str) -> Error {
    Error::format(format!(
        "bad pattern cell '{cell}': '{token}' is not 0, 1, free, or a \
         [-]cos|sin(p|y|r) product joined by '*'"
    ))
}

/// A 3x3 grid of cell claims describing how a convention's matrix looks.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryPattern {
    cells: [[CellConstraint; 3]; 3],
}

impl EntryPattern {
    pub fn new(cells: [[CellConstraint; 3]; 3]) -> Self {
        EntryPattern { cells }
    }

    /// Parses a pattern from JSON: a bare 3x3 array of cell strings.
    pub fn parse_json(text: &str) -> Result<Self> {
        let grid: [[String; 3]; 3] = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("pattern must be a 3x3 array of strings: {e}")))?;
        let mut cells: [[CellConstraint; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| CellConstraint::Free));
        for i in 0..3 {
            for j in 0..3 {
                cells[i][j] = CellConstraint::parse(&grid[i][j])
                    .map_err(|e| Error::format(format!("cell ({i},{j}): {e}")))?;
            }
        }
        Ok(EntryPattern { cells })
    }

    pub fn cells(&self) -> &[[CellConstraint; 3]; 3] {
        &self.cells
    }

    /// Number of cells that actually constrain the matrix.
    pub fn constrained_cells(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| !matches!(c, CellConstraint::Free))
            .count()
    }

    fn matches(&self, m: &RotationMatrix, pitch: f64, yaw: f64, roll: f64) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                if !self.cells[i][j].matches(m[(i, j)], pitch, yaw, roll) {
                    return false;
                }
            }
        }
        true
    }
}

/// One point of the factorization search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorizationCandidate {
    pub sequence: [ElementalSpec; 3],
}

impl FactorizationCandidate {
    /// The candidate's matrix at the given named angles (radians).
    pub fn matrix_of(&self, pitch: f64, yaw: f64, roll: f64) -> RotationMatrix {
        sequence_matrix(&self.sequence, pitch, yaw, roll)
    }

    /// Names of built-in conventions with this exact factor sequence.
    /// Several built-ins can share one (they may differ only in ranges).
    pub fn matching_builtins(&self) -> Vec<&'static str> {
        use crate::conventions::{REPNET6D, TDDFA_V2, W300LP, WHENET_PANOPTIC, WIKI_ZYX};
        [WIKI_ZYX, W300LP, TDDFA_V2, REPNET6D, WHENET_PANOPTIC]
            .into_iter()
            .filter(|name| {
                crate::conventions::builtin(name)
                    .map(|c| *c.sequence() == self.sequence)
                    .unwrap_or(false)
            })
            .collect()
    }
}

impl fmt::Display for FactorizationCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}",
            self.sequence[0], self.sequence[1], self.sequence[2]
        )
    }
}

/// All 288 candidates, in lexicographic order: axis order varies slowest
/// (X before Y before Z), then role assignment (pitch, yaw, roll), then the
/// three handedness bits (right before left, last factor fastest).
pub fn enumerate_candidates() -> Vec<FactorizationCandidate> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let roles = [AngleRole::Pitch, AngleRole::Yaw, AngleRole::Roll];
    let hands = [Handedness::Right, Handedness::Left];
    let mut out = Vec::with_capacity(288);
    for ap in PERMS {
        for rp in PERMS {
            for bits in 0..8u8 {
                let sequence = std::array::from_fn(|slot| {
                    ElementalSpec::new(
                        axes[ap[slot]],
                        hands[((bits >> (2 - slot)) & 1) as usize],
                        roles[rp[slot]],
                    )
                });
                out.push(FactorizationCandidate { sequence });
            }
        }
    }
    out
}

/// What an inference run concluded.
#[derive(Debug, Clone)]
pub struct InferenceOutcome {
    /// Candidates consistent with all the evidence, in enumeration order.
    pub candidates: Vec<FactorizationCandidate>,
    /// How many input samples sat near a quarter-turn multiple and so
    /// discriminate poorly (numeric inference only).
    pub degenerate_samples: usize,
}

fn near_quarter_turn(angle: f64) -> bool {
    let a = wrap_angle(angle);
    (-2..=2).any(|k| (a - f64::from(k) * FRAC_PI_2).abs() <= DEGENERATE_MARGIN)
}

/// Random angle triples that avoid quarter-turn neighborhoods, so that no
/// accidental zeros or coincidences satisfy a constraint.
pub fn generic_triples(n: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = rng.random_range(-PI..PI);
        let y = rng.random_range(-PI..PI);
        let r = rng.random_range(-PI..PI);
        if !(near_quarter_turn(p) || near_quarter_turn(y) || near_quarter_turn(r)) {
            out.push((p, y, r));
        }
    }
    out
}

/// Finds every candidate whose matrix satisfies `pattern` on `num_samples`
/// generic angle triples (at least [`MIN_PATTERN_SAMPLES`]).
pub fn match_pattern(
    pattern: &EntryPattern,
    num_samples: usize,
    seed: u64,
) -> Result<InferenceOutcome> {
    if num_samples < MIN_PATTERN_SAMPLES {
        return Err(Error::invalid(format!(
            "pattern matching needs at least {MIN_PATTERN_SAMPLES} samples, got {num_samples}"
        )));
    }
    let samples = generic_triples(num_samples, seed);
    let candidates = enumerate_candidates()
        .into_iter()
        .filter(|cand| {
            samples
                .iter()
                .all(|&(p, y, r)| pattern.matches(&cand.matrix_of(p, y, r), p, y, r))
        })
        .collect();
    Ok(InferenceOutcome {
        candidates,
        degenerate_samples: 0,
    })
}

/// A pitch/yaw/roll value triple in radians, named by role (not by slot).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerTriple {
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
}

impl EulerTriple {
    pub fn new(pitch: f64, yaw: f64, roll: f64) -> Result<Self> {
        if !(pitch.is_finite() && yaw.is_finite() && roll.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(EulerTriple { pitch, yaw, roll })
    }

    pub fn from_degrees(pitch: f64, yaw: f64, roll: f64) -> Result<Self> {
        EulerTriple::new(pitch.to_radians(), yaw.to_radians(), roll.to_radians())
    }
}

/// Finds every candidate that reproduces all given matrices from their
/// angle triples to within [`NUMERIC_MATCH_TOL`] per entry.
pub fn infer_from_numeric_samples(
    pairs: &[(EulerTriple, RotationMatrix)],
) -> Result<InferenceOutcome> {
    if pairs.is_empty() {
        return Err(Error::invalid(
            "numeric inference needs at least one (angles, matrix) pair",
        ));
    }
    let degenerate_samples = pairs
        .iter()
        .filter(|(t, _)| {
            near_quarter_turn(t.pitch) || near_quarter_turn(t.yaw) || near_quarter_turn(t.roll)
        })
        .count();
    let candidates = enumerate_candidates()
        .into_iter()
        .filter(|cand| {
            pairs.iter().all(|(t, m)| {
                let built = cand.matrix_of(t.pitch, t.yaw, t.roll);
                (0..3).all(|i| {
                    (0..3).all(|j| (built[(i, j)] - m[(i, j)]).abs() <= NUMERIC_MATCH_TOL)
                })
            })
        })
        .collect();
    Ok(InferenceOutcome {
        candidates,
        degenerate_samples,
    })
}
