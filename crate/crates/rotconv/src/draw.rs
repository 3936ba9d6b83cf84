//! Screen-space pose drawing: three axis lines or a wireframe cube,
//! plus SVG emission.
//!
//! Image coordinates put the origin at the top-left corner with y growing
//! downward, while both builtin frame families have y growing upward, so a
//! matrix is conjugated by a sign flip before its columns are projected:
//!
//! * camera family (`W300LP`, `WHENET_PANOPTIC`): `D = diag(1,-1,1) M
//!   diag(1,-1,1)`, screen offsets from rows 0 (horizontal) and 1
//!   (vertical) of `D`;
//! * subject frame (`WIKI_ZYX`): `D = diag(1,1,-1) M diag(1,1,-1)`, screen
//!   offsets from rows 1 and 2.
//!
//! Colors follow the physical axis on screen, not the column index: the
//! sideways axis is red, the up axis green, the forward axis blue. Drawing
//! the same pose under either family therefore yields the same three
//! colored lines.

use crate::conventions::{RotationConvention, WHENET_PANOPTIC, W300LP, WIKI_ZYX};
use crate::error::{Error, Result};
use crate::so3::{Mat3, RotationMatrix};
use serde_json::json;

/// Line color, fixed by the physical role of the axis drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub fn hex(&self) -> &'static str {
        match self {
            Color::Red => "#FF0000",
            Color::Green => "#00FF00",
            Color::Blue => "#0000FF",
        }
    }
}

/// Conjugates a camera-family matrix into screen orientation.
pub fn draw_transform_camera(m: &RotationMatrix) -> RotationMatrix {
    conjugate_by_diag(m, [1.0, -1.0, 1.0])
}

/// Conjugates a subject-frame matrix into screen orientation.
pub fn draw_transform_subject(m: &RotationMatrix) -> RotationMatrix {
    conjugate_by_diag(m, [1.0, 1.0, -1.0])
}

fn conjugate_by_diag(m: &RotationMatrix, d: [f64; 3]) -> RotationMatrix {
    let t = Mat3::diagonal(d[0], d[1], d[2]);
    RotationMatrix::from_product(&(&t * m.mat()) * &t)
}

/// The three projected axis lines of a pose.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProjection {
    /// Shared starting point of all three lines, pixels.
    pub origin: [f64; 2],
    /// Line length scale, pixels.
    pub size: f64,
    /// Endpoints of the convention's x, y, z axis lines.
    pub x_end: [f64; 2],
    pub y_end: [f64; 2],
    pub z_end: [f64; 2],
    /// Colors of the x, y, z lines, in that order.
    pub colors: [Color; 3],
}

impl LineProjection {
    /// `(start, end, color)` per line, in x, y, z order.
    pub fn lines(&self) -> [([f64; 2], [f64; 2], Color); 3] {
        [
            (self.origin, self.x_end, self.colors[0]),
            (self.origin, self.y_end, self.colors[1]),
            (self.origin, self.z_end, self.colors[2]),
        ]
    }
}

fn check_geometry(origin: [f64; 2], size: f64) -> Result<()> {
    if !origin[0].is_finite() || !origin[1].is_finite() {
        return Err(Error::invalid("drawing origin must be finite"));
    }
    if !size.is_finite() || size <= 0.0 {
        return Err(Error::invalid("drawing size must be positive and finite"));
    }
    Ok(())
}

/// Projects the axis lines of `m` under `convention` onto the image plane.
pub fn three_line_endpoints(
    m: &RotationMatrix,
    convention: &RotationConvention,
    origin: [f64; 2],
    size: f64,
) -> Result<LineProjection> {
    check_geometry(origin, size)?;
    let (d, rows, colors) = match convention.name() {
        W300LP | WHENET_PANOPTIC => (
            draw_transform_camera(m),
            [0usize, 1usize],
            [Color::Red, Color::Green, Color::Blue],
        ),
        WIKI_ZYX => (
            draw_transform_subject(m),
            [1, 2],
            [Color::Blue, Color::Red, Color::Green],
        ),
        other => {
            return Err(Error::unsupported(format!(
                "no drawing projection for convention '{other}' \
                 (supported: {W300LP}, {WHENET_PANOPTIC}, {WIKI_ZYX})"
            )))
        }
    };
    let end = |col: usize| {
        [
            size * d[(rows[0], col)] + origin[0],
            size * d[(rows[1], col)] + origin[1],
        ]
    };
    let proj = LineProjection {
        origin,
        size,
        x_end: end(0),
        y_end: end(1),
        z_end: end(2),
        colors,
    };
    // Each endpoint projects a unit vector, so it cannot leave the
    // size-radius disc around the origin.
    debug_assert!(proj.lines().iter().all(|(s, e, _)| {
        f64::hypot(e[0] - s[0], e[1] - s[1]) <= size * (1.0 + 1e-9)
    }));
    Ok(proj)
}

/// Closed-form axis-line projection for the camera family, angles in
/// degrees. This is the widely copied per-entry formulation (note it negates
/// yaw internally); it agrees with [`three_line_endpoints`] under `W300LP`
/// to rounding error and serves as its cross-check.
pub fn draw_axis_reference(
    pitch_deg: f64,
    yaw_deg: f64,
    roll_deg: f64,
    tdx: f64,
    tdy: f64,
    size: f64,
) -> LineProjection {
    let p = pitch_deg.to_radians();
    let y = -yaw_deg.to_radians();
    let r = roll_deg.to_radians();
    let x_end = [
        size * (y.cos() * r.cos()) + tdx,
        size * (p.cos() * r.sin() + r.cos() * p.sin() * y.sin()) + tdy,
    ];
    let y_end = [
        size * (-y.cos() * r.sin()) + tdx,
        size * (p.cos() * r.cos() - p.sin() * y.sin() * r.sin()) + tdy,
    ];
    let z_end = [
        size * y.sin() + tdx,
        size * (-y.cos() * p.sin()) + tdy,
    ];
    LineProjection {
        origin: [tdx, tdy],
        size,
        x_end,
        y_end,
        z_end,
        colors: [Color::Red, Color::Green, Color::Blue],
    }
}

/// The eight projected corners of a pose cube.
///
/// The cube's near face is anchored at `origin` (the corner offset by
/// `-size/2` on both screen axes from the requested center) and its edges
/// are the three projected axis offsets, so corner `xy` is `origin + x + y`
/// and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeProjection {
    pub origin: [f64; 2],
    pub size: f64,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
    pub xy: [f64; 2],
    pub xz: [f64; 2],
    pub yz: [f64; 2],
    pub xyz: [f64; 2],
}

impl CubeProjection {
    /// `(label, corner)` pairs in a stable order.
    pub fn corners(&self) -> [(&'static str, [f64; 2]); 8] {
        [
            ("origin", self.origin),
            ("x", self.x),
            ("y", self.y),
            ("xy", self.xy),
            ("z", self.z),
            ("xz", self.xz),
            ("yz", self.yz),
            ("xyz", self.xyz),
        ]
    }

    /// The twelve edges with their conventional colors: near face red,
    /// pillars blue, far face green.
    pub fn edges(&self) -> [([f64; 2], [f64; 2], Color); 12] {
        [
            (self.origin, self.x, Color::Red),
            (self.origin, self.y, Color::Red),
            (self.x, self.xy, Color::Red),
            (self.y, self.xy, Color::Red),
            (self.origin, self.z, Color::Blue),
            (self.x, self.xz, Color::Blue),
            (self.y, self.yz, Color::Blue),
            (self.xy, self.xyz, Color::Blue),
            (self.z, self.xz, Color::Green),
            (self.z, self.yz, Color::Green),
            (self.xz, self.xyz, Color::Green),
            (self.yz, self.xyz, Color::Green),
        ]
    }
}

/// Projects a pose cube for the camera family, angles in degrees, centered
/// at `(tdx, tdy)`.
pub fn pose_cube_endpoints(
    pitch_deg: f64,
    yaw_deg: f64,
    roll_deg: f64,
    tdx: f64,
    tdy: f64,
    size: f64,
) -> Result<CubeProjection> {
    check_geometry([tdx, tdy], size)?;
    let face = [tdx - 0.5 * size, tdy - 0.5 * size];
    let axes = draw_axis_reference(pitch_deg, yaw_deg, roll_deg, face[0], face[1], size);
    let dx = [axes.x_end[0] - face[0], axes.x_end[1] - face[1]];
    let dy = [axes.y_end[0] - face[0], axes.y_end[1] - face[1]];
    let dz = [axes.z_end[0] - face[0], axes.z_end[1] - face[1]];
    let at = |sx: f64, sy: f64, sz: f64| {
        [
            face[0] + sx * dx[0] + sy * dy[0] + sz * dz[0],
            face[1] + sx * dx[1] + sy * dy[1] + sz * dz[1],
        ]
    };
    Ok(CubeProjection {
        origin: face,
        size,
        x: at(1.0, 0.0, 0.0),
        y: at(0.0, 1.0, 0.0),
        z: at(0.0, 0.0, 1.0),
        xy: at(1.0, 1.0, 0.0),
        xz: at(1.0, 0.0, 1.0),
        yz: at(0.0, 1.0, 1.0),
        xyz: at(1.0, 1.0, 1.0),
    })
}

/// A renderable drawing.
#[derive(Debug, Clone, PartialEq)]
pub enum Drawing {
    Lines(LineProjection),
    Cube(CubeProjection),
}

impl Drawing {
    /// All colored segments of the drawing.
    pub fn segments(&self) -> Vec<([f64; 2], [f64; 2], Color)> {
        match self {
            Drawing::Lines(l) => l.lines().to_vec(),
            Drawing::Cube(c) => c.edges().to_vec(),
        }
    }

    /// Structured endpoint dump for machine consumption.
    pub fn endpoints_json(&self) -> String {
        let value = match self {
            Drawing::Lines(l) => json!({
                "type": "lines",
                "origin": l.origin,
                "size": l.size,
                "lines": [
                    {"axis": "x", "end": l.x_end, "color": l.colors[0].hex()},
                    {"axis": "y", "end": l.y_end, "color": l.colors[1].hex()},
                    {"axis": "z", "end": l.z_end, "color": l.colors[2].hex()},
                ],
            }),
            Drawing::Cube(c) => json!({
                "type": "cube",
                "origin": c.origin,
                "size": c.size,
                "corners": {
                    "origin": c.origin,
                    "x": c.x, "y": c.y, "z": c.z,
                    "xy": c.xy, "xz": c.xz, "yz": c.yz, "xyz": c.xyz,
                },
                "edges": c
                    .edges()
                    .iter()
                    .map(|(from, to, color)| json!({
                        "from": from, "to": to, "color": color.hex(),
                    }))
                    .collect::<Vec<_>>(),
            }),
        };
        serde_json::to_string_pretty(&value).expect("endpoint dump cannot fail")
    }
}

/// Renders a drawing as a standalone SVG document of the given pixel size.
pub fn emit_svg(drawing: &Drawing, width: u32, height: u32) -> Result<String> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("svg dimensions must be positive"));
    }
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    for (from, to, color) in drawing.segments() {
        out.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"4\"/>\n",
            from[0],
            from[1],
            to[0],
            to[1],
            color.hex()
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
