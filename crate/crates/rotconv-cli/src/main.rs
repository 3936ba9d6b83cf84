//! Command-line front end for the rotation-convention library.
//!
//! Angles at this boundary are degrees; the library works in radians.
//! Exit codes: 0 success, 1 validation or I/O failure, 2 usage error,
//! 3 degenerate geometry.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotconv::annotations::AnnotationFormat;
use rotconv::{
    annotations_to_csv, annotations_to_json, augment_annotation, builtin, canonical_euler,
    conversion_rule, convert_rotation, emit_svg, extract_for, horn_align, infer_from_numeric_samples,
    load_annotations, match_pattern, panoptic_pose, pose_cube_endpoints, three_line_endpoints,
    whenet_compound_pose, whenet_select_euler, AugmentOp, CameraExtrinsic, ConventionRegistry,
    Drawing, EntryPattern, Error, EulerTriple, ExtractionResult, KeypointSet, PoseAnnotation,
    RotationMatrix, W300LP,
};
use serde::Deserialize;
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rotconv",
    version,
    about = "Head-pose rotation conventions: extract, convert, draw, augment, infer, align",
    long_about = "Works with convention-tagged pose annotations (JSON or CSV). Angles on the \
                  command line and in files are degrees. Exit codes: 0 success, 1 validation \
                  failure, 2 usage error, 3 degenerate geometry."
)]
struct Cli {
    /// JSON file of additional convention definitions to register.
    #[arg(long, global = true, value_name = "PATH")]
    registry: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read annotations and print Euler angles (degrees) per record.
    Extract(ExtractArgs),
    /// Convert annotations from one convention to another.
    Convert(ConvertArgs),
    /// Apply a 2D augmentation's label math to annotations.
    Augment(AugmentArgs),
    /// Render one SVG pose overlay per annotation record.
    Draw(DrawArgs),
    /// Search all 288 three-factor factorizations for an unknown convention.
    Infer(InferArgs),
    /// Align 3D keypoints to a reference head and report the compound pose.
    Align(AlignArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Annotation file (.json or .csv).
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Input format; default is inferred from the extension.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Extract under this convention instead of each record's own.
    /// The matrix is reinterpreted, not converted.
    #[arg(long, value_name = "NAME")]
    convention: Option<String>,
    /// Report the mirrored second solution alongside the primary one.
    #[arg(long)]
    both_solutions: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Annotation file (.json or .csv).
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Expected source convention; records tagged otherwise are rejected.
    #[arg(long, value_name = "NAME")]
    from: Option<String>,
    /// Target convention.
    #[arg(long, value_name = "NAME")]
    to: String,
    /// Print a per-record round-trip Frobenius error report to stdout
    /// (requires --output for the converted annotations).
    #[arg(long)]
    report_error: bool,
    /// Write converted annotations here (.json or .csv); default stdout JSON.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    /// Annotation file (.json or .csv).
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// One of: rotate:<deg>, flip:<deg>, hflip, vflip, bothflip, diagflip.
    #[arg(long, value_name = "OP")]
    op: String,
    /// Image dimensions as WIDTHxHEIGHT, e.g. 640x480.
    #[arg(long, value_name = "WxH")]
    image_size: String,
    /// Fold a flip angle outside [0, 90] into range plus a half turn.
    /// Pose labels stay exact; bounding boxes take an axis-aligned hull at
    /// each of the two steps.
    #[arg(long)]
    reduce_flip_angle: bool,
    /// Write augmented annotations here (.json or .csv); default stdout JSON.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DrawArgs {
    /// Annotation file (.json or .csv).
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Overlay style.
    #[arg(long, value_enum, default_value_t = Style::Lines)]
    style: Style,
    /// Axis length (lines) or cube edge length, in pixels.
    #[arg(long, default_value_t = 100.0)]
    size: f64,
    /// SVG canvas dimensions as WIDTHxHEIGHT. The drawing is anchored at
    /// the bbox center when the record has one, else the canvas center.
    #[arg(long, value_name = "WxH", default_value = "640x480")]
    image_size: String,
    /// Directory for the <image_id>.svg files (created if missing).
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Also write all drawing endpoints to this JSON file.
    #[arg(long, value_name = "PATH")]
    endpoints: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    /// JSON entry pattern: a 3x3 array of cell strings
    /// ("0", "1", "free", or [-]cos|sin(p|y|r) products joined by '*').
    #[arg(long, value_name = "PATH", conflicts_with = "samples", required_unless_present = "samples")]
    pattern: Option<PathBuf>,
    /// JSON numeric samples: [{"angles_deg": [p,y,r], "matrix": [9 numbers]}].
    #[arg(long, value_name = "PATH")]
    samples: Option<PathBuf>,
    /// Generic angle triples checked per candidate (pattern mode).
    #[arg(long, default_value_t = 16)]
    num_samples: usize,
    /// Random seed for the generic triples (pattern mode).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a JSON report here in addition to the stdout listing.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AlignArgs {
    /// Model keypoints JSON: {"points": [[x,y,z], ...]}.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Observed keypoints JSON, optionally with "confidence": [c, ...];
    /// points at confidence <= 0.1 are dropped (at least 6 must remain).
    #[arg(long, value_name = "PATH")]
    observed: PathBuf,
    /// Camera extrinsic JSON {"R": [9 numbers], "t": [x,y,z]}; default identity.
    #[arg(long, value_name = "PATH")]
    camera: Option<PathBuf>,
    /// Which compound-pose formula to apply to the alignment rotation.
    #[arg(long, value_enum)]
    formula: Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Style {
    Lines,
    Cube,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    Whenet,
    Panoptic,
}

/// An error carrying its process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateGeometry(_) => 3,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn failure(message: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.message, "exit_code": e.code }));
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let registry = build_registry(cli.registry.as_deref())?;
    match cli.command {
        Command::Extract(args) => cmd_extract(args, &registry),
        Command::Convert(args) => cmd_convert(args, &registry),
        Command::Augment(args) => cmd_augment(args, &registry),
        Command::Draw(args) => cmd_draw(args, &registry),
        Command::Infer(args) => cmd_infer(args),
        Command::Align(args) => cmd_align(args),
    }
}

fn build_registry(path: Option<&Path>) -> Result<ConventionRegistry, CliError> {
    let mut registry = ConventionRegistry::with_builtins();
    if let Some(path) = path {
        let text = read_file(path)?;
        registry
            .load_json(&text)
            .map_err(|e| failure(format!("{}: {e}", path.display())))?;
    }
    Ok(registry)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| failure(format!("{}: {e}", path.display())))
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as success.
fn print_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| failure(format!("stdout: {e}"))),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| failure(format!("{}: {e}", path.display()))),
        None => print_stdout(text),
    }
}

fn parse_image_size(text: &str) -> Result<(f64, f64), CliError> {
    let err = || usage(format!("bad --image-size '{text}': expected WIDTHxHEIGHT, e.g. 640x480"));
    let (w, h) = text.split_once('x').ok_or_else(err)?;
    let w: f64 = w.parse().map_err(|_| err())?;
    let h: f64 = h.parse().map_err(|_| err())?;
    if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
        return Err(err());
    }
    Ok((w, h))
}

fn load_input(
    path: &Path,
    format: Option<FileFormat>,
    registry: &ConventionRegistry,
) -> Result<Vec<PoseAnnotation>, CliError> {
    match format {
        None => load_annotations(path, registry).map_err(CliError::from),
        Some(f) => {
            let text = read_file(path)?;
            let parsed = match f {
                FileFormat::Json => rotconv::parse_annotations_json(&text, registry),
                FileFormat::Csv => rotconv::parse_annotations_csv(&text, registry),
            };
            parsed.map_err(|e| failure(format!("{}: {e}", path.display())))
        }
    }
}

fn save_output(
    annotations: &[PoseAnnotation],
    path: Option<&Path>,
) -> Result<(), CliError> {
    match path {
        None => print_stdout(&annotations_to_json(annotations)?),
        Some(path) => {
            let format = AnnotationFormat::from_path(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let text = match format {
                AnnotationFormat::Json => annotations_to_json(annotations)?,
                AnnotationFormat::Csv => annotations_to_csv(annotations)?,
            };
            std::fs::write(path, text)
                .map_err(|e| failure(format!("{}: {e}", path.display())))
        }
    }
}

fn solution_json(angles: &rotconv::EulerAngles, which: &str) -> serde_json::Value {
    let [p, y, r] = angles.degrees();
    json!({ "which": which, "pitch_deg": p, "yaw_deg": y, "roll_deg": r })
}

fn extraction_json(
    image_id: &str,
    convention: &str,
    result: &ExtractionResult,
    both: bool,
) -> serde_json::Value {
    let mut solutions = vec![solution_json(&result.primary, "primary")];
    if both {
        if let Some(secondary) = &result.secondary {
            solutions.push(solution_json(secondary, "secondary"));
        }
    }
    let constraint = result.constraint.as_ref().map(|c| {
        json!({
            "pivot": c.pivot_role.name(),
            "pivot_deg": c.pivot_value.to_degrees(),
            "pair": c.pair.describe(),
            "value_deg": c.value.to_degrees(),
        })
    });
    json!({
        "image_id": image_id,
        "convention": convention,
        "solutions": solutions,
        "gimbal_lock": result.gimbal_lock,
        "constraint": constraint,
        "constraint_note": result.constraint_note,
    })
}

fn cmd_extract(args: ExtractArgs, registry: &ConventionRegistry) -> Result<(), CliError> {
    let override_conv = match &args.convention {
        Some(name) => Some(
            registry
                .get(name)
                .ok_or_else(|| usage(format!("unknown convention '{name}'")))?,
        ),
        None => None,
    };
    let annotations = load_input(&args.input, args.format, registry)?;
    let mut rows = Vec::with_capacity(annotations.len());
    for ann in &annotations {
        let conv = match &override_conv {
            Some(c) => c.clone(),
            None => registry
                .get(&ann.source_convention)
                .ok_or_else(|| failure(format!("{}: unknown convention", ann.image_id)))?,
        };
        let result = extract_for(&conv, &ann.rotation)
            .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        rows.push(extraction_json(
            &ann.image_id,
            conv.name(),
            &result,
            args.both_solutions,
        ));
    }
    let text = serde_json::to_string_pretty(&rows).expect("report serialization cannot fail");
    write_output(args.output.as_deref(), &text)
}

fn cmd_convert(args: ConvertArgs, registry: &ConventionRegistry) -> Result<(), CliError> {
    let to = registry
        .get(&args.to)
        .ok_or_else(|| usage(format!("unknown convention '{}'", args.to)))?;
    if let Some(from) = &args.from {
        registry
            .get(from)
            .ok_or_else(|| usage(format!("unknown convention '{from}'")))?;
        conversion_rule(from, &args.to).map_err(|e| usage(e.to_string()))?;
    }
    if args.report_error && args.output.is_none() {
        return Err(usage(
            "--report-error writes the report to stdout, so the converted \
             annotations need --output",
        ));
    }

    let annotations = load_input(&args.input, None, registry)?;
    let mut converted = Vec::with_capacity(annotations.len());
    let mut report = Vec::new();
    for ann in &annotations {
        if let Some(from) = &args.from {
            if &ann.source_convention != from {
                return Err(failure(format!(
                    "{}: record is tagged '{}' but --from says '{}'",
                    ann.image_id, ann.source_convention, from
                )));
            }
        }
        if ann.source_convention == args.to {
            // Identity conversion keeps records untouched.
            if args.report_error {
                report.push(json!({ "image_id": ann.image_id, "roundtrip_frobenius": 0.0 }));
            }
            converted.push(ann.clone());
            continue;
        }
        let rule = conversion_rule(&ann.source_convention, &args.to)
            .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        let rotation = convert_rotation(&ann.rotation, &rule);
        if args.report_error {
            let back_rule = conversion_rule(&args.to, &ann.source_convention)
                .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
            let back = convert_rotation(&rotation, &back_rule);
            report.push(json!({
                "image_id": ann.image_id,
                "roundtrip_frobenius": rotconv::frobenius_distance(&back, &ann.rotation),
            }));
        }
        let euler_cache = canonical_euler(&to, &rotation).unwrap_or(None);
        let new_ann = PoseAnnotation::new(
            ann.image_id.clone(),
            ann.bbox,
            rotation,
            euler_cache,
            args.to.clone(),
        )
        .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        converted.push(new_ann);
    }
    save_output(&converted, args.output.as_deref())?;
    if args.report_error {
        print_stdout(
            &serde_json::to_string_pretty(&report).expect("report serialization cannot fail"),
        )?;
    }
    Ok(())
}

fn cmd_augment(args: AugmentArgs, registry: &ConventionRegistry) -> Result<(), CliError> {
    let (width, height) = parse_image_size(&args.image_size)?;
    let (op, extra_half_turn) = AugmentOp::parse(&args.op, args.reduce_flip_angle)
        .map_err(|e| usage(e.to_string()))?;
    let annotations = load_input(&args.input, None, registry)?;
    let mut out = Vec::with_capacity(annotations.len());
    for ann in &annotations {
        let mut augmented = augment_annotation(ann, &op, width, height)
            .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        if extra_half_turn {
            augmented = augment_annotation(&augmented, &AugmentOp::Rotate { phi: PI }, width, height)
                .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        }
        out.push(augmented);
    }
    save_output(&out, args.output.as_deref())
}

/// Makes an image id safe as a file stem; distinct ids may collide, so the
/// caller dedupes.
fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_draw(args: DrawArgs, registry: &ConventionRegistry) -> Result<(), CliError> {
    let (width, height) = parse_image_size(&args.image_size)?;
    let annotations = load_input(&args.input, None, registry)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| failure(format!("{}: {e}", args.out_dir.display())))?;

    let mut endpoint_rows = Vec::new();
    let mut used_names: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for ann in &annotations {
        let origin = ann
            .bbox_center()
            .unwrap_or([width / 2.0, height / 2.0]);
        let drawing = match args.style {
            Style::Lines => {
                let (m, conv_name) = drawable_matrix(ann)?;
                let conv = builtin(conv_name).expect("drawable conventions are builtin");
                Drawing::Lines(
                    three_line_endpoints(&m, &conv, origin, args.size)
                        .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?,
                )
            }
            Style::Cube => {
                let (m, conv_name) = drawable_matrix(ann)?;
                // The cube formula consumes camera-family degrees.
                let m = if conv_name == W300LP {
                    m
                } else {
                    // WIKI_ZYX: move into the camera family first.
                    let rule = conversion_rule(conv_name, W300LP)
                        .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
                    convert_rotation(&m, &rule)
                };
                let [p, y, r] = rotconv::extract_300wlp(&m).primary.degrees();
                Drawing::Cube(
                    pose_cube_endpoints(p, y, r, origin[0], origin[1], args.size)
                        .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?,
                )
            }
        };

        let stem = sanitize_id(&ann.image_id);
        let n = used_names.entry(stem.clone()).or_insert(0);
        *n += 1;
        let file_name = if *n == 1 {
            format!("{stem}.svg")
        } else {
            format!("{stem}_{n}.svg")
        };
        let svg = emit_svg(&drawing, width.round() as u32, height.round() as u32)
            .map_err(|e| failure(format!("{}: {e}", ann.image_id)))?;
        let path = args.out_dir.join(&file_name);
        std::fs::write(&path, svg).map_err(|e| failure(format!("{}: {e}", path.display())))?;

        if args.endpoints.is_some() {
            let endpoints: serde_json::Value =
                serde_json::from_str(&drawing.endpoints_json()).expect("endpoint JSON is valid");
            endpoint_rows.push(json!({
                "image_id": ann.image_id,
                "file": file_name,
                "drawing": endpoints,
            }));
        }
    }
    if let Some(path) = &args.endpoints {
        let text =
            serde_json::to_string_pretty(&endpoint_rows).expect("report serialization cannot fail");
        std::fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// A record's matrix in a convention the drawing math accepts natively.
/// The stored-transposed convention is folded into its camera-family twin;
/// everything else must already be drawable.
fn drawable_matrix(ann: &PoseAnnotation) -> Result<(RotationMatrix, &'static str), CliError> {
    match ann.source_convention.as_str() {
        rotconv::W300LP | rotconv::WHENET_PANOPTIC => Ok((ann.rotation, W300LP)),
        rotconv::WIKI_ZYX => Ok((ann.rotation, rotconv::WIKI_ZYX)),
        rotconv::REPNET6D => Ok((ann.rotation.transpose(), W300LP)),
        other => Err(failure(format!(
            "{}: no drawing transform is defined for convention '{other}'",
            ann.image_id
        ))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRecord {
    angles_deg: [f64; 3],
    matrix: [f64; 9],
}

fn cmd_infer(args: InferArgs) -> Result<(), CliError> {
    let outcome = match (&args.pattern, &args.samples) {
        (Some(path), None) => {
            let text = read_file(path)?;
            let pattern = EntryPattern::parse_json(&text)
                .map_err(|e| failure(format!("{}: {e}", path.display())))?;
            if pattern.constrained_cells() == 0 {
                eprintln!("note: pattern has no constraints; every candidate will match");
            }
            match_pattern(&pattern, args.num_samples, args.seed)
                .map_err(|e| usage(e.to_string()))?
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let records: Vec<SampleRecord> = serde_json::from_str(&text).map_err(|e| {
                failure(format!(
                    "{}: expected [{{\"angles_deg\": [p,y,r], \"matrix\": [9 numbers]}}]: {e}",
                    path.display()
                ))
            })?;
            let mut pairs = Vec::with_capacity(records.len());
            for (i, rec) in records.iter().enumerate() {
                let triple = EulerTriple::from_degrees(
                    rec.angles_deg[0],
                    rec.angles_deg[1],
                    rec.angles_deg[2],
                )
                .map_err(|e| failure(format!("sample {}: {e}", i + 1)))?;
                let m = RotationMatrix::from_flat(&rec.matrix)
                    .map_err(|e| failure(format!("sample {}: {e}", i + 1)))?;
                pairs.push((triple, m));
            }
            infer_from_numeric_samples(&pairs).map_err(|e| failure(e.to_string()))?
        }
        // clap enforces exactly one of the two.
        _ => unreachable!("argument group guarantees one input"),
    };

    let mut listing = format!("{} candidate(s)", outcome.candidates.len());
    for cand in &outcome.candidates {
        let builtins = cand.matching_builtins();
        if builtins.is_empty() {
            listing.push_str(&format!("\n  {cand}"));
        } else {
            listing.push_str(&format!("\n  {cand}  (= {})", builtins.join(", ")));
        }
    }
    print_stdout(&listing)?;
    if outcome.degenerate_samples > 0 {
        eprintln!(
            "note: {} sample(s) lie near a quarter-turn multiple and discriminate poorly",
            outcome.degenerate_samples
        );
    }
    if let Some(path) = &args.report {
        let rows: Vec<serde_json::Value> = outcome
            .candidates
            .iter()
            .map(|c| {
                json!({
                    "sequence": c.to_string(),
                    "builtin_matches": c.matching_builtins(),
                })
            })
            .collect();
        let text = serde_json::to_string_pretty(&json!({
            "count": outcome.candidates.len(),
            "candidates": rows,
            "degenerate_samples": outcome.degenerate_samples,
        }))
        .expect("report serialization cannot fail");
        std::fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_align(args: AlignArgs) -> Result<(), CliError> {
    let model = KeypointSet::parse_json(&read_file(&args.model)?)
        .map_err(|e| failure(format!("{}: {e}", args.model.display())))?;
    let observed = KeypointSet::parse_json(&read_file(&args.observed)?)
        .map_err(|e| failure(format!("{}: {e}", args.observed.display())))?;
    let camera = match &args.camera {
        Some(path) => CameraExtrinsic::parse_json(&read_file(path)?)
            .map_err(|e| failure(format!("{}: {e}", path.display())))?,
        None => CameraExtrinsic::identity(),
    };

    let (kept_model, kept_observed) = rotconv::filter_by_confidence(
        &model.points,
        &observed,
        rotconv::horn::CONFIDENCE_THRESHOLD,
    )?;
    let alignment = horn_align(&kept_model, &kept_observed)?;

    let compound = match args.formula {
        Formula::Whenet => whenet_compound_pose(&camera.rotation, &alignment.rotation),
        Formula::Panoptic => panoptic_pose(&camera.rotation, &alignment.rotation),
    };
    let extraction = rotconv::extract_300wlp(&compound);
    let euler = whenet_select_euler(&extraction);
    let euler_note = euler
        .is_none()
        .then_some("no Euler solution has pitch and roll inside (-90, 90) deg; only the compound pose matrix is reported");

    let output = json!({
        "scale": alignment.scale,
        "rotation": alignment.rotation.to_flat(),
        "translation": alignment.translation.0,
        "residual": alignment.residual,
        "formula": match args.formula {
            Formula::Whenet => "whenet",
            Formula::Panoptic => "panoptic",
        },
        "compound_pose": compound.to_flat(),
        "euler_deg": euler.as_ref().map(|e| e.degrees()),
        "euler_convention": euler.as_ref().map(|e| e.convention.name().to_string()),
        "euler_note": euler_note,
        "gimbal_lock": extraction.gimbal_lock,
        "kept_points": kept_model.len(),
    });
    print_stdout(&serde_json::to_string_pretty(&output).expect("report serialization cannot fail"))
}
