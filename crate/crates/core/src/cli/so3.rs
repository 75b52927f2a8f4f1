use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use popcode::so3::{
    angle_between, symmetric_geodesic_distance, AxisAngle, RotationMatrix, So3CodeDocument, So3CodeSpec, So3Mode,
    SymmetryKind, SymmetrySet, DEFAULT_N_ANGLES, DEFAULT_N_AXES, DEFAULT_SIGMA_DEG,
};

use super::common::{write_json, write_table, Context};
use super::Outcome;

/// Neighbouring lattice axes considered when counting peaks.
const PEAK_AXIS_NEIGHBORS: usize = 8;
/// Peaks below this fraction of the strongest one are ignored.
const PEAK_FLOOR: f64 = 0.5;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, clap::Subcommand, Serialize)]
pub enum Action {
    /// Encode a rotation into a code vector (JSON).
    Encode(EncodeArgs),
    /// Decode a code vector file back to an axis and angle.
    Decode(DecodeArgs),
    /// Encode and decode random rotations and report the geodesic errors.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, clap::Args, Serialize)]
pub struct CodeArgs {
    #[arg(long, default_value_t = DEFAULT_N_AXES)]
    pub n_axes: usize,
    #[arg(long, default_value_t = DEFAULT_N_ANGLES)]
    pub n_angles: usize,
    /// Tuning width in degrees.
    #[arg(long, default_value_t = DEFAULT_SIGMA_DEG)]
    pub sigma_deg: f64,
    /// `none`, `cyclic-<x|y|z>-<order>`, `revolution-<x|y|z>`, or a JSON file.
    #[arg(long, default_value = "none")]
    pub symmetry: String,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Nine comma-separated row-major matrix entries.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["axis", "random"])]
    pub rotation: Option<Vec<f64>>,
    /// Rotation axis `x,y,z` (with --angle-deg).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "angle_deg", conflicts_with = "random")]
    pub axis: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub angle_deg: Option<f64>,
    /// Draw a uniformly random rotation from the seed.
    #[arg(long)]
    pub random: bool,
    /// Output file for the code (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct DecodeArgs {
    /// Code file written by `so3 encode`.
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn named_axis(name: &str) -> Result<Vector3<f64>> {
    Ok(match name {
        "x" => Vector3::x(),
        "y" => Vector3::y(),
        "z" => Vector3::z(),
        other => bail!("unknown axis '{other}' (expected x, y or z)"),
    })
}

pub fn parse_symmetry(text: &str) -> Result<SymmetrySet> {
    let parts: Vec<&str> = text.split('-').collect();
    match parts.as_slice() {
        ["none"] | ["identity"] => Ok(SymmetrySet::identity()),
        ["cyclic", axis, order] => {
            let order: usize = order.parse().with_context(|| format!("bad cyclic order in '{text}'"))?;
            Ok(SymmetrySet::cyclic(&named_axis(axis)?, order)?)
        }
        ["revolution", axis] => Ok(SymmetrySet::revolution(&named_axis(axis)?)?),
        _ => {
            let path = Path::new(text);
            if !path.exists() {
                bail!("symmetry '{text}' is neither a known shorthand nor an existing file");
            }
            SymmetrySet::load(path).with_context(|| format!("reading symmetry file {text}"))
        }
    }
}

impl CodeArgs {
    fn resolve(&self) -> Result<(So3CodeSpec, SymmetrySet)> {
        let symmetry = parse_symmetry(&self.symmetry)?;
        let mode = match symmetry.kind() {
            SymmetryKind::Discrete => So3Mode::AxisAngle,
            SymmetryKind::RevolutionAxis(_) => So3Mode::AxisOnly,
        };
        let spec = So3CodeSpec::new(self.n_axes, self.n_angles, self.sigma_deg.to_radians(), mode)?;
        Ok((spec, symmetry))
    }
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome> {
    match &args.action {
        Action::Encode(a) => encode(a, ctx),
        Action::Decode(a) => decode(a, ctx),
        Action::Roundtrip(a) => roundtrip(a, ctx),
    }
}

fn encode(args: &EncodeArgs, ctx: &Context) -> Result<Outcome> {
    let rotation = if let Some(values) = &args.rotation {
        RotationMatrix::from_row_major(values)?
    } else if let Some(axis) = &args.axis {
        if axis.len() != 3 {
            bail!("--axis needs three components, got {}", axis.len());
        }
        RotationMatrix::about(&Vector3::from_column_slice(axis), args.angle_deg.expect("required").to_radians())?
    } else if args.random {
        RotationMatrix::random(&mut ChaCha8Rng::seed_from_u64(ctx.seed))
    } else {
        RotationMatrix::identity()
    };
    let (spec, symmetry) = args.code.resolve()?;
    let code = spec.encode(&rotation, &symmetry)?;
    let peaks = spec.local_maxima(&code, PEAK_AXIS_NEIGHBORS, PEAK_FLOOR)?;
    let doc = spec.document(&code)?;
    write_json(args.out.as_deref(), &doc)?;
    let summary = format!(
        "encoded {} neurons ({}), max activation {:.6}, peaks: {}",
        spec.len(),
        spec.mode(),
        code.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        peaks.len()
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Complete)
}

#[derive(Serialize)]
struct DecodedRow {
    axis_x: f64,
    axis_y: f64,
    axis_z: f64,
    angle_rad: Option<f64>,
    angle_deg: Option<f64>,
}

fn decode(args: &DecodeArgs, ctx: &Context) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.code).with_context(|| format!("reading {}", args.code.display()))?;
    let doc: So3CodeDocument = serde_json::from_str(&text)?;
    let spec = doc.spec()?;
    let row = match spec.mode() {
        So3Mode::AxisAngle => {
            let AxisAngle { axis, angle } = spec.decode_pose(&doc.activations)?;
            DecodedRow { axis_x: axis.x, axis_y: axis.y, axis_z: axis.z, angle_rad: Some(angle), angle_deg: Some(angle.to_degrees()) }
        }
        So3Mode::AxisOnly => {
            let axis = spec.decode_axis(&doc.activations)?;
            DecodedRow { axis_x: axis.x, axis_y: axis.y, axis_z: axis.z, angle_rad: None, angle_deg: None }
        }
    };
    write_table(args.out.as_deref(), ctx.format, &ctx.metadata(args), &[row])?;
    Ok(Outcome::Complete)
}

#[derive(Serialize)]
struct RoundtripRow {
    sample: usize,
    error_rad: f64,
    error_deg: f64,
}

fn roundtrip(args: &RoundtripArgs, ctx: &Context) -> Result<Outcome> {
    if args.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let (spec, symmetry) = args.code.resolve()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut rows = Vec::with_capacity(args.samples);
    for sample in 0..args.samples {
        let r = RotationMatrix::random(&mut rng);
        let code = spec.encode(&r, &symmetry)?;
        let error = match symmetry.kind() {
            SymmetryKind::Discrete => {
                symmetric_geodesic_distance(&r, &spec.decode_rotation(&code)?, symmetry.rotations())
            }
            SymmetryKind::RevolutionAxis(a) => angle_between(&r.apply(&a), &spec.decode_axis(&code)?),
        };
        rows.push(RoundtripRow { sample, error_rad: error, error_deg: error.to_degrees() });
    }
    let resolution = spec.lattice().resolution();
    let bound = match spec.mode() {
        So3Mode::AxisAngle => 2.0 * (resolution + std::f64::consts::PI / spec.n_angles() as f64),
        So3Mode::AxisOnly => 2.0 * resolution,
    };
    let max = rows.iter().map(|r| r.error_rad).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.error_rad).sum::<f64>() / rows.len() as f64;
    let mut meta = ctx.metadata(args);
    meta.push(("lattice_resolution_rad".into(), resolution.to_string()));
    meta.push(("error_bound_rad".into(), bound.to_string()));
    meta.push(("max_error_rad".into(), max.to_string()));
    write_table(args.out.as_deref(), ctx.format, &meta, &rows)?;
    let summary = format!(
        "{} samples: mean error {:.3} deg, max {:.3} deg, bound {:.3} deg",
        rows.len(),
        mean.to_degrees(),
        max.to_degrees(),
        bound.to_degrees()
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Complete)
}
