//! Command-line arguments, the validated plan and model/region construction.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use stabent::entropy::{auto_torus, RegionSpec};
use stabent::models::{default_winding_patterns, VerticalPairs};
use stabent::regions::{
    half_cylinder, Dumbbell3dParams, DumbbellParams, Kp3dParams, Kp3dVariant, KpNotch, KpParams, LwNotch, LwParams,
    Region, Tripartition, CLEARANCE,
};
use stabent::{build_model, CircuitPattern, Lattice, ModelId, StabilizerModel};

use crate::output::Format;
use crate::range::{as_count, parse_range};

/// Parameters that accept ranges, in CSV column order.
pub const PARAMS: [&str; 17] = [
    "theta", "l", "lx", "ly", "L", "w", "t", "b", "lz", "lxp", "lyp", "lzp", "margin", "len", "row", "qubit", "k",
];

const MIN_TORUS: usize = 4;
const DEFAULT_TORUS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Entropy,
    I3,
    Kp,
    Lw,
    Dumb,
    Cylinder,
    Nonlocal,
    String,
    ThetaKp,
    ThetaDumb,
    ThetaSpectrum,
    Validate,
}

impl Quantity {
    pub fn is_theta(self) -> bool {
        matches!(self, Quantity::ThetaKp | Quantity::ThetaDumb | Quantity::ThetaSpectrum)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Circuit {
    /// Conjugated CZ staircase between vertically adjacent sites.
    Vertical,
    /// CZ between horizontally adjacent sites.
    RowCz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Kp,
    Lw,
    Dumb,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ModelArgs {
    /// Zoo name (`cluster2d`, `cubic-q3`, `product(2)`, ...), `theta`, or a model spec file.
    #[arg(long)]
    pub model: Option<String>,
    /// Torus extents such as `16x16`; derived from the regions when omitted.
    #[arg(long)]
    pub torus: Option<String>,
    #[arg(long, value_enum)]
    pub circuit: Option<Circuit>,
    /// Rotate the model by 90 degrees (the torus flag gives the rotated extents).
    #[arg(long)]
    pub rotate90: bool,
    /// Winding strings fixing the ground-space sector: `default` or `none`.
    #[arg(long)]
    pub mes: Option<String>,
}

#[derive(Clone, Debug)]
pub enum ModelSource {
    Zoo(ModelId),
    File(StabilizerModel),
}

impl ModelArgs {
    pub fn source(&self) -> Result<Option<ModelSource>> {
        match self.model.as_deref() {
            None | Some("theta") => Ok(None),
            Some(name) if name.ends_with(".json") || Path::new(name).is_file() => {
                Ok(Some(ModelSource::File(crate::import(Path::new(name))?)))
            }
            Some(name) => Ok(Some(ModelSource::Zoo(name.parse()?))),
        }
    }

    pub fn torus(&self) -> Result<Option<Vec<usize>>> {
        self.torus
            .as_deref()
            .map(|t| {
                t.split(['x', 'X', ','])
                    .map(|d| d.trim().parse::<usize>().with_context(|| format!("bad torus {t:?}")))
                    .collect()
            })
            .transpose()
    }

    /// The model on the requested torus, or on a default torus for commands without regions.
    pub fn build_default(&self) -> Result<StabilizerModel> {
        let source = self.source()?.ok_or_else(|| anyhow!("--model is required"))?;
        let ndim = match &source {
            ModelSource::Zoo(id) => id.ndim(),
            ModelSource::File(m) => m.lattice().ndim(),
        };
        let dims = self.torus()?.unwrap_or_else(|| vec![DEFAULT_TORUS; ndim]);
        self.build(&source, &dims)
    }

    /// Builds the model on `dims` and applies rotation, circuit and winding strings.
    pub fn build(&self, source: &ModelSource, dims: &[usize]) -> Result<StabilizerModel> {
        let mut m = match source {
            ModelSource::Zoo(id) => {
                let mut d = dims.to_vec();
                if self.rotate90 {
                    if d.len() != 2 {
                        bail!("--rotate90 needs a 2D model");
                    }
                    d.swap(0, 1);
                }
                build_model(*id, &Lattice::new(&d, id.qubits_per_site())?)?
            }
            ModelSource::File(m) => {
                if m.lattice().dims() != dims {
                    bail!("model file fixes the torus to {:?}", m.lattice().dims());
                }
                m.clone()
            }
        };
        if self.rotate90 && matches!(source, ModelSource::Zoo(_)) {
            m = m.rotate90()?;
        }
        match self.circuit {
            Some(Circuit::Vertical) => m = m.apply_circuit(&CircuitPattern::vertical_hh_cz_hh(VerticalPairs::Both))?,
            Some(Circuit::RowCz) => m = m.apply_circuit(&CircuitPattern::row_cz())?,
            None => {}
        }
        match self.mes.as_deref() {
            None | Some("none") => {}
            Some("default") => {
                let ModelSource::Zoo(id) = source else {
                    bail!("--mes default needs a zoo model");
                };
                let patterns =
                    default_winding_patterns(*id).ok_or_else(|| anyhow!("{id} has no default winding strings"))?;
                m = m.with_winding_patterns(&patterns, 0)?;
            }
            Some(other) => bail!("unknown --mes value {other:?}; use default or none"),
        }
        Ok(m)
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct PlanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Deformation angle; accepts `pi` literals.
    #[arg(long)]
    pub theta: Option<String>,
    /// Block size of square KP/LW layouts.
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub lx: Option<String>,
    #[arg(long)]
    pub ly: Option<String>,
    /// Dumbbell bar length.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub bar: Option<String>,
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub lz: Option<String>,
    #[arg(long)]
    pub lxp: Option<String>,
    #[arg(long)]
    pub lyp: Option<String>,
    #[arg(long)]
    pub lzp: Option<String>,
    #[arg(long)]
    pub margin: Option<String>,
    /// String length.
    #[arg(long)]
    pub len: Option<String>,
    #[arg(long)]
    pub row: Option<String>,
    #[arg(long)]
    pub qubit: Option<String>,
    /// Number of Schmidt values.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Tripartition scheme for `i3`.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Single-site notch such as `c-to-b:2` or `b-top-to-hole:2`.
    #[arg(long)]
    pub notch: Option<String>,
    /// Region literal for `entropy` and `nonlocal`.
    #[arg(long)]
    pub region: Option<String>,
    /// Explicit A, B and C regions for `i3`.
    #[arg(long)]
    pub region_a: Option<String>,
    #[arg(long)]
    pub region_b: Option<String>,
    #[arg(long)]
    pub region_c: Option<String>,
    /// Comma-separated cylinder circumferences.
    #[arg(long)]
    pub circumferences: Option<String>,
    #[arg(long)]
    pub period: Option<usize>,
    /// Cylinder length.
    #[arg(long)]
    pub height: Option<usize>,
    /// Symmetry line index for `string` on models other than cluster2d.
    #[arg(long)]
    pub line: Option<usize>,
    #[arg(long)]
    pub radius: Option<i64>,
    #[arg(long, value_enum, default_value = "json")]
    pub out: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; all cores when omitted. Not echoed, so output does not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Omit wall-clock durations so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Split,
    Arcs,
}

impl PlanArgs {
    fn raw(&self, name: &str) -> Option<&String> {
        match name {
            "theta" => self.theta.as_ref(),
            "l" => self.l.as_ref(),
            "lx" => self.lx.as_ref(),
            "ly" => self.ly.as_ref(),
            "L" => self.bar.as_ref(),
            "w" => self.w.as_ref(),
            "t" => self.t.as_ref(),
            "b" => self.b.as_ref(),
            "lz" => self.lz.as_ref(),
            "lxp" => self.lxp.as_ref(),
            "lyp" => self.lyp.as_ref(),
            "lzp" => self.lzp.as_ref(),
            "margin" => self.margin.as_ref(),
            "len" => self.len.as_ref(),
            "row" => self.row.as_ref(),
            "qubit" => self.qubit.as_ref(),
            "k" => self.k.as_ref(),
            _ => None,
        }
    }
}

pub enum PlanError {
    Usage(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for PlanError {
    fn from(e: anyhow::Error) -> Self {
        PlanError::Other(e)
    }
}

/// One parameter assignment, in [`PARAMS`] order.
#[derive(Clone, Debug)]
pub struct Point(pub Vec<(&'static str, f64)>);

impl Point {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| *n == name).map(|p| p.1)
    }

    pub fn count(&self, name: &str, default: usize) -> Result<usize> {
        self.get(name).map_or(Ok(default), |v| as_count(name, v))
    }
}

pub struct Plan {
    pub command: &'static str,
    pub args: PlanArgs,
    pub source: Option<ModelSource>,
    pub torus: Option<Vec<usize>>,
    pub points: Vec<Point>,
}

impl Plan {
    pub fn new(command: &'static str, args: PlanArgs) -> std::result::Result<Self, PlanError> {
        let source = args.model.source()?;
        if source.is_none() && !args.quantity.is_theta() {
            return Err(PlanError::Usage(format!(
                "--model is required for --quantity {}",
                args.quantity.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
            )));
        }
        if source.is_some() && args.quantity.is_theta() {
            return Err(PlanError::Usage("theta quantities take no model (or --model theta)".into()));
        }
        let mut axes: Vec<(&'static str, Vec<f64>)> = Vec::new();
        for name in PARAMS {
            if let Some(raw) = args.raw(name) {
                let values = parse_range(raw).map_err(|e| PlanError::Usage(format!("--{name}: {e:#}")))?;
                if command == "compute" && values.len() != 1 {
                    return Err(PlanError::Usage(format!("--{name}: compute takes a single value; use sweep")));
                }
                axes.push((name, values));
            }
        }
        let mut points = vec![Point(Vec::new())];
        for (name, values) in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.0.clone();
                        q.push((*name, v));
                        Point(q)
                    })
                })
                .collect();
        }
        let torus = args.model.torus()?;
        Ok(Plan { command, args, source, torus, points })
    }

    pub fn ndim(&self) -> usize {
        match &self.source {
            Some(ModelSource::Zoo(id)) => id.ndim(),
            Some(ModelSource::File(m)) => m.lattice().ndim(),
            None => 2,
        }
    }

    /// The model for a point whose constructions span `specs` and `extents`.
    pub fn model(&self, specs: &[RegionSpec], extents: &[[usize; 3]]) -> Result<StabilizerModel> {
        let source = self.source.as_ref().ok_or_else(|| anyhow!("no model"))?;
        let dims = match (&self.torus, source) {
            (Some(t), _) => t.clone(),
            (None, ModelSource::File(m)) => m.lattice().dims().to_vec(),
            (None, ModelSource::Zoo(_)) => self.auto_dims(specs, extents),
        };
        self.args.model.build(source, &dims)
    }

    fn auto_dims(&self, specs: &[RegionSpec], extents: &[[usize; 3]]) -> Vec<usize> {
        let ndim = self.ndim();
        let mut dims = vec![MIN_TORUS; ndim];
        for s in specs {
            for (d, a) in dims.iter_mut().zip(auto_torus(s, ndim, MIN_TORUS)) {
                *d = (*d).max(a);
            }
        }
        for e in extents {
            for (a, d) in dims.iter_mut().enumerate() {
                *d = (*d).max(e[a] + CLEARANCE);
            }
        }
        if specs.is_empty() && extents.is_empty() {
            dims = vec![DEFAULT_TORUS; ndim];
        }
        dims
    }

    pub fn kp_notch(&self) -> Result<Option<KpNotch>> {
        let Some(n) = &self.args.notch else { return Ok(None) };
        let (kind, off) = split_notch(n)?;
        Ok(Some(match kind {
            "b-to-c" => KpNotch::BToC { offset: off },
            "c-to-b" => KpNotch::CToB { offset: off },
            _ => bail!("KP notch must be b-to-c:N or c-to-b:N, got {n:?}"),
        }))
    }

    pub fn lw_notch(&self) -> Result<Option<LwNotch>> {
        let Some(n) = &self.args.notch else { return Ok(None) };
        let (kind, off) = split_notch(n)?;
        Ok(Some(match kind {
            "b-top-to-hole" => LwNotch::BTopToHole { offset: off },
            "hole-to-b-top" => LwNotch::HoleToBTop { offset: off },
            _ => bail!("LW notch must be b-top-to-hole:N or hole-to-b-top:N, got {n:?}"),
        }))
    }

    /// Region construction for the KP, LW and dumbbell schemes at `p`.
    pub fn scheme_spec(&self, scheme: Scheme, p: &Point) -> Result<RegionSpec> {
        let three_d = self.ndim() == 3;
        Ok(match (scheme, three_d) {
            (Scheme::Kp, false) => {
                let l = p.count("l", 4)?;
                let mut k = KpParams::square(l);
                k.lx = p.count("lx", l)?;
                k.lx_p = k.lx;
                k.ly = p.count("ly", l)?;
                k.ly_p = k.ly;
                k.notch = self.kp_notch()?;
                RegionSpec::Kp(k)
            }
            (Scheme::Kp, true) => {
                let variant = match self.args.variant.unwrap_or(VariantArg::Split) {
                    VariantArg::Split => Kp3dVariant::Split,
                    VariantArg::Arcs => Kp3dVariant::Arcs,
                };
                RegionSpec::Kp3d { variant, params: Kp3dParams::new(p.count("l", 2)?, p.count("lz", 1)?) }
            }
            (Scheme::Lw, false) => {
                let mut lw = LwParams::square(p.count("l", 4)?);
                lw.notch = self.lw_notch()?;
                RegionSpec::Lw(lw)
            }
            (Scheme::Lw, true) => bail!("no 3D Levin-Wen layout"),
            (Scheme::Dumb, false) => RegionSpec::Dumbbell(DumbbellParams::new(
                p.count("lx", 4)?,
                p.count("L", 4)?,
                p.count("w", 3)?,
                p.count("t", 2)?,
                p.count("b", 2)?,
            )),
            (Scheme::Dumb, true) => RegionSpec::Dumbbell3d(Dumbbell3dParams::new(
                p.count("margin", 2)?,
                p.count("lxp", 1)?,
                p.count("ly", 2)?,
                p.count("lyp", 2)?,
                p.count("lzp", 1)?,
            )),
        })
    }
}

fn split_notch(n: &str) -> Result<(&str, usize)> {
    let (kind, off) = n.split_once(':').ok_or_else(|| anyhow!("notch {n:?} needs KIND:OFFSET"))?;
    Ok((kind, off.trim().parse().with_context(|| format!("bad notch offset in {n:?}"))?))
}

/// A parsed region literal, resolved once the lattice is known.
#[derive(Clone, Debug)]
pub enum RegionLiteral {
    Sites(Vec<[i64; 3]>),
    Box { origin: [i64; 3], size: [usize; 3] },
    Half { axis: usize },
    Parts { scheme: Scheme, parts: String },
}

impl RegionLiteral {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            let coords: Vec<Vec<i64>> = serde_json::from_str(s).with_context(|| format!("bad site list {s:?}"))?;
            let sites = coords
                .into_iter()
                .map(|c| match c.as_slice() {
                    [x, y] => Ok([*x, *y, 0]),
                    [x, y, z] => Ok([*x, *y, *z]),
                    _ => Err(anyhow!("site {c:?} needs 2 or 3 coordinates")),
                })
                .collect::<Result<_>>()?;
            return Ok(RegionLiteral::Sites(sites));
        }
        let (head, rest) = s.split_once(':').ok_or_else(|| anyhow!("unknown region literal {s:?}"))?;
        match head {
            "box" => {
                let (o, size) = rest.split_once(':').ok_or_else(|| anyhow!("box needs box:X,Y:WxH"))?;
                let o: Vec<i64> = o.split(',').map(|v| v.trim().parse()).collect::<std::result::Result<_, _>>()?;
                let size: Vec<usize> =
                    size.split(['x', 'X']).map(|v| v.trim().parse()).collect::<std::result::Result<_, _>>()?;
                let pad = |v: &[i64]| [v[0], v.get(1).copied().unwrap_or(0), v.get(2).copied().unwrap_or(0)];
                if o.len() < 2 || size.len() < 2 {
                    bail!("box needs at least two coordinates and two extents");
                }
                Ok(RegionLiteral::Box {
                    origin: pad(&o),
                    size: [size[0], size[1], size.get(2).copied().unwrap_or(1)],
                })
            }
            "half" => Ok(RegionLiteral::Half { axis: rest.trim().parse()? }),
            "kp" | "lw" | "dumb" => {
                let scheme = match head {
                    "kp" => Scheme::Kp,
                    "lw" => Scheme::Lw,
                    _ => Scheme::Dumb,
                };
                let parts = rest.trim().to_ascii_uppercase();
                if parts.is_empty() || !parts.chars().all(|c| "ABC".contains(c)) {
                    bail!("region parts must be letters from ABC, got {rest:?}");
                }
                Ok(RegionLiteral::Parts { scheme, parts })
            }
            _ => bail!("unknown region builder {head:?}"),
        }
    }

    /// Extent the literal occupies from the origin, for torus sizing.
    pub fn extent(&self) -> Option<[usize; 3]> {
        let reach = |v: i64| (v.max(0) + 1) as usize;
        match self {
            RegionLiteral::Sites(s) => Some([0, 1, 2].map(|a| s.iter().map(|p| reach(p[a])).max().unwrap_or(1))),
            RegionLiteral::Box { origin, size } => Some([0, 1, 2].map(|a| origin[a].max(0) as usize + size[a])),
            _ => None,
        }
    }

    pub fn resolve(&self, plan: &Plan, p: &Point, lattice: &Lattice) -> Result<Region> {
        Ok(match self {
            RegionLiteral::Sites(s) => Region::new(lattice, s.iter().copied()),
            RegionLiteral::Box { origin, size } => Region::boxed(lattice, *origin, *size),
            RegionLiteral::Half { axis } => half_cylinder(lattice, *axis)?,
            RegionLiteral::Parts { scheme, parts } => {
                let t = plan.scheme_spec(*scheme, p)?.build(lattice)?;
                parts_of(&t, parts)
            }
        })
    }
}

fn parts_of(t: &Tripartition, parts: &str) -> Region {
    let mut r = Region::empty();
    for c in parts.chars() {
        r = r.union(match c {
            'A' => &t.a,
            'B' => &t.b,
            _ => &t.c,
        });
    }
    r
}
