mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helicity_core::calculus::{beta_primitive_s3, FourierSpectrum, PRIMITIVE_TOLERANCE};
use helicity_core::conjugacy::{
    furstenberg_apply, furstenberg_example, lipschitz_lower_bounds, orbit_discrepancy, split_function,
    FurstenbergMap, Rotation, TwistHomeo,
};
use helicity_core::helicity::*;
use helicity_core::suspension::{
    double_suspension_helicity, relative_helicity_suspension, suspension_helicity_direct, IsotopySpec,
    CALABI_AGREEMENT,
};
use helicity_core::torus::{calibrate_kappa, torus_flux, torus_helicity_direct, torus_helicity_fourier};
use helicity_core::{make_grid, parse, ChartGrid, Error, ManifoldId, ScalarField};
use output::Cell;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "helicity", version, about = "Helicity of contact and suspension fields")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Resolution: one count for every axis, or per-axis counts such as 64x32x4.
    #[arg(long, env = "HELICITY_GRID")]
    grid: Option<String>,
    /// Bound on primitive residuals.
    #[arg(long, default_value_t = PRIMITIVE_TOLERANCE)]
    tolerance: f64,
    /// Relative bound for agreement between independent methods.
    #[arg(long, default_value_t = DIRECT_AGREEMENT)]
    agreement: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FieldH {
    /// Contact Hamiltonian as an expression.
    #[arg(long)]
    h: Option<String>,
    /// JSON field spec {"manifold": ..., "expr": ...}.
    #[arg(long)]
    h_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Helicity of the strictly contact field of a basic Hamiltonian.
    Contact {
        #[arg(long, default_value = "s3")]
        manifold: ManifoldId,
        #[command(flatten)]
        field: FieldH,
        /// Also evaluate the direct quadrature and compare.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Relative helicity of two contact fields.
    Relative {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[command(flatten)]
        common: Common,
    },
    /// Direct quadrature of the helicity integral.
    Direct {
        #[command(flatten)]
        field: FieldH,
        #[command(flatten)]
        common: Common,
    },
    /// Time average for a Hamiltonian depending on t.
    Timedep {
        #[command(flatten)]
        field: FieldH,
        /// Number of time intervals.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// L2 bounds with tightness flags.
    Bounds {
        #[command(flatten)]
        field: FieldH,
        #[command(flatten)]
        common: Common,
    },
    /// Helicity of the horizontal lift of a function on S2.
    Lift {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        common: Common,
    },
    /// Average of H over filling discs of Hopf fibres.
    DiscAverage {
        #[command(flatten)]
        field: FieldH,
        #[arg(long, default_value_t = 48)]
        n_eta: usize,
        #[arg(long, default_value_t = 8)]
        n_xi: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Linking of fibres over signed points.
    FiberLinking {
        #[arg(long)]
        f: String,
        /// JSON array of {"phi", "psi", "sign"}.
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Helicities along a sequence of Hamiltonians.
    Limit {
        /// Repeat once per term.
        #[arg(long = "h", required_unless_present = "sequence")]
        terms: Vec<String>,
        /// JSON array of expressions.
        #[arg(long, conflicts_with = "terms")]
        sequence: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Suspension of a disk isotopy.
    Suspension {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 0.9)]
        support: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Two suspensions glued into S3.
    DoubleSuspension {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long, default_value_t = 0.9)]
        support: f64,
        #[arg(long, default_value_t = 16)]
        sphere_grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fourier helicity on T3 from a spectrum file.
    Torus {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        direct: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Furstenberg skew product: orbit, splitting, or the built-in example.
    Furstenberg {
        #[arg(long, default_value = "golden")]
        theta: Rotation,
        #[arg(long, default_value_t = 1)]
        d: i64,
        /// Spectrum JSON for f.
        #[arg(long, required_unless_present = "example")]
        f: Option<PathBuf>,
        /// Build the example with this many frequencies instead of reading f.
        #[arg(long, conflicts_with = "f")]
        example: Option<usize>,
        #[arg(long, requires = "example")]
        strict: bool,
        #[arg(long)]
        split: bool,
        /// Orbit length.
        #[arg(long)]
        orbit: Option<usize>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
        start: Vec<f64>,
        /// CSV file for the orbit points.
        #[arg(long, requires = "orbit")]
        orbit_output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the twisted cohomological equation.
    Split {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value = "golden")]
        theta: Rotation,
        /// Highest mode to solve; defaults to the spectrum's.
        #[arg(long)]
        terms: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Lower bounds on Lipschitz constants of a twist conjugacy.
    Lipschitz {
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 0.9)]
        cutoff: f64,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Orbit discrepancy against the uniform measure.
    Discrepancy {
        #[arg(long, default_value = "golden")]
        theta: Rotation,
        #[arg(long, default_value_t = 1)]
        d: i64,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
        start: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Cells per side.
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Run = Result<(), Failure>;

#[derive(Deserialize)]
struct FieldSpec {
    manifold: ManifoldId,
    expr: String,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Domain(Error::InvalidInput(format!("{}: {e}", path.display()))))
}

fn spectrum(path: &Path) -> Result<FourierSpectrum, Failure> {
    read_json(path)
}

impl FieldH {
    fn load(&self, manifold: ManifoldId) -> Result<ScalarField, Failure> {
        match (&self.h, &self.h_file) {
            (Some(text), _) => Ok(ScalarField::parse(manifold, text)?),
            (None, Some(path)) => {
                let spec: FieldSpec = read_json(path)?;
                if spec.manifold != manifold {
                    return Err(Error::ManifoldMismatch {
                        expected: manifold.to_string(),
                        found: spec.manifold.to_string(),
                    }
                    .into());
                }
                Ok(ScalarField::parse(manifold, &spec.expr)?)
            }
            (None, None) => unreachable!("clap enforces one source"),
        }
    }

    fn load_timedep(&self) -> Result<ScalarField, Failure> {
        let f = self.load(ManifoldId::Sphere3).or_else(|_| {
            let text = match (&self.h, &self.h_file) {
                (Some(t), _) => t.clone(),
                (None, Some(p)) => read_json::<FieldSpec>(p)?.expr,
                _ => unreachable!(),
            };
            Ok::<_, Failure>(ScalarField::time_dependent(ManifoldId::Sphere3, parse(&text)?)?)
        })?;
        Ok(f)
    }
}

impl Common {
    fn grid(&self, manifold: ManifoldId, default: &[usize]) -> Result<ChartGrid, Failure> {
        let res = match &self.grid {
            None => default.to_vec(),
            Some(text) => {
                let parts: Result<Vec<usize>, _> = text.split('x').map(|s| s.trim().parse::<usize>()).collect();
                let parts = parts.map_err(|_| Error::InvalidInput(format!("bad grid `{text}`")))?;
                if parts.len() == 1 {
                    vec![parts[0]; manifold.dim()]
                } else {
                    parts
                }
            }
        };
        Ok(make_grid(manifold, &res)?)
    }

    fn tolerances(&self) -> Value {
        json!({"primitive": self.tolerance, "agreement": self.agreement})
    }

    fn emit_json(&self, mut v: Value, grid: &str) -> Run {
        if let Value::Object(m) = &mut v {
            m.insert("grid".into(), Value::String(grid.into()));
            m.insert("tolerances".into(), self.tolerances());
        }
        output::emit(&output::json(&v), self.output.as_deref()).map_err(|e| Failure::Io(e.to_string()))
    }

    fn emit_text(&self, text: &str) -> Run {
        output::emit(text, self.output.as_deref()).map_err(|e| Failure::Io(e.to_string()))
    }

    fn check_positive(&self) -> Run {
        if self.tolerance > 0.0 && self.agreement > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput("tolerances must be positive".into()).into())
        }
    }
}

fn agree(what: &str, left: f64, right: f64, tolerance: f64) -> Run {
    if (left - right).abs() <= tolerance * (1.0 + left.abs().max(right.abs())) {
        Ok(())
    } else {
        Err(Error::Inconsistent { what: what.into(), left, right, tolerance }.into())
    }
}

fn rotation_json(theta: &Rotation) -> Value {
    match theta {
        Rotation::Exact(q) => json!({"value": theta.value(), "exact": q.to_string()}),
        Rotation::Float(x) => json!({"value": x}),
    }
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Contact { manifold, field, cross_check, common } => {
            common.check_positive()?;
            let h = field.load(manifold)?;
            let g = common.grid(manifold, &[48, 48, 48])?;
            let r = helicity_contact(&h, &g)?;
            let bounds = bounds_check(&h, &g)?;
            let mut v = json!({
                "value": r.value,
                "method": r.method,
                "residual": r.residual,
                "bounds": bounds,
            });
            if cross_check {
                let prim = beta_primitive_s3(&h, &g)?;
                let x = contact_vector_field(&h, &g)?;
                let d = helicity_direct(&x, &prim.report, &g, common.tolerance)?;
                agree("contact formula and direct quadrature", r.value, d.value, common.agreement)?;
                v["cross_check"] = json!({"direct_value": d.value, "residual": d.residual, "gap": (r.value - d.value).abs()});
            }
            common.emit_json(v, &r.grid)
        }
        Command::Relative { h, k, common } => {
            let g = common.grid(ManifoldId::Sphere3, &[48, 48, 48])?;
            let (h, k) = (ScalarField::parse(ManifoldId::Sphere3, &h)?, ScalarField::parse(ManifoldId::Sphere3, &k)?);
            let value = relative_helicity_contact(&h, &k, &g)?;
            common.emit_json(json!({"value": value, "method": Method::ContactFormula}), &g.describe())
        }
        Command::Direct { field, common } => {
            common.check_positive()?;
            let h = field.load(ManifoldId::Sphere3)?;
            let g = common.grid(ManifoldId::Sphere3, &[48, 48, 48])?;
            let prim = beta_primitive_s3(&h, &g)?;
            let x = contact_vector_field(&h, &g)?;
            let r = helicity_direct(&x, &prim.report, &g, common.tolerance)?;
            common.emit_json(serde_json::to_value(&r).unwrap(), &r.grid)
        }
        Command::Timedep { field, steps, common } => {
            let h = field.load_timedep()?;
            let g = common.grid(ManifoldId::Sphere3, &[16, 16, 16])?;
            let r = helicity_timedep(&h, &g, &uniform_times(steps))?;
            let mut v = serde_json::to_value(&r).unwrap();
            v["time_nodes"] = json!(steps + 1);
            common.emit_json(v, &r.grid)
        }
        Command::Bounds { field, common } => {
            let h = field.load(ManifoldId::Sphere3)?;
            let g = common.grid(ManifoldId::Sphere3, &[48, 48, 48])?;
            common.emit_json(serde_json::to_value(bounds_check(&h, &g)?).unwrap(), &g.describe())
        }
        Command::Lift { f, common } => {
            let f = ScalarField::parse(ManifoldId::Sphere2, &f)?;
            let g = common.grid(ManifoldId::Sphere2, &[64, 16])?;
            common.emit_json(serde_json::to_value(horizontal_lift_helicity(&f, &g)?).unwrap(), &g.describe())
        }
        Command::DiscAverage { field, n_eta, n_xi, common } => {
            let h = field.load(ManifoldId::Sphere3)?;
            let g = common.grid(ManifoldId::Sphere3, &[24, 24, 24])?;
            let value = filling_disc_average(&h, n_eta, n_xi, &g)?;
            common.emit_json(json!({"value": value, "disc_nodes": [n_eta, n_xi]}), &g.describe())
        }
        Command::FiberLinking { f, points, common } => {
            let f = ScalarField::parse(ManifoldId::Sphere2, &f)?;
            let pts: Vec<SignedPoint> = read_json(&points)?;
            let value = fiber_linking(&f, &pts)?;
            common.emit_json(json!({"value": value, "points": pts.len()}), "pointwise")
        }
        Command::Limit { terms, sequence, common } => {
            let terms = match sequence {
                Some(p) => read_json::<Vec<String>>(&p)?,
                None => terms,
            };
            let seq = terms
                .iter()
                .map(|t| ScalarField::parse(ManifoldId::Sphere3, t))
                .collect::<Result<Vec<_>, _>>()?;
            let g = common.grid(ManifoldId::Sphere3, &[24, 24, 24])?;
            let r = helicity_limit(&seq, &g)?;
            if common.format == Some(Format::Json) {
                return common.emit_json(serde_json::to_value(&r).unwrap(), &g.describe());
            }
            let rows: Vec<Vec<Cell>> = r
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let gap = if i == 0 { Cell::Empty } else { Cell::Float(r.sup_gaps[i - 1]) };
                    vec![Cell::Int(i as i64), Cell::Float(*v), gap]
                })
                .collect();
            common.emit_text(&output::csv(&["i", "value", "sup_gap"], &rows))
        }
        Command::Suspension { f, support, common } => {
            let spec = IsotopySpec::parse(&f, support)?;
            let g = common.grid(ManifoldId::SolidTorus, &[512, 256, 4])?;
            let r = suspension_helicity_direct(&spec, &g)?;
            agree("suspension helicity and twice the Calabi invariant", r.value, 2.0 * r.calabi, common.agreement)?;
            let rel = relative_helicity_suspension(&spec, &g)?;
            let v = json!({
                "value": r.value,
                "calabi": r.calabi,
                "twice_calabi": 2.0 * r.calabi,
                "relative_to_reeb": rel,
                "residual": r.residual,
                "internal_agreement": CALABI_AGREEMENT,
            });
            common.emit_json(v, &r.grid)
        }
        Command::DoubleSuspension { f1, f2, support, sphere_grid, common } => {
            let (a, b) = (IsotopySpec::parse(&f1, support)?, IsotopySpec::parse(&f2, support)?);
            let g = common.grid(ManifoldId::SolidTorus, &[512, 256, 4])?;
            let s = make_grid(ManifoldId::Sphere3, &[sphere_grid; 3])?;
            let d = double_suspension_helicity(&a, &b, &g, &s)?;
            agree("termwise and closed-form double suspension", d.termwise_value, d.formula_value, common.agreement)?;
            let mut v = serde_json::to_value(&d).unwrap();
            v["sphere_grid"] = json!(s.describe());
            common.emit_json(v, &g.describe())
        }
        Command::Torus { coeffs, direct, common } => {
            let spec = spectrum(&coeffs)?;
            let flux = torus_flux(&spec);
            if !flux.exact {
                let c1 = spec.get(1);
                return Err(Error::NotExact { re: c1.re, im: c1.im }.into());
            }
            let g = common.grid(ManifoldId::Torus3, &[32, 32, 32])?;
            let kappa = calibrate_kappa(&g)?;
            let formula = torus_helicity_fourier(&spec, kappa)?;
            let mut v = json!({
                "flux": flux,
                "exact": flux.exact,
                "formula_value": formula,
                "direct_value": Value::Null,
                "kappa": kappa,
            });
            if direct {
                let d = torus_helicity_direct(&spec, &g)?;
                agree("Fourier formula and direct quadrature", formula, d.result.value, common.agreement)?;
                v["direct_value"] = json!(d.result.value);
                v["residual"] = json!(d.result.residual);
            }
            common.emit_json(v, &g.describe())
        }
        Command::Furstenberg { theta, d, f, example, strict, split, orbit, start, orbit_output, common } => {
            let start = [start[0], start[1]];
            let (theta, f, mut v) = match example {
                Some(k) => {
                    let e = furstenberg_example(k, strict)?;
                    let theta = Rotation::Float(e.theta);
                    (theta, e.f.clone(), json!({"example": e}))
                }
                None => {
                    let f = spectrum(f.as_deref().unwrap())?;
                    (theta, f, json!({}))
                }
            };
            v["theta"] = rotation_json(&theta);
            if let Some(q) = v["example"]["theta_exact"].as_str().map(String::from) {
                v["theta"]["exact"] = json!(q);
            }
            v["d"] = json!(d);
            let m = FurstenbergMap::new(theta.clone(), d, f.clone())?;
            if split && example.is_none() {
                v["split"] = serde_json::to_value(split_function(&f, &theta, f.max_index())?).unwrap();
            }
            if let Some(n) = orbit {
                let pts = furstenberg_apply(&m, start, n)?;
                if let Some(path) = orbit_output {
                    let rows: Vec<Vec<Cell>> = pts.iter().map(|p| vec![Cell::Float(p[0]), Cell::Float(p[1])]).collect();
                    output::emit(&output::csv(&["u", "v"], &rows), Some(&path)).map_err(|e| Failure::Io(e.to_string()))?;
                }
                let disc = if n >= 64 { Some(orbit_discrepancy(&m, start, n, 8)?) } else { None };
                v["orbit"] = json!({"length": n, "start": start, "last": pts.last(), "discrepancy_8x8": disc});
            }
            common.emit_json(v, "circle")
        }
        Command::Split { f, theta, terms, common } => {
            let f = spectrum(&f)?;
            let r = split_function(&f, &theta, terms.unwrap_or(f.max_index()))?;
            if common.format == Some(Format::Csv) {
                let rows: Vec<Vec<Cell>> = r
                    .c0_partial_sums
                    .iter()
                    .zip(&r.c1_partial_sums)
                    .enumerate()
                    .map(|(i, (a, b))| vec![Cell::Int(i as i64 + 1), Cell::Float(*a), Cell::Float(*b)])
                    .collect();
                return common.emit_text(&output::csv(&["k", "c0_partial", "c1_partial"], &rows));
            }
            let mut v = serde_json::to_value(&r).unwrap();
            v["theta"] = rotation_json(&theta);
            common.emit_json(v, "4096 residual points")
        }
        Command::Lipschitz { rho, cutoff, nmax, common } => {
            let tw = TwistHomeo::new(parse(&rho)?, cutoff)?;
            let r = lipschitz_lower_bounds(&tw, nmax)?;
            if common.format == Some(Format::Json) {
                return common.emit_json(serde_json::to_value(&r).unwrap(), "bisection");
            }
            let rows: Vec<Vec<Cell>> = r
                .pairs
                .iter()
                .map(|p| vec![Cell::Int(p.n as i64), Cell::Float(p.r_n), Cell::Float(p.l_n)])
                .collect();
            common.emit_text(&output::csv(&["n", "r_n", "L_n"], &rows))
        }
        Command::Discrepancy { theta, d, f, start, n, k, common } => {
            let f = match f {
                Some(p) => spectrum(&p)?,
                None => FourierSpectrum::zeros(1),
            };
            let m = FurstenbergMap::new(theta.clone(), d, f)?;
            let value = orbit_discrepancy(&m, [start[0], start[1]], n, k)?;
            let v = json!({"value": value, "theta": rotation_json(&theta), "d": d, "length": n, "cells": k});
            common.emit_json(v, &format!("{k}x{k}"))
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("Io: {msg}");
            ExitCode::from(1)
        }
    }
}
