use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use homsurf::differentials::{abresch_rosenberg_guarded, codazzi_q_residual, feasibility_audit, holomorphy_residual, FeasibilityVerdict};
use homsurf::families::{gen_cmc_control, gen_example31, gen_example32, gen_example33, Example31Params, Example32Params, Example33Params};
use homsurf::fundamental::{EquationCheck, SCHEMA_VERSION};
use homsurf::grid::{ConformalGrid, ResidualNorm, ScalarField};
use homsurf::io::{load_fundamental, save_fundamental, write_field_csv, FieldJson};
use homsurf::reconstruction::{
    data_for_mesh_step, export_mesh, integrate_surface, path_independence_check, read_mesh_json, verify_reconstruction, MeshFormat,
    PathDiscrepancy, Seed, VerificationReport,
};
use homsurf::{check_all, AmbientChart, FundamentalField, SpaceParams, ToleranceProfile};

/// Fundamental data of surfaces in homogeneous 3-spaces E(kappa, tau):
/// generation, integrability checks, feasibility audit and reconstruction.
///
/// Exit codes: 0 success, 1 the data fail a residual or verification check,
/// 2 bad input or parameters. HOMSURF_THREADS caps the worker threads.
#[derive(Parser)]
#[command(name = "homsurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate fundamental data for one of the built-in families.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Family parameters as inline JSON or a path to a JSON file.
        /// ex31: {"kappa","a","b"}; ex32: {"delta","alpha0","alphaPrime0"[,"step"]};
        /// ex33: {"kappa","tau","branch","H0","g0","gPrime0"[,"step","root"]};
        /// cmc: {"kappa","tau","c"}.
        #[arg(long)]
        params: String,
        /// Grid as inline JSON or a path: {"s0","t0","ds","dt","ns","nt"}.
        #[arg(long)]
        grid: String,
        /// Output field JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the integrability residuals of a field.
    Check {
        /// Field JSON written by `gen` (or any file with the same layout).
        #[arg(long)]
        data: PathBuf,
        /// Tolerance profile JSON: {"algebraic","first_order","second_order"[,"fixed"]}.
        #[arg(long)]
        tol_profile: Option<PathBuf>,
        /// Write the residual report here as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Add Q and P holomorphy norms and the Codazzi equation in Q form.
        #[arg(long)]
        differentials: bool,
        /// Check the data of the oppositely oriented surface instead.
        #[arg(long)]
        flip_orientation: bool,
    },
    /// Decide whether E(kappa, tau) admits non-CMC surfaces with holomorphic Q.
    Audit {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        /// Also write the verdict as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Integrate the surface described by a field and write its mesh.
    Reconstruct {
        #[arg(long)]
        data: PathBuf,
        /// Seed as inline JSON or a path ({"point": [x, y, z], "angle": a}), or `default`.
        #[arg(long, default_value = "default")]
        seed: String,
        /// Mesh spacing; an even multiple of the data grid step.
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Output mesh; the format follows the extension (.obj, .csv, .json).
        #[arg(long)]
        out: PathBuf,
        /// Compare the mesh with the data and check path independence.
        #[arg(long)]
        verify: bool,
        /// Bound on the metric, normal and tangent deviations.
        #[arg(long, default_value_t = 1e-3)]
        verify_tol: f64,
        /// Bound on the corner discrepancy of the two boundary paths.
        #[arg(long, default_value_t = 1e-6)]
        path_tol: f64,
        /// Write the verification report here as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Convert a mesh JSON to OBJ or CSV, or a field component to CSV or JSON.
    Export {
        /// Mesh JSON from `reconstruct` or field JSON from `gen`.
        #[arg(long)]
        input: PathBuf,
        /// Output file; the format follows the extension.
        #[arg(long)]
        out: PathBuf,
        /// Field component to export when the input is field data.
        #[arg(long, value_enum, default_value_t = Component::H)]
        component: Component,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ex31,
    Ex32,
    Ex33,
    Cmc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Component {
    Lambda,
    U,
    #[value(name = "H")]
    H,
    P,
    #[value(name = "A")]
    A,
    /// Abresch–Rosenberg coefficient Q.
    #[value(name = "Q")]
    Q,
}

#[derive(Deserialize)]
struct CmcParams {
    kappa: f64,
    tau: f64,
    c: f64,
}

/// Failures of the mathematical checks, as opposed to bad input.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn json_arg<T: DeserializeOwned>(arg: &str, what: &str) -> anyhow::Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {what} from {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what}"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn gen(family: Family, params: &str, grid: &str, out: &Path) -> anyhow::Result<()> {
    let grid: ConformalGrid = json_arg(grid, "grid")?;
    let field = match family {
        Family::Ex31 => gen_example31(&json_arg::<Example31Params>(params, "params")?, grid)?,
        Family::Ex32 => gen_example32(&json_arg::<Example32Params>(params, "params")?, grid)?,
        Family::Ex33 => gen_example33(&json_arg::<Example33Params>(params, "params")?, grid)?,
        Family::Cmc => {
            let p: CmcParams = json_arg(params, "params")?;
            gen_cmc_control(&SpaceParams::new(p.kappa, p.tau)?, p.c, grid)?
        }
    };
    save_fundamental(out, &field)?;
    println!("wrote {}x{} field to {}", grid.ns, grid.nt, out.display());
    Ok(())
}

#[derive(Serialize)]
struct DifferentialSummary {
    q_holomorphy: ResidualNorm,
    p_holomorphy: ResidualNorm,
    /// Nodes where `|H + i tau|` is too small to form Q.
    guarded_nodes: usize,
}

#[derive(Serialize)]
struct CheckOutput {
    #[serde(flatten)]
    report: homsurf::ResidualReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    differentials: Option<DifferentialSummary>,
}

fn print_check(name: &str, c: &EquationCheck) {
    let node = c.worst_node.map(|[i, j]| format!(" at ({i}, {j})")).unwrap_or_default();
    println!(
        "{:<12} max {:>10.3e}  tol {:>10.3e}  {}{}",
        name,
        c.max,
        c.tol,
        if c.pass { "ok" } else { "FAIL" },
        if c.pass { String::new() } else { node }
    );
}

fn check(data: &Path, tol_profile: Option<&Path>, report: Option<&Path>, differentials: bool, flip: bool) -> anyhow::Result<()> {
    let mut d = load_fundamental(data)?;
    if flip {
        d = d.flipped_orientation();
    }
    let tol = match tol_profile {
        Some(p) => json_arg(p.to_str().context("tolerance profile path is not UTF-8")?, "tolerance profile")?,
        None => ToleranceProfile::default(),
    };
    let mut r = check_all(&d, &tol);
    let mut summary = None;
    if differentials {
        let (q, guarded) = abresch_rosenberg_guarded(&d);
        let p = q.coeff.zip_with(&d.h, |q, h| num_complex::Complex64::new(h.re, d.space.tau) * q);
        summary = Some(DifferentialSummary {
            q_holomorphy: holomorphy_residual(&q),
            p_holomorphy: holomorphy_residual(&homsurf::differentials::QuadraticDifferential {
                kind: homsurf::differentials::DifferentialKind::ArP,
                coeff: p,
            }),
            guarded_nodes: guarded.len(),
        });
        if guarded.is_empty() {
            let c1 = r.get("c1").map(|c| c.tol).unwrap_or(tol.first_order);
            r.push_extra("codazzi_q", EquationCheck::evaluate(&codazzi_q_residual(&d)?, c1));
        }
    }
    for (k, c) in r.equations.iter().chain(&r.extras) {
        print_check(k, c);
    }
    if let Some(s) = &summary {
        println!("{:<12} max {:>10.3e}", "dzbar Q", s.q_holomorphy.max);
        println!("{:<12} max {:>10.3e}", "dzbar P", s.p_holomorphy.max);
        if s.guarded_nodes > 0 {
            println!("{} nodes with |H + i tau| below the guard; Q not formed there", s.guarded_nodes);
        }
    }
    if let Some(path) = report {
        write_json(
            path,
            &CheckOutput {
                report: r.clone(),
                differentials: summary,
            },
        )?;
    }
    if r.pass {
        println!("pass");
        Ok(())
    } else {
        Err(CheckFailed(format!("failing equations: {}", r.failing().join(", "))).into())
    }
}

#[derive(Serialize)]
struct AuditOutput {
    schema_version: u32,
    kappa: f64,
    tau: f64,
    #[serde(flatten)]
    verdict: FeasibilityVerdict,
}

fn audit(kappa: f64, tau: f64, report: Option<&Path>) -> anyhow::Result<()> {
    let v = feasibility_audit(&SpaceParams::new(kappa, tau)?);
    println!("verdict: {}", v.tag);
    match v.allowed_h_interval {
        Some((lo, hi)) => println!("H interval: [{lo}, {hi}]"),
        None => println!("H interval: none"),
    }
    println!("reason: {}", v.citation);
    if let Some(path) = report {
        write_json(
            path,
            &AuditOutput {
                schema_version: SCHEMA_VERSION,
                kappa,
                tau,
                verdict: v,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReconstructOutput {
    #[serde(flatten)]
    verification: VerificationReport,
    path: PathDiscrepancy,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn reconstruct(
    data: &Path,
    seed: &str,
    step: f64,
    out: &Path,
    verify: bool,
    verify_tol: f64,
    path_tol: f64,
    report: Option<&Path>,
) -> anyhow::Result<()> {
    let format = MeshFormat::from_path(out).context("output extension must be .obj, .csv or .json")?;
    let seed: Seed = if seed == "default" { Seed::default() } else { json_arg(seed, "seed")? };
    let d = data_for_mesh_step(&load_fundamental(data)?, step)?;
    let chart = AmbientChart::new(d.space);
    let mesh = integrate_surface(&d, &chart, &seed)?;
    export_mesh(&mesh, format, out)?;
    println!("wrote {}x{} mesh to {}", mesh.grid.ns, mesh.grid.nt, out.display());
    if !verify {
        return Ok(());
    }
    let v = verify_reconstruction(&mesh, &d)?;
    let path = path_independence_check(&d, &chart, &seed)?;
    let pass = v.within(verify_tol) && path.total() <= path_tol && v.reorthonormalizations == 0;
    println!("metric       {:.3e}", v.metric_relative);
    println!("<N, xi> - u  {:.3e}", v.normal_vertical);
    println!("<xi, psi_z>  {:.3e}", v.tangent_vertical);
    if let Some(h) = v.height_gradient {
        println!("h_z - A      {h:.3e}");
    }
    println!("H            {:.3e}", v.mean_curvature);
    println!("p            {:.3e}", v.hopf);
    println!("frame drift  {:.3e} ({} corrections)", v.max_drift, v.reorthonormalizations);
    println!("corner gap   {:.3e} (point {:.3e}, frame {:.3e})", path.total(), path.point, path.frame);
    if let Some(p) = report {
        write_json(
            p,
            &ReconstructOutput {
                verification: v,
                path,
                pass,
            },
        )?;
    }
    if pass {
        println!("pass");
        Ok(())
    } else {
        Err(CheckFailed("reconstruction deviates from the data".into()).into())
    }
}

fn component(d: &FundamentalField, c: Component) -> anyhow::Result<ScalarField> {
    Ok(match c {
        Component::Lambda => d.lambda.clone(),
        Component::U => d.u.clone(),
        Component::H => d.h.clone(),
        Component::P => d.p.clone(),
        Component::A => d.a.clone(),
        Component::Q => abresch_rosenberg_guarded(d).0.coeff,
    })
}

fn export(input: &Path, out: &Path, c: Component) -> anyhow::Result<()> {
    let value: serde_json::Value =
        serde_json::from_reader(std::io::BufReader::new(fs::File::open(input).with_context(|| format!("opening {}", input.display()))?))?;
    let format = MeshFormat::from_path(out).context("output extension must be .obj, .csv or .json")?;
    if value.get("points").is_some() {
        read_mesh_json(input)?.write(format, out)?;
    } else {
        let field = component(&load_fundamental(input)?, c)?;
        match format {
            MeshFormat::Csv => {
                let mut w = std::io::BufWriter::new(fs::File::create(out)?);
                write_field_csv(&mut w, &field)?;
                w.flush()?;
            }
            MeshFormat::Json => write_json(out, &FieldJson::from_field(&field))?,
            MeshFormat::Obj => bail!("field data export supports .csv and .json only"),
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("HOMSURF_THREADS") {
        let n: usize = v.parse().with_context(|| format!("HOMSURF_THREADS={v} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Gen { family, params, grid, out } => gen(family, &params, &grid, &out),
        Command::Check {
            data,
            tol_profile,
            report,
            differentials,
            flip_orientation,
        } => check(&data, tol_profile.as_deref(), report.as_deref(), differentials, flip_orientation),
        Command::Audit { kappa, tau, report } => audit(kappa, tau, report.as_deref()),
        Command::Reconstruct {
            data,
            seed,
            step,
            out,
            verify,
            verify_tol,
            path_tol,
            report,
        } => reconstruct(&data, &seed, step, &out, verify, verify_tol, path_tol, report.as_deref()),
        Command::Export { input, out, component } => export(&input, &out, component),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.downcast_ref::<CheckFailed>().is_some()
                || matches!(e.downcast_ref::<homsurf::Error>(), Some(homsurf::Error::Reconstruction { .. }))
            {
                1
            } else {
                2
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
