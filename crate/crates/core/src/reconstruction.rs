//! Surface reconstruction from fundamental data by integrating an adapted
//! moving frame through the ambient chart.
//!
//! With `σ = ½ log λ`, `e1 = ψ_s/√λ`, `e2 = ψ_t/√λ`, `N = e1 × e2` and the
//! second fundamental form in the `(∂_s, ∂_t)` basis
//!
//! ```text
//! L = λH + 2 Re p,    M = −2 Im p,    Nn = λH − 2 Re p
//! ```
//!
//! (the real form of `p = ⟨S∂_z, ∂_z⟩` and `2H = tr S`), the frame obeys
//!
//! ```text
//! ∇_s e1 = −σ_t e2 + L/√λ N      ∇_t e1 =  σ_s e2 + M/√λ N
//! ∇_s e2 =  σ_t e1 + M/√λ N      ∇_t e2 = −σ_s e1 + Nn/√λ N
//! ∇_s N  = −(L e1 + M e2)/√λ     ∇_t N  = −(M e1 + Nn e2)/√λ
//! ```
//!
//! and coordinate components follow from `dV/ds = ∇_s V − Γ(ψ_s, V)`.
//!
//! RK4 runs with step `2·ds` (resp. `2·dt`) so that the half steps land on
//! odd data nodes; the mesh lives on the even nodes.

use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::ode::rk4_step;
use crate::fundamental::{FundamentalField, SCHEMA_VERSION};
use crate::grid::{partial_order4, residual_norm, Axis, ConformalGrid, ScalarField};
use crate::space::{AmbientChart, Point};

/// Frame drift that triggers re-orthonormalization.
pub const DRIFT_TOLERANCE: f64 = 1e-6;
/// Frame drift treated as evidence of inconsistent data.
pub const DRIFT_HARD_LIMIT: f64 = 1e-3;

/// Point and adapted frame, in chart coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameState {
    pub point: Point,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub n: Vector3<f64>,
}

impl FrameState {
    fn to_array(self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (k, v) in [self.point, self.e1, self.e2, self.n].iter().enumerate() {
            out[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
        }
        out
    }

    fn from_array(y: &[f64; 12]) -> Self {
        let v = |k: usize| Vector3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2]);
        Self {
            point: v(0),
            e1: v(1),
            e2: v(2),
            n: v(3),
        }
    }

    /// Columns `e1, e2, N`.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e1, self.e2, self.n])
    }

    /// Largest entry of `Fᵀ g F − I`.
    pub fn drift(&self, chart: &AmbientChart) -> Result<f64> {
        let f = self.matrix();
        let gram = f.transpose() * chart.metric_tensor(&self.point)? * f;
        Ok((gram - Matrix3::identity()).abs().max())
    }

    /// Gram–Schmidt of `e1, e2` against the metric at the point; `N = e1 × e2`.
    pub fn reorthonormalize(&mut self, chart: &AmbientChart) -> Result<()> {
        let g = chart.metric_tensor(&self.point)?;
        let ip = |a: &Vector3<f64>, b: &Vector3<f64>| a.dot(&(g * b));
        self.e1 /= ip(&self.e1, &self.e1).sqrt();
        self.e2 -= self.e1 * ip(&self.e2, &self.e1);
        self.e2 /= ip(&self.e2, &self.e2).sqrt();
        self.n = chart.cross_product(&self.point, &self.e1, &self.e2)?;
        Ok(())
    }
}

/// Starting point and gauge angle of the frame at the first grid node.
///
/// The data fix the vertical components of `e1, e2, N` there; the horizontal
/// parts are aligned with the chart's `x`-direction and then rotated about
/// the fiber by `angle`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Seed {
    #[serde(default)]
    pub point: [f64; 3],
    #[serde(default)]
    pub angle: f64,
}

impl Seed {
    pub fn point(&self) -> Point {
        Point::from(self.point)
    }
}

/// Seed frame consistent with `⟨N, ξ⟩ = u` and `⟨ξ, ψ_z⟩ = A` at node `(0, 0)`.
pub fn seed_frame(data: &FundamentalField, chart: &AmbientChart, seed: &Seed) -> Result<FrameState> {
    let point = seed.point();
    let basis = chart.orthonormal_frame(&point)?;
    let sqrt_l = data.lambda.re(0, 0).sqrt();
    let a = data.a.get(0, 0);
    let u = data.u.re(0, 0);
    let c1 = (2.0 * a.re / sqrt_l).clamp(-1.0, 1.0);
    let c2 = -2.0 * a.im / sqrt_l;
    let r = (1.0 - c1 * c1).sqrt();
    let (e1, e2) = if r > 1e-12 {
        (
            Vector3::new(r, 0.0, c1),
            Vector3::new(-c1 * c2 / r, u / r, c2),
        )
    } else {
        (Vector3::new(0.0, 0.0, c1.signum()), Vector3::new(1.0, 0.0, 0.0))
    };
    let (cs, sn) = (seed.angle.cos(), seed.angle.sin());
    let rot = |v: Vector3<f64>| Vector3::new(cs * v[0] - sn * v[1], sn * v[0] + cs * v[1], v[2]);
    let (e1, e2) = (rot(e1), rot(e2));
    log::info!(
        "seed gauge: horizontal part of e1 along chart x rotated by {} rad (vertical components {c1:.6}, {c2:.6}, {u:.6})",
        seed.angle
    );
    let mut frame = FrameState {
        point,
        e1: basis * e1,
        e2: basis * e2,
        n: Vector3::zeros(),
    };
    frame.n = chart.cross_product(&point, &frame.e1, &frame.e2)?;
    Ok(frame)
}

#[derive(Debug, Clone, Copy)]
struct NodeCoeffs {
    sqrt_l: f64,
    sig_s: f64,
    sig_t: f64,
    l: f64,
    m: f64,
    nn: f64,
}

struct Coefficients {
    grid: ConformalGrid,
    nodes: Vec<NodeCoeffs>,
}

impl Coefficients {
    fn new(data: &FundamentalField) -> Result<Self> {
        let g = data.grid;
        let sigma = data.lambda.map(|l| Complex64::new(0.5 * l.re.ln(), 0.0));
        let (sig_s, sig_t) = (partial_order4(&sigma, Axis::S), partial_order4(&sigma, Axis::T));
        let mut nodes = Vec::with_capacity(g.len());
        for (i, j) in g.nodes() {
            let (l, h, p) = (data.lambda.re(i, j), data.h.re(i, j), data.p.get(i, j));
            if !(l > 0.0) {
                return Err(Error::InvalidData {
                    i,
                    j,
                    reason: format!("lambda = {l} must be positive"),
                });
            }
            nodes.push(NodeCoeffs {
                sqrt_l: l.sqrt(),
                sig_s: sig_s.re(i, j),
                sig_t: sig_t.re(i, j),
                l: l * h + 2.0 * p.re,
                m: -2.0 * p.im,
                nn: l * h - 2.0 * p.re,
            });
        }
        Ok(Self { grid: g, nodes })
    }

    fn at(&self, i: usize, j: usize) -> NodeCoeffs {
        self.nodes[self.grid.index(i, j)]
    }
}

/// `d/d(index)` of the state along `axis` at the given node coefficients.
fn frame_rhs(chart: &AmbientChart, c: NodeCoeffs, axis: Axis, step: f64, y: &[f64; 12]) -> [f64; 12] {
    let f = FrameState::from_array(y);
    let Ok(gamma) = chart.christoffel(&f.point) else {
        return [f64::NAN; 12];
    };
    let k = 1.0 / c.sqrt_l;
    let (dpsi, de1, de2, dn) = match axis {
        Axis::S => (
            f.e1 * c.sqrt_l,
            -f.e2 * c.sig_t + f.n * (c.l * k),
            f.e1 * c.sig_t + f.n * (c.m * k),
            -(f.e1 * c.l + f.e2 * c.m) * k,
        ),
        Axis::T => (
            f.e2 * c.sqrt_l,
            f.e2 * c.sig_s + f.n * (c.m * k),
            -f.e1 * c.sig_s + f.n * (c.nn * k),
            -(f.e1 * c.m + f.e2 * c.nn) * k,
        ),
    };
    let out = FrameState {
        point: dpsi * step,
        e1: (de1 - gamma.contract(&dpsi, &f.e1)) * step,
        e2: (de2 - gamma.contract(&dpsi, &f.e2)) * step,
        n: (dn - gamma.contract(&dpsi, &f.n)) * step,
    };
    out.to_array()
}

#[derive(Debug, Default, Clone, Copy)]
struct PathStats {
    max_drift: f64,
    events: usize,
}

/// Integrates from `start` along a grid line: `fixed` is the other index,
/// `from`/`to` are even data indices along `axis`. Returns the frames at the
/// even nodes visited, `start` included.
fn integrate_line(
    chart: &AmbientChart,
    coeffs: &Coefficients,
    axis: Axis,
    fixed: usize,
    from: usize,
    to: usize,
    start: FrameState,
    stats: &mut PathStats,
) -> Result<Vec<FrameState>> {
    let g = coeffs.grid;
    let (h, dir) = match axis {
        Axis::S => (g.ds, if to >= from { 1.0 } else { -1.0 }),
        Axis::T => (g.dt, if to >= from { 1.0 } else { -1.0 }),
    };
    let node = |k: usize| match axis {
        Axis::S => (k, fixed),
        Axis::T => (fixed, k),
    };
    let rhs = |x: f64, y: &[f64; 12]| {
        let (i, j) = node(x.round() as usize);
        frame_rhs(chart, coeffs.at(i, j), axis, h, y)
    };
    let mut frames = vec![start];
    let mut y = start.to_array();
    let mut k = from;
    while k != to {
        let next = if dir > 0.0 { k + 2 } else { k - 2 };
        y = rk4_step(&rhs, k as f64, &y, 2.0 * dir);
        let (i, j) = node(next);
        let mut f = FrameState::from_array(&y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Reconstruction {
                i,
                j,
                reason: "non-finite state (point left the chart domain?)".into(),
            });
        }
        chart.check_domain(&f.point).map_err(|e| Error::Reconstruction {
            i,
            j,
            reason: e.to_string(),
        })?;
        let drift = f.drift(chart)?;
        stats.max_drift = stats.max_drift.max(drift);
        if drift > DRIFT_HARD_LIMIT {
            return Err(Error::Reconstruction {
                i,
                j,
                reason: format!("frame drift {drift:e} exceeds {DRIFT_HARD_LIMIT:e}; data are not integrable"),
            });
        }
        if drift > DRIFT_TOLERANCE {
            log::warn!("re-orthonormalizing frame at node ({i}, {j}), drift {drift:e}");
            f.reorthonormalize(chart)?;
            stats.events += 1;
            y = f.to_array();
        }
        frames.push(f);
        k = next;
    }
    Ok(frames)
}

/// Reconstructed surface on the even nodes of the data grid.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub grid: ConformalGrid,
    pub points: Vec<Point>,
    pub normals: Vec<Vector3<f64>>,
    pub frames: Vec<FrameState>,
    /// Largest drift seen before any correction.
    pub max_drift: f64,
    pub reorthonormalizations: usize,
    pub recovered: Option<FundamentalField>,
}

fn check_inputs(data: &FundamentalField, chart: &AmbientChart) -> Result<()> {
    if chart.params != data.space {
        return Err(Error::Precondition(
            "chart parameters differ from the data's space".into(),
        ));
    }
    data.validate_basic()?;
    let g = data.grid;
    if g.ns % 2 == 0 || g.nt % 2 == 0 || g.ns < 9 || g.nt < 9 {
        return Err(Error::InvalidGrid(format!(
            "reconstruction needs odd node counts of at least 9 (got {}x{})",
            g.ns, g.nt
        )));
    }
    Ok(())
}

/// Data coarsened so that a mesh of spacing `mesh_step` lands on its even
/// nodes. `mesh_step` must be an even multiple of both data steps.
pub fn data_for_mesh_step(data: &FundamentalField, mesh_step: f64) -> Result<FundamentalField> {
    let ratio = |h: f64| {
        let r = mesh_step / h;
        let k = r.round();
        (k >= 2.0 && k % 2.0 == 0.0 && (r - k).abs() <= 1e-9 * k).then_some(k as usize)
    };
    match (ratio(data.grid.ds), ratio(data.grid.dt)) {
        (Some(a), Some(b)) if a == b => data.subsampled(a / 2),
        _ => Err(Error::param(
            "step",
            format!(
                "{mesh_step} is not an even multiple of the data steps ({}, {})",
                data.grid.ds, data.grid.dt
            ),
        )),
    }
}

/// Integrates the frame up the first column, then along every row.
pub fn integrate_surface(data: &FundamentalField, chart: &AmbientChart, seed: &Seed) -> Result<SurfaceMesh> {
    check_inputs(data, chart)?;
    let g = data.grid;
    let coeffs = Coefficients::new(data)?;
    let start = seed_frame(data, chart, seed)?;
    let mut stats = PathStats::default();
    let column = integrate_line(chart, &coeffs, Axis::T, 0, 0, g.nt - 1, start, &mut stats)?;
    let rows: Vec<(Vec<FrameState>, PathStats)> = column
        .par_iter()
        .enumerate()
        .map(|(r, f)| {
            let mut st = PathStats::default();
            integrate_line(chart, &coeffs, Axis::S, 2 * r, 0, g.ns - 1, *f, &mut st).map(|v| (v, st))
        })
        .collect::<Result<_>>()?;
    let mesh_grid = g.subsampled(2)?;
    let mut frames = Vec::with_capacity(mesh_grid.len());
    for (row, st) in rows {
        stats.max_drift = stats.max_drift.max(st.max_drift);
        stats.events += st.events;
        frames.extend(row);
    }
    if stats.events > 0 {
        log::warn!("{} re-orthonormalization events", stats.events);
    }
    let mut mesh = SurfaceMesh {
        grid: mesh_grid,
        points: frames.iter().map(|f| f.point).collect(),
        normals: frames.iter().map(|f| f.n).collect(),
        frames,
        max_drift: stats.max_drift,
        reorthonormalizations: stats.events,
        recovered: None,
    };
    mesh.recovered = Some(recover_data(&mesh, chart)?);
    Ok(mesh)
}

/// Fundamental data read back from a mesh: `λ`, `A`, `H`, `p` from
/// fourth-order differences of the points, `u` from the frame normals.
pub fn recover_data(mesh: &SurfaceMesh, chart: &AmbientChart) -> Result<FundamentalField> {
    let g = mesh.grid;
    let coord = |c: usize| {
        ScalarField::from_real(g, mesh.points.iter().map(|p| p[c]).collect::<Vec<_>>())
    };
    let xs = [coord(0)?, coord(1)?, coord(2)?];
    let d = |axis: Axis| xs.clone().map(|f| partial_order4(&f, axis));
    let (ds, dt) = (d(Axis::S), d(Axis::T));
    let dd = |f: &[ScalarField; 3], axis: Axis| f.clone().map(|x| partial_order4(&x, axis));
    let (dss, dst, dtt) = (dd(&ds, Axis::S), dd(&ds, Axis::T), dd(&dt, Axis::T));
    let vec = |f: &[ScalarField; 3], i: usize, j: usize| Vector3::new(f[0].re(i, j), f[1].re(i, j), f[2].re(i, j));

    let n = g.len();
    let (mut lam, mut u, mut h, mut p, mut a) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for (i, j) in g.nodes() {
        let k = g.index(i, j);
        let x = mesh.points[k];
        let metric = chart.metric_tensor(&x)?;
        let gamma = chart.christoffel(&x)?;
        let ip = |v: &Vector3<f64>, w: &Vector3<f64>| v.dot(&(metric * w));
        let (ps, pt) = (vec(&ds, i, j), vec(&dt, i, j));
        let normal = mesh.normals[k];
        let l = 0.5 * (ip(&ps, &ps) + ip(&pt, &pt));
        let second = |acc: Vector3<f64>, v: &Vector3<f64>, w: &Vector3<f64>| ip(&(acc + gamma.contract(v, w)), &normal);
        let ll = second(vec(&dss, i, j), &ps, &ps);
        let mm = second(vec(&dst, i, j), &ps, &pt);
        let nn = second(vec(&dtt, i, j), &pt, &pt);
        lam.push(Complex64::new(l, 0.0));
        u.push(Complex64::new(chart.vertical_component(&x, &normal), 0.0));
        h.push(Complex64::new((ll + nn) / (2.0 * l), 0.0));
        p.push(Complex64::new(ll - nn, -2.0 * mm) / 4.0);
        a.push(0.5 * Complex64::new(chart.vertical_component(&x, &ps), -chart.vertical_component(&x, &pt)));
    }
    Ok(FundamentalField::assemble_unchecked(
        chart.params,
        g,
        ScalarField::new(g, lam)?,
        ScalarField::new(g, u)?,
        ScalarField::new(g, h)?,
        ScalarField::new(g, p)?,
        ScalarField::new(g, a)?,
    ))
}

/// Max deviations between a mesh and the data it was built from, over
/// interior mesh nodes.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// `max |g(ψ_s, ψ_s) − λ|, |g(ψ_t, ψ_t) − λ|, |g(ψ_s, ψ_t)|` relative to `λ`.
    pub metric_relative: f64,
    /// `|⟨N, ξ⟩ − u|`.
    pub normal_vertical: f64,
    /// `|⟨ξ, ψ_z⟩ − A|`.
    pub tangent_vertical: f64,
    /// `|h_z − A|` with `h` the fiber coordinate, for τ = 0 only.
    pub height_gradient: Option<f64>,
    pub mean_curvature: f64,
    pub hopf: f64,
    pub max_drift: f64,
    pub reorthonormalizations: usize,
}

impl VerificationReport {
    pub fn within(&self, tol: f64) -> bool {
        self.metric_relative <= tol
            && self.normal_vertical <= tol
            && self.tangent_vertical <= tol
            && self.height_gradient.is_none_or(|v| v <= tol)
    }
}

pub fn verify_reconstruction(mesh: &SurfaceMesh, data: &FundamentalField) -> Result<VerificationReport> {
    let chart = AmbientChart::new(data.space);
    let g = mesh.grid;
    let sample = |f: &ScalarField| -> Result<ScalarField> {
        ScalarField::new(g, g.nodes().map(|(i, j)| f.get(2 * i, 2 * j)).collect())
    };
    if (g.ns - 1) * 2 + 1 != data.grid.ns || (g.nt - 1) * 2 + 1 != data.grid.nt {
        return Err(Error::Shape("mesh was not built from this data grid".into()));
    }
    let rec = match &mesh.recovered {
        Some(r) => r.clone(),
        None => recover_data(mesh, &chart)?,
    };
    let (lam, u, h, p, a) = (
        sample(&data.lambda)?,
        sample(&data.u)?,
        sample(&data.h)?,
        sample(&data.p)?,
        sample(&data.a)?,
    );

    let coord = |c: usize| ScalarField::from_real(g, mesh.points.iter().map(|p| p[c]).collect::<Vec<_>>());
    let xs = [coord(0)?, coord(1)?, coord(2)?];
    let ds = xs.clone().map(|f| partial_order4(&f, Axis::S));
    let dt = xs.clone().map(|f| partial_order4(&f, Axis::T));
    let metric = ScalarField::from_nodes(g, |i, j| {
        let x = mesh.points[g.index(i, j)];
        let m = chart.metric_tensor(&x).ok()?;
        let v = |f: &[ScalarField; 3]| Vector3::new(f[0].re(i, j), f[1].re(i, j), f[2].re(i, j));
        let (ps, pt) = (v(&ds), v(&dt));
        let l = lam.re(i, j);
        let e = (ps.dot(&(m * ps)) - l).abs();
        let gg = (pt.dot(&(m * pt)) - l).abs();
        let f = ps.dot(&(m * pt)).abs();
        Some(Complex64::new(e.max(gg).max(f) / l, 0.0))
    });
    let height_gradient = (data.space.tau == 0.0).then(|| {
        let hz = ds[2].zip_with(&dt[2], |a, b| 0.5 * Complex64::new(a.re, -b.re));
        residual_norm(&(&hz - &a)).max
    });
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        metric_relative: residual_norm(&metric).max,
        normal_vertical: residual_norm(&(&rec.u - &u)).max,
        tangent_vertical: residual_norm(&(&rec.a - &a)).max,
        height_gradient,
        mean_curvature: residual_norm(&(&rec.h - &h)).max,
        hopf: residual_norm(&(&rec.p - &p)).max,
        max_drift: mesh.max_drift,
        reorthonormalizations: mesh.reorthonormalizations,
    })
}

/// Corner mismatch between the two boundary paths.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathDiscrepancy {
    /// Euclidean distance in chart coordinates.
    pub point: f64,
    /// Frobenius norm of the difference of the `(e1, e2, N)` matrices.
    pub frame: f64,
}

impl PathDiscrepancy {
    pub fn total(&self) -> f64 {
        self.point + self.frame
    }
}

/// Integrates to the far corner column-then-row and row-then-column.
pub fn path_independence_check(data: &FundamentalField, chart: &AmbientChart, seed: &Seed) -> Result<PathDiscrepancy> {
    check_inputs(data, chart)?;
    let g = data.grid;
    let coeffs = Coefficients::new(data)?;
    let start = seed_frame(data, chart, seed)?;
    let mut stats = PathStats::default();
    let (ie, je) = (g.ns - 1, g.nt - 1);
    let up = integrate_line(chart, &coeffs, Axis::T, 0, 0, je, start, &mut stats)?;
    let a = *integrate_line(chart, &coeffs, Axis::S, je, 0, ie, *up.last().unwrap(), &mut stats)?
        .last()
        .unwrap();
    let right = integrate_line(chart, &coeffs, Axis::S, 0, 0, ie, start, &mut stats)?;
    let b = *integrate_line(chart, &coeffs, Axis::T, ie, 0, je, *right.last().unwrap(), &mut stats)?
        .last()
        .unwrap();
    Ok(PathDiscrepancy {
        point: (a.point - b.point).norm(),
        frame: (a.matrix() - b.matrix()).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshFormat {
    Obj,
    Csv,
    Json,
}

impl MeshFormat {
    /// From a file extension (`obj`, `csv`, `json`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "csv" => Some(MeshFormat::Csv),
            "json" => Some(MeshFormat::Json),
            _ => None,
        }
    }
}

/// OBJ with one vertex and normal per node and two triangles per cell.
pub fn write_obj<W: Write>(
    out: &mut W,
    ns: usize,
    nt: usize,
    points: &[Point],
    normals: &[Vector3<f64>],
) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for n in normals {
        writeln!(out, "vn {:.16e} {:.16e} {:.16e}", n[0], n[1], n[2])?;
    }
    let id = |i: usize, j: usize| j * ns + i + 1;
    for j in 0..nt.saturating_sub(1) {
        for i in 0..ns.saturating_sub(1) {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}")?;
            writeln!(out, "f {a}//{a} {c}//{c} {d}//{d}")?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(
    out: &mut W,
    grid: &ConformalGrid,
    points: &[Point],
    normals: &[Vector3<f64>],
) -> std::io::Result<()> {
    writeln!(out, "s,t,x,y,z,nx,ny,nz")?;
    for (i, j) in grid.nodes() {
        let k = grid.index(i, j);
        let (p, n) = (points[k], normals[k]);
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            grid.s(i),
            grid.t(j),
            p[0],
            p[1],
            p[2],
            n[0],
            n[1],
            n[2]
        )?;
    }
    Ok(())
}

/// Serialized mesh: points and normals row-major over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub schema_version: u32,
    pub grid: ConformalGrid,
    pub points: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
}

impl From<&SurfaceMesh> for MeshJson {
    fn from(m: &SurfaceMesh) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            grid: m.grid,
            points: m.points.iter().map(|p| [p[0], p[1], p[2]]).collect(),
            normals: m.normals.iter().map(|n| [n[0], n[1], n[2]]).collect(),
        }
    }
}

pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        MeshFormat::Obj => write_obj(&mut out, mesh.grid.ns, mesh.grid.nt, &mesh.points, &mesh.normals)?,
        MeshFormat::Csv => write_csv(&mut out, &mesh.grid, &mesh.points, &mesh.normals)?,
        MeshFormat::Json => serde_json::to_writer(&mut out, &MeshJson::from(mesh))?,
    }
    out.flush()?;
    Ok(())
}

impl MeshJson {
    pub fn points(&self) -> Vec<Point> {
        self.points.iter().map(|p| Point::from(*p)).collect()
    }

    pub fn normals(&self) -> Vec<Vector3<f64>> {
        self.normals.iter().map(|n| Vector3::from(*n)).collect()
    }

    /// OBJ or CSV (JSON is written as is).
    pub fn write(&self, format: MeshFormat, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        match format {
            MeshFormat::Obj => write_obj(&mut out, self.grid.ns, self.grid.nt, &self.points(), &self.normals())?,
            MeshFormat::Csv => write_csv(&mut out, &self.grid, &self.points(), &self.normals())?,
            MeshFormat::Json => serde_json::to_writer(&mut out, self)?,
        }
        out.flush()?;
        Ok(())
    }
}

pub fn read_mesh_json(path: &Path) -> Result<MeshJson> {
    let mesh: MeshJson = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
    if mesh.points.len() != mesh.grid.len() || mesh.normals.len() != mesh.grid.len() {
        return Err(Error::Shape("mesh arrays do not match the grid".into()));
    }
    Ok(mesh)
}
