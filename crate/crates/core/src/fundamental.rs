//! Fundamental data `(λ, u, H, p, A)` of a conformally parametrized surface
//! and the residuals of its integrability system.
//!
//! With `c = κ − 4τ²` the conditions checked here are
//!
//! ```text
//! c0:    A_z − (λ_z/λ) A − u p                           = 0
//! c1:    p_z̄ − (λ/2)(H_z + u A c)                         = 0
//! c2:    A_z̄ − (uλ/2)(H + iτ)                             = 0
//! c3:    u_z + (H − iτ) A + 2 p Ā / λ                     = 0
//! c4:    4|A|²/λ − (1 − u²)                               = 0
//! gauss: (log λ)_{zz̄} − 2|p|²/λ + (λ/2)u²c + (λ/2)(H² + τ²) = 0
//! ```
//!
//! `c4` is algebraic; the others are evaluated with central differences and
//! are only meaningful on the interior rings where their stencils are valid.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{d_z, d_zbar, partial, residual_norm, Axis, ConformalGrid, ResidualNorm, ScalarField};
use crate::space::SpaceParams;

/// Default tolerance for node-local algebraic identities.
pub const DEFAULT_ALGEBRAIC_TOL: f64 = 1e-8;
/// Smallest admissible `|H|` when τ = 0.
pub const MEAN_CURVATURE_GUARD: f64 = 1e-9;
/// Schema version written into every JSON payload.
pub const SCHEMA_VERSION: u32 = 1;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Grid-sampled fundamental data on a surface in E(κ, τ).
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalField {
    pub space: SpaceParams,
    pub grid: ConformalGrid,
    pub lambda: ScalarField,
    pub u: ScalarField,
    pub h: ScalarField,
    pub p: ScalarField,
    pub a: ScalarField,
    /// Closed-form `(H_s, H_t)` when the generator knows them.
    pub h_grad: Option<(ScalarField, ScalarField)>,
}

impl FundamentalField {
    /// Assembles and validates the data; `c4` must hold within `tol_alg`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        space: SpaceParams,
        grid: ConformalGrid,
        lambda: ScalarField,
        u: ScalarField,
        h: ScalarField,
        p: ScalarField,
        a: ScalarField,
        tol_alg: f64,
    ) -> Result<Self> {
        let data = Self::assemble_unchecked(space, grid, lambda, u, h, p, a);
        data.validate(tol_alg)?;
        Ok(data)
    }

    /// Assembles without checking invariants (synthetic and fault-injected data).
    pub fn assemble_unchecked(
        space: SpaceParams,
        grid: ConformalGrid,
        lambda: ScalarField,
        u: ScalarField,
        h: ScalarField,
        p: ScalarField,
        a: ScalarField,
    ) -> Self {
        Self {
            space,
            grid,
            lambda,
            u,
            h,
            p,
            a,
            h_grad: None,
        }
    }

    pub fn with_h_grad(mut self, h_s: ScalarField, h_t: ScalarField) -> Self {
        self.h_grad = Some((h_s, h_t));
        self
    }

    /// Shape, sign and guard invariants, without the algebraic identity.
    pub fn validate_basic(&self) -> Result<()> {
        let g = self.grid;
        for (name, f) in [
            ("lambda", &self.lambda),
            ("u", &self.u),
            ("H", &self.h),
            ("p", &self.p),
            ("A", &self.a),
        ] {
            if *f.grid() != g {
                return Err(Error::Shape(format!("field {name} is on a different grid")));
            }
            if let Some(k) = f.mask().iter().position(|ok| !ok) {
                return Err(Error::InvalidData {
                    i: k % g.ns,
                    j: k / g.ns,
                    reason: format!("{name} is not finite"),
                });
            }
        }
        for (i, j) in g.nodes() {
            let bad = |reason: String| Err(Error::InvalidData { i, j, reason });
            let lam = self.lambda.get(i, j);
            if lam.re <= 0.0 || lam.im != 0.0 {
                return bad(format!("lambda = {lam} must be real and positive"));
            }
            let u = self.u.get(i, j);
            if u.im != 0.0 || u.re.abs() > 1.0 {
                return bad(format!("u = {u} must be real in [-1, 1]"));
            }
            let h = self.h.get(i, j);
            if h.im != 0.0 {
                return bad(format!("H = {h} must be real"));
            }
            if self.space.tau == 0.0 && h.re.abs() < MEAN_CURVATURE_GUARD {
                return bad(format!(
                    "|H| = {:e} below {MEAN_CURVATURE_GUARD:e} with tau = 0 (minimal points excluded)",
                    h.re.abs()
                ));
            }
        }
        Ok(())
    }

    /// All type invariants, including `|4|A|²/λ − (1 − u²)| ≤ tol_alg`.
    pub fn validate(&self, tol_alg: f64) -> Result<()> {
        self.validate_basic()?;
        let c4 = residual_c4(self);
        for (i, j) in self.grid.nodes() {
            let r = c4.get(i, j).norm();
            if r > tol_alg {
                return Err(Error::InvalidData {
                    i,
                    j,
                    reason: format!("4|A|^2/lambda - (1 - u^2) = {r:e} exceeds {tol_alg:e}"),
                });
            }
        }
        Ok(())
    }

    /// The same surface seen with the opposite orientation.
    ///
    /// Reflects the parameter `t ↦ −t` (so `z ↦ z̄`) and flips the normal:
    /// `u ↦ −u`, `H ↦ −H`, `p ↦ −p̄`, `A ↦ Ā`, `λ` unchanged.
    /// The data on every `stride`-th node.
    pub fn subsampled(&self, stride: usize) -> Result<Self> {
        let mut d = Self::assemble_unchecked(
            self.space,
            self.grid.subsampled(stride)?,
            self.lambda.subsampled(stride)?,
            self.u.subsampled(stride)?,
            self.h.subsampled(stride)?,
            self.p.subsampled(stride)?,
            self.a.subsampled(stride)?,
        );
        if let Some((hs, ht)) = &self.h_grad {
            d = d.with_h_grad(hs.subsampled(stride)?, ht.subsampled(stride)?);
        }
        Ok(d)
    }

    pub fn flipped_orientation(&self) -> Self {
        let g = self.grid;
        let reflected = ConformalGrid {
            t0: -(g.t0 + (g.nt - 1) as f64 * g.dt),
            ..g
        };
        let reflect = |f: &ScalarField, op: &dyn Fn(Complex64) -> Complex64| {
            let mut values = Vec::with_capacity(g.len());
            for j in 0..g.nt {
                for i in 0..g.ns {
                    values.push(op(f.get(i, g.nt - 1 - j)));
                }
            }
            ScalarField::new(reflected, values).expect("reflection preserves finiteness")
        };
        Self {
            space: self.space,
            grid: reflected,
            lambda: reflect(&self.lambda, &|v| v),
            u: reflect(&self.u, &|v| -v),
            h: reflect(&self.h, &|v| -v),
            p: reflect(&self.p, &|v| -v.conj()),
            a: reflect(&self.a, &|v| v.conj()),
            h_grad: self.h_grad.as_ref().map(|(hs, ht)| {
                (reflect(hs, &|v| -v), reflect(ht, &|v| v))
            }),
        }
    }

    /// `(H_s, H_t)`: closed form when available, central differences otherwise.
    pub fn mean_curvature_gradient(&self) -> (ScalarField, ScalarField) {
        match &self.h_grad {
            Some((hs, ht)) => (hs.clone(), ht.clone()),
            None => (partial(&self.h, Axis::S), partial(&self.h, Axis::T)),
        }
    }

    /// Largest modulus over the five data fields.
    pub fn magnitude(&self) -> f64 {
        [&self.lambda, &self.u, &self.h, &self.p, &self.a]
            .iter()
            .map(|f| f.max_abs())
            .fold(0.0, f64::max)
    }

    pub fn coupling(&self) -> f64 {
        self.space.coupling()
    }
}

pub fn residual_c1(d: &FundamentalField) -> ScalarField {
    let c = d.coupling();
    let rhs_inner = &d_z(&d.h) + &(&d.u * &d.a).scale(cx(c));
    let rhs = (&d.lambda * &rhs_inner).scale(cx(0.5));
    &d_zbar(&d.p) - &rhs
}

pub fn residual_c2(d: &FundamentalField) -> ScalarField {
    let tau = d.space.tau;
    let h_it = d.h.map(|h| h + Complex64::new(0.0, tau));
    let rhs = (&(&d.u * &d.lambda) * &h_it).scale(cx(0.5));
    &d_zbar(&d.a) - &rhs
}

pub fn residual_c3(d: &FundamentalField) -> ScalarField {
    let tau = d.space.tau;
    let h_mit = d.h.map(|h| h - Complex64::new(0.0, tau));
    let two_p_abar = (&d.p * &d.a.conj()).scale(cx(2.0));
    let second = two_p_abar.zip_with(&d.lambda, |x, l| x / l);
    &(&d_z(&d.u) + &(&h_mit * &d.a)) + &second
}

pub fn residual_c4(d: &FundamentalField) -> ScalarField {
    let g = d.grid;
    let mut values = Vec::with_capacity(g.len());
    for (i, j) in g.nodes() {
        let (a, l, u) = (d.a.get(i, j), d.lambda.re(i, j), d.u.re(i, j));
        values.push(cx(4.0 * a.norm_sqr() / l - (1.0 - u * u)));
    }
    ScalarField::new(g, values).unwrap_or_else(|_| {
        ScalarField::from_fn(g, |_, _| Complex64::new(f64::NAN, 0.0))
    })
}

pub fn residual_c0(d: &FundamentalField) -> ScalarField {
    let lz_over_l = d_z(&d.lambda).zip_with(&d.lambda, |dl, l| dl / l);
    &(&d_z(&d.a) - &(&lz_over_l * &d.a)) - &(&d.u * &d.p)
}

fn log_lambda_laplacian(d: &FundamentalField) -> ScalarField {
    let log_l = d.lambda.map(|l| cx(l.re.ln()));
    d_zbar(&d_z(&log_l))
}

pub fn gauss_residual(d: &FundamentalField) -> ScalarField {
    let c = d.coupling();
    let tau2 = d.space.tau * d.space.tau;
    let g = d.grid;
    let lap = log_lambda_laplacian(d);
    let mut algebraic = Vec::with_capacity(g.len());
    for (i, j) in g.nodes() {
        let (l, u, h, p) = (d.lambda.re(i, j), d.u.re(i, j), d.h.re(i, j), d.p.get(i, j));
        algebraic.push(cx(
            -2.0 * p.norm_sqr() / l + 0.5 * l * u * u * c + 0.5 * l * (h * h + tau2),
        ));
    }
    let algebraic = ScalarField::new(g, algebraic)
        .unwrap_or_else(|_| ScalarField::from_fn(g, |_, _| cx(f64::NAN)));
    &lap + &algebraic
}

/// Gauss curvature, tangent-projection coefficient and `det S`.
#[derive(Debug, Clone)]
pub struct DerivedQuantities {
    /// `K = −2 (log λ)_{zz̄} / λ`, valid on the two-ring interior.
    pub gauss_curvature: ScalarField,
    /// Coefficient `2Ā/λ` of `dz` in `T = (2/λ)(Ā dz + A dz̄)`.
    pub t_coeff: ScalarField,
    /// `H² − 4|p|²/λ²`.
    pub det_shape: ScalarField,
}

pub fn derived_quantities(d: &FundamentalField) -> DerivedQuantities {
    let lap = log_lambda_laplacian(d);
    let gauss_curvature = lap.zip_with(&d.lambda, |x, l| -2.0 * x / l);
    let t_coeff = d.a.zip_with(&d.lambda, |a, l| 2.0 * a.conj() / l);
    let hopf = d.p.zip_with(&d.lambda, |p, l| cx(4.0 * p.norm_sqr() / (l.re * l.re)));
    let det_shape = d.h.zip_with(&hopf, |h, q| cx(h.re * h.re) - q);
    DerivedQuantities {
        gauss_curvature,
        t_coeff,
        det_shape,
    }
}

/// Tolerances for `check_all`.
///
/// Derivative residuals get `first_order · h² · M` (or `second_order · h² · M`
/// for the Gauss equation), with `h` the largest grid step and `M` the largest
/// modulus among the fields entering that equation. `fixed`, when set,
/// replaces every tolerance (algebraic included) with one absolute number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub algebraic: f64,
    pub first_order: f64,
    pub second_order: f64,
    #[serde(default)]
    pub fixed: Option<f64>,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            algebraic: DEFAULT_ALGEBRAIC_TOL,
            first_order: 10.0,
            second_order: 100.0,
            fixed: None,
        }
    }
}

impl ToleranceProfile {
    pub fn uniform(tol: f64) -> Self {
        Self {
            fixed: Some(tol),
            ..Self::default()
        }
    }

    fn first(&self, h: f64, m: f64) -> f64 {
        self.fixed.unwrap_or(self.first_order * h * h * m)
    }

    fn second(&self, h: f64, m: f64) -> f64 {
        self.fixed.unwrap_or(self.second_order * h * h * m)
    }

    fn alg(&self) -> f64 {
        self.fixed.unwrap_or(self.algebraic)
    }
}

/// Norms of one residual against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationCheck {
    pub max: f64,
    pub l2: f64,
    pub tol: f64,
    pub pass: bool,
    /// Interior node attaining `max`.
    pub worst_node: Option<[usize; 2]>,
}

impl EquationCheck {
    pub fn evaluate(field: &ScalarField, tol: f64) -> Self {
        let ResidualNorm { max, l2 } = residual_norm(field);
        Self {
            max,
            l2,
            tol,
            pass: max <= tol,
            worst_node: field.argmax().map(|(i, j)| [i, j]),
        }
    }
}

/// Aggregated residual norms for the integrability system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema_version: u32,
    pub ds: f64,
    pub dt: f64,
    pub equations: BTreeMap<String, EquationCheck>,
    pub pass: bool,
    /// Extra checks appended by other modules (differentials, structure).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, EquationCheck>,
}

impl ResidualReport {
    pub fn failing(&self) -> Vec<&str> {
        self.equations
            .iter()
            .chain(&self.extras)
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&EquationCheck> {
        self.equations.get(name).or_else(|| self.extras.get(name))
    }

    pub fn push_extra(&mut self, name: impl Into<String>, check: EquationCheck) {
        self.pass &= check.pass;
        self.extras.insert(name.into(), check);
    }
}

pub fn check_all(d: &FundamentalField, tol: &ToleranceProfile) -> ResidualReport {
    let h = d.grid.step();
    let m = |fields: &[&ScalarField]| fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    let (l, u, hh, p, a) = (&d.lambda, &d.u, &d.h, &d.p, &d.a);

    let mut equations = BTreeMap::new();
    equations.insert(
        "c0".to_string(),
        EquationCheck::evaluate(&residual_c0(d), tol.first(h, m(&[a, l, u, p]))),
    );
    equations.insert(
        "c1".to_string(),
        EquationCheck::evaluate(&residual_c1(d), tol.first(h, m(&[p, l, hh, u, a]))),
    );
    equations.insert(
        "c2".to_string(),
        EquationCheck::evaluate(&residual_c2(d), tol.first(h, m(&[a, u, l, hh]))),
    );
    equations.insert(
        "c3".to_string(),
        EquationCheck::evaluate(&residual_c3(d), tol.first(h, m(&[u, hh, a, p, l]))),
    );
    equations.insert(
        "c4".to_string(),
        EquationCheck::evaluate(&residual_c4(d), tol.alg()),
    );
    equations.insert(
        "gauss".to_string(),
        EquationCheck::evaluate(&gauss_residual(d), tol.second(h, m(&[l, p, u, hh]))),
    );
    let pass = equations.values().all(|c| c.pass);
    ResidualReport {
        schema_version: SCHEMA_VERSION,
        ds: d.grid.ds,
        dt: d.grid.dt,
        equations,
        pass,
        extras: BTreeMap::new(),
    }
}
