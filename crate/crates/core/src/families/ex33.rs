//! Candidate non-CMC surfaces with `Q dz² = dz²` in E(κ, τ), κ < 0, τ ≠ 0.
//!
//! Mean curvature is sought in the implicit form `s + t f(H) = g(H)` where
//! `f(x) = −x/τ ± √(1 + x²/τ²)` is a root of `τf² + 2xf − τ = 0`. Then
//! `H_s = 1/D`, `H_t = f(H) H_s` with `D = g'(H) − t f'(H)`, which makes the
//! first-order equation `τ(H_s² − H_t²) = 2H H_s H_t` hold identically. The
//! second-order equation, rewritten as `H_ss = a(H) H_s² + b(H)`, becomes the
//! ODE in `H`
//!
//! ```text
//! g'' = t f'' − a(H) D − b(H) D³
//! ```
//!
//! integrated separately for every grid row `t`. The remaining data follow
//! from `H` and `H_z`.
//!
//! The ODE depends on `t`, so the rows are not generally compatible with a
//! single `g`; [`Example33Output::structure_gap`] reports how far the
//! assembled patch is from the second-order equation and the integrability
//! residuals are the final judge.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ode::{integrate_two_sided, TwoSided};
use super::roots::{solve_implicit_h, RootSettings};
use crate::error::{Error, Result};
use crate::fundamental::{FundamentalField, DEFAULT_ALGEBRAIC_TOL};
use crate::grid::{partial, residual_norm, Axis, ConformalGrid, ScalarField};
use crate::space::SpaceParams;

/// Distance kept from `H = 0` and from `4H² + κ = 0`.
pub const BRACKET_MARGIN: f64 = 1e-6;

fn default_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Example33Params {
    pub kappa: f64,
    pub tau: f64,
    #[serde(default)]
    pub branch: Branch,
    /// Mean curvature at which the initial data for `g` are posed.
    #[serde(rename = "H0")]
    pub h0: f64,
    pub g0: f64,
    pub g_prime0: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub root: RootSettings,
}

impl Example33Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa < 0.0 && self.kappa.is_finite()) {
            return Err(Error::param("kappa", "must be negative"));
        }
        if self.tau == 0.0 || !self.tau.is_finite() {
            return Err(Error::param("tau", "must be finite and nonzero"));
        }
        if 4.0 * self.h0 * self.h0 + self.kappa >= 0.0 {
            return Err(Error::param("H0", format!("4 H0^2 + kappa = {} must be negative", 4.0 * self.h0 * self.h0 + self.kappa)));
        }
        if self.h0 == 0.0 {
            return Err(Error::param("H0", "must be nonzero"));
        }
        if self.g_prime0 == 0.0 || !self.g_prime0.is_finite() || !self.g0.is_finite() {
            return Err(Error::param("gPrime0", "g0 must be finite and gPrime0 finite and nonzero"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param("step", "must be positive"));
        }
        Ok(())
    }

    /// Admissible `H` interval on the side of `H0`.
    pub fn bracket(&self) -> (f64, f64) {
        let edge = (-self.kappa).sqrt() / 2.0 - BRACKET_MARGIN;
        if self.h0 > 0.0 {
            (BRACKET_MARGIN, edge)
        } else {
            (-edge, -BRACKET_MARGIN)
        }
    }

    /// `(f, f', f'')` at `x`.
    pub fn f(&self, x: f64) -> (f64, f64, f64) {
        let (tau, beta) = (self.tau, self.branch.sign());
        let q = (1.0 + x * x / (tau * tau)).sqrt();
        (
            -x / tau + beta * q,
            -1.0 / tau + beta * x / (tau * tau * q),
            beta / (tau * tau * q * q * q),
        )
    }

    /// Coefficients of `H_ss = a(H) H_s² + b(H)` implied by the second-order
    /// equation once `H_t = f(H) H_s`.
    pub fn ss_coefficients(&self, x: f64) -> (f64, f64) {
        let (kappa, tau) = (self.kappa, self.tau);
        let (f, fp, _) = self.f(x);
        let qq = x * x + tau * tau;
        let phi1 = 2.0 * x / qq;
        let phi2 = 2.0 * (tau * tau - x * x) / (qq * qq);
        let r = (1.0 - f * f) * x + 2.0 * f * tau;
        let e = 4.0 * x * x + kappa;
        let w = 1.0 + f * f;
        let a = (8.0 * x * x * w / (qq * e) - 2.0 * phi1 * f * fp - phi2 * w) / (phi1 * w);
        let b = (r * e / (w * qq)) / (phi1 * w);
        (a, b)
    }

    /// Right-hand side of the `g` equation for row `t`; state `[g, g']`.
    pub fn rhs(&self, t: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |x, y| {
            let (_, fp, fpp) = self.f(x);
            let (a, b) = self.ss_coefficients(x);
            let d = y[1] - t * fp;
            [y[1], t * fpp - a * d - b * d * d * d]
        }
    }

    /// Data `(λ, u, H, p, A)` from `H` and `H_z`.
    pub fn data_from(&self, h: f64, h_z: Complex64) -> [Complex64; 5] {
        let (kappa, tau) = (self.kappa, self.tau);
        let c = kappa - 4.0 * tau * tau;
        let u = ((4.0 * h * h + kappa) / c).sqrt();
        let a = u * (h * h + tau * tau) / (4.0 * h * h_z);
        let p = 0.5 * (1.0 + c * a * a / Complex64::new(h, tau));
        let lambda = -a.norm_sqr() * c / (h * h + tau * tau);
        [
            Complex64::new(lambda, 0.0),
            Complex64::new(u, 0.0),
            Complex64::new(h, 0.0),
            p,
            a,
        ]
    }
}

/// Per-row integration record.
#[derive(Debug, Clone, Serialize)]
pub struct RowSolve {
    pub t: f64,
    /// Maximal `H` interval over which `g` was integrated.
    pub h_interval: (f64, f64),
    pub stop_reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Example33Output {
    pub field: FundamentalField,
    pub rows: Vec<RowSolve>,
    /// Max over nodes of `|s + t f(H) − g(H)|`.
    pub implicit_residual: f64,
}

impl Example33Output {
    /// Max over interior nodes of `|H_ss − a H_s² − b|` with `H_ss` from
    /// central differences of the closed-form `H_s`.
    pub fn structure_gap(&self, params: &Example33Params) -> f64 {
        let d = &self.field;
        let Some((h_s, _)) = &d.h_grad else {
            return f64::NAN;
        };
        let h_ss = partial(h_s, Axis::S);
        let mut gap = ScalarField::constant(d.grid, Complex64::new(0.0, 0.0));
        for (i, j) in d.grid.nodes() {
            let (x, w) = (d.h.re(i, j), h_s.re(i, j));
            let (a, b) = params.ss_coefficients(x);
            gap.set(i, j, h_ss.get(i, j) - (a * w * w + b));
            if !h_ss.is_valid(i, j) {
                gap.invalidate(i, j);
            }
        }
        residual_norm(&gap).max
    }
}

fn solve_row(
    params: &Example33Params,
    t: f64,
    s_values: &[f64],
) -> Result<(Vec<(f64, f64)>, RowSolve, f64)> {
    let (lo, hi) = params.bracket();
    let (_, fp0, _) = params.f(params.h0);
    let d0 = params.g_prime0 - t * fp0;
    if d0 == 0.0 {
        return Err(Error::Integration {
            at: params.h0,
            reason: format!("g' - t f' vanishes at H0 for t = {t}"),
        });
    }
    let guard = |x: f64, y: &[f64; 2]| {
        let (_, fp, _) = params.f(x);
        let d = y[1] - t * fp;
        if d * d0 <= 0.0 {
            Err("g' - t f' crossed zero".to_string())
        } else if y[1] * params.g_prime0 <= 0.0 {
            Err("g' crossed zero".to_string())
        } else {
            Ok(())
        }
    };
    let traj: TwoSided<2> = integrate_two_sided(
        params.rhs(t),
        [params.g0, params.g_prime0],
        params.h0,
        (lo, hi),
        params.step,
        guard,
    )?;
    let interval = traj.interval();
    let record = RowSolve {
        t,
        h_interval: interval,
        stop_reason: traj.stop_reason().map(str::to_owned),
    };
    let g = |x: f64| {
        let (y, _) = traj.eval_with_derivative(x);
        (y[0], y[1])
    };
    let f = |x: f64| {
        let (v, d, _) = params.f(x);
        (v, d)
    };
    let mut out = Vec::with_capacity(s_values.len());
    let mut worst: f64 = 0.0;
    for &s in s_values {
        let h = solve_implicit_h(g, f, s, t, interval, &params.root).map_err(|e| {
            Error::Root(format!(
                "s = {s}, t = {t}: {e} (g integrated on H in [{}, {}])",
                interval.0, interval.1
            ))
        })?;
        let (gv, gp) = g(h);
        let (fv, fp) = f(h);
        worst = worst.max((s + t * fv - gv).abs());
        let h_s = 1.0 / (gp - t * fp);
        out.push((h, h_s));
    }
    Ok((out, record, worst))
}

pub fn gen_example33_detailed(params: &Example33Params, grid: ConformalGrid) -> Result<Example33Output> {
    params.validate()?;
    let space = SpaceParams::new(params.kappa, params.tau)?;
    let s_values: Vec<f64> = (0..grid.ns).map(|i| grid.s(i)).collect();
    let solved: Vec<_> = (0..grid.nt)
        .into_par_iter()
        .map(|j| solve_row(params, grid.t(j), &s_values))
        .collect::<Result<_>>()?;

    let mut cols: [Vec<Complex64>; 7] = Default::default();
    let mut rows = Vec::with_capacity(grid.nt);
    let mut implicit_residual: f64 = 0.0;
    for (j, (row, record, worst)) in solved.into_iter().enumerate() {
        implicit_residual = implicit_residual.max(worst);
        rows.push(record);
        for (i, &(h, h_s)) in row.iter().enumerate() {
            if 4.0 * h * h + params.kappa >= 0.0 {
                return Err(Error::InvalidData {
                    i,
                    j,
                    reason: format!("4H^2 + kappa >= 0 at H = {h}"),
                });
            }
            let (fv, _, _) = params.f(h);
            let h_t = fv * h_s;
            let h_z = 0.5 * Complex64::new(h_s, -h_t);
            for (k, v) in params.data_from(h, h_z).into_iter().enumerate() {
                cols[k].push(v);
            }
            cols[5].push(Complex64::new(h_s, 0.0));
            cols[6].push(Complex64::new(h_t, 0.0));
        }
    }
    let [l, u, h, p, a, hs, ht] = cols.map(|v| ScalarField::new(grid, v));
    let field = FundamentalField::new(space, grid, l?, u?, h?, p?, a?, DEFAULT_ALGEBRAIC_TOL)?
        .with_h_grad(hs?, ht?);
    Ok(Example33Output {
        field,
        rows,
        implicit_residual,
    })
}

pub fn gen_example33(params: &Example33Params, grid: ConformalGrid) -> Result<FundamentalField> {
    gen_example33_detailed(params, grid).map(|o| o.field)
}
