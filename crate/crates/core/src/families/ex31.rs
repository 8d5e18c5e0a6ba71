//! Rotational surfaces in M²(±1) × R with non-constant H and `P = HQ ≡ −1/4`.
//!
//! The height profile `h(s)` has
//!
//! ```text
//! h'(s) = −1/sinh(as + b)   (κ = −1),      h'(s) = 1/cosh(as + b)   (κ = 1),
//! ```
//!
//! both solutions of `y' = −a y √(1 − κy²)` on `as + b > 0`, and the data are
//! `λ = (1 + a²)h'²`, `H = −√(−κ + 1/h'²) / (2√(1 + a²))`, `p = −λH/2`,
//! `A = h'/2`, `u = sgn(h') a/√(1 + a²)`, with τ = 0.
//!
//! The sign factor on `u` matters only for κ = −1, where `h' < 0`: with
//! `u = a/√(1 + a²)` the `A_z̄` equation fails by a sign, while flipping `u`
//! (the reflection `z ↦ −z` of the fiber applied to the `A` coefficient)
//! makes the data integrable. `P` involves `u` only through `u²` and is
//! unaffected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::{FundamentalField, DEFAULT_ALGEBRAIC_TOL};
use crate::grid::{ConformalGrid, ScalarField};
use crate::space::SpaceParams;

/// Smallest admissible `as + b` on the grid.
pub const DOMAIN_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example31Params {
    /// Base curvature, ±1.
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
}

impl Example31Params {
    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1.0 && self.kappa != -1.0 {
            return Err(Error::param("kappa", format!("must be +1 or -1, got {}", self.kappa)));
        }
        if self.a == 0.0 || !self.a.is_finite() {
            return Err(Error::param("a", "must be finite and nonzero"));
        }
        if !self.b.is_finite() {
            return Err(Error::param("b", "must be finite"));
        }
        Ok(())
    }

    fn arg(&self, s: f64) -> f64 {
        self.a * s + self.b
    }

    /// `h'(s)`.
    pub fn slope(&self, s: f64) -> f64 {
        let x = self.arg(s);
        if self.kappa < 0.0 {
            -1.0 / x.sinh()
        } else {
            1.0 / x.cosh()
        }
    }

    /// `h(s) − h(s0)`.
    pub fn height(&self, s: f64, s0: f64) -> f64 {
        let prim = |s: f64| {
            let x = self.arg(s);
            if self.kappa < 0.0 {
                -(x / 2.0).tanh().ln() / self.a
            } else {
                2.0 * (x / 2.0).tanh().atan() / self.a
            }
        };
        prim(s) - prim(s0)
    }

    /// Residual of `y' + a y √(1 − κ y²) = 0` for the closed-form slope.
    pub fn ode_residual(&self, s: f64) -> f64 {
        let x = self.arg(s);
        let y = self.slope(s);
        let dy = if self.kappa < 0.0 {
            self.a * x.cosh() / (x.sinh() * x.sinh())
        } else {
            -self.a * x.sinh() / (x.cosh() * x.cosh())
        };
        dy + self.a * y * (1.0 - self.kappa * y * y).sqrt()
    }

    /// `(λ, u, H, p, A)` at parameter `s`; `p` and `A` are real.
    pub fn data_at(&self, s: f64) -> [f64; 5] {
        let y = self.slope(s);
        let c2 = 1.0 + self.a * self.a;
        let c = c2.sqrt();
        let lambda = c2 * y * y;
        let u = y.signum() * self.a / c;
        let h = -(-self.kappa + 1.0 / (y * y)).sqrt() / (2.0 * c);
        let p = -lambda * h / 2.0;
        [lambda, u, h, p, y / 2.0]
    }
}

pub fn gen_example31(params: &Example31Params, grid: ConformalGrid) -> Result<FundamentalField> {
    params.validate()?;
    for i in [0, grid.ns - 1] {
        let x = params.arg(grid.s(i));
        if x < DOMAIN_MARGIN {
            return Err(Error::InvalidData {
                i,
                j: 0,
                reason: format!("a*s + b = {x} below the domain margin {DOMAIN_MARGIN}"),
            });
        }
    }
    let space = SpaceParams::new(params.kappa, 0.0)?;
    let field = |k: usize| ScalarField::from_real_fn(grid, |s, _| params.data_at(s)[k]);
    FundamentalField::new(
        space,
        grid,
        field(0),
        field(1),
        field(2),
        field(3),
        field(4),
        DEFAULT_ALGEBRAIC_TOL,
    )
}
