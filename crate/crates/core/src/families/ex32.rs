//! Surfaces in H² × R with `Q dz² = dz²` built from a solution of
//! `α'' = α'² cot α − δ cos α`.
//!
//! With `r` the real part of `z` for δ = 1 and the imaginary part for
//! δ = −1, the data are `λ = 1/α'²`, `H = sin α / 2`, `u = cos α`,
//! `p = 1/2 − δ sin α / (4α'²)` and `A = √δ sin α / (2α')` (`√−1 = i`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::sample_at_nodes;
use crate::error::{Error, Result};
use crate::fundamental::{FundamentalField, DEFAULT_ALGEBRAIC_TOL};
use crate::grid::{ConformalGrid, ScalarField};
use crate::space::SpaceParams;

fn default_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Example32Params {
    /// ±1.
    pub delta: i32,
    /// `α(0)`, in (0, π).
    pub alpha0: f64,
    /// `α'(0)`, nonzero.
    pub alpha_prime0: f64,
    /// Upper bound on the RK4 step.
    #[serde(default = "default_step")]
    pub step: f64,
}

impl Example32Params {
    pub fn new(delta: i32, alpha0: f64, alpha_prime0: f64) -> Self {
        Self {
            delta,
            alpha0,
            alpha_prime0,
            step: default_step(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta != 1 && self.delta != -1 {
            return Err(Error::param("delta", format!("must be +1 or -1, got {}", self.delta)));
        }
        if !(self.alpha0 > 0.0 && self.alpha0 < std::f64::consts::PI) {
            return Err(Error::param("alpha0", format!("{} is outside (0, pi)", self.alpha0)));
        }
        if self.alpha_prime0 == 0.0 || !self.alpha_prime0.is_finite() {
            return Err(Error::param("alphaPrime0", "must be finite and nonzero (lambda = 1/alpha'^2)"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param("step", "must be positive"));
        }
        Ok(())
    }

    pub fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
        let delta = self.delta as f64;
        move |_, y| [y[1], y[1] * y[1] / y[0].tan() - delta * y[0].cos()]
    }

    fn guard(&self) -> impl Fn(f64, &[f64; 2]) -> std::result::Result<(), String> {
        let sign = self.alpha_prime0.signum();
        move |_, y: &[f64; 2]| {
            if !(y[0] > 0.0 && y[0] < std::f64::consts::PI) {
                Err(format!("alpha = {} left (0, pi)", y[0]))
            } else if y[1] * sign <= 0.0 {
                Err("alpha' crossed zero".to_string())
            } else {
                Ok(())
            }
        }
    }

    /// `(λ, u, H, p, A)` from `(α, α')`.
    pub fn data_from_state(&self, alpha: f64, alpha_prime: f64) -> [Complex64; 5] {
        let delta = self.delta as f64;
        let (sin, cos) = alpha.sin_cos();
        let ap2 = alpha_prime * alpha_prime;
        let root_delta = if self.delta > 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::i()
        };
        [
            Complex64::new(1.0 / ap2, 0.0),
            Complex64::new(cos, 0.0),
            Complex64::new(sin / 2.0, 0.0),
            Complex64::new(0.5 - delta * sin / (4.0 * ap2), 0.0),
            root_delta * (sin / (2.0 * alpha_prime)),
        ]
    }
}

pub fn gen_example32(params: &Example32Params, grid: ConformalGrid) -> Result<FundamentalField> {
    params.validate()?;
    let along_s = params.delta > 0;
    let nodes: Vec<f64> = if along_s {
        (0..grid.ns).map(|i| grid.s(i)).collect()
    } else {
        (0..grid.nt).map(|j| grid.t(j)).collect()
    };
    let states = sample_at_nodes(
        params.rhs(),
        [params.alpha0, params.alpha_prime0],
        0.0,
        &nodes,
        params.step,
        params.guard(),
    )?;
    let rows: Vec<[Complex64; 5]> = states
        .iter()
        .map(|y| params.data_from_state(y[0], y[1]))
        .collect();
    let field = |k: usize| {
        let values = grid
            .nodes()
            .map(|(i, j)| rows[if along_s { i } else { j }][k])
            .collect();
        ScalarField::new(grid, values)
    };
    FundamentalField::new(
        SpaceParams::new(-1.0, 0.0)?,
        grid,
        field(0)?,
        field(1)?,
        field(2)?,
        field(3)?,
        field(4)?,
        DEFAULT_ALGEBRAIC_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn data_at_origin() {
        let p = Example32Params::new(1, FRAC_PI_2, 1.0);
        let [l, u, h, hopf, a] = p.data_from_state(FRAC_PI_2, 1.0);
        assert_eq!(l.re, 1.0);
        assert!(u.re.abs() < 1e-16);
        assert_eq!(h.re, 0.5);
        assert_eq!(hopf.re, 0.25);
        assert_eq!(a, Complex64::new(0.5, 0.0));
        // Q = 2p − (κ − 4τ²)A²/(H + iτ) with κ = −1, τ = 0
        let q = 2.0 * hopf + a * a / h;
        assert!((q - 1.0).norm() < 1e-15);
        assert!((4.0 * a.norm_sqr() / l.re - (1.0 - u.re * u.re)).abs() < 1e-15);

        let m = Example32Params::new(-1, FRAC_PI_2, 1.0);
        let [_, _, h, hopf, a] = m.data_from_state(FRAC_PI_2, 1.0);
        assert_eq!(a, Complex64::new(0.0, 0.5));
        let q = 2.0 * hopf + a * a / h;
        assert!((q - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_initial_data() {
        assert!(Example32Params::new(1, FRAC_PI_2, 0.0).validate().is_err());
        assert!(Example32Params::new(1, 0.0, 1.0).validate().is_err());
        assert!(Example32Params::new(2, 1.0, 1.0).validate().is_err());
    }

    #[test]
    fn fields_depend_on_the_right_coordinate() {
        let g = ConformalGrid::new(-0.05, 0.0, 0.01, 0.01, 11, 7).unwrap();
        let d = gen_example32(&Example32Params::new(1, FRAC_PI_2 + 0.2, 1.0), g).unwrap();
        assert_eq!(d.h.re(3, 0), d.h.re(3, 6));
        assert_ne!(d.h.re(2, 0), d.h.re(3, 0));
        assert!(d.a.is_real(0.0));
        let g = ConformalGrid::new(0.0, -0.05, 0.01, 0.01, 7, 11).unwrap();
        let d = gen_example32(&Example32Params::new(-1, FRAC_PI_2 + 0.2, 1.0), g).unwrap();
        assert_eq!(d.h.re(0, 3), d.h.re(6, 3));
        assert!(d.a.values().iter().all(|a| a.re == 0.0));
    }

    #[test]
    fn integration_halts_when_alpha_prime_vanishes() {
        // α' decays quickly when α'(0) is small against δ cos α
        let g = ConformalGrid::new(0.0, 0.0, 0.5, 0.5, 40, 5).unwrap();
        let r = gen_example32(&Example32Params::new(1, 1.0, 0.05), g);
        assert!(matches!(r, Err(Error::Integration { .. })), "{r:?}");
    }
}
