use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundamental::{FundamentalField, DEFAULT_ALGEBRAIC_TOL};
use crate::grid::{ConformalGrid, ScalarField};
use crate::space::SpaceParams;

/// Constant data `λ = 1, u = 0, H = c, p = −(c − iτ)/2, A = 1/2`.
///
/// Solves the integrability system identically for every (κ, τ); the
/// realized surface is a vertical cylinder over a curve of constant
/// geodesic curvature in the base.
pub fn gen_cmc_control(space: &SpaceParams, c: f64, grid: ConformalGrid) -> Result<FundamentalField> {
    if !c.is_finite() {
        return Err(Error::param("c", "must be finite"));
    }
    if space.tau == 0.0 && c == 0.0 {
        return Err(Error::param("c", "minimal control (c = 0) is excluded when tau = 0"));
    }
    let k = |v: Complex64| ScalarField::constant(grid, v);
    let r = |v: f64| k(Complex64::new(v, 0.0));
    FundamentalField::new(
        *space,
        grid,
        r(1.0),
        r(0.0),
        r(c),
        k(-0.5 * Complex64::new(c, -space.tau)),
        r(0.5),
        DEFAULT_ALGEBRAIC_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{check_all, residual_c4, ToleranceProfile};
    use crate::grid::residual_norm;

    #[test]
    fn control_examples() {
        let g = ConformalGrid::new(0.0, 0.0, 0.1, 0.1, 6, 6).unwrap();
        let space = SpaceParams::new(-1.0, 0.5).unwrap();
        let d = gen_cmc_control(&space, 0.3, g).unwrap();
        let report = check_all(&d, &ToleranceProfile::default());
        assert!(report.pass);
        assert!(report.equations.values().all(|e| e.max <= 1e-12));
        assert_eq!(residual_norm(&residual_c4(&d)).max, 0.0);

        let h2 = SpaceParams::new(-1.0, 0.0).unwrap();
        assert!(gen_cmc_control(&h2, 0.0, g).is_err());
        // τ ≠ 0 admits the minimal control
        assert!(gen_cmc_control(&space, 0.0, g).is_ok());
    }
}
