//! Safeguarded Newton iteration on a sign-changing bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RootSettings {
    /// Target `|F(x)|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Root of `F` on `[lo, hi]`; `eval` returns `(F(x), F'(x))`.
///
/// Newton steps that leave the current bracket, or fail to halve it, are
/// replaced by bisection, so convergence never depends on the derivative.
pub fn newton_bisect<E>(eval: E, lo: f64, hi: f64, settings: &RootSettings) -> Result<f64>
where
    E: Fn(f64) -> (f64, f64),
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, _) = eval(a);
    let (fb, _) = eval(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Root(format!("non-finite value at bracket [{a}, {b}]")));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root(format!(
            "no sign change on [{a}, {b}] (F = {fa:e}, {fb:e})"
        )));
    }
    let mut x = 0.5 * (a + b);
    let mut last_width = b - a;
    let mut stalled = false;
    for _ in 0..settings.max_iter {
        let (fx, dfx) = eval(x);
        if !fx.is_finite() {
            return Err(Error::Root(format!("non-finite value at {x}")));
        }
        if fx.abs() <= settings.tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if b - a <= f64::EPSILON * x.abs().max(1.0) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let width = b - a;
        let use_newton = !stalled && dfx != 0.0 && newton > a && newton < b;
        stalled = width > 0.5 * last_width;
        last_width = width;
        x = if use_newton { newton } else { 0.5 * (a + b) };
    }
    Err(Error::Root(format!(
        "no convergence after {} iterations (bracket [{a}, {b}])",
        settings.max_iter
    )))
}

/// Solves `s + t·f(H) = g(H)` for `H` on `bracket`.
///
/// `g` and `f` return `(value, derivative)`.
pub fn solve_implicit_h<G, F>(
    g: G,
    f: F,
    s: f64,
    t: f64,
    bracket: (f64, f64),
    settings: &RootSettings,
) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
    F: Fn(f64) -> (f64, f64),
{
    newton_bisect(
        |h| {
            let (gv, gd) = g(h);
            let (fv, fd) = f(h);
            (s + t * fv - gv, t * fd - gd)
        },
        bracket.0,
        bracket.1,
        settings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_relation() {
        let h = solve_implicit_h(
            |h| (2.0 * h, 2.0),
            |_| (0.0, 0.0),
            1.0,
            0.3,
            (0.0, 2.0),
            &RootSettings::default(),
        )
        .unwrap();
        assert!((h - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_t_inverts_g() {
        let s = 0.8;
        let h = solve_implicit_h(
            |h| (h.sinh(), h.cosh()),
            |h| (h * h, 2.0 * h),
            s,
            0.0,
            (0.0, 3.0),
            &RootSettings::default(),
        )
        .unwrap();
        assert!((h - s.asinh()).abs() < 1e-12);
    }

    #[test]
    fn missing_sign_change() {
        let r = newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, &RootSettings::default());
        assert!(r.is_err());
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        // derivative deliberately wrong by a large factor
        let x = newton_bisect(|x| (x.powi(3) - 2.0, 1e-6), 0.0, 3.0, &RootSettings::default())
            .unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-10);
    }
}
