//! Fixed-step classical Runge–Kutta with cubic Hermite dense output.

use crate::error::{Error, Result};

/// Sampled solution of `y' = f(x, y)` on a uniform mesh.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub dys: Vec<[f64; N]>,
    /// Why integration stopped before reaching the end of the range, if it did.
    pub stop_reason: Option<String>,
}

impl<const N: usize> Trajectory<N> {
    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    pub fn end(&self) -> f64 {
        *self.xs.last().expect("trajectory has at least one sample")
    }

    /// Closed interval covered by the samples, ordered.
    pub fn interval(&self) -> (f64, f64) {
        let (a, b) = (self.start(), self.end());
        (a.min(b), a.max(b))
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.interval();
        x >= lo && x <= hi
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        if n < 2 {
            return 0;
        }
        let h = self.xs[1] - self.xs[0];
        let k = ((x - self.xs[0]) / h).floor();
        (k.max(0.0) as usize).min(n - 2)
    }

    /// Cubic Hermite interpolant of the state and its derivative at `x`.
    pub fn eval_with_derivative(&self, x: f64) -> ([f64; N], [f64; N]) {
        if self.xs.len() == 1 {
            return (self.ys[0], self.dys[0]);
        }
        let k = self.segment(x);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let th = (x - x0) / h;
        let (h00, h10, h01, h11) = (
            2.0 * th.powi(3) - 3.0 * th * th + 1.0,
            th.powi(3) - 2.0 * th * th + th,
            -2.0 * th.powi(3) + 3.0 * th * th,
            th.powi(3) - th * th,
        );
        let (d00, d10, d01, d11) = (
            (6.0 * th * th - 6.0 * th) / h,
            3.0 * th * th - 4.0 * th + 1.0,
            (-6.0 * th * th + 6.0 * th) / h,
            3.0 * th * th - 2.0 * th,
        );
        let (y0, y1, f0, f1) = (self.ys[k], self.ys[k + 1], self.dys[k], self.dys[k + 1]);
        let mut y = [0.0; N];
        let mut dy = [0.0; N];
        for i in 0..N {
            y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
            dy[i] = d00 * y0[i] + d10 * f0[i] + d01 * y1[i] + d11 * f1[i];
        }
        (y, dy)
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        self.eval_with_derivative(x).0
    }
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// One classical RK4 step.
pub fn rk4_step<const N: usize, F>(rhs: &F, x: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(x, y);
    let k2 = rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(x + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Number of uniform steps of size at most `step` covering `span`.
fn step_count(span: f64, step: f64) -> usize {
    let n = span.abs() / step;
    let r = n.round();
    if (n - r).abs() < 1e-9 * n.max(1.0) {
        r.max(1.0) as usize
    } else {
        n.ceil().max(1.0) as usize
    }
}

/// Integrates from `range.0` to `range.1` (either direction), stopping early
/// when `guard` rejects a state. The rejection reason lands in `stop_reason`.
pub fn rk4_integrate_guarded<const N: usize, F, G>(
    rhs: F,
    y0: [f64; N],
    range: (f64, f64),
    step: f64,
    guard: G,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> std::result::Result<(), String>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let (a, b) = range;
    if let Err(reason) = guard(a, &y0) {
        return Err(Error::Integration { at: a, reason });
    }
    let d0 = rhs(a, &y0);
    if y0.iter().chain(&d0).any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            at: a,
            reason: "non-finite initial state".into(),
        });
    }
    let mut traj = Trajectory {
        xs: vec![a],
        ys: vec![y0],
        dys: vec![d0],
        stop_reason: None,
    };
    if a == b {
        return Ok(traj);
    }
    let n = step_count(b - a, step);
    let h = (b - a) / n as f64;
    let mut y = y0;
    for k in 0..n {
        let x = a + k as f64 * h;
        let x_next = if k + 1 == n { b } else { a + (k + 1) as f64 * h };
        let y_next = rk4_step(&rhs, x, &y, h);
        let d_next = rhs(x_next, &y_next);
        if y_next.iter().chain(&d_next).any(|v| !v.is_finite()) {
            traj.stop_reason = Some(format!("non-finite state at {x_next}"));
            break;
        }
        if let Err(reason) = guard(x_next, &y_next) {
            traj.stop_reason = Some(format!("{reason} at {x_next}"));
            break;
        }
        traj.xs.push(x_next);
        traj.ys.push(y_next);
        traj.dys.push(d_next);
        y = y_next;
    }
    Ok(traj)
}

/// Integrates over the whole range; any early stop is an error.
pub fn rk4_integrate<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    range: (f64, f64),
    step: f64,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let traj = rk4_integrate_guarded(rhs, y0, range, step, |_, _| Ok(()))?;
    match traj.stop_reason {
        Some(ref reason) => Err(Error::Integration {
            at: traj.end(),
            reason: reason.clone(),
        }),
        None => Ok(traj),
    }
}

/// Solution on `[lo, hi]` obtained by integrating both ways from `x0`.
#[derive(Debug, Clone)]
pub struct TwoSided<const N: usize> {
    pub backward: Trajectory<N>,
    pub forward: Trajectory<N>,
}

impl<const N: usize> TwoSided<N> {
    pub fn eval_with_derivative(&self, x: f64) -> ([f64; N], [f64; N]) {
        if x < self.forward.start() {
            self.backward.eval_with_derivative(x)
        } else {
            self.forward.eval_with_derivative(x)
        }
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        self.eval_with_derivative(x).0
    }

    pub fn interval(&self) -> (f64, f64) {
        let (a, _) = self.backward.interval();
        let (_, b) = self.forward.interval();
        (a, b)
    }

    pub fn stop_reason(&self) -> Option<&str> {
        self.forward
            .stop_reason
            .as_deref()
            .or(self.backward.stop_reason.as_deref())
    }
}

pub fn integrate_two_sided<const N: usize, F, G>(
    rhs: F,
    y0: [f64; N],
    x0: f64,
    (lo, hi): (f64, f64),
    step: f64,
    guard: G,
) -> Result<TwoSided<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> std::result::Result<(), String>,
{
    let backward = rk4_integrate_guarded(&rhs, y0, (x0, lo.min(x0)), step, &guard)?;
    let forward = rk4_integrate_guarded(&rhs, y0, (x0, hi.max(x0)), step, &guard)?;
    Ok(TwoSided { backward, forward })
}

/// Values of the solution through `(x0, y0)` at each of `nodes`, integrating
/// outwards from `x0` in both directions so that every node is hit exactly
/// by a step boundary (no interpolation error at the nodes).
///
/// Each sub-interval between consecutive nodes is split into steps of size at
/// most `step`. Any early stop is an error.
pub fn sample_at_nodes<const N: usize, F, G>(
    rhs: F,
    y0: [f64; N],
    x0: f64,
    nodes: &[f64],
    step: f64,
    guard: G,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(f64, &[f64; N]) -> std::result::Result<(), String>,
{
    let mut out = vec![[0.0; N]; nodes.len()];
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    let split = order.partition_point(|&k| nodes[k] < x0);
    let (below, above) = order.split_at(split);
    for path in [below.iter().rev().copied().collect::<Vec<_>>(), above.to_vec()] {
        let (mut x, mut y) = (x0, y0);
        for k in path {
            if nodes[k] != x {
                let traj = rk4_integrate_guarded(&rhs, y, (x, nodes[k]), step, &guard)?;
                if let Some(reason) = &traj.stop_reason {
                    return Err(Error::Integration {
                        at: traj.end(),
                        reason: reason.clone(),
                    });
                }
                x = nodes[k];
                y = *traj.ys.last().expect("non-empty trajectory");
            }
            out[k] = y;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_solution_is_exact() {
        let t = rk4_integrate(|_, _| [0.0], [1.0], (0.0, 2.0), 0.1).unwrap();
        assert!(t.ys.iter().all(|y| y[0] == 1.0));
        assert_eq!(t.eval(1.234)[0], 1.0);
    }

    #[test]
    fn exponential_growth() {
        let t = rk4_integrate(|_, y| [y[0]], [1.0], (0.0, 1.0), 1e-3).unwrap();
        assert!((t.end() - 1.0).abs() < 1e-15);
        let err = (t.ys.last().unwrap()[0] - std::f64::consts::E).abs();
        assert!(err < 1e-12, "{err}");
        // dense output between the mesh points
        let mid = t.eval(0.50051)[0];
        assert!((mid - 0.50051f64.exp()).abs() < 1e-12);
        let (_, d) = t.eval_with_derivative(0.3337);
        assert!((d[0] - 0.3337f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn backwards_integration() {
        let t = rk4_integrate(|_, y| [y[0]], [1.0], (0.0, -1.0), 1e-3).unwrap();
        assert!((t.ys.last().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-12);
        assert!((t.eval(-0.25)[0] - (-0.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn sech_profile_from_autonomous_ode() {
        // y' = −a y √(1 − κ y²) with κ = a = 1 and y(0) = 1: the square root is
        // not Lipschitz at y = 1, where y ≡ 1 is a spurious equilibrium.
        let first_order = rk4_integrate(
            |_, y| [-y[0] * (1.0 - y[0] * y[0]).max(0.0).sqrt()],
            [1.0],
            (0.0, 1.0),
            1e-3,
        )
        .unwrap();
        assert_eq!(first_order.ys.last().unwrap()[0], 1.0);

        // Differentiating once gives the smooth form y'' = a² y (1 − 2κ y²),
        // whose solution through (1, 0) is the closed form 1/cosh(s).
        let t = rk4_integrate(
            |_, y| [y[1], y[0] * (1.0 - 2.0 * y[0] * y[0])],
            [1.0, 0.0],
            (0.0, 1.0),
            1e-3,
        )
        .unwrap();
        let err = (t.ys.last().unwrap()[0] - 1.0 / 1.0f64.cosh()).abs();
        assert!(err < 1e-10, "{err}");

        // Away from the equilibrium the first-order form is fine.
        let s0: f64 = 0.2;
        let t = rk4_integrate(
            |_, y| [-y[0] * (1.0 - y[0] * y[0]).max(0.0).sqrt()],
            [1.0 / s0.cosh()],
            (s0, 1.0),
            1e-3,
        )
        .unwrap();
        let err = (t.ys.last().unwrap()[0] - 1.0 / 1.0f64.cosh()).abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn node_sampling_hits_nodes_exactly() {
        let nodes = [0.3, -0.25, 0.0, 0.1, -0.5];
        let ys = sample_at_nodes(|_, y| [y[0]], [1.0], 0.05, &nodes, 1e-3, |_, _| Ok(())).unwrap();
        for (x, y) in nodes.iter().zip(&ys) {
            assert!((y[0] - (x - 0.05f64).exp()).abs() < 1e-13, "{x}");
        }
        let r = sample_at_nodes(|_, _| [1.0], [0.0], 0.0, &[1.0], 0.1, |_, y| {
            if y[0] < 0.5 { Ok(()) } else { Err("stop".into()) }
        });
        assert!(r.is_err());
    }

    #[test]
    fn guard_stops_integration() {
        let t = rk4_integrate_guarded(
            |_, _| [1.0],
            [0.0],
            (0.0, 1.0),
            0.1,
            |_, y| if y[0] < 0.55 { Ok(()) } else { Err("too big".into()) },
        )
        .unwrap();
        assert!((t.end() - 0.5).abs() < 1e-12);
        assert!(t.stop_reason.unwrap().contains("too big"));
        assert!(rk4_integrate(|_, y| [y[0] * y[0]], [1.0], (0.0, 2.0), 0.01).is_err());
    }
}
