//! Uniform conformal grids and finite-difference Wirtinger calculus.
//!
//! Node `(i, j)` sits at `z = (s0 + i·ds) + i·(t0 + j·dt)`; values are stored
//! row-major with `t` rows, so the flat index is `j·ns + i`. Every field
//! carries a validity mask: a central difference is valid only where both
//! neighbours are valid, so each derivative shrinks the valid region by one
//! ring. Norms never count the outer boundary ring.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalGrid {
    pub s0: f64,
    pub t0: f64,
    pub ds: f64,
    pub dt: f64,
    pub ns: usize,
    pub nt: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    s0: f64,
    t0: f64,
    ds: f64,
    dt: f64,
    ns: usize,
    nt: usize,
}

impl<'de> Deserialize<'de> for ConformalGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RawGrid::deserialize(d)?;
        ConformalGrid::new(r.s0, r.t0, r.ds, r.dt, r.ns, r.nt).map_err(serde::de::Error::custom)
    }
}

impl ConformalGrid {
    pub fn new(s0: f64, t0: f64, ds: f64, dt: f64, ns: usize, nt: usize) -> Result<Self> {
        if !(ds > 0.0 && dt > 0.0 && ds.is_finite() && dt.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "steps must be positive (ds = {ds}, dt = {dt})"
            )));
        }
        if !(s0.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if ns < MIN_NODES || nt < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes per axis (ns = {ns}, nt = {nt})"
            )));
        }
        Ok(Self {
            s0,
            t0,
            ds,
            dt,
            ns,
            nt,
        })
    }

    /// Grid covering `[s0, s1] × [t0, t1]` with `ns × nt` nodes.
    pub fn spanning(s0: f64, s1: f64, t0: f64, t1: f64, ns: usize, nt: usize) -> Result<Self> {
        if ns < 2 || nt < 2 {
            return Err(Error::InvalidGrid("need at least two nodes per axis".into()));
        }
        Self::new(
            s0,
            t0,
            (s1 - s0) / (ns - 1) as f64,
            (t1 - t0) / (nt - 1) as f64,
            ns,
            nt,
        )
    }

    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.ns + i
    }

    #[inline]
    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.ds
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.s(i), self.t(j))
    }

    /// Largest step, the `h` in truncation estimates.
    pub fn step(&self) -> f64 {
        self.ds.max(self.dt)
    }

    /// Same rectangle, steps halved.
    pub fn refined(&self) -> Self {
        Self {
            ds: self.ds / 2.0,
            dt: self.dt / 2.0,
            ns: 2 * self.ns - 1,
            nt: 2 * self.nt - 1,
            ..*self
        }
    }

    /// Every `stride`-th node along both axes, starting at the origin.
    /// Every `stride`-th node; both node counts minus one must divide evenly.
    pub fn subsampled(&self, stride: usize) -> Result<Self> {
        if stride == 0 || (self.ns - 1) % stride != 0 || (self.nt - 1) % stride != 0 {
            return Err(Error::InvalidGrid(format!(
                "stride {stride} does not divide the {}x{} node layout",
                self.ns, self.nt
            )));
        }
        Self::new(
            self.s0,
            self.t0,
            self.ds * stride as f64,
            self.dt * stride as f64,
            (self.ns - 1) / stride + 1,
            (self.nt - 1) / stride + 1,
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nt).flat_map(move |j| (0..self.ns).map(move |i| (i, j)))
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.ns || j + 1 == self.nt
    }
}

/// Max and root-mean-square modulus over counted nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualNorm {
    pub max: f64,
    pub l2: f64,
}

/// A real or complex value per grid node, plus a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: ConformalGrid,
    values: Vec<Complex64>,
    valid: Vec<bool>,
}

impl ScalarField {
    pub fn new(grid: ConformalGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.ns,
                grid.nt
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidData {
                i: k % grid.ns,
                j: k / grid.ns,
                reason: "non-finite value".into(),
            });
        }
        Ok(Self {
            grid,
            valid: vec![true; values.len()],
            values,
        })
    }

    pub fn from_real(grid: ConformalGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(s, t)` at every node. Non-finite samples are marked invalid.
    pub fn from_fn(grid: ConformalGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut valid = Vec::with_capacity(grid.len());
        for (i, j) in grid.nodes() {
            let v = f(grid.s(i), grid.t(j));
            let ok = v.re.is_finite() && v.im.is_finite();
            values.push(if ok { v } else { Complex64::new(0.0, 0.0) });
            valid.push(ok);
        }
        Self {
            grid,
            values,
            valid,
        }
    }

    /// Evaluates `f(i, j)` at every node; `None` or non-finite marks the node invalid.
    pub fn from_nodes(grid: ConformalGrid, f: impl Fn(usize, usize) -> Option<Complex64>) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut valid = Vec::with_capacity(grid.len());
        for (i, j) in grid.nodes() {
            match f(i, j) {
                Some(v) if v.re.is_finite() && v.im.is_finite() => {
                    values.push(v);
                    valid.push(true);
                }
                _ => {
                    values.push(Complex64::new(0.0, 0.0));
                    valid.push(false);
                }
            }
        }
        Self {
            grid,
            values,
            valid,
        }
    }

    pub fn from_real_fn(grid: ConformalGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |s, t| Complex64::new(f(s, t), 0.0))
    }

    pub fn constant(grid: ConformalGrid, c: Complex64) -> Self {
        Self::from_fn(grid, |_, _| c)
    }

    pub fn subsampled(&self, stride: usize) -> Result<Self> {
        let g = self.grid.subsampled(stride)?;
        Ok(Self::from_nodes(g, |i, j| {
            let (a, b) = (i * stride, j * stride);
            self.is_valid(a, b).then(|| self.get(a, b))
        }))
    }

    pub fn grid(&self) -> &ConformalGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn re(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).re
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn invalidate(&mut self, i: usize, j: usize) {
        let k = self.grid.index(i, j);
        self.valid[k] = false;
        self.values[k] = Complex64::new(0.0, 0.0);
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// True when every imaginary part is below `tol` in modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut valid = self.valid.clone();
        let values = self
            .values
            .iter()
            .zip(valid.iter_mut())
            .map(|(v, ok)| {
                let r = f(*v);
                if !(r.re.is_finite() && r.im.is_finite()) {
                    *ok = false;
                    Complex64::new(0.0, 0.0)
                } else {
                    r
                }
            })
            .collect();
        Self {
            grid: self.grid,
            values,
            valid,
        }
    }

    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(|v| Complex64::new(f(v.re), 0.0))
    }

    /// Node-wise combination; the result is valid where both inputs are.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let mut valid: Vec<bool> = self
            .valid
            .iter()
            .zip(&other.valid)
            .map(|(a, b)| *a && *b)
            .collect();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .zip(valid.iter_mut())
            .map(|((a, b), ok)| {
                let r = f(*a, *b);
                if !(r.re.is_finite() && r.im.is_finite()) {
                    *ok = false;
                    Complex64::new(0.0, 0.0)
                } else {
                    r
                }
            })
            .collect();
        Self {
            grid: self.grid,
            values,
            valid,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn restrict(&self, mask: &[bool]) -> Self {
        let mut out = self.clone();
        for (v, m) in out.valid.iter_mut().zip(mask) {
            *v = *v && *m;
        }
        out
    }

    /// Keeps only nodes at least `ring` nodes away from the boundary.
    pub fn restrict_interior(&self, ring: usize) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for (i, j) in g.nodes() {
            if i < ring || j < ring || i + ring >= g.ns || j + ring >= g.nt {
                out.valid[g.index(i, j)] = false;
            }
        }
        out
    }

    /// Largest modulus over valid nodes, boundary ring included.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Mean of the real part over valid nodes.
    pub fn mean_re(&self) -> f64 {
        let (sum, n) = self
            .values
            .iter()
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .fold((0.0, 0usize), |(s, n), (v, _)| (s + v.re, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Node with the largest modulus among counted nodes.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let g = self.grid;
        g.nodes()
            .filter(|&(i, j)| !g.is_boundary(i, j) && self.is_valid(i, j))
            .max_by(|a, b| {
                self.get(a.0, a.1)
                    .norm()
                    .total_cmp(&self.get(b.0, b.1).norm())
            })
    }

    /// Interior samples (valid, off the boundary ring) as `(i, j, value)`.
    pub fn counted(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.grid
            .nodes()
            .filter(move |&(i, j)| !self.grid.is_boundary(i, j) && self.is_valid(i, j))
            .map(move |(i, j)| (i, j, self.get(i, j)))
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}

field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Max and RMS modulus over valid interior nodes (boundary ring excluded).
pub fn residual_norm(field: &ScalarField) -> ResidualNorm {
    let mut max: f64 = 0.0;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (_, _, v) in field.counted() {
        let m = v.norm();
        max = max.max(m);
        sum += m * m;
        n += 1;
    }
    ResidualNorm {
        max,
        l2: if n == 0 { 0.0 } else { (sum / n as f64).sqrt() },
    }
}

/// Direction of a partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    S,
    T,
}

/// Second-order central difference along `axis`.
pub fn partial(field: &ScalarField, axis: Axis) -> ScalarField {
    let g = *field.grid();
    let (h, di, dj) = match axis {
        Axis::S => (g.ds, 1usize, 0usize),
        Axis::T => (g.dt, 0, 1),
    };
    let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut valid = vec![false; g.len()];
    for j in dj..g.nt - dj {
        for i in di..g.ns - di {
            let (ip, jp, im, jm) = (i + di, j + dj, i - di, j - dj);
            if field.is_valid(ip, jp) && field.is_valid(im, jm) {
                let k = g.index(i, j);
                values[k] = (field.get(ip, jp) - field.get(im, jm)) / (2.0 * h);
                valid[k] = true;
            }
        }
    }
    ScalarField {
        grid: g,
        values,
        valid,
    }
}

/// `∂_z = (∂_s − i∂_t)/2`.
pub fn d_z(field: &ScalarField) -> ScalarField {
    let fs = partial(field, Axis::S);
    let ft = partial(field, Axis::T);
    fs.zip_with(&ft, |a, b| 0.5 * (a - Complex64::i() * b))
}

/// `∂_z̄ = (∂_s + i∂_t)/2`.
pub fn d_zbar(field: &ScalarField) -> ScalarField {
    let fs = partial(field, Axis::S);
    let ft = partial(field, Axis::T);
    fs.zip_with(&ft, |a, b| 0.5 * (a + Complex64::i() * b))
}

/// Fourth-order derivative along `axis` on every node, using one-sided
/// five-point stencils near the edges. Ignores the validity mask of the input
/// beyond requiring it to be fully valid along the stencil.
pub fn partial_order4(field: &ScalarField, axis: Axis) -> ScalarField {
    let g = *field.grid();
    let (h, n) = match axis {
        Axis::S => (g.ds, g.ns),
        Axis::T => (g.dt, g.nt),
    };
    let at = |a: usize, line: usize| match axis {
        Axis::S => field.get(a, line),
        Axis::T => field.get(line, a),
    };
    let ok_at = |a: usize, line: usize| match axis {
        Axis::S => field.is_valid(a, line),
        Axis::T => field.is_valid(line, a),
    };
    let lines = match axis {
        Axis::S => g.nt,
        Axis::T => g.ns,
    };
    let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut valid = vec![false; g.len()];
    for line in 0..lines {
        for a in 0..n {
            let (start, w): (usize, [f64; 5]) = if a < 2 {
                if a == 0 {
                    (0, [-25.0, 48.0, -36.0, 16.0, -3.0])
                } else {
                    (0, [-3.0, -10.0, 18.0, -6.0, 1.0])
                }
            } else if a + 2 >= n {
                if a + 1 == n {
                    (n - 5, [3.0, -16.0, 36.0, -48.0, 25.0])
                } else {
                    (n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0])
                }
            } else {
                (a - 2, [1.0, -8.0, 0.0, 8.0, -1.0])
            };
            let ok = (start..start + 5).all(|b| ok_at(b, line));
            let mut acc = Complex64::new(0.0, 0.0);
            for (q, wq) in w.iter().enumerate() {
                acc += at(start + q, line) * *wq;
            }
            let k = match axis {
                Axis::S => g.index(a, line),
                Axis::T => g.index(line, a),
            };
            values[k] = acc / (12.0 * h);
            valid[k] = ok;
        }
    }
    ScalarField {
        grid: g,
        values,
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_grid(h: f64) -> ConformalGrid {
        let n = (1.0 / h).round() as usize + 1;
        ConformalGrid::new(0.0, 0.0, h, h, n, n).unwrap()
    }

    fn max_err(a: &ScalarField, exact: impl Fn(Complex64) -> Complex64) -> f64 {
        let g = *a.grid();
        a.counted()
            .map(|(i, j, v)| (v - exact(g.z(i, j))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn grid_validation() {
        assert!(ConformalGrid::new(0.0, 0.0, 0.0, 1.0, 5, 5).is_err());
        assert!(ConformalGrid::new(0.0, 0.0, 1.0, 1.0, 4, 5).is_err());
        assert!(serde_json::from_str::<ConformalGrid>(
            r#"{"s0":0,"t0":0,"ds":-1,"dt":1,"ns":5,"nt":5}"#
        )
        .is_err());
    }

    #[test]
    fn derivative_examples() {
        let g = unit_grid(1e-2);
        let constant = ScalarField::constant(g, c(2.0, -1.0));
        assert_eq!(residual_norm(&d_z(&constant)).max, 0.0);

        let z = ScalarField::from_fn(g, |s, t| c(s, t));
        assert!(max_err(&d_z(&z), |_| c(1.0, 0.0)) < 1e-12);
        assert!(residual_norm(&d_zbar(&z)).max < 1e-12);

        let zbar = ScalarField::from_fn(g, |s, t| c(s, -t));
        assert!(max_err(&d_zbar(&zbar), |_| c(1.0, 0.0)) < 1e-12);

        let z2 = ScalarField::from_fn(g, |s, t| c(s, t) * c(s, t));
        assert!(max_err(&d_z(&z2), |z| 2.0 * z) <= 1e-12);

        let modsq = ScalarField::from_fn(g, |s, t| c(s * s + t * t, 0.0));
        assert!(max_err(&d_zbar(&modsq), |z| z) <= 1e-12);
    }

    #[test]
    fn boundary_is_invalid_after_differentiation() {
        let g = unit_grid(0.25);
        let f = ScalarField::from_fn(g, |s, t| c(s, t));
        let d = d_z(&f);
        assert!(!d.is_valid(0, 2));
        assert!(!d.is_valid(2, 4));
        assert!(d.is_valid(1, 1));
        let dd = d_zbar(&d);
        assert!(!dd.is_valid(1, 2));
        assert!(dd.is_valid(2, 2));
    }

    #[test]
    fn norm_examples() {
        let g = ConformalGrid::new(0.0, 0.0, 1.0, 1.0, 5, 5).unwrap();
        let zero = ScalarField::constant(g, c(0.0, 0.0));
        assert_eq!(residual_norm(&zero), ResidualNorm { max: 0.0, l2: 0.0 });

        let mut spike = zero.clone();
        spike.set(2, 2, c(3.0, 0.0));
        let n = residual_norm(&spike);
        assert_eq!(n.max, 3.0);
        assert!((n.l2 - 1.0).abs() < 1e-15);

        let i = ScalarField::constant(g, c(0.0, 1.0));
        assert_eq!(residual_norm(&i), ResidualNorm { max: 1.0, l2: 1.0 });
    }

    #[test]
    fn holomorphic_quadratics_have_vanishing_zbar_derivative() {
        let g = unit_grid(1e-2);
        let f = ScalarField::from_fn(g, |s, t| {
            let z = c(s, t);
            c(0.5, -1.0) + z * c(2.0, 0.3) - z * z * c(0.1, 1.0)
        });
        assert!(residual_norm(&d_zbar(&f)).max <= 1e-10);
    }

    #[test]
    fn zbar_error_on_holomorphic_cubic_is_the_leading_term() {
        // The h² terms of ∂_s and ∂_t add up in ∂_z̄ on holomorphic f,
        // leaving h² f'''/6 (they cancel in ∂_z instead).
        let h = 1e-2;
        let g = unit_grid(h);
        let k = c(-1.5, 0.25);
        let f = ScalarField::from_fn(g, |s, t| {
            let z = c(s, t);
            z * c(2.0, 0.3) + z * z * z * k
        });
        let expected = h * h * k;
        assert!(d_zbar(&f).counted().all(|(_, _, v)| (v - expected).norm() < 1e-10));
        assert!(max_err(&d_z(&f), |z| c(2.0, 0.3) + 3.0 * k * z * z) < 1e-10);
    }

    #[test]
    fn second_order_convergence() {
        let err = |h: f64| {
            let g = unit_grid(h);
            let f = ScalarField::from_fn(g, |s, t| c(s.exp() * (2.0 * t).cos(), s * t * t));
            max_err(&d_z(&f), |z| {
                let (s, t) = (z.re, z.im);
                0.5 * (c(s.exp() * (2.0 * t).cos(), t * t)
                    - c(0.0, 1.0) * c(-2.0 * s.exp() * (2.0 * t).sin(), 2.0 * s * t))
            })
        };
        let ratio = err(2e-2) / err(1e-2);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn holomorphic_exponential_converges_at_fourth_order_in_z() {
        let err = |h: f64| {
            let g = unit_grid(h);
            let f = ScalarField::from_fn(g, |s, t| c(s, t).exp());
            max_err(&d_z(&f), |z| z.exp())
        };
        let ratio = err(2e-2) / err(1e-2);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn order4_stencils() {
        let g = ConformalGrid::new(0.0, 0.0, 0.05, 0.05, 21, 11).unwrap();
        let f = ScalarField::from_fn(g, |s, t| c(s.sin() * t.exp(), s * t));
        let fs = partial_order4(&f, Axis::S);
        let ft = partial_order4(&f, Axis::T);
        let mut es: f64 = 0.0;
        let mut et: f64 = 0.0;
        for (i, j) in g.nodes() {
            let (s, t) = (g.s(i), g.t(j));
            es = es.max((fs.get(i, j) - c(s.cos() * t.exp(), t)).norm());
            et = et.max((ft.get(i, j) - c(s.sin() * t.exp(), s)).norm());
            assert!(fs.is_valid(i, j) && ft.is_valid(i, j));
        }
        assert!(es < 1e-5 && et < 1e-5, "{es} {et}");
    }

    fn arb_field(g: ConformalGrid) -> impl Strategy<Value = ScalarField> {
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), g.len())
            .prop_map(move |v| ScalarField::new(g, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn wirtinger_linearity_and_conjugation(
            f in arb_field(ConformalGrid::new(0.0, 0.0, 0.1, 0.2, 6, 7).unwrap()),
            g in arb_field(ConformalGrid::new(0.0, 0.0, 0.1, 0.2, 6, 7).unwrap()),
            a in (-3.0f64..3.0, -3.0f64..3.0),
            b in (-3.0f64..3.0, -3.0f64..3.0),
        ) {
            let (a, b) = (c(a.0, a.1), c(b.0, b.1));
            let combo = &f.scale(a) + &g.scale(b);
            let lhs = d_z(&combo);
            let rhs = &d_z(&f).scale(a) + &d_z(&g).scale(b);
            prop_assert!(residual_norm(&(&lhs - &rhs)).max < 1e-9);

            let via_conj = d_z(&f.conj()).conj();
            let direct = d_zbar(&f);
            for (x, y) in direct.values().iter().zip(via_conj.values()) {
                prop_assert_eq!(*x, *y);
            }
        }
    }
}
