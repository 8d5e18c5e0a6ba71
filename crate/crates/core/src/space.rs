//! Homogeneous spaces E(κ, τ) and the coordinate model used to realize them.
//!
//! Every space is written in the rotationally symmetric chart
//!
//! ```text
//! ds² = μ²(dx² + dy²) + (τμ(y dx − x dy) + dz)²,   μ = 1 / (1 + κ(x² + y²)/4)
//! ```
//!
//! which covers the whole space for κ ≤ 0 and the space minus one fiber for
//! κ > 0. The vertical Killing field is `∂z`, and the frame
//!
//! ```text
//! F1 = ∂x/μ − τy ∂z,   F2 = ∂y/μ + τx ∂z,   F3 = ∂z
//! ```
//!
//! is orthonormal. Orientation is fixed so that `(∂x, ∂y, ∂z)` is positive;
//! with that choice `∇̄_X ξ = τ X × ξ`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chart coordinates `(x, y, z)`.
pub type Point = Vector3<f64>;

/// Largest conformal factor accepted inside the chart.
pub const MAX_CONFORMAL_FACTOR: f64 = 1e6;

/// The pair (κ, τ) of base curvature and bundle curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct SpaceParams {
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Deserialize)]
struct RawSpace {
    kappa: f64,
    tau: f64,
}

impl TryFrom<RawSpace> for SpaceParams {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceParams::new(raw.kappa, raw.tau)
    }
}

impl SpaceParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !kappa.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidSpace(format!(
                "kappa = {kappa}, tau = {tau} must be finite"
            )));
        }
        if kappa - 4.0 * tau * tau == 0.0 {
            return Err(Error::InvalidSpace(format!(
                "kappa - 4 tau^2 must be nonzero (kappa = {kappa}, tau = {tau})"
            )));
        }
        Ok(Self { kappa, tau })
    }

    /// `κ − 4τ²`, the coefficient that couples the vertical field to the
    /// Codazzi equation.
    pub fn coupling(&self) -> f64 {
        self.kappa - 4.0 * self.tau * self.tau
    }

    pub fn family(&self) -> SpaceFamily {
        classify(self)
    }
}

/// Isometry-group type of E(κ, τ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceFamily {
    ProductH2xR,
    ProductS2xR,
    Heisenberg,
    BergerSphere,
    #[serde(rename = "PSL2R_cover")]
    Psl2rCover,
}

/// Classifies a space by the sign of κ and whether τ vanishes.
///
/// κ = 0 with τ = 0 is excluded by `κ ≠ 4τ²`, so the product case only
/// occurs for κ ≠ 0.
pub fn classify(params: &SpaceParams) -> SpaceFamily {
    if params.tau == 0.0 {
        if params.kappa < 0.0 {
            SpaceFamily::ProductH2xR
        } else {
            SpaceFamily::ProductS2xR
        }
    } else if params.kappa == 0.0 {
        SpaceFamily::Heisenberg
    } else if params.kappa > 0.0 {
        SpaceFamily::BergerSphere
    } else {
        SpaceFamily::Psl2rCover
    }
}

/// Christoffel symbols `Γ^i_{jk}` stored as `gamma[i][j][k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 3]; 3]; 3]);

impl Christoffel {
    /// `Γ^i_{jk} v^j w^k`.
    pub fn contract(&self, v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    acc += self.0[i][j][k] * v[j] * w[k];
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m = m.max((self.0[i][j][k] - other.0[i][j][k]).abs());
                }
            }
        }
        m
    }
}

/// The explicit coordinate model of E(κ, τ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientChart {
    pub params: SpaceParams,
}

/// Conformal factor and its first partials at a point.
#[derive(Debug, Clone, Copy)]
struct Factor {
    mu: f64,
    mu_x: f64,
    mu_y: f64,
}

impl AmbientChart {
    pub fn new(params: SpaceParams) -> Self {
        Self { params }
    }

    /// `μ(x, y) = 1 / (1 + κ(x² + y²)/4)`.
    pub fn conformal_factor(&self, x: f64, y: f64) -> f64 {
        1.0 / (1.0 + self.params.kappa * (x * x + y * y) / 4.0)
    }

    /// Checks that `point` lies in the chart domain with the conditioning margin.
    pub fn check_domain(&self, point: &Point) -> Result<()> {
        let (x, y, z) = (point[0], point[1], point[2]);
        let fail = |reason: String| {
            Err(Error::OutOfDomain {
                x,
                y,
                z,
                reason,
            })
        };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return fail("non-finite coordinate".into());
        }
        let denom = 1.0 + self.params.kappa * (x * x + y * y) / 4.0;
        if denom <= 0.0 {
            return fail(format!(
                "x^2 + y^2 = {} outside the disk of radius^2 {}",
                x * x + y * y,
                -4.0 / self.params.kappa
            ));
        }
        let mu = 1.0 / denom;
        if mu > MAX_CONFORMAL_FACTOR {
            return fail(format!(
                "conformal factor {mu:e} exceeds {MAX_CONFORMAL_FACTOR:e}"
            ));
        }
        Ok(())
    }

    pub fn contains(&self, point: &Point) -> bool {
        self.check_domain(point).is_ok()
    }

    fn factor(&self, x: f64, y: f64) -> Factor {
        let mu = self.conformal_factor(x, y);
        let k = self.params.kappa;
        Factor {
            mu,
            mu_x: -0.5 * k * x * mu * mu,
            mu_y: -0.5 * k * y * mu * mu,
        }
    }

    fn metric_unchecked(&self, point: &Point) -> Matrix3<f64> {
        let (x, y) = (point[0], point[1]);
        let tau = self.params.tau;
        let mu = self.conformal_factor(x, y);
        let a = tau * mu * y;
        let b = -tau * mu * x;
        let m2 = mu * mu;
        Matrix3::new(
            m2 + a * a,
            a * b,
            a,
            a * b,
            m2 + b * b,
            b,
            a,
            b,
            1.0,
        )
    }

    /// Metric tensor `g_{ij}` at `point`.
    pub fn metric_tensor(&self, point: &Point) -> Result<Matrix3<f64>> {
        self.check_domain(point)?;
        Ok(self.metric_unchecked(point))
    }

    /// Inverse metric, assembled from the orthonormal frame as `Σ F_a F_aᵀ`.
    pub fn inverse_metric(&self, point: &Point) -> Result<Matrix3<f64>> {
        let frame = self.orthonormal_frame(point)?;
        Ok(frame * frame.transpose())
    }

    /// Columns are the orthonormal frame `F1, F2, F3 = ξ` in coordinate components.
    pub fn orthonormal_frame(&self, point: &Point) -> Result<Matrix3<f64>> {
        self.check_domain(point)?;
        let (x, y) = (point[0], point[1]);
        let tau = self.params.tau;
        let mu = self.conformal_factor(x, y);
        Ok(Matrix3::new(
            1.0 / mu,
            0.0,
            0.0,
            0.0,
            1.0 / mu,
            0.0,
            -tau * y,
            tau * x,
            1.0,
        ))
    }

    /// `∂_x g` and `∂_y g` from closed-form partials of μ (`∂_z g = 0`).
    fn metric_partials(&self, point: &Point) -> [Matrix3<f64>; 3] {
        let (x, y) = (point[0], point[1]);
        let tau = self.params.tau;
        let Factor { mu, mu_x, mu_y } = self.factor(x, y);
        let a = tau * mu * y;
        let b = -tau * mu * x;
        let a_x = tau * y * mu_x;
        let a_y = tau * (mu + y * mu_y);
        let b_x = -tau * (mu + x * mu_x);
        let b_y = -tau * x * mu_y;
        let build = |m_d: f64, a_d: f64, b_d: f64| {
            Matrix3::new(
                2.0 * mu * m_d + 2.0 * a * a_d,
                a_d * b + a * b_d,
                a_d,
                a_d * b + a * b_d,
                2.0 * mu * m_d + 2.0 * b * b_d,
                b_d,
                a_d,
                b_d,
                0.0,
            )
        };
        [
            build(mu_x, a_x, b_x),
            build(mu_y, a_y, b_y),
            Matrix3::zeros(),
        ]
    }

    /// Levi-Civita symbols of the chart metric.
    pub fn christoffel(&self, point: &Point) -> Result<Christoffel> {
        let ginv = self.inverse_metric(point)?;
        let dg = self.metric_partials(point);
        // first kind: [l; j k] = (∂_j g_lk + ∂_k g_lj − ∂_l g_jk) / 2
        let mut first = [[[0.0; 3]; 3]; 3];
        for (l, row) in first.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    row[j][k] = 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                }
            }
        }
        let mut gamma = [[[0.0; 3]; 3]; 3];
        for (i, gi) in gamma.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    gi[j][k] = (0..3).map(|l| ginv[(i, l)] * first[l][j][k]).sum();
                }
            }
        }
        Ok(Christoffel(gamma))
    }

    /// The unit vertical Killing field ξ = ∂z.
    pub fn vertical_field(&self, point: &Point) -> Result<Vector3<f64>> {
        self.check_domain(point)?;
        Ok(Vector3::new(0.0, 0.0, 1.0))
    }

    pub fn inner(&self, point: &Point, v: &Vector3<f64>, w: &Vector3<f64>) -> Result<f64> {
        Ok(v.dot(&(self.metric_tensor(point)? * w)))
    }

    /// `⟨ξ, v⟩`, the vertical component of a tangent vector.
    pub fn vertical_component(&self, point: &Point, v: &Vector3<f64>) -> f64 {
        let tau = self.params.tau;
        let mu = self.conformal_factor(point[0], point[1]);
        tau * mu * (point[1] * v[0] - point[0] * v[1]) + v[2]
    }

    /// Riemannian cross product: `⟨v × w, u⟩ = vol(v, w, u)` with
    /// `vol = √det g dx∧dy∧dz` and `√det g = μ²`.
    pub fn cross_product(
        &self,
        point: &Point,
        v: &Vector3<f64>,
        w: &Vector3<f64>,
    ) -> Result<Vector3<f64>> {
        let ginv = self.inverse_metric(point)?;
        let mu = self.conformal_factor(point[0], point[1]);
        Ok(ginv * v.cross(w) * (mu * mu))
    }

    /// Christoffel symbols from central differences of the metric with
    /// spacing `h`; an independent oracle for [`Self::christoffel`].
    pub fn christoffel_fd(&self, p: &Point, h: f64) -> Result<Christoffel> {
        let mut dg = [Matrix3::zeros(); 3];
        for (d, slot) in dg.iter_mut().enumerate() {
            let mut e = Vector3::zeros();
            e[d] = h;
            *slot = (self.metric_tensor(&(p + e))? - self.metric_tensor(&(p - e))?) / (2.0 * h);
        }
        let ginv = self
            .metric_tensor(p)?
            .try_inverse()
            .ok_or_else(|| Error::InvalidSpace("singular metric".into()))?;
        let mut g = [[[0.0; 3]; 3]; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    gi[j][k] = (0..3)
                        .map(|l| ginv[(i, l)] * 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]))
                        .sum();
                }
            }
        }
        Ok(Christoffel(g))
    }

    /// `∇̄_X ξ − τ X × ξ`; vanishes identically for this chart.
    pub fn killing_residual(&self, point: &Point, x: &Vector3<f64>) -> Result<Vector3<f64>> {
        let xi = self.vertical_field(point)?;
        let gamma = self.christoffel(point)?;
        let nabla = gamma.contract(x, &xi);
        let cross = self.cross_product(point, x, &xi)?;
        Ok(nabla - cross * self.params.tau)
    }
}

/// A chart isometry fixing the fiber over the origin: rotation by `angle`
/// about the z-axis followed by a translation of `shift` along the fibers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberIsometry {
    pub angle: f64,
    pub shift: f64,
}

impl FiberIsometry {
    pub fn apply_point(&self, p: &Point) -> Point {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        Point::new(c * p[0] - s * p[1], s * p[0] + c * p[1], p[2] + self.shift)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        Vector3::new(c * v[0] - s * v[1], s * v[0] + c * v[1], v[2])
    }
}
