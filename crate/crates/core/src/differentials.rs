//! Hopf, Abresch–Rosenberg and `P` differentials, their holomorphy, and
//! audits built on the modulus inequality for non-CMC surfaces with
//! holomorphic `Q`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::{check_all, FundamentalField, ResidualReport, ToleranceProfile, MEAN_CURVATURE_GUARD};
use crate::grid::{d_z, d_zbar, residual_norm, ResidualNorm, ScalarField};
use crate::space::SpaceParams;

/// Nodes with `|H_z|` below this are left out of identities that divide by it.
pub const GRADIENT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DifferentialKind {
    Hopf,
    #[serde(rename = "AR_Q")]
    ArQ,
    #[serde(rename = "AR_P")]
    ArP,
}

/// Coefficient of a quadratic differential with respect to `dz²`.
#[derive(Debug, Clone)]
pub struct QuadraticDifferential {
    pub kind: DifferentialKind,
    pub coeff: ScalarField,
}

fn h_plus_itau(d: &FundamentalField, i: usize, j: usize) -> Complex64 {
    Complex64::new(d.h.re(i, j), d.space.tau)
}

/// Nodes where `|H + iτ|` is below the division guard.
pub fn guarded_nodes(d: &FundamentalField) -> Vec<(usize, usize)> {
    d.grid
        .nodes()
        .filter(|&(i, j)| h_plus_itau(d, i, j).norm() < MEAN_CURVATURE_GUARD)
        .collect()
}

/// `Q = 2p − (κ − 4τ²)A²/(H + iτ)`, with guarded nodes invalidated and
/// returned alongside.
pub fn abresch_rosenberg_guarded(d: &FundamentalField) -> (QuadraticDifferential, Vec<(usize, usize)>) {
    let c = d.coupling();
    let coeff = ScalarField::from_nodes(d.grid, |i, j| {
        let w = h_plus_itau(d, i, j);
        if w.norm() < MEAN_CURVATURE_GUARD {
            return None;
        }
        let a = d.a.get(i, j);
        Some(2.0 * d.p.get(i, j) - c * a * a / w)
    });
    (
        QuadraticDifferential {
            kind: DifferentialKind::ArQ,
            coeff,
        },
        guarded_nodes(d),
    )
}

/// `Q`, failing on the first guarded node.
pub fn abresch_rosenberg(d: &FundamentalField) -> Result<QuadraticDifferential> {
    let (q, guarded) = abresch_rosenberg_guarded(d);
    match guarded.first() {
        Some(&(i, j)) => Err(Error::DivisionGuard {
            i,
            j,
            threshold: MEAN_CURVATURE_GUARD,
        }),
        None => Ok(q),
    }
}

pub fn p_differential(d: &FundamentalField) -> QuadraticDifferential {
    QuadraticDifferential {
        kind: DifferentialKind::Hopf,
        coeff: d.p.clone(),
    }
}

/// `P = (H + iτ) Q`.
pub fn ar_p(d: &FundamentalField) -> Result<QuadraticDifferential> {
    let q = abresch_rosenberg(d)?;
    let tau = d.space.tau;
    let coeff = q.coeff.zip_with(&d.h, |q, h| Complex64::new(h.re, tau) * q);
    Ok(QuadraticDifferential {
        kind: DifferentialKind::ArP,
        coeff,
    })
}

pub fn holomorphy_residual(qd: &QuadraticDifferential) -> ResidualNorm {
    residual_norm(&d_zbar(&qd.coeff))
}

/// `Q_z̄ − λH_z − (κ − 4τ²) H_z̄ A²/(H + iτ)²`.
pub fn codazzi_q_residual(d: &FundamentalField) -> Result<ScalarField> {
    let q = abresch_rosenberg(d)?;
    let c = d.coupling();
    let (q_zbar, h_z, h_zbar) = (d_zbar(&q.coeff), d_z(&d.h), d_zbar(&d.h));
    Ok(ScalarField::from_nodes(d.grid, |i, j| {
        if !(q_zbar.is_valid(i, j) && h_z.is_valid(i, j)) {
            return None;
        }
        let w = h_plus_itau(d, i, j);
        let a = d.a.get(i, j);
        Some(q_zbar.get(i, j) - d.lambda.re(i, j) * h_z.get(i, j) - c * h_zbar.get(i, j) * a * a / (w * w))
    }))
}

/// Outcome of [`zero_q_cmc_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct ZeroQAudit {
    pub pass: bool,
    /// `max |H − mean H|` over valid interior nodes.
    pub spread: f64,
    pub bound: f64,
    pub max_q: f64,
    /// Integrability report of the input; a failing audit usually shows up here.
    pub report: ResidualReport,
}

/// Checks that data with vanishing `Q` have constant mean curvature.
///
/// Requires `max |Q| ≤ tol`; passes when the spread of `H` is at most
/// `10·tol`. A failure flags data that cannot come from a surface, and the
/// attached report shows which equations they break.
pub fn zero_q_cmc_audit(d: &FundamentalField, tol: f64) -> Result<ZeroQAudit> {
    let q = abresch_rosenberg(d)?;
    let max_q = q.coeff.max_abs();
    if max_q > tol {
        return Err(Error::Precondition(format!(
            "max |Q| = {max_q:e} exceeds the audit tolerance {tol:e}"
        )));
    }
    let mean = d.h.restrict_interior(1).mean_re();
    let spread = d
        .h
        .counted()
        .map(|(_, _, h)| (h.re - mean).abs())
        .fold(0.0, f64::max);
    let bound = 10.0 * tol;
    Ok(ZeroQAudit {
        pass: spread <= bound,
        spread,
        bound,
        max_q,
        report: check_all(d, &ToleranceProfile::default()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityTag {
    #[serde(rename = "CMCOnly")]
    CmcOnly,
    #[serde(rename = "NonCMCExists")]
    NonCmcExists,
    Unknown,
}

impl fmt::Display for FeasibilityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeasibilityTag::CmcOnly => "CMCOnly",
            FeasibilityTag::NonCmcExists => "NonCMCExists",
            FeasibilityTag::Unknown => "Unknown",
        })
    }
}

/// Whether E(κ, τ) can carry non-CMC surfaces with holomorphic `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub tag: FeasibilityTag,
    /// Symmetric interval of admissible `H` for a non-CMC surface, if any.
    pub allowed_h_interval: Option<(f64, f64)>,
    pub citation: String,
}

/// Case analysis of `4(H² + τ²) ≤ |κ − 4τ²|`, the modulus inequality every
/// non-CMC surface with holomorphic `Q` satisfies.
pub fn feasibility_audit(space: &SpaceParams) -> FeasibilityVerdict {
    let (kappa, tau) = (space.kappa, space.tau);
    let c = space.coupling();
    let sym = |r: f64| Some((-r, r));
    if c < 0.0 && kappa >= 0.0 {
        return FeasibilityVerdict {
            tag: FeasibilityTag::CmcOnly,
            allowed_h_interval: None,
            citation: "kappa >= 0 > kappa - 4 tau^2: 4(H^2 + tau^2) <= 4 tau^2 - kappa has no room for non-constant H; holomorphic Q implies CMC".into(),
        };
    }
    if c > 0.0 && kappa - 8.0 * tau * tau <= 0.0 {
        return FeasibilityVerdict {
            tag: FeasibilityTag::CmcOnly,
            allowed_h_interval: None,
            citation: "0 < kappa - 4 tau^2, kappa <= 8 tau^2: 4(H^2 + tau^2) <= kappa - 4 tau^2 has no room for non-constant H; holomorphic Q implies CMC".into(),
        };
    }
    if c < 0.0 {
        return FeasibilityVerdict {
            tag: FeasibilityTag::NonCmcExists,
            allowed_h_interval: sym((-kappa).sqrt() / 2.0),
            citation: if tau == 0.0 {
                "kappa < 0, tau = 0: non-CMC examples with Q dz^2 = dz^2 exist, |H| <= sqrt(-kappa)/2; H depends on one conformal coordinate".into()
            } else {
                "kappa < 0, tau != 0: non-CMC data with Q dz^2 = dz^2 reduce to an overdetermined system for H with 4H^2 + kappa < 0 (sign of tau enters only through tau^2 here)".into()
            },
        };
    }
    FeasibilityVerdict {
        tag: FeasibilityTag::Unknown,
        allowed_h_interval: sym((kappa - 8.0 * tau * tau).sqrt() / 2.0),
        citation: "kappa > 8 tau^2: necessary condition |H| <= sqrt(kappa - 8 tau^2)/2 only; existence of non-CMC examples is open".into(),
    }
}

/// Norms of the identities satisfied by non-CMC data normalized to `Q ≡ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub identities: BTreeMap<String, ResidualNorm>,
    /// Nodes skipped because `|H_z| < GRADIENT_GUARD`.
    pub excluded_nodes: Vec<(usize, usize)>,
}

impl StructureReport {
    pub fn get(&self, name: &str) -> Option<&ResidualNorm> {
        self.identities.get(name)
    }
}

/// Identity fields keyed by name:
///
/// - `q_normalization`: `2p − 1 − (κ − 4τ²)A²/(H + iτ)`
/// - `modulus_identity`: `1 − u² − 4(H² + τ²)/|κ − 4τ²|`
/// - `vertical_normal`: `u − √((4H² + κ)/(κ − 4τ²))`
/// - `tangent_coefficient`: `A − u(H² + τ²)/(4H H_z)`
/// - `reality_condition`: `τ(H_s² − H_t²) − 2H H_s H_t`
/// - `log_laplacian`: `(log(H² + τ²))_{zz̄}` minus its expression in `H`, `H_z`
///
/// `H_s`, `H_t` come from the closed form when the data carry one.
pub fn non_cmc_structure_fields(d: &FundamentalField) -> Result<(BTreeMap<String, ScalarField>, Vec<(usize, usize)>)> {
    let (kappa, tau) = (d.space.kappa, d.space.tau);
    let c = d.coupling();
    if c >= 0.0 {
        return Err(Error::Precondition(format!(
            "kappa - 4 tau^2 = {c} must be negative"
        )));
    }
    let g = d.grid;
    let (h_s, h_t) = d.mean_curvature_gradient();
    let h_z = |i, j| 0.5 * Complex64::new(h_s.re(i, j), -h_t.re(i, j));
    let grad_ok = |i, j| h_s.is_valid(i, j) && h_t.is_valid(i, j) && h_z(i, j).norm() >= GRADIENT_GUARD;
    let excluded: Vec<_> = g.nodes().filter(|&(i, j)| !grad_ok(i, j)).collect();

    let mut out = BTreeMap::new();
    out.insert(
        "q_normalization".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            let a = d.a.get(i, j);
            Some(2.0 * d.p.get(i, j) - 1.0 - c * a * a / h_plus_itau(d, i, j))
        }),
    );
    out.insert(
        "modulus_identity".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            let (u, h) = (d.u.re(i, j), d.h.re(i, j));
            Some(Complex64::new(1.0 - u * u - 4.0 * (h * h + tau * tau) / c.abs(), 0.0))
        }),
    );
    out.insert(
        "vertical_normal".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            let (u, h) = (d.u.re(i, j), d.h.re(i, j));
            let r = (4.0 * h * h + kappa) / c;
            (r >= 0.0).then(|| Complex64::new(u - r.sqrt(), 0.0))
        }),
    );
    out.insert(
        "tangent_coefficient".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            let (u, h) = (d.u.re(i, j), d.h.re(i, j));
            grad_ok(i, j).then(|| d.a.get(i, j) - u * (h * h + tau * tau) / (4.0 * h * h_z(i, j)))
        }),
    );
    out.insert(
        "reality_condition".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            if !(h_s.is_valid(i, j) && h_t.is_valid(i, j)) {
                return None;
            }
            let (h, s, t) = (d.h.re(i, j), h_s.re(i, j), h_t.re(i, j));
            Some(Complex64::new(tau * (s * s - t * t) - 2.0 * h * s * t, 0.0))
        }),
    );
    let log_q = d.h.map(|h| Complex64::new((h.re * h.re + tau * tau).ln(), 0.0));
    let lap = d_zbar(&d_z(&log_q));
    out.insert(
        "log_laplacian".to_string(),
        ScalarField::from_nodes(g, |i, j| {
            if !(lap.is_valid(i, j) && grad_ok(i, j)) {
                return None;
            }
            let h = d.h.re(i, j);
            let (hz, qq, e) = (h_z(i, j), h * h + tau * tau, 4.0 * h * h + kappa);
            let m2 = hz.norm_sqr();
            let rhs = 8.0 * h * h * m2 / (qq * e) + hz * hz * Complex64::new(h, tau) * e / (4.0 * m2 * qq);
            Some(lap.get(i, j) - rhs)
        }),
    );
    Ok((out, excluded))
}

pub fn non_cmc_structure_residuals(d: &FundamentalField) -> Result<StructureReport> {
    let (fields, excluded_nodes) = non_cmc_structure_fields(d)?;
    Ok(StructureReport {
        identities: fields.iter().map(|(k, f)| (k.clone(), residual_norm(f))).collect(),
        excluded_nodes,
    })
}
