//! JSON and CSV formats for fields and fundamental data.
//!
//! Real fields are written as bare floats and complex ones as `[re, im]`
//! pairs, row-major with `s` fastest. Invalid nodes are `null`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::{FundamentalField, SCHEMA_VERSION};
use crate::grid::{ConformalGrid, ScalarField};
use crate::space::SpaceParams;

type RealValues = Vec<Option<f64>>;
type ComplexValues = Vec<Option<[f64; 2]>>;

fn real_values(f: &ScalarField) -> RealValues {
    f.values()
        .iter()
        .zip(f.mask())
        .map(|(v, &ok)| ok.then_some(v.re))
        .collect()
}

fn complex_values(f: &ScalarField) -> ComplexValues {
    f.values()
        .iter()
        .zip(f.mask())
        .map(|(v, &ok)| ok.then_some([v.re, v.im]))
        .collect()
}

fn check_len(grid: &ConformalGrid, len: usize, name: &str) -> Result<()> {
    if len != grid.len() {
        return Err(Error::Shape(format!(
            "`{name}` has {len} values, grid has {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

fn from_real(grid: ConformalGrid, v: &RealValues, name: &str) -> Result<ScalarField> {
    check_len(&grid, v.len(), name)?;
    Ok(ScalarField::from_nodes(grid, |i, j| {
        v[grid.index(i, j)].map(|x| Complex64::new(x, 0.0))
    }))
}

fn from_complex(grid: ConformalGrid, v: &ComplexValues, name: &str) -> Result<ScalarField> {
    check_len(&grid, v.len(), name)?;
    Ok(ScalarField::from_nodes(grid, |i, j| {
        v[grid.index(i, j)].map(|[re, im]| Complex64::new(re, im))
    }))
}

/// Single field on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub grid: ConformalGrid,
    pub values: FieldValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValues {
    Real(RealValues),
    Complex(ComplexValues),
}

impl FieldJson {
    /// Real encoding when every imaginary part is exactly zero.
    pub fn from_field(f: &ScalarField) -> Self {
        let values = if f.is_real(0.0) {
            FieldValues::Real(real_values(f))
        } else {
            FieldValues::Complex(complex_values(f))
        };
        Self { grid: *f.grid(), values }
    }

    pub fn to_field(&self) -> Result<ScalarField> {
        match &self.values {
            FieldValues::Real(v) => from_real(self.grid, v, "values"),
            FieldValues::Complex(v) => from_complex(self.grid, v, "values"),
        }
    }
}

/// Rows `s,t,re,im`; invalid nodes are skipped.
pub fn write_field_csv<W: Write>(out: &mut W, f: &ScalarField) -> std::io::Result<()> {
    writeln!(out, "s,t,re,im")?;
    let g = f.grid();
    for (i, j) in g.nodes() {
        if f.is_valid(i, j) {
            let v = f.get(i, j);
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", g.s(i), g.t(j), v.re, v.im)?;
        }
    }
    Ok(())
}

/// Serialized fundamental data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalJson {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub space: SpaceParams,
    pub grid: ConformalGrid,
    pub lambda: RealValues,
    pub u: RealValues,
    #[serde(rename = "H")]
    pub h: RealValues,
    pub p: ComplexValues,
    #[serde(rename = "A")]
    pub a: ComplexValues,
    /// Analytic `H_s`, `H_t` when the generator has them.
    #[serde(rename = "H_s", default, skip_serializing_if = "Option::is_none")]
    pub h_s: Option<RealValues>,
    #[serde(rename = "H_t", default, skip_serializing_if = "Option::is_none")]
    pub h_t: Option<RealValues>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl From<&FundamentalField> for FundamentalJson {
    fn from(d: &FundamentalField) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            space: d.space,
            grid: d.grid,
            lambda: real_values(&d.lambda),
            u: real_values(&d.u),
            h: real_values(&d.h),
            p: complex_values(&d.p),
            a: complex_values(&d.a),
            h_s: d.h_grad.as_ref().map(|(s, _)| real_values(s)),
            h_t: d.h_grad.as_ref().map(|(_, t)| real_values(t)),
        }
    }
}

impl FundamentalJson {
    /// Rebuilds the data with the basic checks only (positivity, finiteness,
    /// shapes); algebraic constraints are left to the residual checker so
    /// that faulty data can still be loaded and diagnosed.
    pub fn to_field(&self) -> Result<FundamentalField> {
        if self.schema_version > SCHEMA_VERSION {
            return Err(Error::Precondition(format!(
                "schema_version {} is newer than supported {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let g = self.grid;
        let mut d = FundamentalField::assemble_unchecked(
            self.space,
            g,
            from_real(g, &self.lambda, "lambda")?,
            from_real(g, &self.u, "u")?,
            from_real(g, &self.h, "H")?,
            from_complex(g, &self.p, "p")?,
            from_complex(g, &self.a, "A")?,
        );
        match (&self.h_s, &self.h_t) {
            (Some(s), Some(t)) => d = d.with_h_grad(from_real(g, s, "H_s")?, from_real(g, t, "H_t")?),
            (None, None) => {}
            _ => return Err(Error::Shape("`H_s` and `H_t` must be given together".into())),
        }
        d.validate_basic()?;
        Ok(d)
    }
}

pub fn write_fundamental<W: Write>(out: W, d: &FundamentalField) -> Result<()> {
    serde_json::to_writer(out, &FundamentalJson::from(d))?;
    Ok(())
}

pub fn read_fundamental<R: Read>(input: R) -> Result<FundamentalField> {
    let j: FundamentalJson = serde_json::from_reader(input)?;
    j.to_field()
}

pub fn save_fundamental(path: &Path, d: &FundamentalField) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_fundamental(&mut out, d)?;
    out.flush()?;
    Ok(())
}

pub fn load_fundamental(path: &Path) -> Result<FundamentalField> {
    read_fundamental(std::io::BufReader::new(std::fs::File::open(path)?))
}
