//! JSON perturbation-spec files.
//!
//! ```json
//! {
//!   "kind": "semisphere",
//!   "P": "x1 + z", "Q": "x2", "R": "0",
//!   "c": 1.5,
//!   "params": { "mu": [2.0, 1.3333333333333333, 1.0] },
//!   "epsilon": 0.001
//! }
//! ```
//!
//! Tangent specs carry `"A"`, `"B"`, `"C"`; cross-product specs carry
//! `"L"`, `"M"`, `"N"`. Semisphere polynomials are read in the variables
//! `(x1, x2, z)`, the others in `(x1, x2, x3)`. Parsing, printing and
//! re-parsing is the identity on the polynomial level.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{InertiaParams, ModelError};
use crate::perturbation::{
    CrossProductSpec, FieldSpec, PerturbError, SemisphereSpec, TangentFieldSpec,
};
use crate::polynomial::{Poly3, PolyError};
use crate::PerturbedSystem;

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid polynomial in field {field}: {source}")]
    Polynomial {
        field: &'static str,
        source: PolyError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Perturbation(#[from] PerturbError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamsFile {
    pub mu: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecFile {
    Semisphere {
        #[serde(rename = "P")]
        p: String,
        #[serde(rename = "Q")]
        q: String,
        #[serde(rename = "R")]
        r: String,
        c: f64,
        params: ParamsFile,
        epsilon: f64,
    },
    Tangent {
        #[serde(rename = "A")]
        a: String,
        #[serde(rename = "B")]
        b: String,
        #[serde(rename = "C")]
        c_field: String,
        params: ParamsFile,
        epsilon: f64,
    },
    CrossProduct {
        #[serde(rename = "L")]
        l: String,
        #[serde(rename = "M")]
        m: String,
        #[serde(rename = "N")]
        n: String,
        params: ParamsFile,
        epsilon: f64,
    },
}

fn parse_poly(field: &'static str, text: &str) -> Result<Poly3, SpecFileError> {
    Poly3::parse(text).map_err(|source| SpecFileError::Polynomial { field, source })
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    pub fn params(&self) -> &ParamsFile {
        match self {
            SpecFile::Semisphere { params, .. }
            | SpecFile::Tangent { params, .. }
            | SpecFile::CrossProduct { params, .. } => params,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match self {
            SpecFile::Semisphere { epsilon, .. }
            | SpecFile::Tangent { epsilon, .. }
            | SpecFile::CrossProduct { epsilon, .. } => *epsilon,
        }
    }

    /// The intrinsic sphere radius, present only for the semisphere kind.
    pub fn intrinsic_c(&self) -> Option<f64> {
        match self {
            SpecFile::Semisphere { c, .. } => Some(*c),
            _ => None,
        }
    }

    /// Validates polynomials and parameters into a runnable system.
    pub fn build(&self) -> Result<PerturbedSystem, SpecFileError> {
        let mu = self.params().mu;
        let params = InertiaParams::new(mu[0], mu[1], mu[2])?;
        let spec = match self {
            SpecFile::Semisphere { p, q, r, c, .. } => FieldSpec::Semisphere(SemisphereSpec::new(
                parse_poly("P", p)?,
                parse_poly("Q", q)?,
                parse_poly("R", r)?,
                *c,
            )?),
            SpecFile::Tangent { a, b, c_field, .. } => FieldSpec::Tangent(TangentFieldSpec::new(
                parse_poly("A", a)?,
                parse_poly("B", b)?,
                parse_poly("C", c_field)?,
            )?),
            SpecFile::CrossProduct { l, m, n, .. } => {
                FieldSpec::cross_product(CrossProductSpec::new(
                    parse_poly("L", l)?,
                    parse_poly("M", m)?,
                    parse_poly("N", n)?,
                ))?
            }
        };
        Ok(PerturbedSystem::new(params, spec, self.epsilon()))
    }

    /// Canonicalizes the polynomial strings (parse, then print).
    pub fn canonicalize(&self) -> Result<Self, SpecFileError> {
        let mut out = self.clone();
        match &mut out {
            SpecFile::Semisphere { p, q, r, .. } => {
                *p = parse_poly("P", p)?.to_text_z();
                *q = parse_poly("Q", q)?.to_text_z();
                *r = parse_poly("R", r)?.to_text_z();
            }
            SpecFile::Tangent { a, b, c_field, .. } => {
                *a = parse_poly("A", a)?.to_text();
                *b = parse_poly("B", b)?.to_text();
                *c_field = parse_poly("C", c_field)?.to_text();
            }
            SpecFile::CrossProduct { l, m, n, .. } => {
                *l = parse_poly("L", l)?.to_text();
                *m = parse_poly("M", m)?.to_text();
                *n = parse_poly("N", n)?.to_text();
            }
        }
        Ok(out)
    }

    /// Spec for a [`FieldSpec`] plus run parameters, used by generators.
    pub fn from_parts(spec: &FieldSpec, mu: [f64; 3], epsilon: f64) -> Self {
        let params = ParamsFile { mu };
        match spec {
            FieldSpec::Semisphere(s) => SpecFile::Semisphere {
                p: s.p.to_text_z(),
                q: s.q.to_text_z(),
                r: s.r.to_text_z(),
                c: s.c,
                params,
                epsilon,
            },
            FieldSpec::Tangent(t) => SpecFile::Tangent {
                a: t.a().to_text(),
                b: t.b().to_text(),
                c_field: t.c().to_text(),
                params,
                epsilon,
            },
            FieldSpec::CrossProduct { data, .. } => SpecFile::CrossProduct {
                l: data.l.to_text(),
                m: data.m.to_text(),
                n: data.n.to_text(),
                params,
                epsilon,
            },
        }
    }
}
