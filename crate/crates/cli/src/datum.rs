//! TOML datum files.
//!
//! ```toml
//! m0 = [0.0, 0.0, 1.0]
//!
//! [[sites]]
//! pole = [0.0, 1.0]                              # [re, im]
//! spin = [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]    # three [re, im] pairs
//! ```

use std::path::Path;

use hwm_core::{c64, validate, ComplexSpin, ConstraintReport, Datum, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumFile {
    m0: Vec<f64>,
    #[serde(default)]
    sites: Vec<SiteFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteFile {
    pole: Vec<f64>,
    spin: Vec<Vec<f64>>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn pair(v: &[f64], path: String) -> Result<hwm_core::Complex64, CliError> {
    match v {
        [re, im] if re.is_finite() && im.is_finite() => Ok(c64(*re, *im)),
        [_, _] => Err(schema(path, "entries must be finite")),
        _ => Err(schema(path, format!("expected [re, im], found {} numbers", v.len()))),
    }
}

/// Parse datum text. Only the schema is checked here.
pub fn parse_datum_str(text: &str) -> Result<Datum, CliError> {
    let file: DatumFile = toml::from_str(text).map_err(|e| schema("<document>", e.message()))?;
    let m0 = match file.m0.as_slice() {
        [a, b, c] => ComplexSpin::real([*a, *b, *c]),
        v => return Err(schema("m0", format!("expected 3 reals, found {}", v.len()))),
    };
    if file.sites.is_empty() {
        return Err(schema("sites", "at least one site is required"));
    }
    let mut poles = Vec::with_capacity(file.sites.len());
    let mut spins = Vec::with_capacity(file.sites.len());
    for (j, site) in file.sites.iter().enumerate() {
        poles.push(pair(&site.pole, format!("sites[{j}].pole"))?);
        if site.spin.len() != 3 {
            return Err(schema(
                format!("sites[{j}].spin"),
                format!("expected 3 components, found {}", site.spin.len()),
            ));
        }
        let mut s = ComplexSpin::zero();
        for (k, comp) in site.spin.iter().enumerate() {
            s[k] = pair(comp, format!("sites[{j}].spin[{k}]"))?;
        }
        spins.push(s);
    }
    Ok(Datum::new(m0, poles, spins))
}

pub fn parse_datum(path: &Path) -> Result<Datum, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_datum_str(&text)
}

/// Parse and validate; an invalid datum is an error unless `force` is set.
pub fn load_datum(path: &Path, tol: &Tolerances<f64>, force: bool) -> Result<(Datum, ConstraintReport<f64>), CliError> {
    let data = parse_datum(path)?;
    let report = validate(&data, tol);
    if !report.valid && !force {
        return Err(CliError::ValidationFailed(report.problems.join("; ")));
    }
    Ok((data, report))
}

/// Datum as TOML text that [`parse_datum_str`] reads back exactly.
pub fn datum_to_toml(data: &Datum) -> String {
    let file = DatumFile {
        m0: data.m0.re().to_vec(),
        sites: data
            .poles
            .iter()
            .zip(&data.spins)
            .map(|(p, s)| SiteFile {
                pole: vec![p.re, p.im],
                spin: s.0.iter().map(|z| vec![z.re, z.im]).collect(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("datum serializes")
}
