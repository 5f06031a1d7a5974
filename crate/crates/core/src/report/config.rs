//! JSON inputs. Parsing is strict: unknown or mistyped fields are rejected by name.
//!
//! Parameters file: `{"lambda", "delta", "H", "phi", "Pi"}` plus optional `"Pi_b"` (baseline
//! profits, real-response variant) and `"law"` (`"inverse"` or `"linear"`).
//! Moments file: `{"t_n0", "shifted_share", "H", "phi", "Pi"}` plus optional `"variant"`
//! (`"baseline"` or `"real-response"`) and `"weights"` (two positive numbers).

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::calibration::{CalibrationVariant, FixedParams, MomentTargets};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ProfitResponse};

/// Overrides the default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "GMT_OUT_DIR";

/// `--out` if given, else `$GMT_OUT_DIR`, else `./gmt-out`.
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gmt-out"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsFile {
    pub params: ModelParams,
    pub baseline_profits: Option<f64>,
    pub law: ProfitResponse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentsFile {
    pub targets: MomentTargets,
    pub fixed: FixedParams,
    pub variant: CalibrationVariant,
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
}

impl<'a> Fields<'a> {
    fn new(v: &'a Value, allowed: &[&str]) -> Result<Self> {
        let map = v
            .as_object()
            .ok_or_else(|| Error::schema("<root>", "expected a JSON object"))?;
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::schema(k.clone(), format!("unknown field (expected one of {allowed:?})")));
        }
        Ok(Fields { map })
    }

    fn number(&self, key: &str) -> Result<f64> {
        self.optional_number(key)?
            .ok_or_else(|| Error::schema(key, "missing required field"))
    }

    fn optional_number(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::schema(key, format!("expected a number, got {v}"))),
        }
    }

    fn count(&self, key: &str) -> Result<u32> {
        let v = self.map.get(key).ok_or_else(|| Error::schema(key, "missing required field"))?;
        v.as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .filter(|&x| x >= 1)
            .ok_or_else(|| Error::schema(key, format!("expected a positive integer, got {v}")))
    }

    fn optional_str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(Error::schema(key, format!("expected a string, got {v}"))),
        }
    }
}

/// Maps a validation error on an internal field back to the file's key.
fn rename(e: Error) -> Error {
    match e {
        Error::InvalidParam { field, reason } => {
            let key = match field {
                "havens" => "H",
                "coverage" => "phi",
                "total_profits" => "Pi",
                other => other,
            };
            Error::schema(key, reason)
        }
        other => other,
    }
}

pub fn parse_params(text: &str) -> Result<ParamsFile> {
    let v: Value = serde_json::from_str(text)?;
    let f = Fields::new(&v, &["lambda", "delta", "H", "phi", "Pi", "Pi_b", "law"])?;
    let params = ModelParams::new(
        f.number("lambda")?,
        f.number("delta")?,
        f.count("H")?,
        f.number("phi")?,
        f.number("Pi")?,
    )
    .map_err(rename)?;
    let baseline_profits = f.optional_number("Pi_b")?;
    if let Some(pb) = baseline_profits {
        if !(pb > 0.0) {
            return Err(Error::schema("Pi_b", format!("must be > 0, got {pb}")));
        }
    }
    let law = match f.optional_str("law")? {
        None | Some("inverse") => ProfitResponse::Inverse,
        Some("linear") => ProfitResponse::Linear,
        Some(s) => return Err(Error::schema("law", format!("expected \"inverse\" or \"linear\", got {s:?}"))),
    };
    Ok(ParamsFile {
        params,
        baseline_profits,
        law,
    })
}

pub fn parse_moments(text: &str) -> Result<MomentsFile> {
    let v: Value = serde_json::from_str(text)?;
    let f = Fields::new(&v, &["t_n0", "shifted_share", "H", "phi", "Pi", "variant", "weights"])?;
    let mut targets = MomentTargets {
        t_n0: f.number("t_n0")?,
        shifted_share: f.number("shifted_share")?,
        weights: [1.0, 1.0],
    };
    if let Some(w) = f.map.get("weights") {
        let arr = w
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some([a[0].as_f64()?, a[1].as_f64()?]))
            .ok_or_else(|| Error::schema("weights", format!("expected two numbers, got {w}")))?;
        targets.weights = arr;
    }
    targets.validate().map_err(|e| match e {
        Error::InvalidParam { field, reason } => Error::schema(field, reason),
        other => other,
    })?;
    let fixed = FixedParams {
        havens: f.count("H")?,
        coverage: f.number("phi")?,
        total_profits: f.number("Pi")?,
    };
    ModelParams::new(2.0, 1.0, fixed.havens, fixed.coverage, fixed.total_profits).map_err(rename)?;
    let variant = match f.optional_str("variant")? {
        None | Some("baseline") => CalibrationVariant::Baseline,
        Some("real-response" | "real_response") => CalibrationVariant::RealResponse,
        Some(s) => {
            return Err(Error::schema(
                "variant",
                format!("expected \"baseline\" or \"real-response\", got {s:?}"),
            ))
        }
    };
    Ok(MomentsFile {
        targets,
        fixed,
        variant,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_params(path: &Path) -> Result<ParamsFile> {
    parse_params(&read(path)?).map_err(|e| in_file(e, path))
}

pub fn load_moments(path: &Path) -> Result<MomentsFile> {
    parse_moments(&read(path)?).map_err(|e| in_file(e, path))
}

fn in_file(e: Error, path: &Path) -> Error {
    match e {
        Error::Schema { field, reason } => Error::Schema {
            field,
            reason: format!("{reason} (in {})", path.display()),
        },
        other => other,
    }
}
