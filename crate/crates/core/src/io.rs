//! JSON state and channel formats.
//!
//! A state file holds one of:
//!
//! - a density matrix `{"dims": [2, 2], "re": [[..], ..], "im": [[..], ..]}` (`im` optional)
//! - a pure vector `{"dims": [2, 2], "re": [..], "im": [..]}` (`dims` and `im` optional)
//! - a bare amplitude list `[0.8, 0.6]` or `[[re, im], ..]`
//! - a named state `{"state": "ghz", "params": [3]}`
//!
//! Pure inputs are promoted to density matrices. A channel file is
//! `{"dims_in": [..], "dims_out": [..], "operators": [{"re": [[..]], "im": [[..]]}, ..]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::matcore::{check_normalized, ComplexMatrix, C64};
use crate::states::{validate_density, DensityMatrix, StandardState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.rows()).map(|r| m.row(r).iter().map(f).collect()).collect();
        let im: Vec<Vec<f64>> = rows(|z| z.im);
        let im = if im.iter().flatten().all(|&x| x == 0.0) { Vec::new() } else { im };
        MatrixJson { re: rows(|z| z.re), im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || self.re.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("matrix rows must be non-empty and of equal length".into()));
        }
        if !self.im.is_empty() && (self.im.len() != rows || self.im.iter().any(|r| r.len() != cols)) {
            return Err(Error::Format("im part shape differs from re part".into()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let im = if self.im.is_empty() { 0.0 } else { self.im[r][c] };
                data.push(C64::new(self.re[r][c], im));
            }
        }
        ComplexMatrix::from_row_major(rows, cols, data)
    }
}

/// Serialized density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub dims: Vec<usize>,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

impl From<&DensityMatrix> for DensityJson {
    fn from(rho: &DensityMatrix) -> Self {
        DensityJson { dims: rho.dims().to_vec(), matrix: MatrixJson::from_matrix(rho.matrix()) }
    }
}

impl DensityJson {
    pub fn to_density(&self) -> Result<DensityMatrix> {
        validate_density(self.matrix.to_matrix()?, &self.dims)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dims_in: Vec<usize>,
    pub dims_out: Vec<usize>,
    pub operators: Vec<MatrixJson>,
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        ChannelJson {
            dims_in: ch.input_dims().to_vec(),
            dims_out: ch.output_dims().to_vec(),
            operators: ch.operators().iter().map(MatrixJson::from_matrix).collect(),
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self.operators.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops, self.dims_in.clone(), self.dims_out.clone())
    }
}

/// A parsed state, keeping the vector when the input was given as one.
#[derive(Debug, Clone)]
pub struct ParsedState {
    pub density: DensityMatrix,
    pub vector: Option<Vec<C64>>,
}

impl ParsedState {
    fn pure(vector: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_normalized(&vector)?;
        let density = DensityMatrix::from_pure(&vector, &dims)?;
        Ok(ParsedState { density, vector: Some(vector) })
    }

    /// The state vector, also recovered from rank-one density inputs.
    pub fn pure_vector(&self) -> Option<Vec<C64>> {
        self.vector.clone().or_else(|| self.density.pure_vector(1e-10))
    }
}

fn number(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Format(format!("expected a number, found {v}")))
}

fn amplitude_list(items: &[Value]) -> Result<Vec<C64>> {
    items
        .iter()
        .map(|v| match v {
            Value::Array(pair) if pair.len() == 2 => Ok(C64::new(number(&pair[0])?, number(&pair[1])?)),
            Value::Array(_) => Err(Error::Format("complex amplitudes are [re, im] pairs".into())),
            other => Ok(C64::new(number(other)?, 0.0)),
        })
        .collect()
}

fn dims_or_flat(dims: Option<Vec<usize>>, n: usize) -> Vec<usize> {
    dims.unwrap_or_else(|| vec![n])
}

/// Parses any of the accepted state encodings from JSON text.
pub fn parse_state(text: &str) -> Result<ParsedState> {
    let value: Value = serde_json::from_str(text)?;
    match value {
        Value::Array(items) => {
            let v = amplitude_list(&items)?;
            let n = v.len();
            ParsedState::pure(v, vec![n])
        }
        Value::Object(ref map) => {
            if let Some(name) = map.get("state") {
                let name = name.as_str().ok_or_else(|| Error::Format("\"state\" must be a string".into()))?;
                let params: Vec<usize> = match map.get("params") {
                    Some(p) => serde_json::from_value(p.clone())?,
                    None => Vec::new(),
                };
                let (vector, dims) = StandardState::parse(name, &params)?.vector()?;
                return ParsedState::pure(vector, dims);
            }
            let re = map.get("re").ok_or_else(|| Error::Format("state object needs \"re\" or \"state\"".into()))?;
            let dims: Option<Vec<usize>> = match map.get("dims") {
                Some(d) => Some(serde_json::from_value(d.clone())?),
                None => None,
            };
            let is_matrix = re.as_array().and_then(|a| a.first()).is_some_and(Value::is_array);
            if is_matrix {
                let m: MatrixJson = serde_json::from_value(value.clone())?;
                let mat = m.to_matrix()?;
                let dims = dims_or_flat(dims, mat.rows());
                let density = validate_density(mat, &dims)?;
                Ok(ParsedState { density, vector: None })
            } else {
                let re: Vec<f64> = serde_json::from_value(re.clone())?;
                let im: Vec<f64> = match map.get("im") {
                    Some(i) => serde_json::from_value(i.clone())?,
                    None => vec![0.0; re.len()],
                };
                if im.len() != re.len() {
                    return Err(Error::Format("re and im have different lengths".into()));
                }
                let v: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
                let n = v.len();
                ParsedState::pure(v, dims_or_flat(dims, n))
            }
        }
        _ => Err(Error::Format("state JSON must be an object or an array".into())),
    }
}

/// Reads a state from a file path, or parses the argument itself when it is inline JSON.
pub fn read_state(arg: &str) -> Result<ParsedState> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return parse_state(arg);
    }
    parse_state(&std::fs::read_to_string(Path::new(arg))?)
}

pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    let c: ChannelJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    c.to_channel()
}

/// Decimal rendering with `sig` significant digits; exact zero prints as `0`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x == 0.0 {
            "0".into()
        } else {
            format!("{x}")
        };
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).clamp(0, 40) as usize;
    let s = format!("{x:.decimals$}");
    // "-0.000" style round-off noise collapses to zero
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}
