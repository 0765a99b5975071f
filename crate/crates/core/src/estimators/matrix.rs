use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Ncc,
    Nccci,
    Mi,
    D1te,
    Dte,
    Dteci,
    Dhote,
    Dhoteci,
    Cdhote,
    Tspe,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Ncc,
        Method::Nccci,
        Method::Mi,
        Method::D1te,
        Method::Dte,
        Method::Dteci,
        Method::Dhote,
        Method::Dhoteci,
        Method::Cdhote,
        Method::Tspe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ncc => "NCC",
            Method::Nccci => "NCCCI",
            Method::Mi => "MI",
            Method::D1te => "D1TE",
            Method::Dte => "DTE",
            Method::Dteci => "DTECI",
            Method::Dhote => "DHOTE",
            Method::Dhoteci => "DHOTECI",
            Method::Cdhote => "CDHOTE",
            Method::Tspe => "TSPE",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::param("method", format!("unknown method `{name}`")))
    }

    /// Sign of the value carries the effect type.
    pub fn is_signed(self) -> bool {
        self == Method::Tspe
    }

    /// Smaller values mean a more likely connection.
    pub fn is_distance(self) -> bool {
        self == Method::Cdhote
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// K×K estimator output, row = source, column = target, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix<S = f64> {
    pub values: Array2<S>,
    /// Delay (in bins) at which each value was taken.
    pub delays: Option<Array2<i32>>,
    pub method: Method,
    pub params: serde_json::Value,
}

impl<S: Scalar> ConnectivityMatrix<S> {
    pub fn new(mut values: Array2<S>, delays: Option<Array2<i32>>, method: Method, params: serde_json::Value) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::param("values", format!("matrix is {r}×{c}, expected square")));
        }
        if let Some(d) = &delays {
            if d.dim() != (r, c) {
                return Err(Error::param("delays", "shape differs from values"));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite entry"));
        }
        for i in 0..r {
            values[[i, i]] = S::zero();
        }
        Ok(Self {
            values,
            delays,
            method,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, source: usize, target: usize) -> S {
        self.values[[source, target]]
    }

    /// Off-diagonal values, row-major.
    pub fn off_diagonal(&self) -> Vec<S> {
        self.values
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, &v)| v)
            .collect()
    }

    /// Ranking score where larger means a more likely connection: `|value|`,
    /// or `-value` for distance methods.
    pub fn score(&self, source: usize, target: usize) -> S {
        let v = self.values[[source, target]];
        if self.method.is_distance() {
            -v
        } else {
            v.abs()
        }
    }

    /// Same matrix with rows and columns reordered: entry `(a, b)` of the
    /// result is entry `(perm[a], perm[b])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let k = self.len();
        let values = Array2::from_shape_fn((k, k), |(a, b)| self.values[[perm[a], perm[b]]]);
        let delays = self
            .delays
            .as_ref()
            .map(|d| Array2::from_shape_fn((k, k), |(a, b)| d[[perm[a], perm[b]]]));
        Self {
            values,
            delays,
            method: self.method,
            params: self.params.clone(),
        }
    }

    pub fn to_f64(&self) -> ConnectivityMatrix<f64> {
        ConnectivityMatrix {
            values: self.values.mapv(Scalar::as_f64),
            delays: self.delays.clone(),
            method: self.method,
            params: self.params.clone(),
        }
    }

    pub fn values_csv(&self) -> String {
        matrix_csv(&self.values, |v| format!("{:e}", v.as_f64()))
    }

    pub fn delays_csv(&self) -> Option<String> {
        self.delays.as_ref().map(|d| matrix_csv(d, |v| v.to_string()))
    }

    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "channels": self.len(),
            "params": self.params,
        })
    }

    /// Write `<stem>.csv`, `<stem>.json` and, when present, `<stem>_delays.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let write = |name: String, body: String| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(path, e))
        };
        write(format!("{stem}.csv"), self.values_csv())?;
        write(format!("{stem}.json"), serde_json::to_string_pretty(&self.sidecar_json())?)?;
        if let Some(d) = self.delays_csv() {
            write(format!("{stem}_delays.csv"), d)?;
        }
        Ok(())
    }
}

impl ConnectivityMatrix<f64> {
    /// Read a matrix written by [`ConnectivityMatrix::write`].
    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let read = |name: String| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        let sidecar: serde_json::Value = serde_json::from_str(&read(format!("{stem}.json"))?)?;
        let method: Method = serde_json::from_value(sidecar["method"].clone())?;
        let values = parse_matrix_csv(&read(format!("{stem}.csv"))?, "values")?;
        let delays_path = dir.join(format!("{stem}_delays.csv"));
        let delays = if delays_path.exists() {
            Some(parse_matrix_csv::<i32>(&read(format!("{stem}_delays.csv"))?, "delays")?)
        } else {
            None
        };
        Self::new(values, delays, method, sidecar["params"].clone())
    }
}

pub(crate) fn matrix_csv<T>(m: &Array2<T>, fmt: impl Fn(&T) -> String) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(&fmt).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub(crate) fn parse_matrix_csv<T: std::str::FromStr>(text: &str, field: &str) -> Result<Array2<T>> {
    let rows: Vec<Vec<T>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(r, line)| {
            line.split(',')
                .map(|c| {
                    c.trim()
                        .parse::<T>()
                        .map_err(|_| Error::format(format!("{field}[{r}]"), format!("cannot parse `{c}`")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::format(field, "matrix is not square"));
    }
    let flat: Vec<T> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((k, k), flat).map_err(|e| Error::format(field, e.to_string()))
}
