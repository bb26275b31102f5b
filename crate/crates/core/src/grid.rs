//! Regular-grid piecewise-linear scalar fields and the `.grid` text format.
//!
//! A `.grid` file starts with a header line `dims nx ny nz` followed by
//! `nx * ny * nz` whitespace-separated values in x-fastest order. Values may
//! span any number of lines.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One ensemble member sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFieldGrid {
    pub dims: [usize; 3],
    pub values: Vec<f64>,
    pub id: String,
}

impl ScalarFieldGrid {
    pub fn new(dims: [usize; 3], values: Vec<f64>, id: impl Into<String>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidField(format!("non-positive dimension in {dims:?}")));
        }
        let expected = dims[0] * dims[1] * dims[2];
        if values.len() != expected {
            return Err(Error::InvalidField(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at vertex {i}")));
        }
        Ok(Self {
            dims,
            values,
            id: id.into(),
        })
    }

    /// Path graph `f[0] - f[1] - ... - f[n-1]`.
    pub fn path(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new([n, 1, 1], values, "")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Face-adjacent neighbours (6-neighbourhood in 3D, 4 in 2D, path in 1D).
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let [nx, ny, nz] = self.dims;
        let x = v % nx;
        let y = (v / nx) % ny;
        let z = v / (nx * ny);
        let candidates = [
            (x > 0).then(|| v - 1),
            (x + 1 < nx).then(|| v + 1),
            (y > 0).then(|| v - nx),
            (y + 1 < ny).then(|| v + nx),
            (z > 0).then(|| v - nx * ny),
            (z + 1 < nz).then(|| v + nx * ny),
        ];
        candidates.into_iter().flatten()
    }

    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// Parses the `.grid` text format. `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };

        let mut lines = text.lines().enumerate().skip_while(|(_, l)| l.trim().is_empty());
        let (header_idx, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing `dims nx ny nz` header".into()))?;
        let header_line = header_idx + 1;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("dims") {
            return Err(err(header_line, "header must start with `dims`".into()));
        }
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            let tok = tokens
                .next()
                .ok_or_else(|| err(header_line, "expected three dimensions".into()))?;
            *d = tok
                .parse()
                .map_err(|_| err(header_line, format!("invalid dimension `{tok}`")))?;
            if *d == 0 {
                return Err(err(header_line, "dimensions must be positive".into()));
            }
        }
        // Values may follow the dims on the header line.
        let expected = dims[0] * dims[1] * dims[2];
        let mut values = Vec::with_capacity(expected);
        let mut last_line = header_line;
        let rest = tokens.map(|t| (header_line, t));
        let body = lines.flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
        for (line, tok) in rest.chain(body) {
            last_line = line;
            let v: f64 = tok
                .parse()
                .map_err(|_| err(line, format!("invalid value `{tok}`")))?;
            if !v.is_finite() {
                return Err(err(line, format!("non-finite value `{tok}`")));
            }
            values.push(v);
        }
        if values.len() != expected {
            return Err(err(
                last_line,
                format!("expected {expected} values, got {}", values.len()),
            ));
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self { dims, values, id })
    }
}

pub fn load_scalar_field(path: impl AsRef<Path>) -> Result<ScalarFieldGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ScalarFieldGrid::parse(&text, path)
}
