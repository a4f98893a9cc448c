//! On-disk state format.
//!
//! A state file is a single JSON document:
//!
//! ```json
//! {
//!   "format_version": "1",
//!   "dims": [2, 2],
//!   "matrix": [[[re, im], [re, im], ...], ...]
//! }
//! ```
//!
//! `matrix` holds one array per row of the composite matrix, row-major over
//! the subsystem-1-major composite index; each entry is an `[re, im]` pair.
//! Numbers are written with 17 significant digits, so saving and reloading
//! reproduces every double-precision entry exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use birank::{BipartiteDims, ComplexMatrix, DensityOperator};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub format_version: String,
    pub dims: [usize; 2],
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("cannot parse state file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("unsupported format_version {found:?}, expected {FORMAT_VERSION:?}")]
    Version { found: String },

    #[error("matrix shape does not match dims [{dim_a}, {dim_b}]: {detail}")]
    Shape {
        dim_a: usize,
        dim_b: usize,
        detail: String,
    },

    #[error("invalid density operator: {0}")]
    Invalid(#[from] birank::Error),
}

/// Writes every f64 with 17 significant digits so that parsing recovers the
/// exact double.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

impl StateFile {
    pub fn from_operator(rho: &DensityOperator) -> Self {
        let dims = rho.dims();
        let n = dims.composite();
        let m = rho.matrix();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = m.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION.to_owned(),
            dims: [dims.dim_a(), dims.dim_b()],
            matrix,
        }
    }

    /// Validates the document and rebuilds the operator; every
    /// density-operator invariant is re-checked on load.
    pub fn to_operator(&self) -> Result<DensityOperator, LoadError> {
        if self.format_version != FORMAT_VERSION {
            return Err(LoadError::Version {
                found: self.format_version.clone(),
            });
        }
        let dims = BipartiteDims::new(self.dims[0], self.dims[1])?;
        let n = dims.composite();
        if self.matrix.len() != n {
            return Err(LoadError::Shape {
                dim_a: self.dims[0],
                dim_b: self.dims[1],
                detail: format!("expected {n} rows, got {}", self.matrix.len()),
            });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(LoadError::Shape {
                    dim_a: self.dims[0],
                    dim_b: self.dims[1],
                    detail: format!("row {i} has {} entries, expected {n}", row.len()),
                });
            }
            entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        let matrix = ComplexMatrix::new(n, n, entries)?;
        Ok(DensityOperator::new(dims, matrix)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), LoadError> {
        let as_io = |source: io::Error| LoadError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = fs::File::create(path).map_err(as_io)?;
        let mut writer = io::BufWriter::new(file);
        let mut serializer = serde_json::Serializer::with_formatter(&mut writer, SigFigFormatter);
        self.serialize(&mut serializer)?;
        writer.write_all(b"\n").map_err(as_io)?;
        writer.flush().map_err(as_io)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}
