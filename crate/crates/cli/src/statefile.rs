//! JSON state files: `{"dims": [..], "matrix": [[[re, im], ..], ..], "label": ".."}`.

use std::fmt;
use std::path::Path;

use qbroadcast::linalg::{hermitian_eig, ComplexMatrix};
use qbroadcast::objects::DensityMatrix;
use qbroadcast::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Tolerance of the hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Why a file was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum InvalidState {
    Io(String),
    Parse(String),
    Shape(String),
    NonFinite { row: usize, col: usize },
    Hermiticity(f64),
    Trace(f64),
    Positivity(f64),
}

impl fmt::Display for InvalidState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "cannot read state file: {e}"),
            Self::Parse(e) => write!(f, "malformed state file: {e}"),
            Self::Shape(e) => write!(f, "shape invariant violated: {e}"),
            Self::NonFinite { row, col } => {
                write!(f, "finiteness violated: entry ({row}, {col}) is not a finite number")
            }
            Self::Hermiticity(d) => write!(
                f,
                "hermiticity violated: max |ρ − ρ†| = {d:.3e} (tolerance {STATE_TOL:.0e})"
            ),
            Self::Trace(t) => write!(
                f,
                "trace violated: Tr ρ = {t:.12} (|Tr ρ − 1| = {:.3e})",
                (t - 1.0).abs()
            ),
            Self::Positivity(l) => write!(
                f,
                "positivity violated: minimum eigenvalue {l:.3e} (tolerance −{STATE_TOL:.0e})"
            ),
        }
    }
}

impl std::error::Error for InvalidState {}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix, label: Option<String>) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            dims: rho.dims().to_vec(),
            matrix,
            label,
        }
    }

    pub fn parse(text: &str) -> Result<Self, InvalidState> {
        serde_json::from_str(text).map_err(|e| InvalidState::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, InvalidState> {
        let text = std::fs::read_to_string(path).map_err(|e| InvalidState::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("state files serialize");
        hex::encode(Sha256::digest(bytes))
    }

    /// Checks shape, finiteness, hermiticity, trace and positivity, in that order.
    pub fn to_density(&self) -> Result<DensityMatrix, InvalidState> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(InvalidState::Shape(format!(
                "dims must be nonempty and positive, got {:?}",
                self.dims
            )));
        }
        let n = self
            .dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| InvalidState::Shape(format!("dims {:?} overflow", self.dims)))?;
        if self.matrix.len() != n {
            return Err(InvalidState::Shape(format!(
                "matrix has {} rows but dims {:?} give {n}",
                self.matrix.len(),
                self.dims
            )));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(InvalidState::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(InvalidState::NonFinite { row: i, col: j });
                }
                data.push(Complex64::new(re, im));
            }
        }
        let m = ComplexMatrix::new(n, n, data).expect("square by construction");
        let herm = m.hermiticity_error();
        if herm > STATE_TOL {
            return Err(InvalidState::Hermiticity(herm));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(InvalidState::Trace(tr));
        }
        let h = m.hermitian_part();
        let lmin = hermitian_eig(&h)
            .map_err(|e| InvalidState::Shape(e.to_string()))?
            .min_eigenvalue();
        if lmin < -STATE_TOL {
            return Err(InvalidState::Positivity(lmin));
        }
        DensityMatrix::new(self.dims.clone(), h).map_err(|e| InvalidState::Shape(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbroadcast::corpus::bell;

    #[test]
    fn round_trip() {
        let f = StateFile::from_density(&bell(), Some("bell".into()));
        let back = StateFile::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(back.to_density().unwrap().matrix().max_abs_diff(bell().matrix()) < 1e-15);
        assert_eq!(f.digest().len(), 64);
    }

    fn file(m: &[[f64; 4]]) -> StateFile {
        StateFile {
            dims: vec![2],
            matrix: m.iter().map(|r| vec![[r[0], r[1]], [r[2], r[3]]]).collect(),
            label: None,
        }
    }

    #[test]
    fn rejections_name_the_invariant() {
        let not_herm = file(&[[0.5, 0.0, 0.1, 0.0], [0.0, 0.0, 0.5, 0.0]]);
        assert!(matches!(not_herm.to_density(), Err(InvalidState::Hermiticity(d)) if (d - 0.1).abs() < 1e-12));
        let bad_trace = file(&[[0.6, 0.0, 0.0, 0.0], [0.0, 0.0, 0.6, 0.0]]);
        assert!(matches!(bad_trace.to_density(), Err(InvalidState::Trace(t)) if (t - 1.2).abs() < 1e-12));
        let negative = file(&[[1.2, 0.0, 0.0, 0.0], [0.0, 0.0, -0.2, 0.0]]);
        let err = negative.to_density().unwrap_err();
        assert!(matches!(err, InvalidState::Positivity(l) if (l + 0.2).abs() < 1e-9));
        assert!(err.to_string().contains("positivity"));
        let ragged = StateFile {
            dims: vec![2],
            matrix: vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
            label: None,
        };
        assert!(matches!(ragged.to_density(), Err(InvalidState::Shape(_))));
        assert!(matches!(
            StateFile::parse("{\"dims\": [2]}"),
            Err(InvalidState::Parse(_))
        ));
    }
}
