//! JSON state files.
//!
//! ```json
//! { "dims": [2, 2], "matrix": [[[0.5, 0.0], [0.0, 0.0], ...], ...] }
//! ```
//!
//! `dims` is `[d]` for a single system or `[d_a, d_b]` for a bipartite one;
//! each matrix entry is a `[re, im]` pair.

use serde::{Deserialize, Serialize};

use crate::error::{QresError, Result};
use crate::linalg::{check_dim, ComplexMatrix, C64};
use crate::states::{BipartiteState, DensityMatrix};

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Single(DensityMatrix),
    Bipartite(BipartiteState),
}

impl StateSpec {
    pub fn density(&self) -> &DensityMatrix {
        match self {
            StateSpec::Single(rho) => rho,
            StateSpec::Bipartite(b) => b.density(),
        }
    }

    /// A single system is treated as `(d, 1)`: the measured factor is the
    /// whole system and the other factor is trivial.
    pub fn as_bipartite(&self) -> BipartiteState {
        match self {
            StateSpec::Single(rho) => {
                BipartiteState::new(rho.clone(), (rho.dim(), 1)).expect("d x 1 always factors")
            }
            StateSpec::Bipartite(b) => b.clone(),
        }
    }
}

pub fn parse_state(text: &str) -> Result<StateSpec> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| QresError::Parse(e.to_string()))?;
    let n = file.matrix.len();
    let expected = match file.dims.as_slice() {
        [d] => *d,
        [da, db] => da * db,
        other => {
            return Err(QresError::Parse(format!(
                "\"dims\" must have one or two entries, got {}",
                other.len()
            )))
        }
    };
    if file.dims.contains(&0) {
        return Err(QresError::Parse("\"dims\" entries must be positive".into()));
    }
    check_dim(expected)?;
    if n != expected {
        return Err(QresError::DimensionMismatch(format!(
            "\"dims\" imply a {expected}x{expected} matrix but \"matrix\" has {n} rows"
        )));
    }
    let rows: Vec<Vec<C64>> = file
        .matrix
        .iter()
        .map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)).collect())
        .collect();
    let mat = ComplexMatrix::from_rows(&rows)?;
    if !mat.is_square() {
        return Err(QresError::DimensionMismatch(format!(
            "\"matrix\" must be square, got {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    let rho = DensityMatrix::new(mat)?;
    Ok(match file.dims.as_slice() {
        [da, db] => StateSpec::Bipartite(BipartiteState::new(rho, (*da, *db))?),
        _ => StateSpec::Single(rho),
    })
}

pub fn read_state(path: &std::path::Path) -> Result<StateSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QresError::Parse(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

pub fn state_to_json(state: &StateSpec) -> String {
    let (dims, m) = match state {
        StateSpec::Single(rho) => (vec![rho.dim()], rho.matrix()),
        StateSpec::Bipartite(b) => (vec![b.dims().0, b.dims().1], b.matrix()),
    };
    let matrix = (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect();
    serde_json::to_string(&StateFile { dims, matrix }).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::bell_phi_plus;

    #[test]
    fn round_trip_bell() {
        let spec = StateSpec::Bipartite(bell_phi_plus());
        let text = state_to_json(&spec);
        assert_eq!(parse_state(&text).unwrap(), spec);
    }

    #[test]
    fn single_system() {
        let text = r#"{"dims":[2],"matrix":[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]}"#;
        let spec = parse_state(text).unwrap();
        assert!(matches!(spec, StateSpec::Single(_)));
        assert_eq!(spec.as_bipartite().dims(), (2, 1));
    }

    #[test]
    fn rejects_invalid_states() {
        let bad_trace = r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        let err = parse_state(bad_trace).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
        let wrong_dims = r#"{"dims":[2,2],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(
            parse_state(wrong_dims),
            Err(QresError::DimensionMismatch(_))
        ));
        assert!(matches!(parse_state("{"), Err(QresError::Parse(_))));
        let ragged = r#"{"dims":[2],"matrix":[[[1,0]],[[0,0],[0,0]]]}"#;
        assert!(parse_state(ragged).is_err());
        let non_herm = r#"{"dims":[2],"matrix":[[[0.5,0],[0.5,0]],[[0,0],[0.5,0]]]}"#;
        assert!(parse_state(non_herm)
            .unwrap_err()
            .to_string()
            .contains("Hermitian"));
    }

    #[test]
    fn rejects_oversized() {
        let text = r#"{"dims":[100, 100],"matrix":[]}"#;
        assert!(matches!(
            parse_state(text),
            Err(QresError::DimensionTooLarge { .. })
        ));
    }
}
