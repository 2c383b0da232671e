//! Parameter sweeps over the Bell-diagonal family `c1 = c2 = c3 = −c` and
//! the Werner family, producing `param,fidelity_purity,linear_purity` rows.

use rayon::prelude::*;

use crate::error::{QresError, Result};
use crate::purity::{fidelity_purity, linear_purity};
use crate::states::{bell_diagonal, werner};

pub const DEFAULT_STEPS: usize = 201;
pub const CSV_HEADER: &str = "param,fidelity_purity,linear_purity";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Bell-diagonal with `c1 = c2 = c3 = −c`, parameter `c`.
    Bell,
    /// Werner state on `C^d ⊗ C^d`, parameter `y`.
    Werner { d: usize },
}

impl Family {
    /// Closed parameter range swept by default.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Family::Bell => (0.0, 1.0),
            Family::Werner { .. } => (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub from: f64,
    pub to: f64,
    /// Number of rows, endpoints included.
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(family: Family) -> Self {
        let (from, to) = family.default_range();
        Self {
            family,
            from,
            to,
            steps: DEFAULT_STEPS,
        }
    }

    /// `from + (to − from)·i/(steps − 1)`; the last row is exactly `to`.
    pub fn param(&self, i: usize) -> f64 {
        if self.steps == 1 {
            return self.from;
        }
        if i + 1 == self.steps {
            return self.to;
        }
        self.from + (self.to - self.from) * i as f64 / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub fidelity_purity: f64,
    pub linear_purity: f64,
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if !spec.from.is_finite() || !spec.to.is_finite() || spec.from > spec.to {
        return Err(QresError::InvalidParameter(format!(
            "invalid range: --from {} --to {}",
            spec.from, spec.to
        )));
    }
    if spec.steps == 0 {
        return Err(QresError::InvalidParameter(
            "invalid range: --steps must be positive".into(),
        ));
    }
    (0..spec.steps)
        .into_par_iter()
        .map(|i| {
            let param = spec.param(i);
            let state = match spec.family {
                Family::Bell => bell_diagonal(-param, -param, -param)?,
                Family::Werner { d } => werner(d, param)?,
            };
            Ok(SweepRow {
                param,
                fidelity_purity: fidelity_purity(state.density(), None),
                linear_purity: linear_purity(state.density()),
            })
        })
        .collect()
}

/// Header plus one LF-terminated line per row, shortest round-trip floats.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.param, r.fidelity_purity, r.linear_purity
        ));
    }
    out
}

/// `tr ρ²` of the constructed Werner matrix `aI + bF`:
/// `a²d² + 2abd + b²d²` with `a = (d−y)/(d³−d)`, `b = (yd−1)/(d³−d)`.
pub fn werner_linear_purity(d: usize, y: f64) -> f64 {
    let df = d as f64;
    let norm = df * df * df - df;
    let (a, b) = ((df - y) / norm, (y * df - 1.0) / norm);
    a * a * df * df + 2.0 * a * b * df + b * b * df * df
}

/// The closed form often quoted for two-qubit Werner purity, `(4y² − 2y + 1)/9`.
pub fn werner_quoted_purity(y: f64) -> f64 {
    (4.0 * y * y - 2.0 * y + 1.0) / 9.0
}

/// Remarks attached to a sweep report.
pub fn notes(spec: &SweepSpec) -> Vec<String> {
    match spec.family {
        Family::Bell => {
            vec!["bell: closed forms tr rho^2 = (1 + 3c^2)/4 and P_F = log4(1 + 3c^2)".into()]
        }
        Family::Werner { d } => {
            let mut notes = vec![format!(
                "werner d={d}: purities computed from the constructed matrix ((d-y) I + (yd-1) F)/(d^3-d); \
                 tr rho^2 = a^2 d^2 + 2abd + b^2 d^2 with a = (d-y)/(d^3-d), b = (yd-1)/(d^3-d)"
            )];
            if d == 2 {
                notes.push(format!(
                    "werner d=2: the constructed matrix gives tr rho^2 = (y^2 - y + 1)/3; the commonly quoted \
                     closed form (4y^2 - 2y + 1)/9 disagrees except at y = 1 (e.g. y = -1: {} vs {}, y = 0: {} vs {})",
                    werner_linear_purity(2, -1.0),
                    werner_quoted_purity(-1.0),
                    werner_linear_purity(2, 0.0),
                    werner_quoted_purity(0.0),
                ));
            }
            notes
        }
    }
}
