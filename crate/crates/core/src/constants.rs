use serde::{Deserialize, Serialize};

/// Numerical constants shared by the pipelines. `c0` and `c1` are the
/// regularity and averaging constants; the rest are desk-scale budgets for
/// constants that are only determined up to an absolute factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    pub c0: f64,
    pub c1: f64,
    /// Starting annihilator radius constant, halved on failed post-checks.
    pub c_ann: f64,
    pub c_ann_halvings: u32,
    /// Budget in `m <= C eta^-2 l(tau)`.
    pub c_chang: f64,
    /// Density control `exp(-C m log m)` for annihilating Bohr systems.
    pub c_ctl: f64,
    /// Radius constant for the L^2 increment step.
    pub c_step: f64,
    /// Number of points in the regularity grid (odd).
    pub regularity_points: usize,
    /// Number of dilation factors tried when regularizing.
    pub lambda_points: usize,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c0: 32.0,
            c1: 64.0,
            c_ann: 0.125,
            c_ann_halvings: 20,
            c_chang: 16.0,
            c_ctl: 4.0,
            c_step: 1.0 / 64.0,
            regularity_points: 41,
            lambda_points: 64,
        }
    }
}

/// `l(x) = log(e / x) = 1 - ln x`.
pub fn ell(x: f64) -> f64 {
    1.0 - x.ln()
}
