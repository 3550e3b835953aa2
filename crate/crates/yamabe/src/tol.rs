//! Central tolerance defaults.
//!
//! Identity residuals scale with the jet order of the content being checked:
//! low-order algebra sits near rounding, while fifth- and sixth-derivative
//! identities accumulate more cancellation. Every consumer takes a
//! `Tolerances` value so configs and the CLI `--tol-scale` flag can adjust
//! them uniformly.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Soliton-equation gate before the derived identities are asserted.
    pub ys_gate: f64,
    /// Pass level for the soliton identity suite (trace and commutation
    /// identities, order ≤ 3 content).
    pub soliton_identity: f64,
    /// Order ≤ 3 structural checks (Cotton symmetry, trace-freeness).
    pub order3: f64,
    /// Divergence-of-Bach identity, jet order 5.
    pub divb: f64,
    /// Cotton–Ricci contraction identity, jet order 5.
    pub m2: f64,
    /// Double-divergence identity, jet order 6.
    pub ddiv: f64,
    /// Trajectory classification thresholds.
    pub classify: f64,
    /// Curvature-consistency residual of R'' estimated from dense output.
    pub rpp: f64,
    /// Drift bound for the conserved quantity on balanced trajectories.
    pub c_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ys_gate: 1e-8,
            soliton_identity: 1e-8,
            order3: 1e-9,
            divb: 1e-5,
            m2: 1e-6,
            ddiv: 1e-4,
            classify: 1e-6,
            rpp: 1e-5,
            c_drift: 1e-6,
        }
    }
}

impl Tolerances {
    /// Multiply every threshold by a common factor.
    pub fn scaled(&self, factor: f64) -> Tolerances {
        Tolerances {
            ys_gate: self.ys_gate * factor,
            soliton_identity: self.soliton_identity * factor,
            order3: self.order3 * factor,
            divb: self.divb * factor,
            m2: self.m2 * factor,
            ddiv: self.ddiv * factor,
            classify: self.classify * factor,
            rpp: self.rpp * factor,
            c_drift: self.c_drift * factor,
        }
    }
}
