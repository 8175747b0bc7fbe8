//! Compactified rescaled geodesic flow, closed-form oracles, asymptotic
//! checks, and the linearized (variational) flow along exact-cone
//! baselines.

pub mod asymptotic;
pub mod cone;
pub mod flow;
pub mod linearized;
pub mod phase;
pub mod trajectory;

pub use flow::{boundary_flow, integrate, integrate_entry, integrate_flow, Flow, FlowOptions};
pub use phase::{Chart, PhasePoint};
pub use trajectory::{Arrival, FlowDiagnostics, Trajectory};
