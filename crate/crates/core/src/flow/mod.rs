//! Vector fields, adaptive integration with events, equilibria and index.

mod equilibria;
mod field;
mod integrate;

pub use equilibria::{classify_equilibria, field_index, Equilibrium, EquilibriumKind};
pub use field::{Field, VectorField};
pub use integrate::{integrate, DenseSegment, Event, EventRecord, IntegrateOptions, Trajectory};

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Serialize)]
pub enum FlowError {
    /// Finite-time escape: step-size underflow with a large state, or the
    /// configured norm cap was exceeded.
    #[error("blow-up at t = {t}: |x| = {norm:e}")]
    BlowUp { t: f64, state: Vec<f64>, norm: f64 },
    #[error("trajectory reached a pole of the field at t = {t}")]
    Pole { t: f64, state: Vec<f64> },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, state: Vec<f64> },
    #[error("step limit of {0} exceeded")]
    StepLimit(usize),
}

impl FlowError {
    pub fn is_blowup(&self) -> bool {
        matches!(self, FlowError::BlowUp { .. })
    }
}
