//! Measure-preserving actions, ergodic averages along constructed sequences,
//! maximal functions on windows, and transference on finite tori.

mod action;
mod average;
mod maximal;
mod observable;
mod transfer;

pub use action::{ActionModel, State};
pub use average::{evaluate_average, AverageTrace, CompensatedSum, OscillationSums, TraceRow};
pub use maximal::{maximal_function_window, MaximalWindow};
pub use observable::Observable;
pub use transfer::{ball_family, transference_check, IntMeasure, TransferReport, TransferRow};
