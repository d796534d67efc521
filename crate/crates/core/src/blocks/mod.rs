//! Block constructions: plans with their growth conditions, intermediate
//! sets, difference-set diagnostics, the square-block divergence witness and
//! the unrestricted-rectangle count.

mod corners;
mod count;
mod intervals;
mod plan;
mod tempelman;
mod witness;

pub use corners::{corners_first_check, union_volume, CornerPlan, CornerRow, CornersReport, LatticeBox};
pub use count::{unrestricted_count_identity, unrestricted_divergence_count, UnrestrictedCount};
pub use intervals::IntervalSet;
pub use plan::{tempelman_sweep, BlockPlan, PlanValidation, SweepRow, TempelmanSweep};
pub use tempelman::{difference_count, difference_report, product_set, tempelman_folner_report, TempelmanReport};
pub use witness::{divergence_witness, DivergenceWitnessReport, SquarePlan, WitnessRow};
