//! Finitely generated groups: word balls and growth, block sequences, random
//! subsets with their `TT*` norms, the three-coloring of pair variables, and
//! gap and density diagnostics.

mod ball;
mod blocks;
mod coloring;
mod gaps;
mod measure;
mod model;
mod random;

pub use ball::{metric_checks, word_ball_growth, GrowthReport, WordBall, BALL_MAX_ELEMENTS};
pub use blocks::GroupBlockPlan;
pub use coloring::{pair_domain, three_color_partition, verify_coloring, ThreeColoring};
pub use gaps::{banach_density_estimate, cantor_sequence, gap_profile_and_thin, min_gaps, BanachEstimate, GapProfile};
pub use measure::{tt_star_norm, GroupMeasure, TtStar, GROUP_CONV_MAX_PAIRS};
pub use model::GroupModel;
pub use random::{
    group_random_contains, group_random_profile, marginal_probability, moment_sweep_z2, op_norm_check,
    sample_group_random, GroupRandomProfile, GroupRandomSample, GroupScaleRow, MomentRow, MomentSweep,
};
