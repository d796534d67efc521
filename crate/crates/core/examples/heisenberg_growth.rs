//! Word balls in ℤ² and the discrete Heisenberg group: polynomial growth of
//! degree 2 and 4, and a Tempelman ratio of group block plans.
//!
//! cargo run --release --example heisenberg_growth

use sparse_ergodic::groups::{word_ball_growth, GroupBlockPlan, GroupModel, WordBall};

fn main() -> sparse_ergodic::Result<()> {
    for (name, n) in [("z2", 30), ("heis3", 18)] {
        let model = GroupModel::parse(name)?;
        let g = word_ball_growth(&model, n, (2 * n / 3, n))?;
        println!(
            "{name}: #ball(N) for N = 0..5 {:?}, #ball({n}) = {}, slope {:.3}, degree {}, band {:.4}",
            &g.counts[..6],
            g.counts[n as usize],
            g.slope,
            g.degree,
            g.band
        );
    }

    let model = GroupModel::parse("heis3")?;
    let plan = GroupBlockPlan::generate(&model, 3, 2, 1.0)?;
    let ball = WordBall::new(&model, 13)?;
    plan.validate(&ball)?;
    for k in 1..=plan.lengths.len() {
        let r = plan.tempelman(&ball, k, 0)?;
        println!("k = {k}: #A = {}, #(A⁻¹A) = {}, ratio {}", r.size, r.diff_size, r.ratio);
    }
    Ok(())
}
