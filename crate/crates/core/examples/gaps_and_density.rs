//! Gap profiles and thinning of a sequence, then Banach density lower bounds
//! for the speckled set in ℤ² with king-move generators.
//!
//! cargo run --release --example gaps_and_density

use sparse_ergodic::groups::{banach_density_estimate, cantor_sequence, gap_profile_and_thin, GroupModel, WordBall};
use sparse_ergodic::random::{enumerate_sequence, speckled_contains, SpeckledConfig};

fn main() -> sparse_ergodic::Result<()> {
    let z1 = GroupModel::parse("z1")?;
    let seq = cantor_sequence((1 << 12) - 1);
    let prof = gap_profile_and_thin(&z1, &seq, &[1, 2, 4], 0.1)?;
    println!(
        "Cantor: schedule {:?}, kept {}/{}, verified {}",
        prof.schedule,
        prof.kept.len(),
        seq.len(),
        prof.verify_thinned(&z1, &seq)?
    );

    let king = GroupModel::parse("king2")?;
    let cfg = SpeckledConfig { d: 2, gamma: 0.8, seed: 1, jmin: 0, jmax: 12 };
    let seq = enumerate_sequence(&cfg, 4000, false)?;
    let prof = gap_profile_and_thin(&king, &seq, &[1, 2, 4, 8], 0.05)?;
    println!("speckled: schedule {:?}, n_k/k at 3000 = {:?}", prof.schedule, prof.index_ratio(3000));

    let ball = WordBall::new(&king, 96)?;
    let member = |g: &_| speckled_contains(&SpeckledConfig { jmax: 62, ..cfg }, g);
    let shifts = vec![king.identity()];
    for n in [8, 16, 32] {
        let e = banach_density_estimate(&ball, n, member, &shifts)?;
        println!("N = {n:2}: #ball {:5}, density ≥ {:.4}", e.ball_size, e.lower_bound);
    }
    Ok(())
}
