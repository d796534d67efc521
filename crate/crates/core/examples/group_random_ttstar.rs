//! Random subsets of a group: a sample at one scale, powers of T*T, the
//! sampled operator norm and the three-colouring of dependent pairs.
//!
//! cargo run --release --example group_random_ttstar -- [seed]

use sparse_ergodic::groups::{
    op_norm_check, sample_group_random, three_color_partition, tt_star_norm, verify_coloring, GroupModel, WordBall,
};
use sparse_ergodic::lattice::LatticePoint;

fn main() -> sparse_ergodic::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let model = GroupModel::parse("z2")?;
    let j = 3;
    let ball = WordBall::new(&model, 1 << j)?;
    let smp = sample_group_random(&ball, 0.5, j, seed)?;
    println!("support {}, Σ Var = {:.4e}", smp.support_size(), smp.variance_sum());
    let nu = smp.nu();
    for m in 1..=3 {
        let t = tt_star_norm(&nu, m)?;
        println!("m = {m}: ‖(ν̃∗ν)^m‖₁ = {:.4e}, ‖·‖₂ = {:.4e}, op bound {:.4e}", t.l1, t.l2, t.op_upper);
    }
    let (worst, bound) = op_norm_check(&nu, &ball, 1 << j, 10, seed)?;
    println!("sampled ‖ν∗φ‖/‖φ‖ = {worst:.4e} ≤ {bound:.4e}");

    let e: Vec<LatticePoint> =
        ball.within(6).iter().filter(|g| (g.coords()[0] + 2 * g.coords()[1]).rem_euclid(7) != 0).cloned().collect();
    let h = LatticePoint::from([1, 0]);
    let c = three_color_partition(&model, &e, &h)?;
    println!(
        "pairs for h = {h:?}: {} in {} classes ({} paths, {} even and {} odd cycles), valid {}",
        c.domain(),
        c.classes.len(),
        c.paths,
        c.even_cycles,
        c.odd_cycles,
        verify_coloring(&model, &e, &h, &c)
    );
    Ok(())
}
