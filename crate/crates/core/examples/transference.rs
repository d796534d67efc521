//! Maximal functions on ℤ² and their transference to a finite torus: the
//! level-set density on ℤ_L² is compared with the group-side density.
//!
//! cargo run --release --example transference

use sparse_ergodic::dynamics::{ball_family, maximal_function_window, transference_check};
use sparse_ergodic::lattice::{rat, LatticePoint, SparseMeasure};
use sparse_ergodic::random::speckled_family;

fn main() -> sparse_ergodic::Result<()> {
    let family = speckled_family(2, 0.8, 1, 1, 5)?;
    let delta = SparseMeasure::delta(LatticePoint::origin(2), 1.0, "δ");
    let w = maximal_function_window(&delta, &family, 64, &[0.5, 0.25, 0.125, 0.0625])?;
    println!("speckled maximal function of δ₀: max {:.4}", w.max);
    for (l, c) in &w.distribution {
        println!("  λ = {l:<7} #{{Mδ > λ}} = {c:4}   λ·count = {:.2}", l * *c as f64);
    }

    let side = 64u64;
    let mut f = vec![0i64; (side * side) as usize];
    f[(20 * side + 33) as usize] = 1;
    let rep = transference_check(side, &f, &ball_family(2, &[0, 1, 2])?, 8, &[rat(1, 10), rat(1, 5), rat(1, 2)])?;
    println!("\ntorus ℤ_{side}², K = {}, edge factor {}", rep.k, rep.edge_factor_exact);
    for r in &rep.rows {
        println!(
            "  λ = {:5}: dynamic {:.5}, group {:.5}, bound {:.5}, holds {}",
            r.lambda, r.dynamic_density, r.group_density, r.bound, r.holds
        );
    }
    Ok(())
}
