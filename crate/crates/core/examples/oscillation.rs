//! Oscillation machinery for the arithmetic averages: block sups of the
//! multiplier error, the telescoping sum and gradient ratios.
//!
//! cargo run --release --example oscillation

use sparse_ergodic::arith::{osc_profile, ArithParams, OscConfig};

fn main() -> sparse_ergodic::Result<()> {
    let params = ArithParams::generate(2, 1, vec![5, 11, 23, 47, 97], 2.0, 4.0)?;
    let cfg = OscConfig { params, grid: 64, torus: 64, lacunary_ratio: 2.0, samples: 10, seed: 1 };
    let prof = osc_profile(&cfg)?;
    for b in &prof.blocks {
        println!("block {} at n = {}: sup |m_n − m̃_n| = {:.4e}", b.k, b.n, b.sup);
    }
    println!("decreasing triple: {}", prof.decreasing_triple);
    println!("telescoping excess over ‖f‖² (≤ 0 expected): {:.4e}", prof.telescoping_max_excess);
    for g in prof.gradients.iter().take(8) {
        println!("t = {}, k = {}: gradient {:.4e}, over block side {:.4e}", g.t, g.k, g.gradient, g.over_block_side);
    }
    Ok(())
}
