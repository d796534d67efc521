//! Cancellation profile of the speckled measures: ν_j ∗ ν̃_j at the origin,
//! its ℓ² mass and punctured sup, with the OLS slope of log₂ sup in j.
//!
//! cargo run --release --example speckled_cancellation -- [seed]

use sparse_ergodic::random::{speckled_profile, SpeckledConfig};

fn main() -> sparse_ergodic::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = SpeckledConfig { d: 2, gamma: 0.8, seed, jmin: 4, jmax: 9 };
    let prof = speckled_profile(&cfg, 1 << 28)?;
    println!(" j   ν∗ν̃(0)      ‖ν∗ν̃‖₂²     sup_{{x≠0}}     support");
    for r in &prof.rows {
        println!("{:2}   {:9.4}   {:11.4e}   {:11.4e}   {}", r.j, r.at0, r.l2_sq, r.sup_punctured, r.support_size);
    }
    let target = cfg.gamma - 1.5 * cfg.d as f64;
    println!("slope {:?} (decay exponent γ − 3d/2 = {target})", prof.slope);
    println!("origin ratio spread {:?}", prof.origin_ratio_spread);
    Ok(())
}
