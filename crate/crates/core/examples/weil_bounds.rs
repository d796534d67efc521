//! Fourier transforms of curve measures on 𝔽_p^m against the Weil bound
//! (m − 1)/√p, single primes and products of primes.
//!
//! cargo run --release --example weil_bounds

use sparse_ergodic::arith::{dft_weil_check, product_weil_check};

fn main() -> sparse_ergodic::Result<()> {
    println!(" m     p     max_{{θ≠0}}   bound");
    for m in 2..=3 {
        for p in [7, 11, 13, 31] {
            let r = dft_weil_check(p, m)?;
            println!(
                "{m:2} {p:5}   {:10.6}   {:.6}  {}",
                r.max_nonzero,
                r.bound,
                if r.pass { "ok" } else { "VIOLATED" }
            );
        }
    }
    let r = product_weil_check(&[5, 7], 2)?;
    println!(
        "\nℤ_35: max over all-blocks-nonzero {:.6}, bound {:.6}, unrestricted {:.6}",
        r.max_all_blocks_nonzero, r.bound, r.max_unrestricted
    );
    Ok(())
}
