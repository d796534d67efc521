//! From 𝔽_p^m to ℤ^d: the smoothed curve measure, the Freiman lift and the
//! majorant ν‴, and the ℓ¹ norm of the smoothing kernel Ψ.
//!
//! cargo run --release --example transfer_operators

use sparse_ergodic::arith::{gamma_transfer, smoothing_psi_l1};

fn main() -> sparse_ergodic::Result<()> {
    for (p, q, d) in [(11, 1, 2), (13, 2, 1), (23, 1, 2)] {
        let r = gamma_transfer(p, q, d, 50, 1)?;
        println!(
            "p = {p}, q = {q}, d = {d}: #supp μ‴ = {} (≤ {}), radius {}, majorized {}, ‖ν‴‖₁ = {:.4} ≤ {:.4}, Fourier error {:.1e}",
            r.mu_support, r.mu_support_bound, r.support_radius, r.majorization, r.nu_l1, r.nu_l1_bound, r.fourier_identity_error
        );
    }
    println!();
    for p in [11, 31, 101, 401] {
        let r = smoothing_psi_l1(p, 1.0 / (2.0 * p as f64), 1.0)?;
        println!("p = {p:4}: ‖Ψ‖₁ = {:9.3}, ‖Ψ‖₁ / p = {:.4}", r.l1, r.ratio);
    }
    Ok(())
}
