//! Block plans on ℤ: the generated plan, its Tempelman ratios, the
//! two-dimensional divergence witness and the unrestricted product count.
//!
//! cargo run --release --example block_plans

use sparse_ergodic::blocks::{divergence_witness, tempelman_sweep, unrestricted_count_identity, BlockPlan, SquarePlan};

fn main() -> sparse_ergodic::Result<()> {
    let plan = BlockPlan::generate(8, 1.0, 1.0)?;
    let v = plan.validate();
    println!("u = {:?}\na = {:?}", plan.u, plan.a);
    println!("wellspaced {}, growingblocks {}, regularity {}", v.wellspaced, v.growingblocks, v.regularity);

    let sw = tempelman_sweep(&plan, false)?;
    println!("\n k   max_r #(A−A)/#A   running max");
    for (k, (m, r)) in sw.max_by_k.iter().zip(&sw.running_max).enumerate() {
        println!("{:2}   {m:16.6}   {r:.6}", k + 1);
    }
    println!("sup = {}", sw.sup_ratio);

    let w = divergence_witness(&SquarePlan::generate(4))?;
    println!("\nwitness ({} norm)", w.norm);
    for r in &w.rows {
        println!(
            "  k = {}: left face average {:.6} (≥ {:.6}), block end average {:.3e}",
            r.k, r.left_face_average, r.left_face_lower_bound, r.block_end_average
        );
    }

    for n in [10, 1_000, 100_000] {
        let c = unrestricted_count_identity(n)?;
        println!("#E_{n} = {}  ratio to n ln n = {:.4}", c.count, c.ratio.unwrap_or(f64::NAN));
    }
    Ok(())
}
