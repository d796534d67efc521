//! Ergodic averages along the arithmetic sequence for a quadratic torus
//! rotation, and exact averages over a finite torus orbit.
//!
//! cargo run --release --example ergodic_averages

use sparse_ergodic::acceptance::arith_primes_up_to;
use sparse_ergodic::arith::ArithParams;
use sparse_ergodic::dynamics::{evaluate_average, ActionModel, Observable, State};
use sparse_ergodic::lattice::{rat, LatticePoint};

fn main() -> sparse_ergodic::Result<()> {
    let primes = arith_primes_up_to(100_000)?;
    let params = ArithParams::generate(2, 1, primes.clone(), 2.0, 4.0)?;
    let seq = params.sequence(primes.len())?;
    let ends: Vec<usize> = (1..=primes.len()).map(|k| params.block_end(k) as usize).collect();
    let tr = evaluate_average(
        &ActionModel::quadratic_rotation(),
        &Observable::cos_first(2),
        &State::Torus(vec![0.1, 0.2]),
        &seq,
        &ends,
    )?;
    println!("primes {primes:?}");
    for r in &tr.rows {
        println!("N = {:6}: A_N f = {:+.6}  deviation {:+.3e}", r.n, r.value, r.deviation);
    }

    let side = 7u64;
    let values = (0..side * side).map(|i| rat((i % 5) as i128 - 2, 3)).collect();
    let orbit: Vec<LatticePoint> =
        (0..side as i64).flat_map(|x| (0..side as i64).map(move |y| LatticePoint::from([x, y]))).collect();
    let tr = evaluate_average(
        &ActionModel::FiniteTorusShift { side, shifts: vec![vec![1, 0], vec![0, 1]] },
        &Observable::Table { side, values },
        &State::Finite(vec![0, 0]),
        &orbit,
        &[orbit.len()],
    )?;
    println!("\nfull orbit on ℤ_{side}²: A_N f = {:?}, equals the mean: {:?}", tr.rows[0].exact, tr.exact_mean_hits);
    Ok(())
}
