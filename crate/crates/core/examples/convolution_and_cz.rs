//! Exact rational convolution and a Calderón–Zygmund decomposition at a few
//! heights, followed by the speckled height split of each bad level.
//!
//! cargo run --release --example convolution_and_cz

use sparse_ergodic::lattice::{
    cz_decompose, rat, split_by_height, LatticePoint, Rational, SparseMeasure, SplitVariant,
};
use sparse_ergodic::oracle;

fn main() -> sparse_ergodic::Result<()> {
    let a = SparseMeasure::from_entries(
        2,
        [([0, 0], rat(3, 2)), ([1, 0], rat(1, 3)), ([0, 5], rat(-2, 1))].map(|(c, v)| (LatticePoint::from(c), v)),
        "a",
    )?;
    let ab = a.convolve(&a.reflect())?;
    println!("a * ã has {} points, value at 0 = {}", ab.len(), ab.get(&LatticePoint::origin(2)));
    for (x, v) in ab.iter() {
        assert_eq!(*v, oracle::convolution_at(&a, &a.reflect(), x));
    }

    // a spike, a dense cluster and a few scattered points
    let mut f = SparseMeasure::<Rational>::zero(2, "f");
    f.add_at(LatticePoint::from([3, 3]), &rat(40, 1))?;
    for x in 8..12 {
        for y in 0..3 {
            f.add_at(LatticePoint::from([x, y]), &rat(5, 2))?;
        }
    }
    for c in [[-20, 7], [15, -9], [30, 30]] {
        f.add_at(LatticePoint::from(c), &rat(1, 1))?;
    }

    for lambda in [rat(1, 4), rat(1, 1), rat(4, 1)] {
        let cz = cz_decompose(&f, &lambda)?;
        let check = cz.check(&f)?;
        println!(
            "\nλ = {lambda}: {} cubes, good support {}, invariants hold: {}",
            cz.bad.len(),
            cz.good.len(),
            check.all()
        );
        for (q, b) in &cz.bad {
            println!("  cube level {} index {:?}  mass {}", q.level, q.index, b.total_mass()?);
        }
        let variant = SplitVariant::Speckled { gamma: 0.8 };
        for j in [2, 4] {
            for h in split_by_height(&cz, j, variant)? {
                let c = h.check(&cz.bad_at_level(h.level)?, variant)?;
                println!(
                    "  j = {j}, level {}: selected {}, retained {}, partition {}, bounded {}",
                    h.level,
                    h.selected.len(),
                    h.retained.len(),
                    c.partition,
                    c.retained_bounded
                );
            }
        }
    }
    Ok(())
}
