use proptest::prelude::*;
use sparse_ergodic::lattice::{
    cz_decompose, rat, shell_index, shell_size, LatticePoint, Rational, Scalar, SparseMeasure,
};
use sparse_ergodic::oracle;

fn measure(d: usize, max_len: usize) -> impl Strategy<Value = SparseMeasure<Rational>> {
    sized(d, 0, max_len)
}

fn sized(d: usize, min_len: usize, max_len: usize) -> impl Strategy<Value = SparseMeasure<Rational>> {
    prop::collection::vec((prop::collection::vec(-6i64..=6, d), -9i128..=9, 1i128..=4), min_len..max_len).prop_map(
        move |items| {
            let entries = items.into_iter().map(|(c, n, q)| (LatticePoint::new(&c), rat(n, q)));
            SparseMeasure::from_entries(d, entries, "prop").expect("valid entries")
        },
    )
}

fn pair(max_len: usize) -> impl Strategy<Value = (SparseMeasure<Rational>, SparseMeasure<Rational>)> {
    (1usize..=2).prop_flat_map(move |d| (measure(d, max_len), measure(d, max_len)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_matches_pair_scan((a, b) in pair(8)) {
        let c = a.convolve(&b).unwrap();
        for y in a.support() {
            for z in b.support() {
                let x = y.add(z);
                prop_assert_eq!(c.get(&x), oracle::convolution_at(&a, &b, &x));
            }
        }
        for (x, v) in c.iter() {
            prop_assert_eq!(*v, oracle::convolution_at(&a, &b, x));
        }
    }

    #[test]
    fn convolution_commutes_and_adjoint_peaks_at_origin((a, b) in pair(8)) {
        prop_assert!(a.convolve(&b).unwrap().iter().eq(b.convolve(&a).unwrap().iter()));
        let auto = a.convolve(&a.reflect()).unwrap();
        let energy: Rational = a.iter().map(|(_, v)| v * v).sum();
        prop_assert_eq!(auto.get(&LatticePoint::origin(a.dim())), energy);
    }

    #[test]
    fn cz_invariants_hold(f in (1usize..=2).prop_flat_map(|d| measure(d, 12)), num in 1i128..=16, den in 1i128..=4) {
        let f = f.map_values(Scalar::abs);
        let dec = cz_decompose(&f, &rat(num, den)).unwrap();
        let check = dec.check(&f).unwrap();
        prop_assert!(check.all(), "{:?}", check);
    }

    #[test]
    fn jsonl_round_trip(f in (1usize..=3).prop_flat_map(|d| sized(d, 1, 10)).prop_filter("a file needs one entry", |f| !f.is_empty())) {
        let mut buf = Vec::new();
        f.write_jsonl(&mut buf).unwrap();
        let back = SparseMeasure::<Rational>::read_jsonl(buf.as_slice(), "prop").unwrap();
        prop_assert!(back.iter().eq(f.iter()));
    }

    #[test]
    fn shell_index_brackets_norm(c in prop::collection::vec(-1000i64..=1000, 1..=4)) {
        let n = LatticePoint::new(&c);
        match shell_index(&n) {
            None => prop_assert!(n.is_origin()),
            Some(j) => prop_assert!((1u64 << j) <= n.norm() && n.norm() < (1u64 << (j + 1))),
        }
    }
}

#[test]
fn shell_sizes_match_enumeration() {
    for d in 1..=3usize {
        for j in 0..=3u32 {
            let r = (1i64 << (j + 1)) - 1;
            let mut count = 0u128;
            let mut c = vec![-r; d];
            loop {
                if shell_index(&LatticePoint::new(&c)) == Some(j) {
                    count += 1;
                }
                let mut k = 0;
                while k < d && c[k] == r {
                    c[k] = -r;
                    k += 1;
                }
                if k == d {
                    break;
                }
                c[k] += 1;
            }
            assert_eq!(count, shell_size(d, j), "d = {d}, j = {j}");
        }
    }
}
