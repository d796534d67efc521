use serde::Serialize;

/// A finite subset of ℤ stored as sorted, disjoint, non-adjacent closed intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntervalSet {
    runs: Vec<(i64, i64)>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Normalises arbitrary closed intervals (empty ones with `lo > hi` are dropped).
    pub fn from_intervals(mut v: Vec<(i64, i64)>) -> Self {
        v.retain(|(a, b)| a <= b);
        v.sort_unstable();
        let mut runs: Vec<(i64, i64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match runs.last_mut() {
                Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
                _ => runs.push((a, b)),
            }
        }
        Self { runs }
    }

    pub fn runs(&self) -> &[(i64, i64)] {
        &self.runs
    }

    pub fn len(&self) -> u128 {
        self.runs.iter().map(|(a, b)| (b - a + 1) as u128).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        let i = self.runs.partition_point(|&(_, b)| b < x);
        i < self.runs.len() && self.runs[i].0 <= x
    }

    pub fn is_subset_of(&self, o: &Self) -> bool {
        self.runs.iter().all(|&(a, b)| {
            let i = o.runs.partition_point(|&(_, e)| e < a);
            i < o.runs.len() && o.runs[i].0 <= a && b <= o.runs[i].1
        })
    }

    pub fn union(&self, o: &Self) -> Self {
        Self::from_intervals(self.runs.iter().chain(&o.runs).copied().collect())
    }

    pub fn shift(&self, t: i64) -> Self {
        Self { runs: self.runs.iter().map(|(a, b)| (a + t, b + t)).collect() }
    }

    pub fn intersection_len(&self, o: &Self) -> u128 {
        let (mut i, mut j, mut n) = (0, 0, 0u128);
        while i < self.runs.len() && j < o.runs.len() {
            let (a, b) = self.runs[i];
            let (c, d) = o.runs[j];
            let (lo, hi) = (a.max(c), b.min(d));
            if lo <= hi {
                n += (hi - lo + 1) as u128;
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        n
    }

    /// `F − F`.
    pub fn difference_set(&self) -> Self {
        let mut v = Vec::with_capacity(self.runs.len() * self.runs.len());
        for &(a, b) in &self.runs {
            for &(c, d) in &self.runs {
                v.push((a - d, b - c));
            }
        }
        Self::from_intervals(v)
    }

    pub fn points(&self) -> impl Iterator<Item = i64> + '_ {
        self.runs.iter().flat_map(|&(a, b)| a..=b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn merge_and_count() {
        let s = IntervalSet::from_intervals(vec![(5, 7), (1, 2), (3, 3), (10, 9)]);
        assert_eq!(s.runs(), &[(1, 3), (5, 7)]);
        assert_eq!(s.len(), 6);
        assert!(s.contains(3) && !s.contains(4));
    }

    #[test]
    fn difference_matches_brute_force() {
        let s = IntervalSet::from_intervals(vec![(0, 1), (5, 5), (9, 12)]);
        let pts: Vec<i64> = s.points().collect();
        let brute: BTreeSet<i64> = pts.iter().flat_map(|a| pts.iter().map(move |b| a - b)).collect();
        let dd = s.difference_set();
        assert_eq!(dd.len(), brute.len() as u128);
        assert!(brute.iter().all(|&x| dd.contains(x)));
    }

    #[test]
    fn interval_ratio() {
        for n in 1..50 {
            let s = IntervalSet::from_intervals(vec![(1, n)]);
            assert_eq!(s.difference_set().len(), (2 * n - 1) as u128);
        }
    }
}
