//! Dense helpers for the fast autocorrelation paths.

/// Mixed-radix layout of the cube `[−h, h]^d`; flat order is lexicographic.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub d: usize,
    pub h: i64,
    pub side: usize,
    pub strides: Vec<i64>,
}

impl Grid {
    pub fn new(d: usize, h: i64) -> Self {
        let side = (2 * h + 1) as usize;
        let mut strides = vec![1i64; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * side as i64;
        }
        Self { d, h, side, strides }
    }

    pub fn cells(&self) -> u128 {
        (self.side as u128).pow(self.d as u32)
    }

    /// Signed code with the origin at 0; `code(x) − code(y) = code(x − y)`.
    pub fn code(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn center(&self) -> i64 {
        self.code(&vec![self.h; self.d])
    }
}

/// Advances `x` through `[−h, h]^d` in lexicographic order; false at the end.
pub(crate) fn odometer(x: &mut [i64], h: i64) -> bool {
    for i in (0..x.len()).rev() {
        if x[i] < h {
            x[i] += 1;
            return true;
        }
        x[i] = -h;
    }
    false
}

/// Replaces `data` (laid out on `grid`) by its sums over sup-norm balls of radius `l`,
/// clipped to the grid. Separable: one sliding window per axis.
pub(crate) fn box_filter(grid: &Grid, data: &mut [i32], l: i64) {
    let side = grid.side;
    for axis in 0..grid.d {
        let stride = grid.strides[axis] as usize;
        if stride == 1 {
            let mut pre = vec![0i32; side + 1];
            for line in data.chunks_mut(side) {
                for k in 0..side {
                    pre[k + 1] = pre[k] + line[k];
                }
                for (k, v) in line.iter_mut().enumerate() {
                    let lo = k.saturating_sub(l as usize);
                    let hi = (k + l as usize).min(side - 1);
                    *v = pre[hi + 1] - pre[lo];
                }
            }
            continue;
        }
        let mut tmp = vec![0i32; side * stride];
        // rows of length `stride` are contiguous, so every pass streams memory
        for chunk in data.chunks_mut(side * stride) {
            for k in 1..side {
                let (prev, cur) = chunk[(k - 1) * stride..(k + 1) * stride].split_at_mut(stride);
                for (c, p) in cur.iter_mut().zip(prev.iter()) {
                    *c += p;
                }
            }
            for k in 0..side {
                let hi = (k + l as usize).min(side - 1);
                let out = &mut tmp[k * stride..(k + 1) * stride];
                out.copy_from_slice(&chunk[hi * stride..(hi + 1) * stride]);
                if k as i64 > l {
                    let lo = k - l as usize - 1;
                    for (o, v) in out.iter_mut().zip(&chunk[lo * stride..(lo + 1) * stride]) {
                        *o -= v;
                    }
                }
            }
            chunk.copy_from_slice(&tmp);
        }
    }
}

/// `#{y ∈ [−la, la] : y − x ∈ [−lb, lb]}`.
#[inline]
pub(crate) fn overlap_1d(la: i64, lb: i64, x: i64) -> i64 {
    ((la).min(lb + x) - (-la).max(-lb + x) + 1).max(0)
}

/// Ordinary least squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_filter_matches_brute_force() {
        let pts: Vec<Vec<i64>> = vec![vec![0, 0], vec![-3, 2], vec![3, 3], vec![1, -2], vec![1, -2]];
        let g = Grid::new(2, 4);
        let c = g.center();
        for l in [0, 1, 2, 5] {
            let mut data = vec![0i32; g.cells() as usize];
            for p in &pts {
                data[(g.code(p) + c) as usize] += 1;
            }
            box_filter(&g, &mut data, l);
            let mut x = vec![-4, -4];
            loop {
                let brute = pts.iter().filter(|p| (p[0] - x[0]).abs() <= l && (p[1] - x[1]).abs() <= l).count() as i32;
                assert_eq!(data[(g.code(&x) + c) as usize], brute);
                if !odometer(&mut x, 4) {
                    break;
                }
            }
        }
    }

    #[test]
    fn overlap() {
        assert_eq!(overlap_1d(3, 3, 0), 7);
        assert_eq!(overlap_1d(3, 1, 3), 2);
        assert_eq!(overlap_1d(1, 1, 5), 0);
    }

    #[test]
    fn slope() {
        let xs = [1.0, 2.0, 3.0];
        assert!((ols_slope(&xs, &[2.0, 4.0, 6.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(ols_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn grid_codes_are_lexicographic() {
        let g = Grid::new(2, 2);
        let mut x = vec![-2, -2];
        let mut prev = g.code(&x);
        while odometer(&mut x, 2) {
            let c = g.code(&x);
            assert_eq!(c, prev + 1);
            prev = c;
        }
        assert_eq!(g.code(&[0, 0]) + g.center(), (g.cells() / 2) as i64);
    }
}
