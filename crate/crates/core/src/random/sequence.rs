use super::plaid::{plaid_coin, PlaidConfig};
use super::speckled::{for_each_shell_point, speckled_coin, SpeckledConfig};
use crate::error::{invalid, Result};
use crate::lattice::LatticePoint;

/// Order used for every enumeration: sup-norm first, then lexicographic.
pub fn norm_then_lex(a: &LatticePoint, b: &LatticePoint) -> std::cmp::Ordering {
    a.norm().cmp(&b.norm()).then_with(|| a.cmp(b))
}

/// The first `count` points of the speckled set in `norm_then_lex` order, shells
/// `0..=cfg.jmax`. With `positive_only` only points with all coordinates positive count.
pub fn enumerate_sequence(cfg: &SpeckledConfig, count: usize, positive_only: bool) -> Result<Vec<LatticePoint>> {
    cfg.validate()?;
    let mut out: Vec<LatticePoint> = Vec::with_capacity(count);
    for j in 0..=cfg.jmax {
        if out.len() >= count {
            break;
        }
        crate::error::budget("random.enumerate_sequence", 1 << 31, crate::lattice::shell_size(cfg.d, j))?;
        let p = cfg.probability(j);
        let mut shell = Vec::new();
        for_each_shell_point(cfg.d, j, |n| {
            if (!positive_only || n.iter().all(|&c| c > 0)) && speckled_coin(cfg.seed, n, p) {
                shell.push(LatticePoint::new(n));
            }
        });
        shell.sort_by(norm_then_lex);
        out.extend(shell);
    }
    if out.len() < count {
        return Err(invalid(format!("shells up to j = {} hold {} points, {} requested", cfg.jmax, out.len(), count)));
    }
    out.truncate(count);
    Ok(out)
}

/// The plaid set `{n : ξ_{i,n_i} = 1 for all i}` in `norm_then_lex` order,
/// taken from the cube `[1, 2^{jmax+1} − 1]^d`.
pub fn enumerate_plaid_sequence(cfg: &PlaidConfig, count: usize) -> Result<Vec<LatticePoint>> {
    cfg.validate()?;
    let mut out = Vec::new();
    let mut axes: Vec<Vec<i64>> = vec![Vec::new(); cfg.d];
    for j in 0..=cfg.jmax {
        if out.len() >= count {
            break;
        }
        let lo = 1i64 << j;
        let hi = (1i64 << (j + 1)) - 1;
        for (i, axis) in axes.iter_mut().enumerate() {
            axis.extend((lo..=hi).filter(|&n| plaid_coin(cfg, i, n)));
        }
        // points with sup-norm in [2^j, 2^{j+1}): at least one coordinate ≥ 2^j
        let total: u128 = axes.iter().map(|a| a.len() as u128).product();
        crate::error::budget("random.enumerate_plaid_sequence", 1 << 26, total)?;
        let mut shell = Vec::new();
        let mut pos = vec![0usize; cfg.d];
        if axes.iter().all(|a| !a.is_empty()) {
            loop {
                let n: Vec<i64> = pos.iter().zip(&axes).map(|(&k, a)| a[k]).collect();
                if n.iter().any(|&c| c >= lo) {
                    shell.push(LatticePoint::from(n));
                }
                let mut i = cfg.d;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    pos[i] += 1;
                    if pos[i] < axes[i].len() {
                        done = false;
                        break;
                    }
                    pos[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
        shell.sort_by(norm_then_lex);
        out.extend(shell);
    }
    if out.len() < count {
        return Err(invalid(format!("plaid set up to j = {} holds {} points", cfg.jmax, out.len())));
    }
    out.truncate(count);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_density_positive_axis_is_the_naturals() {
        let cfg = SpeckledConfig { d: 1, gamma: 0.0, seed: 1, jmin: 0, jmax: 8 };
        let seq = enumerate_sequence(&cfg, 300, true).unwrap();
        let expect: Vec<LatticePoint> = (1..=300).map(|n| LatticePoint::from([n])).collect();
        assert_eq!(seq, expect);
    }

    #[test]
    fn ties_are_lexicographic() {
        let cfg = SpeckledConfig { d: 2, gamma: 0.0, seed: 1, jmin: 0, jmax: 2 };
        let seq = enumerate_sequence(&cfg, 24, false).unwrap();
        let a = seq.iter().position(|p| *p == LatticePoint::from([-2, 0])).unwrap();
        let b = seq.iter().position(|p| *p == LatticePoint::from([0, 2])).unwrap();
        assert!(a < b);
        assert!(seq.windows(2).all(|w| norm_then_lex(&w[0], &w[1]).is_lt()));
    }

    #[test]
    fn deterministic_and_guarded() {
        let cfg = SpeckledConfig { d: 2, gamma: 0.8, seed: 7, jmin: 0, jmax: 6 };
        assert_eq!(enumerate_sequence(&cfg, 500, false).unwrap(), enumerate_sequence(&cfg, 500, false).unwrap());
        assert!(enumerate_sequence(&SpeckledConfig { jmax: 2, ..cfg }, 500, false).is_err());
    }

    #[test]
    fn plaid_sequence_is_a_product_in_order() {
        let cfg = PlaidConfig { d: 2, alpha: 0.3, seed: 2, jmin: 1, jmax: 5, diagonal: false };
        let seq = enumerate_plaid_sequence(&cfg, 200).unwrap();
        assert!(seq.windows(2).all(|w| norm_then_lex(&w[0], &w[1]).is_lt()));
        for p in &seq {
            assert!(p.coords().iter().enumerate().all(|(i, &n)| plaid_coin(&cfg, i, n)));
        }
    }
}
