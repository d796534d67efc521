use super::action::{ActionModel, State};
use super::observable::Observable;
use crate::arith::lacunary_times;
use crate::error::{invalid, Result};
use crate::lattice::{rat, LatticePoint, Rational, Scalar};
use serde::{Deserialize, Serialize};

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub value: f64,
    pub deviation: f64,
    /// Exact `A_N f` on finite models.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationSums {
    pub lacunary: Vec<usize>,
    /// `t_n`: every other lacunary time.
    pub times: Vec<usize>,
    /// `Σ_n (sup_{t ∈ I ∩ [t_{n−1}, t_n]} |A_t f − A_{t_n} f|)²`.
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageTrace {
    pub rows: Vec<TraceRow>,
    pub target: f64,
    /// Largest deviation over the last half of the schedule.
    pub tail_deviation: f64,
    pub oscillation: OscillationSums,
    /// On finite models, whether each scheduled `A_N f` equals the mean exactly.
    pub exact_mean_hits: Option<Vec<bool>>,
}

/// `A_N f(x₀) = (1/N) Σ_{k≤N} f(T(n_k)x₀)` at every `N` of the schedule, by prefix sums.
pub fn evaluate_average(
    action: &ActionModel,
    f: &Observable,
    x0: &State,
    enumeration: &[LatticePoint],
    schedule: &[usize],
) -> Result<AverageTrace> {
    action.validate()?;
    let n_max = schedule.iter().copied().max().ok_or_else(|| invalid("empty schedule"))?;
    if n_max > enumeration.len() || schedule.contains(&0) {
        return Err(invalid(format!("schedule reaches {n_max} but the enumeration has {} points", enumeration.len())));
    }
    let finite = matches!(action, ActionModel::FiniteTorusShift { .. });
    let lacunary: Vec<usize> = lacunary_times(2.0, n_max as u64).into_iter().map(|t| t as usize).collect();
    let mut wanted = vec![false; n_max + 1];
    for &n in schedule.iter().chain(&lacunary) {
        wanted[n] = true;
    }
    let target = match action {
        ActionModel::TorusRotation { .. } => f.torus_mean(action.space_dim()),
        ActionModel::FiniteTorusShift { side, .. } => f.finite_mean(*side, action.space_dim())?.to_f64(),
    };
    let exact_target = match action {
        ActionModel::FiniteTorusShift { side, .. } => Some(f.finite_mean(*side, action.space_dim())?),
        _ => None,
    };
    let mut float_sum = CompensatedSum::default();
    let mut exact_sum = rat(0, 1);
    let mut at: Vec<Option<(f64, Option<Rational>)>> = vec![None; n_max + 1];
    for (k, n) in enumeration[..n_max].iter().enumerate() {
        if n.dim() != action.rank() {
            return Err(invalid("enumeration dimension does not match the action"));
        }
        let y = action.act(n.coords(), x0)?;
        if finite {
            exact_sum = exact_sum.add_checked(&f.eval_exact(&y)?)?;
        } else {
            float_sum.add(f.eval(&y)?);
        }
        let count = k + 1;
        if wanted[count] {
            at[count] = Some(if finite {
                let v = exact_sum / count as i128;
                (v.to_f64(), Some(v))
            } else {
                (float_sum.value() / count as f64, None)
            });
        }
    }
    let value = |n: usize| *at[n].as_ref().expect("recorded");
    let rows: Vec<TraceRow> = schedule
        .iter()
        .map(|&n| {
            let (v, exact) = value(n);
            TraceRow {
                n,
                value: v,
                deviation: (v - target).abs(),
                exact: exact.map(|e| format!("{}/{}", e.numer(), e.denom())),
            }
        })
        .collect();
    let tail_deviation = rows[rows.len() / 2..].iter().map(|r| r.deviation).fold(0.0, f64::max);
    let exact_mean_hits = exact_target.map(|m| schedule.iter().map(|&n| value(n).1 == Some(m)).collect());
    let times: Vec<usize> = lacunary.iter().step_by(2).copied().collect();
    let mut sum = 0.0;
    for w in times.windows(2) {
        let end = value(w[1]).0;
        let sup =
            lacunary.iter().filter(|&&t| t >= w[0] && t <= w[1]).map(|&t| (value(t).0 - end).abs()).fold(0.0, f64::max);
        sum += sup * sup;
    }
    Ok(AverageTrace {
        rows,
        target,
        tail_deviation,
        oscillation: OscillationSums { lacunary, times, sum },
        exact_mean_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naturals(n: i64) -> Vec<LatticePoint> {
        (1..=n).map(|k| LatticePoint::from([k])).collect()
    }

    #[test]
    fn constant_observable_averages_to_itself() {
        let rot = ActionModel::TorusRotation { alphas: vec![vec![2f64.sqrt() - 1.0]] };
        let tr = evaluate_average(
            &rot,
            &Observable::constant(1.0, 1),
            &State::Torus(vec![0.3]),
            &naturals(100),
            &[1, 10, 100],
        )
        .unwrap();
        assert!(tr.rows.iter().all(|r| r.value == 1.0));
    }

    #[test]
    fn full_orbit_hits_the_mean_exactly() {
        let l = 101u64;
        let action = ActionModel::FiniteTorusShift { side: l, shifts: vec![vec![7]] };
        let values: Vec<Rational> = (0..l as i128).map(|i| rat(i * i % 13, 1 + i % 4)).collect();
        let f = Observable::Table { side: l, values };
        let schedule: Vec<usize> = (1..=3).map(|k| k * l as usize).chain([50]).collect();
        let tr = evaluate_average(&action, &f, &State::Finite(vec![5]), &naturals(303), &schedule).unwrap();
        assert_eq!(tr.exact_mean_hits.unwrap(), vec![true, true, true, false]);
    }

    #[test]
    fn refuses_short_enumeration() {
        let rot = ActionModel::quadratic_rotation();
        let e = vec![LatticePoint::from([1, 0])];
        assert!(evaluate_average(&rot, &Observable::cos_first(2), &State::Torus(vec![0.0, 0.0]), &e, &[2]).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16] {
            c.add(x);
        }
        assert_eq!(c.value(), 1.0);
    }
}
