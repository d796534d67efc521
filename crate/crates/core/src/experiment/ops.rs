use super::command::*;
use super::{Context, Report, ReportRow, Series};
use crate::acceptance::arith_primes_up_to;
use crate::arith::{
    dft_weil_check, gamma_transfer, osc_profile, prime_schedule, product_weil_check, smoothing_psi_l1, ArithParams,
    OscConfig, PrimeSchedule, ScheduleMode,
};
use crate::blocks::{divergence_witness, tempelman_sweep, unrestricted_count_identity, BlockPlan, SquarePlan};
use crate::dynamics::{
    ball_family, evaluate_average, maximal_function_window, transference_check, ActionModel, Observable, State,
};
use crate::error::{invalid, Result};
use crate::groups::{
    banach_density_estimate, cantor_sequence, gap_profile_and_thin, group_random_contains, group_random_profile,
    op_norm_check, sample_group_random, tt_star_norm, word_ball_growth, GroupBlockPlan, GroupModel, WordBall,
};
use crate::lattice::{rat, LatticePoint, Rational, SparseMeasure};
use crate::random::{
    enumerate_plaid_sequence, enumerate_sequence, plaid_profile, sample_plaid, sample_speckled, speckled_contains,
    speckled_expected_mass, speckled_family, speckled_profile, PlaidConfig, SpeckledConfig,
};
use crate::rng::CounterRng;
use serde::Serialize;
use serde_json::{json, Value};

fn num(x: f64) -> String {
    format!("{x}")
}

fn params<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).unwrap_or(Value::Null)
}

fn single(op: &str, p: Value, metrics: Value, pass: Option<bool>, series: Vec<Series>) -> Report {
    Report { rows: vec![ReportRow { op: op.into(), params: p, metrics, pass }], series }
}

fn point_columns(prefix: &[&str], d: usize) -> Vec<String> {
    prefix.iter().map(|s| s.to_string()).chain((1..=d).map(|i| format!("n{i}"))).collect()
}

fn point_series(name: &str, prefix: &[&str], d: usize) -> Series {
    let cols = point_columns(prefix, d);
    Series { name: name.into(), columns: cols, rows: Vec::new() }
}

fn with_point(mut head: Vec<String>, p: &LatticePoint) -> Vec<String> {
    head.extend(p.coords().iter().map(|c| c.to_string()));
    head
}

// ---- blocks ----

pub(super) fn blocks(op: &BlocksOp) -> Result<Report> {
    match op {
        BlocksOp::Plan(a) => {
            let plan = BlockPlan::generate(a.blocks, a.rho, a.c)?;
            let v = plan.validate();
            let mut s = Series::new("plan", &["k", "u", "a"]);
            for k in 0..plan.u.len() {
                s.push(vec![(k + 1).to_string(), plan.u[k].to_string(), plan.a[k].to_string()]);
            }
            Ok(single(
                "blocks.plan",
                params(a),
                json!({"u": plan.u, "a": plan.a, "validation": v}),
                Some(v.all()),
                vec![s],
            ))
        }
        BlocksOp::Tempelman(a) => {
            let plan = BlockPlan::generate(a.blocks, a.rho, a.c)?;
            let sw = tempelman_sweep(&plan, a.exhaustive)?;
            let rm = &sw.running_max;
            let stable = rm.len() >= 3 && rm[rm.len() - 3..].windows(2).all(|w| w[0] == w[1]);
            let mut by_k = Series::new("max-ratio", &["k", "max_ratio", "running_max"]);
            for (k, (m, r)) in sw.max_by_k.iter().zip(rm).enumerate() {
                by_k.push(vec![(k + 1).to_string(), num(*m), num(*r)]);
            }
            let mut grid = Series::new("grid", &["k", "r", "size", "diff_size", "ratio", "folner_defect"]);
            for r in &sw.rows {
                grid.push(vec![
                    r.k.to_string(),
                    r.r.to_string(),
                    r.size.to_string(),
                    r.diff_size.to_string(),
                    num(r.ratio),
                    num(r.folner_defect),
                ]);
            }
            Ok(single(
                "blocks.tempelman",
                params(a),
                json!({"sup_ratio": sw.sup_ratio.to_string(), "max_by_k": sw.max_by_k, "running_max": rm,
                       "running_max_stable": stable}),
                Some(stable),
                vec![by_k, grid],
            ))
        }
        BlocksOp::Diverge(a) => {
            let rep = divergence_witness(&SquarePlan::generate(a.k_max))?;
            let last = rep.rows.last().map_or(1.0, |r| r.block_end_average);
            let mut s =
                Series::new("witness", &["k", "left_face_average", "left_face_lower_bound", "block_end_average"]);
            for r in &rep.rows {
                s.push(vec![
                    r.k.to_string(),
                    num(r.left_face_average),
                    num(r.left_face_lower_bound),
                    num(r.block_end_average),
                ]);
            }
            let pass = rep.all_left_faces_above_half && rep.block_ends_strictly_decreasing && last < 0.1;
            Ok(single("blocks.diverge", params(a), serde_json::to_value(&rep)?, Some(pass), vec![s]))
        }
        BlocksOp::CountEn(a) => {
            let c = unrestricted_count_identity(a.n)?;
            Ok(single(
                "blocks.count-en",
                params(a),
                json!({"n": c.n, "count": c.count, "ratio": c.ratio}),
                None,
                Vec::new(),
            ))
        }
    }
}

// ---- random ----

fn speckled_cfg(p: &RandomParams, seed: u64) -> SpeckledConfig {
    SpeckledConfig { d: p.d, gamma: p.gamma, seed, jmin: p.jmin, jmax: p.jmax }
}

fn plaid_cfg(p: &RandomParams, seed: u64) -> PlaidConfig {
    PlaidConfig { d: p.d, alpha: p.alpha, seed, jmin: p.jmin, jmax: p.jmax, diagonal: false }
}

/// Declared slope threshold `γ − 3d/2 + 0.15` and origin spread ≤ 3.
fn speckled_threshold(p: &RandomParams) -> f64 {
    p.gamma - 1.5 * p.d as f64 + 0.15
}

pub(super) fn random(a: &RandomArgs, ctx: &Context) -> Result<Report> {
    let p = &a.params;
    let op = format!("random.{}.{}", a.family.name(), a.action.name());
    let pr = params(a);
    match (a.family, a.action) {
        (Family::Speckled, RandomAction::Sample) => {
            let cfg = speckled_cfg(p, ctx.seed);
            let mut pts = point_series("points", &["j"], p.d);
            let mut per_j = Vec::new();
            for j in p.jmin..=p.jmax {
                let s = sample_speckled(&cfg, j)?;
                let mass = s.points.len() as f64 * (((p.gamma - p.d as f64) * j as f64).exp2());
                per_j.push(json!({"j": j, "points": s.points.len(), "mass": mass,
                                  "expected_mass": speckled_expected_mass(p.d, j)}));
                for q in &s.points {
                    pts.push(with_point(vec![j.to_string()], q));
                }
            }
            Ok(single(&op, pr, json!({"scales": per_j}), None, vec![pts]))
        }
        (Family::Speckled, RandomAction::Profile) => {
            let prof = speckled_profile(&speckled_cfg(p, ctx.seed), ctx.budgets.max_cells)?;
            let thr = speckled_threshold(p);
            let pass = prof.slope.is_some_and(|s| s <= thr) && prof.origin_ratio_spread.is_some_and(|s| s <= 3.0);
            let mut s = Series::new("profile", &["j", "at0", "l2_sq", "sup_punctured", "support_size"]);
            for r in &prof.rows {
                s.push(vec![
                    r.j.to_string(),
                    num(r.at0),
                    num(r.l2_sq),
                    num(r.sup_punctured),
                    r.support_size.to_string(),
                ]);
            }
            Ok(single(
                &op,
                pr,
                json!({"slope": prof.slope, "slope_threshold": thr, "origin_ratio_spread": prof.origin_ratio_spread}),
                Some(pass),
                vec![s],
            ))
        }
        (Family::Speckled, RandomAction::Sweep) => {
            let thr = speckled_threshold(p);
            let profiles = super::run_indexed(p.trials as usize, ctx.jobs, |i| {
                speckled_profile(&speckled_cfg(p, ctx.seed.wrapping_add(i as u64)), ctx.budgets.max_cells)
            });
            let mut s = Series::new("slopes", &["seed", "slope", "origin_ratio_spread"]);
            let (mut hits, mut spread_ok) = (0usize, true);
            for prof in profiles {
                let prof = prof?;
                let slope = prof.slope.unwrap_or(f64::INFINITY);
                let spread = prof.origin_ratio_spread.unwrap_or(f64::INFINITY);
                hits += (slope <= thr) as usize;
                spread_ok &= spread <= 3.0;
                s.push(vec![prof.seed.to_string(), num(slope), num(spread)]);
            }
            let frac = hits as f64 / p.trials.max(1) as f64;
            Ok(single(
                &op,
                pr,
                json!({"slope_threshold": thr, "pass_fraction": frac, "required_fraction": 0.95,
                       "origin_spreads_within_3": spread_ok}),
                Some(frac >= 0.95 && spread_ok),
                vec![s],
            ))
        }
        (Family::Speckled, RandomAction::Enumerate) => {
            let seq = enumerate_sequence(&speckled_cfg(p, ctx.seed), p.count, false)?;
            let mut s = point_series("sequence", &["index"], p.d);
            for (i, q) in seq.iter().enumerate() {
                s.push(with_point(vec![(i + 1).to_string()], q));
            }
            let last = seq.last().map_or(0, |q| q.norm());
            Ok(single(&op, pr, json!({"count": seq.len(), "last_norm": last}), None, vec![s]))
        }
        (Family::Plaid, RandomAction::Sample) => {
            let cfg = plaid_cfg(p, ctx.seed);
            let mut s = Series::new("axes", &["j", "axis", "n"]);
            let mut per_j = Vec::new();
            for j in p.jmin.max(1)..=p.jmax {
                let smp = sample_plaid(&cfg, j)?;
                per_j.push(json!({"j": j, "axis_sizes": smp.axes.iter().map(|a| a.len()).collect::<Vec<_>>()}));
                for (i, axis) in smp.axes.iter().enumerate() {
                    for n in axis {
                        s.push(vec![j.to_string(), (i + 1).to_string(), n.to_string()]);
                    }
                }
            }
            Ok(single(&op, pr, json!({"scales": per_j}), None, vec![s]))
        }
        (Family::Plaid, RandomAction::Profile) => {
            let prof = plaid_profile(&plaid_cfg(p, ctx.seed), ctx.budgets.max_cells)?;
            let exact = prof.rows.iter().all(|r| r.reconstruction_exact);
            let mut s = Series::new("pattern-sup", &["j", "pattern", "sup"]);
            for r in &prof.rows {
                for (pat, sup) in &r.sup_by_pattern {
                    s.push(vec![r.j.to_string(), pattern_name(pat), num(*sup)]);
                }
            }
            Ok(single(
                &op,
                pr,
                json!({"reconstruction_exact": exact, "nested_order_holds": prof.nested_order_holds,
                       "slopes": prof.slopes, "origin_ratio_spread": prof.origin_ratio_spread}),
                Some(exact && prof.nested_order_holds),
                vec![s],
            ))
        }
        (Family::Plaid, RandomAction::Sweep) => {
            let profiles = super::run_indexed(p.trials as usize, ctx.jobs, |i| {
                plaid_profile(&plaid_cfg(p, ctx.seed.wrapping_add(i as u64)), ctx.budgets.max_cells)
            });
            let mut s = Series::new("seeds", &["seed", "reconstruction_exact", "nested_order_holds"]);
            let mut ok = true;
            for prof in profiles {
                let prof = prof?;
                let exact = prof.rows.iter().all(|r| r.reconstruction_exact);
                ok &= exact && prof.nested_order_holds;
                s.push(vec![prof.seed.to_string(), exact.to_string(), prof.nested_order_holds.to_string()]);
            }
            Ok(single(&op, pr, json!({"trials": p.trials, "all_hold": ok}), Some(ok), vec![s]))
        }
        (Family::Plaid, RandomAction::Enumerate) => {
            let seq = enumerate_plaid_sequence(&plaid_cfg(p, ctx.seed), p.count)?;
            let mut s = point_series("sequence", &["index"], p.d);
            for (i, q) in seq.iter().enumerate() {
                s.push(with_point(vec![(i + 1).to_string()], q));
            }
            Ok(single(&op, pr, json!({"count": seq.len()}), None, vec![s]))
        }
    }
}

fn pattern_name(pat: &[usize]) -> String {
    if pat.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", pat.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "))
    }
}

// ---- arith ----

fn schedule(a: &ScheduleArgs) -> Result<PrimeSchedule> {
    let mode = match a.mode {
        ScheduleKind::Ratio => ScheduleMode::Ratio { c: a.c, cap: a.cap, first: a.first },
        ScheduleKind::DyadicHalf => ScheduleMode::DyadicHalf,
    };
    prime_schedule(&mode, a.count)
}

pub(super) fn arith(op: &ArithOp, ctx: &Context) -> Result<Report> {
    match op {
        ArithOp::Schedule(a) => {
            let sc = schedule(a)?;
            let mut s = Series::new("primes", &["k", "p", "exponent", "fallback"]);
            for k in 0..sc.primes.len() {
                s.push(vec![
                    (k + 1).to_string(),
                    sc.primes[k].to_string(),
                    sc.exponents.get(k).map_or(String::new(), |e| e.to_string()),
                    sc.fallback.get(k).map_or(String::new(), |f| f.to_string()),
                ]);
            }
            Ok(single("arith.schedule", params(a), serde_json::to_value(&sc)?, None, vec![s]))
        }
        ArithOp::Build(a) => {
            let sc = schedule(&a.schedule)?;
            let pr = ArithParams::generate(a.d, a.q, sc.primes, a.schedule.c, a.schedule.cap)?;
            let disjoint = pr.blocks_disjoint()?;
            let mut s = Series::new("blocks", &["k", "p", "shift", "r_min", "r_max", "block_end"]);
            for k in 1..=pr.primes.len() {
                let (lo, hi) = pr.block_radii(k)?;
                s.push(vec![
                    k.to_string(),
                    pr.primes[k - 1].to_string(),
                    pr.shifts[k - 1].to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    pr.block_end(k).to_string(),
                ]);
            }
            Ok(single(
                "arith.build",
                params(a),
                json!({"params": pr, "blocks_disjoint": disjoint}),
                Some(disjoint),
                vec![s],
            ))
        }
        ArithOp::Weil(a) => {
            let r = dft_weil_check(a.p, a.m)?;
            Ok(single(
                "arith.weil",
                params(a),
                json!({"max": r.max_nonzero, "bound": r.bound, "argmax": r.argmax, "at_zero": r.at_zero,
                       "frequencies": r.frequencies, "violations": r.violations}),
                Some(r.pass),
                Vec::new(),
            ))
        }
        ArithOp::Psi(a) => {
            let eta = a.eta.unwrap_or(1.0 / (2.0 * a.p as f64));
            let r = smoothing_psi_l1(a.p, eta, a.eta_constant)?;
            Ok(single("arith.psi", params(a), serde_json::to_value(&r)?, None, Vec::new()))
        }
        ArithOp::Transfer(a) => {
            let r = gamma_transfer(a.p, a.q, a.d, a.samples, ctx.seed)?;
            let pass = r.freiman_bijective.unwrap_or(true)
                && r.majorization
                && r.within_box
                && r.nu_l1 <= r.nu_l1_bound + 0.01
                && r.fourier_identity_error <= ctx.tolerance;
            Ok(single("arith.transfer", params(a), serde_json::to_value(&r)?, Some(pass), Vec::new()))
        }
        ArithOp::Osc(a) => {
            let pr = ArithParams::generate(a.d, a.q, a.primes.clone(), 2.0, 4.0)?;
            let cfg = OscConfig {
                params: pr,
                grid: a.grid,
                torus: a.torus,
                lacunary_ratio: a.lacunary_ratio,
                samples: a.samples,
                seed: ctx.seed,
            };
            let prof = osc_profile(&cfg)?;
            let mut sups = Series::new("block-sup", &["k", "n", "sup"]);
            for b in &prof.blocks {
                sups.push(vec![b.k.to_string(), b.n.to_string(), num(b.sup)]);
            }
            let mut tel = Series::new("telescoping", &["sample", "f_l2_sq", "sum"]);
            for t in &prof.telescoping {
                tel.push(vec![t.sample.to_string(), num(t.f_l2_sq), num(t.sum)]);
            }
            let mut grad = Series::new("gradients", &["t", "k", "gradient", "over_block_side"]);
            for g in &prof.gradients {
                grad.push(vec![g.t.to_string(), g.k.to_string(), num(g.gradient), num(g.over_block_side)]);
            }
            let pass = prof.decreasing_triple && prof.telescoping_max_excess <= ctx.tolerance;
            Ok(single(
                "arith.osc",
                params(a),
                json!({"decreasing_triple": prof.decreasing_triple, "telescoping_max_excess": prof.telescoping_max_excess,
                       "lacunary": prof.lacunary, "fmult": prof.fmult}),
                Some(pass),
                vec![sups, tel, grad],
            ))
        }
        ArithOp::Product(a) => {
            let r = product_weil_check(&a.primes, a.m)?;
            Ok(single("arith.product", params(a), serde_json::to_value(&r)?, Some(r.pass), Vec::new()))
        }
    }
}

// ---- group ----

pub(super) fn group(op: &GroupOp, ctx: &Context) -> Result<Report> {
    match op {
        GroupOp::Ball(a) => {
            let model = GroupModel::parse(&a.group)?;
            let window = match a.window.as_slice() {
                [] => ((2 * a.n).div_ceil(3).max(1), a.n),
                [lo, hi] if lo <= hi => (*lo, *hi),
                _ => return Err(invalid("window takes two values lo,hi with lo ≤ hi")),
            };
            let g = word_ball_growth(&model, a.n, window)?;
            let mut s = Series::new("growth", &["n", "count", "ratio"]);
            for (n, c) in g.counts.iter().enumerate() {
                let ratio = if n == 0 { String::new() } else { num(g.ratios[n - 1]) };
                s.push(vec![n.to_string(), c.to_string(), ratio]);
            }
            let pass = g.degree == model.growth_degree() && g.band <= 0.2;
            Ok(single(
                "group.ball",
                params(a),
                json!({"model": g.model, "slope": g.slope, "degree": g.degree, "expected_degree": model.growth_degree(),
                       "band": g.band, "band_threshold": 0.2, "window": g.window, "size": g.counts.last()}),
                Some(pass),
                vec![s],
            ))
        }
        GroupOp::Blocks(a) => {
            let model = GroupModel::parse(&a.group)?;
            let plan = GroupBlockPlan::generate(&model, a.blocks, a.first, a.c)?;
            // n_1 = 0, n_{k+1} = n_k + ℓ_k + ℓ_{k+1} + 1; X^n has length n
            let mut n = 0u32;
            for w in plan.lengths.windows(2) {
                n += w[0] + w[1] + 1;
            }
            let radius = n.max(*plan.lengths.iter().max().unwrap_or(&0));
            let ball = WordBall::new(&model, radius)?;
            plan.validate(&ball)?;
            let mut s = Series::new("tempelman", &["k", "r", "size", "diff_size", "ratio"]);
            let mut ratios = Vec::new();
            for k in 1..=plan.lengths.len() {
                let rep = plan.tempelman(&ball, k, 0)?;
                ratios.push(Rational::to_string(&rep.ratio));
                s.push(vec![
                    k.to_string(),
                    "0".into(),
                    rep.size.to_string(),
                    rep.diff_size.to_string(),
                    rep.ratio.to_string(),
                ]);
                if k < plan.lengths.len() {
                    for r in [1, plan.lengths[k] / 2, plan.lengths[k].saturating_sub(1)] {
                        if r == 0 || r >= plan.lengths[k] {
                            continue;
                        }
                        let rep = plan.tempelman(&ball, k, r)?;
                        s.push(vec![
                            k.to_string(),
                            r.to_string(),
                            rep.size.to_string(),
                            rep.diff_size.to_string(),
                            rep.ratio.to_string(),
                        ]);
                    }
                }
            }
            Ok(single(
                "group.blocks",
                params(a),
                json!({"plan": plan, "ball_radius": radius, "complete_ratios": ratios}),
                None,
                vec![s],
            ))
        }
        GroupOp::Random(a) => {
            let model = GroupModel::parse(&a.group)?;
            let prof = group_random_profile(&model, a.alpha, a.jmax, ctx.seed)?;
            let mut s = Series::new("scales", &["j", "support_size", "support_radius", "mu_mass", "nu_mass"]);
            for r in &prof.rows {
                s.push(vec![
                    r.j.to_string(),
                    r.support_size.to_string(),
                    r.support_radius.to_string(),
                    num(r.mu_mass),
                    num(r.nu_mass),
                ]);
            }
            Ok(single(
                "group.random",
                params(a),
                json!({"support_growth_constant": prof.support_growth_constant,
                       "expected_count_exponent": prof.expected_count_exponent,
                       "predicted_exponent": prof.predicted_exponent, "radial_weights": prof.radial_weights}),
                None,
                vec![s],
            ))
        }
        GroupOp::Ttstar(a) => {
            let model = GroupModel::parse(&a.group)?;
            let ball = WordBall::new(&model, 1 << a.j)?;
            let smp = sample_group_random(&ball, a.alpha, a.j, ctx.seed)?;
            let nu = smp.nu();
            let mut s = Series::new("powers", &["m", "l1", "l2", "op_upper"]);
            let mut last = None;
            for m in 1..=a.m {
                let t = tt_star_norm(&nu, m)?;
                s.push(vec![m.to_string(), num(t.l1), num(t.l2), num(t.op_upper)]);
                last = Some(t);
            }
            let (worst, bound) = op_norm_check(&nu, &ball, 1 << a.j, a.samples, ctx.seed)?;
            Ok(single(
                "group.ttstar",
                params(a),
                json!({"support_size": smp.support_size(), "variance_sum": smp.variance_sum(), "top": last,
                       "sampled_ratio": worst, "upper_bound": bound}),
                Some(worst <= bound * (1.0 + ctx.tolerance)),
                vec![s],
            ))
        }
        GroupOp::Gaps(a) => {
            let model = GroupModel::parse(&a.group)?;
            let seq = match a.source {
                GapSource::Cantor => {
                    if model != (GroupModel::Lattice { d: 1 }) {
                        return Err(invalid("the Cantor sequence lives in z1"));
                    }
                    cantor_sequence(a.count)
                }
                GapSource::Speckled => {
                    let d = match model {
                        GroupModel::Lattice { d } | GroupModel::LatticeKing { d } => d,
                        _ => return Err(invalid("the speckled sequence needs a lattice group")),
                    };
                    enumerate_sequence(
                        &SpeckledConfig { d, gamma: a.gamma, seed: ctx.seed, jmin: 0, jmax: a.jmax },
                        a.count,
                        false,
                    )?
                }
            };
            let prof = gap_profile_and_thin(&model, &seq, &a.grid, a.budget)?;
            let thinned = prof.verify_thinned(&model, &seq)?;
            let mut s = Series::new("beta", &["j", "m", "beta", "complete"]);
            for (j, row) in prof.beta.iter().enumerate() {
                for (m, b) in prof.m_grid.iter().zip(row) {
                    s.push(vec![j.to_string(), m.to_string(), num(*b), prof.complete[j].to_string()]);
                }
            }
            let mut sch = Series::new("schedule", &["j", "m_j", "spent"]);
            for (j, (m, sp)) in prof.schedule.iter().zip(&prof.spent).enumerate() {
                sch.push(vec![j.to_string(), m.to_string(), num(*sp)]);
            }
            Ok(single(
                "group.gaps",
                params(a),
                json!({"schedule": prof.schedule, "kept": prof.kept.len(), "index_ratio": prof.index_ratio(a.at),
                       "gaps_verified": thinned}),
                Some(thinned),
                vec![s, sch],
            ))
        }
        GroupOp::Banach(a) => {
            let model = GroupModel::parse(&a.group)?;
            let n_max = *a.n.iter().max().ok_or_else(|| invalid("at least one N"))?;
            let ball = WordBall::new(&model, 3 * n_max)?;
            let speckled = match (a.source, &model) {
                (DensitySource::Speckled, GroupModel::Lattice { d } | GroupModel::LatticeKing { d }) => {
                    Some(SpeckledConfig { d: *d, gamma: a.gamma, seed: ctx.seed, jmin: 0, jmax: 62 })
                }
                (DensitySource::Speckled, _) => return Err(invalid("the speckled set needs a lattice group")),
                _ => None,
            };
            let member = |g: &LatticePoint| match &speckled {
                Some(cfg) => speckled_contains(cfg, g),
                None => group_random_contains(&ball, a.alpha, ctx.seed, g).unwrap_or(false),
            };
            let mut s = Series::new("density", &["n", "ball_size", "lower_bound"]);
            let mut rows = Vec::new();
            for &n in &a.n {
                let pool = ball.within(2 * n);
                let mut rng = CounterRng::new(ctx.seed, 0xBA0 + n as u64);
                let mut shifts = vec![model.identity()];
                shifts.extend((0..a.shifts).map(|_| pool[rng.below(pool.len())].clone()));
                let e = banach_density_estimate(&ball, n, member, &shifts)?;
                s.push(vec![n.to_string(), e.ball_size.to_string(), num(e.lower_bound)]);
                rows.push(e);
            }
            Ok(single("group.banach", params(a), json!({"estimates": rows}), None, vec![s]))
        }
    }
}

// ---- dyn ----

fn lattice_prefix(count: usize) -> Vec<LatticePoint> {
    let mut out = Vec::with_capacity(count);
    let mut r = 0i64;
    while out.len() < count {
        for x in -r..=r {
            for y in -r..=r {
                if x.abs().max(y.abs()) == r {
                    out.push(LatticePoint::from([x, y]));
                }
            }
        }
        r += 1;
    }
    out.truncate(count);
    out
}

pub(super) fn dynamics(op: &DynOp, ctx: &Context) -> Result<Report> {
    match op {
        DynOp::Run(a) => {
            let (seq, schedule): (Vec<LatticePoint>, Vec<usize>) = match a.sequence {
                SequenceKind::Arith => {
                    let primes = arith_primes_up_to(a.limit)?;
                    if primes.is_empty() {
                        return Err(invalid("limit is below the first block"));
                    }
                    let pr = ArithParams::generate(2, a.q, primes.clone(), 2.0, 4.0)?;
                    let ends = (1..=primes.len()).map(|k| pr.block_end(k) as usize).collect();
                    (pr.sequence(primes.len())?, ends)
                }
                SequenceKind::Lattice => {
                    let n = a.limit as usize;
                    let mut ends: Vec<usize> = (0..).map(|i| 1usize << i).take_while(|&m| m < n).collect();
                    ends.push(n);
                    (lattice_prefix(n), ends)
                }
                SequenceKind::Orbit => {
                    let l = a.side as i64;
                    let pts: Vec<LatticePoint> =
                        (0..l).flat_map(|x| (0..l).map(move |y| LatticePoint::from([x, y]))).collect();
                    let n = pts.len();
                    (pts, vec![n])
                }
            };
            let (action, f, x0) = match a.system {
                SystemKind::Rotation => {
                    (ActionModel::quadratic_rotation(), Observable::cos_first(2), State::Torus(vec![0.1, 0.2]))
                }
                SystemKind::Finite => {
                    let l = a.side;
                    let mut rng = CounterRng::new(ctx.seed, 0xD1);
                    let values: Vec<Rational> =
                        (0..l * l).map(|_| rat(rng.range_i64(-20, 20) as i128, rng.range_i64(1, 6) as i128)).collect();
                    (
                        ActionModel::FiniteTorusShift { side: l, shifts: vec![vec![1, 0], vec![0, 1]] },
                        Observable::Table { side: l, values },
                        State::Finite(vec![0, 0]),
                    )
                }
            };
            let tr = evaluate_average(&action, &f, &x0, &seq, &schedule)?;
            let mut s = Series::new("trace", &["n", "a_n", "deviation"]);
            for r in &tr.rows {
                s.push(vec![r.n.to_string(), num(r.value), num(r.deviation)]);
            }
            let last = tr.rows.last().map_or(f64::INFINITY, |r| r.deviation.abs());
            Ok(single(
                "dyn.run",
                params(a),
                json!({"target": tr.target, "last_deviation": last, "tail_deviation": tr.tail_deviation,
                       "oscillation": tr.oscillation, "exact_mean_hits": tr.exact_mean_hits,
                       "exact": tr.rows.iter().map(|r| &r.exact).collect::<Vec<_>>()}),
                a.threshold.map(|t| last < t),
                vec![s],
            ))
        }
        DynOp::Maximal(a) => {
            let family: Vec<SparseMeasure<f64>> = match a.family {
                MaximalFamily::Speckled => speckled_family(a.d, a.gamma, ctx.seed, a.jmin, a.jmax)?,
                MaximalFamily::Balls => (a.jmin..=a.jmax)
                    .map(|j| {
                        let ball = WordBall::new(&GroupModel::LatticeKing { d: a.d }, 1 << j)?;
                        let w = 1.0 / ball.elements.len() as f64;
                        SparseMeasure::from_entries(a.d, ball.elements.iter().map(|g| (g.clone(), w)), "ball")
                    })
                    .collect::<Result<_>>()?,
            };
            let phi = SparseMeasure::delta(LatticePoint::origin(a.d), 1.0, "delta");
            let w = maximal_function_window(&phi, &family, a.window, &a.lambdas)?;
            let mut s = Series::new("distribution", &["lambda", "count", "lambda_times_count"]);
            for (l, c) in &w.distribution {
                s.push(vec![num(*l), c.to_string(), num(l * *c as f64)]);
            }
            Ok(single("dyn.maximal", params(a), serde_json::to_value(&w)?, None, vec![s]))
        }
        DynOp::Transfer(a) => {
            if a.point.len() != 2 {
                return Err(invalid("point takes two coordinates"));
            }
            let side = a.side as i64;
            let idx = a.point[0].rem_euclid(side) * side + a.point[1].rem_euclid(side);
            let mut f = vec![0i64; (a.side * a.side) as usize];
            f[idx as usize] = 1;
            let lambdas = a.lambdas.iter().map(|t| parse_fraction(t)).collect::<Result<Vec<_>>>()?;
            let rep = transference_check(a.side, &f, &ball_family(2, &a.radii)?, a.k, &lambdas)?;
            let mut s = Series::new("levels", &["lambda", "dynamic_density", "group_density", "bound"]);
            for r in &rep.rows {
                s.push(vec![r.lambda.clone(), num(r.dynamic_density), num(r.group_density), num(r.bound)]);
            }
            Ok(single("dyn.transfer", params(a), serde_json::to_value(&rep)?, Some(rep.all_hold), vec![s]))
        }
    }
}

fn parse_fraction(t: &str) -> Result<Rational> {
    let bad = || invalid(format!("{t:?} is not a fraction n/d"));
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let n: i128 = n.trim().parse().map_err(|_| bad())?;
    let d: i128 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(rat(n, d))
}
