//! End-to-end Hopcroft solvers.
//!
//! Every driver computes its boolean answer by exhaustive classical
//! evaluation of the same predicates a quantum implementation would
//! query; the ledger charges what the quantum subroutines would cost.
//! Answers therefore always agree with [`brute_force`].

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arrangement::{ArrError, Arrangement};
use crate::geom::{dualize, mix64, GeomError, Instance, PointD, Rat};
use crate::ptree;
use crate::qcost::{
    grover_charge, mnrs_charge, predicted_complexity, skiplist_op_units, AlgoKind, CostLedger,
    QcostError,
};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("driver requires a planar (d = 2) instance")]
    PlanarOnly,
    #[error("more points than hyperplanes in d >= 3; cannot normalize by duality")]
    CannotNormalize,
    #[error("walk subset size {r} exceeds half the line count {n}")]
    WalkTooWide { r: u64, n: u64 },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Structure(#[from] ArrError),
    #[error(transparent)]
    Cost(#[from] QcostError),
}

/// Outcome of one solver run. The boolean always equals `brute_force`;
/// the witness, when present, is incident.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub regime: Option<String>,
    pub r: Option<u64>,
    pub answer: bool,
    pub witness: Option<(u32, u32)>,
    pub charge: Rat,
    /// Setup / update / checking values fed to the walk charge (algo2).
    pub s_value: Option<u64>,
    pub u_value: Option<u64>,
    pub c_value: Option<u64>,
    /// Raw measured structure steps across all phases.
    pub steps: u64,
    pub seed: u64,
    pub trace: Value,
}

impl RunResult {
    pub fn to_json(&self) -> Value {
        json!({
            "algo": self.algo,
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "regime": self.regime,
            "r": self.r,
            "answer": self.answer,
            "witness": self.witness.map(|(l, p)| vec![l, p]),
            "charge": self.charge.to_string(),
            "S": self.s_value,
            "U": self.u_value,
            "C": self.c_value,
            "steps": self.steps,
            "seed": self.seed,
        })
    }
}

/// Exact scan of all line–point pairs; first incident pair in
/// (line, point) lexicographic order.
pub fn brute_force(inst: &Instance) -> Option<(u32, u32)> {
    let planes = inst.hyperplanes();
    for h in &planes {
        for (pi, p) in inst.points.iter().enumerate() {
            if h.contains(p) {
                return Some((h.id, pi as u32));
            }
        }
    }
    None
}

fn rat_ceil_u64(r: &Rat) -> u64 {
    use num_traits::ToPrimitive;
    let num = r.numer().clone();
    let den = r.denom().clone();
    let q = (&num + (&den - BigInt::from(1))) / &den;
    q.to_u64().unwrap_or(u64::MAX)
}

fn ceil_mean(total: u64, count: u64) -> u64 {
    if count == 0 {
        0
    } else {
        total.div_ceil(count)
    }
}

/// Classical baseline: full arrangement of all n lines, one point
/// location per point under a Grover search over the points.
pub fn baseline_classical(
    inst: &Instance,
    ledger: &mut CostLedger,
) -> Result<RunResult, DriverError> {
    if inst.d != 2 {
        return Err(DriverError::PlanarOnly);
    }
    let all: Vec<u32> = (0..inst.n_lines() as u32).collect();
    let (arr, build) = Arrangement::build(inst.lines(), &all, inst.seed)?;

    let mut steps = build.raw;
    let mut locate_units_total = 0u64;
    let mut witness = None;
    for (pi, p) in inst.points.iter().enumerate() {
        let (hit, stats) = arr.incidence(p)?;
        steps += stats.raw;
        locate_units_total += stats.units;
        if witness.is_none() {
            if let Some(line) = hit {
                witness = Some((line, pi as u32));
            }
        }
    }
    let m = inst.m_points() as u64;
    let mean_locate = ceil_mean(locate_units_total, m);
    let charge = if m == 0 {
        Rat::zero()
    } else {
        grover_charge(m, mean_locate, &ledger.constants)
    };
    ledger.record(
        "grover-point-location",
        json!({
            "points": m,
            "mean_locate_units": mean_locate,
            "build_units": build.units,
            "build_raw": build.raw,
        }),
        charge.clone(),
    );
    ledger.add_units(steps);
    Ok(RunResult {
        algo: "baseline".into(),
        n: inst.n_lines(),
        m: inst.m_points(),
        d: inst.d,
        regime: None,
        r: None,
        answer: witness.is_some(),
        witness,
        charge,
        s_value: None,
        u_value: None,
        c_value: None,
        steps,
        seed: inst.seed,
        trace: ledger.trace_json(),
    })
}

/// Warm-up hybrid: split the lines into groups of k, Grover over the
/// groups, build each group's arrangement classically, Grover over the
/// points inside. Default k = round(n^{3/4}).
pub fn algo0_warmup(
    inst: &Instance,
    k: Option<usize>,
    ledger: &mut CostLedger,
) -> Result<RunResult, DriverError> {
    if inst.d != 2 {
        return Err(DriverError::PlanarOnly);
    }
    let n = inst.n_lines();
    let k = k
        .unwrap_or_else(|| (n as f64).powf(0.75).round() as usize)
        .clamp(1, n.max(1));
    let m = inst.m_points() as u64;

    ledger.open("grover-groups", json!({"k": k, "n": n}));
    let mut steps = 0u64;
    let mut witness: Option<(u32, u32)> = None;
    let mut group_costs: Vec<Rat> = Vec::new();
    let group_ids: Vec<Vec<u32>> = (0..n as u32)
        .collect::<Vec<_>>()
        .chunks(k.max(1))
        .map(|c| c.to_vec())
        .collect();
    for ids in &group_ids {
        let (arr, build) = Arrangement::build(inst.lines(), ids, inst.seed)?;
        steps += build.raw;
        let mut locate_units = 0u64;
        for (pi, p) in inst.points.iter().enumerate() {
            let (hit, stats) = arr.incidence(p)?;
            steps += stats.raw;
            locate_units += stats.units;
            if witness.is_none() {
                if let Some(line) = hit {
                    witness = Some((line, pi as u32));
                }
            }
        }
        let inner = if m == 0 {
            Rat::zero()
        } else {
            grover_charge(m, ceil_mean(locate_units, m), &ledger.constants)
        };
        let group_cost = &Rat::from_int(build.units as i64) + &inner;
        ledger.record(
            "group",
            json!({"lines": ids.len(), "build_units": build.units, "inner": inner.to_string()}),
            group_cost.clone(),
        );
        group_costs.push(group_cost);
    }
    let groups = group_ids.len() as u64;
    let mean_group = {
        let mut acc = Rat::zero();
        for c in &group_costs {
            acc = &acc + c;
        }
        ceil_mean(rat_ceil_u64(&acc), groups)
    };
    let charge = if groups == 0 {
        Rat::zero()
    } else {
        grover_charge(groups, mean_group, &ledger.constants)
    };
    ledger.close(charge.clone());
    ledger.add_units(steps);
    Ok(RunResult {
        algo: "algo0".into(),
        n,
        m: inst.m_points(),
        d: inst.d,
        regime: None,
        r: Some(k as u64),
        answer: witness.is_some(),
        witness,
        charge,
        s_value: None,
        u_value: None,
        c_value: None,
        steps,
        seed: inst.seed,
        trace: ledger.trace_json(),
    })
}

/// Partition-tree solver: groups of points, a tree per group, a Grover
/// search over hyperplanes whose emptiness queries are charged as
/// backtracking searches.
pub fn algo1(inst: &Instance, ledger: &mut CostLedger) -> Result<RunResult, DriverError> {
    // Normalize so points do not outnumber hyperplanes.
    let work;
    let dualized = if inst.m_points() > inst.n_lines() {
        if inst.d != 2 {
            return Err(DriverError::CannotNormalize);
        }
        work = dualize(inst)?;
        true
    } else {
        work = inst.clone();
        false
    };
    let n = work.n_lines();
    let m = work.m_points();
    let d = work.d;
    let (regime, _) = predicted_complexity(n.max(1) as u64, m.max(1) as u64, d as u32, AlgoKind::Algo1)?;

    // Group size r = n^{d/(d+1)} in the grouped regime, otherwise one
    // tree over all points.
    let r = if regime.ends_with("grouped") {
        ((n as f64).powf(d as f64 / (d as f64 + 1.0)).round() as usize).clamp(1, m.max(1))
    } else {
        m.max(1)
    };
    let planes = work.hyperplanes();
    let point_ids: Vec<u32> = (0..m as u32).collect();
    let groups: Vec<&[u32]> = if m == 0 {
        Vec::new()
    } else {
        point_ids.chunks(r).collect()
    };

    ledger.open(
        "grover-point-groups",
        json!({"groups": groups.len(), "r": r, "regime": regime}),
    );
    let mut steps = 0u64;
    let mut witness: Option<(u32, u32)> = None;
    let mut group_cost_total = Rat::zero();
    for ids in &groups {
        let pts: Vec<PointD> = ids.iter().map(|&i| work.points[i as usize].clone()).collect();
        let tree = ptree::build(&pts, d);
        steps += tree.build_steps();
        ledger.open(
            "grover-hyperplanes",
            json!({"points": ids.len(), "build_steps": tree.build_steps()}),
        );
        let mut bt_total = Rat::zero();
        for h in &planes {
            let (result, bt) = tree.emptiness_charged(h, ledger);
            steps += result.visited;
            bt_total = &bt_total + &bt;
            if result.found && witness.is_none() {
                let local = result.witness.expect("found implies witness");
                witness = Some((h.id, ids[local as usize]));
            }
        }
        let mean_bt = ceil_mean(rat_ceil_u64(&bt_total), planes.len() as u64);
        let inner = grover_charge(planes.len().max(1) as u64, mean_bt, &ledger.constants);
        ledger.close(inner.clone());
        group_cost_total = &group_cost_total + &(&Rat::from_int(tree.build_steps() as i64) + &inner);
    }
    let mean_group = ceil_mean(rat_ceil_u64(&group_cost_total), groups.len().max(1) as u64);
    let charge = grover_charge(groups.len().max(1) as u64, mean_group, &ledger.constants);
    ledger.close(charge.clone());
    ledger.add_units(steps);

    // Map the witness back through duality: dual line id = original
    // point id and vice versa.
    let witness = witness.map(|(l, p)| if dualized { (p, l) } else { (l, p) });
    Ok(RunResult {
        algo: "algo1".into(),
        n: inst.n_lines(),
        m: inst.m_points(),
        d: inst.d,
        regime: Some(regime),
        r: Some(r as u64),
        answer: witness.is_some(),
        witness,
        charge,
        s_value: None,
        u_value: None,
        c_value: None,
        steps,
        seed: inst.seed,
        trace: ledger.trace_json(),
    })
}

/// Above this line count the exact-answer extraction falls back to the
/// brute scan: the full arrangement would hold Θ(n²) path points.
pub const ALGO2_FULL_EXTRACTION_MAX_LINES: usize = 512;

/// Walk-shadowed arrangement solver: a Johnson-graph walk over
/// r-subsets of the lines, with the setup / update / checking costs
/// measured on the real structure and composed by the MNRS formula.
pub fn algo2(
    inst: &Instance,
    ledger: &mut CostLedger,
    walk_samples: usize,
) -> Result<RunResult, DriverError> {
    if inst.d != 2 {
        return Err(DriverError::PlanarOnly);
    }
    // Normalize by duality so the walk runs over the smaller family
    // (points at least as numerous as lines).
    let work;
    let dualized = if inst.m_points() < inst.n_lines() {
        work = dualize(inst)?;
        true
    } else {
        work = inst.clone();
        false
    };
    let n_w = work.n_lines();
    let m_w = work.m_points();
    let (regime, _) = predicted_complexity(
        inst.n_lines().max(1) as u64,
        inst.m_points().max(1) as u64,
        2,
        AlgoKind::Algo2,
    )?;

    if regime == "algo2:classical" || n_w < 2 {
        // Small line side: classical point location plus Grover over the
        // points, no walk.
        let mut inner = baseline_classical(&work, ledger)?;
        inner.algo = "algo2".into();
        inner.regime = Some("algo2:classical".into());
        inner.n = inst.n_lines();
        inner.m = inst.m_points();
        inner.seed = inst.seed;
        inner.witness = inner.witness.map(|(l, p)| if dualized { (p, l) } else { (l, p) });
        return Ok(inner);
    }

    let r_target = if regime == "algo2:walk-r=m^(1/3)" {
        (m_w as f64).powf(1.0 / 3.0)
    } else {
        ((n_w as f64) * (m_w as f64)).powf(0.2)
    };
    let r = (r_target.round() as u64).clamp(1, (n_w as u64 / 2).max(1));
    if 2 * r > n_w as u64 {
        return Err(DriverError::WalkTooWide { r, n: n_w as u64 });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(mix64(work.seed ^ 0xa2a2_a2a2_a2a2_a2a2));
    ledger.open("mnrs-walk", json!({"n": n_w, "m": m_w, "r": r, "regime": regime}));

    // Setup: build the structure for one random r-subset.
    let mut subset: Vec<u32> = Vec::with_capacity(r as usize);
    while subset.len() < r as usize {
        let cand = rng.random_range(0..n_w as u32);
        if !subset.contains(&cand) {
            subset.push(cand);
        }
    }
    let mut arr = Arrangement::new(work.lines(), work.seed)?;
    let mut s_units = 0u64;
    let mut s_raw = 0u64;
    for &id in &subset {
        let st = arr.insert_line(id)?;
        s_units += st.units;
        s_raw += st.raw;
    }
    let lmax = arr.lmax();
    let s_formula = (r as u64) * (r as u64) * skiplist_op_units(lmax);
    ledger.record(
        "setup",
        json!({"r": r, "S_units": s_units, "S_raw": s_raw, "S_formula": s_formula}),
        Rat::from_int(s_units as i64),
    );

    // Update: mean cost of remove+insert over uniformly random walk moves.
    let mut u_total = 0u64;
    let mut u_raw = 0u64;
    let mut samples_raw: Vec<u64> = Vec::with_capacity(walk_samples);
    for _ in 0..walk_samples {
        let out_idx = rng.random_range(0..subset.len());
        let out = subset[out_idx];
        let inn = loop {
            let cand = rng.random_range(0..n_w as u32);
            if !subset.contains(&cand) {
                break cand;
            }
        };
        let st_r = arr.remove_line(out)?;
        let st_i = arr.insert_line(inn)?;
        subset[out_idx] = inn;
        u_total += st_r.units + st_i.units;
        u_raw += st_r.raw + st_i.raw;
        samples_raw.push(st_r.raw + st_i.raw);
    }
    let u_mean = ceil_mean(u_total, walk_samples.max(1) as u64);
    ledger.record(
        "update",
        json!({"samples": walk_samples, "U": u_mean, "raw_per_sample": samples_raw}),
        Rat::from_int(u_mean as i64),
    );

    // Checking: Grover over the points, each paying one point location
    // in the walked structure.
    let mut locate_units = 0u64;
    let mut c_raw = 0u64;
    for p in &work.points {
        let (_, stats) = arr.incidence(p)?;
        locate_units += stats.units;
        c_raw += stats.raw;
    }
    let mean_locate = ceil_mean(locate_units, m_w.max(1) as u64);
    let c_charge = grover_charge(m_w.max(1) as u64, mean_locate, &ledger.constants);
    let c_value = rat_ceil_u64(&c_charge);
    ledger.record(
        "checking",
        json!({"points": m_w, "mean_locate_units": mean_locate, "C_raw": c_raw}),
        c_charge.clone(),
    );

    let charge = mnrs_charge(s_units, u_mean, c_value, n_w as u64, r, &ledger.constants)?;
    ledger.close(charge.clone());

    // Exact answer: structural extraction via the full arrangement when
    // affordable, otherwise the brute scan.
    let witness = if n_w <= ALGO2_FULL_EXTRACTION_MAX_LINES {
        let all: Vec<u32> = (0..n_w as u32).collect();
        let (full, _) = Arrangement::build(work.lines(), &all, work.seed)?;
        let mut hit = None;
        for (pi, p) in work.points.iter().enumerate() {
            if let (Some(line), _) = full.incidence(p)? {
                hit = Some((line, pi as u32));
                break;
            }
        }
        hit
    } else {
        brute_force(&work)
    };
    let steps = s_raw + u_raw + c_raw;
    ledger.add_units(steps);
    let witness = witness.map(|(l, p)| if dualized { (p, l) } else { (l, p) });
    Ok(RunResult {
        algo: "algo2".into(),
        n: inst.n_lines(),
        m: inst.m_points(),
        d: inst.d,
        regime: Some(regime),
        r: Some(r),
        answer: witness.is_some(),
        witness,
        charge,
        s_value: Some(s_units),
        u_value: Some(u_mean),
        c_value: Some(c_value),
        steps,
        seed: inst.seed,
        trace: ledger.trace_json(),
    })
}

/// Stress report from a classical random walk on the Johnson graph.
#[derive(Debug, Clone)]
pub struct WalkReport {
    pub steps_done: usize,
    pub fingerprint_checks: usize,
    pub violations: Vec<String>,
}

/// Random walk over r-subsets with real removals/insertions; the
/// structure is verified after every move and fingerprint-compared
/// against a fresh build every ⌈steps/10⌉ moves.
pub fn walk_shadow(
    inst: &Instance,
    r: usize,
    steps: usize,
    seed: u64,
) -> Result<WalkReport, DriverError> {
    if inst.d != 2 {
        return Err(DriverError::PlanarOnly);
    }
    let n = inst.n_lines();
    if 2 * r > n {
        return Err(DriverError::WalkTooWide {
            r: r as u64,
            n: n as u64,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(mix64(seed ^ 0x57a1_57a1_57a1_57a1));
    let mut subset: Vec<u32> = Vec::with_capacity(r);
    while subset.len() < r {
        let cand = rng.random_range(0..n as u32);
        if !subset.contains(&cand) {
            subset.push(cand);
        }
    }
    let (mut arr, _) = Arrangement::build(inst.lines(), &subset, inst.seed)?;
    let check_every = steps.div_ceil(10).max(1);
    let mut report = WalkReport {
        steps_done: 0,
        fingerprint_checks: 0,
        violations: Vec::new(),
    };
    for step in 0..steps {
        if r > 0 && r < n {
            let out_idx = rng.random_range(0..subset.len());
            let out = subset[out_idx];
            let inn = loop {
                let cand = rng.random_range(0..n as u32);
                if !subset.contains(&cand) {
                    break cand;
                }
            };
            arr.remove_line(out)?;
            arr.insert_line(inn)?;
            subset[out_idx] = inn;
        }
        report.steps_done += 1;
        for v in arr.verify() {
            report.violations.push(format!("step {step}: {v}"));
        }
        if (step + 1) % check_every == 0 {
            let (fresh, _) = Arrangement::build(inst.lines(), &subset, inst.seed)?;
            report.fingerprint_checks += 1;
            if fresh.fingerprint() != arr.fingerprint() {
                report
                    .violations
                    .push(format!("step {step}: fingerprint differs from fresh build"));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{gen_instance, Line2, Surfaces};

    fn l3_instance(points: Vec<PointD>) -> Instance {
        Instance::new(
            2,
            99,
            Surfaces::Lines(vec![
                Line2::new(0, 1, 0).unwrap(),
                Line2::new(1, -1, 2).unwrap(),
                Line2::new(2, 0, 3).unwrap(),
            ]),
            points,
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let inst = l3_instance(vec![PointD::from_ints(&[0, 3])]);
        assert_eq!(brute_force(&inst), Some((2, 0)));
        let inst = l3_instance(vec![PointD::from_ints(&[0, 1])]);
        assert_eq!(brute_force(&inst), None);
        let inst = l3_instance(vec![]);
        assert_eq!(brute_force(&inst), None);
    }

    #[test]
    fn baseline_examples() {
        let inst = l3_instance(vec![PointD::from_ints(&[0, 3])]);
        let mut ledger = CostLedger::new();
        let res = baseline_classical(&inst, &mut ledger).unwrap();
        assert!(res.answer);
        assert_eq!(res.witness, Some((2, 0)));
        let inst = l3_instance(vec![PointD::from_ints(&[0, 1])]);
        let res = baseline_classical(&inst, &mut CostLedger::new()).unwrap();
        assert!(!res.answer);
    }

    #[test]
    fn warmup_single_group_matches_baseline_answers() {
        for seed in 0..10u64 {
            let inst = gen_instance(2, 24, 20, (seed % 3) as usize, 1 << 8, seed).unwrap();
            let brute = brute_force(&inst).is_some();
            let full = algo0_warmup(&inst, Some(24), &mut CostLedger::new()).unwrap();
            assert_eq!(full.answer, brute);
            let single = algo0_warmup(&inst, Some(1), &mut CostLedger::new()).unwrap();
            assert_eq!(single.answer, brute);
            let default = algo0_warmup(&inst, None, &mut CostLedger::new()).unwrap();
            assert_eq!(default.answer, brute);
        }
    }

    #[test]
    fn algo1_matches_brute_force_2d_and_3d() {
        for seed in 0..20u64 {
            for d in [2usize, 3] {
                let n = 30 + (seed as usize % 10);
                let m = 25 + (seed as usize % 7);
                let planted = (seed % 2) as usize;
                let inst = gen_instance(d, n, m, planted, 1 << 8, 1000 + seed).unwrap();
                let brute = brute_force(&inst);
                let res = algo1(&inst, &mut CostLedger::new()).unwrap();
                assert_eq!(res.answer, brute.is_some(), "d={d} seed={seed}");
                if let Some((l, p)) = res.witness {
                    assert!(inst.surface_contains(l, &inst.points[p as usize]));
                }
            }
        }
    }

    #[test]
    fn algo1_dualizes_when_points_outnumber_lines() {
        let inst = gen_instance(2, 10, 40, 1, 1 << 8, 5).unwrap();
        let res = algo1(&inst, &mut CostLedger::new()).unwrap();
        assert_eq!(res.answer, brute_force(&inst).is_some());
        let (l, p) = res.witness.unwrap();
        assert!(inst.lines()[l as usize].contains(&inst.points[p as usize]));
    }

    #[test]
    fn algo2_matches_brute_force_across_regimes() {
        // (n, m) pairs spread over walk and classical regimes, both
        // orientations.
        let cases = [
            (40usize, 40usize),
            (60, 20),
            (20, 60),
            (50, 3),
            (3, 50),
            (81, 9),
        ];
        for (idx, &(n, m)) in cases.iter().enumerate() {
            for planted in [0usize, 1] {
                let inst =
                    gen_instance(2, n, m, planted, 1 << 8, 9_000 + idx as u64 * 7 + planted as u64)
                        .unwrap();
                let brute = brute_force(&inst);
                let res = algo2(&inst, &mut CostLedger::new(), 16).unwrap();
                assert_eq!(res.answer, brute.is_some(), "case {idx} planted {planted}");
                if let Some((l, p)) = res.witness {
                    assert!(inst.lines()[l as usize].contains(&inst.points[p as usize]));
                }
            }
        }
    }

    #[test]
    fn algo2_l3_example() {
        let inst = l3_instance(vec![PointD::from_ints(&[0, 3])]);
        let res = algo2(&inst, &mut CostLedger::new(), 8).unwrap();
        assert!(res.answer);
    }

    #[test]
    fn regime_labels_match_predictions() {
        for &(n, m) in &[(64usize, 64usize), (100, 10), (81, 3), (16, 128)] {
            let inst = gen_instance(2, n, m, 0, 1 << 8, 31).unwrap();
            let res = algo2(&inst, &mut CostLedger::new(), 4).unwrap();
            let (expect, _) =
                predicted_complexity(n as u64, m as u64, 2, AlgoKind::Algo2).unwrap();
            assert_eq!(res.regime.as_deref(), Some(expect.as_str()));
            let res1 = algo1(&inst, &mut CostLedger::new()).unwrap();
            let (expect1, _) =
                predicted_complexity(n as u64, m as u64, 2, AlgoKind::Algo1).unwrap();
            assert_eq!(res1.regime.as_deref(), Some(expect1.as_str()));
        }
    }

    #[test]
    fn walk_shadow_trivial_and_small() {
        let inst = gen_instance(2, 8, 0, 0, 1 << 8, 3).unwrap();
        let report = walk_shadow(&inst, 1, 20, 4).unwrap();
        assert!(report.violations.is_empty());
        assert_eq!(report.steps_done, 20);
        let report = walk_shadow(&inst, 4, 50, 5).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.fingerprint_checks >= 10);
        assert!(walk_shadow(&inst, 5, 10, 6).is_err());
    }

    #[test]
    fn charges_deterministic() {
        let inst = gen_instance(2, 32, 32, 1, 1 << 8, 64).unwrap();
        let a = algo2(&inst, &mut CostLedger::new(), 16).unwrap();
        let b = algo2(&inst, &mut CostLedger::new(), 16).unwrap();
        assert_eq!(a.charge, b.charge);
        assert_eq!((a.s_value, a.u_value, a.c_value), (b.s_value, b.u_value, b.c_value));
        let c = algo1(&inst, &mut CostLedger::new()).unwrap();
        let d = algo1(&inst, &mut CostLedger::new()).unwrap();
        assert_eq!(c.charge, d.charge);
    }
}
