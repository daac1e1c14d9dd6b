//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary
//! (`harness = false`) so the batches print in order and share one clock.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use armpa_core::mission::plan_mission;
use armpa_core::motion::{path_cost, plan_path, polyline_length, replan_path, spline_path, MotionConfig, MotionProblem, VehicleLimits};
use armpa_core::opt::{
    de_step, mutant, pso_step, BboParams, DeParams, EngineConfig, EngineKind, FnProblem, Population, PsoParams, Swarm,
};
use armpa_core::scenarios::{label, scenario_one, scenario_two, six_node_instance, SMALL_INSTANCES};
use armpa_core::synchron::to_micros;
use armpa_core::{Real, Vec3};
use armpa_harness::config::{ArmpaScenario, ChargeKind, RunConfig};
use armpa_harness::experiments::armpa_run;
use armpa_harness::monte_carlo::{monte_carlo, run_seeds, Batch, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn all(parts: Vec<Verdict>) -> Verdict {
    let pass = parts.iter().all(|v| v.pass);
    let detail = parts.iter().map(|v| v.detail.as_str()).collect::<Vec<_>>().join("; ");
    verdict(pass, detail)
}

fn main() {
    // cargo forwards libtest flags; there is nothing to list or filter
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("mission oracle equivalence", oracle_equivalence),
        ("time-budget satisfaction", budget_satisfaction),
        ("linear scaling", linear_scaling),
        ("motion feasibility", motion_feasibility),
        ("spline length", spline_length),
        ("warm-start dominance", warm_start_dominance),
        ("executive ledger identity", ledger_identity),
        ("determinism", determinism),
        ("engine identities", engine_identities),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {} [{:.1} s]", k + 1, v.detail, clock.elapsed().as_secs_f64());
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn oracle_equivalence() -> Verdict {
    const SEEDS: u64 = 100;
    let clock = Instant::now();
    let jobs: Vec<(u64, EngineKind)> =
        (0..SMALL_INSTANCES as u64).flat_map(|k| EngineKind::ALL.map(|e| (k, e))).collect();
    let rates: Vec<(u64, EngineKind, u64)> = jobs
        .par_iter()
        .map(|&(k, engine)| {
            let (g, budget) = six_node_instance::<f64>(k);
            let ((best, _, _), _) = oracles::enumerated_optimum(&g, budget.available);
            let cfg = EngineConfig::mission_default().with_engine(engine);
            let hits = (0..SEEDS)
                .filter(|&s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(k << 32 | s);
                    plan_mission(&g, &budget, &cfg, &mut rng).is_ok_and(|(p, _)| p.route.nodes == best)
                })
                .count() as u64;
            (k, engine, hits)
        })
        .collect();
    let secs = clock.elapsed().as_secs_f64();
    let worst = rates.iter().min_by_key(|r| r.2).unwrap();
    let per_engine: Vec<String> = EngineKind::ALL
        .iter()
        .map(|&e| {
            let hits: u64 = rates.iter().filter(|r| r.1 == e).map(|r| r.2).sum();
            format!("{e} {hits}/{}", SMALL_INSTANCES as u64 * SEEDS)
        })
        .collect();
    verdict(
        worst.2 * 10 >= SEEDS * 9 && secs < 120.0,
        format!(
            "{}; worst instance {} {} at {}/{SEEDS}; {secs:.1} s of 120",
            per_engine.join(", "),
            worst.0,
            worst.1,
            worst.2
        ),
    )
}

fn with_engine(cfg: &RunConfig, e: EngineKind) -> RunConfig {
    let mut c = cfg.clone();
    c.run.engine = e;
    c
}

fn budget_satisfaction() -> Verdict {
    const RUNS: usize = 150;
    let cfg = RunConfig::preset("ch5_mission").unwrap();
    let clock = Instant::now();
    let mut parts = Vec::new();
    for e in EngineKind::ALL {
        let Ok(Batch::Mission(b)) = monte_carlo(&with_engine(&cfg, e), RUNS, Mode::Mission) else {
            parts.push(verdict(false, format!("{e} batch failed")));
            continue;
        };
        let on_time = b.records.iter().filter(|r| r.status == "ok" && r.violation == 0.0).count();
        let sizes = b.records.iter().all(|r| (30..=50).contains(&r.nodes));
        parts.push(verdict(on_time * 100 >= RUNS * 99 && sizes, format!("{e} {on_time}/{RUNS} on time")));
    }
    let secs = clock.elapsed().as_secs_f64();
    parts.push(verdict(secs < 600.0, format!("{secs:.0} s of 600")));
    all(parts)
}

fn linear_scaling() -> Verdict {
    let cfg = RunConfig::preset("ch5_mission").unwrap();
    let mut parts = Vec::new();
    for e in EngineKind::ALL {
        let Ok(Batch::Scaling(b, points, fit)) = monte_carlo(&with_engine(&cfg, e), cfg.scaling.runs, Mode::Scaling) else {
            parts.push(verdict(false, format!("{e} batch failed")));
            continue;
        };
        let x: Vec<f64> = points.iter().map(|p| p.nodes as f64).collect();
        let y: Vec<f64> = points.iter().map(|p| p.median_ms).collect();
        let r2 = oracles::r_squared(&x, &y);
        let slowest = b.records.iter().map(|r| r.mission_ms).fold(0.0, f64::max);
        let ok = b.records.iter().all(|r| r.status == "ok");
        parts.push(verdict(
            ok && r2 >= 0.9 && (r2 - fit.r_squared).abs() < 1e-9 && slowest < 10_000.0,
            format!("{e} R2 {r2:.3} slowest {slowest:.0} ms"),
        ));
    }
    all(parts)
}

fn motion_feasibility() -> Verdict {
    let cfg = RunConfig::preset("ch6_scenario2").unwrap();
    let runs = cfg.run.runs;
    let mut parts = Vec::new();
    for e in EngineKind::ALL {
        let Ok(Batch::Motion(b)) = monte_carlo(&with_engine(&cfg, e), runs, Mode::Motion) else {
            parts.push(verdict(false, format!("{e} batch failed")));
            continue;
        };
        let good = b
            .records
            .iter()
            .filter(|r| {
                r.status == "ok"
                    && r.iterations <= 100
                    && r.min_z >= 0.0
                    && r.max_z <= 100.0
                    && r.max_surge <= 2.7
                    && r.max_abs_sway <= 0.5
                    && r.max_abs_yaw_deg <= 17.0
                    && r.time <= 1800.0
            })
            .count();
        parts.push(verdict(good * 100 >= runs * 95, format!("{e} {good}/{runs} feasible")));
    }
    all(parts)
}

fn spline_length() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let cp: Vec<[f64; 3]> =
            (0..5).map(|_| [rng.gen_range(0.0..3500.0), rng.gen_range(0.0..3500.0), rng.gen_range(0.0..100.0)]).collect();
        let pts: Vec<Vec3<f64>> = cp.iter().map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let chord = polyline_length(&spline_path(&pts, 4, 100).unwrap());
        let arc = oracles::arc_length(&cp, 4, 4000);
        worst = worst.max((arc - chord).abs() / arc);
    }
    let mut worst_line: f64 = 0.0;
    for _ in 0..1000 {
        let a = Vec3::new(rng.gen_range(0.0..3500.0), rng.gen_range(0.0..3500.0), rng.gen_range(0.0..100.0));
        let b = Vec3::new(rng.gen_range(0.0..3500.0), rng.gen_range(0.0..3500.0), rng.gen_range(0.0..100.0));
        let mut t: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        t.sort_by(f64::total_cmp);
        let mut pts = vec![a];
        pts.extend(t.iter().map(|&s| a.lerp(b, s)));
        pts.push(b);
        let l = polyline_length(&spline_path(&pts, 4, 100).unwrap());
        worst_line = worst_line.max((l - a.distance(b)).abs() / a.distance(b));
    }
    verdict(
        worst < 1e-3 && worst_line < 1e-9,
        format!("worst chord gap {worst:.2e} over 1000 sets; collinear {worst_line:.1e}"),
    )
}

fn warm_start_dominance() -> Verdict {
    const CASES: usize = 10_000;
    const WORLDS: usize = 10;
    let limits = VehicleLimits::default();
    let small = |engine: EngineKind, pop: usize, iters: usize| {
        let mut cfg = MotionConfig::default();
        cfg.engine = cfg.engine.with_engine(engine);
        cfg.engine.population = pop;
        cfg.engine.iterations = iters;
        cfg
    };
    // alternate open-water and clustered scenarios; each world holds one
    // previous path per engine
    let worlds: Vec<_> = (0..WORLDS as u64)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(w);
            let sc = if w % 2 == 0 { scenario_one::<f64, _>(&mut rng) } else { scenario_two::<f64, _>(&mut rng) }.unwrap();
            let prev: Vec<_> = EngineKind::ALL
                .iter()
                .map(|&e| plan_path(&sc.env, sc.start, sc.goal, &limits, &small(e, 20, 15), &mut rng, None).unwrap().0)
                .collect();
            (sc, prev)
        })
        .collect();
    let worse: Vec<String> = (0..CASES)
        .into_par_iter()
        .filter_map(|case| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + case as u64);
            let (sc, prevs) = &worlds[case % WORLDS];
            let e = rng.gen_range(0..3);
            let prev = &prevs[e];
            let here = prev.states[rng.gen_range(0..prev.states.len() - 1)].position;
            let cfg = small(EngineKind::ALL[e], 8, 3);
            let r = match replan_path(prev, &sc.env, here, &limits, &cfg, &mut rng) {
                Ok(r) => r,
                Err(err) => return Some(format!("case {case}: {err}")),
            };
            let mut cp = prev.control_points.clone();
            cp[0] = here;
            let reanchored = MotionProblem::new(&sc.env, here, sc.goal, limits, &cfg).unwrap().solution(cp);
            (path_cost(&r.solution, &limits) > path_cost(&reanchored, &limits)).then(|| format!("case {case}"))
        })
        .collect();
    verdict(
        worse.is_empty(),
        format!("{} of {CASES} replans above the re-anchored previous path{}", worse.len(), worse.first().map_or(String::new(), |c| format!(", first {c}"))),
    )
}

fn ledger_identity() -> Verdict {
    let cfg = RunConfig::preset("ch7_armpa").unwrap();
    assert_eq!(cfg.armpa.charge, ChargeKind::Fixed);
    let seeds = run_seeds(cfg.run.seed, cfg.armpa.runs);
    let reports: Vec<_> = seeds.par_iter().map(|&s| armpa_run(&cfg, s)).collect();
    let mut unbalanced = 0;
    let mut late = 0;
    let mut errors = 0;
    let mut successes = 0;
    for r in &reports {
        let Ok((_, r)) = r else {
            errors += 1;
            continue;
        };
        let legs: i64 = r.legs.iter().map(|l| to_micros(l.path_time)).sum();
        let charges = to_micros(r.charged_mission) + to_micros(r.charged_motion);
        if to_micros(r.budget) != to_micros(r.final_budget) + legs + charges || !r.ledger.balanced() {
            unbalanced += 1;
        }
        if r.success() {
            successes += 1;
            late += usize::from(r.mission_time > r.budget);
        }
    }
    let mut scripted = cfg.clone();
    scripted.armpa.scenario = ArmpaScenario::Scripted;
    scripted.armpa.mode = armpa_core::synchron::ExecutionMode::Deterministic;
    let fixture = match armpa_run(&scripted, scripted.run.seed) {
        Ok((_, r)) => {
            let labels: Vec<usize> = r.route.iter().map(|&i| label(i)).collect();
            r.plans.len() == 3 && labels == [1, 9, 12, 4, 6, 17, 10, 19, 20] && r.remaining_time == 213.0
        }
        Err(_) => false,
    };
    verdict(
        unbalanced == 0 && late == 0 && errors == 0 && fixture,
        format!(
            "{} runs, {successes} successful, {unbalanced} unbalanced, {late} late, {errors} errors; scripted fixture {}",
            reports.len(),
            if fixture { "3 plans, 9 stations, 213 s left" } else { "mismatch" }
        ),
    )
}

/// File contents with wall-clock data masked: `_ms` keys in JSON, `_ms`
/// columns and `_ms`-labelled rows in CSV. `None` for a figure drawn from
/// wall-clock data.
fn masked(path: &Path) -> Option<String> {
    fn timed(s: &str) -> bool {
        s.ends_with("_ms")
    }
    fn mask_json(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, x) in m.iter_mut() {
                    if timed(k) {
                        *x = serde_json::Value::Null;
                    } else {
                        mask_json(x);
                    }
                }
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(mask_json),
            _ => {}
        }
    }
    let text = std::fs::read_to_string(path).unwrap();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
            mask_json(&mut v);
            Some(v.to_string())
        }
        Some("csv") => {
            let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
            let rows: Vec<Vec<String>> = r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect();
            let header = rows.first().cloned().unwrap_or_default();
            let kept: Vec<String> = rows
                .iter()
                .filter(|row| !row.first().is_some_and(|c| timed(c)))
                .map(|row| row.iter().enumerate().filter(|(k, _)| !header.get(*k).is_some_and(|h| timed(h))).map(|(_, c)| c.as_str()).collect::<Vec<_>>().join(","))
                .collect();
            Some(kept.join("\n"))
        }
        Some("svg") => {
            let twin = std::fs::read_to_string(path.with_extension("csv")).unwrap_or_default();
            let drawn_from_clock = twin.lines().any(|l| l.split(',').any(|c| timed(c)));
            (!drawn_from_clock).then_some(text)
        }
        _ => Some(text),
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, Option<String>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            for (k, v) in snapshot(&p) {
                out.insert(format!("{}/{k}", p.file_name().unwrap().to_string_lossy()), v);
            }
        } else {
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), masked(&p));
        }
    }
    out
}

fn determinism() -> Verdict {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mp_small.cfg");
    let tmp = tempfile::tempdir().unwrap();
    let threaded = tmp.path().join("threaded.cfg");
    let text = std::fs::read_to_string(&fixture).unwrap().replace("mode = \"deterministic\"", "mode = \"threaded\"");
    std::fs::write(&threaded, text).unwrap();
    let commands: Vec<(&str, Vec<&str>, &Path)> = vec![
        ("gen-env", vec!["gen-env"], &fixture),
        ("gen-graph", vec!["gen-graph"], &fixture),
        ("plan-mission", vec!["plan-mission"], &fixture),
        ("plan-path", vec!["plan-path"], &fixture),
        ("run-armpa", vec!["run-armpa"], &fixture),
        ("run-armpa-threaded", vec!["run-armpa"], &threaded),
        ("mc-mission", vec!["monte-carlo", "--mode", "mission"], &fixture),
        ("mc-motion", vec!["monte-carlo", "--mode", "motion"], &fixture),
        ("mc-armpa", vec!["monte-carlo", "--mode", "armpa"], &fixture),
        ("mc-scaling", vec!["monte-carlo", "--mode", "scaling"], &fixture),
    ];
    let mut files = 0;
    let mut skipped = 0;
    let mut diffs = Vec::new();
    for (name, args, cfg) in &commands {
        let mut snaps = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{name}-{rep}"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_armpa"));
            cmd.args(args).arg("--config").arg(cfg).args(["--seed", "7", "--out"]).arg(&out);
            let status = cmd.output().unwrap().status;
            if !status.success() {
                diffs.push(format!("{name} exited with {status}"));
            }
            // figures are outputs too
            let _ = Command::new(env!("CARGO_BIN_EXE_armpa")).args(["plot", "--input"]).arg(&out).output();
            snaps.push(snapshot(&out));
        }
        files += snaps[0].len();
        skipped += snaps[0].values().filter(|v| v.is_none()).count();
        if snaps[0].keys().ne(snaps[1].keys()) {
            diffs.push(format!("{name}: different file sets"));
        }
        for (file, a) in &snaps[0] {
            if snaps[1].get(file) != Some(a) {
                diffs.push(format!("{name}/{file}"));
            }
        }
    }
    verdict(
        diffs.is_empty() && files > 0,
        format!(
            "{} commands, {files} files compared ({skipped} wall-clock figures excluded), {} differ{}",
            commands.len(),
            diffs.len(),
            diffs.first().map_or(String::new(), |d| format!(", first {d}"))
        ),
    )
}

fn de_identity<T: Real>(rng: &mut ChaCha8Rng) -> bool {
    let bounds = vec![(T::of(-50.0), T::of(50.0)); 4];
    let problem = FnProblem { bounds: bounds.clone(), f: |x: &[T]| x.iter().fold(T::zero(), |s, &v| s + v * v) };
    (0..200).all(|_| {
        let members: Vec<Vec<T>> = (0..8).map(|_| bounds.iter().map(|_| T::of(rng.gen_range(-50.0..50.0))).collect()).collect();
        let r = [rng.gen_range(0..8), rng.gen_range(0..8), rng.gen_range(0..8)];
        let w = T::of(rng.gen_range(0.01..10.0));
        let base = mutant(&members, r, [w, T::zero(), T::zero()], T::zero()) == members[r[0]];
        // a whole generation then only ever copies existing members
        let costs = members.iter().map(|m| m.iter().fold(T::zero(), |s, &v| s + v * v)).collect();
        let mut pop = Population { members: members.clone(), costs };
        let params = DeParams { scale: (T::zero(), T::zero()), crossover: T::one(), donor_weights: Some([T::one(), T::zero(), T::zero()]) };
        de_step(&mut pop, &params, &problem, rng);
        base && pop.members.iter().all(|m| members.contains(m))
    })
}

fn pso_identity<T: Real>(rng: &mut ChaCha8Rng) -> bool {
    let bounds = vec![(T::of(-50.0), T::of(50.0)); 3];
    let problem = FnProblem { bounds: bounds.clone(), f: |x: &[T]| x.iter().fold(T::zero(), |s, &v| s + v * v) };
    let params = PsoParams { c1: T::zero(), c2: T::zero(), inertia: (T::zero(), T::zero()), velocity_fraction: T::of(0.2) };
    (0..50).all(|_| {
        let members: Vec<Vec<T>> = (0..10).map(|_| bounds.iter().map(|_| T::of(rng.gen_range(-50.0..50.0))).collect()).collect();
        let costs = members.iter().map(|m| m.iter().fold(T::zero(), |s, &v| s + v * v)).collect();
        let mut swarm = Swarm::new(Population { members: members.clone(), costs }, &bounds, &params, rng);
        let before = swarm.personal_best.clone();
        (1..=20).all(|t| {
            pso_step(&mut swarm, &params, t, 20, &problem, rng);
            swarm.positions == members && swarm.personal_best == before
        })
    })
}

fn bbo_identity() -> bool {
    let mut ok = true;
    for k in 1..=256u32 {
        let e = k as f64 / 256.0;
        let p = BboParams { immigration: e, emigration: e, mutation_max: 0.5, elites: 1, species_dt: 0.0 };
        let skew = BboParams { immigration: 1.0 - e / 2.0, ..p.clone() };
        for s_max in [1usize, 2, 4, 8, 16, 32, 64] {
            ok &= p.rates(s_max, s_max) == (0.0, e) && skew.rates(s_max, s_max) == (0.0, e);
            ok &= (0..=s_max).all(|s| {
                let (l, m) = p.rates(s, s_max);
                l + m == e
            });
        }
    }
    ok
}

fn engine_identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let de = de_identity::<f64>(&mut rng) && de_identity::<f32>(&mut rng);
    let pso = pso_identity::<f64>(&mut rng) && pso_identity::<f32>(&mut rng);
    let bbo = bbo_identity();
    let word = |b: bool| if b { "exact" } else { "broken" };
    verdict(de && pso && bbo, format!("DE base vector {}, PSO frozen swarm {}, BBO rates {}", word(de), word(pso), word(bbo)))
}
