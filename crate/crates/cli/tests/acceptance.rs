//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if any failed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use qnoc_cli::experiment::{execute, Row, NO_CR};
use qnoc_cli::{summarize, ExperimentSpec, KeyValues};
use qnoc_core::strategy::plan_twt;
use qnoc_core::{
    audit, benchgen, run, Circuit, CoreId, Gate, MeshTopology, QubitId, Strategy, TickConfig,
    TickTiming,
};

/// Relative residual allowed for the affine fit of serialized sweeps.
const AFFINE_TOL: f64 = 1e-9;
/// Mean attempts at p_bsm = 0.5 must land within this fraction of 2.
const ATTEMPT_TOL: f64 = 0.02;
const MIN_HOPS: usize = 100_000;

struct Verdict {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn check(
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<String, String>,
) -> Verdict {
    let t = Instant::now();
    let outcome = f();
    let elapsed = t.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let (pass, detail) = match outcome {
        Ok(d) if in_budget => (true, d),
        Ok(d) => (false, format!("{d}; over time budget")),
        Err(d) => (false, d),
    };
    Verdict {
        id,
        title,
        pass,
        detail,
        elapsed,
        budget,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bundle_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

fn bundle() -> Vec<ExperimentSpec> {
    let mut files: Vec<PathBuf> = fs::read_dir(bundle_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "conf"))
        .collect();
    files.sort();
    files.iter().map(|f| load(f, &[])).collect()
}

fn load(path: &Path, overrides: &[&str]) -> ExperimentSpec {
    let mut kv = KeyValues::load(path).unwrap();
    for o in overrides {
        kv.set_pair(o).unwrap();
    }
    ExperimentSpec::from_config(&kv, path.parent().unwrap()).unwrap()
}

fn spec_from(text: &str) -> ExperimentSpec {
    let kv = KeyValues::parse(text, "inline").unwrap();
    ExperimentSpec::from_config(&kv, Path::new(".")).unwrap()
}

fn rows_of(spec: &ExperimentSpec) -> Result<Vec<Row>, String> {
    let out = execute(spec);
    match out.error {
        Some(e) => Err(format!("{}: {e}", spec.name)),
        None => Ok(out.rows),
    }
}

/// One inter-core gate between the first qubits of two cores.
fn isolated(a: usize, b: usize) -> Circuit {
    Circuit::new(32, vec![Gate::two_qubit(0, QubitId(2 * a), QubitId(2 * b))]).unwrap()
}

fn tick(strategy: Strategy) -> TickConfig {
    TickConfig {
        strategy,
        ..TickConfig::default()
    }
}

/// Mean of `y` over seeds for each `(workload, cr, strategy)` group, keyed by requests.
fn curves(rows: &[Row]) -> BTreeMap<(String, String, String), BTreeMap<usize, f64>> {
    let mut acc: BTreeMap<(String, String, String), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        acc.entry((r.workload.clone(), r.cr_mode.clone(), r.strategy.clone()))
            .or_default()
            .entry(r.num_requests)
            .or_default()
            .push(r.comm_delay_critical);
    }
    acc.into_iter()
        .map(|(k, v)| {
            let m = v
                .into_iter()
                .map(|(n, ys)| (n, ys.iter().sum::<f64>() / ys.len() as f64))
                .collect();
            (k, m)
        })
        .collect()
}

fn route_fidelity() -> Result<String, String> {
    let m = MeshTopology::default();
    let route: Vec<usize> = m
        .xy_route(CoreId(0), CoreId(15))
        .unwrap()
        .iter()
        .map(|c| c.0)
        .collect();
    ensure(route == [0, 1, 2, 3, 7, 11, 15], || {
        format!("route {route:?}")
    })?;
    let p = plan_twt(&m, CoreId(0), CoreId(15)).unwrap();
    let ids = |v: &[CoreId]| v.iter().map(|c| c.0).collect::<Vec<_>>();
    ensure(
        p.exec_core == CoreId(3) && ids(&p.src_hops) == [1, 2, 3] && ids(&p.dst_hops) == [11, 7, 3],
        || format!("plan {p:?}"),
    )?;
    Ok("route [0,1,2,3,7,11,15]; meet 3 via [1,2,3] and [11,7,3]".into())
}

fn radius_one_equivalence() -> Result<String, String> {
    let requests: Vec<String> = (1..=32).map(|n| n.to_string()).collect();
    let spec = spec_from(&format!(
        "workload = synthetic\nsynthetic.requests_per_layer = 1\nsweep.cr = fixed:1\n\
         sweep.requests = {}\nsweep.seeds = 0,1,2,3,4,5,6,7,8,9\n",
        requests.join(",")
    ));
    let rows = rows_of(&spec)?;
    ensure(rows.len() == 640, || format!("{} rows", rows.len()))?;
    for pair in rows.chunks(2) {
        let (hh, twt) = (&pair[0], &pair[1]);
        ensure(
            hh.strategy == "hh"
                && twt.strategy == "twt"
                && hh.comm_delay_critical == twt.comm_delay_critical
                && hh.comm_delay_sum == twt.comm_delay_sum,
            || format!("mismatch {hh:?} vs {twt:?}"),
        )?;
    }
    Ok("320 row pairs equal".into())
}

fn rounds_ratio() -> Result<String, String> {
    let m = MeshTopology::default();
    // Closed form on every ordered pair: twt * d == hh * max(split).
    for a in m.cores() {
        for b in m.cores().filter(|&b| b != a) {
            let c = isolated(a.0, b.0);
            let hh = run(&c, &tick(Strategy::HopByHop))
                .unwrap()
                .comm_delay_critical;
            let twt = run(&c, &tick(Strategy::TwoWay))
                .unwrap()
                .comm_delay_critical;
            let d = m.hop_distance(a, b).unwrap() as u64;
            let split = plan_twt(&m, a, b).unwrap().rounds as u64;
            ensure(twt * d == hh * split, || {
                format!("{a:?}->{b:?}: hh {hh} twt {twt}")
            })?;
        }
    }
    let ratio = |a: usize, b: usize| {
        let c = isolated(a, b);
        let hh = run(&c, &tick(Strategy::HopByHop))
            .unwrap()
            .comm_delay_critical;
        let twt = run(&c, &tick(Strategy::TwoWay))
            .unwrap()
            .comm_delay_critical;
        (twt, hh)
    };
    let (t3, h3) = ratio(0, 3);
    let (t6, h6) = ratio(0, 15);
    ensure(3 * t3 == 2 * h3 && 2 * t6 == h6, || {
        format!("d=3 {t3}/{h3}, d=6 {t6}/{h6}")
    })?;

    // Qualitative ordering and dominance on uncontended serialized workloads.
    let serial = load(&bundle_dir().join("serial.conf"), &[]);
    let rows = rows_of(&serial)?;
    let s = summarize(&serial.name, &rows);
    let red = |cr: &str| {
        s.groups
            .iter()
            .find(|g| g.cr_mode == cr)
            .and_then(|g| g.reduction.as_ref())
            .map(|r| r.comm_delay_critical_pct)
            .unwrap_or(f64::NAN)
    };
    let (r1, r3, r6) = (red("fixed:1"), red("fixed:3"), red("fixed:6"));
    ensure(r1 == 0.0 && r1 < r3 && r3 < r6, || {
        format!("reductions {r1} {r3} {r6}")
    })?;
    let mut runs = 0;
    for cr in [
        "fixed:1", "fixed:2", "fixed:3", "fixed:4", "fixed:5", "fixed:6", "random:6",
    ] {
        let spec = spec_from(&format!(
            "workload = synthetic\nsynthetic.requests_per_layer = 1\nsweep.cr = {cr}\n\
             sweep.requests = 1,4,16\nsweep.seeds = 0,1,2,3,4,5,6,7,8,9\n"
        ));
        for pair in rows_of(&spec)?.chunks(2) {
            ensure(
                pair[1].comm_delay_critical <= pair[0].comm_delay_critical,
                || format!("twt slower: {:?}", pair[1]),
            )?;
            runs += 1;
        }
    }
    // Reported, not gated: contention can reverse the ordering on dense workloads.
    let (mut paired, mut reversed) = (0, 0);
    for spec in bundle() {
        for pair in rows_of(&spec)?.chunks(2) {
            paired += 1;
            reversed += usize::from(pair[1].comm_delay_critical > pair[0].comm_delay_critical);
        }
    }
    Ok(format!(
        "d=3 {t3}/{h3} = 2/3, d=6 {t6}/{h6} = 1/2, 240 pairs exact; reductions {r1:.1}% < {r3:.1}% < {r6:.1}%; \
         twt <= hh on {runs}/{runs} uncontended runs; contended bundle twt > hh on {reversed}/{paired}"
    ))
}

fn affine_residual(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let worst = points
        .iter()
        .map(|p| (p.1 - (icept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    worst / points.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
}

fn monotone_sweeps() -> Result<String, String> {
    // Request count grows by adding layers at a fixed number of requests per layer.
    let mut curves_checked = 0;
    let mut plateaus = 0;
    for spec in bundle() {
        let rows = rows_of(&spec)?;
        for ((w, cr, s), curve) in curves(&rows) {
            if cr == NO_CR || !cr.starts_with("fixed") {
                continue;
            }
            let ys: Vec<f64> = curve.values().copied().collect();
            let strict = ys.windows(2).all(|p| p[1] > p[0]);
            if w.starts_with("synthetic-rpl") {
                ensure(strict, || {
                    format!("{w} {cr} {s} not strictly increasing: {curve:?}")
                })?;
                curves_checked += 1;
            } else if !strict {
                // Fixed-depth curves only grow through contention and may stall.
                plateaus += 1;
            }
        }
    }
    // Serialized fixed-radius workloads: exactly affine per seed and on the mean.
    let serial = load(&bundle_dir().join("serial.conf"), &[]);
    let rows = rows_of(&serial)?;
    let mut worst: f64 = 0.0;
    let mut fits = 0;
    let mut series: BTreeMap<(String, String, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        series
            .entry((r.cr_mode.clone(), r.strategy.clone(), r.seed))
            .or_default()
            .push((r.num_requests as f64, r.comm_delay_critical));
    }
    for pts in series.values() {
        worst = worst.max(affine_residual(pts));
        fits += 1;
    }
    for curve in curves(&rows).values() {
        let pts: Vec<(f64, f64)> = curve.iter().map(|(&n, &y)| (n as f64, y)).collect();
        worst = worst.max(affine_residual(&pts));
        fits += 1;
    }
    ensure(worst < AFFINE_TOL, || format!("affine residual {worst:e}"))?;
    Ok(format!(
        "{curves_checked} fixed-radius layer sweeps strictly increasing; {fits} serialized fits, max residual {worst:.1e}; {plateaus} fixed-depth curves non-strict (not gated)"
    ))
}

fn depth_accounting() -> Result<String, String> {
    let m = MeshTopology::default();
    let mut runs = 0;
    for a in m.cores() {
        for b in m.cores().filter(|&b| b != a) {
            let c = isolated(a.0, b.0);
            for s in Strategy::ALL {
                let r = run(&c, &tick(s)).unwrap();
                let p = qnoc_core::strategy::plan(s, &m, a, b).unwrap();
                let added = match s {
                    Strategy::HopByHop => p.src_hops.len(),
                    Strategy::TwoWay => p.src_hops.len().max(p.dst_hops.len()),
                };
                let layered = r.expanded.depth();
                ensure(
                    r.original_depth == c.depth()
                        && r.expanded_depth == layered
                        && layered - r.original_depth == added,
                    || {
                        format!(
                            "{s} {a:?}->{b:?}: {} vs {} + {added}",
                            r.expanded_depth, r.original_depth
                        )
                    },
                )?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} isolated runs match the layering oracle"))
}

fn benchmark_ordering() -> Result<String, String> {
    let spec = load(&bundle_dir().join("benchmarks.conf"), &[]);
    let rows = rows_of(&spec)?;
    let s = summarize(&spec.name, &rows);
    let red: BTreeMap<&str, f64> = s
        .groups
        .iter()
        .map(|g| {
            (
                g.workload.as_str(),
                g.reduction.as_ref().unwrap().comm_delay_critical_pct,
            )
        })
        .collect();
    ensure(red.len() == 4 && red.values().all(|&r| r > 0.0), || {
        format!("{red:?}")
    })?;
    ensure(red["qft"] >= red["cuccaro"], || format!("{red:?}"))?;
    // The full bundle must fit the same budget.
    for spec in bundle() {
        rows_of(&spec)?;
    }
    Ok(red
        .iter()
        .map(|(w, r)| format!("{w} {r:.1}%"))
        .collect::<Vec<_>>()
        .join(", "))
}

fn attempt_statistics() -> Result<String, String> {
    let qv = benchgen::gen_quantum_volume(32, 32, 1).unwrap();
    let (mut hops, mut attempts) = (0usize, 0u64);
    let mut seed = 0;
    while hops < MIN_HOPS {
        let cfg = TickConfig {
            seed,
            timing: TickTiming {
                p_bsm: 0.5,
                ..TickTiming::default()
            },
            ..tick(if seed % 2 == 0 {
                Strategy::HopByHop
            } else {
                Strategy::TwoWay
            })
        };
        let r = run(&qv, &cfg).unwrap();
        hops += r.hops.len();
        attempts += r.total_attempts();
        seed += 1;
    }
    let mean = attempts as f64 / hops as f64;
    ensure((mean - 2.0).abs() <= 2.0 * ATTEMPT_TOL, || {
        format!("mean {mean} over {hops} hops")
    })?;
    Ok(format!("mean {mean:.4} over {hops} hops"))
}

fn determinism_and_audit() -> Result<String, String> {
    let tmp = std::env::temp_dir().join(format!("qnoc-acceptance-{}", std::process::id()));
    let (mut files, mut audited, mut hops) = (0, 0, 0);
    for spec in bundle() {
        let mut bytes = Vec::new();
        for round in 0..2 {
            let dir = tmp.join(format!("{round}"));
            qnoc_cli::run_experiment(&spec, &dir).map_err(|e| e.to_string())?;
            bytes
                .push(fs::read(dir.join(format!("{}.csv", spec.name))).map_err(|e| e.to_string())?);
        }
        ensure(bytes[0] == bytes[1], || {
            format!("{} differs between runs", spec.name)
        })?;
        files += 1;
        for p in spec.points() {
            let (_, r) = spec.simulate(&p).map_err(|e| e.to_string())?;
            let a = audit(&r.hops, spec.sim.m_per_core);
            ensure(a.is_clean(), || format!("{}: {a:?}", spec.describe(&p)))?;
            audited += 1;
            hops += a.hops_checked;
        }
    }
    let _ = fs::remove_dir_all(&tmp);
    Ok(format!(
        "{files} specs byte-identical; {audited} runs, {hops} hops audited clean"
    ))
}

#[test]
fn acceptance() {
    let ms = Duration::from_millis;
    let verdicts = [
        check(1, "route fidelity", Some(ms(1)), route_fidelity),
        check(2, "radius-one equivalence", None, radius_one_equivalence),
        check(3, "rounds ratio", None, rounds_ratio),
        check(4, "monotone sweep shape", None, monotone_sweeps),
        check(5, "depth accounting", Some(ms(10_000)), depth_accounting),
        check(
            6,
            "real-benchmark ordering",
            Some(ms(60_000)),
            benchmark_ordering,
        ),
        check(
            7,
            "protocol statistics",
            Some(ms(10_000)),
            attempt_statistics,
        ),
        check(8, "determinism and audit", None, determinism_and_audit),
    ];
    let mut out = std::io::stdout().lock();
    for v in &verdicts {
        let budget = v.budget.map_or(String::new(), |b| format!(" / {b:?}"));
        // Written past the harness capture so the verdicts show on passing runs too.
        writeln!(
            out,
            "{} {} {}: {} [{:?}{budget}]",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.title,
            v.detail,
            v.elapsed
        )
        .unwrap();
    }
    let failed: Vec<u8> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
