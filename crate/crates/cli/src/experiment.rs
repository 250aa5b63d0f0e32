//! Sweep expansion, parallel execution and result files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qnoc_core::engine::reduction;
use qnoc_core::{benchgen, gen_synthetic_for, run, Circuit, CrMode, Report, Strategy, SynthSpec};

use crate::error::{CliError, Result};
use crate::spec::{ExperimentSpec, Workload};

/// One simulation: a workload instance under one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub workload: usize,
    pub cr: Option<CrMode>,
    /// Total synthetic requests; `None` for fixed benchmarks.
    pub requests: Option<usize>,
    pub seed: u64,
    pub strategy: Strategy,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub workload: String,
    pub strategy: String,
    pub cr_mode: String,
    pub num_requests: usize,
    pub seed: u64,
    pub comm_delay_sum: f64,
    pub comm_delay_critical: f64,
    pub total_delay: f64,
    pub original_depth: usize,
    pub expanded_depth: usize,
    pub congestion_events: usize,
    pub max_core_occupancy: usize,
}

pub const COLUMNS: [&str; 12] = [
    "workload",
    "strategy",
    "cr_mode",
    "num_requests",
    "seed",
    "comm_delay_sum",
    "comm_delay_critical",
    "total_delay",
    "original_depth",
    "expanded_depth",
    "congestion_events",
    "max_core_occupancy",
];

/// Placeholder `cr_mode` for benchmarks with no radius axis.
pub const NO_CR: &str = "-";

impl ExperimentSpec {
    /// Every point in output order: workload, C_r, requests, seed, strategy.
    pub fn points(&self) -> Vec<Point> {
        let strategies = self.strategies.strategies();
        let mut out = Vec::new();
        for (w, workload) in self.workloads.iter().enumerate() {
            let axes: Vec<(Option<CrMode>, Option<usize>)> = if workload.is_synthetic() {
                self.cr
                    .iter()
                    .flat_map(|&cr| self.requests.iter().map(move |&n| (Some(cr), Some(n))))
                    .collect()
            } else {
                vec![(None, None)]
            };
            for (cr, requests) in axes {
                for &seed in &self.seeds {
                    for &strategy in &strategies {
                        out.push(Point {
                            workload: w,
                            cr,
                            requests,
                            seed,
                            strategy,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn describe(&self, p: &Point) -> String {
        let mut s = format!("{}", self.workloads[p.workload]);
        if let Some(cr) = p.cr {
            s += &format!(" cr={cr}");
        }
        if let Some(n) = p.requests {
            s += &format!(" requests={n}");
        }
        s + &format!(" seed={} strategy={}", p.seed, p.strategy)
    }

    /// The circuit a point executes. Synthetic circuits are generated for the
    /// point's strategy so every request sits at the drawn radius.
    pub fn circuit(&self, p: &Point) -> Result<Circuit> {
        let err = |source| CliError::Run {
            point: self.describe(p),
            source,
        };
        match &self.workloads[p.workload] {
            Workload::Synthetic(shape) => {
                let n = p.requests.unwrap_or(0);
                let (target_depth, requests_per_layer) = shape.split(n).ok_or_else(|| {
                    err(qnoc_core::Error::Config(format!(
                        "{n} requests do not divide evenly"
                    )))
                })?;
                let spec = SynthSpec {
                    target_depth,
                    requests_per_layer,
                    cr_mode: p.cr.unwrap_or(CrMode::Fixed(1)),
                    seed: p.seed,
                };
                gen_synthetic_for(&spec, &self.sim.topology, self.sim.n_per_core, p.strategy)
            }
            Workload::Qft { qubits } => benchgen::gen_qft(*qubits),
            Workload::Cuccaro { bits } => benchgen::gen_cuccaro(*bits),
            Workload::Mcmt { controls, targets } => benchgen::gen_mcmt(*controls, *targets),
            Workload::QuantumVolume { qubits, layers } => {
                benchgen::gen_quantum_volume(*qubits, *layers, p.seed)
            }
            Workload::File { circuit, .. } => Ok(circuit.clone()),
        }
        .map_err(err)
    }

    pub fn simulate(&self, p: &Point) -> Result<(Circuit, Report)> {
        let circuit = self.circuit(p)?;
        let cfg = qnoc_core::Config {
            strategy: p.strategy,
            seed: p.seed,
            ..self.sim.clone()
        };
        let report = run(&circuit, &cfg).map_err(|source| CliError::Run {
            point: self.describe(p),
            source,
        })?;
        Ok((circuit, report))
    }

    pub fn row(&self, p: &Point, circuit: &Circuit, r: &Report) -> Row {
        Row {
            workload: self.workloads[p.workload].label(),
            strategy: p.strategy.token().into(),
            cr_mode: p.cr.map_or_else(|| NO_CR.to_string(), |c| c.to_string()),
            num_requests: p.requests.unwrap_or_else(|| circuit.two_qubit_count()),
            seed: p.seed,
            comm_delay_sum: r.comm_delay_sum,
            comm_delay_critical: r.comm_delay_critical,
            total_delay: r.total_delay,
            original_depth: r.original_depth,
            expanded_depth: r.expanded_depth,
            congestion_events: r.congestion_events,
            max_core_occupancy: r.max_core_occupancy,
        }
    }
}

/// Rows in spec order plus the first failure, if any. Rows of failed points are absent.
#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub error: Option<CliError>,
}

/// Runs every point, in parallel, keeping spec order.
pub fn execute(spec: &ExperimentSpec) -> Outcome {
    let results: Vec<Result<Row>> = spec
        .points()
        .par_iter()
        .map(|p| spec.simulate(p).map(|(c, r)| spec.row(p, &c, &r)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut error = None;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                error.get_or_insert(e);
            }
        }
    }
    Outcome { rows, error }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Means {
    pub runs: usize,
    pub comm_delay_sum: f64,
    pub comm_delay_critical: f64,
    pub total_delay: f64,
    pub expanded_depth: f64,
}

impl Means {
    pub fn of<'a>(rows: impl IntoIterator<Item = &'a Row>) -> Self {
        let mut m = Means::default();
        for r in rows {
            m.runs += 1;
            m.comm_delay_sum += r.comm_delay_sum;
            m.comm_delay_critical += r.comm_delay_critical;
            m.total_delay += r.total_delay;
            m.expanded_depth += r.expanded_depth as f64;
        }
        if m.runs > 0 {
            let n = m.runs as f64;
            m.comm_delay_sum /= n;
            m.comm_delay_critical /= n;
            m.total_delay /= n;
            m.expanded_depth /= n;
        }
        m
    }
}

/// Percentage reductions of two-way over hop-by-hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reductions {
    pub comm_delay_critical_pct: f64,
    pub comm_delay_sum_pct: f64,
    pub expanded_depth_pct: f64,
}

impl Reductions {
    pub fn between(hh: &Means, twt: &Means) -> Self {
        Reductions {
            comm_delay_critical_pct: 100.0
                * reduction(hh.comm_delay_critical, twt.comm_delay_critical),
            comm_delay_sum_pct: 100.0 * reduction(hh.comm_delay_sum, twt.comm_delay_sum),
            expanded_depth_pct: 100.0 * reduction(hh.expanded_depth, twt.expanded_depth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub workload: String,
    pub cr_mode: String,
    pub means: BTreeMap<String, Means>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reductions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub rows: usize,
    pub means: BTreeMap<String, Means>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reductions>,
    pub groups: Vec<Group>,
}

fn by_strategy(rows: &[&Row]) -> (BTreeMap<String, Means>, Option<Reductions>) {
    let mut means = BTreeMap::new();
    for s in Strategy::ALL {
        let m = Means::of(rows.iter().copied().filter(|r| r.strategy == s.token()));
        if m.runs > 0 {
            means.insert(s.token().to_string(), m);
        }
    }
    let red = match (means.get("hh"), means.get("twt")) {
        (Some(hh), Some(twt)) => Some(Reductions::between(hh, twt)),
        _ => None,
    };
    (means, red)
}

/// Groups are `(workload, cr_mode)` pairs in first-appearance order.
pub fn group_keys(rows: &[Row]) -> Vec<(String, String)> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let k = (r.workload.clone(), r.cr_mode.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys
}

pub fn summarize(name: &str, rows: &[Row]) -> Summary {
    let all: Vec<&Row> = rows.iter().collect();
    let (means, reduction) = by_strategy(&all);
    let groups = group_keys(rows)
        .into_iter()
        .map(|(workload, cr_mode)| {
            let members: Vec<&Row> = rows
                .iter()
                .filter(|r| r.workload == workload && r.cr_mode == cr_mode)
                .collect();
            let (means, reduction) = by_strategy(&members);
            Group {
                workload,
                cr_mode,
                means,
                reduction,
            }
        })
        .collect();
    Summary {
        name: name.to_string(),
        rows: rows.len(),
        means,
        reduction,
        groups,
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    let missing: Vec<&str> = COLUMNS
        .iter()
        .copied()
        .filter(|c| !header.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Schema {
            path: path.to_path_buf(),
            message: format!("missing columns: {}", missing.join(", ")),
        });
    }
    rd.deserialize()
        .map(|r| {
            r.map_err(|e| CliError::Schema {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `<name>.csv` and/or `<name>.json` under `dir`; returns the paths written.
pub fn write_outputs(spec: &ExperimentSpec, dir: &Path, rows: &[Row]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    if spec.format.csv() {
        let path = dir.join(format!("{}.csv", spec.name));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        write_csv(file, rows)?;
        written.push(path);
    }
    if spec.format.json() {
        let path = dir.join(format!("{}.json", spec.name));
        let mut text = serde_json::to_string_pretty(&summarize(&spec.name, rows))?;
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Runs the spec and writes whatever succeeded before reporting the first failure.
pub fn run_experiment(spec: &ExperimentSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let outcome = execute(spec);
    let written = write_outputs(spec, dir, &outcome.rows)?;
    match outcome.error {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
