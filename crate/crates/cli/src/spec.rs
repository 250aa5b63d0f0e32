//! Experiment specifications built from configuration keys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qnoc_core::{parse_circuit, Circuit, Config, CrMode, MeshTopology, Strategy, Timing};

use crate::config::KeyValues;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            _ => Err(format!("unknown format `{s}` (csv, json or both)")),
        }
    }
}

/// Strategy selection: one strategy or both for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategySet {
    One(Strategy),
    Both,
}

impl StrategySet {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategySet::One(s) => vec![s],
            StrategySet::Both => Strategy::ALL.to_vec(),
        }
    }
}

impl FromStr for StrategySet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "both" => Ok(StrategySet::Both),
            other => other
                .parse::<Strategy>()
                .map(StrategySet::One)
                .map_err(|e| format!("{e} (or both)")),
        }
    }
}

/// How a synthetic workload turns a request count into a circuit shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Fixed depth; requests per layer = requests / depth.
    Depth(usize),
    /// Fixed requests per layer; depth = requests / per_layer.
    PerLayer(usize),
}

impl Shape {
    /// `(depth, requests_per_layer)` for a total request count.
    pub fn split(self, requests: usize) -> Option<(usize, usize)> {
        let (fixed, other) = match self {
            Shape::Depth(d) => (d, requests / d.max(1)),
            Shape::PerLayer(k) => (k, requests / k.max(1)),
        };
        if fixed == 0 || requests == 0 || !requests.is_multiple_of(fixed) {
            return None;
        }
        Some(match self {
            Shape::Depth(_) => (fixed, other),
            Shape::PerLayer(_) => (other, fixed),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Synthetic(Shape),
    Qft { qubits: usize },
    Cuccaro { bits: usize },
    Mcmt { controls: usize, targets: usize },
    QuantumVolume { qubits: usize, layers: usize },
    File { name: String, circuit: Circuit },
}

impl Workload {
    pub fn label(&self) -> String {
        match self {
            Workload::Synthetic(Shape::Depth(d)) => format!("synthetic-d{d}"),
            Workload::Synthetic(Shape::PerLayer(k)) => format!("synthetic-rpl{k}"),
            Workload::Qft { .. } => "qft".into(),
            Workload::Cuccaro { .. } => "cuccaro".into(),
            Workload::Mcmt { .. } => "mcmt".into(),
            Workload::QuantumVolume { .. } => "qv".into(),
            Workload::File { name, .. } => name.clone(),
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self, Workload::Synthetic(_))
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub strategies: StrategySet,
    pub sim: Config,
    pub workloads: Vec<Workload>,
    /// Total request counts swept for synthetic workloads.
    pub requests: Vec<usize>,
    pub cr: Vec<CrMode>,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
}

const WORKLOADS: [&str; 6] = ["synthetic", "qft", "cuccaro", "mcmt", "qv", "file"];

impl ExperimentSpec {
    /// Builds a spec from configuration keys. Relative paths resolve against `base`.
    pub fn from_config(kv: &KeyValues, base: &Path) -> Result<Self> {
        let name = kv.str("name").unwrap_or("experiment").to_string();
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::config(
                &kv.origin("name"),
                "name must be a plain file stem",
            ));
        }
        let strategies = kv.get_or("strategy", StrategySet::Both)?;

        let d = Timing::default();
        let timing = Timing {
            t_epr: kv.get_or("timing.t_epr", d.t_epr)?,
            t_meas: kv.get_or("timing.t_meas", d.t_meas)?,
            t_classical: kv.get_or("timing.t_classical", d.t_classical)?,
            t_correct: kv.get_or("timing.t_correct", d.t_correct)?,
            t_gate: kv.get_or("timing.t_gate", d.t_gate)?,
            p_bsm: kv.get_or("timing.p_bsm", d.p_bsm)?,
            max_attempts: kv.get("timing.max_attempts")?,
        };
        let base_cfg = Config::default();
        let width = kv.get_or("mesh.width", base_cfg.topology.width())?;
        let height = kv.get_or("mesh.height", base_cfg.topology.height())?;
        let topology = MeshTopology::new(width, height)
            .map_err(|e| CliError::config(&kv.origin("mesh.width"), e.to_string()))?;
        let seed = kv.get_or("seed", 0u64)?;
        let sim = Config {
            topology,
            n_per_core: kv.get_or("mesh.qubits_per_core", base_cfg.n_per_core)?,
            m_per_core: kv.get_or("mesh.comm_qubits", base_cfg.m_per_core)?,
            timing,
            strategy: Strategy::TwoWay,
            seed,
            pipelining: kv.get_or("engine.pipelining", false)?,
        };
        sim.validate()
            .map_err(|e| CliError::config(&kv.origin("timing.p_bsm"), e.to_string()))?;

        // Every workload key is read so a key for an unused workload is not "unknown".
        let qft = kv.get_or("qft.qubits", 32usize)?;
        let cuccaro = kv.get_or("cuccaro.bits", 15usize)?;
        let controls = kv.get_or("mcmt.controls", 8usize)?;
        let targets = kv.get_or("mcmt.targets", 17usize)?;
        let qv_qubits = kv.get_or("qv.qubits", 32usize)?;
        let qv_layers = kv.get_or("qv.layers", 32usize)?;
        let depths = kv.list::<usize>("synthetic.depth")?;
        let per_layer = kv.list::<usize>("synthetic.requests_per_layer")?;
        let files = kv.list::<String>("file.path")?;

        let names = kv.list::<String>("workload")?.unwrap_or_default();
        if names.is_empty() {
            return Err(CliError::config(
                &kv.origin("workload"),
                "no workload given",
            ));
        }
        let mut workloads = Vec::new();
        for w in &names {
            let origin = kv.origin("workload");
            match w.as_str() {
                "synthetic" => {
                    let shapes: Vec<Shape> = match (&depths, &per_layer) {
                        (Some(d), None) => d.iter().map(|&d| Shape::Depth(d)).collect(),
                        (None, Some(k)) => k.iter().map(|&k| Shape::PerLayer(k)).collect(),
                        _ => {
                            return Err(CliError::config(
                                &origin,
                                "synthetic needs exactly one of synthetic.depth or synthetic.requests_per_layer",
                            ))
                        }
                    };
                    if shapes
                        .iter()
                        .any(|s| matches!(s, Shape::Depth(0) | Shape::PerLayer(0)))
                    {
                        return Err(CliError::config(
                            &origin,
                            "synthetic shape values must be positive",
                        ));
                    }
                    workloads.extend(shapes.into_iter().map(Workload::Synthetic));
                }
                "qft" => workloads.push(Workload::Qft { qubits: qft }),
                "cuccaro" => workloads.push(Workload::Cuccaro { bits: cuccaro }),
                "mcmt" => workloads.push(Workload::Mcmt { controls, targets }),
                "qv" => workloads.push(Workload::QuantumVolume {
                    qubits: qv_qubits,
                    layers: qv_layers,
                }),
                "file" => {
                    let paths = files.clone().ok_or_else(|| {
                        CliError::config(&origin, "workload `file` needs file.path")
                    })?;
                    for p in paths {
                        workloads.push(load_file(&base.join(&p))?);
                    }
                }
                other => {
                    return Err(CliError::config(
                        &origin,
                        format!(
                            "unknown workload `{other}` (one of {})",
                            WORKLOADS.join(", ")
                        ),
                    ))
                }
            }
        }

        let requests = kv.list::<usize>("sweep.requests")?.unwrap_or_default();
        let cr = kv.list::<CrMode>("sweep.cr")?.unwrap_or_default();
        let seeds = kv.list::<u64>("sweep.seeds")?.unwrap_or_else(|| vec![seed]);
        if seeds.is_empty() {
            return Err(CliError::config(
                &kv.origin("sweep.seeds"),
                "sweep.seeds is empty",
            ));
        }
        if workloads.iter().any(Workload::is_synthetic) {
            if requests.is_empty() {
                return Err(CliError::config(
                    &kv.origin("sweep.requests"),
                    "synthetic workloads need sweep.requests",
                ));
            }
            if cr.is_empty() {
                return Err(CliError::config(
                    &kv.origin("sweep.cr"),
                    "synthetic workloads need sweep.cr",
                ));
            }
            for w in &workloads {
                if let Workload::Synthetic(shape) = w {
                    if let Some(&n) = requests.iter().find(|&&n| shape.split(n).is_none()) {
                        return Err(CliError::config(
                            &kv.origin("sweep.requests"),
                            format!("{n} requests do not divide evenly for {w}"),
                        ));
                    }
                }
            }
        }

        let output_dir = kv.str("output.dir").map(|d| base.join(d));
        let format = kv.get_or("output.format", Format::Both)?;
        kv.reject_unread()?;

        Ok(ExperimentSpec {
            name,
            strategies,
            sim,
            workloads,
            requests,
            cr,
            seeds,
            output_dir,
            format,
        })
    }
}

fn load_file(path: &Path) -> Result<Workload> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let circuit = parse_circuit(&text).map_err(|source| CliError::Circuit {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    Ok(Workload::File { name, circuit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> Result<ExperimentSpec> {
        ExperimentSpec::from_config(&KeyValues::parse(text, "t.conf")?, Path::new("."))
    }

    #[test]
    fn defaults() {
        let s = spec("workload = qft\n").unwrap();
        assert_eq!(s.name, "experiment");
        assert_eq!(s.strategies, StrategySet::Both);
        assert_eq!(s.sim, Config::default().with_strategy(Strategy::TwoWay));
        assert_eq!(s.workloads, vec![Workload::Qft { qubits: 32 }]);
        assert_eq!(s.seeds, vec![0]);
        assert_eq!(s.format, Format::Both);
        assert!(s.output_dir.is_none());
    }

    #[test]
    fn full_synthetic_sweep() {
        let s = spec(
            "name = sweep\nstrategy = hh\nseed = 4\nmesh.comm_qubits = 3\ntiming.t_epr = 7.5\n\
             timing.p_bsm = 0.5\nengine.pipelining = true\nworkload = synthetic, cuccaro\n\
             synthetic.depth = 5, 10\ncuccaro.bits = 3\nsweep.requests = 10, 20\n\
             sweep.cr = fixed:3, random:6\noutput.dir = out\noutput.format = csv\n",
        )
        .unwrap();
        assert_eq!(s.strategies, StrategySet::One(Strategy::HopByHop));
        assert_eq!(s.sim.m_per_core, 3);
        assert_eq!(s.sim.timing.t_epr, 7.5);
        assert!(s.sim.pipelining);
        assert_eq!(
            s.workloads,
            vec![
                Workload::Synthetic(Shape::Depth(5)),
                Workload::Synthetic(Shape::Depth(10)),
                Workload::Cuccaro { bits: 3 }
            ]
        );
        assert_eq!(s.cr, vec![CrMode::Fixed(3), CrMode::Random(6)]);
        assert_eq!(s.seeds, vec![4]);
        assert_eq!(s.output_dir, Some(PathBuf::from("./out")));
        assert_eq!(s.format, Format::Csv);
    }

    #[test]
    fn shape_split() {
        assert_eq!(Shape::Depth(5).split(20), Some((5, 4)));
        assert_eq!(Shape::PerLayer(2).split(20), Some((10, 2)));
        assert_eq!(Shape::Depth(5).split(12), None);
        assert_eq!(Shape::PerLayer(3).split(0), None);
    }

    #[test]
    fn rejects_bad_specs() {
        for (text, needle) in [
            ("workload = synthetic\nsynthetic.depth = 5\nsweep.cr = fixed:1\n", "sweep.requests"),
            ("workload = synthetic\nsynthetic.depth = 5\nsweep.requests = 5\n", "sweep.cr"),
            (
                "workload = synthetic\nsynthetic.depth = 5\nsweep.requests = 7\nsweep.cr = fixed:1\n",
                "divide",
            ),
            ("workload = synthetic\nsweep.requests = 5\nsweep.cr = fixed:1\n", "exactly one"),
            ("workload = teleporter\n", "unknown workload"),
            ("workload = qft\nstrategy = fastest\n", "strategy"),
            ("workload = qft\nmesh.qubits_per_core = 0\n", "n_per_core"),
            ("workload = qft\ntiming.p_bsm = 1.5\n", "p_bsm"),
            ("workload = qft\nqft.qbits = 3\n", "unknown key"),
            ("workload = file\n", "file.path"),
            ("workload = file\nfile.path = /nonexistent/c.qc\n", "nonexistent"),
            ("name = a/b\nworkload = qft\n", "name"),
            ("", "no workload"),
        ] {
            let err = spec(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn error_points_at_offending_line() {
        let err = spec("workload = qft\n\nmesh.width = x\n")
            .unwrap_err()
            .to_string();
        assert!(err.starts_with("t.conf:3:"), "{err}");
    }

    #[test]
    fn circuit_files_resolve_against_base() {
        let dir = std::env::temp_dir().join(format!("qnoc-spec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("pair.qc"), "qubits 4\ncx 0 3\n").unwrap();
        std::fs::write(dir.join("bad.qc"), "qubits 4\ncx 0 9\n").unwrap();
        let kv = KeyValues::parse("workload = file\nfile.path = pair.qc\n", "t.conf").unwrap();
        let s = ExperimentSpec::from_config(&kv, &dir).unwrap();
        assert_eq!(s.workloads[0].label(), "pair");
        let kv = KeyValues::parse("workload = file\nfile.path = bad.qc\n", "t.conf").unwrap();
        let err = ExperimentSpec::from_config(&kv, &dir)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bad.qc"), "{err}");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
