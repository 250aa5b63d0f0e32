use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use qnoc_cli::experiment::{execute, run_experiment, summarize, write_csv};
use qnoc_cli::{emit_plot_data, CliError, ExperimentSpec, KeyValues, StrategySet};

#[derive(Parser)]
#[command(
    name = "qnoc",
    version,
    about = "Inter-core teleportation simulator for mesh quantum NoCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one strategy (default twt).
    Run(Common),
    /// Simulate hh and twt on the same workloads.
    Compare(Common),
    /// Run a sweep exactly as configured.
    Sweep(Common),
    /// Print a generated circuit in the text format.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Write the circuit here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derive per-figure plot data from a result CSV.
    Plotdata {
        csv: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Key-value experiment file; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// hh, twt or both.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or both.
    #[arg(long)]
    format: Option<String>,
    /// Workload list: synthetic, qft, cuccaro, mcmt, qv.
    #[arg(long)]
    bench: Option<String>,
    /// Circuit file to simulate.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Synthetic depth list.
    #[arg(long)]
    depth: Option<String>,
    /// Synthetic requests per layer list.
    #[arg(long)]
    rpl: Option<String>,
    /// Connectivity radius list: fixed:<r> or random:<max>.
    #[arg(long)]
    cr: Option<String>,
    /// Total synthetic request list.
    #[arg(long)]
    requests: Option<String>,
    /// Qubits for qft and qv.
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    controls: Option<usize>,
    #[arg(long)]
    targets: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    /// Any configuration key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn absolute(p: &Path) -> anyhow::Result<String> {
    Ok(std::env::current_dir()?.join(p).display().to_string())
}

impl Common {
    /// Merged configuration and the directory its relative paths resolve against.
    fn load(&self) -> anyhow::Result<(KeyValues, PathBuf)> {
        let (mut kv, base) = match &self.config {
            Some(path) => {
                let kv = KeyValues::load(path)?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (kv, base)
            }
            None => (KeyValues::default(), std::env::current_dir()?),
        };
        let mut set = |k: &str, v: String| kv.set(k, v);
        if let Some(s) = &self.strategy {
            set("strategy", s.clone());
        }
        if let Some(s) = self.seed {
            set("seed", s.to_string());
            set("sweep.seeds", s.to_string());
        }
        if let Some(o) = &self.out {
            set("output.dir", absolute(o)?);
        }
        if let Some(f) = &self.format {
            set("output.format", f.clone());
        }
        if let Some(b) = &self.bench {
            set("workload", b.clone());
        }
        if let Some(c) = &self.circuit {
            set("workload", "file".into());
            set("file.path", absolute(c)?);
        }
        if let Some(d) = &self.depth {
            set("synthetic.depth", d.clone());
        }
        if let Some(k) = &self.rpl {
            set("synthetic.requests_per_layer", k.clone());
        }
        if let Some(c) = &self.cr {
            set("sweep.cr", c.clone());
        }
        if let Some(n) = &self.requests {
            set("sweep.requests", n.clone());
        }
        if let Some(q) = self.qubits {
            set("qft.qubits", q.to_string());
            set("qv.qubits", q.to_string());
        }
        if let Some(b) = self.bits {
            set("cuccaro.bits", b.to_string());
        }
        if let Some(c) = self.controls {
            set("mcmt.controls", c.to_string());
        }
        if let Some(t) = self.targets {
            set("mcmt.targets", t.to_string());
        }
        if let Some(l) = self.layers {
            set("qv.layers", l.to_string());
        }
        for pair in &self.set {
            kv.set_pair(pair)?;
        }
        Ok((kv, base))
    }

    fn spec(&self) -> anyhow::Result<ExperimentSpec> {
        self.spec_with(None)
    }

    /// Builds the spec, filling `strategy` when neither file nor flag set it.
    fn spec_with(&self, strategy: Option<&str>) -> anyhow::Result<ExperimentSpec> {
        let (mut kv, base) = self.load()?;
        if let Some(s) = strategy {
            if !kv.contains("strategy") {
                kv.set("strategy", s);
            }
        }
        Ok(ExperimentSpec::from_config(&kv, &base)?)
    }
}

fn simulate(spec: &ExperimentSpec) -> anyhow::Result<()> {
    if let Some(dir) = &spec.output_dir {
        for path in run_experiment(spec, dir)? {
            eprintln!("wrote {}", path.display());
        }
        return Ok(());
    }
    let outcome = execute(spec);
    let stdout = std::io::stdout();
    write_csv(stdout.lock(), &outcome.rows)?;
    if let Some(red) = summarize(&spec.name, &outcome.rows).reduction {
        eprintln!(
            "twt reduction: critical {:.2}%, sum {:.2}%, depth {:.2}%",
            red.comm_delay_critical_pct, red.comm_delay_sum_pct, red.expanded_depth_pct
        );
    }
    match outcome.error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn gen(common: &Common, output: Option<&Path>) -> anyhow::Result<()> {
    let spec = common.spec()?;
    if spec.workloads.len() != 1 {
        bail!(
            "gen needs exactly one workload, got {}",
            spec.workloads.len()
        );
    }
    let point = spec
        .points()
        .into_iter()
        .next()
        .context("nothing to generate")?;
    let text = spec.circuit(&point)?.to_text();
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(c) => {
            let spec = c.spec_with(Some("twt"))?;
            if spec.strategies == StrategySet::Both {
                bail!("run takes one strategy; use compare for both");
            }
            simulate(&spec)
        }
        Command::Compare(c) => {
            if c.strategy.is_some() {
                bail!("compare always runs both strategies");
            }
            let mut spec = c.spec()?;
            spec.strategies = StrategySet::Both;
            simulate(&spec)
        }
        Command::Sweep(c) => simulate(&c.spec()?),
        Command::Gen { common, output } => gen(&common, output.as_deref()),
        Command::Plotdata { csv, out } => {
            for path in emit_plot_data(&csv, &out)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
