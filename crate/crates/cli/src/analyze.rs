use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Serialize;

use hypop_core::analysis::{
    connectivity_threshold, drop_threshold, family_comparison, mean_ratios, oversmoothing_trace,
    phase_transition_sweep, sparsification_study, write_csv, write_jsonl, SweepConfig, SweepRecord,
};
use hypop_core::hypergraph::generate::erdos_renyi;
use hypop_core::hypergraph::{Hypergraph, PropagationOperator};
use hypop_core::model::{train, HyperGnnModel, SmoothingTrace};
use hypop_core::problems::MaxIndependentSet;

use crate::instance::{load, InputFormat, Instance};
use crate::record::RecordSink;
use crate::settings::{merge, Settings};
use crate::UsageError;

#[derive(Args, Debug, Clone)]
pub struct SweepOutput {
    /// Append records (JSON lines) here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the records as a CSV table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Flat TOML file with default settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report only the thresholded network output, without annealing.
    #[arg(long)]
    pub gnn_only: bool,
}

/// A graph from a file, or `G(n, p)` drawn with `--graph-seed`.
#[derive(Args, Debug, Clone)]
pub struct GraphSource {
    #[arg(long, conflicts_with_all = ["n", "p"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "p")]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
}

impl GraphSource {
    fn graph(&self) -> Result<Hypergraph> {
        match (&self.input, self.n, self.p) {
            (Some(path), _, _) => match load(path, InputFormat::Auto)?.0 {
                Instance::Hypergraph(h) => Ok(h),
                Instance::Cnf(_) => bail!(UsageError("expected a graph, got a CNF formula".into())),
            },
            (None, Some(n), Some(p)) => Ok(erdos_renyi(n, p, self.graph_seed)?),
            _ => bail!(UsageError("give --input or both --n and --p".into())),
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum AnalyzeCommand {
    /// MIS ratio of GNN-only and full pipeline across ER densities.
    Phase {
        #[arg(long, value_delimiter = ',', default_value = "200")]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.0001")]
        lrs: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[command(flatten)]
        output: SweepOutput,
        #[command(flatten)]
        settings: Settings,
    },
    /// Power-law graphs against regular and ER graphs of the same density.
    Families {
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// `exponent:min_degree` pairs.
        #[arg(long, value_delimiter = ',', default_value = "2.5:2", value_parser = parse_powerlaw)]
        powerlaw: Vec<(f64, usize)>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[command(flatten)]
        output: SweepOutput,
        #[command(flatten)]
        settings: Settings,
    },
    /// Embedding spread after each layer, before and after training.
    Oversmoothing {
        #[command(flatten)]
        source: GraphSource,
        /// Flat TOML file with default settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// MIS ratio when training propagates over a sparsified copy.
    Sparsify {
        #[command(flatten)]
        source: GraphSource,
        /// Hyperedge drop probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.9")]
        drop: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[command(flatten)]
        output: SweepOutput,
        #[command(flatten)]
        settings: Settings,
    },
}

fn parse_powerlaw(s: &str) -> Result<(f64, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected exponent:min_degree")?;
    Ok((
        a.parse().map_err(|e| format!("{a}: {e}"))?,
        b.parse().map_err(|e| format!("{b}: {e}"))?,
    ))
}

fn sweep_config(settings: &Settings, output: &SweepOutput) -> Result<(SweepConfig, Settings)> {
    let s = merge(settings, output.config.as_deref())?;
    let cfg = s.pipeline();
    Ok((
        SweepConfig {
            train: cfg.train,
            sa: cfg.sa,
            variant: cfg.variant,
            gnn_only: output.gnn_only,
        },
        s,
    ))
}

fn write_records(records: &[SweepRecord], output: &SweepOutput) -> Result<()> {
    match &output.out {
        Some(path) => {
            let mut sink = RecordSink::open(Some(path))?;
            for r in records {
                sink.write(r)?;
            }
        }
        None => write_jsonl(records, std::io::stdout())?,
    }
    if let Some(path) = &output.csv {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(records, BufWriter::new(file))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceReport {
    #[serde(rename = "N")]
    n: usize,
    edges: usize,
    before: SmoothingTrace,
    after: SmoothingTrace,
    ratio_final_to_initial: f64,
    epochs_run: usize,
}

pub fn analyze(cmd: &AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Phase {
            ns,
            ps,
            lrs,
            seeds,
            output,
            settings,
        } => {
            let (cfg, _) = sweep_config(settings, output)?;
            let records = phase_transition_sweep(ns, ps, lrs, seeds, &cfg)?;
            write_records(&records, output)?;
            for &n in ns {
                let mut curve: Vec<(f64, f64)> = mean_ratios(&records, "gnn-only")
                    .into_iter()
                    .filter(|c| c.1 == n)
                    .map(|c| (c.2, c.3))
                    .collect();
                curve.sort_by(|a, b| a.0.total_cmp(&b.0));
                match drop_threshold(&curve) {
                    Some(p) => eprintln!(
                        "N={n}: GNN-only ratio halves at p={p} (ln N / N = {:.4})",
                        connectivity_threshold(n)
                    ),
                    None => eprintln!("N={n}: GNN-only ratio never halves on this grid"),
                }
            }
            Ok(())
        }
        AnalyzeCommand::Families {
            n,
            powerlaw,
            seeds,
            output,
            settings,
        } => {
            let (cfg, s) = sweep_config(settings, output)?;
            let records = family_comparison(*n, powerlaw, s.lr.unwrap(), seeds, &cfg)?;
            write_records(&records, output)
        }
        AnalyzeCommand::Sparsify {
            source,
            drop,
            seeds,
            output,
            settings,
        } => {
            let (cfg, s) = sweep_config(settings, output)?;
            let records = sparsification_study(&source.graph()?, drop, s.lr.unwrap(), seeds, &cfg)?;
            write_records(&records, output)
        }
        AnalyzeCommand::Oversmoothing {
            source,
            config,
            settings,
        } => {
            let s = merge(settings, config.as_deref())?;
            let cfg = s.pipeline();
            let g = source.graph()?;
            let problem = MaxIndependentSet::new(g.clone())?;
            let mut model =
                HyperGnnModel::new(g.n_nodes(), cfg.train.seed)?.with_variant(cfg.variant);
            let op = PropagationOperator::new(&g, cfg.variant);
            let before = oversmoothing_trace(&model, &op)?;
            let outcome = train(&mut model, &op, &problem, &cfg.train)?;
            let after = oversmoothing_trace(&model, &op)?;
            let report = TraceReport {
                n: g.n_nodes(),
                edges: g.n_edges(),
                before,
                after,
                ratio_final_to_initial: after.agg2 / after.conv1,
                epochs_run: outcome.report.epochs_run,
            };
            println!("{}", serde_json::to_string(&report)?);
            Ok(())
        }
    }
}
