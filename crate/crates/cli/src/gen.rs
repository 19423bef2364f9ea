use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};

use hypop_core::hypergraph::generate::{
    erdos_renyi, gnm, powerlaw, random_hypergraph, random_ksat, random_regular,
    random_satisfiable_ksat,
};
use hypop_core::hypergraph::io::{write_dimacs_cnf, write_gset, write_hyperedge_list};
use hypop_core::hypergraph::Hypergraph;

#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Hyperedges,
    Gset,
}

#[derive(Subcommand, Debug, Clone)]
pub enum GenCommand {
    /// Random hypergraph with a cap on node degrees.
    Hypergraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[command(flatten)]
        target: Target,
    },
    /// Random d-regular simple graph.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, value_enum, default_value_t = GraphFormat::Hyperedges)]
        format: GraphFormat,
        #[command(flatten)]
        target: Target,
    },
    /// Erdős–Rényi G(n, p).
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = GraphFormat::Hyperedges)]
        format: GraphFormat,
        #[command(flatten)]
        target: Target,
    },
    /// Uniform random graph with exactly m edges.
    Gnm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = GraphFormat::Hyperedges)]
        format: GraphFormat,
        #[command(flatten)]
        target: Target,
    },
    /// Configuration-model graph with power-law degrees.
    Powerlaw {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.5)]
        exponent: f64,
        #[arg(long, default_value_t = 2)]
        min_degree: usize,
        #[arg(long, value_enum, default_value_t = GraphFormat::Hyperedges)]
        format: GraphFormat,
        #[command(flatten)]
        target: Target,
    },
    /// Uniform random k-SAT formula in DIMACS form.
    Ksat {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Redraw until the formula has a model.
        #[arg(long)]
        satisfiable: bool,
        #[command(flatten)]
        target: Target,
    },
}

fn sink(target: &Target) -> Result<Box<dyn Write>> {
    Ok(match &target.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout()),
    })
}

fn write_graph(h: &Hypergraph, format: GraphFormat, target: &Target) -> Result<()> {
    let mut out = sink(target)?;
    match format {
        GraphFormat::Hyperedges => write_hyperedge_list(h, &mut out)?,
        GraphFormat::Gset => write_gset(h, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn gen(cmd: &GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Hypergraph {
            n,
            k,
            max_degree,
            min_size,
            max_size,
            target,
        } => {
            let h = random_hypergraph(*n, *k, *max_degree, *min_size..=*max_size, target.seed)?;
            write_graph(&h, GraphFormat::Hyperedges, target)
        }
        GenCommand::Regular {
            n,
            d,
            format,
            target,
        } => write_graph(&random_regular(*n, *d, target.seed)?, *format, target),
        GenCommand::Er {
            n,
            p,
            format,
            target,
        } => write_graph(&erdos_renyi(*n, *p, target.seed)?, *format, target),
        GenCommand::Gnm {
            n,
            m,
            format,
            target,
        } => write_graph(&gnm(*n, *m, target.seed)?, *format, target),
        GenCommand::Powerlaw {
            n,
            exponent,
            min_degree,
            format,
            target,
        } => write_graph(
            &powerlaw(*n, *exponent, *min_degree, target.seed)?,
            *format,
            target,
        ),
        GenCommand::Ksat {
            vars,
            clauses,
            k,
            satisfiable,
            target,
        } => {
            let cnf = if *satisfiable {
                random_satisfiable_ksat(*vars, *clauses, *k, target.seed)?
            } else {
                random_ksat(*vars, *clauses, *k, target.seed)?
            };
            let mut out = sink(target)?;
            write_dimacs_cnf(&cnf, &mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}
