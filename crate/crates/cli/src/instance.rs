//! Instance loading and problem construction.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hypop_core::hypergraph::io::{parse_dimacs_cnf, parse_gset, parse_hyperedge_list, CnfFormula};
use hypop_core::hypergraph::Hypergraph;
use hypop_core::problems::{
    GraphMaxCut, HypergraphMaxCut, HypergraphMinCut, MaxIndependentSet, Problem, ProblemKind,
    ResourceAllocation, Sat3,
};

use crate::settings::Settings;
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    /// `.cnf` is DIMACS, `.gset` or a bare `G<number>` name is Gset, anything
    /// else a hyperedge list.
    Auto,
    Gset,
    Cnf,
    Hyperedges,
}

impl InputFormat {
    pub fn detect(path: &Path) -> InputFormat {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let gset_name = stem.len() > 1
            && stem.starts_with('G')
            && stem[1..].bytes().all(|b| b.is_ascii_digit());
        match ext {
            "cnf" => InputFormat::Cnf,
            "gset" => InputFormat::Gset,
            "" if gset_name => InputFormat::Gset,
            _ => InputFormat::Hyperedges,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Hypergraph(Hypergraph),
    Cnf(CnfFormula),
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads and parses `path`, returning the instance and the SHA-256 of the
/// file contents.
pub fn load(path: &Path, format: InputFormat) -> Result<(Instance, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let format = match format {
        InputFormat::Auto => InputFormat::detect(path),
        f => f,
    };
    let instance = match format {
        InputFormat::Cnf => Instance::Cnf(parse_dimacs_cnf(&bytes[..], path)?),
        InputFormat::Gset => Instance::Hypergraph(parse_gset(&bytes[..], path)?),
        InputFormat::Hyperedges | InputFormat::Auto => {
            Instance::Hypergraph(parse_hyperedge_list(&bytes[..], path)?)
        }
    };
    Ok((instance, digest(&bytes)))
}

pub fn build_problem(
    kind: ProblemKind,
    instance: Instance,
    s: &Settings,
) -> Result<Box<dyn Problem>> {
    let h = match instance {
        Instance::Cnf(cnf) => {
            if kind != ProblemKind::Sat3 {
                bail!(UsageError(format!(
                    "{kind} needs a graph or hypergraph input, got a CNF formula"
                )));
            }
            return Ok(Box::new(Sat3::new(cnf)?));
        }
        Instance::Hypergraph(h) => h,
    };
    Ok(match kind {
        ProblemKind::HypergraphMaxcut => Box::new(HypergraphMaxCut::new(h)),
        ProblemKind::HypergraphMincut => match s.gamma {
            Some(g) => Box::new(HypergraphMinCut::with_gamma(h, g)?),
            None => Box::new(HypergraphMinCut::new(h)),
        },
        ProblemKind::GraphMaxcut => Box::new(GraphMaxCut::new(h)?),
        ProblemKind::Mis => match s.beta {
            Some(b) => Box::new(MaxIndependentSet::with_beta(h, b)?),
            None => Box::new(MaxIndependentSet::new(h)?),
        },
        ProblemKind::Resource => Box::new(ResourceAllocation::new(&h, s.surplus.unwrap_or(0))?),
        ProblemKind::Sat3 => bail!(UsageError("sat3 needs a DIMACS CNF input".into())),
    })
}

/// Loads `path` and builds the problem named in `s`.
pub fn open(path: &Path, s: &Settings) -> Result<(Box<dyn Problem>, String)> {
    let Some(kind) = s.problem else {
        bail!(UsageError("--problem is required".into()));
    };
    let (instance, digest) = load(path, s.format.unwrap_or(InputFormat::Auto))?;
    Ok((build_problem(kind, instance, s)?, digest))
}
