//! Run settings shared by every subcommand. Each value can come from a flag,
//! from a flat TOML file, or from the built-in default, in that order.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hypop_core::distributed::DistMode;
use hypop_core::hypergraph::{OperatorVariant, PartitionScheme};
use hypop_core::mapping::{SaConfig, Temperature};
use hypop_core::model::{EarlyStop, TrainConfig};
use hypop_core::pipeline::{PipelineConfig, Solver};
use hypop_core::problems::ProblemKind;

use crate::instance::InputFormat;

/// Parses a kebab-case enum name through its serde representation.
pub fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Problem to solve.
    #[arg(long, value_parser = kebab::<ProblemKind>)]
    pub problem: Option<ProblemKind>,
    /// hypop | sa | adam | bipartite.
    #[arg(long, value_parser = kebab::<Solver>)]
    pub solver: Option<Solver>,
    /// auto | gset | cnf | hyperedges.
    #[arg(long, value_parser = kebab::<InputFormat>)]
    pub format: Option<InputFormat>,
    /// Seed for model initialization, annealing and partitioning.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Adam learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Epochs without relative improvement before stopping.
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub early_stop: Option<bool>,
    /// Embedding width; the default depends on the node count.
    #[arg(long)]
    pub width: Option<usize>,
    /// modified | standard.
    #[arg(long, value_parser = kebab::<OperatorVariant>)]
    pub variant: Option<OperatorVariant>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub cooling: Option<f64>,
    /// Fixed initial temperature. Overrides `t0-scale`.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Initial temperature as a multiple of the mean single-move change.
    #[arg(long)]
    pub t0_scale: Option<f64>,
    /// Balance weight for hypergraph-mincut.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Conflict penalty for mis.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Extra agent capacity for resource.
    #[arg(long)]
    pub surplus: Option<usize>,
    /// Training workers; 1 trains on a single thread.
    #[arg(long)]
    pub workers: Option<usize>,
    /// parallel | distributed.
    #[arg(long, value_parser = kebab::<DistMode>)]
    pub dist_mode: Option<DistMode>,
    /// block | random.
    #[arg(long, value_parser = kebab::<PartitionKind>)]
    pub partition: Option<PartitionKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Block,
    Random,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl Settings {
    /// Fills unset values from `lower`.
    pub fn or(mut self, lower: &Settings) -> Settings {
        overlay!(self, lower; problem, solver, format, seed, epochs, lr, patience, tolerance,
            early_stop, width, variant, restarts, sweeps, cooling, t0, t0_scale, gamma, beta,
            surplus, workers, dist_mode, partition);
        self
    }

    pub fn from_toml(text: &str) -> Result<Settings> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Settings::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Every value set, with built-in defaults for the rest. `width` and the
    /// problem-specific weights stay unset when they default to a value
    /// derived from the instance.
    pub fn resolved(self) -> Settings {
        let train = TrainConfig::default();
        let sa = SaConfig::default();
        let stop = EarlyStop::default();
        let scale = match sa.initial_temperature {
            Temperature::Auto(s) => s,
            Temperature::Fixed(_) => 1.0,
        };
        self.or(&Settings {
            problem: None,
            solver: Some(Solver::Hypop),
            format: Some(InputFormat::Auto),
            seed: Some(0),
            epochs: Some(train.epochs),
            lr: Some(train.learning_rate),
            patience: Some(stop.patience),
            tolerance: Some(stop.tolerance),
            early_stop: Some(true),
            width: None,
            variant: Some(OperatorVariant::default()),
            restarts: Some(sa.restarts),
            sweeps: Some(sa.sweeps),
            cooling: Some(sa.cooling),
            t0: None,
            t0_scale: Some(scale),
            gamma: None,
            beta: None,
            surplus: Some(0),
            workers: Some(1),
            dist_mode: Some(DistMode::Parallel),
            partition: Some(PartitionKind::Block),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let s = self.clone().resolved();
        let seed = s.seed();
        let train = TrainConfig {
            epochs: s.epochs.unwrap(),
            learning_rate: s.lr.unwrap(),
            early_stop: s.early_stop.unwrap().then(|| EarlyStop {
                tolerance: s.tolerance.unwrap(),
                patience: s.patience.unwrap(),
            }),
            seed,
            ..TrainConfig::default()
        };
        let sa = SaConfig {
            restarts: s.restarts.unwrap(),
            initial_temperature: match s.t0 {
                Some(t) => Temperature::Fixed(t),
                None => Temperature::Auto(s.t0_scale.unwrap()),
            },
            cooling: s.cooling.unwrap(),
            sweeps: s.sweeps.unwrap(),
            seed,
        };
        PipelineConfig {
            train,
            sa,
            variant: s.variant.unwrap(),
            width: s.width,
        }
    }

    pub fn partition_scheme(&self) -> PartitionScheme {
        match self.partition.unwrap_or(PartitionKind::Block) {
            PartitionKind::Block => PartitionScheme::Block,
            PartitionKind::Random => PartitionScheme::Random { seed: self.seed() },
        }
    }
}

/// Flag values override the config file, which overrides the defaults.
pub fn merge(flags: &Settings, file: Option<&Path>) -> Result<Settings> {
    let from_file = match file {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    Ok(flags.clone().or(&from_file).resolved())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_flags_then_file_then_defaults() {
        let file = Settings::from_toml("epochs = 10\nlr = 0.01\nsolver = \"sa\"\n").unwrap();
        let flags = Settings {
            epochs: Some(20),
            ..Settings::default()
        };
        let s = flags.or(&file).resolved();
        assert_eq!(s.epochs, Some(20));
        assert_eq!(s.lr, Some(0.01));
        assert_eq!(s.solver, Some(Solver::Sa));
        assert_eq!(s.restarts, Some(3));
        assert_eq!(s.pipeline().train.epochs, 20);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Settings::from_toml("epoch = 10\n").is_err());
    }

    #[test]
    fn resolved_settings_round_trip_through_toml() {
        let s = Settings {
            problem: Some(ProblemKind::Mis),
            t0: Some(2.0),
            ..Settings::default()
        }
        .resolved();
        let text = toml::to_string(&s).unwrap();
        assert_eq!(Settings::from_toml(&text).unwrap(), s);
        assert_eq!(s.pipeline().sa.initial_temperature, Temperature::Fixed(2.0));
    }
}
