//! Line-based `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Each command takes
//! the keys it knows and rejects the rest.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use boxnet_core::evolution::{EvolutionConfig, Variant};
use boxnet_core::TrainerConfig;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    source: String,
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                LabError::parse(source, n + 1, format!("expected key=value, got {line:?}"))
            })?;
            let key = k.trim().to_string();
            if entries
                .insert(key.clone(), (n + 1, v.trim().to_string()))
                .is_some()
            {
                return Err(LabError::parse(
                    source,
                    n + 1,
                    format!("duplicate key {key:?}"),
                ));
            }
        }
        Ok(Self {
            source: source.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn take<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| {
                LabError::parse(&self.source, line, format!("bad value for {key}: {e}"))
            }),
        }
    }

    fn take_into<T>(&mut self, key: &str, slot: &mut T) -> Result<()>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = self.take(key)? {
            *slot = v;
        }
        Ok(())
    }

    /// Fails if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(LabError::parse(
                &self.source,
                *line,
                format!("unknown key {k:?}"),
            )),
        }
    }
}

pub fn take_evolution_config(kv: &mut KeyValues) -> Result<EvolutionConfig> {
    let mut c = EvolutionConfig::default();
    kv.take_into("population_size", &mut c.population_size)?;
    kv.take_into("crossover_prob", &mut c.crossover_prob)?;
    kv.take_into("mutation_prob", &mut c.mutation_prob)?;
    kv.take_into::<Variant>("variant", &mut c.variant)?;
    kv.take_into(
        "direct_matches_per_individual",
        &mut c.direct_matches_per_individual,
    )?;
    kv.take_into("ifs_antigen_fraction", &mut c.ifs_antigen_fraction)?;
    kv.take_into("ifs_antibody_fraction", &mut c.ifs_antibody_fraction)?;
    kv.take_into("ifs_pool_points", &mut c.ifs_pool_points)?;
    kv.take_into("ifs_shares_win_win", &mut c.ifs_shares_win_win)?;
    kv.take_into("ifs_shares_win_loss", &mut c.ifs_shares_win_loss)?;
    kv.take_into("fitness_floor", &mut c.fitness_floor)?;
    kv.take_into("scaling_best_share", &mut c.scaling_best_share)?;
    kv.take_into("generations", &mut c.generations)?;
    kv.take_into("snapshot_interval", &mut c.snapshot_interval)?;
    kv.take_into("master_seed", &mut c.master_seed)?;
    Ok(c)
}

pub fn evolution_config_text(c: &EvolutionConfig) -> String {
    format!(
        "population_size={}\ncrossover_prob={}\nmutation_prob={}\nvariant={}\n\
         direct_matches_per_individual={}\nifs_antigen_fraction={}\nifs_antibody_fraction={}\n\
         ifs_pool_points={}\nifs_shares_win_win={}\nifs_shares_win_loss={}\nfitness_floor={}\n\
         scaling_best_share={}\ngenerations={}\nsnapshot_interval={}\nmaster_seed={}\n",
        c.population_size,
        c.crossover_prob,
        c.mutation_prob,
        c.variant,
        c.direct_matches_per_individual,
        c.ifs_antigen_fraction,
        c.ifs_antibody_fraction,
        c.ifs_pool_points,
        c.ifs_shares_win_win,
        c.ifs_shares_win_loss,
        c.fitness_floor,
        c.scaling_best_share,
        c.generations,
        c.snapshot_interval,
        c.master_seed,
    )
}

pub fn take_trainer_config(kv: &mut KeyValues) -> Result<TrainerConfig> {
    let mut c = TrainerConfig::default();
    kv.take_into("learning_rate", &mut c.learning_rate)?;
    kv.take_into("epochs", &mut c.epochs)?;
    kv.take_into("seed", &mut c.seed)?;
    kv.take_into("target_scale", &mut c.target_scale)?;
    kv.take_into("init_scale", &mut c.init_scale)?;
    Ok(c)
}
