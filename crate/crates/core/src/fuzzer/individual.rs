//! Fault instances as GA individuals: one chromosome per injected model, one
//! gene per parameter plus the noise seed.

use crate::error::{FadeError, Result};
use crate::faults::{find_model, sample_instance, CoFault, CoFaultModel, FaultInstance, FaultModel, Injection};
use crate::rng;
use serde::{Deserialize, Serialize};

/// What one fuzzing run evolves: a single fault model or a co-fault pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FaultTarget {
    Single { model: String },
    Co { camera: String, lidar: String },
}

impl FaultTarget {
    pub fn single(id: &str) -> Result<Self> {
        find_model(id)?;
        Ok(Self::Single { model: id.to_owned() })
    }

    pub fn co(m: &CoFaultModel) -> Self {
        Self::Co { camera: m.camera.clone(), lidar: m.lidar.clone() }
    }

    /// `camera.x+lidar.y` for co-faults.
    pub fn parse(label: &str) -> Result<Self> {
        match label.split_once('+') {
            None => Self::single(label),
            Some((c, l)) => {
                let t = Self::Co { camera: c.to_owned(), lidar: l.to_owned() };
                let models = t.models()?;
                CoFault::new(models[0].neutral_instance(), models[1].neutral_instance())?;
                Ok(t)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Single { model } => model.clone(),
            Self::Co { camera, lidar } => format!("{camera}+{lidar}"),
        }
    }

    pub fn models(&self) -> Result<Vec<&'static FaultModel>> {
        match self {
            Self::Single { model } => Ok(vec![find_model(model)?]),
            Self::Co { camera, lidar } => Ok(vec![find_model(camera)?, find_model(lidar)?]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    /// Creation order within one fuzzing run; the final tie-breaker.
    pub id: u64,
    pub chromosomes: Vec<FaultInstance>,
}

/// Bit-level identity of a genome, used to skip repeated evaluations.
pub type GenomeKey = Vec<(u64, Vec<u64>)>;

impl Individual {
    pub fn injection(&self) -> Result<Injection> {
        match self.chromosomes.as_slice() {
            [one] => Ok(Injection::Single(one.clone())),
            [cam, lid] => Ok(Injection::Co(CoFault::new(cam.clone(), lid.clone())?)),
            other => Err(FadeError::InvalidInstance {
                model: other.iter().map(|c| c.model_id.as_str()).collect::<Vec<_>>().join("+"),
                reason: format!("{} chromosomes", other.len()),
            }),
        }
    }

    pub fn genome_key(&self) -> GenomeKey {
        self.chromosomes.iter().map(|c| (c.noise_seed, c.values.iter().map(|v| v.to_bits()).collect())).collect()
    }

    pub fn same_target(&self, other: &Individual) -> Result<()> {
        let ids = |i: &Individual| i.chromosomes.iter().map(|c| c.model_id.clone()).collect::<Vec<_>>().join("+");
        let (a, b) = (ids(self), ids(other));
        if a == b {
            Ok(())
        } else {
            Err(FadeError::ModelMismatch(a, b))
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.chromosomes {
            find_model(&c.model_id)?.validate(c)?;
        }
        Ok(())
    }
}

/// One uniformly sampled individual; `seed` fixes every gene.
pub fn sample_individual(target: &FaultTarget, id: u64, seed: u64) -> Result<Individual> {
    let chromosomes = target
        .models()?
        .into_iter()
        .enumerate()
        .map(|(c, m)| sample_instance(m, rng::derive(seed, "chromosome", c as u64)))
        .collect();
    Ok(Individual { id, chromosomes })
}

/// `size` individuals with ids `0..size`.
pub fn initialize_population(target: &FaultTarget, size: usize, seed: u64) -> Result<Vec<Individual>> {
    (0..size).map(|i| sample_individual(target, i as u64, rng::derive(seed, "init", i as u64))).collect()
}

/// The all-neutral individual (identity fault).
pub fn neutral_individual(target: &FaultTarget, id: u64) -> Result<Individual> {
    Ok(Individual { id, chromosomes: target.models()?.into_iter().map(FaultModel::neutral_instance).collect() })
}
