//! Run configuration: a JSON file merged with command-line overrides.

use std::io::Read;
use std::path::Path;

use contactloc_core::localization::auxiliary_beta;
use contactloc_core::mc::McConfig;
use contactloc_core::sphere::RationalText;
use contactloc_core::{EquivariantClass, Error, Result, WeightedSphere};
use serde::Deserialize;

/// Sphere as written in a config file; `beta` may be omitted for `volume`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereInput {
    pub n: Option<usize>,
    pub w: Vec<RationalText>,
    pub beta: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McInput {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub workers: Option<usize>,
    pub histogram_bins: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sphere: Option<SphereInput>,
    pub eta: Option<String>,
    pub epsilons: Option<Vec<f64>>,
    pub cone: Option<String>,
    #[serde(default)]
    pub mc: McInput,
}

impl RunConfig {
    /// Reads JSON from `path`, or from stdin when `path` is `-`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Config(format!("reading stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?
        };
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn set_weights(&mut self, weights: &[String]) {
        let sphere = self.sphere.get_or_insert_with(SphereInput::default);
        sphere.w = weights.iter().map(|w| RationalText::Text(w.clone())).collect();
        sphere.n = None;
    }

    pub fn set_beta(&mut self, beta: &[i64]) {
        self.sphere.get_or_insert_with(SphereInput::default).beta = Some(beta.to_vec());
    }

    fn weights(&self) -> Result<Vec<contactloc_core::Rational>> {
        let input = self
            .sphere
            .as_ref()
            .filter(|s| !s.w.is_empty())
            .ok_or_else(|| Error::Config("no sphere given; use --config or --weights".into()))?;
        if let Some(n) = input.n {
            if input.w.len() != n + 1 {
                return Err(Error::InvalidSphere(format!(
                    "n = {n} needs {} Reeb weights, got {}",
                    n + 1,
                    input.w.len()
                )));
            }
        }
        input.w.iter().map(RationalText::to_rational).collect()
    }

    /// The sphere, requiring action weights.
    pub fn sphere(&self) -> Result<WeightedSphere> {
        let w = self.weights()?;
        let beta = self
            .sphere
            .as_ref()
            .and_then(|s| s.beta.clone())
            .ok_or_else(|| Error::Config("no action weights given; use --beta or `beta` in the config".into()))?;
        WeightedSphere::new(w, beta)
    }

    /// The sphere for volume computations, where the action does not matter.
    pub fn sphere_for_volume(&self) -> Result<WeightedSphere> {
        let w = self.weights()?;
        match self.sphere.as_ref().and_then(|s| s.beta.clone()) {
            Some(beta) => WeightedSphere::new(w, beta),
            None => {
                let beta = auxiliary_beta(&w, |j| j as i64 + 1);
                WeightedSphere::new(w, beta)
            }
        }
    }

    pub fn eta(&self) -> Result<EquivariantClass> {
        EquivariantClass::parse(self.eta.as_deref().unwrap_or("1"))
    }

    pub fn mc(&self) -> Result<McConfig> {
        let d = McConfig::default();
        let cfg = McConfig {
            seed: self.mc.seed.unwrap_or(d.seed),
            samples: self.mc.samples.unwrap_or(d.samples),
            workers: self.mc.workers.unwrap_or(d.workers),
            histogram_bins: self.mc.histogram_bins.unwrap_or(d.histogram_bins),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
