//! TOML run configuration: the plant, the decision box, integration settings,
//! the disturbance and optional optimizer overrides.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metrics::SettlingBand;
use crate::model::{nominal_system, Bounds, SystemConfig};
use crate::objective::{Scenario, DEFAULT_PENALTY};
use crate::optimizers::{BfoParams, GdParams, Method, MethodParams, Profile, PsoParams};
use crate::simulator::{Disturbance, SimOptions};
use crate::{Error, Result};

fn default_penalty() -> f64 {
    DEFAULT_PENALTY
}

fn default_disturbance() -> Disturbance {
    Disturbance::step(0, 0.01)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Cost of a diverging run before the time-to-divergence term.
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    pub system: SystemConfig,
    /// Defaults to the controller box for the system's area count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    #[serde(default)]
    pub sim: SimOptions,
    /// Area indices here are zero-based.
    #[serde(default = "default_disturbance")]
    pub disturbance: Disturbance,
    #[serde(default)]
    pub band: SettlingBand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bfo: Option<BfoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gd: Option<GdParams>,
}

impl RunConfig {
    pub fn nominal() -> Self {
        let system = nominal_system();
        Self {
            penalty: DEFAULT_PENALTY,
            bounds: Some(Bounds::controller_default(system.area_count())),
            system,
            sim: SimOptions::default(),
            disturbance: default_disturbance(),
            band: SettlingBand::default(),
            bfo: None,
            pso: None,
            gd: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run configuration serializes to TOML")
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            config: self.system.clone(),
            disturbance: self.disturbance.clone(),
            options: self.sim.clone(),
            penalty: self.penalty,
        }
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
            .clone()
            .unwrap_or_else(|| Bounds::controller_default(self.system.area_count()))
    }

    /// Parameters from the config section for `method`, else the profile's.
    pub fn method_params(&self, method: Method, profile: Profile) -> MethodParams {
        let configured = match method {
            Method::Bfo => self.bfo.clone().map(MethodParams::Bfo),
            Method::Pso => self.pso.clone().map(MethodParams::Pso),
            Method::Gd => self.gd.clone().map(MethodParams::Gd),
        };
        configured.unwrap_or_else(|| MethodParams::for_profile(method, profile))
    }

    /// Copy with only `params` in the optimizer sections.
    pub fn with_params(&self, params: &MethodParams) -> Self {
        let mut out = Self {
            bounds: Some(self.bounds()),
            bfo: None,
            pso: None,
            gd: None,
            ..self.clone()
        };
        match params {
            MethodParams::Bfo(p) => out.bfo = Some(p.clone()),
            MethodParams::Pso(p) => out.pso = Some(p.clone()),
            MethodParams::Gd(p) => out.gd = Some(p.clone()),
        }
        out
    }
}
