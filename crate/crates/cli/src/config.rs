use std::path::{Path, PathBuf};

use oddwave::holder::SweepConfig;
use oddwave::{ContinuationSettings, Error, EvolutionConfig, Fault, ModelParams, Scheme};
use serde::{Deserialize, Serialize};

/// Initial data for `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    /// The branch point at `amplitude`.
    Branch,
    Zero,
}

/// Every knob of a run. Loaded from a TOML file, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub epsilon: f64,
    pub alpha0: f64,
    pub beta: f64,
    pub fold: usize,
    pub modes: usize,
    pub k_max: usize,
    pub s_max: f64,
    pub ds: f64,
    pub ds_max: f64,
    pub growth: f64,
    pub ds_min: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Grid for plot-ready profiles; unset picks the smallest power of two
    /// (at least 256) that resolves the truncation.
    pub profile_grid: Option<usize>,
    pub profile_s: Vec<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub save_every: usize,
    pub amplitude: f64,
    pub initial: Initial,
    pub order_levels: usize,
    pub samples: usize,
    pub degree: usize,
    pub ensemble: usize,
    pub tiers: Vec<usize>,
    pub alpha: f64,
    pub holder_grid: usize,
    pub inject_fault: Fault,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cont = ContinuationSettings::default();
        let evo = EvolutionConfig::default();
        let sweep = SweepConfig::default();
        Self {
            command: String::new(),
            epsilon: 0.5,
            alpha0: 1.0,
            beta: 0.5,
            fold: 1,
            modes: cont.n,
            k_max: 10,
            s_max: cont.s_max,
            ds: cont.ds,
            ds_max: cont.ds_max,
            growth: cont.growth,
            ds_min: cont.ds_min,
            tol: cont.tol,
            max_iter: cont.max_iter,
            profile_grid: None,
            profile_s: Vec::new(),
            dt: evo.dt,
            t_final: evo.t_final,
            save_every: evo.save_every,
            amplitude: 0.02,
            initial: Initial::Branch,
            order_levels: 0,
            samples: 50,
            degree: 20,
            ensemble: sweep.members,
            tiers: sweep.degree_tiers,
            alpha: sweep.alpha,
            holder_grid: sweep.grid,
            inject_fault: Fault::None,
            out: PathBuf::from("out"),
            seed: sweep.seed,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    pub fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.epsilon, self.alpha0, self.beta)
    }

    pub fn continuation(&self) -> Result<ContinuationSettings, Error> {
        let s = ContinuationSettings {
            s_max: self.s_max,
            ds: self.ds,
            ds_max: self.ds_max,
            growth: self.growth,
            ds_min: self.ds_min,
            n: self.modes,
            tol: self.tol,
            max_iter: self.max_iter,
        };
        s.validate()?;
        Ok(s)
    }

    /// Evolution runs on the full `fold · modes` truncation.
    pub fn evolution(&self) -> Result<EvolutionConfig, Error> {
        let e = EvolutionConfig {
            dt: self.dt,
            t_final: self.t_final,
            n: self.fold * self.modes,
            save_every: self.save_every,
            scheme: Scheme::Rk4,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn sweep(&self) -> Result<SweepConfig, Error> {
        let s = SweepConfig {
            members: self.ensemble,
            degree_tiers: self.tiers.clone(),
            alpha: self.alpha,
            seed: self.seed,
            grid: self.holder_grid,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn profile_grid(&self) -> usize {
        self.profile_grid
            .unwrap_or_else(|| (2 * self.fold * self.modes + 2).next_power_of_two().max(256))
    }

    /// Checks every constraint that applies to `command`.
    pub fn validate(&self) -> Result<(), Error> {
        self.params()?;
        if self.fold == 0 {
            return Err(bad("fold must be at least 1"));
        }
        match self.command.as_str() {
            "bifurcate" => {
                if self.k_max == 0 {
                    return Err(bad("k_max must be at least 1: the table would be empty"));
                }
                if self.modes < 4 {
                    return Err(bad("modes must be at least 4"));
                }
            }
            "branch" | "evolve" if self.profile_grid() < 2 * self.fold * self.modes + 2 => {
                return Err(bad(format!(
                    "profile_grid {} cannot resolve {} modes",
                    self.profile_grid(),
                    self.fold * self.modes
                )));
            }
            "branch" => {
                self.continuation()?;
            }
            "evolve" => {
                self.evolution()?;
                if self.initial == Initial::Branch {
                    self.continuation()?;
                    if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
                        return Err(bad(format!("amplitude must be positive, got {}", self.amplitude)));
                    }
                }
                if self.order_levels == 1 || self.order_levels == 2 {
                    return Err(bad("order_levels must be 0 (off) or at least 3"));
                }
            }
            "verify" => {
                self.sweep()?;
                if self.samples == 0 {
                    return Err(bad("samples must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
