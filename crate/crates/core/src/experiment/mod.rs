//! Experiment configuration, scenario defaults, runner and parameter sweeps.
//!
//! A run is described by a single TOML document; CLI flags override document
//! fields through [`ExperimentConfig::apply_override`]. Scenario ids encode
//! the setups of the figure experiments; `custom` starts from the `fig3`
//! setup with every field overridable.

mod runner;
mod sweep;

pub use runner::{run_experiment, DepthRow, PipelineSeries, PipelineSummary, RunSummary};
pub use sweep::{sweep, SweepResult};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::compressor::CompressConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{hopping_terms, interaction_terms, HamiltonianTerms};
use crate::lattice::{
    build_diamond_chain, build_embedded_chain, build_single_plaquette, LatticeSpec,
};

/// Experiment scenario ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig3,
    Fig4Plaquette,
    Fig4Trapping,
    Fig5,
    Fig6,
    Fig7a,
    Fig7b,
    Custom,
}

impl Scenario {
    pub fn all() -> &'static [Scenario] {
        &[
            Scenario::Fig3,
            Scenario::Fig4Plaquette,
            Scenario::Fig4Trapping,
            Scenario::Fig5,
            Scenario::Fig6,
            Scenario::Fig7a,
            Scenario::Fig7b,
            Scenario::Custom,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig3 => "fig3",
            Scenario::Fig4Plaquette => "fig4_plaquette",
            Scenario::Fig4Trapping => "fig4_trapping",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Fig7a => "fig7a",
            Scenario::Fig7b => "fig7b",
            Scenario::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Scenario> {
        Scenario::all()
            .iter()
            .find(|s| s.name() == name)
            .copied()
            .ok_or_else(|| Error::config("scenario", format!("unknown scenario `{name}`")))
    }

    pub fn description(&self) -> &'static str {
        match self {
            Scenario::Fig3 => {
                "13-site flat-band walk from the central site: densities, fidelity and depth/CR"
            }
            Scenario::Fig4Plaquette => {
                "single-plaquette walk from site 0 (ABF by default; set lattice.reversed_link=false for FB)"
            }
            Scenario::Fig4Trapping => "two-cell ABF walk from the center: overlap revivals and FFT",
            Scenario::Fig5 => {
                "plaquette embedded in a chain, walker from site 0 (ABF switch by default)"
            }
            Scenario::Fig6 => "two particles through the ABF-embedded chain: transmission",
            Scenario::Fig7a => "transmission sweep over the plaquette hopping |J'| = 1..10",
            Scenario::Fig7b => {
                "transmission vs interaction V at |J'| in {1,5,10}, plus the long-time inset"
            }
            Scenario::Custom => "fully user-configured run (fig3 defaults as the base)",
        }
    }
}

/// Which lattice builder a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Diamond,
    Plaquette,
    Embedded,
    /// Load a serialized [`LatticeSpec`] text document from `lattice.file`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub kind: LatticeKind,
    pub n_cells: usize,
    pub phi: f64,
    pub reversed_link: bool,
    pub n_left: usize,
    pub n_right: usize,
    pub plaquette_amp: f64,
    pub file: Option<PathBuf>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            kind: LatticeKind::Diamond,
            n_cells: 4,
            phi: 0.0,
            reversed_link: false,
            n_left: 3,
            n_right: 4,
            plaquette_amp: 1.0,
            file: None,
        }
    }
}

impl LatticeConfig {
    pub fn build(&self) -> Result<LatticeSpec> {
        match self.kind {
            LatticeKind::Diamond => build_diamond_chain(self.n_cells, self.phi),
            LatticeKind::Plaquette => Ok(build_single_plaquette(self.reversed_link)),
            LatticeKind::Embedded => build_embedded_chain(
                self.n_left,
                self.n_right,
                self.plaquette_amp,
                self.reversed_link,
            ),
            LatticeKind::File => {
                let path = self.file.as_ref().ok_or_else(|| {
                    Error::config("lattice.file", "required when lattice.kind = \"file\"")
                })?;
                LatticeSpec::from_text(&std::fs::read_to_string(path)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Nearest-neighbour interaction strength V (units of J).
    pub interaction: f64,
    /// Initially occupied sites.
    pub occupied: Vec<usize>,
    /// Sites whose density sum defines the transmission tau(t).
    pub transmission_sites: Option<Vec<usize>>,
    /// Averaging window `(t_i, t_f]` for tau_avg.
    pub window: Option<(f64, f64)>,
    /// Track the overlap O(t) and its FFT spectrum.
    pub track_overlap: bool,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            interaction: 0.0,
            occupied: vec![6],
            transmission_sites: None,
            window: None,
            track_overlap: false,
        }
    }
}

/// Simulation pipelines a run can execute side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Exact diagonalization in the particle-number sector.
    Exact,
    /// Noiseless statevector run of the raw Trotter circuit (the UQC).
    Trotter,
    /// Noiseless statevector run of the compressed circuit.
    Oqc,
    /// Stochastic-Pauli-noise trajectories of the raw Trotter circuit.
    NoisyUqc,
    /// Stochastic-Pauli-noise trajectories of the compressed circuit.
    NoisyOqc,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Exact => "exact",
            Pipeline::Trotter => "trotter",
            Pipeline::Oqc => "oqc",
            Pipeline::NoisyUqc => "noisy_uqc",
            Pipeline::NoisyOqc => "noisy_oqc",
        }
    }

    pub fn is_noisy(&self) -> bool {
        matches!(self, Pipeline::NoisyUqc | Pipeline::NoisyOqc)
    }

    pub fn needs_compression(&self) -> bool {
        matches!(self, Pipeline::Oqc | Pipeline::NoisyOqc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_max: f64,
    pub dt: f64,
    pub pipelines: Vec<Pipeline>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_max: 6.0,
            dt: 0.1,
            pipelines: vec![Pipeline::Exact, Pipeline::Trotter],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Measurement shots per output time; `None` disables sampling.
    pub shots: Option<u64>,
    /// Base seed; mandatory whenever sampling or noise is enabled.
    pub seed: Option<u64>,
    /// Noise trajectories per output time.
    pub trajectories: usize,
    /// Apply particle-number post-selection to sampled records.
    pub post_select: bool,
    /// Error probability per two-qubit gate in noisy pipelines.
    pub p2: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            shots: None,
            seed: Some(1),
            trajectories: 200,
            post_select: true,
            p2: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub lattice: LatticeConfig,
    pub physics: PhysicsConfig,
    pub evolution: EvolutionConfig,
    pub sampling: SamplingConfig,
    pub compression: CompressConfig,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_scenario(Scenario::Custom)
    }
}

impl ExperimentConfig {
    /// The pinned defaults of each scenario.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            lattice: LatticeConfig::default(),
            physics: PhysicsConfig::default(),
            evolution: EvolutionConfig::default(),
            sampling: SamplingConfig::default(),
            compression: CompressConfig::default(),
            output_dir: PathBuf::from(format!("runs/{}", scenario.name())),
        };
        match scenario {
            Scenario::Fig3 | Scenario::Custom => {
                cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::Oqc];
                cfg.sampling.shots = Some(4096);
            }
            Scenario::Fig4Plaquette => {
                cfg.lattice.kind = LatticeKind::Plaquette;
                cfg.lattice.reversed_link = true;
                cfg.physics.occupied = vec![0];
                cfg.physics.track_overlap = true;
                cfg.evolution.t_max = 17.5;
                cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::Oqc];
                cfg.sampling.shots = Some(4096);
            }
            Scenario::Fig4Trapping => {
                cfg.lattice.n_cells = 2;
                cfg.lattice.phi = std::f64::consts::PI;
                cfg.physics.occupied = vec![3];
                cfg.physics.track_overlap = true;
                cfg.evolution.t_max = 17.5;
                cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::Oqc];
                cfg.sampling.shots = Some(4096);
            }
            Scenario::Fig5 => {
                cfg.lattice.kind = LatticeKind::Embedded;
                cfg.lattice.reversed_link = true;
                cfg.physics.occupied = vec![0];
                cfg.evolution.t_max = 8.0;
                cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::Oqc];
                cfg.sampling.shots = Some(4096);
            }
            Scenario::Fig6 => {
                cfg.lattice.kind = LatticeKind::Embedded;
                cfg.lattice.n_right = 5;
                cfg.lattice.reversed_link = true;
                cfg.physics.occupied = vec![0, 1];
                cfg.physics.transmission_sites = Some(vec![6, 7, 8, 9]);
                cfg.physics.window = Some((5.1, 6.0));
                cfg.evolution.pipelines = vec![Pipeline::Exact, Pipeline::Trotter, Pipeline::Oqc];
                cfg.sampling.shots = Some(4096);
            }
            Scenario::Fig7a | Scenario::Fig7b => {
                cfg.lattice.kind = LatticeKind::Embedded;
                cfg.lattice.n_right = 5;
                cfg.lattice.reversed_link = true;
                cfg.physics.occupied = vec![0, 1];
                cfg.physics.transmission_sites = Some(vec![6, 7, 8, 9]);
                cfg.physics.window = Some((5.1, 6.0));
                // Sweep figures default to the exact pipeline; long-time
                // compressed pipelines are offered but not default.
                cfg.evolution.pipelines = vec![Pipeline::Exact];
                if scenario == Scenario::Fig7b {
                    cfg.lattice.plaquette_amp = 1.0;
                }
            }
        }
        cfg
    }

    /// Parses a TOML document, starting from the defaults of its `scenario`
    /// field (`custom` when absent) and overlaying every present field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: toml::Table = text
            .parse()
            .map_err(|e| Error::Parse(format!("config parse error: {e}")))?;
        let scenario = match doc.get("scenario") {
            Some(toml::Value::String(s)) => Scenario::parse(s)?,
            Some(_) => return Err(Error::config("scenario", "must be a string")),
            None => Scenario::Custom,
        };
        let defaults = Self::for_scenario(scenario);
        let mut base = toml::Table::try_from(&defaults)
            .map_err(|e| Error::Parse(format!("config serialization error: {e}")))?;
        deep_merge(&mut base, doc);
        base.try_into()
            .map_err(|e| Error::Parse(format!("config error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Applies one `dotted.path=value` override on top of this config.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed: toml::Table = format!("{key} = {value}")
            .parse()
            .or_else(|_| format!("{key} = {value:?}").parse::<toml::Table>())
            .map_err(|e| Error::config(key, format!("cannot parse override: {e}")))?;
        let mut base = toml::Table::try_from(&*self)
            .map_err(|e| Error::Parse(format!("config serialization error: {e}")))?;
        deep_merge(&mut base, parsed);
        *self = base
            .try_into()
            .map_err(|e| Error::config(key, format!("invalid override: {e}")))?;
        Ok(())
    }

    /// Sets a numeric field by dotted path (for sweeps). Integral values are
    /// written as integers so counters like `sampling.shots` accept them.
    pub fn set_numeric(&mut self, axis: &str, value: f64) -> Result<()> {
        let rendered = if value.fract() == 0.0 && value.abs() < 9e15 {
            format!("{}", value as i64)
        } else {
            format!("{value}")
        };
        self.apply_override(axis, &rendered)
    }

    /// Builds the lattice and merged Hamiltonian for this config.
    pub fn hamiltonian(&self) -> Result<(LatticeSpec, HamiltonianTerms)> {
        let spec = self.lattice.build()?;
        let terms = hopping_terms(&spec)?
            .merge(interaction_terms(&spec, self.physics.interaction)?)?;
        Ok((spec, terms))
    }

    /// Validates the configuration; diagnostics name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.evolution.dt <= 0.0 {
            return Err(Error::config(
                "evolution.dt",
                format!("must be positive, got {}", self.evolution.dt),
            ));
        }
        if self.evolution.t_max < 0.0 {
            return Err(Error::config(
                "evolution.t_max",
                format!("must be >= 0, got {}", self.evolution.t_max),
            ));
        }
        let steps = self.evolution.t_max / self.evolution.dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::config(
                "evolution.t_max",
                format!(
                    "t_max/dt = {steps} must be integral so the output grid matches the Trotter grid"
                ),
            ));
        }
        if self.evolution.pipelines.is_empty() {
            return Err(Error::config("evolution.pipelines", "at least one pipeline required"));
        }
        let spec = self.lattice.build().map_err(|e| Error::Config {
            field: "lattice".into(),
            message: e.to_string(),
        })?;
        if self.physics.occupied.is_empty() {
            return Err(Error::config("physics.occupied", "at least one occupied site required"));
        }
        for &s in &self.physics.occupied {
            if s >= spec.n_sites() {
                return Err(Error::config(
                    "physics.occupied",
                    format!("site {s} out of range for {} sites", spec.n_sites()),
                ));
            }
        }
        if let Some(sites) = &self.physics.transmission_sites {
            for &s in sites {
                if s >= spec.n_sites() {
                    return Err(Error::config(
                        "physics.transmission_sites",
                        format!("site {s} out of range for {} sites", spec.n_sites()),
                    ));
                }
            }
        }
        if let Some((ti, tf)) = self.physics.window {
            if ti >= tf {
                return Err(Error::config(
                    "physics.window",
                    format!("window ({ti}, {tf}] is empty"),
                ));
            }
        }
        let sampling_on = self.sampling.shots.is_some();
        let noise_on = self.evolution.pipelines.iter().any(Pipeline::is_noisy);
        if (sampling_on || noise_on) && self.sampling.seed.is_none() {
            return Err(Error::config(
                "sampling.seed",
                "mandatory whenever sampling or noise is enabled",
            ));
        }
        if self.sampling.shots == Some(0) {
            return Err(Error::config("sampling.shots", "must be positive"));
        }
        if noise_on && self.sampling.trajectories == 0 {
            return Err(Error::config("sampling.trajectories", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.sampling.p2) {
            return Err(Error::config(
                "sampling.p2",
                format!("must be in [0, 1], got {}", self.sampling.p2),
            ));
        }
        if !(0.0 < self.compression.fidelity_target && self.compression.fidelity_target <= 1.0) {
            return Err(Error::config(
                "compression.fidelity_target",
                format!("must be in (0, 1], got {}", self.compression.fidelity_target),
            ));
        }
        if self.compression.max_layers == 0
            && self.evolution.pipelines.iter().any(Pipeline::needs_compression)
        {
            return Err(Error::config("compression.max_layers", "must be positive"));
        }
        Ok(())
    }

    /// Output time grid `0, dt, ..., t_max`.
    pub(crate) fn time_grid(&self) -> Vec<f64> {
        let n_steps = (self.evolution.t_max / self.evolution.dt).round() as usize;
        (0..=n_steps).map(|k| k as f64 * self.evolution.dt).collect()
    }
}

fn deep_merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => deep_merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
