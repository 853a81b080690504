//! Scenario files: declarative run descriptions parsed from TOML.
//!
//! A scenario bundles everything one run needs — mesh, physics, excitation,
//! solver settings, probe layout, output directory, seed — plus optional
//! `[sweep]` and `[dispersion]` sections for the multi-run subcommands.
//! Parsing is strict (unknown fields are rejected with the offending key
//! and line) and [`Scenario::validate`] cross-checks everything that the
//! type system cannot, so that a scenario which survives both will not
//! fail later for configuration reasons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{BoundaryKind, Mesh};
use crate::integrate::{DampingSpec, Scheme, SolverConfig};
use crate::signal::ExcitationKind;

/// Elements-per-wavelength floor for sweep carriers: below this the
/// grid's numerical dispersion contaminates measured attenuation.
pub const MIN_ELEMENTS_PER_WAVELENGTH: f64 = 10.0;

/// Which solver(s) a simulate run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Direct,
    Modal,
    /// Run both and report their relative difference.
    Both,
}

impl SolverChoice {
    /// Stable lowercase label used in file names and manifests.
    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            SolverChoice::Direct => "direct",
            SolverChoice::Modal => "modal",
            SolverChoice::Both => "both",
        }
    }
}

/// `[mesh]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub length: f64,
    pub n_elements: usize,
    pub boundary: BoundaryConfig,
}

/// Boundary conditions at the two ends.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
}

/// `[physics]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Lossless wave speed.
    pub c: f64,
    pub damping: DampingSpec,
}

/// `[excitation]` section: a signal shape plus the node it drives.
///
/// No `deny_unknown_fields` here because the signal variant is flattened;
/// stray keys are still rejected, by the variant deserializer instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcitationConfig {
    pub source_node: usize,
    #[serde(flatten)]
    pub signal: ExcitationKind,
}

/// `[solver]` section. Duration is given as `t_end`; the step count is
/// derived (`ceil(t_end/dt)`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub solver_choice: SolverChoice,
    #[serde(default)]
    pub record_energy: bool,
    /// Stride for full state snapshots; 0 disables them.
    #[serde(default)]
    pub full_state_stride: usize,
}

/// `[sweep]` section: carrier list and fit settings for attenuation
/// sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Tone-burst carrier frequencies, one simulation each.
    pub carriers: Vec<f64>,
    #[serde(default = "default_fit_form")]
    pub fit_form: crate::analysis::FitForm,
    #[serde(default = "default_envelope")]
    pub envelope: crate::analysis::EnvelopeMethod,
}

fn default_fit_form() -> crate::analysis::FitForm {
    crate::analysis::FitForm::Pure
}

fn default_envelope() -> crate::analysis::EnvelopeMethod {
    crate::analysis::EnvelopeMethod::Analytic
}

/// `[dispersion]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    /// Measure damped frequencies by free decay for this many lowest
    /// modes (0 = table only).
    #[serde(default)]
    pub free_decay_modes: usize,
}

/// A complete run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mesh: MeshConfig,
    pub physics: PhysicsConfig,
    pub excitation: ExcitationConfig,
    pub solver: SolverSection,
    /// Nodes whose displacement/velocity are recorded.
    pub probes: Vec<usize>,
    /// Output directory for CSVs and the manifest.
    pub outputs: String,
    #[serde(default)]
    pub seed: u64,
    pub sweep: Option<SweepConfig>,
    pub dispersion: Option<DispersionConfig>,
}

impl Scenario {
    /// Parse a scenario from TOML text. Syntax and unknown-field errors
    /// carry the offending line/key verbatim from the parser.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("scenario parse error: {e}")))
    }

    /// Read and parse a scenario file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Serialize back to TOML (used for the manifest's scenario echo).
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("scenario serialization failed: {e}")))
    }

    /// Build the mesh this scenario describes.
    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::uniform(
            self.mesh.length,
            self.mesh.n_elements,
            (self.mesh.boundary.left, self.mesh.boundary.right),
        )
    }

    /// Assemble the solver configuration (cross-section: `dt`/`t_end`
    /// from `[solver]`, wave speed from `[physics]`).
    pub fn solver_config(&self) -> Result<SolverConfig> {
        Ok(SolverConfig {
            scheme: self.solver.scheme,
            dt: self.solver.dt,
            n_steps: SolverConfig::steps_for(self.solver.t_end, self.solver.dt)?,
            c: self.physics.c,
            record_energy: self.solver.record_energy,
            full_state_stride: self.solver.full_state_stride,
        })
    }

    /// Cross-field validation. Everything checked here is a
    /// configuration error (CLI exit code 2), not a numeric failure.
    pub fn validate(&self) -> Result<()> {
        let mesh = self.mesh()?;
        if !(self.physics.c.is_finite() && self.physics.c > 0.0) {
            return Err(Error::Config(format!(
                "physics.c must be positive, got {}",
                self.physics.c
            )));
        }
        self.physics.damping.validate()?;
        self.excitation.signal.validate()?;

        let n_nodes = mesh.n_nodes();
        if self.excitation.source_node >= n_nodes {
            return Err(Error::Config(format!(
                "excitation.source_node = {} out of range for a mesh with {n_nodes} nodes",
                self.excitation.source_node
            )));
        }
        if mesh.node_is_fixed(self.excitation.source_node) {
            return Err(Error::Config(format!(
                "excitation.source_node = {} sits on a fixed boundary and cannot be driven",
                self.excitation.source_node
            )));
        }
        if self.probes.is_empty() {
            return Err(Error::Config("probes must list at least one node".to_string()));
        }
        for &node in &self.probes {
            if node >= n_nodes {
                return Err(Error::Config(format!(
                    "probe node {node} out of range for a mesh with {n_nodes} nodes"
                )));
            }
            if mesh.node_is_fixed(node) {
                return Err(Error::Config(format!(
                    "probe node {node} sits on a fixed boundary; its displacement is \
                     identically zero"
                )));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("outputs directory must be non-empty".to_string()));
        }

        if !(self.solver.dt.is_finite() && self.solver.dt > 0.0) {
            return Err(Error::Config(format!(
                "solver.dt must be positive, got {}",
                self.solver.dt
            )));
        }
        if !(self.solver.t_end.is_finite() && self.solver.t_end >= self.solver.dt) {
            return Err(Error::Config(format!(
                "solver.t_end = {} must cover at least one step of dt = {}",
                self.solver.t_end, self.solver.dt
            )));
        }

        // A single-frequency damping approximation is only meaningful for
        // a narrowband drive: insist on a tone burst so the frequency it
        // is evaluated at actually exists in the run.
        if matches!(self.physics.damping, DampingSpec::SingleFreq { .. })
            && !matches!(self.excitation.signal, ExcitationKind::ToneBurst { .. })
        {
            return Err(Error::Config(
                "physics.damping kind single_freq requires a tone_burst excitation".to_string(),
            ));
        }

        if let Some(sweep) = &self.sweep {
            self.validate_sweep(sweep, &mesh)?;
        }
        if let Some(dispersion) = &self.dispersion {
            let (left, right) = mesh.boundary();
            let n_dofs = n_nodes
                - usize::from(left == BoundaryKind::Fixed)
                - usize::from(right == BoundaryKind::Fixed);
            if dispersion.free_decay_modes > n_dofs {
                return Err(Error::Config(format!(
                    "dispersion.free_decay_modes = {} exceeds the {n_dofs} modes this mesh has",
                    dispersion.free_decay_modes
                )));
            }
        }
        Ok(())
    }

    fn validate_sweep(&self, sweep: &SweepConfig, mesh: &Mesh) -> Result<()> {
        if !matches!(self.excitation.signal, ExcitationKind::ToneBurst { .. }) {
            return Err(Error::Config(
                "sweep runs need a tone_burst excitation template".to_string(),
            ));
        }
        if self.probes.len() < 2 {
            return Err(Error::Config(
                "sweep runs need at least two probes to form an amplitude ratio".to_string(),
            ));
        }
        if sweep.carriers.len() < 3 {
            return Err(Error::Config(format!(
                "sweep.carriers needs at least 3 frequencies, got {}",
                sweep.carriers.len()
            )));
        }
        for (i, &f) in sweep.carriers.iter().enumerate() {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!(
                    "sweep.carriers[{i}] must be positive, got {f}"
                )));
            }
            let elements_per_wavelength = self.physics.c / (f * mesh.spacing());
            if elements_per_wavelength < MIN_ELEMENTS_PER_WAVELENGTH {
                return Err(Error::Config(format!(
                    "carrier {f} violates the resolution rule: wavelength/spacing = \
                     {elements_per_wavelength:.2} but at least {MIN_ELEMENTS_PER_WAVELENGTH} \
                     elements per wavelength are required"
                )));
            }
            if sweep.carriers[..i].contains(&f) {
                return Err(Error::Config(format!(
                    "sweep.carriers contains duplicate frequency {f}"
                )));
            }
        }
        Ok(())
    }
}
