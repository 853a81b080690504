//! Scenario execution: single runs and multi-carrier attenuation sweeps.
//!
//! This is the glue between a parsed [`Scenario`](crate::scenario::Scenario)
//! and the solvers. A sweep clones the scenario's tone-burst template once
//! per carrier, simulates, measures the two-probe amplitude ratio, and
//! fits the attenuation power law over the collected samples — the
//! in-silico version of measuring absorption with a retuned transducer.
//!
//! The modal basis is eigendecomposed once and shared across carriers, so
//! the cost of a sweep is one eigensolve plus `n_carriers` cheap modal
//! integrations (the recommended configuration); direct integration per
//! carrier is available for cross-checks.

use nalgebra::DVector;

use crate::analysis::{
    fit_power_law, measure_attenuation, AttenuationMeasurement, AttenuationSample, PowerLawFit,
    relative_l2,
};
use crate::error::{Error, Result};
use crate::fem::AssembledSystem;
use crate::integrate::{build_damping_matrix, integrate, DampingSpec, SourceTerm, Trajectory};
use crate::modal::{eigendecompose, solve_modal, ModalBasis};
use crate::scenario::{Scenario, SolverChoice};
use crate::signal::{excitation_signal, ExcitationKind};

/// Map probe node ids to free-dof indices.
pub fn probe_dofs_for(probes: &[usize], system: &AssembledSystem) -> Result<Vec<usize>> {
    probes
        .iter()
        .map(|&node| {
            system.dof_of_node(node).ok_or_else(|| {
                Error::invalid_argument(format!(
                    "probe node {node} has no free degree of freedom"
                ))
            })
        })
        .collect()
}

/// Build the source term for an excitation at a node: mass-normalized
/// point load times the signal sampled on the run's time grid.
pub fn build_source(
    signal: &ExcitationKind,
    source_node: usize,
    system: &AssembledSystem,
    dt: f64,
    n_steps: usize,
) -> Result<SourceTerm> {
    let spatial = system.point_source_vector(source_node)?;
    let times: Vec<f64> = (0..=n_steps).map(|k| dt * k as f64).collect();
    Ok(SourceTerm {
        spatial,
        signal: excitation_signal(signal, &times)?,
    })
}

/// Result of [`run_simulation`]: one trajectory, or a pair with their
/// distance when the scenario asked for both solvers.
#[derive(Debug, Clone)]
pub enum SimOutput {
    Single(Trajectory),
    Both {
        direct: Trajectory,
        modal: Trajectory,
        /// Relative L2 distance between the concatenated probe series
        /// (modal as reference).
        relative_l2: f64,
    },
}

impl SimOutput {
    /// The primary trajectory (direct when both were run).
    #[must_use]
    pub fn primary(&self) -> &Trajectory {
        match self {
            SimOutput::Single(t) => t,
            SimOutput::Both { direct, .. } => direct,
        }
    }
}

/// Run the scenario once with zero initial conditions, honouring
/// `solver.solver_choice`.
pub fn run_simulation(scenario: &Scenario) -> Result<SimOutput> {
    scenario.validate()?;
    let system = AssembledSystem::assemble(scenario.mesh()?);
    let probe_dofs = probe_dofs_for(&scenario.probes, &system)?;
    let config = scenario.solver_config()?;
    let source = build_source(
        &scenario.excitation.signal,
        scenario.excitation.source_node,
        &system,
        config.dt,
        config.n_steps,
    )?;
    let zero = DVector::zeros(system.n_dofs());

    let run_direct = || -> Result<Trajectory> {
        let d = build_damping_matrix(system.stiffness(), &scenario.physics.damping, config.c)?;
        integrate(
            system.stiffness(),
            &d,
            Some(&source),
            &config,
            &zero,
            &zero,
            &probe_dofs,
        )
    };
    let run_modal = |basis: &ModalBasis| -> Result<Trajectory> {
        solve_modal(
            basis,
            &scenario.physics.damping,
            Some(&source),
            &config,
            &basis.project(&zero)?,
            &basis.project(&zero)?,
            &probe_dofs,
        )
    };

    match scenario.solver.solver_choice {
        SolverChoice::Direct => Ok(SimOutput::Single(run_direct()?)),
        SolverChoice::Modal => {
            let basis = eigendecompose(system.stiffness())?;
            Ok(SimOutput::Single(run_modal(&basis)?))
        }
        SolverChoice::Both => {
            let direct = run_direct()?;
            let basis = eigendecompose(system.stiffness())?;
            let modal = run_modal(&basis)?;
            let rel = trajectory_distance(&direct, &modal)?;
            Ok(SimOutput::Both {
                direct,
                modal,
                relative_l2: rel,
            })
        }
    }
}

/// Relative L2 distance between two trajectories' probe recordings
/// (second trajectory as reference).
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.probe_dofs != b.probe_dofs || a.n_samples() != b.n_samples() {
        return Err(Error::invalid_argument(
            "trajectories record different probes or lengths".to_string(),
        ));
    }
    let concat = |t: &Trajectory| -> Vec<f64> {
        t.probe_p.iter().flat_map(|s| s.iter().copied()).collect()
    };
    relative_l2(&concat(a), &concat(b))
}

/// Samples and fit from a completed sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub samples: Vec<AttenuationSample>,
    pub fit: PowerLawFit,
}

/// Run a multi-carrier attenuation sweep as configured by the scenario's
/// `[sweep]` section.
///
/// Per carrier, the tone-burst template is retuned to that frequency (and
/// a `single_freq` damping spec is re-pinned to the carrier's
/// eigen-wavenumber `2πf/c`, keeping the narrowband approximation aligned
/// with the drive). Amplitudes are measured between the first two probes.
/// The modal path (`solver_choice` `modal` or `both`) reuses one
/// eigendecomposition across all carriers.
pub fn run_attenuation_sweep(scenario: &Scenario) -> Result<SweepOutcome> {
    scenario.validate()?;
    let sweep_cfg = scenario
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("scenario has no [sweep] section".to_string()))?;
    let ExcitationKind::ToneBurst {
        n_cycles, window, ..
    } = scenario.excitation.signal
    else {
        return Err(Error::Config(
            "sweep runs need a tone_burst excitation template".to_string(),
        ));
    };

    let system = AssembledSystem::assemble(scenario.mesh()?);
    let probe_dofs = probe_dofs_for(&scenario.probes, &system)?;
    let config = scenario.solver_config()?;
    let zero = DVector::zeros(system.n_dofs());
    let source_node = scenario.excitation.source_node;
    let source_position = system.mesh().coord(source_node);

    let basis = match scenario.solver.solver_choice {
        SolverChoice::Direct => None,
        SolverChoice::Modal | SolverChoice::Both => Some(eigendecompose(system.stiffness())?),
    };

    let mut samples = Vec::with_capacity(sweep_cfg.carriers.len());
    for &carrier in &sweep_cfg.carriers {
        let burst = ExcitationKind::ToneBurst {
            frequency: carrier,
            n_cycles,
            window,
        };
        let damping = match scenario.physics.damping {
            DampingSpec::SingleFreq { alpha0, y, .. } => DampingSpec::SingleFreq {
                alpha0,
                y,
                frequency: 2.0 * std::f64::consts::PI * carrier / config.c,
            },
            other => other,
        };
        let source = build_source(&burst, source_node, &system, config.dt, config.n_steps)?;
        let traj = match &basis {
            Some(basis) => solve_modal(
                basis,
                &damping,
                Some(&source),
                &config,
                &basis.project(&zero)?,
                &basis.project(&zero)?,
                &probe_dofs,
            )?,
            None => {
                let d = build_damping_matrix(system.stiffness(), &damping, config.c)?;
                integrate(
                    system.stiffness(),
                    &d,
                    Some(&source),
                    &config,
                    &zero,
                    &zero,
                    &probe_dofs,
                )?
            }
        };
        let setup = AttenuationMeasurement {
            carrier_frequency: carrier,
            c: config.c,
            source_position,
            burst_duration: burst
                .support_end()
                .expect("a tone burst has finite support"),
            method: sweep_cfg.envelope,
        };
        samples.push(measure_attenuation(&traj, &system, (0, 1), &setup)?);
    }

    let fit = fit_power_law(&samples, sweep_cfg.fit_form)?;
    Ok(SweepOutcome { samples, fit })
}
