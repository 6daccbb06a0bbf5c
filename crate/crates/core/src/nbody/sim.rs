use super::forces::ring_force_accumulation;
use super::particles::{ParticleSet, FORCE, MASS, POS, VEL};
use super::{init_particles, NBodyConfig};
use crate::portability::Backend;
use crate::timing::KernelTimer;
use crate::transport::{Comm, ReduceOp, TopologyKind};
use crate::{Error, Result};

pub const FORCE_KERNEL: &str = "force";
pub const REDUCTION: &str = "reduction";
pub const OTHER_OPS: &str = "other_ops";

/// Timing buckets of the N-body miniapp, in reporting order.
pub const CATEGORIES: [&str; 3] = [FORCE_KERNEL, REDUCTION, OTHER_OPS];

/// Per-rank state of the N-body miniapp.
#[derive(Debug, Clone, PartialEq)]
pub struct NBodyRank {
    pub particles: ParticleSet,
    /// Half-pair potential accumulated per local particle (energy runs only).
    pub potential: Vec<f64>,
    /// Global total energy at start and after every step (energy runs only).
    pub energies: Vec<f64>,
    /// Pair evaluations by this rank during the last force computation.
    pub pair_evaluations: u64,
    pub steps_done: usize,
}

impl NBodyRank {
    /// Initial block for this rank with forces (and energy) evaluated.
    pub fn new(config: &NBodyConfig, comm: &Comm, backend: &Backend) -> Result<Self> {
        let particles = init_particles(config, comm.rank().get(), comm.size())?;
        Self::with_particles(config, comm, backend, particles)
    }

    /// Starts from a caller-supplied block instead of the seeded lattice.
    pub fn with_particles(
        config: &NBodyConfig,
        comm: &Comm,
        backend: &Backend,
        mut particles: ParticleSet,
    ) -> Result<Self> {
        if comm.topology().kind() != TopologyKind::Ring1D {
            return Err(Error::Config("nbody needs a Ring1D communicator".into()));
        }
        let mut potential = vec![0.0; particles.len()];
        let pair_evaluations = ring_force_accumulation(
            comm,
            &mut particles,
            &config.params,
            &config.sim_box,
            backend,
            config.compute_energy.then_some(potential.as_mut_slice()),
        )?;
        let mut state = Self {
            particles,
            potential,
            energies: Vec::new(),
            pair_evaluations,
            steps_done: 0,
        };
        if config.compute_energy {
            let e = state.total_energy(comm, backend)?;
            state.energies.push(e);
        }
        Ok(state)
    }

    /// One velocity-Verlet step followed, when enabled, by the energy
    /// reduction.
    pub fn step(
        &mut self,
        config: &NBodyConfig,
        comm: &Comm,
        backend: &Backend,
        timer: &mut KernelTimer,
    ) -> Result<()> {
        let dt = config.dt;
        let sim_box = config.sim_box;
        timer.time(backend, OTHER_OPS, || {
            backend.parallel_rows(self.particles.table_mut(), |row| {
                let half = 0.5 * dt / row.get(MASS);
                for k in 0..3 {
                    let v = row.get(VEL + k) + half * row.get(FORCE + k);
                    row.set(VEL + k, v);
                    row.set(POS + k, sim_box.wrap(row.get(POS + k) + dt * v));
                }
            })
        });
        self.pair_evaluations = timer.time(backend, FORCE_KERNEL, || {
            ring_force_accumulation(
                comm,
                &mut self.particles,
                &config.params,
                &sim_box,
                backend,
                config.compute_energy.then_some(self.potential.as_mut_slice()),
            )
        })?;
        timer.time(backend, OTHER_OPS, || {
            backend.parallel_rows(self.particles.table_mut(), |row| {
                let half = 0.5 * dt / row.get(MASS);
                for k in 0..3 {
                    row.set(VEL + k, row.get(VEL + k) + half * row.get(FORCE + k));
                }
            })
        });
        self.steps_done += 1;
        if config.compute_energy {
            let e = timer.time(backend, REDUCTION, || self.total_energy(comm, backend))?;
            self.energies.push(e);
        }
        Ok(())
    }

    /// Global kinetic plus potential energy. Uses the per-particle potential
    /// from the last force computation.
    pub fn total_energy(&self, comm: &Comm, backend: &Backend) -> Result<f64> {
        let p = &self.particles;
        let kinetic = backend.parallel_sum(p.len(), |i| {
            let v = p.velocity(i);
            0.5 * p.mass(i) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
        });
        let potential = backend.parallel_sum(self.potential.len(), |i| self.potential[i]);
        Ok(comm.allreduce(kinetic + potential, ReduceOp::Sum)?)
    }
}

/// Runs the full N-body miniapp on this rank.
pub fn run_nbody(
    config: &NBodyConfig,
    comm: &Comm,
    backend: &Backend,
    timer: &mut KernelTimer,
) -> Result<NBodyRank> {
    let mut state = NBodyRank::new(config, comm, backend)?;
    for _ in 0..config.steps {
        state.step(config, comm, backend, timer)?;
    }
    Ok(state)
}
