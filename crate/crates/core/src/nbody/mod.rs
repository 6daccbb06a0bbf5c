//! All-pairs Lennard-Jones molecular dynamics distributed over a ring.
//!
//! Each rank owns a fixed, contiguous block of particles. Forces are summed
//! over every other particle by passing blocks around the ring, and the
//! system is advanced with velocity Verlet.

mod forces;
mod lj;
mod particles;
mod sim;

pub use forces::{compute_forces_local, ring_force_accumulation};
pub use lj::{lj_force, lj_potential, pair_interaction, LJParams};
pub use particles::{ParticleSet, COLUMNS, FORCE, MASS, POS, VEL};
pub use sim::{run_nbody, NBodyRank, CATEGORIES, FORCE_KERNEL, OTHER_OPS, REDUCTION};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::portability::Layout;
use crate::{Error, Result};

/// Cubic periodic box `[0, L)^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimBox {
    pub length: f64,
    /// Use the nearest periodic image for pair displacements. Off by default:
    /// positions wrap but pairs interact through the raw displacement.
    pub minimum_image: bool,
}

impl SimBox {
    pub fn new(length: f64) -> Self {
        Self {
            length,
            minimum_image: false,
        }
    }

    /// Box that fits a cubic lattice of `n` sites at spacing `1.5 sigma`.
    pub fn for_lattice(n: usize, sigma: f64) -> Self {
        Self::new(1.5 * sigma * lattice_side(n) as f64)
    }

    /// Maps `x` into `[0, L)`.
    #[inline]
    pub fn wrap(&self, x: f64) -> f64 {
        let w = x.rem_euclid(self.length);
        // rem_euclid can round up to exactly L for tiny negative inputs.
        if w >= self.length {
            w - self.length
        } else {
            w
        }
    }

    /// `x_j - x_i`, optionally reduced to the nearest image.
    #[inline]
    pub fn displacement(&self, xi: [f64; 3], xj: [f64; 3]) -> [f64; 3] {
        let mut d = [xj[0] - xi[0], xj[1] - xi[1], xj[2] - xi[2]];
        if self.minimum_image {
            for c in &mut d {
                *c -= self.length * (*c / self.length).round();
            }
        }
        d
    }
}

/// Smallest `k` with `k^3 >= n`.
pub fn lattice_side(n: usize) -> usize {
    let mut k = 1;
    while k * k * k < n {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq)]
pub struct NBodyConfig {
    pub particles: usize,
    pub dt: f64,
    pub steps: usize,
    pub params: LJParams,
    pub sim_box: SimBox,
    /// Compute the total energy every step (the reduction bucket).
    pub compute_energy: bool,
    pub seed: u64,
    pub layout: Layout,
    /// Initial velocity scale: components are drawn from `N(0, T/m)`.
    pub temperature: f64,
    pub mass: f64,
}

impl NBodyConfig {
    /// `n` unit-mass particles, `dt = 0.001`, 100 steps, `eps = sigma = 1`.
    pub fn new(particles: usize) -> Self {
        let params = LJParams::default();
        Self {
            particles,
            dt: 0.001,
            steps: 100,
            params,
            sim_box: SimBox::for_lattice(particles, params.sigma),
            compute_energy: true,
            seed: 42,
            layout: Layout::RowMajor,
            temperature: 1.0,
            mass: 1.0,
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail every check
    pub fn validate(&self, ranks: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.particles == 0 {
            return bad("particle count must be positive".into());
        }
        if ranks == 0 || !self.particles.is_multiple_of(ranks) {
            return bad(format!(
                "particle count {} is not divisible by {ranks} ranks",
                self.particles
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("timestep must be positive, got {}", self.dt));
        }
        if !(self.mass > 0.0) || !(self.temperature >= 0.0) {
            return bad("mass must be positive and temperature non-negative".into());
        }
        if !(self.sim_box.length > 0.0) {
            return bad(format!("box length must be positive, got {}", self.sim_box.length));
        }
        self.params.validate()?;
        let spacing = self.sim_box.length / lattice_side(self.particles) as f64;
        if spacing < self.params.r_eq() {
            return bad(format!(
                "box of length {} is too small for {} particles (lattice spacing {spacing} < {})",
                self.sim_box.length,
                self.particles,
                self.params.r_eq()
            ));
        }
        Ok(())
    }
}

/// Builds the full initial system: a jittered cubic lattice and Gaussian
/// velocities with the mean removed, drawn from a seeded generator.
pub fn init_global(config: &NBodyConfig) -> Result<ParticleSet> {
    config.validate(1)?;
    let n = config.particles;
    let side = lattice_side(n);
    let a = config.sim_box.length / side as f64;
    let jitter = 0.05 * a;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut set = ParticleSet::zeros(n, config.layout);
    for i in 0..n {
        let site = [i / (side * side), (i / side) % side, i % side];
        let mut pos = [0.0; 3];
        for k in 0..3 {
            pos[k] = (site[k] as f64 + 0.5) * a + rng.random_range(-jitter..jitter);
        }
        set.set_mass(i, config.mass);
        set.set_position(i, pos);
    }
    let normal = Normal::new(0.0, (config.temperature / config.mass).sqrt())
        .map_err(|e| Error::Config(format!("velocity distribution: {e}")))?;
    let mut mean = [0.0; 3];
    let mut velocities = Vec::with_capacity(n);
    for _ in 0..n {
        let v = [normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng)];
        for k in 0..3 {
            mean[k] += v[k] / n as f64;
        }
        velocities.push(v);
    }
    for (i, mut v) in velocities.into_iter().enumerate() {
        if n > 1 {
            for k in 0..3 {
                v[k] -= mean[k];
            }
        }
        set.set_velocity(i, v);
    }
    Ok(set)
}

/// The block of the initial system owned by `rank` out of `ranks`.
pub fn init_particles(config: &NBodyConfig, rank: usize, ranks: usize) -> Result<ParticleSet> {
    config.validate(ranks)?;
    let per_rank = config.particles / ranks;
    Ok(init_global(config)?.slice(rank * per_rank, (rank + 1) * per_rank))
}
