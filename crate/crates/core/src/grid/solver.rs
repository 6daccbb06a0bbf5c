use std::f64::consts::PI;

use super::boundary::{apply_boundary_conditions, taylor_green};
use super::kernels::{advance_vorticity, compute_velocity, jacobi_sweep};
use super::{GridField, RankSubdomain};
use crate::portability::{Backend, Layout};
use crate::timing::KernelTimer;
use crate::transport::{halo_exchange, Comm, ReduceOp, TopologyKind};
use crate::{Error, Result};

pub const JACOBI_KERNEL: &str = "jacobi_kernel";
pub const HALO_PSI: &str = "halo_psi";
pub const OTHER_OPS: &str = "other_ops";

/// Timing buckets of the vorticity miniapp, in reporting order.
pub const CATEGORIES: [&str; 3] = [JACOBI_KERNEL, HALO_PSI, OTHER_OPS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Unit-speed-scaled square cavity; the high-`y` wall moves in `+x`.
    LidDrivenCavity { lid_velocity: f64 },
    /// Decaying vortex with analytic Dirichlet walls.
    TaylorGreen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VorticityConfig {
    /// Global interior cells along x.
    pub nx: usize,
    /// Global interior cells along y.
    pub ny: usize,
    /// Domain extent along x (wall to wall).
    pub lx: f64,
    pub ly: f64,
    pub nu: f64,
    /// Fixed timestep; derived from a stability bound when `None`.
    pub dt: Option<f64>,
    pub steps: usize,
    pub tol: f64,
    /// Jacobi iteration cap per solve; `10 * nx * ny` when `None`.
    pub max_jacobi_iters: Option<usize>,
    pub scenario: Scenario,
    pub layout: Layout,
}

impl VorticityConfig {
    /// Lid-driven unit cavity with `U = 1`, `nu = 0.01`, 10 steps, `tol = 1e-4`.
    pub fn cavity(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            lx: 1.0,
            ly: 1.0,
            nu: 0.01,
            dt: None,
            steps: 10,
            tol: 1e-4,
            max_jacobi_iters: None,
            scenario: Scenario::LidDrivenCavity { lid_velocity: 1.0 },
            layout: Layout::RowMajor,
        }
    }

    /// Taylor-Green vortex on `[0, 2pi]^2`.
    pub fn taylor_green(nx: usize, ny: usize) -> Self {
        Self {
            lx: 2.0 * PI,
            ly: 2.0 * PI,
            scenario: Scenario::TaylorGreen,
            ..Self::cavity(nx, ny)
        }
    }

    pub fn h_x(&self) -> f64 {
        self.lx / (self.nx + 1) as f64
    }

    pub fn h_y(&self) -> f64 {
        self.ly / (self.ny + 1) as f64
    }

    pub fn jacobi_cap(&self) -> usize {
        self.max_jacobi_iters.unwrap_or(10 * self.nx * self.ny)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail every check
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.nx < 3 || self.ny < 3 {
            return bad(format!("grid must be at least 3x3, got {}x{}", self.nx, self.ny));
        }
        if !(self.tol > 0.0) {
            return bad(format!("Jacobi tolerance must be positive, got {}", self.tol));
        }
        if !(self.nu >= 0.0) {
            return bad(format!("viscosity must be non-negative, got {}", self.nu));
        }
        if !(self.lx > 0.0 && self.ly > 0.0) {
            return bad("domain extents must be positive".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("timestep must be positive, got {dt}"));
            }
        }
        if self.jacobi_cap() == 0 {
            return bad("Jacobi iteration cap must be positive".into());
        }
        self.time_step().map(|_| ())
    }

    /// The configured timestep, or `0.2 * min(h^2 / (4 nu), h / max|u|)`
    /// evaluated on the initial field.
    pub fn time_step(&self) -> Result<f64> {
        if let Some(dt) = self.dt {
            return Ok(dt);
        }
        let h = self.h_x().min(self.h_y());
        let max_speed = match self.scenario {
            Scenario::LidDrivenCavity { lid_velocity } => lid_velocity.abs(),
            Scenario::TaylorGreen => 1.0,
        };
        let diffusive = if self.nu > 0.0 { h * h / (4.0 * self.nu) } else { f64::INFINITY };
        let advective = if max_speed > 0.0 { h / max_speed } else { f64::INFINITY };
        let bound = diffusive.min(advective);
        if bound.is_finite() {
            Ok(0.2 * bound)
        } else {
            Err(Error::Config(
                "no viscosity and no flow: cannot derive a timestep, pass one explicitly".into(),
            ))
        }
    }
}

/// Outcome of one Poisson solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub iterations: usize,
    /// Global max-norm of the last Jacobi update.
    pub final_change: f64,
    pub converged: bool,
    /// Global max change after every iteration.
    pub history: Vec<f64>,
}

/// Jacobi iteration for `lap(psi) = -omega` until the global max update drops
/// below `tol` or `max_iters` sweeps have run.
///
/// Each iteration exchanges `psi` halos, sweeps and reduces the max update
/// over all ranks. Non-convergence is reported, not raised.
#[allow(clippy::too_many_arguments)]
pub fn solve_poisson(
    comm: &Comm,
    psi: &mut GridField,
    omega: &GridField,
    h_x: f64,
    h_y: f64,
    tol: f64,
    max_iters: usize,
    backend: &Backend,
    timer: &mut KernelTimer,
) -> Result<PoissonReport> {
    let mut next = timer.time(backend, JACOBI_KERNEL, || psi.clone());
    let mut history = Vec::new();
    let mut change = f64::INFINITY;
    while history.len() < max_iters {
        timer.time(backend, HALO_PSI, || halo_exchange(comm, psi))?;
        change = timer.time(backend, JACOBI_KERNEL, || -> Result<f64> {
            let local = jacobi_sweep(psi, omega, &mut next, h_x, h_y, backend);
            Ok(comm.allreduce(local, ReduceOp::Max)?)
        })?;
        std::mem::swap(psi, &mut next);
        history.push(change);
        if change < tol {
            break;
        }
    }
    Ok(PoissonReport {
        iterations: history.len(),
        final_change: change,
        converged: change < tol,
        history,
    })
}

/// Per-rank state of the vorticity miniapp.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityRank {
    pub sub: RankSubdomain,
    pub psi: GridField,
    pub omega: GridField,
    pub u: GridField,
    pub v: GridField,
    pub time: f64,
    pub steps_done: usize,
    pub dt: f64,
    pub reports: Vec<PoissonReport>,
}

impl VorticityRank {
    /// Builds this rank's subdomain and initial fields (cavity at rest, or
    /// the Taylor-Green field at `t = 0`) with wall values applied.
    pub fn new(config: &VorticityConfig, comm: &Comm) -> Result<Self> {
        config.validate()?;
        if comm.topology().kind() != TopologyKind::Grid2D {
            return Err(Error::Config("vorticity needs a Grid2D communicator".into()));
        }
        let dims = comm.topology().dims();
        let coords = comm.coords();
        let sub = RankSubdomain::new(config.nx, config.ny, [dims[0], dims[1]], [coords[0], coords[1]])?;
        let field = || GridField::zeros(sub.nx, sub.ny, config.layout);
        let (mut psi, mut omega, mut u, mut v) = (field(), field(), field(), field());
        if config.scenario == Scenario::TaylorGreen {
            let (h_x, h_y) = (config.h_x(), config.h_y());
            let at = |i: usize, j: usize| (sub.global_i(i) as f64 * h_x, sub.global_j(j) as f64 * h_y);
            psi.fill_interior(|i, j| {
                let (x, y) = at(i, j);
                taylor_green::psi(x, y, config.nu, 0.0)
            });
            omega.fill_interior(|i, j| {
                let (x, y) = at(i, j);
                taylor_green::omega(x, y, config.nu, 0.0)
            });
            u.fill_interior(|i, j| {
                let (x, y) = at(i, j);
                taylor_green::u(x, y, config.nu, 0.0)
            });
            v.fill_interior(|i, j| {
                let (x, y) = at(i, j);
                taylor_green::v(x, y, config.nu, 0.0)
            });
        }
        apply_boundary_conditions(&mut psi, &mut omega, &mut u, &mut v, &sub, config, 0.0);
        Ok(Self {
            sub,
            psi,
            omega,
            u,
            v,
            time: 0.0,
            steps_done: 0,
            dt: config.time_step()?,
            reports: Vec::new(),
        })
    }

    /// One timestep: Poisson solve, psi halo exchange, wall values from the
    /// new psi, velocity recovery, omega halo exchange, Euler update, then
    /// wall values at the new time.
    pub fn step(
        &mut self,
        config: &VorticityConfig,
        comm: &Comm,
        backend: &Backend,
        timer: &mut KernelTimer,
    ) -> Result<()> {
        let (h_x, h_y) = (config.h_x(), config.h_y());
        let report = solve_poisson(
            comm,
            &mut self.psi,
            &self.omega,
            h_x,
            h_y,
            config.tol,
            config.jacobi_cap(),
            backend,
            timer,
        )?;
        self.reports.push(report);
        timer.time(backend, HALO_PSI, || halo_exchange(comm, &mut self.psi))?;
        timer.time(backend, OTHER_OPS, || -> Result<()> {
            apply_boundary_conditions(
                &mut self.psi,
                &mut self.omega,
                &mut self.u,
                &mut self.v,
                &self.sub,
                config,
                self.time,
            );
            compute_velocity(&self.psi, &mut self.u, &mut self.v, h_x, h_y, backend);
            halo_exchange(comm, &mut self.omega)?;
            self.omega = advance_vorticity(&self.omega, &self.u, &self.v, config.nu, self.dt, h_x, h_y, backend);
            self.time += self.dt;
            self.steps_done += 1;
            apply_boundary_conditions(
                &mut self.psi,
                &mut self.omega,
                &mut self.u,
                &mut self.v,
                &self.sub,
                config,
                self.time,
            );
            Ok(())
        })
    }

    /// Largest `|omega - omega_exact|` over this rank's interior at the
    /// current time (Taylor-Green only).
    pub fn taylor_green_error(&self, config: &VorticityConfig) -> f64 {
        let (h_x, h_y) = (config.h_x(), config.h_y());
        let mut err: f64 = 0.0;
        for i in 1..=self.sub.nx {
            for j in 1..=self.sub.ny {
                let x = self.sub.global_i(i) as f64 * h_x;
                let y = self.sub.global_j(j) as f64 * h_y;
                let exact = taylor_green::omega(x, y, config.nu, self.time);
                err = err.max((self.omega.get(i, j) - exact).abs());
            }
        }
        err
    }
}

/// Runs the full vorticity miniapp on this rank.
pub fn run_vorticity(
    config: &VorticityConfig,
    comm: &Comm,
    backend: &Backend,
    timer: &mut KernelTimer,
) -> Result<VorticityRank> {
    let mut state = VorticityRank::new(config, comm)?;
    for _ in 0..config.steps {
        state.step(config, comm, backend, timer)?;
    }
    Ok(state)
}

/// Stitches one field of every rank into the global interior, row-major over
/// `(i, j)` with `ny` as the fast axis.
pub fn assemble_global(
    states: &[VorticityRank],
    pick: impl Fn(&VorticityRank) -> &GridField,
) -> Vec<f64> {
    let first = &states[0].sub;
    let (nx, ny) = (first.global_nx, first.global_ny);
    let mut out = vec![0.0; nx * ny];
    for state in states {
        let field = pick(state);
        for i in 1..=state.sub.nx {
            for j in 1..=state.sub.ny {
                let gi = state.sub.global_i(i) - 1;
                let gj = state.sub.global_j(j) - 1;
                out[gi * ny + gj] = field.get(i, j);
            }
        }
    }
    out
}
