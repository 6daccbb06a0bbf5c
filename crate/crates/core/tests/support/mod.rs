//! Shared oracles and runners for the integration tests.
#![allow(dead_code)]

pub mod vtk_reader;

use std::f64::consts::PI;
use std::path::Path;

use perfport_core::grid::{run_vorticity, solve_poisson, GridField, PoissonReport, RankSubdomain, VorticityConfig, VorticityRank};
use perfport_core::nbody::{run_nbody, NBodyConfig, NBodyRank, ParticleSet};
use perfport_core::timing::KernelTimer;
use perfport_core::transport::{spawn_ranks, spawn_ranks_with, CartTopology, TopologyKind};
use perfport_core::{Backend, Layout};

/// Textbook all-pairs Lennard-Jones force on every particle (no clamping,
/// no periodic images).
pub fn oracle_forces(p: &ParticleSet, eps: f64, sigma: f64) -> Vec<[f64; 3]> {
    let n = p.len();
    let mut out = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (xi, xj) = (p.position(i), p.position(j));
            let d = [xj[0] - xi[0], xj[1] - xi[1], xj[2] - xi[2]];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let mag = 24.0 * eps * (2.0 * sigma.powi(12) / r.powi(13) - sigma.powi(6) / r.powi(7));
            for k in 0..3 {
                out[i][k] -= mag * d[k] / r;
            }
        }
    }
    out
}

pub fn run_nbody_ranks(config: &NBodyConfig, ranks: usize, backend: &Backend) -> Vec<NBodyRank> {
    spawn_ranks(ranks, TopologyKind::Ring1D, |comm| {
        let mut timer = KernelTimer::default();
        run_nbody(config, comm, backend, &mut timer)
    })
    .expect("nbody run")
}

pub fn gather(states: &[NBodyRank]) -> ParticleSet {
    let blocks: Vec<ParticleSet> = states.iter().map(|s| s.particles.clone()).collect();
    ParticleSet::concat(&blocks)
}

pub fn run_vorticity_ranks(config: &VorticityConfig, ranks: usize, backend: &Backend) -> Vec<VorticityRank> {
    spawn_ranks(ranks, TopologyKind::Grid2D, |comm| {
        let mut timer = KernelTimer::default();
        run_vorticity(config, comm, backend, &mut timer)
    })
    .expect("vorticity run")
}

/// Solves `lap(psi) = -2 pi^2 sin(pi x) sin(pi y)` on an `n x n` interior
/// of the unit square split over `dims` ranks. Returns the global interior
/// (row-major, y fastest) and every rank's solver report.
pub fn manufactured_poisson(n: usize, dims: [usize; 2], tol: f64) -> (Vec<f64>, Vec<PoissonReport>) {
    let topo = CartTopology::with_dims(TopologyKind::Grid2D, dims.to_vec()).unwrap();
    let h = 1.0 / (n + 1) as f64;
    let out = spawn_ranks_with(topo, |comm| {
        let c = comm.coords();
        let sub = RankSubdomain::new(n, n, dims, [c[0], c[1]])?;
        let mut psi = GridField::zeros(sub.nx, sub.ny, Layout::RowMajor);
        let mut omega = GridField::zeros(sub.nx, sub.ny, Layout::RowMajor);
        omega.fill_interior(|i, j| {
            let (x, y) = (sub.global_i(i) as f64 * h, sub.global_j(j) as f64 * h);
            2.0 * PI * PI * (PI * x).sin() * (PI * y).sin()
        });
        let mut timer = KernelTimer::default();
        let report = solve_poisson(comm, &mut psi, &omega, h, h, tol, 1_000_000, &Backend::sequential(), &mut timer)?;
        Ok((sub, psi, report))
    })
    .expect("poisson run");
    let mut global = vec![0.0; n * n];
    for (sub, psi, _) in &out {
        for i in 1..=sub.nx {
            for j in 1..=sub.ny {
                global[(sub.global_i(i) - 1) * n + sub.global_j(j) - 1] = psi.get(i, j);
            }
        }
    }
    (global, out.into_iter().map(|(_, _, r)| r).collect())
}

/// Max-norm error of the manufactured solve against `sin(pi x) sin(pi y)`.
pub fn manufactured_error(n: usize, tol: f64) -> f64 {
    let h = 1.0 / (n + 1) as f64;
    let (psi, _) = manufactured_poisson(n, [1, 1], tol);
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i + 1) as f64 * h, (j + 1) as f64 * h);
            err = err.max((psi[i * n + j] - (PI * x).sin() * (PI * y).sin()).abs());
        }
    }
    err
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Median by sorting; even counts average the two central values.
pub fn oracle_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Hand-split CSV rows below the header.
pub fn csv_rows(path: &Path, header: &str) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header), "{}", path.display());
    lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
