//! All-pairs force accumulation over a ring of ranks.

use super::lj::{pair_interaction, LJParams};
use super::particles::{ParticleSet, FORCE};
use super::SimBox;
use crate::portability::Backend;
use crate::transport::{ring_shift, Comm};
use crate::Result;

#[derive(Debug, Clone, Copy, Default)]
struct Contribution {
    force: [f64; 3],
    potential: f64,
    pairs: u64,
}

/// Adds the forces exerted by `visiting` on every particle of `local`.
///
/// When `same_block` is set, `visiting` is `local` itself and the diagonal is
/// skipped. Half of each pair potential is added to `potential[i]` when given.
/// Returns the number of pair evaluations.
pub fn compute_forces_local(
    local: &mut ParticleSet,
    visiting: &ParticleSet,
    same_block: bool,
    params: &LJParams,
    sim_box: &SimBox,
    backend: &Backend,
    potential: Option<&mut [f64]>,
) -> u64 {
    let n = local.len();
    let mut contributions = vec![Contribution::default(); n];
    {
        let local = &*local;
        backend.parallel_for_each(&mut contributions, |i, out| {
            let xi = local.position(i);
            for j in 0..visiting.len() {
                if same_block && i == j {
                    continue;
                }
                let dr = sim_box.displacement(xi, visiting.position(j));
                let (f, v) = pair_interaction(dr, params);
                for (acc, fk) in out.force.iter_mut().zip(f) {
                    *acc += fk;
                }
                out.potential += 0.5 * v;
                out.pairs += 1;
            }
        });
    }
    let contributions = &contributions;
    backend.parallel_rows(local.table_mut(), |row| {
        let c = &contributions[row.row()];
        for k in 0..3 {
            row.set(FORCE + k, row.get(FORCE + k) + c.force[k]);
        }
    });
    if let Some(potential) = potential {
        backend.parallel_for_each(potential, |i, p| *p += contributions[i].potential);
    }
    contributions.iter().map(|c| c.pairs).sum()
}

/// Recomputes the forces on `local` from every particle on every rank.
///
/// A copy of the local block travels around the ring: a self pass, then
/// `size - 1` shifted passes. All ranks must hold blocks of equal size.
/// Returns the pair evaluations done by this rank.
pub fn ring_force_accumulation(
    comm: &Comm,
    local: &mut ParticleSet,
    params: &LJParams,
    sim_box: &SimBox,
    backend: &Backend,
    mut potential: Option<&mut [f64]>,
) -> Result<u64> {
    backend.parallel_rows(local.table_mut(), |row| {
        for k in 0..3 {
            row.set(FORCE + k, 0.0);
        }
    });
    if let Some(p) = potential.as_deref_mut() {
        p.fill(0.0);
    }
    let mut traveling = local.clone();
    let mut pairs = compute_forces_local(
        local,
        &traveling,
        true,
        params,
        sim_box,
        backend,
        potential.as_deref_mut(),
    );
    for _ in 1..comm.size() {
        ring_shift(comm, traveling.table_mut().as_mut_slice())?;
        pairs += compute_forces_local(
            local,
            &traveling,
            false,
            params,
            sim_box,
            backend,
            potential.as_deref_mut(),
        );
    }
    Ok(pairs)
}
