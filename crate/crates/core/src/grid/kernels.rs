//! Five-point stencil kernels over the interior of a [`GridField`].
//!
//! Index `i` runs along x and `j` along y. Every kernel reads the previous
//! iterate and writes a separate output field.

use super::GridField;
use crate::portability::Backend;

/// One Jacobi sweep for `lap(psi) = -omega`, written into `next`.
///
/// Only interior cells of `next` are written. Returns the largest interior
/// `|next - psi|` on this rank.
pub fn jacobi_sweep(
    psi: &GridField,
    omega: &GridField,
    next: &mut GridField,
    h_x: f64,
    h_y: f64,
    backend: &Backend,
) -> f64 {
    let (nx, ny) = (psi.nx(), psi.ny());
    assert_eq!((next.nx(), next.ny()), (nx, ny));
    let hx2 = h_x * h_x;
    let hy2 = h_y * h_y;
    let src = hx2 * hy2;
    let denom = 2.0 * (hx2 + hy2);
    backend.parallel_rows(next.view_mut(), |row| {
        let i = row.row();
        if i == 0 || i == nx + 1 {
            return;
        }
        for j in 1..=ny {
            let value = ((psi.get(i + 1, j) + psi.get(i - 1, j)) * hy2
                + (psi.get(i, j + 1) + psi.get(i, j - 1)) * hx2
                + omega.get(i, j) * src)
                / denom;
            row.set(j, value);
        }
    });
    let next = &*next;
    backend.parallel_max(nx * ny, |k| {
        let (i, j) = (k / ny + 1, k % ny + 1);
        (next.get(i, j) - psi.get(i, j)).abs()
    })
}

/// Central-difference velocities `u = d(psi)/dy`, `v = -d(psi)/dx` on the
/// interior.
pub fn compute_velocity(
    psi: &GridField,
    u: &mut GridField,
    v: &mut GridField,
    h_x: f64,
    h_y: f64,
    backend: &Backend,
) {
    let (nx, ny) = (psi.nx(), psi.ny());
    let (inv2hx, inv2hy) = (0.5 / h_x, 0.5 / h_y);
    backend.parallel_rows(u.view_mut(), |row| {
        let i = row.row();
        if i == 0 || i == nx + 1 {
            return;
        }
        for j in 1..=ny {
            row.set(j, (psi.get(i, j + 1) - psi.get(i, j - 1)) * inv2hy);
        }
    });
    backend.parallel_rows(v.view_mut(), |row| {
        let i = row.row();
        if i == 0 || i == nx + 1 {
            return;
        }
        for j in 1..=ny {
            row.set(j, -(psi.get(i + 1, j) - psi.get(i - 1, j)) * inv2hx);
        }
    });
}

/// Forward-Euler update of the vorticity transport equation.
///
/// Halo cells of the result are copied from `omega`.
#[allow(clippy::too_many_arguments)]
pub fn advance_vorticity(
    omega: &GridField,
    u: &GridField,
    v: &GridField,
    nu: f64,
    dt: f64,
    h_x: f64,
    h_y: f64,
    backend: &Backend,
) -> GridField {
    let (nx, ny) = (omega.nx(), omega.ny());
    let (inv_hx2, inv_hy2) = (1.0 / (h_x * h_x), 1.0 / (h_y * h_y));
    let (inv2hx, inv2hy) = (0.5 / h_x, 0.5 / h_y);
    let mut next = omega.clone();
    backend.parallel_rows(next.view_mut(), |row| {
        let i = row.row();
        if i == 0 || i == nx + 1 {
            return;
        }
        for j in 1..=ny {
            let c = omega.get(i, j);
            let (e, w) = (omega.get(i + 1, j), omega.get(i - 1, j));
            let (n, s) = (omega.get(i, j + 1), omega.get(i, j - 1));
            let lap = (e - 2.0 * c + w) * inv_hx2 + (n - 2.0 * c + s) * inv_hy2;
            let dwdx = (e - w) * inv2hx;
            let dwdy = (n - s) * inv2hy;
            row.set(j, c + dt * (nu * lap - u.get(i, j) * dwdx - v.get(i, j) * dwdy));
        }
    });
    next
}
