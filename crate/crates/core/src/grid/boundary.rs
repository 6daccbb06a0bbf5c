use super::{GridField, RankSubdomain, Scenario, Side, VorticityConfig};

/// Analytic decaying Taylor-Green vortex, `psi = sin x sin y exp(-2 nu t)`.
pub mod taylor_green {
    pub fn decay(nu: f64, t: f64) -> f64 {
        (-2.0 * nu * t).exp()
    }

    pub fn psi(x: f64, y: f64, nu: f64, t: f64) -> f64 {
        x.sin() * y.sin() * decay(nu, t)
    }

    pub fn omega(x: f64, y: f64, nu: f64, t: f64) -> f64 {
        2.0 * psi(x, y, nu, t)
    }

    pub fn u(x: f64, y: f64, nu: f64, t: f64) -> f64 {
        x.sin() * y.cos() * decay(nu, t)
    }

    pub fn v(x: f64, y: f64, nu: f64, t: f64) -> f64 {
        -x.cos() * y.sin() * decay(nu, t)
    }
}

/// Local padded indices of the halo cells on `side`, corners excluded.
fn halo_cells(nx: usize, ny: usize, side: Side) -> Vec<(usize, usize)> {
    match side {
        Side::North => (1..=ny).map(|j| (0, j)).collect(),
        Side::South => (1..=ny).map(|j| (nx + 1, j)).collect(),
        Side::West => (1..=nx).map(|i| (i, 0)).collect(),
        Side::East => (1..=nx).map(|i| (i, ny + 1)).collect(),
    }
}

/// Sets wall values of `psi`, `omega`, `u` and `v` on every physical side
/// owned by this rank. Interior cells are never written.
///
/// For the lid-driven cavity the lid is the high-`y` wall (`Side::East`)
/// moving in `+x`; wall vorticity follows the first-order Thom relation
/// `omega_w = 2 (psi_w - psi_adj) / h^2 - 2 U_w / h` with `h` the
/// wall-normal spacing.
pub fn apply_boundary_conditions(
    psi: &mut GridField,
    omega: &mut GridField,
    u: &mut GridField,
    v: &mut GridField,
    sub: &RankSubdomain,
    config: &VorticityConfig,
    time: f64,
) {
    let (nx, ny) = (psi.nx(), psi.ny());
    let (h_x, h_y) = (config.h_x(), config.h_y());
    for side in Side::ALL {
        if !sub.is_physical(side) {
            continue;
        }
        match config.scenario {
            Scenario::LidDrivenCavity { lid_velocity } => {
                let (h, wall_speed) = match side {
                    Side::North | Side::South => (h_x, 0.0),
                    Side::West => (h_y, 0.0),
                    Side::East => (h_y, lid_velocity),
                };
                for (i, j) in halo_cells(nx, ny, side) {
                    let (ai, aj) = match side {
                        Side::North => (1, j),
                        Side::South => (nx, j),
                        Side::West => (i, 1),
                        Side::East => (i, ny),
                    };
                    psi.set(i, j, 0.0);
                    let w = 2.0 * (psi.get(i, j) - psi.get(ai, aj)) / (h * h) - 2.0 * wall_speed / h;
                    omega.set(i, j, w);
                    u.set(i, j, wall_speed);
                    v.set(i, j, 0.0);
                }
            }
            Scenario::TaylorGreen => {
                for (i, j) in halo_cells(nx, ny, side) {
                    let x = sub.global_i(i) as f64 * h_x;
                    let y = sub.global_j(j) as f64 * h_y;
                    psi.set(i, j, taylor_green::psi(x, y, config.nu, time));
                    omega.set(i, j, taylor_green::omega(x, y, config.nu, time));
                    u.set(i, j, taylor_green::u(x, y, config.nu, time));
                    v.set(i, j, taylor_green::v(x, y, config.nu, time));
                }
            }
        }
    }
}
