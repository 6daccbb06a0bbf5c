use crate::{Error, Result};

/// Lennard-Jones parameters in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LJParams {
    pub epsilon: f64,
    pub sigma: f64,
    /// Distances below this are clamped before evaluating the potential.
    pub r_min: f64,
}

impl Default for LJParams {
    fn default() -> Self {
        Self::new(1.0, 1.0)
    }
}

impl LJParams {
    /// Parameters with the softening floor at `0.01 * sigma`.
    pub fn new(epsilon: f64, sigma: f64) -> Self {
        Self {
            epsilon,
            sigma,
            r_min: 0.01 * sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.sigma > 0.0 && self.r_min > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "Lennard-Jones parameters must be positive: {self:?}"
            )))
        }
    }

    /// Separation of the potential minimum, `2^(1/6) sigma`.
    pub fn r_eq(&self) -> f64 {
        2f64.powf(1.0 / 6.0) * self.sigma
    }
}

/// `V(r) = 4 eps [(sigma/r)^12 - (sigma/r)^6]` with `r` clamped to `r_min`.
#[inline]
pub fn lj_potential(r: f64, params: &LJParams) -> f64 {
    let r = r.max(params.r_min);
    let sr6 = (params.sigma / r).powi(6);
    4.0 * params.epsilon * (sr6 * sr6 - sr6)
}

/// Force on particle `i` and pair potential for displacement `dr = x_j - x_i`.
///
/// The magnitude is `24 eps [2 sigma^12 / r^13 - sigma^6 / r^7]` evaluated at
/// the clamped distance, directed along `-dr` (repulsion pushes `i` away
/// from `j`). Coincident particles feel no force.
#[inline]
pub fn pair_interaction(dr: [f64; 3], params: &LJParams) -> ([f64; 3], f64) {
    let r2 = dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2];
    let r = r2.sqrt();
    let re = r.max(params.r_min);
    let sr6 = (params.sigma / re).powi(6);
    let sr12 = sr6 * sr6;
    let potential = 4.0 * params.epsilon * (sr12 - sr6);
    if r == 0.0 {
        return ([0.0; 3], potential);
    }
    let magnitude = 24.0 * params.epsilon * (2.0 * sr12 - sr6) / re;
    let scale = -magnitude / r;
    ([scale * dr[0], scale * dr[1], scale * dr[2]], potential)
}

/// Force on particle `i` for displacement `dr = x_j - x_i`.
#[inline]
pub fn lj_force(dr: [f64; 3], params: &LJParams) -> [f64; 3] {
    pair_interaction(dr, params).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn potential_point_values() {
        for (eps, sigma) in [(1.0, 1.0), (2.5, 0.7), (0.3, 3.4)] {
            let p = LJParams::new(eps, sigma);
            assert_eq!(lj_potential(sigma, &p), 0.0);
            assert!((lj_potential(p.r_eq(), &p) + eps).abs() <= 8.0 * f64::EPSILON * eps);
        }
        let p = LJParams::default();
        let direct = 4.0 * (2f64.powi(-12) - 2f64.powi(-6));
        assert!((lj_potential(2.0, &p) - direct).abs() < 1e-15);
        assert!((lj_potential(2.0, &p) + 0.061523).abs() < 1e-6);
    }

    #[test]
    fn force_vanishes_at_the_minimum() {
        let p = LJParams::new(1.7, 1.3);
        let f = lj_force([p.r_eq(), 0.0, 0.0], &p);
        let scale = 24.0 * p.epsilon / p.sigma;
        assert!(f.iter().all(|c| c.abs() <= 16.0 * f64::EPSILON * scale), "{f:?}");
    }

    #[test]
    fn contact_force_is_repulsive() {
        let p = LJParams::default();
        let f = lj_force([1.0, 0.0, 0.0], &p);
        assert!((f[0] + 24.0).abs() < 1e-13);
        assert_eq!(f[1], 0.0);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn clamping_keeps_values_finite() {
        let p = LJParams::default();
        let (f, v) = pair_interaction([1e-9, 0.0, 0.0], &p);
        assert!(v.is_finite() && f[0].is_finite());
        assert_eq!(v, lj_potential(p.r_min, &p));
        let (f, v) = pair_interaction([0.0; 3], &p);
        assert_eq!(f, [0.0; 3]);
        assert!(v.is_finite());
    }

    #[test]
    fn force_is_minus_gradient_of_potential() {
        // Central finite difference of V along x.
        let p = LJParams::new(1.2, 0.9);
        for r in [0.85, 1.0, 1.1, 1.5, 2.3] {
            let h = 1e-6;
            let dvdr = (lj_potential(r + h, &p) - lj_potential(r - h, &p)) / (2.0 * h);
            // dr points from i to j; moving j away raises r, so F_i = +dV/dr along dr.
            let f = lj_force([r, 0.0, 0.0], &p);
            assert!((f[0] - dvdr).abs() < 1e-6 * dvdr.abs().max(1.0), "r={r}");
        }
    }

    proptest! {
        #[test]
        fn newton_third_law(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64) {
            let p = LJParams::default();
            let a = lj_force([x, y, z], &p);
            let b = lj_force([-x, -y, -z], &p);
            for k in 0..3 {
                prop_assert_eq!(a[k], -b[k]);
            }
        }
    }
}
