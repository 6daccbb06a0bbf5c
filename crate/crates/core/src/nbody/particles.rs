use crate::portability::{Layout, View2D};
use crate::{Error, Result};

/// Columns of the particle table: mass, position, velocity, force.
pub const COLUMNS: usize = 10;
pub const MASS: usize = 0;
pub const POS: usize = 1;
pub const VEL: usize = 4;
pub const FORCE: usize = 7;

/// A block of particles stored as an `N x 10` table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    table: View2D,
}

impl ParticleSet {
    pub fn zeros(n: usize, layout: Layout) -> Self {
        Self {
            table: View2D::zeros(n, COLUMNS, layout),
        }
    }

    pub fn from_table(table: View2D) -> Result<Self> {
        if table.cols() != COLUMNS {
            return Err(Error::Config(format!(
                "particle table needs {COLUMNS} columns, got {}",
                table.cols()
            )));
        }
        Ok(Self { table })
    }

    /// Concatenates blocks in order. All blocks must share a layout.
    pub fn concat(blocks: &[ParticleSet]) -> Self {
        let layout = blocks.first().map_or(Layout::RowMajor, |b| b.layout());
        let n = blocks.iter().map(|b| b.len()).sum();
        let mut out = Self::zeros(n, layout);
        let mut k = 0;
        for block in blocks {
            for i in 0..block.len() {
                for c in 0..COLUMNS {
                    out.table.set(k, c, block.table.get(i, c));
                }
                k += 1;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.table.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> Layout {
        self.table.layout()
    }

    pub fn table(&self) -> &View2D {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut View2D {
        &mut self.table
    }

    /// Rows `start..end` as a new set.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            table: self.table.slice_rows(start, end),
        }
    }

    #[inline]
    pub fn mass(&self, i: usize) -> f64 {
        self.table.get(i, MASS)
    }

    #[inline]
    fn triple(&self, i: usize, base: usize) -> [f64; 3] {
        [
            self.table.get(i, base),
            self.table.get(i, base + 1),
            self.table.get(i, base + 2),
        ]
    }

    #[inline]
    pub fn position(&self, i: usize) -> [f64; 3] {
        self.triple(i, POS)
    }

    #[inline]
    pub fn velocity(&self, i: usize) -> [f64; 3] {
        self.triple(i, VEL)
    }

    #[inline]
    pub fn force(&self, i: usize) -> [f64; 3] {
        self.triple(i, FORCE)
    }

    pub fn set_mass(&mut self, i: usize, m: f64) {
        self.table.set(i, MASS, m);
    }

    fn set_triple(&mut self, i: usize, base: usize, v: [f64; 3]) {
        for (k, x) in v.into_iter().enumerate() {
            self.table.set(i, base + k, x);
        }
    }

    pub fn set_position(&mut self, i: usize, p: [f64; 3]) {
        self.set_triple(i, POS, p);
    }

    pub fn set_velocity(&mut self, i: usize, v: [f64; 3]) {
        self.set_triple(i, VEL, v);
    }

    pub fn set_force(&mut self, i: usize, f: [f64; 3]) {
        self.set_triple(i, FORCE, f);
    }

    /// Total momentum `sum m v`.
    pub fn momentum(&self) -> [f64; 3] {
        let mut p = [0.0; 3];
        for i in 0..self.len() {
            let (m, v) = (self.mass(i), self.velocity(i));
            for k in 0..3 {
                p[k] += m * v[k];
            }
        }
        p
    }

    /// `sum m |v|^2 / 2`.
    pub fn kinetic_energy(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let v = self.velocity(i);
                0.5 * self.mass(i) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors_round_trip_in_both_layouts() {
        for layout in [Layout::RowMajor, Layout::ColMajor] {
            let mut p = ParticleSet::zeros(3, layout);
            p.set_mass(1, 2.0);
            p.set_position(1, [1.0, 2.0, 3.0]);
            p.set_velocity(1, [4.0, 5.0, 6.0]);
            p.set_force(1, [7.0, 8.0, 9.0]);
            assert_eq!(p.mass(1), 2.0);
            assert_eq!(p.position(1), [1.0, 2.0, 3.0]);
            assert_eq!(p.velocity(1), [4.0, 5.0, 6.0]);
            assert_eq!(p.force(1), [7.0, 8.0, 9.0]);
            let row: Vec<f64> = (0..COLUMNS).map(|c| p.table().get(1, c)).collect();
            assert_eq!(row, [2.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        }
    }

    #[test]
    fn kinetic_energy_of_unit_particles() {
        // Three unit-mass particles with |v|^2 = 1, 4, 13.
        let mut p = ParticleSet::zeros(3, Layout::RowMajor);
        for (i, v) in [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 2.0, 3.0]].into_iter().enumerate() {
            p.set_mass(i, 1.0);
            p.set_velocity(i, v);
        }
        assert_eq!(p.kinetic_energy(), 9.0);
        assert_eq!(p.momentum(), [1.0, 4.0, 3.0]);
    }

    #[test]
    fn slice_and_concat_are_inverse() {
        let mut p = ParticleSet::zeros(7, Layout::ColMajor);
        for i in 0..7 {
            p.set_position(i, [i as f64, -(i as f64), 0.5]);
        }
        let parts = [p.slice(0, 2), p.slice(2, 5), p.slice(5, 7)];
        assert_eq!(ParticleSet::concat(&parts), p);
    }

    #[test]
    fn rejects_wrong_width() {
        assert!(ParticleSet::from_table(View2D::zeros(4, 9, Layout::RowMajor)).is_err());
    }
}
