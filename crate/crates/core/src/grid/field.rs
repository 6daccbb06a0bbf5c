use crate::portability::{Layout, View2D};
use crate::{Error, Result};

/// One of the four faces of a rank's subdomain.
///
/// `North`/`South` are the low/high `i` faces (topology axis 0), `West`/`East`
/// the low/high `j` faces (topology axis 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    North,
    South,
    West,
    East,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::South, Side::West, Side::East];

    pub fn axis(self) -> usize {
        match self {
            Side::North | Side::South => 0,
            Side::West | Side::East => 1,
        }
    }

    pub fn displacement(self) -> isize {
        match self {
            Side::North | Side::West => -1,
            Side::South | Side::East => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::South => Side::North,
            Side::West => Side::East,
            Side::East => Side::West,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Interior `nx x ny` cells plus a one-cell halo ring.
///
/// Padded indices run over `0..=nx+1` and `0..=ny+1`; the interior is
/// `1..=nx` by `1..=ny`. Storage is a padded [`View2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    nx: usize,
    ny: usize,
    view: View2D,
}

impl GridField {
    pub fn zeros(nx: usize, ny: usize, layout: Layout) -> Self {
        Self::filled(nx, ny, layout, 0.0)
    }

    pub fn filled(nx: usize, ny: usize, layout: Layout, value: f64) -> Self {
        Self {
            nx,
            ny,
            view: View2D::filled(nx + 2, ny + 2, layout, value),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn layout(&self) -> Layout {
        self.view.layout()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.view.get(i, j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.view.set(i, j, value)
    }

    pub fn view(&self) -> &View2D {
        &self.view
    }

    pub fn view_mut(&mut self) -> &mut View2D {
        &mut self.view
    }

    /// The interior cells adjacent to `side`, in increasing index order.
    pub fn boundary_strip(&self, side: Side) -> Vec<f64> {
        match side {
            Side::North => (1..=self.ny).map(|j| self.get(1, j)).collect(),
            Side::South => (1..=self.ny).map(|j| self.get(self.nx, j)).collect(),
            Side::West => (1..=self.nx).map(|i| self.get(i, 1)).collect(),
            Side::East => (1..=self.nx).map(|i| self.get(i, self.ny)).collect(),
        }
    }

    /// The halo cells on `side`, corners excluded.
    pub fn halo_strip(&self, side: Side) -> Vec<f64> {
        match side {
            Side::North => (1..=self.ny).map(|j| self.get(0, j)).collect(),
            Side::South => (1..=self.ny).map(|j| self.get(self.nx + 1, j)).collect(),
            Side::West => (1..=self.nx).map(|i| self.get(i, 0)).collect(),
            Side::East => (1..=self.nx).map(|i| self.get(i, self.ny + 1)).collect(),
        }
    }

    pub fn set_halo_strip(&mut self, side: Side, values: &[f64]) {
        assert_eq!(values.len(), self.strip_len(side));
        for (k, &v) in values.iter().enumerate() {
            match side {
                Side::North => self.set(0, k + 1, v),
                Side::South => self.set(self.nx + 1, k + 1, v),
                Side::West => self.set(k + 1, 0, v),
                Side::East => self.set(k + 1, self.ny + 1, v),
            }
        }
    }

    pub fn strip_len(&self, side: Side) -> usize {
        match side.axis() {
            0 => self.ny,
            _ => self.nx,
        }
    }

    /// Interior values in row-major `(i, j)` order.
    pub fn interior(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for i in 1..=self.nx {
            for j in 1..=self.ny {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn fill_interior(&mut self, mut value: impl FnMut(usize, usize) -> f64) {
        for i in 1..=self.nx {
            for j in 1..=self.ny {
                let v = value(i, j);
                self.set(i, j, v);
            }
        }
    }
}

/// Placement of one rank's block inside the global interior grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSubdomain {
    pub coords: [usize; 2],
    pub dims: [usize; 2],
    pub global_nx: usize,
    pub global_ny: usize,
    pub nx: usize,
    pub ny: usize,
    /// Global interior index (0-based) of local interior cell `(1, _)`.
    pub offset_i: usize,
    /// Global interior index (0-based) of local interior cell `(_, 1)`.
    pub offset_j: usize,
}

/// Start and length of block `k` when `n` cells are split into `parts`
/// blocks whose sizes differ by at most one (larger blocks first).
pub fn block_range(n: usize, parts: usize, k: usize) -> (usize, usize) {
    let base = n / parts;
    let extra = n % parts;
    let len = base + usize::from(k < extra);
    let start = k * base + k.min(extra);
    (start, len)
}

impl RankSubdomain {
    pub fn new(
        global_nx: usize,
        global_ny: usize,
        dims: [usize; 2],
        coords: [usize; 2],
    ) -> Result<Self> {
        if dims[0] > global_nx || dims[1] > global_ny {
            return Err(Error::Config(format!(
                "cannot split a {global_nx}x{global_ny} grid over {}x{} ranks",
                dims[0], dims[1]
            )));
        }
        let (offset_i, nx) = block_range(global_nx, dims[0], coords[0]);
        let (offset_j, ny) = block_range(global_ny, dims[1], coords[1]);
        Ok(Self {
            coords,
            dims,
            global_nx,
            global_ny,
            nx,
            ny,
            offset_i,
            offset_j,
        })
    }

    /// Whether `side` lies on the edge of the physical domain.
    pub fn is_physical(&self, side: Side) -> bool {
        match side {
            Side::North => self.coords[0] == 0,
            Side::South => self.coords[0] + 1 == self.dims[0],
            Side::West => self.coords[1] == 0,
            Side::East => self.coords[1] + 1 == self.dims[1],
        }
    }

    /// Global padded index (walls at 0 and `global_nx + 1`) of local padded `i`.
    pub fn global_i(&self, i: usize) -> usize {
        self.offset_i + i
    }

    pub fn global_j(&self, j: usize) -> usize {
        self.offset_j + j
    }
}
