use std::fmt;

use crate::{Error, Result};

/// Rank number inside a communicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankId(pub usize);

impl RankId {
    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for RankId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    /// One periodic axis.
    Ring1D,
    /// Two non-periodic axes.
    Grid2D,
}

impl TopologyKind {
    pub fn axes(self) -> usize {
        match self {
            TopologyKind::Ring1D => 1,
            TopologyKind::Grid2D => 2,
        }
    }

    pub fn periodic(self) -> bool {
        matches!(self, TopologyKind::Ring1D)
    }
}

/// Balanced factorization of `n` ranks over `axes` axes.
///
/// Counts are as equal as possible and returned in non-increasing order.
pub fn dims_create(n: usize, axes: usize) -> Vec<usize> {
    assert!(n >= 1, "rank count must be positive");
    match axes {
        1 => vec![n],
        2 => {
            // Largest divisor not above sqrt(n) gives the most balanced pair.
            let mut small = (n as f64).sqrt() as usize;
            while small * small > n {
                small -= 1;
            }
            while (small + 1) * (small + 1) <= n {
                small += 1;
            }
            while !n.is_multiple_of(small) {
                small -= 1;
            }
            vec![n / small, small]
        }
        _ => panic!("only 1 or 2 axes are supported, got {axes}"),
    }
}

/// Cartesian arrangement of ranks, with row-major rank ordering over `dims`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartTopology {
    kind: TopologyKind,
    dims: Vec<usize>,
}

impl CartTopology {
    /// Topology for `n` ranks with balanced dimensions.
    pub fn new(kind: TopologyKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("rank count must be at least 1".into()));
        }
        Self::with_dims(kind, dims_create(n, kind.axes()))
    }

    pub fn with_dims(kind: TopologyKind, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != kind.axes() {
            return Err(Error::Config(format!(
                "{kind:?} needs {} dimension(s), got {}",
                kind.axes(),
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Config(format!("zero-sized dimension in {dims:?}")));
        }
        Ok(Self { kind, dims })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn coords(&self, rank: RankId) -> Vec<usize> {
        assert!(rank.0 < self.size());
        let mut rest = rank.0;
        let mut coords = vec![0; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            coords[axis] = rest % self.dims[axis];
            rest /= self.dims[axis];
        }
        coords
    }

    /// Rank at `coords`, wrapping periodic axes; `None` off a non-periodic edge.
    pub fn rank_of(&self, coords: &[isize]) -> Option<RankId> {
        assert_eq!(coords.len(), self.dims.len());
        let mut rank = 0;
        for (&c, &d) in coords.iter().zip(&self.dims) {
            let d = d as isize;
            let c = if self.kind.periodic() {
                c.rem_euclid(d)
            } else if (0..d).contains(&c) {
                c
            } else {
                return None;
            };
            rank = rank * d as usize + c as usize;
        }
        Some(RankId(rank))
    }

    /// Neighbor of `rank` displaced by `disp` along `axis`.
    pub fn shift(&self, rank: RankId, axis: usize, disp: isize) -> Option<RankId> {
        let mut coords: Vec<isize> = self.coords(rank).iter().map(|&c| c as isize).collect();
        coords[axis] += disp;
        self.rank_of(&coords)
    }
}
