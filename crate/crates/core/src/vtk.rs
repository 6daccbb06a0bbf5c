//! Legacy ASCII VTK output, one file per rank.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::grid::{VorticityConfig, VorticityRank};
use crate::nbody::ParticleSet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Unconnected points, written as POLYDATA with one vertex per point.
    PointCloud { points: Vec<[f64; 3]> },
    /// Uniform lattice; point data is ordered with x fastest.
    StructuredPoints {
        dims: [usize; 3],
        origin: [f64; 3],
        spacing: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VtkDataset {
    pub title: String,
    pub geometry: Geometry,
    pub scalars: Vec<(String, Vec<f64>)>,
    pub vectors: Vec<(String, Vec<[f64; 3]>)>,
}

impl VtkDataset {
    pub fn num_points(&self) -> usize {
        match &self.geometry {
            Geometry::PointCloud { points } => points.len(),
            Geometry::StructuredPoints { dims, .. } => dims.iter().product(),
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.num_points();
        let bad = self
            .scalars
            .iter()
            .map(|(name, v)| (name, v.len()))
            .chain(self.vectors.iter().map(|(name, v)| (name, v.len())))
            .find(|(_, len)| *len != n);
        match bad {
            Some((name, len)) => Err(Error::Config(format!(
                "VTK array {name} has {len} values for {n} points"
            ))),
            None => Ok(()),
        }
    }

    /// The file contents.
    pub fn render(&self) -> Result<String> {
        self.check()?;
        let n = self.num_points();
        let mut s = String::new();
        s.push_str("# vtk DataFile Version 3.0\n");
        // The title line must not contain a newline.
        s.push_str(&self.title.replace('\n', " "));
        s.push_str("\nASCII\n");
        match &self.geometry {
            Geometry::PointCloud { points } => {
                s.push_str("DATASET POLYDATA\n");
                writeln!(s, "POINTS {n} double").unwrap();
                for p in points {
                    writeln!(s, "{} {} {}", p[0], p[1], p[2]).unwrap();
                }
                writeln!(s, "VERTICES {n} {}", 2 * n).unwrap();
                for i in 0..n {
                    writeln!(s, "1 {i}").unwrap();
                }
            }
            Geometry::StructuredPoints { dims, origin, spacing } => {
                s.push_str("DATASET STRUCTURED_POINTS\n");
                writeln!(s, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]).unwrap();
                writeln!(s, "ORIGIN {} {} {}", origin[0], origin[1], origin[2]).unwrap();
                writeln!(s, "SPACING {} {} {}", spacing[0], spacing[1], spacing[2]).unwrap();
            }
        }
        writeln!(s, "POINT_DATA {n}").unwrap();
        for (name, values) in &self.scalars {
            writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
            for v in values {
                writeln!(s, "{v}").unwrap();
            }
        }
        for (name, values) in &self.vectors {
            writeln!(s, "VECTORS {name} double").unwrap();
            for v in values {
                writeln!(s, "{} {} {}", v[0], v[1], v[2]).unwrap();
            }
        }
        Ok(s)
    }
}

/// `<app>_rank<r>_step<s>.vtk`
pub fn vtk_file_name(app: &str, rank: usize, step: usize) -> String {
    format!("{app}_rank{rank}_step{step}.vtk")
}

/// Writes `dataset` into `dir` (created if missing) and returns the path.
pub fn write_vtk(dataset: &VtkDataset, app: &str, rank: usize, step: usize, dir: &Path) -> Result<PathBuf> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(vtk_file_name(app, rank, step));
    fs::write(&path, dataset.render()?).map_err(io(&path))?;
    Ok(path)
}

/// Positions with `mass` scalars and `velocity` vectors.
pub fn nbody_dataset(particles: &ParticleSet, rank: usize, step: usize) -> VtkDataset {
    let n = particles.len();
    VtkDataset {
        title: format!("nbody rank {rank} step {step}"),
        geometry: Geometry::PointCloud {
            points: (0..n).map(|i| particles.position(i)).collect(),
        },
        scalars: vec![("mass".into(), (0..n).map(|i| particles.mass(i)).collect())],
        vectors: vec![("velocity".into(), (0..n).map(|i| particles.velocity(i)).collect())],
    }
}

/// This rank's interior cells as structured points with `psi`, `omega`
/// scalars and `velocity = (u, v, 0)`.
pub fn vorticity_dataset(state: &VorticityRank, config: &VorticityConfig) -> VtkDataset {
    let sub = &state.sub;
    let (h_x, h_y) = (config.h_x(), config.h_y());
    let cells: Vec<(usize, usize)> = (1..=sub.ny)
        .flat_map(|j| (1..=sub.nx).map(move |i| (i, j)))
        .collect();
    let pick = |f: &crate::grid::GridField| cells.iter().map(|&(i, j)| f.get(i, j)).collect::<Vec<_>>();
    VtkDataset {
        title: format!("vorticity rank coords {:?} step {}", sub.coords, state.steps_done),
        geometry: Geometry::StructuredPoints {
            dims: [sub.nx, sub.ny, 1],
            origin: [sub.global_i(1) as f64 * h_x, sub.global_j(1) as f64 * h_y, 0.0],
            spacing: [h_x, h_y, 1.0],
        },
        scalars: vec![("psi".into(), pick(&state.psi)), ("omega".into(), pick(&state.omega))],
        vectors: vec![(
            "velocity".into(),
            cells
                .iter()
                .map(|&(i, j)| [state.u.get(i, j), state.v.get(i, j), 0.0])
                .collect(),
        )],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud() -> VtkDataset {
        VtkDataset {
            title: "t".into(),
            geometry: Geometry::PointCloud {
                points: vec![[0.0, 0.0, 0.0], [1.5, -2.0, 0.1]],
            },
            scalars: vec![("mass".into(), vec![1.0, 2.0])],
            vectors: vec![("velocity".into(), vec![[0.0; 3], [1.0, 2.0, 3.0]])],
        }
    }

    #[test]
    fn point_cloud_text() {
        let text = cloud().render().unwrap();
        let expected = "# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n\
            POINTS 2 double\n0 0 0\n1.5 -2 0.1\nVERTICES 2 4\n1 0\n1 1\n\
            POINT_DATA 2\nSCALARS mass double 1\nLOOKUP_TABLE default\n1\n2\n\
            VECTORS velocity double\n0 0 0\n1 2 3\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn structured_points_header() {
        let d = VtkDataset {
            title: "g".into(),
            geometry: Geometry::StructuredPoints {
                dims: [2, 3, 1],
                origin: [0.25, 0.5, 0.0],
                spacing: [0.25, 0.25, 1.0],
            },
            scalars: vec![("psi".into(), vec![0.0; 6])],
            vectors: vec![],
        };
        let text = d.render().unwrap();
        assert!(text.contains("DATASET STRUCTURED_POINTS\nDIMENSIONS 2 3 1\nORIGIN 0.25 0.5 0\nSPACING 0.25 0.25 1\nPOINT_DATA 6\n"));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut d = cloud();
        d.scalars[0].1.pop();
        assert!(d.render().is_err());
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1 + 0.2;
        let mut d = cloud();
        d.scalars[0].1[1] = x;
        let text = d.render().unwrap();
        let line = text.lines().find(|l| l.starts_with("0.3")).unwrap();
        assert_eq!(line.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn writes_named_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_vtk(&cloud(), "nbody", 3, 100, &dir.path().join("out")).unwrap();
        assert_eq!(path.file_name().unwrap(), "nbody_rank3_step100.vtk");
        assert!(std::fs::read_to_string(path).unwrap().starts_with("# vtk DataFile Version 3.0\n"));
    }
}
