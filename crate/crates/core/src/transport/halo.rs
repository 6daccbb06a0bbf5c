use super::{Comm, TopologyKind};
use crate::grid::{GridField, Side};
use crate::{Error, Result};

const TAG_HALO: u32 = 16;

fn travel_tag(direction: Side) -> u32 {
    TAG_HALO + direction.index() as u32
}

/// Fills every neighbor-facing halo strip of `field` with the adjacent
/// rank's boundary cells. Strips on physical edges and corner cells are left
/// untouched.
pub fn halo_exchange(comm: &Comm, field: &mut GridField) -> Result<()> {
    if comm.topology().kind() != TopologyKind::Grid2D {
        return Err(Error::Config("halo_exchange needs a Grid2D communicator".into()));
    }
    let neighbors: Vec<_> = Side::ALL
        .iter()
        .filter_map(|&side| {
            comm.neighbor(side.axis(), side.displacement())
                .map(|rank| (side, rank))
        })
        .collect();
    for &(side, rank) in &neighbors {
        comm.send(rank, travel_tag(side), field.boundary_strip(side))?;
    }
    for &(side, rank) in &neighbors {
        let mut strip = vec![0.0; field.strip_len(side)];
        // The neighbor on `side` sent toward us, i.e. in the opposite direction.
        comm.recv_into(rank, travel_tag(side.opposite()), &mut strip)?;
        field.set_halo_strip(side, &strip);
    }
    Ok(())
}
