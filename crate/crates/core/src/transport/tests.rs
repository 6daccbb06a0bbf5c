use std::sync::mpsc;
use std::time::Duration;

use super::*;
use crate::grid::{GridField, RankSubdomain, Side};
use crate::portability::Layout;

#[test]
fn singleton_ring_runs_once() {
    let out = spawn_ranks(1, TopologyKind::Ring1D, |comm| {
        assert_eq!(comm.neighbor(0, 1), Some(comm.rank()));
        assert_eq!(comm.neighbor(0, -1), Some(comm.rank()));
        Ok(comm.rank().0)
    })
    .unwrap();
    assert_eq!(out, vec![0]);
}

#[test]
fn grid_ranks_see_row_major_coords() {
    let out = spawn_ranks(4, TopologyKind::Grid2D, |comm| Ok(comm.coords())).unwrap();
    assert_eq!(out, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
}

#[test]
fn pairwise_swap() {
    let out = spawn_ranks(2, TopologyKind::Ring1D, |comm| {
        let me = comm.rank().0;
        let send = if me == 0 { [1.0, 2.0] } else { [3.0, 4.0] };
        let other = RankId(1 - me);
        let mut recv = [0.0; 2];
        comm.sendrecv(other, &send, other, &mut recv, 7)?;
        Ok(recv)
    })
    .unwrap();
    assert_eq!(out, vec![[3.0, 4.0], [1.0, 2.0]]);
}

#[test]
fn self_send_is_loopback() {
    let out = spawn_ranks(1, TopologyKind::Ring1D, |comm| {
        let mut recv = [0.0; 3];
        comm.sendrecv(RankId(0), &[5.0, 6.0, 7.0], RankId(0), &mut recv, 1)?;
        Ok(recv)
    })
    .unwrap();
    assert_eq!(out, vec![[5.0, 6.0, 7.0]]);
}

#[test]
fn ring_rotation_delivers_left_neighbor() {
    let out = spawn_ranks(4, TopologyKind::Ring1D, |comm| {
        let mut buf = [comm.rank().0 as f64];
        ring_shift(comm, &mut buf)?;
        Ok(buf[0] as usize)
    })
    .unwrap();
    assert_eq!(out, vec![3, 0, 1, 2]);
}

#[test]
fn ring_visits_every_other_rank_once() {
    let out = spawn_ranks(4, TopologyKind::Ring1D, |comm| {
        let mut buf = [comm.rank().0 as f64];
        let mut seen = Vec::new();
        for _ in 0..3 {
            ring_shift(comm, &mut buf)?;
            seen.push(buf[0] as usize);
        }
        Ok(seen)
    })
    .unwrap();
    for (r, seen) in out.iter().enumerate() {
        let mut sorted = seen.clone();
        sorted.sort();
        let expected: Vec<_> = (0..4).filter(|&q| q != r).collect();
        assert_eq!(sorted, expected, "rank {r} saw {seen:?}");
    }
}

#[test]
fn ring_periodicity_and_conservation() {
    for n in 1..=7 {
        let out = spawn_ranks(n, TopologyKind::Ring1D, |comm| {
            let original: Vec<f64> = (0..5).map(|k| (comm.rank().0 * 10 + k) as f64).collect();
            let mut buf = original.clone();
            let mut after_one = Vec::new();
            for step in 0..comm.size() {
                ring_shift(comm, &mut buf)?;
                if step == 0 {
                    after_one = buf.clone();
                }
            }
            Ok((original, after_one, buf))
        })
        .unwrap();
        let mut before: Vec<_> = out.iter().map(|(o, _, _)| o.clone()).collect();
        let mut shifted: Vec<_> = out.iter().map(|(_, s, _)| s.clone()).collect();
        before.sort_by(|a, b| a.partial_cmp(b).unwrap());
        shifted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(before, shifted);
        for (original, _, full_cycle) in &out {
            assert_eq!(original, full_cycle);
        }
    }
}

#[test]
fn ring_shift_rejects_unequal_lengths() {
    let err = spawn_ranks(3, TopologyKind::Ring1D, |comm| {
        let mut buf = vec![1.0; 2 + usize::from(comm.rank().0 == 1)];
        ring_shift(comm, &mut buf)
    })
    .unwrap_err();
    match err {
        crate::Error::Transport(TransportError::LengthMismatch { .. }) => {}
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn mismatch_error_names_both_ranks_and_tag() {
    let err = spawn_ranks(2, TopologyKind::Ring1D, |comm| {
        let me = comm.rank().0;
        let other = RankId(1 - me);
        let send = vec![0.0; 2 + me];
        let mut recv = vec![0.0; 2 + me];
        comm.sendrecv(other, &send, other, &mut recv, 42)?;
        Ok(())
    })
    .unwrap_err();
    let text = err.to_string();
    assert!(text.contains("tag 42"), "{text}");
    assert!(text.contains("rank 0") && text.contains("rank 1"), "{text}");
}

#[test]
fn panicking_rank_releases_the_others() {
    let err = spawn_ranks(3, TopologyKind::Ring1D, |comm| {
        if comm.rank().0 == 2 {
            panic!("boom");
        }
        comm.recv(RankId(2), 3)?;
        Ok(())
    })
    .unwrap_err();
    match err {
        crate::Error::RankPanicked { rank, message } => {
            assert_eq!(rank, 2);
            assert_eq!(message, "boom");
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn collectives_combine_in_rank_order() {
    let out = spawn_ranks(5, TopologyKind::Ring1D, |comm| {
        let r = comm.rank().0 as f64;
        let sum = comm.allreduce(r, ReduceOp::Sum)?;
        let max = comm.allreduce(r, ReduceOp::Max)?;
        let min = comm.allreduce(r, ReduceOp::Min)?;
        let all = comm.allgather(&[r, r * r])?;
        comm.barrier()?;
        Ok((sum, max, min, all))
    })
    .unwrap();
    for (sum, max, min, all) in out {
        assert_eq!((sum, max, min), (10.0, 4.0, 0.0));
        assert_eq!(all.len(), 5);
        assert_eq!(all[3], vec![3.0, 9.0]);
    }
}

#[test]
fn exchanges_complete_for_all_small_topologies() {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for n in 1..=16 {
            spawn_ranks(n, TopologyKind::Ring1D, |comm| {
                let mut buf = vec![comm.rank().0 as f64; 4];
                for _ in 0..comm.size() {
                    ring_shift(comm, &mut buf)?;
                }
                Ok(())
            })
            .unwrap();
            spawn_ranks(n, TopologyKind::Grid2D, |comm| {
                let dims = comm.topology().dims();
                let sub = RankSubdomain::new(16, 16, [dims[0], dims[1]], {
                    let c = comm.coords();
                    [c[0], c[1]]
                })?;
                let mut f = GridField::filled(sub.nx, sub.ny, Layout::RowMajor, 1.0);
                halo_exchange(comm, &mut f)?;
                halo_exchange(comm, &mut f)?;
                Ok(())
            })
            .unwrap();
        }
        tx.send(()).unwrap();
    });
    rx.recv_timeout(Duration::from_secs(30))
        .expect("exchange pattern did not complete in time");
}

#[test]
fn single_rank_halo_exchange_is_noop() {
    let out = spawn_ranks(1, TopologyKind::Grid2D, |comm| {
        let mut f = GridField::zeros(4, 4, Layout::RowMajor);
        f.fill_interior(|i, j| (i * 7 + j) as f64);
        let before = f.clone();
        halo_exchange(comm, &mut f)?;
        Ok(before == f)
    })
    .unwrap();
    assert_eq!(out, vec![true]);
}

#[test]
fn two_by_two_rank_id_fill() {
    let out = spawn_ranks(4, TopologyKind::Grid2D, |comm| {
        let mut f = GridField::filled(3, 3, Layout::RowMajor, -1.0);
        let id = comm.rank().0 as f64;
        f.fill_interior(|_, _| id);
        halo_exchange(comm, &mut f)?;
        Ok(f)
    })
    .unwrap();
    let rank0 = &out[0];
    assert_eq!(rank0.halo_strip(Side::East), vec![1.0; 3]);
    assert_eq!(rank0.halo_strip(Side::South), vec![2.0; 3]);
    assert_eq!(rank0.halo_strip(Side::North), vec![-1.0; 3]);
    assert_eq!(rank0.halo_strip(Side::West), vec![-1.0; 3]);
    assert_eq!(rank0.get(4, 4), -1.0, "corners are not exchanged");
    assert_eq!(out[3].halo_strip(Side::North), vec![1.0; 3]);
    assert_eq!(out[3].halo_strip(Side::West), vec![2.0; 3]);
}

#[test]
fn decomposed_halos_match_global_field() {
    use rand::{Rng, SeedableRng};
    let (nx, ny) = (16, 16);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let global: Vec<Vec<f64>> = (0..nx + 2)
        .map(|_| (0..ny + 2).map(|_| rng.random()).collect())
        .collect();
    let topo = CartTopology::with_dims(TopologyKind::Grid2D, vec![2, 2]).unwrap();
    let out = spawn_ranks_with(topo, |comm| {
        let c = comm.coords();
        let sub = RankSubdomain::new(nx, ny, [2, 2], [c[0], c[1]])?;
        let mut f = GridField::filled(sub.nx, sub.ny, Layout::ColMajor, f64::NAN);
        f.fill_interior(|i, j| global[sub.global_i(i)][sub.global_j(j)]);
        halo_exchange(comm, &mut f)?;
        Ok((sub, f))
    })
    .unwrap();
    for (sub, f) in &out {
        for side in Side::ALL {
            let halo = f.halo_strip(side);
            if sub.is_physical(side) {
                assert!(halo.iter().all(|v| v.is_nan()));
                continue;
            }
            let expected: Vec<f64> = match side {
                Side::North => (1..=sub.ny).map(|j| global[sub.global_i(0)][sub.global_j(j)]).collect(),
                Side::South => (1..=sub.ny)
                    .map(|j| global[sub.global_i(sub.nx + 1)][sub.global_j(j)])
                    .collect(),
                Side::West => (1..=sub.nx).map(|i| global[sub.global_i(i)][sub.global_j(0)]).collect(),
                Side::East => (1..=sub.nx)
                    .map(|i| global[sub.global_i(i)][sub.global_j(sub.ny + 1)])
                    .collect(),
            };
            assert_eq!(halo, expected);
        }
    }
}

#[test]
fn halo_dimension_mismatch_is_reported() {
    let topo = CartTopology::with_dims(TopologyKind::Grid2D, vec![1, 2]).unwrap();
    let err = spawn_ranks_with(topo, |comm| {
        let nx = 3 + comm.rank().0;
        let mut f = GridField::zeros(nx, 3, Layout::RowMajor);
        halo_exchange(comm, &mut f)
    })
    .unwrap_err();
    assert!(matches!(
        err,
        crate::Error::Transport(TransportError::LengthMismatch { .. })
    ));
}
