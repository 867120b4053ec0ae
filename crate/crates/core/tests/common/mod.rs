#![allow(dead_code)]

use manhattan::profile::PreferenceProfile;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Integer placement found by [`grid_embedding`]: voters then alternatives.
pub type GridEmbedding = (Vec<(i64, i64)>, Vec<(i64, i64)>);

fn dist(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

/// Ranking of `alts` (indices into `pos`) seen from `v`, or `None` on a tie.
fn ranking(v: (i64, i64), pos: &[(i64, i64)], alts: &[usize]) -> Option<Vec<usize>> {
    let mut d: Vec<(i64, usize)> = alts.iter().map(|&a| (dist(v, pos[a]), a)).collect();
    d.sort();
    if d.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    Some(d.into_iter().map(|(_, a)| a).collect())
}

/// Exhaustive search for an embedding with every point on the integer grid
/// `[0, r]^2`, using plain integer arithmetic. Alternatives are placed one at
/// a time; a partial placement survives only if every voter's ranking
/// restricted to the placed alternatives is realised strictly at some grid
/// point. Grid points are visited in a fixed shuffled order so that generic
/// placements come up early.
pub fn grid_embedding(p: &PreferenceProfile, r: i64) -> Option<GridEmbedding> {
    let mut grid: Vec<(i64, i64)> = (0..=r).flat_map(|x| (0..=r).map(move |y| (x, y))).collect();
    grid.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
    // rankings as 0-based alternative lists
    let wanted: Vec<Vec<usize>> = p.orders().iter().map(|o| o.iter().map(|a| a - 1).collect()).collect();
    let mut pos = vec![(0, 0); p.m()];
    if place(0, p.m(), &grid, &wanted, &mut pos) {
        let alts: Vec<usize> = (0..p.m()).collect();
        let voters = wanted
            .iter()
            .map(|w| *grid.iter().find(|&&g| ranking(g, &pos, &alts).as_ref() == Some(w)).unwrap())
            .collect();
        return Some((voters, pos));
    }
    None
}

fn place(k: usize, m: usize, grid: &[(i64, i64)], wanted: &[Vec<usize>], pos: &mut Vec<(i64, i64)>) -> bool {
    if k == m {
        return true;
    }
    let placed: Vec<usize> = (0..=k).collect();
    let restricted: Vec<Vec<usize>> =
        wanted.iter().map(|w| w.iter().copied().filter(|&a| a <= k).collect()).collect();
    for &g in grid {
        if pos[..k].contains(&g) {
            continue;
        }
        pos[k] = g;
        let ok = restricted
            .iter()
            .all(|w| grid.iter().any(|&v| ranking(v, pos, &placed).as_ref() == Some(w)));
        if ok && place(k + 1, m, grid, wanted, pos) {
            return true;
        }
    }
    false
}

/// Independent check of a grid embedding against the profile.
pub fn grid_embedding_is_valid(p: &PreferenceProfile, e: &GridEmbedding) -> bool {
    let alts: Vec<usize> = (0..p.m()).collect();
    p.orders().iter().zip(&e.0).all(|(o, &v)| {
        ranking(v, &e.1, &alts).is_some_and(|r| r.iter().map(|a| a + 1).eq(o.iter().copied()))
    })
}
