//! Procedural single-floor scenes: rectangular rooms joined by L-shaped
//! corridors, with goal objects placed against room walls.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid};

use super::{ObjectInstance, Scene, Terrain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    /// Inclusive.
    pub room_count_range: (u32, u32),
    /// Room side length in meters, inclusive.
    pub room_size_range: (f64, f64),
    /// Meters.
    pub corridor_width: f64,
    pub categories: Vec<String>,
    /// Inclusive.
    pub instances_per_category_range: (u32, u32),
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 96,
            height: 96,
            resolution: 0.1,
            room_count_range: (3, 5),
            room_size_range: (2.0, 3.6),
            corridor_width: 0.8,
            categories: ["chair", "bed", "plant", "toilet", "tv", "sofa"].iter().map(|s| String::from(*s)).collect(),
            instances_per_category_range: (1, 2),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Room {
    c0: i32,
    r0: i32,
    c1: i32, // exclusive
    r1: i32, // exclusive
}

impl Room {
    fn center(&self) -> Cell {
        Cell::new((self.c0 + self.c1) / 2, (self.r0 + self.r1) / 2)
    }

    fn contains(&self, c: Cell) -> bool {
        c.col >= self.c0 && c.col < self.c1 && c.row >= self.r0 && c.row < self.r1
    }

    fn overlaps_padded(&self, o: &Room, pad: i32) -> bool {
        self.c0 - pad < o.c1 && o.c0 - pad < self.c1 && self.r0 - pad < o.r1 && o.r0 - pad < self.r1
    }
}

const MARGIN: i32 = 2;
const ROOM_GAP: i32 = 3;
const PLACEMENT_RETRIES: usize = 400;
const LAYOUT_RESTARTS: usize = 20;

/// Deterministic in `(seed, params)`.
pub fn generate_scene(seed: u64, params: &SceneParams) -> Result<Scene> {
    let res = params.resolution;
    let cells = |m: f64| -> i32 { crate::math::round(m / res) as i32 };
    let (min_side, max_side) = (cells(params.room_size_range.0), cells(params.room_size_range.1));
    let corridor = cells(params.corridor_width).max(1);
    let (w, h) = (params.width as i32, params.height as i32);
    if !(res > 0.0)
        || min_side < 4
        || max_side < min_side
        || params.room_count_range.0 == 0
        || params.room_count_range.1 < params.room_count_range.0
        || params.instances_per_category_range.1 < params.instances_per_category_range.0
        || min_side + 2 * MARGIN > w.min(h)
    {
        return Err(NavError::InvalidConfig("scene params inconsistent (rooms must fit the grid)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fail = |m: &str| NavError::GenerationFailed(format!("seed {seed}: {m}"));

    let target_rooms = rng.random_range(params.room_count_range.0..=params.room_count_range.1) as usize;
    let max_side = max_side.min(w.min(h) - 2 * MARGIN);
    let mut rooms: Vec<Room> = Vec::new();
    // random packing; start over a few times before giving up
    for _ in 0..LAYOUT_RESTARTS {
        rooms.clear();
        for _ in 0..PLACEMENT_RETRIES {
            if rooms.len() == target_rooms {
                break;
            }
            let rw = rng.random_range(min_side..=max_side);
            let rh = rng.random_range(min_side..=max_side);
            let c0 = rng.random_range(MARGIN..=w - MARGIN - rw);
            let r0 = rng.random_range(MARGIN..=h - MARGIN - rh);
            let room = Room { c0, r0, c1: c0 + rw, r1: r0 + rh };
            if rooms.iter().all(|o| !room.overlaps_padded(o, ROOM_GAP)) {
                rooms.push(room);
            }
        }
        if rooms.len() >= params.room_count_range.0 as usize {
            break;
        }
    }
    if rooms.len() < params.room_count_range.0 as usize {
        return Err(fail("could not fit the minimum room count"));
    }

    let mut terrain = Grid::new(params.width, params.height, Terrain::Obstacle);
    let carve = |g: &mut Grid<Terrain>, c0: i32, r0: i32, c1: i32, r1: i32| {
        for r in r0.max(1)..r1.min(h - 1) {
            for c in c0.max(1)..c1.min(w - 1) {
                *g.get_mut(Cell::new(c, r)).unwrap() = Terrain::Floor;
            }
        }
    };
    for room in &rooms {
        carve(&mut terrain, room.c0, room.r0, room.c1, room.r1);
    }
    // spanning tree: each room joins its nearest earlier room
    for i in 1..rooms.len() {
        let a = rooms[i].center();
        let j = (0..i)
            .min_by_key(|&j| {
                let b = rooms[j].center();
                ((a.col - b.col).pow(2) + (a.row - b.row).pow(2), j)
            })
            .unwrap();
        let b = rooms[j].center();
        let half = corridor / 2;
        let horizontal_first: bool = rng.random();
        let corner = if horizontal_first { Cell::new(b.col, a.row) } else { Cell::new(a.col, b.row) };
        for (p, q) in [(a, corner), (corner, b)] {
            let (c0, c1) = (p.col.min(q.col), p.col.max(q.col));
            let (r0, r1) = (p.row.min(q.row), p.row.max(q.row));
            carve(&mut terrain, c0 - half, r0 - half, c1 - half + corridor, r1 - half + corridor);
        }
    }
    if !floor_connected(&terrain, &[]) {
        return Err(fail("corridors left the floor disconnected"));
    }

    let mut objects: Vec<ObjectInstance> = Vec::new();
    let mut occupied: Vec<Cell> = Vec::new();
    for category in &params.categories {
        let n = rng.random_range(params.instances_per_category_range.0..=params.instances_per_category_range.1);
        for _ in 0..n {
            let mut placed = false;
            for _ in 0..PLACEMENT_RETRIES {
                let room = rooms[rng.random_range(0..rooms.len())];
                let Some(cells) = propose_object(&mut rng, &room) else { continue };
                if object_fits(&terrain, &room, &cells, &occupied) && floor_connected(&terrain, &cells) {
                    for &c in &cells {
                        *terrain.get_mut(c).unwrap() = Terrain::Obstacle;
                    }
                    occupied.extend_from_slice(&cells);
                    objects.push(ObjectInstance::new(category.clone(), cells, res));
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(fail(&format!("no room for a {category:?} instance")));
            }
        }
    }

    Scene::new(format!("scene_{seed}"), seed, res, terrain, objects)
}

/// A 2-4 x 2-3 cell block flush against one of the room's walls.
fn propose_object(rng: &mut ChaCha8Rng, room: &Room) -> Option<Vec<Cell>> {
    let along = rng.random_range(2..=4);
    let depth = rng.random_range(2..=3);
    let side = rng.random_range(0..4u8);
    let (rw, rh) = (room.c1 - room.c0, room.r1 - room.r0);
    let (cw, ch) = if side < 2 { (along, depth) } else { (depth, along) };
    if cw + 2 > rw || ch + 2 > rh {
        return None;
    }
    let (c0, r0) = match side {
        0 => (rng.random_range(room.c0..=room.c1 - cw), room.r0),      // bottom wall
        1 => (rng.random_range(room.c0..=room.c1 - cw), room.r1 - ch), // top wall
        2 => (room.c0, rng.random_range(room.r0..=room.r1 - ch)),      // left wall
        _ => (room.c1 - cw, rng.random_range(room.r0..=room.r1 - ch)), // right wall
    };
    let mut cells = Vec::with_capacity((cw * ch) as usize);
    for r in r0..r0 + ch {
        for c in c0..c0 + cw {
            cells.push(Cell::new(c, r));
        }
    }
    Some(cells)
}

/// Object cells must be floor, keep a one-cell gap to other objects, and stay
/// three cells clear of corridor mouths.
fn object_fits(terrain: &Grid<Terrain>, room: &Room, cells: &[Cell], occupied: &[Cell]) -> bool {
    for &c in cells {
        if terrain.get(c) != Some(&Terrain::Floor) {
            return false;
        }
        for dr in -3..=3 {
            for dc in -3..=3 {
                let n = c.offset(dc, dr);
                let near = dc.abs() <= 2 && dr.abs() <= 2;
                if near && occupied.contains(&n) {
                    return false;
                }
                if !room.contains(n) && terrain.get(n) == Some(&Terrain::Floor) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether all floor cells (minus `blocked`) form one 8-connected component.
pub(crate) fn floor_connected(terrain: &Grid<Terrain>, blocked: &[Cell]) -> bool {
    let is_floor = |c: Cell| terrain.get(c) == Some(&Terrain::Floor) && !blocked.contains(&c);
    let Some(start) = terrain.cells().find(|&c| is_floor(c)) else { return false };
    let total = terrain.cells().filter(|&c| is_floor(c)).count();
    let mut seen = vec![false; terrain.len()];
    let mut queue = VecDeque::from([start]);
    seen[terrain.index(start).unwrap()] = true;
    let mut count = 0;
    while let Some(c) = queue.pop_front() {
        count += 1;
        for n in c.neighbors8() {
            if is_floor(n) {
                let i = terrain.index(n).unwrap();
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    count == total
}
