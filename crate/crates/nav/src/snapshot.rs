//! Debug renderings of the belief map: plain PPM images and ASCII.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use frontier_nav_core::mapping::{Frontier, Occupancy, OccupancyGrid};
use frontier_nav_core::Cell;

use crate::NavIoError;

const UNKNOWN: [u8; 3] = [128, 128, 128];
const FREE: [u8; 3] = [255, 255, 255];
const OBSTACLE: [u8; 3] = [0, 0, 0];

/// A distinct, saturated color per frontier id.
pub fn frontier_color(id: u32) -> [u8; 3] {
    const PALETTE: [[u8; 3]; 8] =
        [[230, 25, 75], [60, 180, 75], [0, 130, 200], [245, 130, 48], [145, 30, 180], [70, 240, 240], [240, 50, 230], [210, 245, 60]];
    PALETTE[id as usize % PALETTE.len()]
}

fn color_at(grid: &OccupancyGrid, frontiers: &[Frontier], c: Cell) -> [u8; 3] {
    if let Some(f) = frontiers.iter().find(|f| f.contains(c)) {
        return frontier_color(f.id);
    }
    match grid.get(c) {
        Some(Occupancy::Free) => FREE,
        Some(Occupancy::Obstacle) => OBSTACLE,
        _ => UNKNOWN,
    }
}

/// Plain (P3) PPM with row 0 at the bottom, so +y points up.
pub fn render_ppm(grid: &OccupancyGrid, frontiers: &[Frontier]) -> String {
    let (w, h) = (grid.cells().width(), grid.cells().height());
    let mut out = format!("P3\n{w} {h}\n255\n");
    for row in (0..h as i32).rev() {
        let line: Vec<String> = (0..w as i32)
            .map(|col| {
                let [r, g, b] = color_at(grid, frontiers, Cell::new(col, row));
                format!("{r} {g} {b}")
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// `?` unknown, `.` free, `#` obstacle, frontier cells as the last digit of
/// their id, `@` the agent.
pub fn render_ascii(grid: &OccupancyGrid, frontiers: &[Frontier], agent: Option<Cell>) -> String {
    let (w, h) = (grid.cells().width(), grid.cells().height());
    let mut out = String::with_capacity((w + 1) * h);
    for row in (0..h as i32).rev() {
        for col in 0..w as i32 {
            let c = Cell::new(col, row);
            let ch = if Some(c) == agent {
                '@'
            } else if let Some(f) = frontiers.iter().find(|f| f.contains(c)) {
                char::from_digit(f.id % 10, 10).unwrap()
            } else {
                match grid.get(c) {
                    Some(Occupancy::Free) => '.',
                    Some(Occupancy::Obstacle) => '#',
                    _ => '?',
                }
            };
            out.push(ch);
        }
        let _ = writeln!(out);
    }
    out
}

pub fn snapshot_path(dir: &Path, episode_id: &str, step: u32) -> PathBuf {
    dir.join(format!("{episode_id}_{step:04}.ppm"))
}

pub fn write_snapshot(dir: &Path, episode_id: &str, step: u32, grid: &OccupancyGrid, frontiers: &[Frontier]) -> Result<PathBuf, NavIoError> {
    std::fs::create_dir_all(dir).map_err(|e| NavIoError::io(dir, e))?;
    let path = snapshot_path(dir, episode_id, step);
    std::fs::write(&path, render_ppm(grid, frontiers)).map_err(|e| NavIoError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use frontier_nav_core::mapping::extract_frontiers;

    fn half_known() -> OccupancyGrid {
        let mut g = OccupancyGrid::new(4, 3, 0.1);
        for r in 0..3 {
            g.set(Cell::new(0, r), Occupancy::Obstacle);
            g.set(Cell::new(1, r), Occupancy::Free);
        }
        g
    }

    #[test]
    fn ppm_header_and_colors() {
        let g = half_known();
        let fs = extract_frontiers(&g, 1);
        let ppm = render_ppm(&g, &fs);
        let mut lines = ppm.lines();
        assert_eq!(lines.next(), Some("P3"));
        assert_eq!(lines.next(), Some("4 3"));
        assert_eq!(lines.next(), Some("255"));
        let [r, gg, b] = frontier_color(fs[0].id);
        assert_eq!(lines.next(), Some(format!("0 0 0 {r} {gg} {b} 128 128 128 128 128 128").as_str()));
    }

    #[test]
    fn ascii_and_naming() {
        let g = half_known();
        let fs = extract_frontiers(&g, 1);
        assert_eq!(render_ascii(&g, &fs, Some(Cell::new(1, 0))), "#0??\n#0??\n#@??\n");
        assert_eq!(snapshot_path(Path::new("d"), "scene_1_ep2", 7), Path::new("d/scene_1_ep2_0007.ppm"));
    }
}
