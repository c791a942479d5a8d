//! Scene files: JSON with a run-length-encoded terrain string.
//!
//! `cells` is row-major, each run written as `<count><F|O>`, e.g. `"3O2F1O"`.

use std::fmt::Write as _;
use std::path::Path;

use frontier_nav_core::world::{ObjectInstance, Scene, Terrain};
use frontier_nav_core::{Cell, Grid};
use serde::{Deserialize, Serialize};

use crate::NavIoError;

#[derive(Serialize, Deserialize)]
struct SceneFile {
    id: String,
    seed: u64,
    resolution: f64,
    width_cells: usize,
    height_cells: usize,
    cells: String,
    objects: Vec<ObjectFile>,
}

#[derive(Serialize, Deserialize)]
struct ObjectFile {
    category: String,
    cells: Vec<[i32; 2]>,
}

pub fn encode_cells(terrain: &Grid<Terrain>) -> String {
    let mut out = String::new();
    let mut run: Option<(char, usize)> = None;
    for t in terrain.as_slice() {
        let ch = match t {
            Terrain::Floor => 'F',
            Terrain::Obstacle => 'O',
        };
        run = match run {
            Some((c, n)) if c == ch => Some((c, n + 1)),
            Some((c, n)) => {
                let _ = write!(out, "{n}{c}");
                Some((ch, 1))
            }
            None => Some((ch, 1)),
        };
    }
    if let Some((c, n)) = run {
        let _ = write!(out, "{n}{c}");
    }
    out
}

pub fn decode_cells(s: &str, width: usize, height: usize) -> Result<Grid<Terrain>, NavIoError> {
    let bad = |m: &str| NavIoError::Format(format!("cells: {m}"));
    let mut v = Vec::with_capacity(width * height);
    let mut count = 0usize;
    let mut have_digits = false;
    for ch in s.chars() {
        if let Some(d) = ch.to_digit(10) {
            count = count.checked_mul(10).and_then(|c| c.checked_add(d as usize)).ok_or_else(|| bad("run too long"))?;
            have_digits = true;
            continue;
        }
        let t = match ch {
            'F' => Terrain::Floor,
            'O' => Terrain::Obstacle,
            _ => return Err(bad(&format!("unexpected {ch:?}"))),
        };
        if !have_digits || count == 0 {
            return Err(bad("run without a positive count"));
        }
        if v.len() + count > width * height {
            return Err(bad("more cells than width * height"));
        }
        v.extend(std::iter::repeat_n(t, count));
        count = 0;
        have_digits = false;
    }
    if have_digits || v.len() != width * height {
        return Err(bad("cell count does not match width * height"));
    }
    Ok(Grid::from_vec(width, height, v))
}

pub fn scene_to_json(scene: &Scene) -> String {
    let file = SceneFile {
        id: scene.id.clone(),
        seed: scene.seed,
        resolution: scene.resolution,
        width_cells: scene.width(),
        height_cells: scene.height(),
        cells: encode_cells(scene.terrain()),
        objects: scene
            .objects
            .iter()
            .map(|o| ObjectFile { category: o.category.clone(), cells: o.cells.iter().map(|c| [c.col, c.row]).collect() })
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("scene serializes");
    s.push('\n');
    s
}

pub fn scene_from_json(text: &str) -> Result<Scene, NavIoError> {
    let f: SceneFile = serde_json::from_str(text)?;
    let terrain = decode_cells(&f.cells, f.width_cells, f.height_cells)?;
    let objects = f
        .objects
        .into_iter()
        .map(|o| ObjectInstance::new(o.category, o.cells.into_iter().map(|[c, r]| Cell::new(c, r)).collect(), f.resolution))
        .collect();
    Ok(Scene::new(f.id, f.seed, f.resolution, terrain, objects)?)
}

pub fn write_scene(path: &Path, scene: &Scene) -> Result<(), NavIoError> {
    std::fs::write(path, scene_to_json(scene)).map_err(|e| NavIoError::io(path, e))
}

pub fn read_scene(path: &Path) -> Result<Scene, NavIoError> {
    let text = std::fs::read_to_string(path).map_err(|e| NavIoError::io(path, e))?;
    scene_from_json(&text)
}

/// Every `*.json` scene in `dir`, ordered by seed then id.
pub fn read_scene_dir(dir: &Path) -> Result<Vec<Scene>, NavIoError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| NavIoError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut scenes = paths.iter().map(|p| read_scene(p)).collect::<Result<Vec<_>, _>>()?;
    scenes.sort_by(|a, b| a.seed.cmp(&b.seed).then_with(|| a.id.cmp(&b.id)));
    Ok(scenes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use frontier_nav_core::world::{generate_scene, SceneParams};

    #[test]
    fn rle_round_trip() {
        let scene = generate_scene(42, &SceneParams::default()).unwrap();
        let text = scene_to_json(&scene);
        let back = scene_from_json(&text).unwrap();
        assert_eq!(back, scene);
        assert_eq!(scene_to_json(&back), text);
    }

    #[test]
    fn key_order_is_fixed() {
        let scene = generate_scene(1, &SceneParams::default()).unwrap();
        let text = scene_to_json(&scene);
        let keys = ["\"id\"", "\"seed\"", "\"resolution\"", "\"width_cells\"", "\"height_cells\"", "\"cells\"", "\"objects\""];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn malformed_runs_rejected() {
        assert!(decode_cells("3F", 2, 2).is_err());
        assert!(decode_cells("F3O", 2, 2).is_err());
        assert!(decode_cells("2F2X", 2, 2).is_err());
        assert_eq!(decode_cells("1O2F1O", 2, 2).unwrap().as_slice(), &[Terrain::Obstacle, Terrain::Floor, Terrain::Floor, Terrain::Obstacle]);
    }
}
