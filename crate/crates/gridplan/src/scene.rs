//! JSON scene graph of a world.
//!
//! The document schema lives in `docs/scene_graph.schema.json`.

use std::collections::BTreeMap;
use std::path::Path;

use gridplan_core::world::walls_coincide;
use gridplan_core::{Rect, RoomId, Segment, Side, World};
use serde::{Deserialize, Serialize};

use crate::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: usize,
    pub y: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeters {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallRecord {
    pub side: String,
    pub a: Point,
    pub b: Point,
    #[serde(rename = "type")]
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomRecord {
    pub id: u32,
    pub min: Point,
    pub max: Point,
    pub min_m: PointMeters,
    pub max_m: PointMeters,
    pub walls: Vec<WallRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoorRecord {
    pub id: u32,
    pub rooms: [u32; 2],
    pub walls: [String; 2],
    pub a: Point,
    pub b: Point,
    pub a_m: PointMeters,
    pub b_m: PointMeters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyRecord {
    pub rooms: [u32; 2],
    /// `door` when a door joins the rooms, `wall` when they only share a wall.
    pub via: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub format_version: u32,
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_posterior: Option<f64>,
    pub rooms: Vec<RoomRecord>,
    pub doors: Vec<DoorRecord>,
    pub adjacency: Vec<AdjacencyRecord>,
}

fn point(c: gridplan_core::CellIndex) -> Point {
    Point { x: c.x, y: c.y }
}

fn meters(c: gridplan_core::CellIndex, resolution: f64) -> PointMeters {
    let m = |v: usize| (v as f64 * resolution * 1e6).round() / 1e6;
    PointMeters { x: m(c.x), y: m(c.y) }
}

fn side_from_name(name: &str) -> Result<Side, Error> {
    Side::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown wall side {name:?}")))
}

/// Rooms joined by a door or by coinciding walls, each pair once, sorted.
pub fn adjacency(world: &World) -> Vec<AdjacencyRecord> {
    let mut pairs: BTreeMap<(u32, u32), &'static str> = BTreeMap::new();
    let rooms = world.rooms();
    for (i, a) in rooms.iter().enumerate() {
        for b in &rooms[i + 1..] {
            if Side::ALL.iter().any(|&s| walls_coincide(&a.rect, s, &b.rect)) {
                pairs.insert((a.id.0.min(b.id.0), a.id.0.max(b.id.0)), "wall");
            }
        }
    }
    for d in world.doors() {
        let (a, b) = (d.rooms.0 .0, d.rooms.1 .0);
        pairs.insert((a.min(b), a.max(b)), "door");
    }
    pairs
        .into_iter()
        .map(|((a, b), via)| AdjacencyRecord {
            rooms: [a, b],
            via: via.to_string(),
        })
        .collect()
}

/// Scene graph of `world` on a `width` x `height` map. Wall types are
/// recomputed from the world's geometry.
pub fn scene_graph(
    world: &World,
    width: usize,
    height: usize,
    resolution: f64,
    log_posterior: Option<f64>,
) -> SceneGraph {
    let world = gridplan_core::world::wall_types(world);
    let rooms = world
        .rooms()
        .iter()
        .map(|r| RoomRecord {
            id: r.id.0,
            min: point(r.rect.min()),
            max: point(r.rect.max()),
            min_m: meters(r.rect.min(), resolution),
            max_m: meters(r.rect.max(), resolution),
            walls: Side::ALL
                .iter()
                .map(|&s| {
                    let w = r.wall(s);
                    WallRecord {
                        side: s.name().to_string(),
                        a: point(w.segment.a()),
                        b: point(w.segment.b()),
                        kind: w.kind.name().to_string(),
                    }
                })
                .collect(),
        })
        .collect();
    let doors = world
        .doors()
        .iter()
        .map(|d| DoorRecord {
            id: d.id.0,
            rooms: [d.rooms.0 .0, d.rooms.1 .0],
            walls: [d.walls.0.name().to_string(), d.walls.1.name().to_string()],
            a: point(d.span.a()),
            b: point(d.span.b()),
            a_m: meters(d.span.a(), resolution),
            b_m: meters(d.span.b(), resolution),
        })
        .collect();
    SceneGraph {
        format_version: FORMAT_VERSION,
        width,
        height,
        resolution,
        log_posterior,
        rooms,
        doors,
        adjacency: adjacency(&world),
    }
}

/// Rebuilds the world described by a scene graph.
pub fn world_from_scene(scene: &SceneGraph) -> Result<World, Error> {
    let mut world = World::new();
    for r in &scene.rooms {
        let rect = Rect::from_corners(r.min.x, r.min.y, r.max.x, r.max.y)?;
        world.insert_room(RoomId(r.id), rect)?;
    }
    let mut doors: Vec<&DoorRecord> = scene.doors.iter().collect();
    doors.sort_by_key(|d| d.id);
    for d in doors {
        let span = Segment::new(
            gridplan_core::CellIndex::new(d.a.x, d.a.y),
            gridplan_core::CellIndex::new(d.b.x, d.b.y),
        )?;
        let (lo, hi) = span.range();
        world.add_door(
            RoomId(d.rooms[0]),
            side_from_name(&d.walls[0])?,
            RoomId(d.rooms[1]),
            side_from_name(&d.walls[1])?,
            lo,
            hi,
            1.0,
        )?;
    }
    world.validate(scene.width, scene.height)?;
    world.refresh_wall_types();
    Ok(world)
}

pub fn to_json(scene: &SceneGraph) -> String {
    let mut s = serde_json::to_string_pretty(scene).expect("scene graph serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<SceneGraph, Error> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid scene graph: {e}")))
}

pub fn write_scene(scene: &SceneGraph, path: &Path) -> Result<(), Error> {
    std::fs::write(path, to_json(scene)).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rooms() -> World {
        let mut w = World::new();
        let a = w.add_room(Rect::from_corners(0, 0, 10, 8).unwrap());
        let b = w.add_room(Rect::from_corners(11, 0, 20, 8).unwrap());
        w.add_room(Rect::from_corners(30, 20, 40, 28).unwrap());
        w.add_door(a, Side::East, b, Side::West, 3, 6, 1.0).unwrap();
        w
    }

    #[test]
    fn adjacency_prefers_doors() {
        let mut w = two_rooms();
        assert_eq!(
            adjacency(&w),
            vec![AdjacencyRecord {
                rooms: [0, 1],
                via: "door".into()
            }]
        );
        let d = w.doors()[0].id;
        w.remove_door(d).unwrap();
        assert_eq!(
            adjacency(&w),
            vec![AdjacencyRecord {
                rooms: [0, 1],
                via: "wall".into()
            }]
        );
    }

    #[test]
    fn scene_round_trip() {
        let mut w = two_rooms();
        w.refresh_wall_types();
        let s = scene_graph(&w, 50, 40, 0.05, Some(-12.5));
        let back = from_json(&to_json(&s)).unwrap();
        assert_eq!(back, s);
        let w2 = world_from_scene(&back).unwrap();
        assert_eq!(w2.rooms(), w.rooms());
        assert_eq!(w2.doors().len(), 1);
        assert_eq!(w2.doors()[0].span, w.doors()[0].span);
    }

    #[test]
    fn wall_types_are_exported() {
        let s = scene_graph(&two_rooms(), 50, 40, 0.05, None);
        let kinds: Vec<&str> = s.rooms[0].walls.iter().map(|w| w.kind.as_str()).collect();
        assert_eq!(kinds, ["bwall", "dwall", "bwall", "bwall"]);
        assert_eq!(s.rooms[2].walls.iter().filter(|w| w.kind == "bwall").count(), 4);
        assert_eq!(s.rooms[0].max_m, PointMeters { x: 0.5, y: 0.4 });
    }
}
