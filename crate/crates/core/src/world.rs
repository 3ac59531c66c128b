//! The world hypothesis: rooms, their typed walls, and doors between rooms.

use alloc::vec::Vec;

use crate::geometry::{Axis, CellBox, Rect, Segment, Side};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoomId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoorId(pub u32);

/// Connectivity role of a wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WallType {
    /// Carries at least one door.
    DWall,
    /// Separates two rooms without a door.
    NWall,
    /// Bounds the world only.
    BWall,
}

impl WallType {
    pub fn name(self) -> &'static str {
        match self {
            WallType::DWall => "dwall",
            WallType::NWall => "nwall",
            WallType::BWall => "bwall",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wall {
    pub segment: Segment,
    pub kind: WallType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Room {
    pub id: RoomId,
    pub rect: Rect,
    /// Indexed by [`Side::index`].
    pub walls: [Wall; 4],
}

impl Room {
    pub fn new(id: RoomId, rect: Rect) -> Self {
        let walls = rect.walls().map(|segment| Wall {
            segment,
            kind: WallType::BWall,
        });
        Self { id, rect, walls }
    }

    pub fn wall(&self, side: Side) -> &Wall {
        &self.walls[side.index()]
    }
}

/// A door joining two rooms through facing walls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Door {
    pub id: DoorId,
    /// Opening on the first host wall.
    pub span: Segment,
    pub rooms: (RoomId, RoomId),
    pub walls: (Side, Side),
    opening: CellBox,
}

/// Largest distance between the lines of two walls that may share a door.
pub const WALL_ADJACENCY: usize = 1;

impl Door {
    /// Door on `side_a` of `a` and `side_b` of `b` covering `lo..=hi` along the walls.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: DoorId,
        a: &Room,
        side_a: Side,
        b: &Room,
        side_b: Side,
        lo: usize,
        hi: usize,
        min_len: f64,
    ) -> Result<Self, Error> {
        if a.id == b.id || side_a.axis() != side_b.axis() || lo >= hi {
            return Err(Error::DoorOffWall);
        }
        let span = Segment::on_line(side_a.axis(), a.rect.line(side_a), lo, hi)?;
        let door = Self {
            id,
            span,
            rooms: (a.id, b.id),
            walls: (side_a, side_b),
            opening: opening_box(span, b.rect.line(side_b)),
        };
        if !door.fits(a, b) {
            return Err(Error::DoorOffWall);
        }
        if span.length() < min_len {
            return Err(Error::DoorTooShort);
        }
        Ok(door)
    }

    /// Cells rasterized as doorway: the span on both host walls.
    pub fn opening(&self) -> CellBox {
        self.opening
    }

    pub fn touches(&self, room: RoomId) -> bool {
        self.rooms.0 == room || self.rooms.1 == room
    }

    /// Whether the span still lies on both host walls of `a` and `b`.
    pub fn fits(&self, a: &Room, b: &Room) -> bool {
        if a.id != self.rooms.0 || b.id != self.rooms.1 {
            return false;
        }
        let (sa, sb) = self.walls;
        let (lo, hi) = self.span.range();
        let line_a = a.rect.line(sa);
        let line_b = b.rect.line(sb);
        if self.span.line() != line_a || line_a.abs_diff(line_b) > WALL_ADJACENCY {
            return false;
        }
        let (alo, ahi) = a.rect.span(sa);
        let (blo, bhi) = b.rect.span(sb);
        lo >= alo && hi <= ahi && lo >= blo && hi <= bhi && self.opening == opening_box(self.span, line_b)
    }
}

fn opening_box(span: Segment, other_line: usize) -> CellBox {
    let (lo, hi) = span.range();
    let l0 = span.line().min(other_line);
    let l1 = span.line().max(other_line);
    match span.axis() {
        Axis::Horizontal => CellBox::new(lo, l0, hi, l1),
        Axis::Vertical => CellBox::new(l0, lo, l1, hi),
    }
}

/// A floor-plan hypothesis.
///
/// Rooms and doors are kept in creation order; ids are never reused within
/// one world's history.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct World {
    rooms: Vec<Room>,
    doors: Vec<Door>,
    next_room: u32,
    next_door: u32,
}

impl World {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn doors(&self) -> &[Door] {
        &self.doors
    }

    pub fn is_empty(&self) -> bool {
        self.rooms.is_empty()
    }

    pub fn room(&self, id: RoomId) -> Option<&Room> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn door(&self, id: DoorId) -> Option<&Door> {
        self.doors.iter().find(|d| d.id == id)
    }

    pub fn add_room(&mut self, rect: Rect) -> RoomId {
        let id = RoomId(self.next_room);
        self.next_room += 1;
        self.rooms.push(Room::new(id, rect));
        id
    }

    /// Inserts a room with a caller-chosen id (used when importing a world).
    pub fn insert_room(&mut self, id: RoomId, rect: Rect) -> Result<(), Error> {
        if self.room(id).is_some() {
            return Err(Error::InvalidSpec("duplicate room id"));
        }
        self.next_room = self.next_room.max(id.0 + 1);
        self.rooms.push(Room::new(id, rect));
        Ok(())
    }

    /// Removes a room and every door attached to it.
    pub fn remove_room(&mut self, id: RoomId) -> Result<Room, Error> {
        let pos = self
            .rooms
            .iter()
            .position(|r| r.id == id)
            .ok_or(Error::UnknownRoom(id.0))?;
        self.doors.retain(|d| !d.touches(id));
        Ok(self.rooms.remove(pos))
    }

    /// Changes a room's rectangle and drops doors that no longer fit.
    pub fn set_room_rect(&mut self, id: RoomId, rect: Rect) -> Result<(), Error> {
        let room = self
            .rooms
            .iter_mut()
            .find(|r| r.id == id)
            .ok_or(Error::UnknownRoom(id.0))?;
        *room = Room::new(id, rect);
        self.prune_doors();
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn add_door(
        &mut self,
        a: RoomId,
        side_a: Side,
        b: RoomId,
        side_b: Side,
        lo: usize,
        hi: usize,
        min_len: f64,
    ) -> Result<DoorId, Error> {
        let id = DoorId(self.next_door);
        let ra = self.room(a).ok_or(Error::UnknownRoom(a.0))?;
        let rb = self.room(b).ok_or(Error::UnknownRoom(b.0))?;
        let door = Door::new(id, ra, side_a, rb, side_b, lo, hi, min_len)?;
        self.next_door += 1;
        self.doors.push(door);
        Ok(id)
    }

    pub fn remove_door(&mut self, id: DoorId) -> Result<Door, Error> {
        let pos = self
            .doors
            .iter()
            .position(|d| d.id == id)
            .ok_or(Error::UnknownDoor(id.0))?;
        Ok(self.doors.remove(pos))
    }

    /// Drops doors whose span left one of its host walls.
    pub fn prune_doors(&mut self) {
        let rooms = &self.rooms;
        self.doors.retain(|d| {
            let a = rooms.iter().find(|r| r.id == d.rooms.0);
            let b = rooms.iter().find(|r| r.id == d.rooms.1);
            matches!((a, b), (Some(a), Some(b)) if d.fits(a, b))
        });
    }

    pub fn door_count(&self, room: RoomId) -> usize {
        self.doors.iter().filter(|d| d.touches(room)).count()
    }

    /// Checks every structural invariant against a grid of the given size.
    pub fn validate(&self, width: usize, height: usize) -> Result<(), Error> {
        for (i, r) in self.rooms.iter().enumerate() {
            if self.rooms[..i].iter().any(|o| o.id == r.id) {
                return Err(Error::InvalidSpec("duplicate room id"));
            }
            if !r.rect.fits(width, height) {
                return Err(Error::OutOfBounds { width, height });
            }
            if Side::ALL.iter().any(|&s| r.wall(s).segment != r.rect.wall(s)) {
                return Err(Error::InvalidSpec("room walls differ from its rectangle"));
            }
        }
        for d in &self.doors {
            let a = self.room(d.rooms.0).ok_or(Error::UnknownRoom(d.rooms.0 .0))?;
            let b = self.room(d.rooms.1).ok_or(Error::UnknownRoom(d.rooms.1 .0))?;
            if !d.fits(a, b) {
                return Err(Error::DoorOffWall);
            }
        }
        Ok(())
    }

    /// Recomputes every wall's [`WallType`].
    pub fn refresh_wall_types(&mut self) {
        let kinds: Vec<[WallType; 4]> = self
            .rooms
            .iter()
            .map(|room| {
                Side::ALL.map(|side| {
                    let has_door = self.doors.iter().any(|d| {
                        (d.rooms.0 == room.id && d.walls.0 == side) || (d.rooms.1 == room.id && d.walls.1 == side)
                    });
                    if has_door {
                        WallType::DWall
                    } else if self
                        .rooms
                        .iter()
                        .any(|other| other.id != room.id && walls_coincide(&room.rect, side, &other.rect))
                    {
                        WallType::NWall
                    } else {
                        WallType::BWall
                    }
                })
            })
            .collect();
        for (room, k) in self.rooms.iter_mut().zip(kinds) {
            for side in Side::ALL {
                room.walls[side.index()].kind = k[side.index()];
            }
        }
    }
}

/// Whether the wall on `side` of `r` runs along some parallel wall of `other`
/// within [`WALL_ADJACENCY`] cells, sharing at least one cell of extent.
pub fn walls_coincide(r: &Rect, side: Side, other: &Rect) -> bool {
    let line = r.line(side);
    let (lo, hi) = r.span(side);
    [side, side.opposite()].iter().any(|&os| {
        let (olo, ohi) = other.span(os);
        other.line(os).abs_diff(line) <= WALL_ADJACENCY && lo.max(olo) < hi.min(ohi)
    })
}

/// Returns `world` with all wall types recomputed.
pub fn wall_types(world: &World) -> World {
    let mut w = world.clone();
    w.refresh_wall_types();
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: usize, y0: usize, x1: usize, y1: usize) -> Rect {
        Rect::from_corners(x0, y0, x1, y1).unwrap()
    }

    fn kinds(w: &World, id: RoomId) -> [WallType; 4] {
        w.room(id).unwrap().walls.map(|wall| wall.kind)
    }

    use WallType::*;

    #[test]
    fn single_room_is_all_boundary() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let w = wall_types(&w);
        assert_eq!(kinds(&w, a), [BWall; 4]);
    }

    #[test]
    fn door_on_north_wall() {
        // The second room sits above so the door can join the two north/south walls.
        let mut w = World::new();
        let a = w.add_room(rect(0, 10, 20, 30));
        let b = w.add_room(rect(0, 0, 20, 10));
        w.add_door(a, Side::North, b, Side::South, 5, 9, 3.0).unwrap();
        let w = wall_types(&w);
        assert_eq!(kinds(&w, a), [DWall, BWall, BWall, BWall]);
        assert_eq!(kinds(&w, b), [BWall, BWall, DWall, BWall]);
    }

    #[test]
    fn shared_side_without_door_is_neighbor() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(10, 0, 20, 10));
        let w = wall_types(&w);
        assert_eq!(kinds(&w, a), [BWall, NWall, BWall, BWall]);
        assert_eq!(kinds(&w, b), [BWall, BWall, BWall, NWall]);
    }

    #[test]
    fn adjacent_double_wall_is_neighbor_and_door_makes_dwall() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(11, 0, 20, 10));
        assert_eq!(kinds(&wall_types(&w), a)[1], NWall);
        w.add_door(a, Side::East, b, Side::West, 3, 7, 3.0).unwrap();
        let w = wall_types(&w);
        assert_eq!(kinds(&w, a), [BWall, DWall, BWall, BWall]);
        assert_eq!(kinds(&w, b), [BWall, BWall, BWall, DWall]);
        assert_eq!(w.doors()[0].opening(), CellBox::new(10, 3, 11, 7));
    }

    #[test]
    fn wall_types_idempotent() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(10, 0, 20, 10));
        w.add_room(rect(0, 11, 20, 30));
        w.add_door(a, Side::East, b, Side::West, 2, 6, 3.0).unwrap();
        let once = wall_types(&w);
        assert_eq!(wall_types(&once), once);
    }

    #[test]
    fn door_validation() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(13, 0, 20, 10));
        assert_eq!(
            w.add_door(a, Side::East, b, Side::West, 3, 7, 3.0),
            Err(Error::DoorOffWall)
        );
        let c = w.add_room(rect(10, 0, 12, 10));
        assert_eq!(
            w.add_door(a, Side::East, c, Side::West, 3, 4, 3.0),
            Err(Error::DoorTooShort)
        );
        assert_eq!(
            w.add_door(a, Side::East, c, Side::North, 3, 8, 3.0),
            Err(Error::DoorOffWall)
        );
        assert_eq!(
            w.add_door(a, Side::East, c, Side::West, 8, 12, 3.0),
            Err(Error::DoorOffWall)
        );
        assert!(w.add_door(a, Side::East, c, Side::West, 3, 8, 3.0).is_ok());
    }

    #[test]
    fn removing_or_moving_rooms_drops_orphan_doors() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(10, 0, 20, 10));
        w.add_door(a, Side::East, b, Side::West, 3, 7, 3.0).unwrap();
        let mut moved = w.clone();
        moved.set_room_rect(b, rect(10, 0, 20, 6)).unwrap();
        assert!(moved.doors().is_empty());
        let mut kept = w.clone();
        kept.set_room_rect(b, rect(10, 0, 25, 10)).unwrap();
        assert_eq!(kept.doors().len(), 1);
        w.remove_room(a).unwrap();
        assert!(w.doors().is_empty());
        assert!(w.validate(30, 30).is_ok());
    }
}
