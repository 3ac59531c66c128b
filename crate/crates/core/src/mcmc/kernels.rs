//! The four reversible kernel pairs and their proposal probabilities.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::detectors::{
    door_candidates, door_weight, fsr_candidates, hough_segments, room_weight, wall_weight, wbr_candidates,
    CandidateSet, DoorCandidate, DoorParams, FsrParams, HoughParams, RoomCandidate,
};
use crate::geometry::{Axis, CellBox, Rect, Side};
use crate::grid::ClassifiedGrid;
use crate::mcmc::schedule::KernelKind;
use crate::raster::{diff_region, PredictedGrid};
use crate::world::{Door, RoomId, World};
use crate::Error;

/// Tunables of the proposal kernels.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelParams {
    pub hough: HoughParams,
    pub fsr: FsrParams,
    pub doors: DoorParams,
    pub min_room_side: usize,
    /// Cap on room weights for removal and wall shifts.
    pub remove_weight_cap: f64,
    /// Cap on wall weights for wall shifts.
    pub shift_weight_cap: f64,
    /// Cap on door weights for deletion.
    pub delete_weight_cap: f64,
    /// Standard deviation of wall shifts, in cells.
    pub shift_sigma: f64,
    /// Largest WBR arrangement before giving up.
    pub candidate_cap: usize,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            hough: HoughParams::default(),
            fsr: FsrParams::default(),
            doors: DoorParams::default(),
            min_room_side: 10,
            remove_weight_cap: 100.0,
            shift_weight_cap: 100.0,
            delete_weight_cap: 100.0,
            shift_sigma: 5.0,
            candidate_cap: crate::detectors::wbr::DEFAULT_CANDIDATE_CAP,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<(), Error> {
        self.hough.validate()?;
        self.doors.validate()?;
        if self.min_room_side < 2 {
            return Err(Error::InvalidParameter("min_room_side must be at least 2"));
        }
        for cap in [self.remove_weight_cap, self.shift_weight_cap, self.delete_weight_cap] {
            if !(cap >= 1.0 && cap.is_finite()) {
                return Err(Error::InvalidParameter("weight caps must be finite and at least 1"));
            }
        }
        if !(self.shift_sigma > 0.0 && self.shift_sigma.is_finite()) {
            return Err(Error::InvalidParameter("shift_sigma must be positive"));
        }
        if !(self.fsr.weight_floor > 0.0 && self.fsr.weight_floor <= 1.0) {
            return Err(Error::InvalidParameter("fsr weight floor must lie in (0, 1]"));
        }
        Ok(())
    }
}

type RectKey = (usize, usize, usize, usize);

fn key(r: &Rect) -> RectKey {
    (r.min().x, r.min().y, r.max().x, r.max().y)
}

/// The static wall-based room candidates of one map, normalized once and
/// shared read-only by every chain on that map.
#[derive(Clone, Debug)]
pub struct RoomProposals {
    set: Option<CandidateSet<Rect>>,
    index: BTreeMap<RectKey, usize>,
}

impl RoomProposals {
    /// Normalizes `candidates`; repeated rectangles keep their first weight.
    pub fn new(candidates: Vec<RoomCandidate>) -> Self {
        let mut index = BTreeMap::new();
        let mut items = Vec::with_capacity(candidates.len());
        for c in candidates {
            if let Entry::Vacant(e) = index.entry(key(&c.rect)) {
                e.insert(items.len());
                items.push((c.rect, c.weight));
            }
        }
        Self {
            set: CandidateSet::new(items).ok(),
            index,
        }
    }

    /// Runs the wall-based detector on `classified`.
    pub fn detect(classified: &ClassifiedGrid, params: &KernelParams) -> Result<Self, Error> {
        Ok(Self::new(wbr_candidates(
            classified,
            &params.hough,
            params.min_room_side,
            params.candidate_cap,
        )?))
    }

    pub fn len(&self) -> usize {
        self.set.as_ref().map_or(0, |s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_none()
    }

    pub fn set(&self) -> Option<&CandidateSet<Rect>> {
        self.set.as_ref()
    }
}

/// Everything a kernel reads besides the current world.
pub struct ProposalContext<'a> {
    pub classified: &'a ClassifiedGrid,
    pub rooms: &'a RoomProposals,
    pub params: &'a KernelParams,
    /// Rasterization of the current world.
    pub predicted: &'a PredictedGrid,
    pub fsr_active: bool,
}

/// A proposed transition with its forward and backward proposal probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelProposal {
    pub kind: KernelKind,
    pub world_after: World,
    pub log_q_forward: f64,
    pub log_q_backward: f64,
    /// Cells whose prediction may change.
    pub diff: Vec<CellBox>,
}

/// A kernel could not build a transition from the current world.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProposalUnavailable {
    pub kind: KernelKind,
    pub reason: &'static str,
}

impl fmt::Display for ProposalUnavailable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} unavailable: {}", self.kind.name(), self.reason)
    }
}

type Proposal = Result<KernelProposal, ProposalUnavailable>;

fn unavailable(kind: KernelKind, reason: &'static str) -> ProposalUnavailable {
    ProposalUnavailable { kind, reason }
}

fn finish(
    kind: KernelKind,
    before: &World,
    after: World,
    diff: Option<Vec<CellBox>>,
    forward: f64,
    backward: f64,
) -> Proposal {
    if !(forward > 0.0) {
        return Err(unavailable(kind, "forward move has zero probability"));
    }
    if !(backward > 0.0) {
        return Err(unavailable(kind, "reverse move has zero probability"));
    }
    let diff = diff.unwrap_or_else(|| diff_region(before, &after));
    Ok(KernelProposal {
        kind,
        world_after: after,
        log_q_forward: libm::log(forward),
        log_q_backward: libm::log(backward),
        diff,
    })
}

/// `min(1 / w, cap)`, with zero weight mapping to the cap.
fn inverse_capped(weight: f64, cap: f64) -> f64 {
    if weight > 0.0 {
        (1.0 / weight).min(cap)
    } else {
        cap
    }
}

/// Draws a transition of `kind` from `world`.
pub fn propose<R: Rng + ?Sized>(
    kind: KernelKind,
    world: &World,
    ctx: &ProposalContext<'_>,
    cache: &mut SplitCache,
    rng: &mut R,
) -> Proposal {
    match kind {
        KernelKind::Add => add(world, ctx, rng),
        KernelKind::Remove => remove(world, ctx, rng),
        KernelKind::Split => split(world, ctx, cache, rng),
        KernelKind::Merge => merge(world, ctx, cache, rng),
        KernelKind::Shrink | KernelKind::Dilate => shift(kind, world, ctx, rng),
        KernelKind::Allocate => allocate(world, ctx, rng),
        KernelKind::Delete => delete(world, ctx, rng),
    }
}

// ---------------------------------------------------------------- add / remove

/// Candidates for adding a room: the wall-based set, joined by free-space
/// candidates once those are active.
enum AddPool<'a> {
    Static(&'a RoomProposals),
    Pooled {
        set: CandidateSet<Rect>,
        static_len: usize,
        base: &'a RoomProposals,
    },
}

impl AddPool<'_> {
    fn set(&self) -> &CandidateSet<Rect> {
        match self {
            AddPool::Static(p) => p.set().expect("pool is nonempty"),
            AddPool::Pooled { set, .. } => set,
        }
    }

    fn probability(&self, rect: &Rect) -> f64 {
        let base = match self {
            AddPool::Static(p) | AddPool::Pooled { base: p, .. } => p,
        };
        if let Some(&i) = base.index.get(&key(rect)) {
            return self.set().get(i).normalized_weight;
        }
        match self {
            AddPool::Static(_) => 0.0,
            AddPool::Pooled { set, static_len, .. } => set.candidates()[*static_len..]
                .iter()
                .find(|c| c.item == *rect)
                .map_or(0.0, |c| c.normalized_weight),
        }
    }

    /// Backward probability for removing `rect`. Rooms outside the pool count
    /// as one extra candidate drawn uniformly.
    fn readd_probability(&self, rect: &Rect) -> f64 {
        let p = self.probability(rect);
        if p > 0.0 {
            p
        } else {
            1.0 / (self.set().len() + 1) as f64
        }
    }
}

fn add_pool<'a>(ctx: &ProposalContext<'a>, predicted: &PredictedGrid) -> Option<AddPool<'a>> {
    let base = ctx.rooms;
    if !ctx.fsr_active {
        return (!base.is_empty()).then_some(AddPool::Static(base));
    }
    let mut seen = BTreeMap::new();
    let extra: Vec<(Rect, f64)> = fsr_candidates(ctx.classified, predicted, &ctx.params.fsr, ctx.params.min_room_side)
        .into_iter()
        .filter(|c| !base.index.contains_key(&key(&c.rect)) && seen.insert(key(&c.rect), ()).is_none())
        .map(|c| (c.rect, c.weight))
        .collect();
    if extra.is_empty() {
        return (!base.is_empty()).then_some(AddPool::Static(base));
    }
    let static_items = base
        .set()
        .into_iter()
        .flat_map(|s| s.candidates().iter().map(|c| (c.item, c.weight)));
    let static_len = base.len();
    let set = CandidateSet::new(static_items.chain(extra)).ok()?;
    Some(AddPool::Pooled { set, static_len, base })
}

fn removal_set(world: &World, ctx: &ProposalContext<'_>) -> Option<CandidateSet<RoomId>> {
    let cap = ctx.params.remove_weight_cap;
    CandidateSet::new(
        world
            .rooms()
            .iter()
            .map(|r| (r.id, inverse_capped(room_weight(&r.rect, ctx.classified), cap))),
    )
    .ok()
}

fn add<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Add;
    let pool = add_pool(ctx, ctx.predicted).ok_or(unavailable(K, "no room candidates"))?;
    let (i, forward) = pool.set().sample_index(rng);
    let rect = pool.set().get(i).item;
    let mut after = world.clone();
    let id = after.add_room(rect);
    let backward = removal_set(&after, ctx).map_or(0.0, |s| s.probability_where(|&r| r == id));
    finish(K, world, after, None, forward, backward)
}

fn remove<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Remove;
    let set = removal_set(world, ctx).ok_or(unavailable(K, "world has no rooms"))?;
    let (&id, forward) = set.sample(rng);
    let mut after = world.clone();
    let rect = after.remove_room(id).expect("sampled room exists").rect;
    let diff = diff_region(world, &after);
    let backward = if ctx.fsr_active {
        let mut predicted = ctx.predicted.clone();
        predicted.refresh(&after, &diff);
        add_pool(ctx, &predicted).map_or(1.0, |p| p.readd_probability(&rect))
    } else {
        add_pool(ctx, ctx.predicted).map_or(1.0, |p| p.readd_probability(&rect))
    };
    finish(K, world, after, Some(diff), forward, backward)
}

// ---------------------------------------------------------------- split / merge

/// A line splitting a room into `[lo, at]` and `[at + 1, hi]` along `axis`'s
/// normal: a vertical line cuts the x range, a horizontal one the y range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitLine {
    pub axis: Axis,
    pub at: usize,
    /// Total length of detected wall on this line inside the room.
    pub weight: f64,
}

/// Memoized room-local line detection, keyed by room rectangle.
#[derive(Clone, Debug, Default)]
pub struct SplitCache {
    lines: BTreeMap<RectKey, Vec<SplitLine>>,
}

impl SplitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Lines inside `rect` along which both halves keep the minimum side.
    pub fn lines(&mut self, rect: &Rect, classified: &ClassifiedGrid, params: &KernelParams) -> &[SplitLine] {
        self.lines
            .entry(key(rect))
            .or_insert_with(|| detect_split_lines(rect, classified, params))
    }
}

fn detect_split_lines(rect: &Rect, classified: &ClassifiedGrid, params: &KernelParams) -> Vec<SplitLine> {
    let Some(interior) = rect.interior() else {
        return Vec::new();
    };
    let mut by_line: BTreeMap<(bool, usize), f64> = BTreeMap::new();
    for s in hough_segments(classified, Some(interior), &params.hough) {
        *by_line.entry((s.axis() == Axis::Vertical, s.line())).or_insert(0.0) += s.length();
    }
    let m = params.min_room_side;
    by_line
        .into_iter()
        .filter_map(|((vertical, at), weight)| {
            let axis = if vertical { Axis::Vertical } else { Axis::Horizontal };
            let (lo, hi) = cut_range(rect, axis);
            (at >= lo + m && at + 1 + m <= hi).then_some(SplitLine { axis, at, weight })
        })
        .collect()
}

/// Coordinate range cut by a line of `axis`: x for vertical lines, y otherwise.
fn cut_range(rect: &Rect, axis: Axis) -> (usize, usize) {
    match axis {
        Axis::Vertical => (rect.min().x, rect.max().x),
        Axis::Horizontal => (rect.min().y, rect.max().y),
    }
}

/// Children of `rect` cut at `at`: `[lo, at]` and `[at, hi]` when they share
/// the cut wall, `[lo, at]` and `[at + 1, hi]` otherwise.
fn split_rect(rect: &Rect, axis: Axis, at: usize, shared: bool) -> (Rect, Rect) {
    let (mn, mx) = (rect.min(), rect.max());
    let next = if shared { at } else { at + 1 };
    let pair = match axis {
        Axis::Vertical => (
            Rect::from_corners(mn.x, mn.y, at, mx.y),
            Rect::from_corners(next, mn.y, mx.x, mx.y),
        ),
        Axis::Horizontal => (
            Rect::from_corners(mn.x, mn.y, mx.x, at),
            Rect::from_corners(mn.x, next, mx.x, mx.y),
        ),
    };
    (
        pair.0.expect("split keeps minimum side"),
        pair.1.expect("split keeps minimum side"),
    )
}

/// How `a` and `b` cut a rectangle into two halves.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Tiling {
    whole: Rect,
    axis: Axis,
    at: usize,
    shared: bool,
}

/// When `a` and `b` are the two halves of one rectangle cut by a line, either
/// side by side or sharing the cut wall, that rectangle and the cut.
fn tiled_pair(a: &Rect, b: &Rect) -> Option<Tiling> {
    let (lo, hi) = if a.min() <= b.min() { (a, b) } else { (b, a) };
    let tiling = |axis, at: usize, next: usize| {
        (at + 1 == next || at == next).then_some(Tiling {
            whole: lo.bounding(hi),
            axis,
            at,
            shared: at == next,
        })
    };
    if lo.min().y == hi.min().y && lo.max().y == hi.max().y && lo.min().x < hi.min().x {
        return tiling(Axis::Vertical, lo.max().x, hi.min().x);
    }
    if lo.min().x == hi.min().x && lo.max().x == hi.max().x && lo.min().y < hi.min().y {
        return tiling(Axis::Horizontal, lo.max().y, hi.min().y);
    }
    None
}

/// Probability that the split kernel picks the line `at` in `rect`. A cut
/// outside the detected lines counts as one extra line drawn uniformly.
fn split_line_probability(
    rect: &Rect,
    axis: Axis,
    at: usize,
    ctx: &ProposalContext<'_>,
    cache: &mut SplitCache,
) -> f64 {
    let lines = cache.lines(rect, ctx.classified, ctx.params);
    let p = CandidateSet::new(lines.iter().map(|l| (*l, l.weight)))
        .map_or(0.0, |s| s.probability_where(|l| l.axis == axis && l.at == at));
    if p > 0.0 {
        p
    } else {
        1.0 / (lines.len() + 1) as f64
    }
}

fn partner_set(world: &World, first: RoomId) -> Option<CandidateSet<RoomId>> {
    let (cx, cy) = world.room(first)?.rect.center();
    CandidateSet::new(world.rooms().iter().filter(|r| r.id != first).map(|r| {
        let (x, y) = r.rect.center();
        let d = libm::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
        (r.id, 1.0 / d.max(1.0))
    }))
    .ok()
}

/// Probability that the merge kernel picks `a` and `b`, in either order.
fn merge_probability(world: &World, a: RoomId, b: RoomId) -> f64 {
    let n = world.rooms().len() as f64;
    let pick = |first, second| partner_set(world, first).map_or(0.0, |s| s.probability_where(|&r| r == second));
    (pick(a, b) + pick(b, a)) / n
}

fn split<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, cache: &mut SplitCache, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Split;
    let rooms = world.rooms();
    if rooms.is_empty() {
        return Err(unavailable(K, "world has no rooms"));
    }
    let room = &rooms[rng.random_range(0..rooms.len())];
    let lines = cache.lines(&room.rect, ctx.classified, ctx.params);
    let set = CandidateSet::new(lines.iter().map(|l| (*l, l.weight)))
        .map_err(|_| unavailable(K, "no line crosses the room"))?;
    let (line, p_line) = set.sample(rng);
    let shared = rng.random_bool(0.5);
    let (a, b) = split_rect(&room.rect, line.axis, line.at, shared);
    let mut after = world.clone();
    after.remove_room(room.id).expect("sampled room exists");
    let ida = after.add_room(a);
    let idb = after.add_room(b);
    let forward = 0.5 * p_line / rooms.len() as f64;
    let backward = merge_probability(&after, ida, idb);
    finish(K, world, after, None, forward, backward)
}

fn merge<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, cache: &mut SplitCache, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Merge;
    let rooms = world.rooms();
    if rooms.len() < 2 {
        return Err(unavailable(K, "fewer than two rooms"));
    }
    let first = &rooms[rng.random_range(0..rooms.len())];
    let partners = partner_set(world, first.id).expect("at least one other room");
    let (&second_id, _) = partners.sample(rng);
    let second = world.room(second_id).expect("sampled room exists");
    let tiling = tiled_pair(&first.rect, &second.rect).ok_or(unavailable(K, "rooms do not tile a rectangle"))?;
    let forward = merge_probability(world, first.id, second_id);
    let mut after = world.clone();
    after.remove_room(first.id).expect("room exists");
    after.remove_room(second_id).expect("room exists");
    after.add_room(tiling.whole);
    let p_line = split_line_probability(&tiling.whole, tiling.axis, tiling.at, ctx, cache);
    let backward = 0.5 * p_line / after.rooms().len() as f64;
    finish(K, world, after, None, forward, backward)
}

// ---------------------------------------------------------------- shrink / dilate

fn shift<R: Rng + ?Sized>(kind: KernelKind, world: &World, ctx: &ProposalContext<'_>, rng: &mut R) -> Proposal {
    let set = removal_set(world, ctx).ok_or(unavailable(kind, "world has no rooms"))?;
    let (&id, p_room) = set.sample(rng);
    let rect = world.room(id).expect("sampled room exists").rect;
    let cap = ctx.params.shift_weight_cap;
    let walls = CandidateSet::new(
        Side::ALL
            .into_iter()
            .map(|s| (s, inverse_capped(wall_weight(&rect.wall(s), ctx.classified), cap))),
    )
    .expect("four walls");
    let (&side, p_wall) = walls.sample(rng);
    let normal = Normal::new(0.0, ctx.params.shift_sigma).expect("sigma validated");
    let mut offset = libm::round(normal.sample(rng)) as i64;
    if offset == 0 {
        offset = libm::round(normal.sample(rng)) as i64;
    }
    // positive offsets move the wall inward
    let kind = match offset {
        0 => return Err(unavailable(kind, "zero wall shift")),
        o if o > 0 => KernelKind::Shrink,
        _ => KernelKind::Dilate,
    };
    let shifted = rect
        .shift_wall(side, offset)
        .filter(|r| r.min_side() >= ctx.params.min_room_side && r.fits(ctx.classified.width(), ctx.classified.height()))
        .ok_or(unavailable(kind, "shifted room is invalid"))?;
    let mut after = world.clone();
    after.set_room_rect(id, shifted).expect("room exists");
    let q = p_room * p_wall;
    finish(kind, world, after, None, q, q)
}

// ---------------------------------------------------------------- allocate / delete

fn same_opening(d: &Door, c: &DoorCandidate) -> bool {
    let same_rooms = d.rooms == c.rooms || d.rooms == (c.rooms.1, c.rooms.0);
    let (a0, a1) = d.span.range();
    let (b0, b1) = c.span.range();
    same_rooms && d.span.axis() == c.span.axis() && a0 <= b1 && b0 <= a1
}

/// Door candidates of `world` that do not overlap an existing door between the same rooms.
fn free_door_candidates(world: &World, ctx: &ProposalContext<'_>) -> Vec<DoorCandidate> {
    if world.rooms().len() < 2 {
        return Vec::new();
    }
    door_candidates(world, ctx.classified, &ctx.params.doors)
        .into_iter()
        .filter(|c| !world.doors().iter().any(|d| same_opening(d, c)))
        .collect()
}

fn deletion_set(world: &World, ctx: &ProposalContext<'_>) -> Option<CandidateSet<crate::DoorId>> {
    let cap = ctx.params.delete_weight_cap;
    CandidateSet::new(
        world
            .doors()
            .iter()
            .map(|d| (d.id, inverse_capped(door_weight(&d.span, ctx.classified), cap))),
    )
    .ok()
}

fn allocate<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Allocate;
    let set = CandidateSet::new(free_door_candidates(world, ctx).into_iter().map(|c| (c, c.weight)))
        .map_err(|_| unavailable(K, "no door candidates"))?;
    let (c, forward) = set.sample(rng);
    let (lo, hi) = c.span.range();
    let mut after = world.clone();
    let id = after
        .add_door(
            c.rooms.0,
            c.walls.0,
            c.rooms.1,
            c.walls.1,
            lo,
            hi,
            ctx.params.doors.min_door_len,
        )
        .map_err(|_| unavailable(K, "candidate is not a valid door"))?;
    let backward = deletion_set(&after, ctx).map_or(0.0, |s| s.probability_where(|&d| d == id));
    finish(K, world, after, None, forward, backward)
}

fn delete<R: Rng + ?Sized>(world: &World, ctx: &ProposalContext<'_>, rng: &mut R) -> Proposal {
    const K: KernelKind = KernelKind::Delete;
    let set = deletion_set(world, ctx).ok_or(unavailable(K, "world has no doors"))?;
    let (&id, forward) = set.sample(rng);
    let mut after = world.clone();
    let door = after.remove_door(id).expect("sampled door exists");
    let backward = CandidateSet::new(free_door_candidates(&after, ctx).into_iter().map(|c| (c, c.weight)))
        .map_or(0.0, |s| {
            s.probability_where(|c| c.rooms == door.rooms && c.walls == door.walls && c.span == door.span)
        });
    finish(K, world, after, None, forward, backward)
}

#[cfg(test)]
mod tests;
