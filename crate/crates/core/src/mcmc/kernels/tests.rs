use super::*;
use crate::grid::CellClass;
use crate::raster::rasterize;
use crate::seeded_rng;
use crate::synthetic::{DoorSpec, SyntheticSpec};
use alloc::vec;
use proptest::prelude::*;

fn rect(x0: usize, y0: usize, x1: usize, y1: usize) -> Rect {
    Rect::from_corners(x0, y0, x1, y1).unwrap()
}

/// Noise-free observation of a world: walls occupied, rooms free, rest unexplained.
fn observe(world: &World, w: usize, h: usize) -> ClassifiedGrid {
    let p = rasterize(world, w, h).unwrap();
    let classes = p.classes().map(|c| CellClass::ALL[c.row()]).collect();
    ClassifiedGrid::from_classes(w, h, classes).unwrap()
}

fn two_room_map() -> (World, ClassifiedGrid) {
    let spec = SyntheticSpec {
        width: 100,
        height: 70,
        rooms: vec![rect(5, 5, 50, 60), rect(51, 5, 94, 60)],
        doors: vec![DoorSpec {
            rooms: (0, 1),
            walls: (Side::East, Side::West),
            lo: 25,
            hi: 31,
        }],
    };
    let truth = spec.world().unwrap();
    let map = observe(&truth, spec.width, spec.height);
    (truth, map)
}

struct Fixture {
    map: ClassifiedGrid,
    rooms: RoomProposals,
    params: KernelParams,
}

impl Fixture {
    fn new(map: ClassifiedGrid) -> Self {
        let params = KernelParams::default();
        let rooms = RoomProposals::detect(&map, &params).unwrap();
        Self { map, rooms, params }
    }

    fn with_rooms(map: ClassifiedGrid, rooms: RoomProposals) -> Self {
        Self {
            map,
            rooms,
            params: KernelParams::default(),
        }
    }

    fn ctx<'a>(&'a self, predicted: &'a PredictedGrid, fsr_active: bool) -> ProposalContext<'a> {
        ProposalContext {
            classified: &self.map,
            rooms: &self.rooms,
            params: &self.params,
            predicted,
            fsr_active,
        }
    }

    fn predicted(&self, world: &World) -> PredictedGrid {
        rasterize(world, self.map.width(), self.map.height()).unwrap()
    }
}

#[test]
fn remove_split_merge_delete_need_material() {
    let (_, map) = two_room_map();
    let f = Fixture::new(map);
    let world = World::new();
    let p = f.predicted(&world);
    let ctx = f.ctx(&p, false);
    let mut cache = SplitCache::new();
    let mut rng = seeded_rng(1);
    for kind in [
        KernelKind::Remove,
        KernelKind::Split,
        KernelKind::Merge,
        KernelKind::Shrink,
        KernelKind::Allocate,
        KernelKind::Delete,
    ] {
        let err = propose(kind, &world, &ctx, &mut cache, &mut rng).unwrap_err();
        assert_eq!(err.kind, kind);
    }
}

#[test]
fn add_from_single_candidate_is_certain() {
    let (_, map) = two_room_map();
    let only = RoomCandidate {
        rect: rect(5, 5, 50, 60),
        weight: 0.7,
    };
    let f = Fixture::with_rooms(map, RoomProposals::new(vec![only]));
    let world = World::new();
    let p = f.predicted(&world);
    let mut rng = seeded_rng(2);
    let prop = propose(
        KernelKind::Add,
        &world,
        &f.ctx(&p, false),
        &mut SplitCache::new(),
        &mut rng,
    )
    .unwrap();
    assert_eq!(prop.log_q_forward, 0.0);
    assert_eq!(prop.log_q_backward, 0.0);
    assert_eq!(prop.world_after.rooms()[0].rect, only.rect);
    assert_eq!(prop.diff, vec![CellBox::new(4, 4, 51, 61)]);
}

#[test]
fn add_then_remove_probabilities_mirror() {
    let (_, map) = two_room_map();
    let f = Fixture::new(map);
    assert!(f.rooms.len() >= 3);
    let mut rng = seeded_rng(3);
    let mut cache = SplitCache::new();
    let mut world = World::new();
    world.add_room(rect(5, 5, 50, 60));
    for fsr in [false, true] {
        for _ in 0..20 {
            let p = f.predicted(&world);
            let add = propose(KernelKind::Add, &world, &f.ctx(&p, fsr), &mut cache, &mut rng).unwrap();
            let w1 = add.world_after.clone();
            let added = w1.rooms().last().unwrap().id;
            // the reverse move: remove exactly the added room
            let p1 = f.predicted(&w1);
            let ctx1 = f.ctx(&p1, fsr);
            let b = removal_set(&w1, &ctx1).unwrap().probability_where(|&r| r == added);
            assert_eq!(libm::log(b), add.log_q_backward);
            let mut back = w1.clone();
            let r = back.remove_room(added).unwrap().rect;
            let mut pb = p1.clone();
            pb.refresh(&back, &diff_region(&w1, &back));
            assert_eq!(
                libm::log(add_pool(&ctx1, &pb).unwrap().probability(&r)),
                add.log_q_forward
            );
            assert_eq!(back.rooms(), world.rooms());
        }
    }
}

#[test]
fn shrink_is_symmetric() {
    let (truth, map) = two_room_map();
    let f = Fixture::new(map);
    let p = f.predicted(&truth);
    let mut rng = seeded_rng(4);
    let mut seen = 0;
    for _ in 0..200 {
        if let Ok(prop) = propose(
            KernelKind::Shrink,
            &truth,
            &f.ctx(&p, false),
            &mut SplitCache::new(),
            &mut rng,
        ) {
            assert_eq!(prop.log_q_forward, prop.log_q_backward);
            assert!(matches!(prop.kind, KernelKind::Shrink | KernelKind::Dilate));
            seen += 1;
        }
    }
    assert!(seen > 100);
}

#[test]
fn split_and_merge_are_mutual_inverses() {
    let (_, map) = two_room_map();
    let f = Fixture::new(map);
    let mut world = World::new();
    world.add_room(rect(5, 5, 94, 60));
    let mut cache = SplitCache::new();
    let lines = cache.lines(&rect(5, 5, 94, 60), &f.map, &f.params).to_vec();
    assert_eq!(
        lines.iter().map(|l| (l.axis, l.at)).collect::<Vec<_>>(),
        vec![(Axis::Vertical, 50), (Axis::Vertical, 51)]
    );
    let mut rng = seeded_rng(5);
    let p = f.predicted(&world);
    let split = propose(KernelKind::Split, &world, &f.ctx(&p, false), &mut cache, &mut rng).unwrap();
    let w1 = split.world_after.clone();
    assert_eq!(w1.rooms().len(), 2);
    let p1 = f.predicted(&w1);
    // both orderings of the pair lead to the same merge
    let merge = (0..50)
        .find_map(|_| propose(KernelKind::Merge, &w1, &f.ctx(&p1, false), &mut cache, &mut rng).ok())
        .unwrap();
    assert_eq!(merge.world_after.rooms().len(), 1);
    assert_eq!(merge.world_after.rooms()[0].rect, world.rooms()[0].rect);
    assert!((merge.log_q_forward - split.log_q_backward).abs() < 1e-15);
    assert!((merge.log_q_backward - split.log_q_forward).abs() < 1e-15);
}

#[test]
fn merge_requires_a_tiling_pair() {
    assert!(tiled_pair(&rect(0, 0, 10, 10), &rect(11, 0, 20, 10)).is_some());
    assert_eq!(tiled_pair(&rect(11, 0, 20, 10), &rect(0, 0, 10, 10)).unwrap().at, 10);
    assert!(tiled_pair(&rect(0, 0, 10, 10), &rect(11, 0, 20, 11)).is_none());
    assert!(tiled_pair(&rect(0, 0, 10, 10), &rect(12, 0, 20, 10)).is_none());
    assert!(tiled_pair(&rect(0, 0, 10, 10), &rect(9, 0, 20, 10)).is_none());
    let t = tiled_pair(&rect(0, 0, 10, 10), &rect(0, 11, 10, 30)).unwrap();
    assert_eq!(
        (t.whole, t.axis, t.at, t.shared),
        (rect(0, 0, 10, 30), Axis::Horizontal, 10, false)
    );
    let t = tiled_pair(&rect(10, 0, 20, 10), &rect(0, 0, 10, 10)).unwrap();
    assert_eq!(
        (t.whole, t.axis, t.at, t.shared),
        (rect(0, 0, 20, 10), Axis::Vertical, 10, true)
    );
}

#[test]
fn allocate_then_delete_probabilities_mirror() {
    let (truth, map) = two_room_map();
    let f = Fixture::new(map);
    let mut world = truth.clone();
    let door = world.doors()[0].id;
    world.remove_door(door).unwrap();
    let p = f.predicted(&world);
    let mut rng = seeded_rng(6);
    let alloc = propose(
        KernelKind::Allocate,
        &world,
        &f.ctx(&p, false),
        &mut SplitCache::new(),
        &mut rng,
    )
    .unwrap();
    let w1 = alloc.world_after.clone();
    assert_eq!(w1.doors().len(), 1);
    let (lo, hi) = w1.doors()[0].span.range();
    // chunk alignment may clip one cell at either end
    assert!(lo.abs_diff(25) <= 1 && hi.abs_diff(31) <= 1);
    // a single door and a single candidate: both directions are certain
    assert_eq!(alloc.log_q_forward, 0.0);
    assert_eq!(alloc.log_q_backward, 0.0);
    // no overlapping candidate is offered twice
    let p1 = f.predicted(&w1);
    assert!(propose(
        KernelKind::Allocate,
        &w1,
        &f.ctx(&p1, false),
        &mut SplitCache::new(),
        &mut rng
    )
    .is_err());
    let del = propose(
        KernelKind::Delete,
        &w1,
        &f.ctx(&p1, false),
        &mut SplitCache::new(),
        &mut rng,
    )
    .unwrap();
    assert_eq!(del.world_after.doors().len(), 0);
    assert_eq!(del.log_q_backward, 0.0);
}

#[test]
fn removing_a_host_room_drops_its_doors() {
    let (truth, map) = two_room_map();
    let f = Fixture::new(map);
    let p = f.predicted(&truth);
    let mut rng = seeded_rng(7);
    let prop = propose(
        KernelKind::Remove,
        &truth,
        &f.ctx(&p, false),
        &mut SplitCache::new(),
        &mut rng,
    )
    .unwrap();
    assert!(prop.world_after.doors().is_empty());
    let after = f.predicted(&prop.world_after);
    for y in 0..f.map.height() {
        for x in 0..f.map.width() {
            if p.class(x, y) != after.class(x, y) {
                assert!(prop.diff.iter().any(|b| b.contains(crate::CellIndex::new(x, y))));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn proposals_are_well_formed(seed in any::<u64>(), steps in 1usize..40) {
        let (_, map) = two_room_map();
        let f = Fixture::new(map);
        let mut rng = seeded_rng(seed);
        let mut cache = SplitCache::new();
        let mut world = World::new();
        for _ in 0..steps {
            let kind = KernelKind::ALL[rand::Rng::random_range(&mut rng, 0..8)];
            let p = f.predicted(&world);
            if let Ok(prop) = propose(kind, &world, &f.ctx(&p, seed % 2 == 0), &mut cache, &mut rng) {
                prop_assert!(prop.log_q_forward.is_finite() && prop.log_q_forward <= 0.0);
                prop_assert!(prop.log_q_backward.is_finite() && prop.log_q_backward <= 0.0);
                prop_assert!(prop.kind == kind || matches!((kind, prop.kind), (KernelKind::Shrink, KernelKind::Dilate) | (KernelKind::Dilate, KernelKind::Shrink)));
                prop_assert!(prop.world_after.validate(f.map.width(), f.map.height()).is_ok());
                let after = f.predicted(&prop.world_after);
                for i in 0..after.len() {
                    let c = crate::CellIndex::new(i % f.map.width(), i / f.map.width());
                    if after.class_at(i) != p.class_at(i) || after.coverage_slice()[i] != p.coverage_slice()[i] {
                        prop_assert!(prop.diff.iter().any(|b| b.contains(c)));
                    }
                }
                world = prop.world_after;
            }
        }
    }
}
