//! Two-pass connected-component labelling with union-find, 4-connectivity.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::CellBox;

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // keep the smaller provisional label as root so final labels follow raster order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Labels the `true` cells of a row-major mask.
///
/// Returns one label per cell (0 for background, components numbered densely
/// from 1 in order of their first cell in raster order) and the component count.
pub fn connected_components(mask: &[bool], width: usize, height: usize) -> (Vec<u32>, usize) {
    assert_eq!(mask.len(), width * height, "mask size does not match dimensions");
    let mut labels = vec![0u32; mask.len()];
    let mut parent: Vec<u32> = vec![0];
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if !mask[i] {
                continue;
            }
            let up = if y > 0 { labels[i - width] } else { 0 };
            let left = if x > 0 { labels[i - 1] } else { 0 };
            labels[i] = match (up, left) {
                (0, 0) => {
                    let l = parent.len() as u32;
                    parent.push(l);
                    l
                }
                (0, l) | (l, 0) => l,
                (u, l) => {
                    union(&mut parent, u, l);
                    u.min(l)
                }
            };
        }
    }
    let mut dense = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in 1..parent.len() as u32 {
        let root = find(&mut parent, l);
        if root == l {
            count += 1;
            dense[l as usize] = count;
        } else {
            dense[l as usize] = dense[root as usize];
        }
    }
    for l in labels.iter_mut() {
        *l = dense[*l as usize];
    }
    (labels, count as usize)
}

/// Bounding box and cell count of every component, indexed by `label - 1`.
pub fn component_extents(labels: &[u32], width: usize, count: usize) -> Vec<(CellBox, usize)> {
    let mut out: Vec<Option<(CellBox, usize)>> = vec![None; count];
    for (i, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let (x, y) = (i % width, i / width);
        let cell = CellBox::new(x, y, x, y);
        let slot = &mut out[l as usize - 1];
        *slot = Some(match slot {
            Some((b, n)) => (b.hull(&cell), *n + 1),
            None => (cell, 1),
        });
    }
    out.into_iter().map(|e| e.expect("dense labels")).collect()
}
