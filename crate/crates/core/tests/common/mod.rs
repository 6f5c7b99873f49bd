//! Brute-force reference implementations and random generators shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use promptseg::raster::{BinaryMask, InstanceMask, Point};
use rand::Rng;

const OFFSETS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Uniform random raster with the given fill probability.
pub fn random_mask(rng: &mut impl Rng, w: u32, h: u32, fill: f64) -> BinaryMask {
    let bits = (0..w * h).map(|_| rng.random_bool(fill)).collect();
    BinaryMask::new(w, h, bits).unwrap()
}

/// A random 8-connected blob of exactly `n` pixels, grown from one seed by
/// attaching neighbours of already-chosen pixels. Coordinates start at
/// `margin` on both axes.
pub fn random_blob(rng: &mut impl Rng, n: usize, margin: u32) -> Vec<Point> {
    let mut chosen: Vec<(i64, i64)> = vec![(0, 0)];
    let mut seen: HashSet<(i64, i64)> = chosen.iter().copied().collect();
    // a compactness knob: grow from recent pixels for snakes, any pixel for lumps
    let snake = rng.random_bool(0.3);
    while chosen.len() < n {
        let base = if snake && rng.random_bool(0.9) {
            let lo = chosen.len().saturating_sub(4);
            chosen[rng.random_range(lo..chosen.len())]
        } else {
            chosen[rng.random_range(0..chosen.len())]
        };
        let (dx, dy) = OFFSETS[rng.random_range(0..8)];
        let next = (base.0 + dx, base.1 + dy);
        if seen.insert(next) {
            chosen.push(next);
        }
    }
    let min_x = chosen.iter().map(|p| p.0).min().unwrap();
    let min_y = chosen.iter().map(|p| p.1).min().unwrap();
    chosen
        .into_iter()
        .map(|(x, y)| Point::new((x - min_x) as u32 + margin, (y - min_y) as u32 + margin))
        .collect()
}

/// Raster just large enough for `pixels` plus `margin` on the far sides.
pub fn blob_mask(pixels: &[Point], margin: u32) -> BinaryMask {
    let w = pixels.iter().map(|p| p.x).max().unwrap() + 1 + margin;
    let h = pixels.iter().map(|p| p.y).max().unwrap() + 1 + margin;
    let mut m = BinaryMask::empty(w, h).unwrap();
    for p in pixels {
        m.set(p.x, p.y, true);
    }
    m
}

/// Components by breadth-first flood fill, numbered in raster order of their
/// first pixel; each component's pixels sorted by (row, col).
pub fn flood_fill_components(mask: &BinaryMask) -> Vec<Vec<Point>> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; (w * h) as usize];
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let idx = (y * w + x) as usize;
            if !mask.get(x, y) || seen[idx] {
                continue;
            }
            seen[idx] = true;
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([(x, y)]);
            while let Some((cx, cy)) = queue.pop_front() {
                comp.push(Point::new(cx, cy));
                for (dx, dy) in OFFSETS {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as u32, ny as u32);
                    let nidx = (ny * w + nx) as usize;
                    if mask.get(nx, ny) && !seen[nidx] {
                        seen[nidx] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
    }
    out
}

/// Squared Euclidean distance from `p` to the nearest pixel not in `inst`,
/// counting every pixel off the `w` x `h` raster as outside the instance.
pub fn brute_distance_sq(inst: &InstanceMask, w: u32, h: u32, p: Point) -> u64 {
    let (x, y) = (p.x as u64, p.y as u64);
    let edge = (x + 1).min(y + 1).min(w as u64 - x).min(h as u64 - y);
    let mut best = edge * edge;
    for qy in 0..h {
        for qx in 0..w {
            let q = Point::new(qx, qy);
            if !inst.contains(q) {
                best = best.min(p.dist_sq(&q));
            }
        }
    }
    best
}

/// Distance argmax by exhaustive search; ties go to the smallest (row, col).
pub fn brute_representative(inst: &InstanceMask, w: u32, h: u32) -> Point {
    let mut best: Option<(u64, Point)> = None;
    for &p in inst.pixels() {
        let d = brute_distance_sq(inst, w, h, p);
        let better = match best {
            None => true,
            Some((bd, bp)) => d > bd || (d == bd && p < bp),
        };
        if better {
            best = Some((d, p));
        }
    }
    best.unwrap().1
}

/// Every pixel of `inst` reachable from every other within `inst` (8-way).
pub fn is_connected(pixels: &[Point]) -> bool {
    if pixels.is_empty() {
        return true;
    }
    let set: HashSet<(i64, i64)> = pixels.iter().map(|p| (p.x as i64, p.y as i64)).collect();
    let start = (pixels[0].x as i64, pixels[0].y as i64);
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in OFFSETS {
            let n = (x + dx, y + dy);
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// Jaccard index by set arithmetic.
pub fn brute_iou(a: &InstanceMask, b: &InstanceMask) -> f64 {
    let sa: HashSet<Point> = a.pixels().iter().copied().collect();
    let inter = b.pixels().iter().filter(|p| sa.contains(p)).count();
    inter as f64 / (a.len() + b.len() - inter) as f64
}

/// Best one-to-one assignment by exhaustive search over all eligible pairs:
/// most pairs first, then largest IoU sum. Returned sorted by pred id.
pub fn exhaustive_matching(
    pred: &[InstanceMask],
    gt: &[InstanceMask],
    threshold: f64,
) -> Vec<(u32, u32)> {
    let iou: Vec<Vec<f64>> = pred
        .iter()
        .map(|p| gt.iter().map(|g| brute_iou(p, g)).collect())
        .collect();
    let mut best: (usize, f64, Vec<(usize, usize)>) = (0, 0.0, Vec::new());
    let mut used = vec![false; gt.len()];
    let mut current = Vec::new();
    search(0, &iou, threshold, &mut used, &mut current, 0.0, &mut best);
    let mut out: Vec<(u32, u32)> = best
        .2
        .iter()
        .map(|&(p, g)| (pred[p].id(), gt[g].id()))
        .collect();
    out.sort();
    out
}

fn search(
    i: usize,
    iou: &[Vec<f64>],
    threshold: f64,
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    sum: f64,
    best: &mut (usize, f64, Vec<(usize, usize)>),
) {
    if i == iou.len() {
        if current.len() > best.0 || (current.len() == best.0 && sum > best.1) {
            *best = (current.len(), sum, current.clone());
        }
        return;
    }
    search(i + 1, iou, threshold, used, current, sum, best);
    for g in 0..used.len() {
        let v = iou[i][g];
        if !used[g] && v > 0.0 && v >= threshold {
            used[g] = true;
            current.push((i, g));
            search(i + 1, iou, threshold, used, current, sum + v, best);
            current.pop();
            used[g] = false;
        }
    }
}

/// A raster holding `n` random axis-aligned rectangles (which may touch and
/// merge), sized to give scenes of up to a handful of instances.
pub fn random_rect_scene(rng: &mut impl Rng, w: u32, h: u32, n: usize) -> BinaryMask {
    let mut m = BinaryMask::empty(w, h).unwrap();
    for _ in 0..n {
        let rw = rng.random_range(1..=w / 3);
        let rh = rng.random_range(1..=h / 3);
        let x0 = rng.random_range(0..=w - rw);
        let y0 = rng.random_range(0..=h - rh);
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                m.set(x, y, true);
            }
        }
    }
    m
}

/// Pixel counts (tp, fp, fn, tn) by direct enumeration.
pub fn brute_confusion(pred: &BinaryMask, gt: &BinaryMask) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    (tp, fp, fn_, tn)
}
