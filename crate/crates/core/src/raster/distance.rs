//! Exact Euclidean distance transform of a single instance.
//!
//! Every pixel outside the instance counts as background, including pixels
//! beyond the raster edge. A one-pixel background ring around the bounding
//! box is therefore enough: any background pixel further out can be clamped
//! onto the ring without increasing its distance to an instance pixel.

use super::{BoundingBox, InstanceMask, Point};

/// Squared distances to the nearest non-instance pixel, over the instance's
/// bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    bbox: BoundingBox,
    /// Row-major over `bbox`; 0 for pixels outside the instance.
    sq: Vec<u64>,
}

impl DistanceMap {
    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    /// Squared distance at `p`, or `None` if `p` is not an instance pixel.
    pub fn squared(&self, p: Point) -> Option<u64> {
        if !self.bbox.contains(p) {
            return None;
        }
        let v = self.sq[(p.y - self.bbox.y_min) as usize * self.bbox.width() as usize
            + (p.x - self.bbox.x_min) as usize];
        (v > 0).then_some(v)
    }

    pub fn distance(&self, p: Point) -> Option<f64> {
        self.squared(p).map(|d| (d as f64).sqrt())
    }
}

/// Meijster's two-phase linear-time algorithm, in exact integer arithmetic.
pub fn distance_transform(inst: &InstanceMask) -> DistanceMap {
    let bbox = inst.bbox();
    // padded grid: one background pixel on each side
    let pw = bbox.width() as usize + 2;
    let ph = bbox.height() as usize + 2;
    let inside = |px: usize, py: usize| {
        px >= 1
            && py >= 1
            && px <= bbox.width() as usize
            && py <= bbox.height() as usize
            && inst.contains(Point::new(
                bbox.x_min + px as u32 - 1,
                bbox.y_min + py as u32 - 1,
            ))
    };

    // phase 1: vertical distance to background per column
    let mut g = vec![0i64; pw * ph];
    for x in 0..pw {
        for y in 1..ph {
            if inside(x, y) {
                g[y * pw + x] = g[(y - 1) * pw + x] + 1;
            }
        }
        for y in (0..ph - 1).rev() {
            let below = g[(y + 1) * pw + x];
            if below < g[y * pw + x] {
                g[y * pw + x] = below + 1;
            }
        }
    }

    // phase 2: lower envelope of parabolas per row
    let mut sq_padded = vec![0i64; pw * ph];
    let mut s = vec![0usize; pw];
    let mut t = vec![0i64; pw];
    for y in 0..ph {
        let row = &g[y * pw..(y + 1) * pw];
        let f = |x: i64, i: usize| (x - i as i64).pow(2) + row[i].pow(2);
        let sep = |i: usize, u: usize| {
            let (ii, uu) = (i as i64, u as i64);
            (uu * uu - ii * ii + row[u].pow(2) - row[i].pow(2)).div_euclid(2 * (uu - ii))
        };
        let mut q: isize = 0;
        s[0] = 0;
        t[0] = 0;
        for u in 1..pw {
            while q >= 0 && f(t[q as usize], s[q as usize]) > f(t[q as usize], u) {
                q -= 1;
            }
            if q < 0 {
                q = 0;
                s[0] = u;
            } else {
                let w = 1 + sep(s[q as usize], u);
                if w < pw as i64 {
                    q += 1;
                    s[q as usize] = u;
                    t[q as usize] = w;
                }
            }
        }
        for u in (0..pw).rev() {
            sq_padded[y * pw + u] = f(u as i64, s[q as usize]);
            if u as i64 == t[q as usize] {
                q -= 1;
            }
        }
    }

    let bw = bbox.width() as usize;
    let mut sq = vec![0u64; bbox.area() as usize];
    for y in 0..bbox.height() as usize {
        for x in 0..bw {
            if inside(x + 1, y + 1) {
                sq[y * bw + x] = sq_padded[(y + 1) * pw + x + 1] as u64;
            }
        }
    }
    DistanceMap { bbox, sq }
}
