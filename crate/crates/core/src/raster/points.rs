use super::{distance_transform, BoundingBox, InstanceMask, Point};

/// The instance pixel farthest from the background (pole of inaccessibility).
///
/// Ties go to the smallest row, then the smallest column. The result is
/// always an instance pixel, whatever the shape.
pub fn representative_point(inst: &InstanceMask) -> Point {
    let dt = distance_transform(inst);
    let mut best = inst.pixels()[0];
    let mut best_d = 0;
    // pixels are in raster order, so a strict comparison keeps the first maximum
    for &p in inst.pixels() {
        let d = dt.squared(p).unwrap_or(0);
        if d > best_d {
            best = p;
            best_d = d;
        }
    }
    best
}

/// Mean pixel position rounded half-up per axis, snapped onto the instance
/// when the mean falls outside it (L- and U-shapes).
pub fn centroid(inst: &InstanceMask) -> Point {
    let n = inst.len() as u64;
    let (sx, sy) = inst.pixels().iter().fold((0u64, 0u64), |(sx, sy), p| {
        (sx + p.x as u64, sy + p.y as u64)
    });
    // floor(s / n + 1/2) without floating point
    let round = |s: u64| ((2 * s + n) / (2 * n)) as u32;
    let mean = Point::new(round(sx), round(sy));
    if inst.contains(mean) {
        return mean;
    }
    nearest_pixel(inst, mean)
}

/// Instance pixel closest to `target`; ties by row, then column.
pub fn nearest_pixel(inst: &InstanceMask, target: Point) -> Point {
    let mut best = inst.pixels()[0];
    let mut best_d = best.dist_sq(&target);
    for &p in &inst.pixels()[1..] {
        let d = p.dist_sq(&target);
        if d < best_d {
            best = p;
            best_d = d;
        }
    }
    best
}

/// Tight half-open bounds of the instance.
pub fn bounding_box(inst: &InstanceMask) -> BoundingBox {
    inst.bbox()
}
