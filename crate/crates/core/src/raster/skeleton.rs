use super::{representative_point, InstanceMask, Point};

/// Zhang-Suen thinning of a single instance, in raster order.
///
/// The result is a subset of the instance pixels and never empty: shapes the
/// thinning would erase entirely (a 2x2 block is the classic case) collapse
/// to their representative point.
pub fn skeletonize(inst: &InstanceMask) -> Vec<Point> {
    let bbox = inst.bbox();
    let pw = bbox.width() as usize + 2;
    let ph = bbox.height() as usize + 2;
    let mut grid = vec![false; pw * ph];
    for p in inst.pixels() {
        grid[(p.y - bbox.y_min) as usize * pw + pw + (p.x - bbox.x_min) as usize + 1] = true;
    }

    let mut doomed = Vec::new();
    loop {
        let mut changed = false;
        for first_pass in [true, false] {
            doomed.clear();
            for y in 1..ph - 1 {
                for x in 1..pw - 1 {
                    let i = y * pw + x;
                    if grid[i] && removable(&grid, pw, i, first_pass) {
                        doomed.push(i);
                    }
                }
            }
            for &i in &doomed {
                grid[i] = false;
            }
            changed |= !doomed.is_empty();
        }
        if !changed {
            break;
        }
    }

    let skeleton: Vec<Point> = (1..ph - 1)
        .flat_map(|y| (1..pw - 1).map(move |x| (x, y)))
        .filter(|&(x, y)| grid[y * pw + x])
        .map(|(x, y)| Point::new(bbox.x_min + x as u32 - 1, bbox.y_min + y as u32 - 1))
        .collect();
    if skeleton.is_empty() {
        vec![representative_point(inst)]
    } else {
        skeleton
    }
}

fn removable(grid: &[bool], pw: usize, i: usize, first_pass: bool) -> bool {
    // P2..P9 clockwise starting north
    let n = [
        grid[i - pw],
        grid[i - pw + 1],
        grid[i + 1],
        grid[i + pw + 1],
        grid[i + pw],
        grid[i + pw - 1],
        grid[i - 1],
        grid[i - pw - 1],
    ];
    let b = n.iter().filter(|&&v| v).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&k| !n[k] && n[(k + 1) % 8]).count();
    if a != 1 {
        return false;
    }
    let (p2, p4, p6, p8) = (n[0], n[2], n[4], n[6]);
    if first_pass {
        !(p2 && p4 && p6) && !(p4 && p6 && p8)
    } else {
        !(p2 && p4 && p8) && !(p2 && p6 && p8)
    }
}
