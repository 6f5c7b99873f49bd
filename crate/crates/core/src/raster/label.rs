use super::{BinaryMask, InstanceMask, Point};

/// Splits the set pixels of `mask` into 8-connected instances.
///
/// Two-pass labelling with a union-find over provisional labels. Instance
/// ids run from 1 in raster-scan order of each component's first pixel.
pub fn label_components(mask: &BinaryMask) -> Vec<InstanceMask> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut labels = vec![0u32; w * h];
    // parent[0] is unused so provisional labels can start at 1
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !bits[i] {
                continue;
            }
            // already-visited neighbours: W, NW, N, NE
            let mut best = 0u32;
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            if x > 0 && labels[i - 1] != 0 {
                neighbours[n] = labels[i - 1];
                n += 1;
            }
            if y > 0 {
                let up = i - w;
                if x > 0 && labels[up - 1] != 0 {
                    neighbours[n] = labels[up - 1];
                    n += 1;
                }
                if labels[up] != 0 {
                    neighbours[n] = labels[up];
                    n += 1;
                }
                if x + 1 < w && labels[up + 1] != 0 {
                    neighbours[n] = labels[up + 1];
                    n += 1;
                }
            }
            for &l in &neighbours[..n] {
                let root = find(&mut parent, l);
                if best == 0 || root < best {
                    best = root;
                }
            }
            if best == 0 {
                best = parent.len() as u32;
                parent.push(best);
            } else {
                for &l in &neighbours[..n] {
                    union(&mut parent, l, best);
                }
            }
            labels[i] = best;
        }
    }

    // second pass: renumber roots by first appearance and gather pixels
    let mut final_id = vec![0u32; parent.len()];
    let mut groups: Vec<Vec<Point>> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == 0 {
                continue;
            }
            let root = find(&mut parent, l) as usize;
            if final_id[root] == 0 {
                groups.push(Vec::new());
                final_id[root] = groups.len() as u32;
            }
            groups[final_id[root] as usize - 1].push(Point::new(x as u32, y as u32));
        }
    }

    groups
        .into_iter()
        .enumerate()
        .map(|(i, pixels)| InstanceMask::from_sorted(i as u32 + 1, pixels))
        .collect()
}

fn find(parent: &mut [u32], mut l: u32) -> u32 {
    let mut root = l;
    while parent[root as usize] != root {
        root = parent[root as usize];
    }
    while parent[l as usize] != root {
        let next = parent[l as usize];
        parent[l as usize] = root;
        l = next;
    }
    root
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}
