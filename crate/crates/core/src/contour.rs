//! Marching-squares extraction of threshold level sets from scalar fields on
//! a cartesian lattice, producing plot-ready polylines.
//!
//! Crossing points are computed once per lattice edge and cells connect edge
//! ids, so chains join exactly without floating-point keying; saddle cells
//! are disambiguated by the cell-center average.

use std::collections::HashMap;

/// A scalar field sampled on a regular cartesian lattice, row-major in `x`
/// (index `i` runs over `xs`, `j` over `ys`, value at `i * ys.len() + j`).
#[derive(Debug, Clone)]
pub struct ScalarLattice {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarLattice {
    pub fn from_fn(xs: Vec<f64>, ys: Vec<f64>, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                values.push(f(x, y));
            }
        }
        ScalarLattice { xs, ys, values }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// An extracted iso-line.
#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    /// Area centroid (shoelace) for closed curves, vertex mean otherwise.
    pub fn centroid(&self) -> [f64; 2] {
        if self.closed && self.points.len() >= 3 {
            let mut area2 = 0.0;
            let mut cx = 0.0;
            let mut cy = 0.0;
            for k in 0..self.points.len() {
                let [x0, y0] = self.points[k];
                let [x1, y1] = self.points[(k + 1) % self.points.len()];
                let cross = x0 * y1 - x1 * y0;
                area2 += cross;
                cx += (x0 + x1) * cross;
                cy += (y0 + y1) * cross;
            }
            if area2.abs() > 1e-300 {
                return [cx / (3.0 * area2), cy / (3.0 * area2)];
            }
        }
        let n = self.points.len() as f64;
        let sx: f64 = self.points.iter().map(|p| p[0]).sum();
        let sy: f64 = self.points.iter().map(|p| p[1]).sum();
        [sx / n, sy / n]
    }
}

/// Edge identifier: horizontal edges run along x between `(i, j)` and
/// `(i+1, j)`; vertical edges along y between `(i, j)` and `(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    H(usize, usize),
    V(usize, usize),
}

/// Extract the `threshold` level set as a set of polylines. Returns an empty
/// vector when the threshold misses the field's range.
pub fn marching_squares(lattice: &ScalarLattice, threshold: f64) -> Vec<Polyline> {
    let nx = lattice.xs.len();
    let ny = lattice.ys.len();
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let above = |i: usize, j: usize| lattice.value(i, j) >= threshold;
    let interp = |a: f64, b: f64| (threshold - a) / (b - a);

    // crossing coordinates, one per edge
    let mut crossings: HashMap<EdgeId, [f64; 2]> = HashMap::new();
    for i in 0..nx - 1 {
        for j in 0..ny {
            let (a, b) = (lattice.value(i, j), lattice.value(i + 1, j));
            if (a >= threshold) != (b >= threshold) {
                let t = interp(a, b);
                let x = lattice.xs[i] + t * (lattice.xs[i + 1] - lattice.xs[i]);
                crossings.insert(EdgeId::H(i, j), [x, lattice.ys[j]]);
            }
        }
    }
    for i in 0..nx {
        for j in 0..ny - 1 {
            let (a, b) = (lattice.value(i, j), lattice.value(i, j + 1));
            if (a >= threshold) != (b >= threshold) {
                let t = interp(a, b);
                let y = lattice.ys[j] + t * (lattice.ys[j + 1] - lattice.ys[j]);
                crossings.insert(EdgeId::V(i, j), [lattice.xs[i], y]);
            }
        }
    }

    // per-cell segments connecting crossed edges
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let code = (above(i, j) as u8)
                | (above(i + 1, j) as u8) << 1
                | (above(i + 1, j + 1) as u8) << 2
                | (above(i, j + 1) as u8) << 3;
            let bottom = EdgeId::H(i, j);
            let top = EdgeId::H(i, j + 1);
            let left = EdgeId::V(i, j);
            let right = EdgeId::V(i + 1, j);
            match code {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    // saddle: split by the cell-center average
                    let center = 0.25
                        * (lattice.value(i, j)
                            + lattice.value(i + 1, j)
                            + lattice.value(i + 1, j + 1)
                            + lattice.value(i, j + 1));
                    let center_above = center >= threshold;
                    if (code == 5) == center_above {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((left, top));
                        segments.push((right, bottom));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    chain_segments(&segments, &crossings)
}

/// Join segments into polylines; each edge appears in at most two cells, so
/// the adjacency graph has degree <= 2 and decomposes into paths and cycles.
fn chain_segments(
    segments: &[(EdgeId, EdgeId)],
    crossings: &HashMap<EdgeId, [f64; 2]>,
) -> Vec<Polyline> {
    let mut adj: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start_seg: usize,
                start_edge: EdgeId,
                used: &mut Vec<bool>|
     -> (Vec<EdgeId>, bool) {
        let mut path = vec![start_edge];
        let mut cur_seg = start_seg;
        let mut cur_edge = start_edge;
        loop {
            used[cur_seg] = true;
            let (a, b) = segments[cur_seg];
            let next_edge = if a == cur_edge { b } else { a };
            if next_edge == path[0] {
                return (path, true);
            }
            path.push(next_edge);
            let next_seg = adj[&next_edge]
                .iter()
                .copied()
                .find(|&s| !used[s]);
            match next_seg {
                Some(s) => {
                    cur_seg = s;
                    cur_edge = next_edge;
                }
                None => return (path, false),
            }
        }
    };

    // open paths first: start from degree-1 edges
    let mut starts: Vec<(usize, EdgeId)> = Vec::new();
    for (edge, segs) in &adj {
        if segs.len() == 1 {
            starts.push((segs[0], *edge));
        }
    }
    starts.sort_by_key(|&(s, _)| s);
    for (seg, edge) in starts {
        if !used[seg] {
            let (path, closed) = walk(seg, edge, &mut used);
            out.push(make_polyline(path, closed, crossings));
        }
    }
    // remaining segments belong to cycles
    for k in 0..segments.len() {
        if !used[k] {
            let (path, closed) = walk(k, segments[k].0, &mut used);
            out.push(make_polyline(path, closed, crossings));
        }
    }
    // deterministic order: by first vertex
    out.sort_by(|a, b| {
        a.points[0]
            .partial_cmp(&b.points[0])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

fn make_polyline(
    path: Vec<EdgeId>,
    closed: bool,
    crossings: &HashMap<EdgeId, [f64; 2]>,
) -> Polyline {
    let points = path.iter().map(|e| crossings[e]).collect();
    Polyline { points, closed }
}
