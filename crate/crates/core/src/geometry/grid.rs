use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Worst-case ratio of a grid path to the straight segment for the
/// 32-neighbour stencil: the widest angular gap between moves is
/// `atan(1/3)`, so the factor is `1 / cos(atan(1/3) / 2)`.
pub const METRICATION_FACTOR: f64 = 1.013_081_457_233_19;

/// Generating predicate of a discretized domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Disk { center: [f64; 2], radius: f64 },
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    /// `{0 < x < x_max, 0 < y < e^{-x}}` minus the slits `y = e^{-k}/2, x ≥ 2`.
    Comb { teeth: usize, x_max: f64 },
    /// `{x_min < x < log(2 cos y), |y| < π/2}`.
    LogCos { x_min: f64 },
    /// `φ(|z| < radius)` for `φ(z) = (1 − (1−z)^{ic})/(ic)`.
    SpiralImage { c: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDescriptor {
    pub shape: Shape,
    pub resolution: f64,
}

/// Zero-width segment obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Shape {
    /// Exact membership of the open set (slits excluded).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Disk { center, radius } => (x - center[0]).hypot(y - center[1]) < radius,
            Shape::Rectangle { x0, y0, x1, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
            Shape::Comb { teeth, x_max } => {
                if !(x > 0.0 && x < x_max && y > 0.0 && y < (-x).exp()) {
                    return false;
                }
                if x >= 2.0 {
                    for k in 2..=teeth {
                        if y == (-(k as f64)).exp() / 2.0 {
                            return false;
                        }
                    }
                }
                true
            }
            Shape::LogCos { x_min } => in_log_cos(x, y) && x > x_min,
            Shape::SpiralImage { c, radius } => in_spiral_image(c, radius, x, y),
        }
    }

    fn bounding_box(&self) -> [f64; 4] {
        match *self {
            Shape::Disk { center, radius } => {
                [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius]
            }
            Shape::Rectangle { x0, y0, x1, y1 } => [x0, y0, x1, y1],
            Shape::Comb { x_max, .. } => [0.0, 0.0, x_max, 1.0],
            Shape::LogCos { x_min } => {
                let h = std::f64::consts::FRAC_PI_2;
                [x_min, -h, std::f64::consts::LN_2, h]
            }
            Shape::SpiralImage { c, .. } => {
                let b = (1.0 + (c * std::f64::consts::FRAC_PI_2).exp()) / c;
                [-b, -b, b, b]
            }
        }
    }

    fn slits(&self) -> Vec<Slit> {
        match *self {
            Shape::Comb { teeth, x_max } => (2..=teeth)
                .map(|k| {
                    let y = (-(k as f64)).exp() / 2.0;
                    Slit { a: [2.0, y], b: [x_max, y] }
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Disk { center, radius } => center.iter().all(|c| c.is_finite()) && radius > 0.0,
            Shape::Rectangle { x0, y0, x1, y1 } => x0 < x1 && y0 < y1 && [x0, y0, x1, y1].iter().all(|v| v.is_finite()),
            Shape::Comb { teeth, x_max } => teeth >= 2 && x_max > 2.0 && x_max.is_finite(),
            Shape::LogCos { x_min } => x_min.is_finite() && x_min < std::f64::consts::LN_2,
            Shape::SpiralImage { c, radius } => {
                c > 0.0 && c <= 0.5 && radius > 0.0 && radius < (std::f64::consts::PI / c).tanh()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad domain parameters {:?}", self)))
        }
    }
}

/// `x < log(2 cos y)` with `|y| < π/2`: the image of the disk `|z − 1| < 1`
/// under `log`.
pub fn in_log_cos(x: f64, y: f64) -> bool {
    y.abs() < std::f64::consts::FRAC_PI_2 && x < (2.0 * y.cos()).ln()
}

/// `w ∈ φ(|z| < r)`: solves `(1−z)^{ic} = 1 − icw` on every branch of the
/// logarithm with `log|1−z|` in range.
pub fn in_spiral_image(c: f64, r: f64, x: f64, y: f64) -> bool {
    use std::f64::consts::{FRAC_PI_2, TAU};
    let q = Complex::new(1.0 + c * y, -c * x);
    if q.norm() == 0.0 {
        return false;
    }
    let lq = q.ln();
    // log(1−z) = ((arg q + 2πk) − i log|q|)/c
    let im = -lq.re / c;
    if im.abs() >= FRAC_PI_2 {
        return false;
    }
    let lo = ((c * (1.0 - r).ln() - lq.im) / TAU).ceil() as i64;
    let hi = ((c * (1.0 + r).ln() - lq.im) / TAU).floor() as i64;
    (lo..=hi).any(|k| {
        let l = Complex::new((lq.im + TAU * k as f64) / c, im);
        (1.0 - l.exp()).norm() < r
    })
}

/// Occupancy grid over cell centers.
#[derive(Debug, Clone)]
pub struct DiscretizedDomain {
    shape: Shape,
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    bits: Vec<u64>,
    rank: Vec<u32>,
    occupied: usize,
    slits: Vec<Slit>,
}

impl DiscretizedDomain {
    pub fn new(shape: Shape, resolution: f64) -> Result<Self> {
        shape.validate()?;
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter("resolution must be positive".into()));
        }
        let [x0, y0, x1, y1] = shape.bounding_box();
        let nx = ((x1 - x0) / resolution).ceil() as usize;
        let ny = ((y1 - y0) / resolution).ceil() as usize;
        let cells = nx.checked_mul(ny).filter(|&n| n < (1usize << 32)).ok_or_else(|| {
            Error::InvalidParameter(format!("grid of {nx}×{ny} cells is too large"))
        })?;
        let words = cells.div_ceil(64);
        let mut bits = vec![0u64; words];
        for j in 0..ny {
            let y = y0 + (j as f64 + 0.5) * resolution;
            for i in 0..nx {
                let x = x0 + (i as f64 + 0.5) * resolution;
                if shape.contains(x, y) {
                    let id = j * nx + i;
                    bits[id / 64] |= 1 << (id % 64);
                }
            }
        }
        let mut rank = Vec::with_capacity(words);
        let mut acc = 0u32;
        for w in &bits {
            rank.push(acc);
            acc += w.count_ones();
        }
        let slits = shape.slits();
        Ok(Self { shape, origin: [x0, y0], h: resolution, nx, ny, bits, rank, occupied: acc as usize, slits })
    }

    pub fn from_descriptor(d: &DomainDescriptor) -> Result<Self> {
        Self::new(d.shape.clone(), d.resolution)
    }

    pub fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor { shape: self.shape.clone(), resolution: self.h }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn resolution(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn occupied_cells(&self) -> usize {
        self.occupied
    }

    pub fn slits(&self) -> &[Slit] {
        &self.slits
    }

    pub fn contains(&self, z: Complex<f64>) -> bool {
        self.shape.contains(z.re, z.im)
    }

    /// Base point `1 + i e^{-1}/2` of the comb domain.
    pub fn base_point(&self) -> Option<Complex<f64>> {
        match self.shape {
            Shape::Comb { .. } => Some(Complex::new(1.0, (-1.0f64).exp() / 2.0)),
            Shape::SpiralImage { .. } => Some(Complex::new(0.0, 0.0)),
            _ => None,
        }
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.bit(j * self.nx + i)
    }

    fn bit(&self, id: usize) -> bool {
        self.bits[id / 64] >> (id % 64) & 1 == 1
    }

    /// Compact index among occupied cells.
    fn rank_of(&self, id: usize) -> usize {
        let w = id / 64;
        let below = self.bits[w] & ((1u64 << (id % 64)) - 1);
        self.rank[w] as usize + below.count_ones() as usize
    }

    fn center(&self, id: usize) -> [f64; 2] {
        let (i, j) = (id % self.nx, id / self.nx);
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }

    /// A straight move is allowed when its quarter points are inside and it
    /// crosses no slit.
    fn segment_ok(&self, p: [f64; 2], q: [f64; 2]) -> bool {
        for t in [0.25, 0.5, 0.75] {
            let m = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
            if !self.shape.contains(m[0], m[1]) {
                return false;
            }
        }
        !self.slits.iter().any(|s| segments_meet(p, q, s.a, s.b))
    }

    fn occupied_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Occupied cells reachable by a straight admissible segment from `z`.
    fn attach(&self, z: Complex<f64>) -> Vec<(usize, f64)> {
        let p = [z.re, z.im];
        let ci = ((z.re - self.origin[0]) / self.h).floor() as i64;
        let cj = ((z.im - self.origin[1]) / self.h).floor() as i64;
        let mut out = Vec::new();
        for dj in -1..=1 {
            for di in -1..=1 {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
                    continue;
                }
                let id = j as usize * self.nx + i as usize;
                if !self.bit(id) {
                    continue;
                }
                let c = self.center(id);
                if self.slits.iter().any(|s| segments_meet(p, c, s.a, s.b)) {
                    continue;
                }
                out.push((id, (c[0] - p[0]).hypot(c[1] - p[1])));
            }
        }
        out
    }

    /// Multi-source Dijkstra; returns distances indexed by compact rank.
    fn dijkstra(&self, sources: &[(usize, f64)], target: Option<&[(usize, f64)]>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.occupied];
        let mut heap = BinaryHeap::new();
        for &(id, d0) in sources {
            let r = self.rank_of(id);
            if d0 < dist[r] {
                dist[r] = d0;
                heap.push(Entry(d0, id));
            }
        }
        let stop_ranks: Vec<usize> = target.map(|t| t.iter().map(|&(id, _)| self.rank_of(id)).collect()).unwrap_or_default();
        let mut remaining = stop_ranks.len();
        let mut settled = vec![false; if target.is_some() { self.occupied } else { 0 }];
        let step: Vec<f64> = NEIGHBOURS.iter().map(|&(a, b)| self.h * ((a * a + b * b) as f64).sqrt()).collect();
        while let Some(Entry(d, id)) = heap.pop() {
            let r = self.rank_of(id);
            if d > dist[r] {
                continue;
            }
            if target.is_some() && !settled[r] {
                settled[r] = true;
                if stop_ranks.contains(&r) {
                    remaining -= 1;
                    if remaining == 0 {
                        break;
                    }
                }
            }
            let (i, j) = ((id % self.nx) as i64, (id / self.nx) as i64);
            let c = self.center(id);
            for (&(di, dj), &w) in NEIGHBOURS.iter().zip(&step) {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni as usize >= self.nx || nj as usize >= self.ny {
                    continue;
                }
                let nid = nj as usize * self.nx + ni as usize;
                if !self.bit(nid) {
                    continue;
                }
                let nd = d + w;
                let nr = self.rank_of(nid);
                if nd >= dist[nr] {
                    continue;
                }
                if !self.segment_ok(c, self.center(nid)) {
                    continue;
                }
                dist[nr] = nd;
                heap.push(Entry(nd, nid));
            }
        }
        dist
    }

    /// Binary PGM (P5), top row first, occupied cells white.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        let mut row = vec![0u8; self.nx];
        for j in (0..self.ny).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                *px = if self.bit(j * self.nx + i) { 255 } else { 0 };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}

/// Moves `(±a, ±b)` and `(±b, ±a)` for `(a, b)` in
/// `(1,0), (1,1), (2,1), (3,1), (3,2)`.
const NEIGHBOURS: [(i64, i64); 32] = {
    let base = [(1, 0), (1, 1), (2, 1), (3, 1), (3, 2)];
    let mut out = [(0i64, 0i64); 32];
    let mut n = 0;
    let mut k = 0;
    while k < base.len() {
        let (a, b) = base[k];
        let cands = [(a, b), (-a, b), (a, -b), (-a, -b), (b, a), (-b, a), (b, -a), (-b, -a)];
        let mut c = 0;
        while c < 8 {
            let mut dup = false;
            let mut m = 0;
            while m < n {
                if out[m].0 == cands[c].0 && out[m].1 == cands[c].1 {
                    dup = true;
                }
                m += 1;
            }
            if !dup {
                out[n] = cands[c];
                n += 1;
            }
            c += 1;
        }
        k += 1;
    }
    out
};

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed segments `pq` and `ab` share a point.
fn segments_meet(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let d1 = orient(a, b, p);
    let d2 = orient(a, b, q);
    let d3 = orient(p, q, a);
    let d4 = orient(p, q, b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, b, p))
        || (d2 == 0.0 && on_segment(a, b, q))
        || (d3 == 0.0 && on_segment(p, q, a))
        || (d4 == 0.0 && on_segment(p, q, b))
}

/// Shortest admissible path length between two interior points.
pub fn geodesic_distance(d: &DiscretizedDomain, a: Complex<f64>, b: Complex<f64>) -> Result<f64> {
    for z in [a, b] {
        if !d.contains(z) {
            return Err(Error::EndpointNotInDomain { re: z.re, im: z.im });
        }
    }
    if a == b {
        return Ok(0.0);
    }
    let src = d.attach(a);
    let dst = d.attach(b);
    if src.is_empty() || dst.is_empty() {
        return Err(Error::NoPath);
    }
    let dist = d.dijkstra(&src, Some(&dst));
    let best = dst
        .iter()
        .map(|&(id, tail)| dist[d.rank_of(id)] + tail)
        .fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoPath)
    }
}

/// Grid estimate of the interior diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub value: f64,
    /// Cell size; the estimate carries an error of order this plus the
    /// metrication factor.
    pub resolution: f64,
    pub sources: usize,
    /// Occupied cells not reached from the first source (isolated pixels).
    pub unreachable_cells: usize,
}

/// Max over a fixed source sequence of the eccentricity within the grid.
/// Sources are a prefix of one deterministic sequence (double sweep, then a
/// low-discrepancy walk through the cells), so the value is nondecreasing
/// in `sample_count`.
pub fn interior_diameter(d: &DiscretizedDomain, sample_count: usize) -> Result<DiameterEstimate> {
    if d.occupied == 0 {
        return Err(Error::NoPath);
    }
    let ids: Vec<usize> = d.occupied_ids().collect();
    let n = ids.len();
    let mut used: Vec<usize> = Vec::new();
    let mut next = ids[0];
    let mut value = 0.0f64;
    let mut unreachable = 0;
    let mut walk = 0usize;
    const PHI: f64 = 0.618_033_988_749_894_9;
    for s in 0..sample_count.max(1) {
        used.push(next);
        let dist = d.dijkstra(&[(next, 0.0)], None);
        let mut far = (0.0f64, next);
        let mut miss = 0;
        for (r, &dv) in dist.iter().enumerate() {
            if dv.is_finite() {
                if dv > far.0 {
                    far = (dv, ids[r]);
                }
            } else {
                miss += 1;
            }
        }
        if s == 0 {
            unreachable = miss;
        }
        value = value.max(far.0);
        next = if !used.contains(&far.1) {
            far.1
        } else {
            loop {
                walk += 1;
                let cand = ids[((walk as f64 * PHI).fract() * n as f64) as usize % n];
                if !used.contains(&cand) || used.len() >= n {
                    break cand;
                }
            }
        };
    }
    Ok(DiameterEstimate { value, resolution: d.h, sources: used.len(), unreachable_cells: unreachable })
}

/// Cell size that puts two cells across the thinnest channel of the comb.
pub fn comb_default_resolution(teeth: usize) -> f64 {
    (-(teeth as f64)).exp() / 4.0
}

/// Comb domain with teeth `2..=teeth`.
pub fn make_comb_domain(teeth: usize, x_max: f64, resolution: f64) -> Result<DiscretizedDomain> {
    if teeth < 2 || !(x_max > 2.0) {
        return Err(Error::InvalidParameter("comb needs at least two teeth and x_max > 2".into()));
    }
    let gap = (-(teeth as f64)).exp() / 2.0;
    if resolution > gap / 2.0 {
        return Err(Error::ResolutionInsufficient { cell: resolution, gap });
    }
    DiscretizedDomain::new(Shape::Comb { teeth, x_max }, resolution)
}

pub fn make_log_cos_domain(x_min: f64, resolution: f64) -> Result<DiscretizedDomain> {
    DiscretizedDomain::new(Shape::LogCos { x_min }, resolution)
}
