//! Convex lattice polygons: hulls, lattice point counts and the target
//! polygon family `Δ_r`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("empty point set")]
    Empty,
    #[error("polygon is degenerate ({0} distinct vertices)")]
    Degenerate(usize),
    #[error("invalid right profile: {0}")]
    InvalidProfile(String),
    #[error("edge {0:?}-{1:?} has {2} lattice points, expected 2")]
    EdgeNotPrimitive(LatticePoint, LatticePoint, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[i64; 2]>::deserialize(d)?;
        Ok(LatticePoint { x, y })
    }
}

fn cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i128 {
    (a.x - o.x) as i128 * (b.y - o.y) as i128 - (a.y - o.y) as i128 * (b.x - o.x) as i128
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lattice points on the closed segment `a`–`b`.
pub fn edge_lattice_count(a: LatticePoint, b: LatticePoint) -> u64 {
    gcd(a.x.abs_diff(b.x), a.y.abs_diff(b.y)) + 1
}

/// Convex lattice polygon: counterclockwise vertices starting at the
/// lexicographically least one, no three consecutive collinear. One or two
/// vertices denote a degenerate point or segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePolygon {
    vertices: Vec<LatticePoint>,
}

/// Interior and boundary lattice point counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCounts {
    pub interior: u64,
    pub boundary: u64,
}

impl LatticePolygon {
    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Edges as consecutive vertex pairs, closing the loop.
    pub fn edges(&self) -> impl Iterator<Item = (LatticePoint, LatticePoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Twice the enclosed area.
    pub fn twice_area(&self) -> i128 {
        let o = self.vertices[0];
        self.vertices.windows(2).skip(1).map(|w| cross(o, w[0], w[1])).sum()
    }

    /// Whether `pt` lies in the closed polygon.
    pub fn contains(&self, pt: LatticePoint) -> bool {
        match self.vertices.len() {
            1 => self.vertices[0] == pt,
            2 => on_segment(self.vertices[0], self.vertices[1], pt),
            _ => self.edges().all(|(a, b)| cross(a, b, pt) >= 0),
        }
    }

    /// Whether `pt` lies on the boundary.
    pub fn on_boundary(&self, pt: LatticePoint) -> bool {
        self.edges().any(|(a, b)| on_segment(a, b, pt))
    }

    /// Lattice points strictly inside, in row-major order.
    pub fn interior_points(&self) -> Vec<LatticePoint> {
        if self.is_degenerate() {
            return Vec::new();
        }
        let (ymin, ymax) = self.y_range();
        let mut out = Vec::new();
        for y in ymin + 1..ymax {
            let (lo, hi) = self.row_interior_range(y);
            out.extend((lo..=hi).map(|x| LatticePoint::new(x, y)));
        }
        out
    }

    fn y_range(&self) -> (i64, i64) {
        let ymin = self.vertices.iter().map(|v| v.y).min().unwrap();
        let ymax = self.vertices.iter().map(|v| v.y).max().unwrap();
        (ymin, ymax)
    }

    /// Rational x-extent of row `y` as (left num, den, right num, den),
    /// taken over all edges crossing the row.
    fn row_extent(&self, y: i64) -> ((i128, i128), (i128, i128)) {
        let mut left: Option<(i128, i128)> = None;
        let mut right: Option<(i128, i128)> = None;
        let mut push = |n: i128, d: i128| {
            if left.is_none_or(|(ln, ld)| n * ld < ln * d) {
                left = Some((n, d));
            }
            if right.is_none_or(|(rn, rd)| n * rd > rn * d) {
                right = Some((n, d));
            }
        };
        for (a, b) in self.edges() {
            let (lo, hi) = if a.y <= b.y { (a, b) } else { (b, a) };
            if y < lo.y || y > hi.y {
                continue;
            }
            if lo.y == hi.y {
                push(lo.x as i128, 1);
                push(hi.x as i128, 1);
            } else {
                let d = (hi.y - lo.y) as i128;
                let n = lo.x as i128 * d + (y - lo.y) as i128 * (hi.x - lo.x) as i128;
                push(n, d);
            }
        }
        (left.unwrap(), right.unwrap())
    }

    /// Integer x range strictly inside the polygon on a row strictly between
    /// the extreme rows. Empty ranges have lo > hi.
    fn row_interior_range(&self, y: i64) -> (i64, i64) {
        let ((ln, ld), (rn, rd)) = self.row_extent(y);
        let lo = ln.div_euclid(ld) + 1;
        let hi = -((-rn).div_euclid(rd)) - 1;
        (lo as i64, hi as i64)
    }

    fn row_closed_range(&self, y: i64) -> (i64, i64) {
        let ((ln, ld), (rn, rd)) = self.row_extent(y);
        let lo = -((-ln).div_euclid(ld));
        let hi = rn.div_euclid(rd);
        (lo as i64, hi as i64)
    }

    /// Counts via Pick's theorem: `2A = 2I + B − 2`.
    pub fn counts_by_pick(&self) -> Result<LatticeCounts, LatticeError> {
        if self.is_degenerate() {
            return Err(LatticeError::Degenerate(self.vertices.len()));
        }
        let boundary: u64 = self.edges().map(|(a, b)| edge_lattice_count(a, b) - 1).sum();
        let twice_interior = self.twice_area() - boundary as i128 + 2;
        debug_assert!(twice_interior % 2 == 0);
        Ok(LatticeCounts { interior: (twice_interior / 2) as u64, boundary })
    }

    /// Counts by scanning rows with exact rational edge crossings.
    pub fn counts_by_rows(&self) -> Result<LatticeCounts, LatticeError> {
        if self.is_degenerate() {
            return Err(LatticeError::Degenerate(self.vertices.len()));
        }
        let (ymin, ymax) = self.y_range();
        let mut total = 0u64;
        let mut interior = 0u64;
        for y in ymin..=ymax {
            let (lo, hi) = self.row_closed_range(y);
            if hi >= lo {
                total += (hi - lo + 1) as u64;
            }
            if y > ymin && y < ymax {
                let (lo, hi) = self.row_interior_range(y);
                if hi >= lo {
                    interior += (hi - lo + 1) as u64;
                }
            }
        }
        Ok(LatticeCounts { interior, boundary: total - interior })
    }
}

fn on_segment(a: LatticePoint, b: LatticePoint, p: LatticePoint) -> bool {
    cross(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Minimal convex polygon containing the points (monotone chain).
pub fn convex_hull(points: &[LatticePoint]) -> Result<LatticePolygon, LatticeError> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        return Err(LatticeError::Empty);
    }
    if pts.len() <= 2 {
        return Ok(LatticePolygon { vertices: pts });
    }
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    // all collinear: monotone chain returns the two endpoints
    Ok(LatticePolygon { vertices: lower })
}

/// Interior and boundary counts; Pick and row scan are cross-checked in debug builds.
pub fn lattice_counts(poly: &LatticePolygon) -> Result<LatticeCounts, LatticeError> {
    let rows = poly.counts_by_rows()?;
    debug_assert_eq!(Some(rows), poly.counts_by_pick().ok());
    Ok(rows)
}

/// `conv{(0,0), (0,γ), (r,γ), (r+ℓ′_1, γ−1), …, (r+ℓ′_γ, 0)}` for the
/// right-hand slopes `kp = (k′_1, …, k′_γ)`.
pub fn delta_r(gamma: usize, kp: &[i64], r: i64) -> Result<LatticePolygon, LatticeError> {
    if gamma < 1 || kp.len() != gamma {
        return Err(LatticeError::InvalidProfile(format!(
            "expected {gamma} right-hand slopes, got {}",
            kp.len()
        )));
    }
    if r < 1 {
        return Err(LatticeError::InvalidProfile(format!("r = {r} must be at least 1")));
    }
    if kp.windows(2).any(|w| w[0] <= w[1]) {
        return Err(LatticeError::InvalidProfile("k′ must be strictly decreasing".into()));
    }
    let g = gamma as i64;
    let mut pts = vec![LatticePoint::new(0, 0), LatticePoint::new(0, g), LatticePoint::new(r, g)];
    let mut lp = 0i64;
    let mut right = vec![LatticePoint::new(r, g)];
    for (j, &k) in kp.iter().enumerate() {
        lp += k;
        let v = LatticePoint::new(r + lp, g - 1 - j as i64);
        pts.push(v);
        right.push(v);
    }
    if right.iter().any(|v| v.x <= 0) {
        return Err(LatticeError::Degenerate(0));
    }
    let poly = convex_hull(&pts)?;
    if poly.is_degenerate() || poly.vertices.len() != gamma + 3 {
        return Err(LatticeError::Degenerate(poly.vertices.len()));
    }
    for w in right.windows(2) {
        let n = edge_lattice_count(w[0], w[1]);
        if n != 2 {
            return Err(LatticeError::EdgeNotPrimitive(w[0], w[1], n));
        }
    }
    Ok(poly)
}
