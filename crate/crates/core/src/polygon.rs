//! Newton polygons in the `(r13, r23)` exponent plane, Minkowski sums,
//! inner normals and face restriction.  All geometry is exact integer
//! arithmetic.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{SparsePoly, VarId};

#[derive(Debug, Error, PartialEq)]
pub enum PolygonError {
    #[error("zero polynomial has no support")]
    ZeroPolynomial,
    #[error("polygon with {0} vertices has no edges")]
    DegeneratePolygon(usize),
}

pub type Point = (i64, i64);

/// Exponent vectors `(m, n)` of `r13^m r23^n` with nonzero coefficient.
pub type Support = BTreeSet<Point>;

/// Support in the `(r13, r23)` plane; coefficients may involve other
/// variables (e.g. `h`, `om`), and an exponent is present exactly when its
/// coefficient polynomial is nonzero.
pub fn support_of(p: &SparsePoly) -> Result<Support, PolygonError> {
    if p.is_zero() {
        return Err(PolygonError::ZeroPolynomial);
    }
    Ok(p.terms()
        .iter()
        .map(|(m, _)| (m.deg(VarId::R13) as i64, m.deg(VarId::R23) as i64))
        .collect())
}

fn cross(o: Point, a: Point, b: Point) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Convex lattice polygon: vertices counterclockwise starting at the
/// lexicographically smallest, no three consecutive collinear.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePolygon {
    pub vertices: Vec<Point>,
}

impl LatticePolygon {
    /// Whether `p` lies inside or on the boundary.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        match v.len() {
            0 => false,
            1 => v[0] == p,
            2 => {
                cross(v[0], v[1], p) == 0
                    && p.0 >= v[0].0.min(v[1].0)
                    && p.0 <= v[0].0.max(v[1].0)
                    && p.1 >= v[0].1.min(v[1].1)
                    && p.1 <= v[0].1.max(v[1].1)
            }
            n => (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= 0),
        }
    }

    /// Minimum of `a m + b n` over the polygon (attained at a vertex).
    pub fn min_weight(&self, normal: Point) -> i64 {
        self.vertices.iter().map(|&(m, n)| normal.0 * m + normal.1 * n).min().unwrap()
    }
}

/// Monotone-chain hull.
pub fn convex_hull<'a, I: IntoIterator<Item = &'a Point>>(points: I) -> LatticePolygon {
    let mut pts: Vec<Point> = points.into_iter().copied().collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return LatticePolygon { vertices: pts };
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // All points collinear: the chain degenerates to the two endpoints.
    if lower.len() == 2 || (lower.len() > 2 && lower.windows(3).all(|w| cross(w[0], w[1], w[2]) == 0)) {
        return LatticePolygon { vertices: vec![pts[0], *pts.last().unwrap()] };
    }
    LatticePolygon { vertices: lower }
}

/// Dense bit grid for sumsets of nonnegative points.
struct Grid {
    width: usize,
    rows: Vec<Vec<u64>>,
}

impl Grid {
    fn new(width: usize, height: usize) -> Grid {
        let words = width.div_ceil(64);
        Grid { width, rows: vec![vec![0; words]; height] }
    }

    fn set(&mut self, x: usize, y: usize) {
        self.rows[y][x / 64] |= 1 << (x % 64);
    }

    /// `self |= src shifted by (dx, dy)`.
    fn or_shifted(&mut self, src: &Grid, dx: usize, dy: usize) {
        let (wsh, bsh) = (dx / 64, dx % 64);
        for (y, row) in src.rows.iter().enumerate() {
            if row.iter().all(|&w| w == 0) {
                continue;
            }
            let dst = &mut self.rows[y + dy];
            for (i, &w) in row.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                let j = i + wsh;
                dst[j] |= w << bsh;
                if bsh > 0 && j + 1 < dst.len() {
                    dst[j + 1] |= w >> (64 - bsh);
                }
            }
        }
    }

    fn points(&self) -> Support {
        let mut out = Support::new();
        for (y, row) in self.rows.iter().enumerate() {
            for (i, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    let x = i * 64 + b;
                    debug_assert!(x < self.width);
                    out.insert((x as i64, y as i64));
                    w &= w - 1;
                }
            }
        }
        out
    }
}

/// Pointwise sumset and its hull.
pub fn minkowski_support(supports: &[Support]) -> (Support, LatticePolygon) {
    assert!(!supports.is_empty() && supports.iter().all(|s| !s.is_empty()));
    let offset: Vec<Point> = supports
        .iter()
        .map(|s| (s.iter().map(|p| p.0).min().unwrap(), s.iter().map(|p| p.1).min().unwrap()))
        .collect();
    let width: i64 = supports.iter().zip(&offset).map(|(s, o)| s.iter().map(|p| p.0).max().unwrap() - o.0).sum();
    let height: i64 = supports.iter().zip(&offset).map(|(s, o)| s.iter().map(|p| p.1).max().unwrap() - o.1).sum();
    let (w, h) = (width as usize + 1, height as usize + 1);
    let mut acc = Grid::new(w + 64, h);
    acc.set(0, 0);
    for (s, o) in supports.iter().zip(&offset) {
        let mut next = Grid::new(w + 64, h);
        for &(x, y) in s {
            next.or_shifted(&acc, (x - o.0) as usize, (y - o.1) as usize);
        }
        acc = next;
    }
    let shift = offset.iter().fold((0, 0), |a, o| (a.0 + o.0, a.1 + o.1));
    let sum: Support = acc.points().into_iter().map(|(x, y)| (x + shift.0, y + shift.1)).collect();
    let hull = convex_hull(&sum);
    (sum, hull)
}

/// Which inner normals to examine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RelevanceFilter {
    /// Normals with `a + b >= 0`.
    #[default]
    LowerLeft,
    /// Every edge.
    AllEdges,
}

impl RelevanceFilter {
    pub fn accepts(self, normal: Point) -> bool {
        match self {
            RelevanceFilter::LowerLeft => normal.0 + normal.1 >= 0,
            RelevanceFilter::AllEdges => true,
        }
    }
}

/// An edge and its primitive inner normal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeNormal {
    pub edge: (Point, Point),
    pub normal: Point,
}

/// Inner normals of every edge, in vertex order.
pub fn edge_normals(poly: &LatticePolygon) -> Result<Vec<EdgeNormal>, PolygonError> {
    let v = &poly.vertices;
    if v.len() < 3 {
        return Err(PolygonError::DegeneratePolygon(v.len()));
    }
    Ok((0..v.len())
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % v.len()]);
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let g = dx.gcd(&dy);
            // Counterclockwise order: the interior is on the left.
            EdgeNormal { edge: (p, q), normal: (-dy / g, dx / g) }
        })
        .collect())
}

/// Normals passing the filter.
pub fn relevant_normals(poly: &LatticePolygon, filter: RelevanceFilter) -> Result<Vec<EdgeNormal>, PolygonError> {
    Ok(edge_normals(poly)?.into_iter().filter(|e| filter.accepts(e.normal)).collect())
}

/// Sub-polynomial on the face minimizing `a m + b n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub poly: SparsePoly,
    pub weight: i64,
    /// The face is a single exponent vector.
    pub is_vertex: bool,
}

pub fn face_restrict(p: &SparsePoly, normal: Point) -> Result<Face, PolygonError> {
    if p.is_zero() {
        return Err(PolygonError::ZeroPolynomial);
    }
    let score = |m: &crate::poly::Monomial| normal.0 * m.deg(VarId::R13) as i64 + normal.1 * m.deg(VarId::R23) as i64;
    let weight = p.terms().iter().map(|(m, _)| score(m)).min().unwrap();
    let terms: Vec<_> = p.terms().iter().filter(|(m, _)| score(m) == weight).cloned().collect();
    let poly = SparsePoly::from_terms(terms);
    let is_vertex = support_of(&poly)?.len() == 1;
    Ok(Face { poly, weight, is_vertex })
}

/// Quasi-homogeneity of `p` under the weight `normal`.
pub fn is_quasi_homogeneous(p: &SparsePoly, normal: Point) -> bool {
    let mut w = p.terms().iter().map(|(m, _)| normal.0 * m.deg(VarId::R13) as i64 + normal.1 * m.deg(VarId::R23) as i64);
    match w.next() {
        None => true,
        Some(first) => w.all(|x| x == first),
    }
}
