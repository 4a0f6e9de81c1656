//! Arena-clipped Voronoi cells by half-plane intersection.

use crate::geometry::{Point, Rect};
use crate::sim::ArenaSpec;
use alloc::vec::Vec;

const COINCIDENT_NUDGE: f64 = 1e-6;

/// Convex polygon, counter-clockwise.
pub type Polygon = Vec<Point>;

/// Keeps the part of `poly` where `(p - origin) · normal <= 0`.
fn clip(poly: &[Point], origin: Point, normal: Point) -> Polygon {
    let side = |p: Point| (p - origin).dot(normal);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Signed area and centroid of a simple polygon (shoelace).
pub fn area_centroid(poly: &[Point]) -> (f64, Option<Point>) {
    if poly.len() < 3 {
        return (0.0, None);
    }
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let c = p.cross(q);
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if a2.abs() < 1e-300 {
        return (0.0, None);
    }
    (0.5 * a2, Some(Point::new(cx / (3.0 * a2), cy / (3.0 * a2))))
}

/// Moves exactly coincident sites apart so every bisector is defined.
fn separate(sites: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(sites.len());
    for &s in sites {
        let mut p = s;
        while out.iter().any(|q| *q == p) {
            p.x += COINCIDENT_NUDGE;
        }
        out.push(p);
    }
    out
}

/// Voronoi cell of every site, clipped to `bounds`.
pub fn voronoi_cells(sites: &[Point], bounds: Rect) -> Vec<Polygon> {
    let sites = separate(sites);
    sites
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut cell: Polygon = bounds.corners().to_vec();
            for (j, &o) in sites.iter().enumerate() {
                if i == j || cell.is_empty() {
                    continue;
                }
                let mid = (s + o) * 0.5;
                cell = clip(&cell, mid, o - s);
            }
            cell
        })
        .collect()
}

/// Area-weighted centroid of each site's arena-clipped Voronoi cell.
pub fn voronoi_centroids(positions: &[Point], arena: &ArenaSpec) -> Vec<Point> {
    voronoi_cells(positions, arena.bounds())
        .iter()
        .zip(positions)
        .map(|(cell, &site)| area_centroid(cell).1.unwrap_or(site))
        .collect()
}
