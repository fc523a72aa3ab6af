use crate::model::Point;

use super::contour::Contour;

/// True when `p` is inside the contour polygon (even-odd) or within `tolerance` pixels of it.
pub fn point_polygon_test(p: Point, contour: &Contour, tolerance: f64) -> bool {
    let pts = contour.points();
    if pts.is_empty() {
        return false;
    }
    if distance_to_polyline(p, pts) <= tolerance {
        return true;
    }
    pts.len() >= 3 && even_odd_inside(p, pts)
}

/// Distance from `p` to the closed polyline through `pts`.
pub fn distance_to_polyline(p: Point, pts: &[(i64, i64)]) -> f64 {
    let n = pts.len();
    if n == 1 {
        return p.distance(Point::new(pts[0].0 as f64, pts[0].1 as f64));
    }
    (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            segment_distance(
                p,
                Point::new(a.0 as f64, a.1 as f64),
                Point::new(b.0 as f64, b.1 as f64),
            )
        })
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let ap = p - a;
    let t = ((ap.x * ab.x + ap.y * ab.y) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Even-odd crossing test against a horizontal ray toward +x.
pub fn even_odd_inside(p: Point, pts: &[(i64, i64)]) -> bool {
    let n = pts.len();
    if n == 0 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (pts[i].0 as f64, pts[i].1 as f64);
        let (xj, yj) = (pts[j].0 as f64, pts[j].1 as f64);
        if (yi > p.y) != (yj > p.y) && p.x < (xj - xi) * (p.y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Contour {
        Contour::new(vec![(0, 0), (10, 0), (10, 10), (0, 10)])
    }

    #[test]
    fn centroid_of_convex_contour_is_inside() {
        assert!(point_polygon_test(Point::new(5.0, 5.0), &square(), 0.0));
    }

    #[test]
    fn far_outside_is_rejected() {
        let tol = 3.0;
        assert!(!point_polygon_test(Point::new(10.0 + 2.0 * tol, 5.0), &square(), tol));
        assert!(point_polygon_test(Point::new(10.0 + 0.9 * tol, 5.0), &square(), tol));
    }

    #[test]
    fn degenerate_contours() {
        let one = Contour::new(vec![(4, 4)]);
        assert!(point_polygon_test(Point::new(5.0, 5.0), &one, 1.5));
        assert!(!point_polygon_test(Point::new(8.0, 4.0), &one, 3.0));
        assert!(!point_polygon_test(Point::new(0.0, 0.0), &Contour::new(vec![]), 10.0));
    }
}
