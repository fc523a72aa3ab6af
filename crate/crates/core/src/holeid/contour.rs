//! Moore-neighborhood border following.

use crate::model::PixelRect;

use super::components::Labels;

/// Closed sequence of boundary pixels of one region, clockwise on screen (y down).
///
/// Regions of one or two pixels give degenerate contours with fewer than three points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contour {
    points: Vec<(i64, i64)>,
}

impl Contour {
    pub fn new(points: Vec<(i64, i64)>) -> Self {
        Contour { points }
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bbox(&self) -> Option<PixelRect> {
        let xs = self.points.iter().map(|p| p.0);
        let ys = self.points.iter().map(|p| p.1);
        Some(PixelRect {
            x0: xs.clone().min()? as u32,
            y0: ys.clone().min()? as u32,
            x1: xs.max()? as u32 + 1,
            y1: ys.max()? as u32 + 1,
        })
    }

    /// Twice the signed shoelace area; positive means clockwise on screen.
    pub fn signed_area2(&self) -> i64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum()
    }
}

// Clockwise on screen: E, SE, S, SW, W, NW, N, NE.
const DIRS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const WEST: usize = 4;

/// Traces the outer border of component `k` starting at its topmost-leftmost pixel.
///
/// Stops on Jacob's criterion: back at the start pixel about to repeat the first move.
pub fn trace_outer(labels: &Labels, k: usize) -> Contour {
    let comp = &labels.components[k];
    let want = k as u32 + 1;
    let start = (comp.first.0 as i64, comp.first.1 as i64);
    let mut points = vec![start];
    let mut cur = start;
    let mut scan_from = (WEST + 1) % 8;
    let mut first_dir = None;
    let limit = 4 * comp.area as usize + 8;

    for _ in 0..limit {
        let found = (0..8).map(|i| (scan_from + i) % 8).find(|&d| {
            let (dx, dy) = DIRS[d];
            labels.at(cur.0 + dx, cur.1 + dy) == want
        });
        let Some(d) = found else {
            break; // isolated pixel
        };
        match first_dir {
            None => first_dir = Some(d),
            Some(d0) if cur == start && d == d0 => {
                points.pop();
                break;
            }
            _ => {}
        }
        cur = (cur.0 + DIRS[d].0, cur.1 + DIRS[d].1);
        points.push(cur);
        scan_from = if d % 2 == 0 { (d + 7) % 8 } else { (d + 6) % 8 };
    }
    Contour { points }
}
