//! 4-connected component labeling over a pixel predicate.

use std::collections::VecDeque;

use crate::model::{PixelRect, Point};

/// Statistics for one labeled component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStats {
    /// Topmost-then-leftmost pixel.
    pub first: (u32, u32),
    pub area: u64,
    pub bbox: PixelRect,
    pub sum_x: u64,
    pub sum_y: u64,
    pub touches_border: bool,
}

impl ComponentStats {
    pub fn area_centroid(&self) -> Point {
        Point::new(
            self.sum_x as f64 / self.area as f64,
            self.sum_y as f64 / self.area as f64,
        )
    }
}

/// Label image: `0` for non-members, `k + 1` for pixels of component `k`.
#[derive(Clone, Debug)]
pub struct Labels {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub components: Vec<ComponentStats>,
}

impl Labels {
    #[inline]
    pub fn at(&self, x: i64, y: i64) -> u32 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            0
        } else {
            self.labels[y as usize * self.width as usize + x as usize]
        }
    }

    /// Pixels of component `k` (0-based), row-major.
    pub fn pixels_of(&self, k: usize) -> Vec<(u32, u32)> {
        let c = &self.components[k];
        let want = k as u32 + 1;
        let mut out = Vec::with_capacity(c.area as usize);
        for y in c.bbox.y0..c.bbox.y1 {
            for x in c.bbox.x0..c.bbox.x1 {
                if self.labels[y as usize * self.width as usize + x as usize] == want {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Labels maximal 4-connected sets of pixels satisfying `member(index)`.
///
/// Components are numbered in row-major order of their first pixel.
pub fn label_components(width: u32, height: u32, member: impl Fn(usize) -> bool) -> Labels {
    let (w, h) = (width as usize, height as usize);
    let mut labels = vec![0u32; w * h];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if labels[start] != 0 || !member(start) {
            continue;
        }
        let id = components.len() as u32 + 1;
        let (sx, sy) = ((start % w) as u32, (start / w) as u32);
        let mut st = ComponentStats {
            first: (sx, sy),
            area: 0,
            bbox: PixelRect {
                x0: sx,
                y0: sy,
                x1: sx + 1,
                y1: sy + 1,
            },
            sum_x: 0,
            sum_y: 0,
            touches_border: false,
        };
        labels[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            st.area += 1;
            st.sum_x += x as u64;
            st.sum_y += y as u64;
            st.bbox.x0 = st.bbox.x0.min(x as u32);
            st.bbox.y0 = st.bbox.y0.min(y as u32);
            st.bbox.x1 = st.bbox.x1.max(x as u32 + 1);
            st.bbox.y1 = st.bbox.y1.max(y as u32 + 1);
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                st.touches_border = true;
            }
            let mut visit = |j: usize| {
                if labels[j] == 0 && member(j) {
                    labels[j] = id;
                    queue.push_back(j);
                }
            };
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if x > 0 {
                visit(i - 1);
            }
        }
        components.push(st);
    }
    Labels {
        width,
        height,
        labels,
        components,
    }
}
