use super::{Raster, Rgb};

/// Pixels of the integer line between `a` and `b`, inclusive of both endpoints.
///
/// Steps from the lexicographically smaller endpoint, so the set is symmetric in `(a, b)`.
/// Consecutive pixels are 8-adjacent.
pub fn line_pixels(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let (x0, y0) = a;
    let (x1, y1) = b;
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    let mut out = Vec::with_capacity((dx - dy + 1) as usize);
    loop {
        out.push((x, y));
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

/// Offsets `(dx, dy)` with `dx^2 + dy^2 <= r^2`, row-major.
pub fn disc_offsets(r: u32) -> Vec<(i64, i64)> {
    let r = r as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

pub(super) fn line(r: &mut Raster, a: (i64, i64), b: (i64, i64), c: Rgb, off: (i64, i64)) {
    for (x, y) in line_pixels(a, b) {
        r.put(x + off.0, y + off.1, c);
    }
}

pub(super) fn disc(r: &mut Raster, center: (i64, i64), radius: u32, c: Rgb, off: (i64, i64)) {
    for (dx, dy) in disc_offsets(radius) {
        r.put(center.0 + dx + off.0, center.1 + dy + off.1, c);
    }
}
