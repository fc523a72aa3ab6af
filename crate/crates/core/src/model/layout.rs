use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::model::NodeId;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// A 2-D position for every node, indexed by [`NodeId`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Layout {
    positions: Vec<Point>,
}

impl Layout {
    pub fn new(positions: Vec<Point>) -> Self {
        Layout { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, v: NodeId) -> Point {
        self.positions[v.index()]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [Point] {
        &mut self.positions
    }

    /// `(min, max)` corners, or `None` for an empty layout.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let first = *self.positions.first()?;
        Some(self.positions.iter().fold((first, first), |(lo, hi), p| {
            (
                Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    /// Serializes to `.lay`: `id,x,y` per node, ids ascending, six decimals.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::with_capacity(self.positions.len() * 24);
        for (i, p) in self.positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::Serialize(format!(
                    "node {i} has non-finite coordinate ({}, {})",
                    p.x, p.y
                )));
            }
            out.push_str(&format!("{i},{:.6},{:.6}\n", p.x, p.y));
        }
        Ok(out)
    }

    /// Parses `.lay`. Lines may appear in any order but ids must cover `0..n` exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, Point)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(lineno, "expected 'id,x,y'"));
            }
            let id: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad node id '{}'", fields[0])))?;
            let x: f64 = fields[1]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad x '{}'", fields[1])))?;
            let y: f64 = fields[2]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad y '{}'", fields[2])))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::parse(lineno, "non-finite coordinate"));
            }
            entries.push((id, Point::new(x, y)));
        }
        let n = entries.len();
        let mut positions = vec![None; n];
        for (id, p) in entries {
            match positions.get_mut(id) {
                Some(slot @ None) => *slot = Some(p),
                Some(Some(_)) => {
                    return Err(Error::InvalidInput(format!("node {id} listed twice")))
                }
                None => {
                    return Err(Error::InvalidInput(format!(
                        "node id {id} out of range for {n} entries"
                    )))
                }
            }
        }
        Ok(Layout::new(positions.into_iter().map(Option::unwrap).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_at_origin() {
        let l = Layout::new(vec![Point::new(0.0, 0.0)]);
        assert_eq!(l.to_text().unwrap(), "0,0.000000,0.000000\n");
    }

    #[test]
    fn empty_layout_writes_nothing() {
        assert_eq!(Layout::default().to_text().unwrap(), "");
        assert!(Layout::parse("").unwrap().is_empty());
    }

    #[test]
    fn non_finite_is_a_serialization_error() {
        let l = Layout::new(vec![Point::new(f64::NAN, 0.0)]);
        assert!(matches!(l.to_text(), Err(Error::Serialize(_))));
    }

    #[test]
    fn parse_rejects_gaps_and_duplicates() {
        assert!(Layout::parse("0,1,1\n2,1,1\n").is_err());
        assert!(Layout::parse("0,1,1\n0,1,1\n").is_err());
        assert!(matches!(
            Layout::parse("0,1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
