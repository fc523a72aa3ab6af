//! Matching detected holes to ground truth and the resulting confusion counts.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::detect::NegativeRegion;
use crate::error::{Error, Result};
use crate::holeid::even_odd_inside;
use crate::model::{Hole, Layout, NodeId, Point};
use crate::netgen::GroundTruth;
use crate::raster::ViewTransform;

pub const DEFAULT_JACCARD: f64 = 0.5;

pub fn jaccard(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Match {
    pub detected: usize,
    pub truth: usize,
    pub jaccard: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matching {
    pub pairs: Vec<Match>,
}

impl Matching {
    /// Same matching with the roles of the two lists swapped.
    pub fn transposed(&self) -> Matching {
        let mut pairs: Vec<Match> = self
            .pairs
            .iter()
            .map(|m| Match {
                detected: m.truth,
                truth: m.detected,
                jaccard: m.jaccard,
            })
            .collect();
        pairs.sort_by_key(|m| (m.detected, m.truth));
        Matching { pairs }
    }
}

/// Greedy highest-Jaccard-first matching; each hole is used at most once.
///
/// Ties are broken by the two boundary sets (smaller first) and then by index, in a way that
/// does not depend on which list is called "detected", so swapping the lists transposes the
/// result. Pairs are returned sorted by detected index.
pub fn match_holes(detected: &[Hole], truth: &[Hole], jaccard_min: f64) -> Result<Matching> {
    if !(jaccard_min > 0.0 && jaccard_min <= 1.0) {
        return Err(Error::InvalidInput(format!("jaccard_min {jaccard_min} outside (0, 1]")));
    }
    let mut cands = Vec::new();
    for (i, d) in detected.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let jac = jaccard(d.boundary(), t.boundary());
            if jac >= jaccard_min {
                cands.push((i, j, jac));
            }
        }
    }
    let key = |&(i, j, _): &(usize, usize, f64)| {
        let (a, b) = (detected[i].boundary(), truth[j].boundary());
        if a <= b {
            (a, b, i.min(j), i.max(j))
        } else {
            (b, a, i.min(j), i.max(j))
        }
    };
    cands.sort_by(|x, y| {
        y.2.total_cmp(&x.2)
            .then_with(|| key(x).cmp(&key(y)))
            .then_with(|| x.0.cmp(&y.0))
    });
    let mut used_d = vec![false; detected.len()];
    let mut used_t = vec![false; truth.len()];
    let mut pairs = Vec::new();
    for (i, j, jac) in cands {
        if !used_d[i] && !used_t[j] {
            used_d[i] = true;
            used_t[j] = true;
            pairs.push(Match {
                detected: i,
                truth: j,
                jaccard: jac,
            });
        }
    }
    pairs.sort_by_key(|m| (m.detected, m.truth));
    Ok(Matching { pairs })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl Confusion {
    /// `tp / (tp + fn)`, undefined without ground-truth holes.
    pub fn sensitivity(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `tn / (tn + fp)`, undefined without negatives or false positives.
    pub fn specificity(&self) -> Option<f64> {
        ratio(self.tn, self.tn + self.fp)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Boundary nodes at their ground-truth pixels, ordered by angle around their mean.
fn truth_polygon(hole: &Hole, coords: &Layout, transform: &ViewTransform) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = hole
        .boundary()
        .iter()
        .filter(|v| v.index() < coords.len())
        .map(|&v| transform.to_pixel(coords.position(v)))
        .collect();
    if pts.is_empty() {
        return pts;
    }
    let m = pts.len() as f64;
    let cx = pts.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let cy = pts.iter().map(|p| p.1 as f64).sum::<f64>() / m;
    let angle = |p: &(i64, i64)| (p.1 as f64 - cy).atan2(p.0 as f64 - cx);
    pts.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap_or(Ordering::Equal).then(a.cmp(b)));
    pts
}

/// TP and FN from the matching; an unmatched detection is a false positive when its
/// ground-truth polygon covers the seed pixel of some negative region, and a negative is a
/// true negative when no unmatched detection covers it.
pub fn compute_metrics(
    matching: &Matching,
    truth: &[Hole],
    detected: &[Hole],
    negatives: &[NegativeRegion],
    coords: &Layout,
    transform: &ViewTransform,
) -> Confusion {
    let tp = matching.pairs.len();
    let mut matched = vec![false; detected.len()];
    for m in &matching.pairs {
        matched[m.detected] = true;
    }
    let polygons: Vec<Vec<(i64, i64)>> = detected
        .iter()
        .zip(&matched)
        .filter(|(_, &m)| !m)
        .map(|(h, _)| truth_polygon(h, coords, transform))
        .filter(|p| p.len() >= 3)
        .collect();
    let seeds: Vec<Point> = negatives
        .iter()
        .map(|n| Point::new(n.seed.0 as f64, n.seed.1 as f64))
        .collect();
    let fp = polygons
        .iter()
        .filter(|poly| seeds.iter().any(|&s| even_odd_inside(s, poly)))
        .count();
    let tn = seeds
        .iter()
        .filter(|&&s| !polygons.iter().any(|poly| even_odd_inside(s, poly)))
        .count();
    Confusion {
        tp,
        fn_: truth.len() - tp,
        fp,
        tn,
    }
}

/// Matches `detected` against `truth` and counts outcomes.
pub fn evaluate(detected: &[Hole], truth: &GroundTruth, jaccard_min: f64) -> Result<Confusion> {
    let m = match_holes(detected, &truth.holes, jaccard_min)?;
    Ok(compute_metrics(
        &m,
        &truth.holes,
        detected,
        &truth.negatives,
        &truth.coords,
        &truth.transform,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hole(ids: &[u32]) -> Hole {
        Hole::new(ids.iter().map(|&i| NodeId(i)).collect(), None, 0, None).unwrap()
    }

    #[test]
    fn jaccard_examples() {
        let m = match_holes(&[hole(&[0, 1, 2, 3])], &[hole(&[0, 1, 2, 3])], 0.5).unwrap();
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].jaccard, 1.0);
        let m = match_holes(&[hole(&[0, 1, 2, 3])], &[hole(&[4, 5, 6, 7])], 0.5).unwrap();
        assert!(m.pairs.is_empty());
        // |∩| = 3, |∪| = 5
        let m = match_holes(&[hole(&[0, 1, 2, 3])], &[hole(&[1, 2, 3, 4])], 0.5).unwrap();
        assert!((m.pairs[0].jaccard - 0.6).abs() < 1e-12);
    }

    #[test]
    fn greedy_prefers_best_pair() {
        let det = [hole(&[0, 1, 2, 3, 4]), hole(&[0, 1, 2, 3])];
        let tru = [hole(&[0, 1, 2, 3])];
        let m = match_holes(&det, &tru, 0.5).unwrap();
        assert_eq!(m.pairs, vec![Match { detected: 1, truth: 0, jaccard: 1.0 }]);
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(match_holes(&[], &[], 0.0).is_err());
        assert!(match_holes(&[], &[], 1.5).is_err());
    }

    #[test]
    fn rates() {
        let c = Confusion { tp: 8, fn_: 2, fp: 7, tn: 93 };
        assert!((c.sensitivity().unwrap() - 0.8).abs() < 1e-12);
        assert!((c.specificity().unwrap() - 0.93).abs() < 1e-12);
        assert_eq!(Confusion::default().sensitivity(), None);
        assert_eq!(Confusion::default().specificity(), None);
    }
}
