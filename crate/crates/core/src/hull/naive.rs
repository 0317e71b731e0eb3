use std::collections::{BTreeMap, HashMap};

use super::{feature_set, features_of, DynamicHull, Extreme, HullDiff, HullError};
use crate::geom::{Coord, Corner, Point, Side, Vector};
use crate::oracle;

/// Recomputes the hull from scratch after every update and diffs the full
/// feature sets. `O(n log n)` per update; used as an oracle.
#[derive(Clone, Debug, Default)]
pub struct NaiveHull {
    ids: HashMap<u64, Coord>,
    counts: BTreeMap<Coord, u32>,
    cycle: Vec<Coord>,
}

impl NaiveHull {
    pub fn new() -> Self {
        Self::default()
    }

    fn recompute(&mut self) -> HullDiff {
        let pts: Vec<Coord> = self.counts.keys().copied().collect();
        let fresh = oracle::convex_hull(&pts);
        let diff = HullDiff::between(&feature_set(&self.cycle), &feature_set(&fresh));
        self.cycle = fresh;
        diff
    }

    fn position(&self, v: Coord) -> Option<usize> {
        self.cycle.iter().position(|&c| c == v)
    }
}

impl DynamicHull for NaiveHull {
    fn insert_point(&mut self, p: Point) -> Result<HullDiff, HullError> {
        let c = p.coord();
        if !c.in_bounds() {
            return Err(HullError::CoordinateOutOfRange(c));
        }
        if self.ids.contains_key(&p.id) {
            return Err(HullError::DuplicateId(p.id));
        }
        self.ids.insert(p.id, c);
        *self.counts.entry(c).or_insert(0) += 1;
        Ok(self.recompute())
    }

    fn delete_point(&mut self, id: u64) -> Result<HullDiff, HullError> {
        let c = self.ids.remove(&id).ok_or(HullError::UnknownId(id))?;
        let n = self.counts.get_mut(&c).expect("live coordinate");
        *n -= 1;
        if *n == 0 {
            self.counts.remove(&c);
        }
        Ok(self.recompute())
    }

    fn extreme_vertices(&self, d: Vector) -> Result<Extreme, HullError> {
        if d.is_zero() {
            return Err(HullError::ZeroDirection);
        }
        if self.cycle.is_empty() {
            return Err(HullError::EmptyHull);
        }
        let dot = |c: Coord| d.x as i128 * c.x as i128 + d.y as i128 * c.y as i128;
        let best = self.cycle.iter().map(|&c| dot(c)).max().unwrap();
        let n = self.cycle.len();
        let hits: Vec<usize> = (0..n).filter(|&i| dot(self.cycle[i]) == best).collect();
        Ok(match hits.as_slice() {
            [i] => Extreme::One(self.cycle[*i]),
            [i, j] => {
                // Consecutive in the cycle; the wrap-around pair is (last, first).
                if *i == 0 && *j == n - 1 {
                    Extreme::Two(self.cycle[*j], self.cycle[*i])
                } else {
                    Extreme::Two(self.cycle[*i], self.cycle[*j])
                }
            }
            _ => unreachable!("strictly convex hull has at most two maximizers"),
        })
    }

    fn compatible_corners(&self, s: &Side) -> Result<Vec<Corner>, HullError> {
        let (corners, sides) = features_of(&self.cycle);
        if !sides.contains(s) {
            return Err(HullError::StaleSide(*s));
        }
        let apexes = self.extreme_vertices(s.inward_normal())?.to_vec();
        Ok(apexes
            .into_iter()
            .map(|v| corners[self.position(v).expect("hull vertex")])
            .collect())
    }

    fn vertices(&self) -> Vec<Coord> {
        self.cycle.clone()
    }

    fn vertex_count(&self) -> usize {
        self.cycle.len()
    }

    fn contains_id(&self, id: u64) -> bool {
        self.ids.contains_key(&id)
    }

    fn live_count(&self) -> usize {
        self.ids.len()
    }

    fn live_points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self.ids.iter().map(|(&id, c)| Point::new(id, c.x, c.y)).collect();
        pts.sort_by_key(|p| p.id);
        pts
    }
}
