use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;

use ethnum::I256;

use super::tree::{key, BridgeTree, LOWER, UPPER};
use super::{feature_set, DynamicHull, Extreme, FeatureSet, HullDiff, HullError};
use crate::geom::{cross, Coord, Corner, Point, Side, Vector};

/// Below this many vertices a diff is taken over the full feature sets.
const SMALL_HULL: usize = 8;

/// Replace the open abscissa interval `(lo, hi)` of one chain by `fresh`.
#[derive(Debug)]
struct Edit {
    chain: usize,
    lo: Option<i128>,
    hi: Option<i128>,
    fresh: Vec<Coord>,
}

/// Dynamic hull backed by a bridge tree, with the current lower and upper
/// chains also kept explicitly for constant-time neighbour walks.
#[derive(Clone, Debug)]
pub struct OvlHull {
    tree: BridgeTree,
    ids: HashMap<u64, Coord>,
    chains: [BTreeMap<i128, Coord>; 2],
}

impl Default for OvlHull {
    fn default() -> Self {
        Self::new(0.25)
    }
}

impl OvlHull {
    /// `alpha` is the weight-balance parameter of the bridge tree.
    pub fn new(alpha: f64) -> Self {
        OvlHull {
            tree: BridgeTree::new(alpha),
            ids: HashMap::new(),
            chains: [BTreeMap::new(), BTreeMap::new()],
        }
    }

    /// Internal tree nodes created by rebalancing so far.
    pub fn rebuilt_nodes(&self) -> u64 {
        self.tree.rebuilt_nodes
    }

    fn is_vertex(&self, c: Coord) -> bool {
        let k = key(c);
        self.chains[LOWER].contains_key(&k) || self.chains[UPPER].contains_key(&k)
    }

    fn chain_len_count(len: [usize; 2]) -> usize {
        match len[LOWER] {
            0 => 0,
            1 => 1,
            l => l + len[UPPER] - 2,
        }
    }

    /// Counterclockwise successor of a hull vertex.
    pub fn next_ccw(&self, v: Coord) -> Coord {
        let k = key(v);
        let lower = &self.chains[LOWER];
        let upper = &self.chains[UPPER];
        if lower.contains_key(&k) {
            if let Some((_, &c)) = lower.range((Bound::Excluded(k), Bound::Unbounded)).next() {
                return c;
            }
        }
        upper
            .range(..k)
            .next_back()
            .map(|(_, &c)| c)
            .or_else(|| lower.values().next().copied())
            .unwrap_or(v)
    }

    /// Counterclockwise predecessor of a hull vertex.
    pub fn prev_ccw(&self, v: Coord) -> Coord {
        let k = key(v);
        let lower = &self.chains[LOWER];
        let upper = &self.chains[UPPER];
        if lower.contains_key(&k) {
            if let Some((_, &c)) = lower.range(..k).next_back() {
                return c;
            }
        }
        upper
            .range((Bound::Excluded(k), Bound::Unbounded))
            .next()
            .map(|(_, &c)| c)
            .or_else(|| lower.values().next_back().copied())
            .unwrap_or(v)
    }

    pub fn corner_at(&self, v: Coord) -> Corner {
        Corner::new(self.prev_ccw(v), v, self.next_ccw(v))
    }

    fn insert_edit(&self, chain: usize, p: Coord) -> Option<Edit> {
        let sgn = if chain == UPPER { 1 } else { -1 };
        let map = &self.chains[chain];
        let k = key(p);
        let pred = map.range(..k).next_back().map(|(&k, &c)| (k, c));
        let succ = map.range((Bound::Excluded(k), Bound::Unbounded)).next().map(|(&k, &c)| (k, c));
        if let (Some((_, a)), Some((_, b))) = (pred, succ) {
            if sgn * cross(a, b, p) <= 0 {
                return None;
            }
        }
        let mut lo = pred;
        while let Some((ka, a)) = lo {
            match map.range(..ka).next_back() {
                Some((&kb, &b)) if sgn * cross(b, a, p) >= 0 => lo = Some((kb, b)),
                _ => break,
            }
        }
        let mut hi = succ;
        while let Some((ka, a)) = hi {
            match map.range((Bound::Excluded(ka), Bound::Unbounded)).next() {
                Some((&kb, &b)) if sgn * cross(p, a, b) >= 0 => hi = Some((kb, b)),
                _ => break,
            }
        }
        Some(Edit {
            chain,
            lo: lo.map(|(k, _)| k),
            hi: hi.map(|(k, _)| k),
            fresh: vec![p],
        })
    }

    fn range_of<'a>(&'a self, e: &Edit) -> impl Iterator<Item = Coord> + 'a {
        let lo = e.lo.map_or(Bound::Unbounded, Bound::Excluded);
        let hi = e.hi.map_or(Bound::Unbounded, Bound::Excluded);
        self.chains[e.chain].range((lo, hi)).map(|(_, &c)| c)
    }

    fn local_features(&self, around: &BTreeSet<Coord>) -> FeatureSet {
        let mut set = FeatureSet::default();
        for &v in around {
            if !self.is_vertex(v) {
                continue;
            }
            let c = self.corner_at(v);
            set.sides.insert(Side::new(c.prev, v));
            set.sides.insert(Side::new(v, c.next));
            set.corners.insert(c);
        }
        set
    }

    /// Applies chain edits and reports the feature diff. Only features around
    /// removed and added vertices and the edit anchors are compared.
    fn apply(&mut self, edits: Vec<Edit>) -> HullDiff {
        if edits.is_empty() {
            return HullDiff::default();
        }
        let old_h = self.vertex_count();
        let mut new_len = [self.chains[LOWER].len(), self.chains[UPPER].len()];
        let mut touched = BTreeSet::new();
        let mut fresh = BTreeSet::new();
        for e in &edits {
            let mut dropped = 0;
            for v in self.range_of(e) {
                dropped += 1;
                touched.insert(v);
                touched.insert(self.prev_ccw(v));
                touched.insert(self.next_ccw(v));
            }
            for k in [e.lo, e.hi].into_iter().flatten() {
                touched.insert(self.chains[e.chain][&k]);
            }
            new_len[e.chain] = new_len[e.chain] - dropped + e.fresh.len();
            fresh.extend(e.fresh.iter().copied().filter(|&c| !self.is_vertex(c)));
        }
        let new_h = Self::chain_len_count(new_len);
        let full = old_h < SMALL_HULL || new_h < SMALL_HULL;

        let old = if full {
            feature_set(&self.vertices())
        } else {
            self.local_features(&touched)
        };

        for e in edits {
            let lo = e.lo.map_or(Bound::Unbounded, Bound::Excluded);
            let hi = e.hi.map_or(Bound::Unbounded, Bound::Excluded);
            let map = &mut self.chains[e.chain];
            let doomed: Vec<i128> = map.range((lo, hi)).map(|(&k, _)| k).collect();
            for k in doomed {
                map.remove(&k);
            }
            for c in e.fresh {
                map.insert(key(c), c);
            }
        }

        let new = if full {
            feature_set(&self.vertices())
        } else {
            for &a in &fresh {
                touched.insert(a);
                touched.insert(self.prev_ccw(a));
                touched.insert(self.next_ccw(a));
            }
            self.local_features(&touched)
        };
        HullDiff::between(&old, &new)
    }

    /// Maximizer of `d · p` on the root chains. `d` is in original coordinates.
    fn extreme(&self, d: Vector) -> Option<Extreme> {
        // In the sheared frame X = 2^32·x + y the functional becomes
        // (dx, 2^32·dy - dx), up to a positive factor.
        let dx = I256::from(d.x);
        let dy = (I256::from(d.y) << 32) - dx;
        let found = if dy > 0 {
            self.tree.chain_extreme(UPPER, dx, dy)
        } else if dy < 0 {
            self.tree.chain_extreme(LOWER, dx, -dy)
        } else {
            let (l, r) = self.tree.ends()?;
            Some((if dx > 0 { r } else { l }, None))
        }?;
        Some(match found {
            (a, None) => Extreme::One(a),
            (a, Some(b)) => {
                if self.next_ccw(a) == b {
                    Extreme::Two(a, b)
                } else {
                    Extreme::Two(b, a)
                }
            }
        })
    }

    /// Full consistency check of the explicit chains against the tree.
    #[cfg(test)]
    pub(crate) fn check(&self) {
        self.tree.check();
        for chain in [LOWER, UPPER] {
            let explicit: Vec<Coord> = self.chains[chain].values().copied().collect();
            assert_eq!(explicit, self.tree.chain_between(chain, None, None));
        }
    }
}

impl DynamicHull for OvlHull {
    fn insert_point(&mut self, p: Point) -> Result<HullDiff, HullError> {
        let c = p.coord();
        if !c.in_bounds() {
            return Err(HullError::CoordinateOutOfRange(c));
        }
        if self.ids.contains_key(&p.id) {
            return Err(HullError::DuplicateId(p.id));
        }
        self.ids.insert(p.id, c);
        if !self.tree.insert(c) {
            return Ok(HullDiff::default());
        }
        let edits = [LOWER, UPPER]
            .into_iter()
            .filter_map(|chain| self.insert_edit(chain, c))
            .collect();
        Ok(self.apply(edits))
    }

    fn delete_point(&mut self, id: u64) -> Result<HullDiff, HullError> {
        let c = self.ids.remove(&id).ok_or(HullError::UnknownId(id))?;
        if !self.tree.remove(c) {
            return Ok(HullDiff::default());
        }
        let k = key(c);
        let mut edits = Vec::new();
        for chain in [LOWER, UPPER] {
            let map = &self.chains[chain];
            if !map.contains_key(&k) {
                continue;
            }
            let lo = map.range(..k).next_back().map(|(&k, _)| k);
            let hi = map.range((Bound::Excluded(k), Bound::Unbounded)).next().map(|(&k, _)| k);
            let fresh = self.tree.chain_between(chain, lo, hi);
            edits.push(Edit { chain, lo, hi, fresh });
        }
        Ok(self.apply(edits))
    }

    fn extreme_vertices(&self, d: Vector) -> Result<Extreme, HullError> {
        if d.is_zero() {
            return Err(HullError::ZeroDirection);
        }
        self.extreme(d).ok_or(HullError::EmptyHull)
    }

    fn compatible_corners(&self, s: &Side) -> Result<Vec<Corner>, HullError> {
        if self.vertex_count() < 3 || !self.is_vertex(s.u) || self.next_ccw(s.u) != s.v {
            return Err(HullError::StaleSide(*s));
        }
        let apexes = self.extreme_vertices(s.inward_normal())?;
        Ok(apexes.to_vec().into_iter().map(|v| self.corner_at(v)).collect())
    }

    fn vertices(&self) -> Vec<Coord> {
        let lower = &self.chains[LOWER];
        let upper = &self.chains[UPPER];
        let mut out: Vec<Coord> = lower.values().copied().collect();
        if out.len() >= 2 {
            let n = upper.len();
            out.extend(upper.values().rev().skip(1).take(n.saturating_sub(2)).copied());
        }
        out
    }

    fn vertex_count(&self) -> usize {
        Self::chain_len_count([self.chains[LOWER].len(), self.chains[UPPER].len()])
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
