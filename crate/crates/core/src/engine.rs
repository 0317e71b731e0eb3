//! Dynamic width maintenance.
//!
//! Every hull corner points at its nearest compatible side (or at nothing,
//! when no side is compatible) and the resulting pairs sit in an ordered
//! queue. The smallest queue entry is the width. An update only rewrites the
//! pointers of corners it created, corners whose side disappeared, and corners
//! compatible with a newly created side.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use thiserror::Error;

use crate::geom::{is_compatible, squared_distance, Corner, Point, Side, SquaredDistance};
use crate::hull::{feature_set, DynamicHull, HullDiff, HullError, OvlHull};
use crate::oracle;
use crate::side_index::{SideIndex, SideIndexError};

pub const ALPHA_ENV: &str = "DYNWIDTH_ALPHA";
pub const DEFAULT_ALPHA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Weight-balance parameter shared by the hull tree and the side index.
    pub alpha: f64,
    /// Corrupts the pointers of the minimal corners after every update.
    /// Exists to prove that verification catches a broken engine.
    pub fault_inject: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            alpha: DEFAULT_ALPHA,
            fault_inject: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{ALPHA_ENV}={0:?} is not a number in (0, 0.5)")]
    BadAlpha(String),
}

impl EngineConfig {
    /// Defaults, with alpha taken from `DYNWIDTH_ALPHA` when set.
    pub fn from_env() -> Result<Self, ConfigError> {
        let mut cfg = EngineConfig::default();
        if let Ok(raw) = std::env::var(ALPHA_ENV) {
            cfg.alpha = parse_alpha(&raw)?;
        }
        Ok(cfg)
    }
}

pub fn parse_alpha(raw: &str) -> Result<f64, ConfigError> {
    match raw.trim().parse::<f64>() {
        Ok(a) if a > 0.0 && a < 0.5 => Ok(a),
        _ => Err(ConfigError::BadAlpha(raw.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Insert(Point),
    Delete(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error("side index: {0}")]
    Index(#[from] SideIndexError),
}

/// Feature counts of one update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiffCounts {
    pub corners_added: usize,
    pub corners_removed: usize,
    pub sides_added: usize,
    pub sides_removed: usize,
}

impl DiffCounts {
    pub fn of(d: &HullDiff) -> Self {
        DiffCounts {
            corners_added: d.corners_added.len(),
            corners_removed: d.corners_removed.len(),
            sides_added: d.sides_added.len(),
            sides_removed: d.sides_removed.len(),
        }
    }

    pub fn k(&self) -> usize {
        self.corners_added + self.corners_removed + self.sides_added + self.sides_removed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthReport {
    /// Zero for fewer than three points or a collinear set.
    pub width_sq: SquaredDistance,
    /// Square root of `width_sq`, for display.
    pub width: f64,
    pub witness: Option<(Side, Corner)>,
    pub diff: DiffCounts,
    pub time_ns: u64,
}

impl WidthReport {
    pub fn k(&self) -> usize {
        self.diff.k()
    }
}

/// Pointer writes of the last update against the locality allowance
/// `corners_added + orphans + 2·sides_added`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Locality {
    pub writes: usize,
    pub orphans: usize,
    pub allowance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("hull differs from scratch recomputation")]
    HullMismatch,
    #[error("side index: {0}")]
    Index(String),
    #[error("corner {0:?} has no pointer entry")]
    MissingCorner(Corner),
    #[error("pointer entry for non-corner {0:?}")]
    StaleCorner(Corner),
    #[error("pointer of {corner:?} is suboptimal: stored {stored}, best {best}")]
    PointerSuboptimal { corner: Corner, stored: String, best: String },
    #[error("priority queue does not match the pointers")]
    QueueMismatch,
    #[error("side-to-corner map does not match the pointers")]
    ReverseMapMismatch,
    #[error("{writes} pointer writes exceed the allowance of {allowance}")]
    LocalityExceeded { writes: usize, allowance: usize },
    #[error("width {engine} differs from calipers width {oracle}")]
    WidthMismatch { engine: String, oracle: String },
}

fn show(p: Option<(Side, SquaredDistance)>) -> String {
    match p {
        None => "none".into(),
        Some((s, d)) => format!("{d} via {:?}->{:?}", s.u, s.v),
    }
}

#[derive(Debug, Clone)]
pub struct WidthEngine {
    config: EngineConfig,
    hull: OvlHull,
    index: SideIndex,
    pointers: HashMap<Corner, Option<(Side, SquaredDistance)>>,
    queue: BTreeSet<(SquaredDistance, Corner, Side)>,
    pointed_by: HashMap<Side, HashSet<Corner>>,
    locality: Locality,
}

impl Default for WidthEngine {
    fn default() -> Self {
        Self::new(EngineConfig::default())
    }
}

impl WidthEngine {
    pub fn new(config: EngineConfig) -> Self {
        WidthEngine {
            config,
            hull: OvlHull::new(config.alpha),
            index: SideIndex::new(config.alpha),
            pointers: HashMap::new(),
            queue: BTreeSet::new(),
            pointed_by: HashMap::new(),
            locality: Locality::default(),
        }
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn hull(&self) -> &OvlHull {
        &self.hull
    }

    pub fn live_count(&self) -> usize {
        self.hull.live_count()
    }

    pub fn last_locality(&self) -> Locality {
        self.locality
    }

    pub fn apply(&mut self, op: Op) -> Result<WidthReport, EngineError> {
        let start = Instant::now();
        let diff = match op {
            Op::Insert(p) => self.hull.insert_point(p)?,
            Op::Delete(id) => self.hull.delete_point(id)?,
        };
        self.absorb(&diff)?;
        if self.config.fault_inject {
            self.corrupt_minimum();
        }
        let time_ns = start.elapsed().as_nanos() as u64;
        let mut report = self.width();
        report.diff = DiffCounts::of(&diff);
        report.time_ns = time_ns;
        Ok(report)
    }

    pub fn insert(&mut self, id: u64, x: i64, y: i64) -> Result<WidthReport, EngineError> {
        self.apply(Op::Insert(Point::new(id, x, y)))
    }

    pub fn delete(&mut self, id: u64) -> Result<WidthReport, EngineError> {
        self.apply(Op::Delete(id))
    }

    fn clear_pointer(&mut self, c: &Corner) {
        if let Some(Some((s, d))) = self.pointers.get(c).copied() {
            self.queue.remove(&(d, *c, s));
            if let Some(set) = self.pointed_by.get_mut(&s) {
                set.remove(c);
                if set.is_empty() {
                    self.pointed_by.remove(&s);
                }
            }
        }
    }

    fn set_pointer(&mut self, c: Corner, p: Option<(Side, SquaredDistance)>) {
        self.clear_pointer(&c);
        self.locality.writes += 1;
        self.pointers.insert(c, p);
        if let Some((s, d)) = p {
            self.queue.insert((d, c, s));
            self.pointed_by.entry(s).or_default().insert(c);
        }
    }

    fn absorb(&mut self, diff: &HullDiff) -> Result<(), EngineError> {
        self.locality = Locality::default();

        for c in &diff.corners_removed {
            self.clear_pointer(c);
            self.pointers.remove(c);
        }

        let mut orphans: BTreeSet<Corner> = BTreeSet::new();
        for s in &diff.sides_removed {
            self.index.delete_side(s)?;
            if let Some(set) = self.pointed_by.remove(s) {
                for c in set {
                    if let Some(Some((_, d))) = self.pointers.get(&c).copied() {
                        self.queue.remove(&(d, c, *s));
                    }
                    self.pointers.insert(c, None);
                    orphans.insert(c);
                }
            }
        }

        for &s in &diff.sides_added {
            self.index.insert_side(s)?;
        }

        let added: HashSet<Corner> = diff.corners_added.iter().copied().collect();
        for &c in &diff.corners_added {
            let p = self.index.nearest_compatible_side(&c)?;
            self.set_pointer(c, p);
        }

        for &s in &diff.sides_added {
            for c in self.hull.compatible_corners(&s)? {
                if added.contains(&c) || orphans.contains(&c) {
                    continue;
                }
                let d = squared_distance(&s, &c);
                let closer = match self.pointers.get(&c).copied().flatten() {
                    None => true,
                    Some((cur_s, cur_d)) => (d, s) < (cur_d, cur_s),
                };
                if closer {
                    self.set_pointer(c, Some((s, d)));
                }
            }
        }

        for &c in &orphans {
            let p = self.index.nearest_compatible_side(&c)?;
            self.set_pointer(c, p);
        }

        self.locality.orphans = orphans.len();
        self.locality.allowance = diff.corners_added.len() + orphans.len() + 2 * diff.sides_added.len();
        Ok(())
    }

    /// Doubles the stored distance of every corner at the queue minimum, so
    /// the reported width becomes wrong. Used by fault injection and tests.
    pub fn corrupt_minimum(&mut self) {
        let Some(&(dmin, _, _)) = self.queue.first() else {
            return;
        };
        let hit: Vec<(SquaredDistance, Corner, Side)> =
            self.queue.iter().take_while(|e| e.0 == dmin).copied().collect();
        for (d, c, s) in hit {
            let bad = match d {
                SquaredDistance::Finite { num, den } if num > 0 => SquaredDistance::finite(2 * num, den),
                _ => SquaredDistance::Infinite,
            };
            self.queue.remove(&(d, c, s));
            self.queue.insert((bad, c, s));
            self.pointers.insert(c, Some((s, bad)));
        }
    }

    pub fn width(&self) -> WidthReport {
        let (width_sq, witness) = match self.queue.first() {
            Some(&(d, c, s)) if self.hull.vertex_count() >= 3 => (d, Some((s, c))),
            _ => (SquaredDistance::ZERO, None),
        };
        WidthReport {
            width_sq,
            width: width_sq.sqrt_f64(),
            witness,
            diff: DiffCounts::default(),
            time_ns: 0,
        }
    }

    /// Full-state check against brute force. Quadratic in the hull size.
    pub fn audit(&self) -> Result<(), Violation> {
        let live: Vec<_> = self.hull.live_points().iter().map(|p| p.coord()).collect();
        let scratch = oracle::convex_hull(&live);
        if self.hull.vertices() != scratch {
            return Err(Violation::HullMismatch);
        }
        let features = feature_set(&scratch);

        let indexed: BTreeSet<Side> = self.index.sides().into_iter().collect();
        if indexed != features.sides {
            return Err(Violation::Index("indexed sides differ from hull sides".into()));
        }
        self.index.audit().map_err(Violation::Index)?;

        for c in &features.corners {
            if !self.pointers.contains_key(c) {
                return Err(Violation::MissingCorner(*c));
            }
        }
        let sides: Vec<Side> = features.sides.iter().copied().collect();
        let mut expected_queue = BTreeSet::new();
        let mut expected_rev: HashMap<Side, HashSet<Corner>> = HashMap::new();
        for (c, &p) in &self.pointers {
            if !features.corners.contains(c) {
                return Err(Violation::StaleCorner(*c));
            }
            let best = oracle::nearest_side_scan(c, &sides);
            let sound = match (p, best) {
                (None, None) => true,
                (Some((s, d)), Some((bs, bd))) => {
                    s == bs && is_compatible(&s, c) && d == squared_distance(&s, c) && d == bd
                }
                _ => false,
            };
            if !sound {
                return Err(Violation::PointerSuboptimal {
                    corner: *c,
                    stored: show(p),
                    best: show(best),
                });
            }
            if let Some((s, d)) = p {
                expected_queue.insert((d, *c, s));
                expected_rev.entry(s).or_default().insert(*c);
            }
        }
        if expected_queue != self.queue {
            return Err(Violation::QueueMismatch);
        }
        if expected_rev != self.pointed_by {
            return Err(Violation::ReverseMapMismatch);
        }

        let Locality { writes, allowance, .. } = self.locality;
        if writes > allowance {
            return Err(Violation::LocalityExceeded { writes, allowance });
        }

        let engine = self.width();
        let reference = oracle::calipers_width(&live);
        if engine.width_sq != reference.width_sq || engine.witness != reference.witness {
            return Err(Violation::WidthMismatch {
                engine: engine.width_sq.to_string(),
                oracle: reference.width_sq.to_string(),
            });
        }
        Ok(())
    }
}
