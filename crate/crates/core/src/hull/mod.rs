//! Dynamic convex hull of a multiset of points, reporting how each update
//! changes the hull's corners and sides.
//!
//! [`OvlHull`] keeps a balanced tree of hull bridges in the style of
//! Overmars and van Leeuwen. [`NaiveHull`] recomputes the hull from scratch
//! after every update and serves as its differential oracle.

mod naive;
mod ovl;
mod tree;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geom::{Coord, Corner, Point, Side, Vector};

pub use naive::NaiveHull;
pub use ovl::OvlHull;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error("point id {0} is already live")]
    DuplicateId(u64),
    #[error("point id {0} is not live")]
    UnknownId(u64),
    #[error("coordinate {0} exceeds the supported bound")]
    CoordinateOutOfRange(Coord),
    #[error("hull is empty")]
    EmptyHull,
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("side {0} is not a side of the current hull")]
    StaleSide(Side),
}

/// Corners and sides created and destroyed by a single update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HullDiff {
    pub corners_removed: Vec<Corner>,
    pub corners_added: Vec<Corner>,
    pub sides_removed: Vec<Side>,
    pub sides_added: Vec<Side>,
}

impl HullDiff {
    /// Total number of features touched by the update.
    pub fn k(&self) -> usize {
        self.corners_removed.len()
            + self.corners_added.len()
            + self.sides_removed.len()
            + self.sides_added.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k() == 0
    }

    /// The diff that undoes this one.
    pub fn reversed(&self) -> HullDiff {
        HullDiff {
            corners_removed: self.corners_added.clone(),
            corners_added: self.corners_removed.clone(),
            sides_removed: self.sides_added.clone(),
            sides_added: self.sides_removed.clone(),
        }
    }

    /// Difference of two feature sets, sorted.
    pub(crate) fn between(old: &FeatureSet, new: &FeatureSet) -> HullDiff {
        HullDiff {
            corners_removed: old.corners.difference(&new.corners).copied().collect(),
            corners_added: new.corners.difference(&old.corners).copied().collect(),
            sides_removed: old.sides.difference(&new.sides).copied().collect(),
            sides_added: new.sides.difference(&old.sides).copied().collect(),
        }
    }
}

/// One or two vertices maximizing a linear functional over the hull. Two are
/// returned, in counterclockwise order, when the maximum is a whole edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    One(Coord),
    Two(Coord, Coord),
}

impl Extreme {
    pub fn to_vec(self) -> Vec<Coord> {
        match self {
            Extreme::One(a) => vec![a],
            Extreme::Two(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct FeatureSet {
    pub corners: BTreeSet<Corner>,
    pub sides: BTreeSet<Side>,
}

/// Corners and sides of a counterclockwise cycle of strictly convex vertices.
/// Fewer than three vertices have no features.
pub fn features_of(cycle: &[Coord]) -> (Vec<Corner>, Vec<Side>) {
    let n = cycle.len();
    if n < 3 {
        return (Vec::new(), Vec::new());
    }
    let corners = (0..n)
        .map(|i| Corner::new(cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]))
        .collect();
    let sides = (0..n).map(|i| Side::new(cycle[i], cycle[(i + 1) % n])).collect();
    (corners, sides)
}

pub(crate) fn feature_set(cycle: &[Coord]) -> FeatureSet {
    let (corners, sides) = features_of(cycle);
    FeatureSet {
        corners: corners.into_iter().collect(),
        sides: sides.into_iter().collect(),
    }
}

/// The operations the width engine needs from a dynamic hull.
pub trait DynamicHull {
    fn insert_point(&mut self, p: Point) -> Result<HullDiff, HullError>;

    fn delete_point(&mut self, id: u64) -> Result<HullDiff, HullError>;

    /// Vertices maximizing `d · p`.
    fn extreme_vertices(&self, d: Vector) -> Result<Extreme, HullError>;

    /// The one or two corners compatible with a current side.
    fn compatible_corners(&self, s: &Side) -> Result<Vec<Corner>, HullError>;

    /// Strictly convex hull vertices in counterclockwise order, starting at
    /// the lexicographically smallest.
    fn vertices(&self) -> Vec<Coord>;

    fn vertex_count(&self) -> usize;

    fn contains_id(&self, id: u64) -> bool;

    fn live_count(&self) -> usize;

    /// Live points sorted by id.
    fn live_points(&self) -> Vec<Point>;

    fn corners(&self) -> Vec<Corner> {
        features_of(&self.vertices()).0
    }

    fn sides(&self) -> Vec<Side> {
        features_of(&self.vertices()).1
    }

    fn is_degenerate(&self) -> bool {
        self.vertex_count() < 3
    }
}
