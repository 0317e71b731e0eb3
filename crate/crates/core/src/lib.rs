//! Exact dynamic width of a planar point set.
//!
//! The width is the minimum, over compatible pairs of a hull side and a hull
//! corner, of the distance from the corner's apex to the side's line. The
//! [`engine::WidthEngine`] keeps, for every corner, a pointer to its nearest
//! compatible side and a priority queue of those pairs; each point update only
//! revisits the corners and sides the update actually changed.

pub mod engine;
pub mod envelope;
pub mod gen;
pub mod geom;
pub mod harness;
pub mod hull;
pub mod oracle;
pub mod par;
pub mod side_index;
pub mod trace;

pub use engine::{EngineConfig, Op, WidthEngine, WidthReport};
pub use geom::{Coord, Corner, Point, Side, SquaredDistance, Vector};
