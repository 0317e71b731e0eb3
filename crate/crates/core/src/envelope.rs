//! Dynamic set of halfplanes answering "nearest boundary line to a point that
//! lies inside all of them".
//!
//! For a point inside every halfplane the signed distances are nonnegative,
//! so the nearest boundary is the minimum of the linear distance functions at
//! that point. Halfplanes live in static blocks of about `√m` members plus an
//! insertion buffer; a query takes the minimum over every block and the
//! buffer. Each block stores its members' coefficients together with a
//! floating-point inverse norm. The float values only select candidates
//! within a relative error bound; the winner is always decided on exact
//! squared distances, ties going to the smallest id.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::geom::{Coord, SquaredDistance};

/// Blocks below this size are never worth more than a plain scan, and the
/// block threshold never drops below it.
pub const MIN_BLOCK: usize = 32;

/// Relative slack on float distances. The float path carries at most a few
/// units in the last place of error, far below this.
const FILTER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("halfplane id already present")]
    DuplicateId,
    #[error("halfplane id not present")]
    UnknownId,
    #[error("no halfplanes")]
    NoHalfplanes,
    #[error("query point lies outside a halfplane")]
    PreconditionViolated,
}

/// The closed halfplane `a·x + b·y + c ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Halfplane<Id> {
    pub id: Id,
    pub a: i64,
    pub b: i64,
    pub c: i128,
}

impl<Id> Halfplane<Id> {
    pub fn new(id: Id, a: i64, b: i64, c: i128) -> Self {
        assert!(a != 0 || b != 0, "degenerate halfplane");
        Halfplane { id, a, b, c }
    }

    #[inline]
    pub fn eval(&self, q: Coord) -> i128 {
        self.a as i128 * q.x as i128 + self.b as i128 * q.y as i128 + self.c
    }

    pub fn squared_distance(&self, q: Coord) -> SquaredDistance {
        SquaredDistance::point_line(self.a, self.b, self.eval(q))
    }

    fn inv_norm(&self) -> f64 {
        let n2 = self.a as i128 * self.a as i128 + self.b as i128 * self.b as i128;
        1.0 / (n2 as f64).sqrt()
    }
}

#[derive(Debug, Clone)]
struct Block<Id> {
    planes: Vec<Halfplane<Id>>,
    inv_norm: Vec<f64>,
}

impl<Id: Copy> Block<Id> {
    fn compile(planes: Vec<Halfplane<Id>>) -> Self {
        let inv_norm = planes.iter().map(Halfplane::inv_norm).collect();
        Block { planes, inv_norm }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Buffer(usize),
    Block(usize, usize),
}

/// Running minimum of a query: float lower envelope value plus exact winner.
struct Scan<Id> {
    bound: f64,
    best: Option<(SquaredDistance, Id, Halfplane<Id>)>,
}

#[derive(Debug, Clone)]
pub struct HalfplaneEnvelope<Id> {
    blocks: Vec<Block<Id>>,
    buffer: Vec<Halfplane<Id>>,
    buffer_inv: Vec<f64>,
    slots: HashMap<Id, Slot>,
    size_at_repack: usize,
    /// Halfplanes moved by block compilations and repacks.
    pub compiled: u64,
}

impl<Id: Copy + Eq + Hash + Ord> Default for HalfplaneEnvelope<Id> {
    fn default() -> Self {
        Self::new()
    }
}

impl<Id: Copy + Eq + Hash + Ord> HalfplaneEnvelope<Id> {
    pub fn new() -> Self {
        HalfplaneEnvelope {
            blocks: Vec::new(),
            buffer: Vec::new(),
            buffer_inv: Vec::new(),
            slots: HashMap::new(),
            size_at_repack: 0,
            compiled: 0,
        }
    }

    /// Builds the envelope in one go, packing everything into full blocks.
    pub fn from_halfplanes(planes: Vec<Halfplane<Id>>) -> Result<Self, EnvelopeError> {
        let mut env = Self::new();
        for h in &planes {
            if env.slots.insert(h.id, Slot::Buffer(0)).is_some() {
                return Err(EnvelopeError::DuplicateId);
            }
        }
        env.pack(planes);
        Ok(env)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, id: &Id) -> bool {
        self.slots.contains_key(id)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Halfplane<Id>> {
        self.blocks.iter().flat_map(|b| b.planes.iter()).chain(self.buffer.iter())
    }

    fn block_size(&self) -> usize {
        MIN_BLOCK.max((self.len() as f64).sqrt() as usize)
    }

    pub fn insert(&mut self, h: Halfplane<Id>) -> Result<(), EnvelopeError> {
        if self.slots.contains_key(&h.id) {
            return Err(EnvelopeError::DuplicateId);
        }
        self.slots.insert(h.id, Slot::Buffer(self.buffer.len()));
        self.buffer_inv.push(h.inv_norm());
        self.buffer.push(h);
        if self.blocks.len() > 2 * self.block_size() + 2 {
            self.repack();
        } else if self.buffer.len() >= self.block_size() {
            let planes = std::mem::take(&mut self.buffer);
            self.buffer_inv.clear();
            self.push_block(planes);
        }
        Ok(())
    }

    pub fn delete(&mut self, id: &Id) -> Result<Halfplane<Id>, EnvelopeError> {
        let slot = self.slots.remove(id).ok_or(EnvelopeError::UnknownId)?;
        let removed = match slot {
            Slot::Buffer(i) => {
                let h = self.buffer.swap_remove(i);
                self.buffer_inv.swap_remove(i);
                if let Some(moved) = self.buffer.get(i) {
                    self.slots.insert(moved.id, Slot::Buffer(i));
                }
                h
            }
            Slot::Block(b, i) => {
                let mut planes = std::mem::take(&mut self.blocks[b].planes);
                let h = planes.swap_remove(i);
                if let Some(moved) = planes.get(i) {
                    self.slots.insert(moved.id, Slot::Block(b, i));
                }
                if planes.is_empty() {
                    self.drop_block(b);
                } else {
                    self.compiled += planes.len() as u64;
                    self.blocks[b] = Block::compile(planes);
                }
                h
            }
        };
        if 2 * self.len() < self.size_at_repack {
            self.repack();
        }
        Ok(removed)
    }

    fn drop_block(&mut self, b: usize) {
        self.blocks.swap_remove(b);
        if let Some(moved) = self.blocks.get(b) {
            for (i, h) in moved.planes.iter().enumerate() {
                self.slots.insert(h.id, Slot::Block(b, i));
            }
        }
    }

    fn push_block(&mut self, planes: Vec<Halfplane<Id>>) {
        let b = self.blocks.len();
        for (i, h) in planes.iter().enumerate() {
            self.slots.insert(h.id, Slot::Block(b, i));
        }
        self.compiled += planes.len() as u64;
        self.blocks.push(Block::compile(planes));
    }

    fn repack(&mut self) {
        let mut all: Vec<Halfplane<Id>> = std::mem::take(&mut self.buffer);
        self.buffer_inv.clear();
        for b in std::mem::take(&mut self.blocks) {
            all.extend(b.planes);
        }
        self.pack(all);
    }

    fn pack(&mut self, mut all: Vec<Halfplane<Id>>) {
        self.size_at_repack = all.len();
        let size = self.block_size();
        while !all.is_empty() {
            let rest = all.split_off(all.len().min(size));
            self.push_block(std::mem::replace(&mut all, rest));
        }
    }

    fn scan(planes: &[Halfplane<Id>], inv: &[f64], q: Coord, acc: &mut Scan<Id>, exact: bool) -> Result<(), EnvelopeError> {
        for (h, &w) in planes.iter().zip(inv) {
            let v = h.eval(q);
            if v < 0 {
                return Err(EnvelopeError::PreconditionViolated);
            }
            let f = v as f64 * w;
            if !exact {
                if f < acc.bound {
                    acc.bound = f;
                }
                continue;
            }
            if f > acc.bound {
                continue;
            }
            let d = SquaredDistance::point_line(h.a, h.b, v);
            let better = match &acc.best {
                None => true,
                Some((bd, bid, _)) => (d, h.id) < (*bd, *bid),
            };
            if better {
                acc.best = Some((d, h.id, *h));
            }
        }
        Ok(())
    }

    /// Halfplane whose boundary is nearest to `q`, with its exact squared
    /// distance. `q` must lie in every halfplane; a violation seen during the
    /// scan is reported.
    pub fn nearest(&self, q: Coord) -> Result<(Halfplane<Id>, SquaredDistance), EnvelopeError> {
        if self.is_empty() {
            return Err(EnvelopeError::NoHalfplanes);
        }
        let mut acc = Scan {
            bound: f64::INFINITY,
            best: None,
        };
        for exact in [false, true] {
            if exact {
                acc.bound *= 1.0 + FILTER_SLACK;
            }
            for b in &self.blocks {
                Self::scan(&b.planes, &b.inv_norm, q, &mut acc, exact)?;
            }
            Self::scan(&self.buffer, &self.buffer_inv, q, &mut acc, exact)?;
        }
        let (d, _, h) = acc.best.expect("nonempty envelope has a winner");
        Ok((h, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Side;
    use crate::oracle::convex_hull;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn side_plane(id: u32, u: Coord, v: Coord) -> Halfplane<u32> {
        let s = Side::new(u, v);
        Halfplane::new(id, s.a(), s.b(), s.c())
    }

    fn triangle() -> Vec<Halfplane<u32>> {
        let (p, q, r) = (Coord::new(0, 0), Coord::new(4, 0), Coord::new(0, 3));
        vec![side_plane(0, p, q), side_plane(1, q, r), side_plane(2, r, p)]
    }

    fn brute(planes: &[Halfplane<u32>], q: Coord) -> (SquaredDistance, u32) {
        planes.iter().map(|h| (h.squared_distance(q), h.id)).min().unwrap()
    }

    #[test]
    fn triangle_queries() {
        let mut env = HalfplaneEnvelope::new();
        for h in triangle() {
            env.insert(h).unwrap();
        }
        assert_eq!(env.len(), 3);
        let (h, d) = env.nearest(Coord::new(1, 1)).unwrap();
        assert_eq!((h.id, d), (0, SquaredDistance::finite(1, 1)));
        let (h, d) = env.nearest(Coord::new(2, 0)).unwrap();
        assert_eq!((h.id, d), (0, SquaredDistance::ZERO));
        assert_eq!(env.insert(triangle()[1]), Err(EnvelopeError::DuplicateId));
    }

    #[test]
    fn delete_hypotenuse_then_everything() {
        let mut env = HalfplaneEnvelope::new();
        for h in triangle() {
            env.insert(h).unwrap();
        }
        env.delete(&1).unwrap();
        let (h, d) = env.nearest(Coord::new(1, 1)).unwrap();
        assert_eq!((h.id, d), (0, SquaredDistance::finite(1, 1)));
        env.delete(&0).unwrap();
        env.delete(&2).unwrap();
        assert_eq!(env.delete(&2), Err(EnvelopeError::UnknownId));
        assert_eq!(env.nearest(Coord::new(1, 1)), Err(EnvelopeError::NoHalfplanes));
    }

    #[test]
    fn outside_query_is_reported() {
        let env = HalfplaneEnvelope::from_halfplanes(triangle()).unwrap();
        assert_eq!(env.nearest(Coord::new(-1, 1)), Err(EnvelopeError::PreconditionViolated));
    }

    fn random_polygon(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<Coord> {
        let pts: Vec<Coord> = (0..n)
            .map(|_| Coord::new(rng.random_range(-r..=r), rng.random_range(-r..=r)))
            .collect();
        convex_hull(&pts)
    }

    #[test]
    fn random_queries_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let hull = random_polygon(&mut rng, 2000, 1 << 29);
            let n = hull.len();
            let planes: Vec<Halfplane<u32>> =
                (0..n).map(|i| side_plane(i as u32, hull[i], hull[(i + 1) % n])).collect();
            let env = HalfplaneEnvelope::from_halfplanes(planes.clone()).unwrap();
            for _ in 0..50 {
                // Convex combination of three hull vertices lies inside.
                let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                let q = Coord::new(
                    (hull[i].x + hull[j].x + 2 * hull[k].x) / 4,
                    (hull[i].y + hull[j].y + 2 * hull[k].y) / 4,
                );
                if planes.iter().any(|h| h.eval(q) < 0) {
                    continue;
                }
                let (h, d) = env.nearest(q).unwrap();
                assert_eq!((d, h.id), brute(&planes, q));
            }
        }
    }

    #[test]
    fn blocks_stay_near_square_root() {
        let mut env = HalfplaneEnvelope::new();
        for i in 0..10_000u32 {
            env.insert(Halfplane::new(i, 1, (i % 7) as i64, 1_000_000)).unwrap();
        }
        let root = (env.len() as f64).sqrt() as usize;
        assert!(env.block_count() <= 2 * root + 3, "{} blocks", env.block_count());
        for i in 0..9_000u32 {
            env.delete(&i).unwrap();
        }
        assert!(env.block_count() <= 2 * MIN_BLOCK, "{} blocks", env.block_count());
        assert_eq!(env.iter().count(), 1000);
    }
}
