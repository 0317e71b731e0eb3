//! Hull sides ordered by the angle of their outward normal.
//!
//! The sides compatible with a corner are exactly those whose outward normal
//! lies in the corner's antipodal arc, a contiguous range in this order (two
//! ranges when it wraps past `(1, 0)`). Every subtree of at least
//! [`ENVELOPE_MIN`] sides carries a [`HalfplaneEnvelope`] of its sides, so a
//! query visits `O(log n)` canonical subtrees and asks each for the nearest
//! line to the corner's apex.

use std::cmp::Ordering;
use std::collections::HashSet;

use thiserror::Error;

use crate::envelope::{EnvelopeError, Halfplane, HalfplaneEnvelope};
use crate::geom::{Corner, Side, SquaredDistance, Vector};

const NIL: u32 = u32::MAX;

/// Smaller subtrees are scanned leaf by leaf.
pub const ENVELOPE_MIN: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SideIndexError {
    #[error("side {0:?} already indexed")]
    DuplicateSide(Side),
    #[error("side {0:?} not indexed")]
    UnknownSide(Side),
    #[error("envelope query failed: {0}")]
    Envelope(#[from] EnvelopeError),
}

fn key_cmp(a: &Side, b: &Side) -> Ordering {
    a.outward_normal()
        .angle_cmp(b.outward_normal())
        .then_with(|| a.cmp(b))
}

fn halfplane(s: Side) -> Halfplane<Side> {
    Halfplane::new(s, s.a(), s.b(), s.c())
}

#[derive(Debug, Clone)]
struct Node {
    left: u32,
    right: u32,
    size: u32,
    lo: Side,
    hi: Side,
    env: Option<HalfplaneEnvelope<Side>>,
}

impl Node {
    fn leaf(s: Side) -> Self {
        Node {
            left: NIL,
            right: NIL,
            size: 1,
            lo: s,
            hi: s,
            env: None,
        }
    }

    fn is_leaf(&self) -> bool {
        self.left == NIL
    }
}

/// Angle interval `[from, to]` of outward normals; `None` is unbounded.
#[derive(Clone, Copy)]
struct Range {
    from: Option<Vector>,
    to: Option<Vector>,
}

impl Range {
    fn after_start(&self, v: Vector) -> bool {
        self.from.is_none_or(|f| v.angle_cmp(f) != Ordering::Less)
    }

    fn before_end(&self, v: Vector) -> bool {
        self.to.is_none_or(|t| v.angle_cmp(t) != Ordering::Greater)
    }
}

#[derive(Debug, Clone)]
pub struct SideIndex {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    alpha: f64,
    members: HashSet<Side>,
    /// Internal nodes on the last update path, bottom-up.
    path: Vec<u32>,
    /// Sides placed into freshly built subtrees by rebalancing.
    pub rebuilt_leaves: u64,
}

impl Default for SideIndex {
    fn default() -> Self {
        Self::new(0.25)
    }
}

impl SideIndex {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha < 0.5, "alpha must lie in (0, 1/2)");
        SideIndex {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            alpha,
            members: HashSet::new(),
            path: Vec::new(),
            rebuilt_leaves: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Side) -> bool {
        self.members.contains(s)
    }

    /// Sides in angular order of their outward normals.
    pub fn sides(&self) -> Vec<Side> {
        let mut out = Vec::with_capacity(self.len());
        self.collect(self.root, &mut out);
        out
    }

    fn collect(&self, n: u32, out: &mut Vec<Side>) {
        if n == NIL {
            return;
        }
        let node = &self.nodes[n as usize];
        if node.is_leaf() {
            out.push(node.lo);
        } else {
            self.collect(node.left, out);
            self.collect(node.right, out);
        }
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, n: u32) {
        self.nodes[n as usize].env = None;
        self.free.push(n);
    }

    fn node(&self, n: u32) -> &Node {
        &self.nodes[n as usize]
    }

    /// Recomputes size and key bounds from the children.
    fn pull(&mut self, n: u32) {
        let (l, r) = (self.node(n).left, self.node(n).right);
        let (size, lo, hi) = (self.node(l).size + self.node(r).size, self.node(l).lo, self.node(r).hi);
        let node = &mut self.nodes[n as usize];
        node.size = size;
        node.lo = lo;
        node.hi = hi;
    }

    fn leaves_of(&self, n: u32) -> Vec<Side> {
        let mut out = Vec::with_capacity(self.node(n).size as usize);
        self.collect(n, &mut out);
        out
    }

    fn fresh_envelope(sides: &[Side]) -> HalfplaneEnvelope<Side> {
        HalfplaneEnvelope::from_halfplanes(sides.iter().map(|&s| halfplane(s)).collect())
            .expect("indexed sides are distinct")
    }

    /// Brings the envelope of `n` in line with its size after `s` was added
    /// to or removed from the subtree.
    fn touch_envelope(&mut self, n: u32, s: Side, added: bool) {
        let size = self.node(n).size;
        if size < ENVELOPE_MIN {
            self.nodes[n as usize].env = None;
            return;
        }
        if self.node(n).env.is_none() {
            let env = Self::fresh_envelope(&self.leaves_of(n));
            self.nodes[n as usize].env = Some(env);
            return;
        }
        let env = self.nodes[n as usize].env.as_mut().expect("checked above");
        if added {
            env.insert(halfplane(s)).expect("side is new to the subtree");
        } else {
            env.delete(&s).expect("side was in the subtree");
        }
    }

    pub fn insert_side(&mut self, s: Side) -> Result<(), SideIndexError> {
        if !self.members.insert(s) {
            return Err(SideIndexError::DuplicateSide(s));
        }
        self.path.clear();
        self.root = if self.root == NIL {
            self.alloc(Node::leaf(s))
        } else {
            self.insert_at(self.root, s)
        };
        self.rebalance_path();
        Ok(())
    }

    fn insert_at(&mut self, n: u32, s: Side) -> u32 {
        if self.node(n).is_leaf() {
            let other = self.node(n).lo;
            let fresh = self.alloc(Node::leaf(s));
            let (left, right) = if key_cmp(&s, &other) == Ordering::Less {
                (fresh, n)
            } else {
                (n, fresh)
            };
            let parent = self.alloc(Node {
                left,
                right,
                size: 2,
                lo: s,
                hi: s,
                env: None,
            });
            self.pull(parent);
            return parent;
        }
        let left = self.node(n).left;
        if key_cmp(&s, &self.node(left).hi) != Ordering::Greater {
            let child = self.insert_at(left, s);
            self.nodes[n as usize].left = child;
        } else {
            let right = self.node(n).right;
            let child = self.insert_at(right, s);
            self.nodes[n as usize].right = child;
        }
        self.pull(n);
        self.touch_envelope(n, s, true);
        self.path.push(n);
        n
    }

    pub fn delete_side(&mut self, s: &Side) -> Result<(), SideIndexError> {
        if !self.members.remove(s) {
            return Err(SideIndexError::UnknownSide(*s));
        }
        self.path.clear();
        self.root = self.delete_at(self.root, s);
        self.rebalance_path();
        Ok(())
    }

    fn delete_at(&mut self, n: u32, s: &Side) -> u32 {
        if self.node(n).is_leaf() {
            debug_assert_eq!(self.node(n).lo, *s);
            self.release(n);
            return NIL;
        }
        let (left, right) = (self.node(n).left, self.node(n).right);
        let go_left = key_cmp(s, &self.node(left).hi) != Ordering::Greater;
        let (child, other) = if go_left { (left, right) } else { (right, left) };
        let replaced = self.delete_at(child, s);
        if replaced == NIL {
            self.release(n);
            return other;
        }
        if go_left {
            self.nodes[n as usize].left = replaced;
        } else {
            self.nodes[n as usize].right = replaced;
        }
        self.pull(n);
        self.touch_envelope(n, *s, false);
        self.path.push(n);
        n
    }

    fn is_unbalanced(&self, n: u32) -> bool {
        let node = self.node(n);
        if node.is_leaf() || node.size < 4 {
            return false;
        }
        let limit = self.alpha * node.size as f64;
        (self.node(node.left).size as f64) < limit || (self.node(node.right).size as f64) < limit
    }

    /// Rebuilds the highest out-of-balance subtree on the last update path.
    /// Only nodes on that path changed weight.
    fn rebalance_path(&mut self) {
        let path = std::mem::take(&mut self.path);
        // `path` is bottom-up and each entry is the parent of the one before.
        for i in (0..path.len()).rev() {
            let n = path[i];
            if !self.is_unbalanced(n) {
                continue;
            }
            let sides = self.leaves_of(n);
            self.free_subtree(n);
            let fresh = self.build(&sides);
            self.rebuilt_leaves += sides.len() as u64;
            if i + 1 == path.len() {
                self.root = fresh;
            } else {
                let parent = path[i + 1];
                if self.node(parent).left == n {
                    self.nodes[parent as usize].left = fresh;
                } else {
                    self.nodes[parent as usize].right = fresh;
                }
            }
            break;
        }
        self.path = path;
    }

    fn free_subtree(&mut self, n: u32) {
        let node = self.node(n);
        let (l, r, leaf) = (node.left, node.right, node.is_leaf());
        if !leaf {
            self.free_subtree(l);
            self.free_subtree(r);
        }
        self.release(n);
    }

    fn build(&mut self, sides: &[Side]) -> u32 {
        if sides.len() == 1 {
            return self.alloc(Node::leaf(sides[0]));
        }
        let mid = sides.len() / 2;
        let left = self.build(&sides[..mid]);
        let right = self.build(&sides[mid..]);
        let env = (sides.len() as u32 >= ENVELOPE_MIN).then(|| Self::fresh_envelope(sides));
        let n = self.alloc(Node {
            left,
            right,
            size: 0,
            lo: sides[0],
            hi: sides[0],
            env,
        });
        self.pull(n);
        n
    }

    /// Nearest side compatible with `c`, ties to the smallest side. Every
    /// indexed side must have `c.apex` on its inner side.
    pub fn nearest_compatible_side(&self, c: &Corner) -> Result<Option<(Side, SquaredDistance)>, SideIndexError> {
        if self.root == NIL {
            return Ok(None);
        }
        let (from, to) = c.antipodal_arc();
        let ranges: Vec<Range> = if from.angle_cmp(to) != Ordering::Greater {
            vec![Range {
                from: Some(from),
                to: Some(to),
            }]
        } else {
            vec![
                Range {
                    from: Some(from),
                    to: None,
                },
                Range {
                    from: None,
                    to: Some(to),
                },
            ]
        };
        let mut best = None;
        for r in ranges {
            self.query(self.root, r, c, &mut best)?;
        }
        Ok(best.map(|(d, s)| (s, d)))
    }

    fn query(&self, n: u32, r: Range, c: &Corner, best: &mut Option<(SquaredDistance, Side)>) -> Result<(), SideIndexError> {
        let node = self.node(n);
        let (lo, hi) = (node.lo.outward_normal(), node.hi.outward_normal());
        if !r.before_end(lo) || !r.after_start(hi) {
            return Ok(());
        }
        let mut offer = |d: SquaredDistance, s: Side| {
            if best.is_none_or(|b| (d, s) < b) {
                *best = Some((d, s));
            }
        };
        if r.after_start(lo) && r.before_end(hi) {
            if let Some(env) = &node.env {
                let (h, d) = env.nearest(c.apex)?;
                offer(d, h.id);
                return Ok(());
            }
            if node.is_leaf() {
                let s = node.lo;
                if s.eval(c.apex) < 0 {
                    return Err(EnvelopeError::PreconditionViolated.into());
                }
                offer(halfplane(s).squared_distance(c.apex), s);
                return Ok(());
            }
        }
        self.query(node.left, r, c, best)?;
        self.query(node.right, r, c, best)
    }

    /// Checks ordering, sizes, balance and every envelope against the leaves.
    pub fn audit(&self) -> Result<(), String> {
        if self.root == NIL {
            return if self.members.is_empty() {
                Ok(())
            } else {
                Err("empty tree with members".into())
            };
        }
        let sides = self.sides();
        if sides.len() != self.members.len() {
            return Err(format!("{} leaves for {} members", sides.len(), self.members.len()));
        }
        if sides.windows(2).any(|w| key_cmp(&w[0], &w[1]) != Ordering::Less) {
            return Err("leaves out of angular order".into());
        }
        self.audit_node(self.root)
    }

    fn audit_node(&self, n: u32) -> Result<(), String> {
        let node = self.node(n);
        let leaves = self.leaves_of(n);
        if node.size as usize != leaves.len() || node.lo != leaves[0] || node.hi != leaves[leaves.len() - 1] {
            return Err(format!("node {n}: stale size or bounds"));
        }
        if node.is_leaf() {
            return Ok(());
        }
        if self.is_unbalanced(n) {
            return Err(format!("node {n}: out of balance"));
        }
        match &node.env {
            None if node.size >= ENVELOPE_MIN => return Err(format!("node {n}: missing envelope")),
            Some(_) if node.size < ENVELOPE_MIN => return Err(format!("node {n}: spurious envelope")),
            Some(env) => {
                let mut ids: Vec<Side> = env.iter().map(|h| h.id).collect();
                ids.sort();
                let mut want = leaves;
                want.sort();
                if ids != want {
                    return Err(format!("node {n}: envelope disagrees with subtree"));
                }
            }
            None => {}
        }
        self.audit_node(node.left)?;
        self.audit_node(node.right)
    }
}
