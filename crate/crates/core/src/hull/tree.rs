//! Leaf-oriented weight-balanced tree over distinct point coordinates. Each
//! internal node stores the bridge of its subtree's lower and upper hull
//! chains: the hull edge joining the part contributed by the left child to
//! the part contributed by the right child. A node's chain is therefore the
//! left child's chain up to the bridge followed by the right child's chain
//! from the bridge, and the root chains can be read off lazily.
//!
//! Points are ordered by the sheared abscissa `x·2^32 + y`, which is
//! lexicographic `(x, y)` order and makes every abscissa distinct. All
//! geometry is carried out in the sheared frame; orientation signs agree with
//! the original frame because the shear has positive determinant.

use ethnum::I256;

use crate::geom::{cross, Coord};

const NIL: u32 = u32::MAX;

pub(crate) const LOWER: usize = 0;
pub(crate) const UPPER: usize = 1;

#[inline]
pub(crate) fn key(c: Coord) -> i128 {
    ((c.x as i128) << 32) + c.y as i128
}

#[inline]
fn sign(chain: usize) -> i128 {
    if chain == UPPER {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    size: u32,
    lo: i128,
    hi: i128,
    coord: Coord,
    count: u32,
    bridge: [(u32, u32); 2],
}

impl Node {
    fn leaf(coord: Coord) -> Self {
        let k = key(coord);
        Node {
            left: NIL,
            right: NIL,
            size: 1,
            lo: k,
            hi: k,
            coord,
            count: 1,
            bridge: [(NIL, NIL); 2],
        }
    }

    fn is_leaf(&self) -> bool {
        self.left == NIL
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BridgeTree {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    alpha: f64,
    /// Internal nodes created by subtree rebuilds.
    pub rebuilt_nodes: u64,
}

impl BridgeTree {
    pub fn new(alpha: f64) -> Self {
        BridgeTree {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            alpha,
            rebuilt_nodes: 0,
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

    #[inline]
    fn n(&self, i: u32) -> &Node {
        &self.nodes[i as usize]
    }

    #[inline]
    fn at(&self, leaf: u32) -> Coord {
        self.nodes[leaf as usize].coord
    }

    /// Adds one copy of `c`. Returns true when `c` was not present before.
    pub fn insert(&mut self, c: Coord) -> bool {
        if self.root == NIL {
            self.root = self.alloc(Node::leaf(c));
            return true;
        }
        let k = key(c);
        let mut path = Vec::new();
        let mut cur = self.root;
        while !self.n(cur).is_leaf() {
            path.push(cur);
            let node = self.n(cur);
            cur = if k <= self.n(node.left).hi { node.left } else { node.right };
        }
        if self.n(cur).coord == c {
            self.nodes[cur as usize].count += 1;
            return false;
        }
        let fresh = self.alloc(Node::leaf(c));
        let (left, right) = if k < self.n(cur).lo { (fresh, cur) } else { (cur, fresh) };
        let joint = self.alloc(Node {
            left,
            right,
            ..Node::leaf(c)
        });
        self.replace_child(path.last().copied(), cur, joint);
        path.push(joint);
        self.repair(&path);
        true
    }

    /// Removes one copy of `c`, which must be present. Returns true when the
    /// last copy went away.
    pub fn remove(&mut self, c: Coord) -> bool {
        let k = key(c);
        let mut path = Vec::new();
        let mut cur = self.root;
        assert!(cur != NIL, "remove from empty tree");
        while !self.n(cur).is_leaf() {
            path.push(cur);
            let node = self.n(cur);
            cur = if k <= self.n(node.left).hi { node.left } else { node.right };
        }
        assert_eq!(self.n(cur).coord, c, "coordinate not present");
        if self.n(cur).count > 1 {
            self.nodes[cur as usize].count -= 1;
            return false;
        }
        self.free.push(cur);
        let Some(parent) = path.pop() else {
            self.root = NIL;
            return true;
        };
        let p = self.n(parent);
        let sibling = if p.left == cur { p.right } else { p.left };
        self.replace_child(path.last().copied(), parent, sibling);
        self.free.push(parent);
        self.repair(&path);
        true
    }

    fn replace_child(&mut self, parent: Option<u32>, old: u32, new: u32) {
        match parent {
            None => self.root = new,
            Some(p) => {
                let node = &mut self.nodes[p as usize];
                if node.left == old {
                    node.left = new;
                } else {
                    debug_assert_eq!(node.right, old);
                    node.right = new;
                }
            }
        }
    }

    /// Recomputes the nodes of `path` (root first) bottom-up, then rebuilds
    /// the highest node that lost weight balance.
    fn repair(&mut self, path: &[u32]) {
        for &i in path.iter().rev() {
            self.pull(i);
        }
        for (depth, &i) in path.iter().enumerate() {
            if self.unbalanced(i) {
                let parent = if depth == 0 { None } else { Some(path[depth - 1]) };
                let fresh = self.rebuild(i);
                self.replace_child(parent, i, fresh);
                break;
            }
        }
    }

    fn unbalanced(&self, i: u32) -> bool {
        let node = self.n(i);
        if node.is_leaf() || node.size < 4 {
            return false;
        }
        let smaller = self.n(node.left).size.min(self.n(node.right).size);
        (smaller as f64) < self.alpha * node.size as f64
    }

    fn pull(&mut self, i: u32) {
        let (l, r) = (self.n(i).left, self.n(i).right);
        let size = self.n(l).size + self.n(r).size;
        let (lo, hi) = (self.n(l).lo, self.n(r).hi);
        let lower = self.find_bridge(l, r, LOWER);
        let upper = self.find_bridge(l, r, UPPER);
        let node = &mut self.nodes[i as usize];
        node.size = size;
        node.lo = lo;
        node.hi = hi;
        node.bridge = [lower, upper];
    }

    fn rebuild(&mut self, i: u32) -> u32 {
        let mut leaves = Vec::with_capacity(self.n(i).size as usize);
        self.release_internal(i, &mut leaves);
        self.build(&leaves)
    }

    fn release_internal(&mut self, i: u32, leaves: &mut Vec<u32>) {
        let node = self.n(i);
        if node.is_leaf() {
            leaves.push(i);
            return;
        }
        let (l, r) = (node.left, node.right);
        self.free.push(i);
        self.release_internal(l, leaves);
        self.release_internal(r, leaves);
    }

    fn build(&mut self, leaves: &[u32]) -> u32 {
        if leaves.len() == 1 {
            return leaves[0];
        }
        let mid = leaves.len() / 2;
        let left = self.build(&leaves[..mid]);
        let right = self.build(&leaves[mid..]);
        let coord = self.at(leaves[0]);
        let i = self.alloc(Node {
            left,
            right,
            ..Node::leaf(coord)
        });
        self.rebuilt_nodes += 1;
        self.pull(i);
        i
    }

    /// Chain orientation: the cross product in the frame where the chain is an
    /// upper chain.
    #[inline]
    fn turn(&self, chain: usize, p: u32, q: u32, r: u32) -> i128 {
        sign(chain) * cross(self.at(p), self.at(q), self.at(r))
    }

    /// Bridge between the chains of two adjacent subtrees `a` (left) and `b`
    /// (right). Among collinear candidates it picks the leftmost point of `a`
    /// and the rightmost point of `b`, so the joined chain stays strictly
    /// convex.
    ///
    /// Each step discards half of one subtree using only the two current
    /// bridge edges. Writing `La`, `Lb` for the lines through them:
    /// a point of `b` on or above `La` puts the tangent point of `a` at or
    /// left of the left end of `a`'s edge; a point of `a` on or above `Lb`
    /// puts the tangent point of `b` at or right of the right end of `b`'s
    /// edge. Otherwise the lines cross between the subtrees and the side of
    /// the crossing relative to `b`'s leftmost abscissa decides.
    fn find_bridge(&self, mut a: u32, mut b: u32, chain: usize) -> (u32, u32) {
        loop {
            let (na, nb) = (self.n(a), self.n(b));
            match (na.is_leaf(), nb.is_leaf()) {
                (true, true) => return (a, b),
                (true, false) => {
                    let (b1, b2) = nb.bridge[chain];
                    b = if self.turn(chain, b1, b2, a) >= 0 { nb.right } else { nb.left };
                }
                (false, true) => {
                    let (a1, a2) = na.bridge[chain];
                    a = if self.turn(chain, a1, a2, b) >= 0 { na.left } else { na.right };
                }
                (false, false) => {
                    let (a1, a2) = na.bridge[chain];
                    let (b1, b2) = nb.bridge[chain];
                    let b_over_a =
                        self.turn(chain, a1, a2, b1) >= 0 || self.turn(chain, a1, a2, b2) >= 0;
                    let a_over_b =
                        self.turn(chain, b1, b2, a1) >= 0 || self.turn(chain, b1, b2, a2) >= 0;
                    if b_over_a || a_over_b {
                        if b_over_a {
                            a = na.left;
                        }
                        if a_over_b {
                            b = nb.right;
                        }
                    } else if self.crossing_left_of(chain, (a1, a2), (b1, b2), nb.lo) {
                        a = na.right;
                    } else {
                        b = nb.left;
                    }
                }
            }
        }
    }

    /// Whether line `La` lies strictly above line `Lb` at abscissa `m`, in the
    /// chain frame. Both edges run left to right.
    fn crossing_left_of(&self, chain: usize, ea: (u32, u32), eb: (u32, u32), m: i128) -> bool {
        let s = I256::from(sign(chain));
        let p = |i: u32| {
            let c = self.at(i);
            (I256::from(key(c)), s * I256::from(c.y))
        };
        let ((xa1, ya1), (xa2, ya2)) = (p(ea.0), p(ea.1));
        let ((xb1, yb1), (xb2, yb2)) = (p(eb.0), p(eb.1));
        let m = I256::from(m);
        let (dxa, dya) = (xa2 - xa1, ya2 - ya1);
        let (dxb, dyb) = (xb2 - xb1, yb2 - yb1);
        let la = ya1 * dxa + dya * (m - xa1);
        let lb = yb1 * dxb + dyb * (m - xb1);
        la * dxb > lb * dxa
    }

    /// Root chain vertices with sheared abscissa strictly between `lo` and
    /// `hi`, left to right.
    pub fn chain_between(&self, chain: usize, lo: Option<i128>, hi: Option<i128>) -> Vec<Coord> {
        let mut out = Vec::new();
        if self.root != NIL {
            self.collect(self.root, chain, lo, hi, &mut out);
        }
        out
    }

    fn collect(&self, i: u32, chain: usize, lo: Option<i128>, hi: Option<i128>, out: &mut Vec<Coord>) {
        let node = self.n(i);
        if node.is_leaf() {
            let k = node.lo;
            if lo.is_none_or(|l| l < k) && hi.is_none_or(|h| k < h) {
                out.push(node.coord);
            }
            return;
        }
        let (b1, b2) = node.bridge[chain];
        let (k1, k2) = (self.n(b1).lo, self.n(b2).lo);
        if lo.is_none_or(|l| l < k1) {
            let h = Some(hi.map_or(k1 + 1, |h| h.min(k1 + 1)));
            self.collect(node.left, chain, lo, h, out);
        }
        if hi.is_none_or(|h| k2 < h) {
            let l = Some(lo.map_or(k2 - 1, |l| l.max(k2 - 1)));
            self.collect(node.right, chain, l, hi, out);
        }
    }

    /// Vertices of the root chain maximizing `dx·X + dy·Y` in the chain frame,
    /// for a direction with `dy > 0`. Two results form a chain edge.
    pub fn chain_extreme(&self, chain: usize, dx: I256, dy: I256) -> Option<(Coord, Option<Coord>)> {
        if self.root == NIL {
            return None;
        }
        let s = I256::from(sign(chain));
        let mut cur = self.root;
        loop {
            let node = self.n(cur);
            if node.is_leaf() {
                return Some((node.coord, None));
            }
            let (b1, b2) = node.bridge[chain];
            let (p, q) = (self.at(b1), self.at(b2));
            let ex = I256::from(key(q) - key(p));
            let ey = s * I256::from(q.y - p.y);
            let v = dx * ex + dy * ey;
            if v > 0 {
                cur = node.right;
            } else if v < 0 {
                cur = node.left;
            } else {
                return Some((p, Some(q)));
            }
        }
    }

    /// Leftmost and rightmost stored coordinates.
    pub fn ends(&self) -> Option<(Coord, Coord)> {
        if self.root == NIL {
            return None;
        }
        let mut l = self.root;
        while !self.n(l).is_leaf() {
            l = self.n(l).left;
        }
        let mut r = self.root;
        while !self.n(r).is_leaf() {
            r = self.n(r).right;
        }
        Some((self.at(l), self.at(r)))
    }

    /// Checks sizes, key ranges, weight balance and that every stored bridge
    /// matches a brute-force recomputation. Test support; quadratic.
    #[cfg(test)]
    pub fn check(&self) {
        if self.root != NIL {
            self.check_node(self.root);
        }
    }

    #[cfg(test)]
    fn check_node(&self, i: u32) -> Vec<Coord> {
        let node = self.n(i);
        if node.is_leaf() {
            assert_eq!(node.size, 1);
            return vec![node.coord];
        }
        let mut pts = self.check_node(node.left);
        let right = self.check_node(node.right);
        assert!(self.n(node.left).hi < self.n(node.right).lo);
        pts.extend(right);
        assert_eq!(node.size as usize, pts.len());
        assert!(!self.unbalanced(i) || node.size < 4, "unbalanced node survived repair");
        for chain in [LOWER, UPPER] {
            let want = brute_chain(&pts, chain);
            let mut got = Vec::new();
            self.collect(i, chain, None, None, &mut got);
            assert_eq!(got, want, "chain mismatch at node of size {}", node.size);
        }
        pts
    }
}

/// Strict chain of sorted points by monotone chain, for tests.
#[cfg(test)]
pub(crate) fn brute_chain(sorted: &[Coord], chain: usize) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::new();
    for &p in sorted {
        while out.len() >= 2 && sign(chain) * cross(out[out.len() - 2], out[out.len() - 1], p) >= 0 {
            out.pop();
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_updates_keep_bridges_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..40 {
            let range = if round % 2 == 0 { 6 } else { 1000 };
            let mut tree = BridgeTree::new(0.25);
            let mut live: Vec<Coord> = Vec::new();
            for _ in 0..150 {
                if live.is_empty() || rng.random_bool(0.65) {
                    let c = Coord::new(rng.random_range(-range..=range), rng.random_range(-range..=range));
                    tree.insert(c);
                    live.push(c);
                } else {
                    let i = rng.random_range(0..live.len());
                    let c = live.swap_remove(i);
                    tree.remove(c);
                }
                tree.check();
                let mut distinct = live.clone();
                distinct.sort();
                distinct.dedup();
                for chain in [LOWER, UPPER] {
                    assert_eq!(tree.chain_between(chain, None, None), brute_chain(&distinct, chain));
                }
            }
        }
    }

    #[test]
    fn collinear_points_give_two_point_chains() {
        let mut tree = BridgeTree::new(0.25);
        for i in 0..20 {
            tree.insert(Coord::new(i, 2 * i));
        }
        tree.check();
        let ends = vec![Coord::new(0, 0), Coord::new(19, 38)];
        assert_eq!(tree.chain_between(UPPER, None, None), ends);
        assert_eq!(tree.chain_between(LOWER, None, None), ends);
    }

    #[test]
    fn vertical_columns_are_ordered_by_shear() {
        let mut tree = BridgeTree::new(0.25);
        for y in -5..=5 {
            tree.insert(Coord::new(0, y));
            tree.insert(Coord::new(3, y));
        }
        tree.check();
        assert_eq!(
            tree.chain_between(UPPER, None, None),
            vec![Coord::new(0, -5), Coord::new(0, 5), Coord::new(3, 5)]
        );
        assert_eq!(
            tree.chain_between(LOWER, None, None),
            vec![Coord::new(0, -5), Coord::new(3, -5), Coord::new(3, 5)]
        );
    }

    #[test]
    fn sorted_insertions_trigger_bounded_rebuilds() {
        let mut tree = BridgeTree::new(0.25);
        let n = 4096u64;
        for i in 0..n as i64 {
            tree.insert(Coord::new(i, (i * i) % 977));
        }
        let bound = 8 * n * (64 - n.leading_zeros() as u64);
        assert!(tree.rebuilt_nodes <= bound, "{} > {}", tree.rebuilt_nodes, bound);
    }
}
