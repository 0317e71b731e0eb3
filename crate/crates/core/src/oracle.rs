//! Brute-force reference implementations. These share only the exact
//! primitives of [`crate::geom`] with the dynamic structures.

use thiserror::Error;

use crate::geom::{cross, is_compatible, squared_distance, Coord, Corner, Side, SquaredDistance};
use crate::hull::features_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("point set has fewer than three non-collinear points")]
    DegenerateHull,
}

/// Squared width with a side-corner pair attaining it. Degenerate inputs have
/// width zero and no witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaticWidthResult {
    pub width_sq: SquaredDistance,
    pub witness: Option<(Side, Corner)>,
}

impl StaticWidthResult {
    fn degenerate() -> Self {
        StaticWidthResult {
            width_sq: SquaredDistance::ZERO,
            witness: None,
        }
    }
}

/// Strictly convex hull by monotone chain, counterclockwise from the
/// lexicographically smallest point. Duplicates are ignored; collinear
/// boundary points are dropped.
pub fn convex_hull(points: &[Coord]) -> Vec<Coord> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Coord> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Coord> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Keeps the lexicographically smallest `(distance, corner, side)` candidate.
fn offer(best: &mut Option<(SquaredDistance, Corner, Side)>, d: SquaredDistance, c: Corner, s: Side) {
    let better = match best {
        None => true,
        Some((bd, bc, bs)) => (d, c, s) < (*bd, *bc, *bs),
    };
    if better {
        *best = Some((d, c, s));
    }
}

fn finish(best: Option<(SquaredDistance, Corner, Side)>) -> StaticWidthResult {
    match best {
        Some((d, c, s)) => StaticWidthResult {
            width_sq: d,
            witness: Some((s, c)),
        },
        None => StaticWidthResult::degenerate(),
    }
}

/// Width by rotating calipers: each hull edge is paired with its farthest
/// vertex (or the two farthest, when the opposite edge is parallel) by a
/// pointer that only moves forward around the hull.
pub fn calipers_width(points: &[Coord]) -> StaticWidthResult {
    let h = convex_hull(points);
    let n = h.len();
    if n < 3 {
        return StaticWidthResult::degenerate();
    }
    let corner = |j: usize| Corner::new(h[(j + n - 1) % n], h[j % n], h[(j + 1) % n]);
    let mut best = None;
    let mut j = 1;
    for i in 0..n {
        let side = Side::new(h[i], h[(i + 1) % n]);
        while side.eval(h[(j + 1) % n]) > side.eval(h[j % n]) {
            j += 1;
        }
        let far = side.eval(h[j % n]);
        let d = SquaredDistance::point_line(side.a(), side.b(), far);
        offer(&mut best, d, corner(j % n), side);
        if side.eval(h[(j + 1) % n]) == far {
            offer(&mut best, d, corner((j + 1) % n), side);
        }
    }
    finish(best)
}

/// Minimum squared distance over every side-corner pair of the hull.
pub fn all_pairs_width(points: &[Coord]) -> Result<StaticWidthResult, OracleError> {
    let (corners, sides) = features_of(&convex_hull(points));
    if corners.is_empty() {
        return Err(OracleError::DegenerateHull);
    }
    let mut best = None;
    for s in &sides {
        for c in &corners {
            let d = squared_distance(s, c);
            if d.is_finite() {
                offer(&mut best, d, *c, *s);
            }
        }
    }
    Ok(finish(best))
}

/// Nearest compatible side to a corner by linear scan; ties go to the
/// smallest side.
pub fn nearest_side_scan(c: &Corner, sides: &[Side]) -> Option<(Side, SquaredDistance)> {
    sides
        .iter()
        .filter(|s| is_compatible(s, c))
        .map(|s| (squared_distance(s, c), *s))
        .min()
        .map(|(d, s)| (s, d))
}

/// Every compatible side-corner pair of a counterclockwise hull cycle.
pub fn compatible_pairs(cycle: &[Coord]) -> Vec<(Side, Corner)> {
    let (corners, sides) = features_of(cycle);
    let mut out = Vec::new();
    for s in &sides {
        for c in &corners {
            if is_compatible(s, c) {
                out.push((*s, *c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: i64, y: i64) -> Coord {
        Coord::new(x, y)
    }

    #[test]
    fn hull_drops_collinear_and_duplicates() {
        let pts = [c(0, 0), c(1, 0), c(2, 0), c(2, 2), c(0, 2), c(1, 1), c(0, 0), c(0, 1)];
        assert_eq!(convex_hull(&pts), vec![c(0, 0), c(2, 0), c(2, 2), c(0, 2)]);
        assert_eq!(convex_hull(&[c(0, 0), c(1, 1), c(5, 5)]), vec![c(0, 0), c(5, 5)]);
    }

    #[test]
    fn square_and_triangle() {
        let sq = [c(0, 0), c(2, 0), c(2, 2), c(0, 2)];
        assert_eq!(calipers_width(&sq).width_sq, SquaredDistance::finite(4, 1));
        assert_eq!(all_pairs_width(&sq).unwrap().width_sq, SquaredDistance::finite(4, 1));
        let tri = [c(0, 0), c(4, 0), c(0, 3)];
        let w = calipers_width(&tri);
        assert_eq!(w.width_sq, SquaredDistance::finite(144, 25));
        assert_eq!(w.witness, all_pairs_width(&tri).unwrap().witness);
        let (side, corner) = w.witness.unwrap();
        assert_eq!(side, Side::new(c(4, 0), c(0, 3)));
        assert_eq!(corner.apex, c(0, 0));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(calipers_width(&[]).width_sq, SquaredDistance::ZERO);
        assert_eq!(calipers_width(&[c(0, 0), c(1, 1), c(5, 5)]).witness, None);
        assert_eq!(all_pairs_width(&[c(1, 1)]), Err(OracleError::DegenerateHull));
    }

    #[test]
    fn calipers_agree_with_all_pairs_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.random_range(3..60);
            let r = if rng.random_bool(0.3) { 4 } else { 100_000 };
            let pts: Vec<Coord> = (0..n)
                .map(|_| c(rng.random_range(-r..=r), rng.random_range(-r..=r)))
                .collect();
            let fast = calipers_width(&pts);
            match all_pairs_width(&pts) {
                Ok(slow) => assert_eq!(fast, slow),
                Err(_) => assert_eq!(fast.width_sq, SquaredDistance::ZERO),
            }
        }
    }

    #[test]
    fn square_side_scan() {
        let sq = [c(0, 0), c(2, 0), c(2, 2), c(0, 2)];
        let (corners, sides) = features_of(&sq);
        let top_left = corners.iter().find(|k| k.apex == c(0, 2)).unwrap();
        let (s, d) = nearest_side_scan(top_left, &sides).unwrap();
        assert_eq!(s, Side::new(c(0, 0), c(2, 0)));
        assert_eq!(d, SquaredDistance::finite(4, 1));
    }
}
