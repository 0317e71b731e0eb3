//! Exact integer geometry: points, hull features (corners and sides), the
//! compatibility predicate and squared side-corner distances.
//!
//! Every decision is made on exact integers. Input coordinates are bounded by
//! [`COORD_BOUND`], which keeps cross products inside `i128` and squared
//! distances inside `u128`; comparisons of squared distances cross-multiply
//! into 256 bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Largest admissible absolute value of an input coordinate.
pub const COORD_BOUND: i64 = 1 << 30;

/// A location in the integer plane. Ordered lexicographically by `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub const fn new(x: i64, y: i64) -> Self {
        Coord { x, y }
    }

    pub fn in_bounds(self) -> bool {
        self.x.abs() <= COORD_BOUND && self.y.abs() <= COORD_BOUND
    }
}

impl std::ops::Sub for Coord {
    type Output = Vector;

    fn sub(self, other: Coord) -> Vector {
        Vector::new(self.x - other.x, self.y - other.y)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An input point: a coordinate plus the stable external id it was inserted under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub id: u64,
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(id: u64, x: i64, y: i64) -> Self {
        Point { id, x, y }
    }

    pub fn coord(&self) -> Coord {
        Coord::new(self.x, self.y)
    }
}

/// Integer direction vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    pub x: i64,
    pub y: i64,
}

impl Vector {
    pub const fn new(x: i64, y: i64) -> Self {
        Vector { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn dot(self, other: Vector) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    pub fn cross(self, other: Vector) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    /// Divide out the gcd of the components.
    pub fn primitive(self) -> Vector {
        let g = gcd(self.x.unsigned_abs(), self.y.unsigned_abs()) as i64;
        if g <= 1 {
            self
        } else {
            Vector::new(self.x / g, self.y / g)
        }
    }

    /// 0 for directions in `[0, π)` measured from `(1, 0)`, 1 for `[π, 2π)`.
    fn half(self) -> u8 {
        if self.y > 0 || (self.y == 0 && self.x > 0) {
            0
        } else {
            1
        }
    }

    /// Exact comparison of polar angles in `[0, 2π)` starting at `(1, 0)`.
    /// Parallel vectors with the same direction compare equal.
    pub fn angle_cmp(self, other: Vector) -> Ordering {
        self.half()
            .cmp(&other.half())
            .then_with(|| 0.cmp(&self.cross(other)))
    }
}

impl std::ops::Neg for Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector::new(-self.x, -self.y)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Exact cross product `(q - p) × (r - p)`.
#[inline]
pub fn cross(p: Coord, q: Coord, r: Coord) -> i128 {
    let (qx, qy) = ((q.x - p.x) as i128, (q.y - p.y) as i128);
    let (rx, ry) = ((r.x - p.x) as i128, (r.y - p.y) as i128);
    qx * ry - qy * rx
}

pub fn orientation(p: Coord, q: Coord, r: Coord) -> Orientation {
    match cross(p, q, r).cmp(&0) {
        Ordering::Greater => Orientation::CounterClockwise,
        Ordering::Less => Orientation::Clockwise,
        Ordering::Equal => Orientation::Collinear,
    }
}

/// A hull edge `u → v` in counterclockwise order, seen as the closed halfplane
/// to its left. Identity and ordering are the endpoint pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Side {
    pub u: Coord,
    pub v: Coord,
}

impl Side {
    pub const fn new(u: Coord, v: Coord) -> Self {
        Side { u, v }
    }

    pub fn a(&self) -> i64 {
        self.u.y - self.v.y
    }

    pub fn b(&self) -> i64 {
        self.v.x - self.u.x
    }

    pub fn c(&self) -> i128 {
        -(self.a() as i128 * self.u.x as i128 + self.b() as i128 * self.u.y as i128)
    }

    /// Points from the boundary into the halfplane.
    pub fn inward_normal(&self) -> Vector {
        Vector::new(self.a(), self.b())
    }

    pub fn outward_normal(&self) -> Vector {
        -self.inward_normal()
    }

    /// `a·x + b·y + c`, nonnegative inside the halfplane.
    pub fn eval(&self, p: Coord) -> i128 {
        cross(self.u, self.v, p)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.u, self.v)
    }
}

/// The wedge at hull vertex `apex` between its counterclockwise neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Corner {
    pub prev: Coord,
    pub apex: Coord,
    pub next: Coord,
}

impl Corner {
    pub const fn new(prev: Coord, apex: Coord, next: Coord) -> Self {
        Corner { prev, apex, next }
    }

    pub fn is_strictly_convex(&self) -> bool {
        cross(self.prev, self.apex, self.next) > 0
    }

    /// Outward normals of the incoming and outgoing edges. The sides compatible
    /// with this corner are those whose outward normal lies in the closed
    /// counterclockwise arc from `-lo` to `-hi`.
    pub fn normal_cone(&self) -> (Vector, Vector) {
        let lo = Side::new(self.prev, self.apex).outward_normal().primitive();
        let hi = Side::new(self.apex, self.next).outward_normal().primitive();
        (lo, hi)
    }

    /// The antipodal arc `(-lo, -hi)` of [`Corner::normal_cone`].
    pub fn antipodal_arc(&self) -> (Vector, Vector) {
        let (lo, hi) = self.normal_cone();
        (-lo, -hi)
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} {} {}>", self.prev, self.apex, self.next)
    }
}

/// Whether `dir` lies in the closed counterclockwise arc from `from` to `to`.
/// The arc must be nonempty and shorter than a half turn.
pub fn in_closed_arc(dir: Vector, from: Vector, to: Vector) -> bool {
    from.cross(dir) >= 0 && dir.cross(to) >= 0
}

/// A side and corner are compatible when the side, translated to the apex,
/// keeps the wedge on its boundary or outside it: both incident hull edges
/// leave the apex in directions that do not point into the side's halfplane.
pub fn is_compatible(s: &Side, c: &Corner) -> bool {
    let n = s.inward_normal();
    n.dot(c.prev - c.apex) <= 0 && n.dot(c.next - c.apex) <= 0
}

/// Squared Euclidean distance between the side's boundary line and the apex,
/// or [`SquaredDistance::Infinite`] for incompatible pairs.
pub fn squared_distance(s: &Side, c: &Corner) -> SquaredDistance {
    if !is_compatible(s, c) {
        return SquaredDistance::Infinite;
    }
    SquaredDistance::point_line(s.a(), s.b(), s.eval(c.apex))
}

/// An exact nonnegative rational `num / den`, or `+∞`.
///
/// Equality and ordering are by value: `4/1 == 8/2`.
#[derive(Clone, Copy, Debug)]
pub enum SquaredDistance {
    Finite { num: u128, den: u128 },
    Infinite,
}

impl SquaredDistance {
    pub const ZERO: SquaredDistance = SquaredDistance::Finite { num: 0, den: 1 };

    pub fn finite(num: u128, den: u128) -> Self {
        assert!(den > 0, "zero denominator");
        SquaredDistance::Finite { num, den }
    }

    /// `value² / (a² + b²)` for a line with normal `(a, b)` and a signed
    /// evaluation `value = a·x + b·y + c`.
    pub fn point_line(a: i64, b: i64, value: i128) -> Self {
        let den = (a as i128 * a as i128 + b as i128 * b as i128) as u128;
        let v = value.unsigned_abs();
        SquaredDistance::Finite {
            num: v * v,
            den,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SquaredDistance::Finite { .. })
    }

    /// Reduced numerator and denominator; `None` for `+∞`.
    pub fn reduced(&self) -> Option<(u128, u128)> {
        match *self {
            SquaredDistance::Finite { num, den } => {
                let g = gcd_u128(num, den);
                Some((num / g, den / g))
            }
            SquaredDistance::Infinite => None,
        }
    }

    /// Square root rounded to `f64`, computed from a 128-bit integer square root.
    pub fn sqrt_f64(&self) -> f64 {
        match *self {
            SquaredDistance::Infinite => f64::INFINITY,
            SquaredDistance::Finite { num, den } => {
                if num == 0 {
                    return 0.0;
                }
                // sqrt(num / den) = sqrt(num * 2^(2s) / den) * 2^-s
                let shift = 128u32;
                let scaled = (BigUint::from(num) << (2 * shift as usize)) / BigUint::from(den);
                let root = scaled.sqrt();
                root.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(shift as i32))
            }
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Full 256-bit product of two `u128`, as `(high, low)`.
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// Exact three-way comparison of squared distances. `+∞` is above every
/// finite value and equal to itself.
pub fn cmp_sqdist(d1: &SquaredDistance, d2: &SquaredDistance) -> Ordering {
    use SquaredDistance::*;
    match (d1, d2) {
        (Infinite, Infinite) => Ordering::Equal,
        (Infinite, Finite { .. }) => Ordering::Greater,
        (Finite { .. }, Infinite) => Ordering::Less,
        (Finite { num: n1, den: d1 }, Finite { num: n2, den: d2 }) => {
            widening_mul(*n1, *d2).cmp(&widening_mul(*n2, *d1))
        }
    }
}

impl PartialEq for SquaredDistance {
    fn eq(&self, other: &Self) -> bool {
        cmp_sqdist(self, other) == Ordering::Equal
    }
}

impl Eq for SquaredDistance {}

impl PartialOrd for SquaredDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SquaredDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_sqdist(self, other)
    }
}

impl fmt::Display for SquaredDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reduced() {
            Some((n, d)) => write!(f, "{n}/{d}"),
            None => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: i64, y: i64) -> Coord {
        Coord::new(x, y)
    }

    fn square() -> [Coord; 4] {
        [c(0, 0), c(2, 0), c(2, 2), c(0, 2)]
    }

    #[test]
    fn orientation_basics() {
        assert_eq!(orientation(c(0, 0), c(1, 0), c(0, 1)), Orientation::CounterClockwise);
        assert_eq!(orientation(c(0, 0), c(1, 1), c(2, 2)), Orientation::Collinear);
        assert_eq!(orientation(c(0, 0), c(0, 1), c(1, 0)), Orientation::Clockwise);
    }

    #[test]
    fn orientation_at_coordinate_bound() {
        let b = COORD_BOUND;
        assert_eq!(orientation(c(-b, -b), c(b, -b), c(b, b)), Orientation::CounterClockwise);
        assert_eq!(orientation(c(-b, -b), c(b, b), c(b - 1, b - 1)), Orientation::Collinear);
    }

    #[test]
    fn square_compatibility_and_distance() {
        let [p0, p1, p2, p3] = square();
        let bottom = Side::new(p0, p1);
        let top_left = Corner::new(p2, p3, p0);
        let bottom_right = Corner::new(p0, p1, p2);
        assert!(is_compatible(&bottom, &top_left));
        assert!(!is_compatible(&bottom, &bottom_right));
        assert_eq!(squared_distance(&bottom, &top_left), SquaredDistance::finite(4, 1));
        assert_eq!(squared_distance(&bottom, &bottom_right), SquaredDistance::Infinite);
    }

    #[test]
    fn triangle_altitude() {
        let hyp = Side::new(c(4, 0), c(0, 3));
        let origin = Corner::new(c(0, 3), c(0, 0), c(4, 0));
        let d = squared_distance(&hyp, &origin);
        assert_eq!(d, SquaredDistance::finite(144, 25));
        assert_eq!(d.reduced(), Some((144, 25)));
        assert!((d.sqrt_f64() - 2.4).abs() < 1e-15);
    }

    #[test]
    fn cmp_examples() {
        let a = SquaredDistance::finite(144, 25);
        let b = SquaredDistance::finite(4, 1);
        assert_eq!(cmp_sqdist(&a, &b), Ordering::Greater);
        assert_eq!(cmp_sqdist(&b, &SquaredDistance::finite(8, 2)), Ordering::Equal);
        assert_eq!(
            cmp_sqdist(&SquaredDistance::finite(1, 1), &SquaredDistance::Infinite),
            Ordering::Less
        );
        assert_eq!(
            cmp_sqdist(&SquaredDistance::Infinite, &SquaredDistance::Infinite),
            Ordering::Equal
        );
    }

    #[test]
    fn cmp_near_u128_limits() {
        // Values differ only beyond 128 bits of the cross products.
        let big = u128::MAX >> 2;
        let a = SquaredDistance::finite(big, big - 1);
        let b = SquaredDistance::finite(big - 1, big - 2);
        // big/(big-1) < (big-1)/(big-2)
        assert_eq!(cmp_sqdist(&a, &b), Ordering::Less);
    }

    #[test]
    fn normal_cone_of_square_corner() {
        let [p0, _, p2, p3] = square();
        let corner = Corner::new(p2, p3, p0);
        let (lo, hi) = corner.normal_cone();
        assert_eq!(lo, Vector::new(0, 1));
        assert_eq!(hi, Vector::new(-1, 0));
        let (from, to) = corner.antipodal_arc();
        assert!(in_closed_arc(Vector::new(0, -1), from, to));
        assert!(in_closed_arc(Vector::new(1, 0), from, to));
        assert!(!in_closed_arc(Vector::new(0, 1), from, to));
        assert!(!in_closed_arc(Vector::new(-1, 0), from, to));
    }

    #[test]
    fn triangle_corner_arc_holds_only_left_side() {
        let (a, b, cc) = (c(0, 0), c(4, 0), c(0, 3));
        let corner = Corner::new(a, b, cc);
        let (from, to) = corner.antipodal_arc();
        let normals = [
            Side::new(a, b).outward_normal(),
            Side::new(b, cc).outward_normal(),
            Side::new(cc, a).outward_normal(),
        ];
        let inside: Vec<bool> = normals.iter().map(|&n| in_closed_arc(n, from, to)).collect();
        assert_eq!(inside, vec![false, false, true]);
        assert_eq!(normals[2].primitive(), Vector::new(-1, 0));
    }

    #[test]
    fn angle_order_from_cut() {
        let mut dirs = vec![
            Vector::new(-1, 0),
            Vector::new(0, -1),
            Vector::new(1, 0),
            Vector::new(0, 1),
            Vector::new(1, -1),
        ];
        dirs.sort_by(|a, b| a.angle_cmp(*b));
        assert_eq!(
            dirs,
            vec![
                Vector::new(1, 0),
                Vector::new(0, 1),
                Vector::new(-1, 0),
                Vector::new(0, -1),
                Vector::new(1, -1)
            ]
        );
        assert_eq!(Vector::new(2, 2).angle_cmp(Vector::new(1, 1)), Ordering::Equal);
    }

    fn rational() -> impl Strategy<Value = SquaredDistance> {
        prop_oneof![
            9 => (any::<u128>(), 1..=u128::MAX).prop_map(|(n, d)| SquaredDistance::finite(n, d)),
            1 => Just(SquaredDistance::Infinite),
        ]
    }

    fn small_rational() -> impl Strategy<Value = SquaredDistance> {
        (0u128..1 << 60, 1u128..1 << 60).prop_map(|(n, d)| SquaredDistance::finite(n, d))
    }

    proptest! {
        #[test]
        fn cmp_is_antisymmetric(a in rational(), b in rational()) {
            prop_assert_eq!(cmp_sqdist(&a, &b), cmp_sqdist(&b, &a).reverse());
        }

        #[test]
        fn cmp_is_transitive(a in rational(), b in rational(), c in rational()) {
            let mut v = [a, b, c];
            v.sort();
            prop_assert!(v[0] <= v[2]);
            prop_assert!(cmp_sqdist(&v[0], &v[1]) != Ordering::Greater);
            prop_assert!(cmp_sqdist(&v[1], &v[2]) != Ordering::Greater);
        }

        #[test]
        fn cmp_matches_bigint_value(a in small_rational(), b in small_rational()) {
            let (SquaredDistance::Finite { num: n1, den: d1 }, SquaredDistance::Finite { num: n2, den: d2 }) = (a, b) else {
                unreachable!()
            };
            let lhs = BigUint::from(n1) * BigUint::from(d2);
            let rhs = BigUint::from(n2) * BigUint::from(d1);
            prop_assert_eq!(cmp_sqdist(&a, &b), lhs.cmp(&rhs));
        }

        #[test]
        fn widening_mul_matches_bigint(a in any::<u128>(), b in any::<u128>()) {
            let (hi, lo) = widening_mul(a, b);
            let expect = BigUint::from(a) * BigUint::from(b);
            let got = (BigUint::from(hi) << 128) + BigUint::from(lo);
            prop_assert_eq!(got, expect);
        }

        #[test]
        fn scaling_multiplies_distance_by_square(
            pts in proptest::collection::vec((-1000i64..1000, -1000i64..1000), 5),
            t in 1i64..1000,
        ) {
            let p: Vec<Coord> = pts.iter().map(|&(x, y)| c(x, y)).collect();
            let side = Side::new(p[0], p[1]);
            let corner = Corner::new(p[2], p[3], p[4]);
            let scaled = |q: Coord| c(q.x * t, q.y * t);
            let side_t = Side::new(scaled(p[0]), scaled(p[1]));
            let corner_t = Corner::new(scaled(p[2]), scaled(p[3]), scaled(p[4]));
            let d = squared_distance(&side, &corner);
            let dt = squared_distance(&side_t, &corner_t);
            prop_assert_eq!(d.is_finite(), dt.is_finite());
            prop_assert_eq!(d.is_finite(), is_compatible(&side, &corner));
            if let SquaredDistance::Finite { num, den } = d {
                let t2 = (t * t) as u128;
                prop_assert_eq!(dt, SquaredDistance::finite(num * t2, den));
            }
        }
    }
}
