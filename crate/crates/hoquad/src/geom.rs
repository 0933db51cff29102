//! Planar points, bounding boxes and angular sectors.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::scalar::{real, Real};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<R> {
    pub x: R,
    pub y: R,
}

impl<R: Real> Point2<R> {
    #[inline]
    pub fn new(x: R, y: R) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self {
            x: R::zero(),
            y: R::zero(),
        }
    }

    #[inline]
    pub fn dot(self, o: Self) -> R {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product of two plane vectors.
    #[inline]
    pub fn cross(self, o: Self) -> R {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> R {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> R {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Self) -> R {
        (self - o).norm()
    }

    #[inline]
    pub fn dist_sq(self, o: Self) -> R {
        (self - o).norm_sq()
    }

    /// Unit vector, or `None` for (near-)zero input.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > R::zero() {
            Some(self / n)
        } else {
            None
        }
    }

    /// Angle of the vector in (-pi, pi].
    #[inline]
    pub fn angle(self) -> R {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn lerp(self, o: Self, t: R) -> Self {
        self + (o - self) * t
    }

    #[inline]
    pub fn midpoint(self, o: Self) -> Self {
        self.lerp(o, real(0.5))
    }

    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn to_f64(self) -> Point2<f64> {
        Point2 {
            x: self.x.to_f64().expect("finite coordinate"),
            y: self.y.to_f64().expect("finite coordinate"),
        }
    }

    pub fn from_f64(p: Point2<f64>) -> Self {
        Self::new(real(p.x), real(p.y))
    }
}

impl<R: Real> Add for Point2<R> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<R: Real> Sub for Point2<R> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<R: Real> Mul<R> for Point2<R> {
    type Output = Self;
    #[inline]
    fn mul(self, s: R) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<R: Real> Div<R> for Point2<R> {
    type Output = Self;
    #[inline]
    fn div(self, s: R) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl<R: Real> Neg for Point2<R> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<R: Real> AddAssign for Point2<R> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<R: Real> SubAssign for Point2<R> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<R> {
    pub min: Point2<R>,
    pub max: Point2<R>,
}

impl<R: Real> BBox<R> {
    pub fn empty() -> Self {
        Self {
            min: Point2::new(R::infinity(), R::infinity()),
            max: Point2::new(R::neg_infinity(), R::neg_infinity()),
        }
    }

    pub fn from_points<'a, I: IntoIterator<Item = &'a Point2<R>>>(points: I) -> Self
    where
        R: 'a,
    {
        let mut b = Self::empty();
        for p in points {
            b.expand(*p);
        }
        b
    }

    pub fn expand(&mut self, p: Point2<R>) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn merge(&mut self, o: &Self) {
        self.expand(o.min);
        self.expand(o.max);
    }

    pub fn diag(&self) -> R {
        if self.min.x > self.max.x {
            R::zero()
        } else {
            self.min.dist(self.max)
        }
    }

    /// Smallest distance from `p` to the box (zero inside).
    pub fn dist_to_point(&self, p: Point2<R>) -> R {
        let dx = (self.min.x - p.x).max(p.x - self.max.x).max(R::zero());
        let dy = (self.min.y - p.y).max(p.y - self.max.y).max(R::zero());
        (dx * dx + dy * dy).sqrt()
    }

    /// Smallest distance between two boxes (zero when overlapping).
    pub fn dist_to_box(&self, o: &Self) -> R {
        let dx = (self.min.x - o.max.x).max(o.min.x - self.max.x).max(R::zero());
        let dy = (self.min.y - o.max.y).max(o.min.y - self.max.y).max(R::zero());
        (dx * dx + dy * dy).sqrt()
    }
}

/// Minimal angular sector containing a set of directions, as
/// `(start_angle, width)` with angles in radians.
///
/// Directions that span half the circle or more have no useful sector; those
/// report [`Sector::Full`] (the `2*pi` sentinel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sector<R> {
    Arc { start: R, width: R },
    Full,
}

impl<R: Real> Sector<R> {
    /// Sector width; the sentinel reports `2*pi`.
    pub fn width(&self) -> R {
        match self {
            Sector::Arc { width, .. } => *width,
            Sector::Full => real(std::f64::consts::TAU),
        }
    }

    /// Minimal covering sector of the given direction vectors. Zero vectors
    /// must be filtered by the caller; an empty set yields `None`.
    pub fn span_of(dirs: &[Point2<R>]) -> Option<Self> {
        let mut angles: Vec<R> = dirs
            .iter()
            .filter_map(|d| d.normalized())
            .map(|d| d.angle())
            .collect();
        if angles.is_empty() {
            return None;
        }
        angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
        let tau = real::<R>(std::f64::consts::TAU);
        // Largest gap between consecutive directions (circular).
        let mut max_gap = angles[0] + tau - angles[angles.len() - 1];
        let mut start = angles[angles.len() - 1];
        for w in angles.windows(2) {
            let gap = w[1] - w[0];
            if gap > max_gap {
                max_gap = gap;
                start = w[0];
            }
        }
        let width = tau - max_gap;
        if width >= real(std::f64::consts::PI) {
            Some(Sector::Full)
        } else {
            // Sector starts just after the largest gap.
            let s = start + max_gap;
            let s = if s > real(std::f64::consts::PI) { s - tau } else { s };
            Some(Sector::Arc { start: s, width })
        }
    }

    fn contains_angle(&self, a: R) -> bool {
        match self {
            Sector::Full => true,
            Sector::Arc { start, width } => {
                let tau = real::<R>(std::f64::consts::TAU);
                let mut d = a - *start;
                while d < R::zero() {
                    d += tau;
                }
                while d >= tau {
                    d -= tau;
                }
                d <= *width
            }
        }
    }

    /// Whether two sectors share any direction.
    pub fn intersects(&self, o: &Self) -> bool {
        match (self, o) {
            (Sector::Full, _) | (_, Sector::Full) => true,
            (Sector::Arc { start: a, width: wa }, Sector::Arc { start: b, width: wb }) => {
                let (a, wa, b, wb) = (*a, *wa, *b, *wb);
                self.contains_angle(b)
                    || self.contains_angle(b + wb)
                    || o.contains_angle(a)
                    || o.contains_angle(a + wa)
            }
        }
    }

    /// Minimal sector covering both sectors, or `None` if that cover would
    /// reach half the circle.
    pub fn hull(&self, o: &Self) -> Option<Self> {
        match (self, o) {
            (Sector::Full, _) | (_, Sector::Full) => None,
            (Sector::Arc { start: a, width: wa }, Sector::Arc { start: b, width: wb }) => {
                let dirs = [
                    Point2::new(a.cos(), a.sin()),
                    Point2::new((*a + *wa).cos(), (*a + *wa).sin()),
                    Point2::new(b.cos(), b.sin()),
                    Point2::new((*b + *wb).cos(), (*b + *wb).sin()),
                ];
                match Self::span_of(&dirs) {
                    Some(Sector::Full) | None => None,
                    Some(arc) => Some(arc),
                }
            }
        }
    }
}

/// Twice the signed area of a triangle; positive for counterclockwise.
#[inline]
pub fn orient2d<R: Real>(a: Point2<R>, b: Point2<R>, c: Point2<R>) -> R {
    (b - a).cross(c - a)
}

/// Signed area of a polygon given by its vertex loop.
pub fn polygon_signed_area<R: Real>(pts: &[Point2<R>]) -> R {
    let mut s = R::zero();
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        s += a.cross(b);
    }
    s / real(2.0)
}

/// Winding number of `p` with respect to a closed polyline.
pub fn winding_number<R: Real>(loop_pts: &[Point2<R>], p: Point2<R>) -> i32 {
    let mut wn = 0i32;
    for i in 0..loop_pts.len() {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % loop_pts.len()];
        if a.y <= p.y {
            if b.y > p.y && orient2d(a, b, p) > R::zero() {
                wn += 1;
            }
        } else if b.y <= p.y && orient2d(a, b, p) < R::zero() {
            wn -= 1;
        }
    }
    wn
}

/// Exact-ish segment intersection test (proper crossings only).
pub fn segments_cross<R: Real>(a: Point2<R>, b: Point2<R>, c: Point2<R>, d: Point2<R>) -> bool {
    let d1 = orient2d(a, b, c);
    let d2 = orient2d(a, b, d);
    let d3 = orient2d(c, d, a);
    let d4 = orient2d(c, d, b);
    ((d1 > R::zero() && d2 < R::zero()) || (d1 < R::zero() && d2 > R::zero()))
        && ((d3 > R::zero() && d4 < R::zero()) || (d3 < R::zero() && d4 > R::zero()))
}
