//! Polynomial curve kernel: Bernstein/Lagrange bases, segment types,
//! conversion, subdivision, arc-length queries and closest-point projection.

mod basis;
mod chain;
pub(crate) mod solve;

pub use basis::{
    bernstein, bernstein_all, lagrange_basis, lagrange_basis_all, lagrange_deriv_all,
};
pub use chain::{ArcRef, ChainId, SourceChain};

use crate::error::{Error, Result};
use crate::geom::{BBox, Point2};
use crate::scalar::{real, Real};

/// Gauss-Legendre rule used for arc-length quadrature (nodes, weights on [-1,1]).
const GL16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754037),
    (-0.9445750230732326, 0.062253523938647706),
    (-0.8656312023878318, 0.09515851168249259),
    (-0.755404408355003, 0.12462897125553403),
    (-0.6178762444026438, 0.14959598881657676),
    (-0.45801677765722737, 0.16915651939500262),
    (-0.2816035507792589, 0.1826034150449236),
    (-0.09501250983763745, 0.18945061045506859),
    (0.09501250983763745, 0.18945061045506859),
    (0.2816035507792589, 0.1826034150449236),
    (0.45801677765722737, 0.16915651939500262),
    (0.6178762444026438, 0.14959598881657676),
    (0.755404408355003, 0.12462897125553403),
    (0.8656312023878318, 0.09515851168249259),
    (0.9445750230732326, 0.062253523938647706),
    (0.9894009349916499, 0.027152459411754037),
];

/// Relative tolerance for adaptive arc-length quadrature.
const ARCLEN_REL_TOL: f64 = 1e-9;

/// A degree-n Lagrange curve interpolating `n+1` points at the uniform
/// parameters `t_i = i/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeSegment<R> {
    nodes: Vec<Point2<R>>,
}

impl<R: Real> LagrangeSegment<R> {
    pub fn new(nodes: Vec<Point2<R>>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "Lagrange segment needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        Ok(Self { nodes })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    #[inline]
    pub fn nodes(&self) -> &[Point2<R>] {
        &self.nodes
    }

    pub fn start(&self) -> Point2<R> {
        self.nodes[0]
    }

    pub fn end(&self) -> Point2<R> {
        *self.nodes.last().expect("nonempty")
    }

    pub fn eval(&self, t: R) -> Point2<R> {
        let basis = lagrange_basis_all(self.degree(), t);
        let mut p = Point2::zero();
        for (node, b) in self.nodes.iter().zip(basis) {
            p += *node * b;
        }
        p
    }

    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self { nodes }
    }

    pub fn bbox(&self) -> BBox<R> {
        BBox::from_points(&self.nodes)
    }

    /// Converts to the Bernstein form; both represent the same polynomial.
    pub fn to_bezier(&self) -> BezierSegment<R> {
        let n = self.degree();
        // Collocation matrix M[k][i] = B_i^n(k/n); solve M * ctrl = nodes.
        let m: Vec<Vec<R>> = (0..=n)
            .map(|k| bernstein_all(n, real::<R>(k as f64 / n as f64)))
            .collect();
        let ctrl = solve::solve_points(&m, &self.nodes);
        BezierSegment { ctrl }
    }
}

/// A degree-n Bézier curve with `n+1` control points.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierSegment<R> {
    ctrl: Vec<Point2<R>>,
}

/// Result of a closest-point query.
#[derive(Debug, Clone, Copy)]
pub struct ClosestPoint<R> {
    pub t: R,
    pub point: Point2<R>,
    pub dist: R,
}

/// Unsigned curvature sample; `degenerate` marks zero-speed points where the
/// value is reported as 0.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureSample<R> {
    pub kappa: R,
    pub degenerate: bool,
}

impl<R: Real> BezierSegment<R> {
    pub fn new(ctrl: Vec<Point2<R>>) -> Result<Self> {
        if ctrl.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "Bézier segment needs at least 2 control points, got {}",
                ctrl.len()
            )));
        }
        Ok(Self { ctrl })
    }

    fn raw(ctrl: Vec<Point2<R>>) -> Self {
        Self { ctrl }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.ctrl.len() - 1
    }

    #[inline]
    pub fn ctrl(&self) -> &[Point2<R>] {
        &self.ctrl
    }

    pub fn start(&self) -> Point2<R> {
        self.ctrl[0]
    }

    pub fn end(&self) -> Point2<R> {
        *self.ctrl.last().expect("nonempty")
    }

    /// Control vectors `Δ_i = Q_{i+1} - Q_i`.
    pub fn control_vectors(&self) -> Vec<Point2<R>> {
        self.ctrl.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn bbox(&self) -> BBox<R> {
        BBox::from_points(&self.ctrl)
    }

    /// Evaluates via de Casteljau.
    pub fn eval(&self, t: R) -> Point2<R> {
        let mut pts = self.ctrl.clone();
        let n = pts.len();
        for level in 1..n {
            for i in 0..n - level {
                pts[i] = pts[i].lerp(pts[i + 1], t);
            }
        }
        pts[0]
    }

    /// Hodograph: the degree-(n-1) derivative curve with coefficients `n*Δ_i`.
    pub fn derivative_curve(&self) -> BezierSegment<R> {
        let n = real::<R>(self.degree() as f64);
        let ctrl = self
            .ctrl
            .windows(2)
            .map(|w| (w[1] - w[0]) * n)
            .collect::<Vec<_>>();
        if ctrl.is_empty() {
            // Degree-0 input: derivative is identically zero.
            BezierSegment::raw(vec![Point2::zero()])
        } else {
            BezierSegment::raw(ctrl)
        }
    }

    pub fn derivative(&self, t: R) -> Point2<R> {
        self.derivative_curve().eval(t)
    }

    /// Unsigned curvature `|x'y'' - y'x''| / |C'|^3` with a zero-speed guard.
    pub fn curvature(&self, t: R) -> CurvatureSample<R> {
        let d1c = self.derivative_curve();
        let d1 = d1c.eval(t);
        let d2 = d1c.derivative_curve().eval(t);
        let speed = d1.norm();
        let scale = self.bbox().diag().max(R::min_positive_value());
        if speed < real::<R>(1e-14) * scale {
            return CurvatureSample {
                kappa: R::zero(),
                degenerate: true,
            };
        }
        CurvatureSample {
            kappa: d1.cross(d2).abs() / (speed * speed * speed),
            degenerate: false,
        }
    }

    /// De Casteljau split at an interior parameter.
    pub fn subdivide(&self, t: R) -> Result<(Self, Self)> {
        if !(t > R::zero() && t < R::one()) {
            return Err(Error::Degenerate(format!(
                "subdivision parameter {t} must be strictly inside (0,1)"
            )));
        }
        Ok(self.split_unchecked(t))
    }

    fn split_unchecked(&self, t: R) -> (Self, Self) {
        let n = self.ctrl.len();
        let mut work = self.ctrl.clone();
        let mut left = Vec::with_capacity(n);
        let mut right = vec![Point2::zero(); n];
        left.push(work[0]);
        right[n - 1] = work[n - 1];
        for level in 1..n {
            for i in 0..n - level {
                work[i] = work[i].lerp(work[i + 1], t);
            }
            left.push(work[0]);
            right[n - 1 - level] = work[n - 1 - level];
        }
        (Self::raw(left), Self::raw(right))
    }

    /// Sub-curve over `[a, b] ⊆ [0, 1]`.
    pub fn slice(&self, a: R, b: R) -> Result<Self> {
        if !(a >= R::zero() && b <= R::one() && a < b) {
            return Err(Error::InvalidArgument(format!(
                "invalid slice range [{a}, {b}]"
            )));
        }
        let right = if a > R::zero() {
            self.split_unchecked(a).1
        } else {
            self.clone()
        };
        // Rescale b into the remaining interval.
        let local = (b - a) / (R::one() - a);
        if local < R::one() {
            Ok(right.split_unchecked(local).0)
        } else {
            Ok(right)
        }
    }

    pub fn reversed(&self) -> Self {
        let mut ctrl = self.ctrl.clone();
        ctrl.reverse();
        Self::raw(ctrl)
    }

    /// Degree elevation by one.
    pub fn elevated(&self) -> Self {
        let n = self.degree();
        let np1 = real::<R>((n + 1) as f64);
        let mut ctrl = Vec::with_capacity(n + 2);
        ctrl.push(self.ctrl[0]);
        for i in 1..=n {
            let a = real::<R>(i as f64) / np1;
            ctrl.push(self.ctrl[i - 1] * a + self.ctrl[i] * (R::one() - a));
        }
        ctrl.push(self.ctrl[n]);
        Self::raw(ctrl)
    }

    /// Elevates until the curve has the requested degree.
    pub fn elevated_to(&self, degree: usize) -> Result<Self> {
        if degree < self.degree() {
            return Err(Error::InvalidArgument(format!(
                "cannot lower degree {} to {}",
                self.degree(),
                degree
            )));
        }
        let mut cur = self.clone();
        while cur.degree() < degree {
            cur = cur.elevated();
        }
        Ok(cur)
    }

    /// Converts to Lagrange form by evaluating at the uniform nodes.
    pub fn to_lagrange(&self) -> LagrangeSegment<R> {
        let n = self.degree();
        let nodes = (0..=n)
            .map(|i| self.eval(real::<R>(i as f64 / n as f64)))
            .collect();
        LagrangeSegment { nodes }
    }

    /// Arc length over `[a, b]` by adaptive Gauss-Legendre quadrature.
    pub fn arclength_between(&self, a: R, b: R) -> Result<R> {
        if !(a >= R::zero() && b <= R::one() && a <= b) {
            return Err(Error::InvalidArgument(format!(
                "invalid arc-length range [{a}, {b}]"
            )));
        }
        if a == b {
            return Ok(R::zero());
        }
        let d1 = self.derivative_curve();
        let whole = gl16_speed(&d1, a, b);
        let tol = real::<R>(ARCLEN_REL_TOL) * whole.abs().max(R::min_positive_value());
        Ok(self.adaptive_len(&d1, a, b, whole, tol, 0))
    }

    pub fn arclength(&self) -> R {
        self.arclength_between(R::zero(), R::one())
            .expect("full range is valid")
    }

    fn adaptive_len(&self, d1: &BezierSegment<R>, a: R, b: R, whole: R, tol: R, depth: u32) -> R {
        let m = (a + b) * real::<R>(0.5);
        let left = gl16_speed(d1, a, m);
        let right = gl16_speed(d1, m, b);
        let sum = left + right;
        if (sum - whole).abs() <= tol || depth >= 28 {
            sum
        } else {
            let half_tol = tol * real::<R>(0.5);
            self.adaptive_len(d1, a, m, left, half_tol, depth + 1)
                + self.adaptive_len(d1, m, b, right, half_tol, depth + 1)
        }
    }

    /// Parameter where the arc length from 0 equals `s` (clamped to [0, L]).
    pub fn param_at_arclength(&self, s: R) -> R {
        let total = self.arclength();
        if total <= R::zero() {
            return R::zero();
        }
        let target = s.max(R::zero()).min(total);
        if target == R::zero() {
            return R::zero();
        }
        if target == total {
            return R::one();
        }
        let d1 = self.derivative_curve();
        let mut t = target / total;
        let mut lo = R::zero();
        let mut hi = R::one();
        let tol = real::<R>(1e-13) * total;
        for _ in 0..80 {
            let f = self
                .arclength_between(R::zero(), t)
                .expect("valid range")
                - target;
            if f.abs() <= tol {
                break;
            }
            if f > R::zero() {
                hi = t;
            } else {
                lo = t;
            }
            let sp = d1.eval(t).norm();
            let mut next = if sp > R::zero() { t - f / sp } else { t };
            if !(next > lo && next < hi) {
                next = (lo + hi) * real::<R>(0.5);
            }
            if (next - t).abs() <= real::<R>(1e-16) {
                break;
            }
            t = next;
        }
        t
    }

    /// Point and parameter halving the total arc length.
    pub fn arc_midpoint(&self) -> (Point2<R>, R) {
        let t = self.param_at_arclength(self.arclength() * real::<R>(0.5));
        (self.eval(t), t)
    }

    /// Global closest point on the curve to `p`.
    ///
    /// Coarse sampling, control-polygon subdivision pruning, then a Newton
    /// polish; accurate to ~1e-10 of the segment's bounding-box diagonal.
    pub fn closest_point(&self, p: Point2<R>) -> ClosestPoint<R> {
        let mut best_t = R::zero();
        let mut best_d2 = self.ctrl[0].dist_sq(p);
        // Coarse sweep (65 samples including endpoints).
        let samples = 64usize;
        for i in 0..=samples {
            let t = real::<R>(i as f64 / samples as f64);
            let d2 = self.eval(t).dist_sq(p);
            if d2 < best_d2 {
                best_d2 = d2;
                best_t = t;
            }
        }
        // Subdivision pruning by control-polygon bounding boxes.
        let mut stack: Vec<(BezierSegment<R>, R, R)> = vec![(self.clone(), R::zero(), R::one())];
        let mut visited = 0usize;
        let half = real::<R>(0.5);
        while let Some((seg, t0, t1)) = stack.pop() {
            visited += 1;
            if visited > 4096 {
                break;
            }
            let lb = seg.bbox().dist_to_point(p);
            if lb * lb >= best_d2 {
                continue;
            }
            let tm = (t0 + t1) * half;
            let d2 = self.eval(tm).dist_sq(p);
            if d2 < best_d2 {
                best_d2 = d2;
                best_t = tm;
            }
            if t1 - t0 > real::<R>(1e-4) {
                let (l, r) = seg.split_unchecked(half);
                stack.push((l, t0, tm));
                stack.push((r, tm, t1));
            }
        }
        // Newton polish on g(t) = (C(t)-p)·C'(t).
        let d1c = self.derivative_curve();
        let d2c = d1c.derivative_curve();
        let mut t = best_t;
        for _ in 0..30 {
            let c = self.eval(t) - p;
            let d1 = d1c.eval(t);
            let d2 = d2c.eval(t);
            let g = c.dot(d1);
            let gp = d1.dot(d1) + c.dot(d2);
            if gp.abs() <= R::min_positive_value() {
                break;
            }
            let next = (t - g / gp).max(R::zero()).min(R::one());
            if (next - t).abs() < real::<R>(1e-15) {
                t = next;
                break;
            }
            t = next;
        }
        let d2t = self.eval(t).dist_sq(p);
        if d2t < best_d2 {
            best_d2 = d2t;
            best_t = t;
        }
        ClosestPoint {
            t: best_t,
            point: self.eval(best_t),
            dist: best_d2.sqrt(),
        }
    }
}

fn gl16_speed<R: Real>(d1: &BezierSegment<R>, a: R, b: R) -> R {
    let half = (b - a) * real::<R>(0.5);
    let mid = (a + b) * real::<R>(0.5);
    let mut acc = R::zero();
    for (x, w) in GL16 {
        acc += real::<R>(w) * d1.eval(mid + half * real::<R>(x)).norm();
    }
    acc * half
}
