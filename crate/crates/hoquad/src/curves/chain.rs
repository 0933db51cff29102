//! Piecewise source curves addressed by arc length.
//!
//! A [`SourceChain`] is a contiguous run of polynomial segments from the
//! input network. All reconstruction bookkeeping addresses positions on the
//! chain by arc length, which makes uniform resampling and Voronoi cells on
//! the curve straightforward.

use super::{BezierSegment, LagrangeSegment};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::scalar::{real, Real};

/// Identifier of a source chain within a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainId(pub usize);

/// An arc of a source chain, delimited by arc-length coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcRef<R> {
    pub chain: ChainId,
    /// Arc-length coordinate of the arc start on the chain.
    pub start: R,
    /// Arc-length coordinate of the arc end; strictly after `start`. On
    /// closed chains the value may exceed the chain length (wrapping).
    pub end: R,
}

impl<R: Real> ArcRef<R> {
    pub fn len(&self) -> R {
        self.end - self.start
    }
}

/// A contiguous piecewise-polynomial curve with an arc-length parameterization.
#[derive(Debug, Clone)]
pub struct SourceChain<R> {
    id: ChainId,
    segments: Vec<BezierSegment<R>>,
    lagrange: Vec<LagrangeSegment<R>>,
    /// `cum_len[i]` is the arc length up to the start of segment `i`;
    /// the last entry is the total length.
    cum_len: Vec<R>,
    closed: bool,
}

impl<R: Real> SourceChain<R> {
    pub fn new(id: ChainId, segments: Vec<LagrangeSegment<R>>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("empty chain".into()));
        }
        let beziers: Vec<BezierSegment<R>> = segments.iter().map(|s| s.to_bezier()).collect();
        let mut bbox = beziers[0].bbox();
        for b in &beziers[1..] {
            bbox.merge(&b.bbox());
        }
        let tol = real::<R>(1e-9) * bbox.diag().max(R::min_positive_value());
        for w in segments.windows(2) {
            if w[0].end().dist(w[1].start()) > tol {
                return Err(Error::GeometryMismatch(
                    "chain segments are not contiguous".into(),
                ));
            }
        }
        if closed {
            let last = segments.last().expect("nonempty");
            if last.end().dist(segments[0].start()) > tol {
                return Err(Error::GeometryMismatch(
                    "closed chain does not return to its start".into(),
                ));
            }
        }
        let mut cum = Vec::with_capacity(beziers.len() + 1);
        let mut acc = R::zero();
        cum.push(acc);
        for b in &beziers {
            acc += b.arclength();
            cum.push(acc);
        }
        Ok(Self {
            id,
            segments: beziers,
            lagrange: segments,
            cum_len: cum,
            closed,
        })
    }

    #[inline]
    pub fn id(&self) -> ChainId {
        self.id
    }

    #[inline]
    pub fn closed(&self) -> bool {
        self.closed
    }

    #[inline]
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    #[inline]
    pub fn segments(&self) -> &[BezierSegment<R>] {
        &self.segments
    }

    #[inline]
    pub fn lagrange_segments(&self) -> &[LagrangeSegment<R>] {
        &self.lagrange
    }

    #[inline]
    pub fn total_len(&self) -> R {
        *self.cum_len.last().expect("nonempty")
    }

    /// Arc-length coordinate of the start of segment `i`.
    pub fn segment_start(&self, i: usize) -> R {
        self.cum_len[i]
    }

    /// Normalizes `s` into `[0, L)` for closed chains, clamps for open ones.
    fn normalize(&self, s: R) -> R {
        let total = self.total_len();
        if self.closed {
            let mut v = s % total;
            if v < R::zero() {
                v += total;
            }
            v
        } else {
            s.max(R::zero()).min(total)
        }
    }

    /// Locates `s` as (segment index, local curve parameter).
    pub fn locate(&self, s: R) -> (usize, R) {
        let total = self.total_len();
        let s = self.normalize(s);
        // Exact end of an open chain.
        if !self.closed && s >= total {
            return (self.segments.len() - 1, R::one());
        }
        let mut i = match self
            .cum_len
            .binary_search_by(|c| c.partial_cmp(&s).expect("finite"))
        {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        };
        if i >= self.segments.len() {
            i = self.segments.len() - 1;
        }
        let local = s - self.cum_len[i];
        let t = self.segments[i].param_at_arclength(local);
        (i, t)
    }

    pub fn point_at(&self, s: R) -> Point2<R> {
        let (i, t) = self.locate(s);
        self.segments[i].eval(t)
    }

    /// Unit tangent at `s`; falls back to a small forward difference at
    /// zero-speed points.
    pub fn tangent_at(&self, s: R) -> Point2<R> {
        let (i, t) = self.locate(s);
        let d = self.segments[i].derivative(t);
        if let Some(u) = d.normalized() {
            return u;
        }
        let h = real::<R>(1e-6);
        let a = self.segments[i].eval((t - h).max(R::zero()));
        let b = self.segments[i].eval((t + h).min(R::one()));
        (b - a).normalized().unwrap_or(Point2::new(R::one(), R::zero()))
    }

    /// Unsigned curvature at `s` (0 at degenerate points).
    pub fn curvature_at(&self, s: R) -> R {
        let (i, t) = self.locate(s);
        self.segments[i].curvature(t).kappa
    }

    pub fn arc(&self, start: R, end: R) -> Result<ArcRef<R>> {
        if !(end > start) {
            return Err(Error::InvalidArgument(format!(
                "arc end {end} must follow start {start}"
            )));
        }
        if end - start > self.total_len() + real::<R>(1e-9) * self.total_len() {
            return Err(Error::InvalidArgument(
                "arc longer than the whole chain".into(),
            ));
        }
        Ok(ArcRef {
            chain: self.id,
            start,
            end,
        })
    }

    /// The Bézier pieces of the chain covering `[arc.start, arc.end]`,
    /// trimmed at both ends, in chain order.
    pub fn sub_arc(&self, arc: &ArcRef<R>) -> Vec<BezierSegment<R>> {
        let snap = real::<R>(1e-12);
        let (mut i, mut t0) = self.locate(arc.start);
        if t0 > R::one() - snap {
            i = if i + 1 < self.segments.len() {
                i + 1
            } else if self.closed {
                0
            } else {
                i
            };
            if t0 > R::one() - snap {
                t0 = R::zero();
            }
        }
        let mut remaining = arc.len();
        let mut out = Vec::new();
        let mut guard = 0usize;
        while remaining > R::zero() && guard <= self.segments.len() + 2 {
            guard += 1;
            let seg = &self.segments[i];
            let seg_len = seg.arclength();
            let avail = seg_len - seg.arclength_between(R::zero(), t0).expect("valid");
            if avail <= R::zero() {
                // Nothing left on this segment; move on.
                i = (i + 1) % self.segments.len();
                t0 = R::zero();
                continue;
            }
            if remaining >= avail - snap * seg_len {
                // Take the tail of this segment.
                let piece = if t0 <= snap {
                    seg.clone()
                } else {
                    seg.slice(t0, R::one()).expect("valid tail slice")
                };
                out.push(piece);
                remaining -= avail;
                if remaining <= snap * self.total_len() {
                    break;
                }
                i = (i + 1) % self.segments.len();
                t0 = R::zero();
            } else {
                let s_local = seg.arclength_between(R::zero(), t0).expect("valid") + remaining;
                let t1 = seg.param_at_arclength(s_local);
                if t1 > t0 + snap {
                    out.push(seg.slice(t0, t1).expect("valid slice"));
                }
                break;
            }
        }
        out
    }

    /// Builds the uniform-resampling curve over the arc: a degree-n Lagrange
    /// segment whose nodes sit at arc-length fractions `k/n` along the arc.
    pub fn build_h(&self, arc: &ArcRef<R>, degree: usize) -> Result<LagrangeSegment<R>> {
        if degree < 1 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        let len = arc.len();
        if !(len > R::zero()) {
            return Err(Error::Degenerate("zero-length arc".into()));
        }
        let nodes = (0..=degree)
            .map(|k| {
                let f = real::<R>(k as f64 / degree as f64);
                self.point_at(arc.start + len * f)
            })
            .collect();
        LagrangeSegment::new(nodes)
    }
}
