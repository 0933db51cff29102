//! Certified upper bounds on the Hausdorff distance between Bézier curves.
//!
//! The bound starts from the maximum distance between corresponding control
//! points, which dominates the Hausdorff distance by the convexity of the
//! norm, and tightens it by recursively bisecting the worst curve pair. The
//! symmetric variant runs both directions and keeps the smaller bound; the
//! chain variant partitions a single curve at the closest points to the
//! chain joints and takes the worst pairwise bound.

use crate::curves::BezierSegment;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default cap on refinement iterations.
pub const DEFAULT_MAX_ITERATIONS: usize = 20;

/// Outcome of a bound computation.
#[derive(Debug, Clone)]
pub struct BoundResult<R> {
    /// Certified upper bound on the Hausdorff distance.
    pub bound: R,
    /// Refinement iterations performed (at most the given cap).
    pub iterations: usize,
    /// Whether the bound reached the requested tolerance.
    pub converged: bool,
    /// The nonincreasing bound sequence, including the initial value.
    pub history: Vec<R>,
}

/// Maximum distance between corresponding control points (`d_m`).
///
/// Requires equal degrees; callers resolve mismatches by degree elevation.
pub fn control_point_distance<R: Real>(
    l1: &BezierSegment<R>,
    l2: &BezierSegment<R>,
) -> Result<R> {
    if l1.degree() != l2.degree() {
        return Err(Error::InvalidArgument(format!(
            "control-point distance needs equal degrees, got {} and {}",
            l1.degree(),
            l2.degree()
        )));
    }
    Ok(d_m(l1, l2))
}

fn d_m<R: Real>(l1: &BezierSegment<R>, l2: &BezierSegment<R>) -> R {
    l1.ctrl()
        .iter()
        .zip(l2.ctrl())
        .map(|(a, b)| a.dist(*b))
        .fold(R::zero(), |acc, d| acc.max(d))
}

fn harmonized<R: Real>(
    l1: &BezierSegment<R>,
    l2: &BezierSegment<R>,
) -> (BezierSegment<R>, BezierSegment<R>) {
    let degree = l1.degree().max(l2.degree());
    (
        l1.elevated_to(degree).expect("elevation to max degree"),
        l2.elevated_to(degree).expect("elevation to max degree"),
    )
}

/// One-sided bound on `d_H(l1, l2)` by worst-pair bisection.
///
/// `l1` is bisected at its midpoint, `l2` at the closest point to that
/// midpoint; positional pairs are re-bounded and the loop descends into the
/// current worst pair. A closest point landing exactly on an endpoint of
/// `l2` skips that iteration's split and keeps the existing pairing, which
/// only leaves the (still sound) previous bound.
pub fn bound_one_sided<R: Real>(
    l1: &BezierSegment<R>,
    l2: &BezierSegment<R>,
    eps: R,
    max_iterations: usize,
) -> BoundResult<R> {
    let (a, b) = harmonized(l1, l2);
    let d0 = d_m(&a, &b);
    let mut pairs: Vec<(BezierSegment<R>, BezierSegment<R>, R)> = vec![(a, b, d0)];
    let mut bound = d0;
    let mut history = vec![d0];
    let mut k = 0usize;
    while bound > eps && k < max_iterations {
        k += 1;
        // Worst pair (ties to the first).
        let mut j = 0usize;
        for (i, p) in pairs.iter().enumerate() {
            if p.2 > pairs[j].2 {
                j = i;
            }
        }
        let x = pairs[j].0.eval(R::from_f64(0.5).expect("half"));
        let cp = pairs[j].1.closest_point(x);
        if cp.t > R::zero() && cp.t < R::one() {
            let (l1l, l1r) = pairs[j]
                .0
                .subdivide(R::from_f64(0.5).expect("half"))
                .expect("interior split");
            let (l2l, l2r) = pairs[j].1.subdivide(cp.t).expect("interior split");
            let dl = d_m(&l1l, &l2l);
            let dr = d_m(&l1r, &l2r);
            pairs[j] = (l1l, l2l, dl);
            pairs.insert(j + 1, (l1r, l2r, dr));
        }
        let worst = pairs
            .iter()
            .map(|p| p.2)
            .fold(R::zero(), |acc, d| acc.max(d));
        bound = bound.min(worst);
        history.push(bound);
    }
    BoundResult {
        bound,
        iterations: k,
        converged: bound <= eps,
        history,
    }
}

/// Symmetric bound: minimum of both directional runs.
pub fn bound_symmetric<R: Real>(
    l1: &BezierSegment<R>,
    l2: &BezierSegment<R>,
    eps: R,
    max_iterations: usize,
) -> BoundResult<R> {
    let fwd = bound_one_sided(l1, l2, eps, max_iterations);
    let rev = bound_one_sided(l2, l1, eps, max_iterations);
    let (better, other) = if fwd.bound <= rev.bound {
        (fwd, rev)
    } else {
        (rev, fwd)
    };
    BoundResult {
        bound: better.bound,
        iterations: better.iterations.max(other.iterations),
        converged: better.bound <= eps,
        history: better.history,
    }
}

/// Bound on the Hausdorff distance between a contiguous chain and a single
/// curve, by partitioning the curve at the closest points to the chain's
/// interior joints.
///
/// The projected parameters must be strictly increasing inside (0,1);
/// otherwise the geometry is too distorted for this pairing and the caller
/// must refine first.
pub fn bound_chain_vs_curve<R: Real>(
    chain: &[BezierSegment<R>],
    l: &BezierSegment<R>,
    eps: R,
    max_iterations: usize,
) -> Result<BoundResult<R>> {
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    if chain.len() == 1 {
        return Ok(bound_symmetric(&chain[0], l, eps, max_iterations));
    }
    let mut params = Vec::with_capacity(chain.len() - 1);
    let mut prev = R::zero();
    for piece in &chain[..chain.len() - 1] {
        let u = l.closest_point(piece.end()).t;
        if !(u > prev && u < R::one()) {
            return Err(Error::GeometryMismatch(format!(
                "chain joints project to non-monotone parameters ({u} after {prev})"
            )));
        }
        params.push(u);
        prev = u;
    }
    // Split `l` at the projected parameters, left to right.
    let mut pieces = Vec::with_capacity(chain.len());
    let mut rest = l.clone();
    let mut consumed = R::zero();
    for &u in &params {
        let local = (u - consumed) / (R::one() - consumed);
        let (left, right) = rest.subdivide(local).expect("interior split");
        pieces.push(left);
        rest = right;
        consumed = u;
    }
    pieces.push(rest);

    let mut bound = R::zero();
    let mut iterations = 0usize;
    for (c, p) in chain.iter().zip(&pieces) {
        let r = bound_symmetric(c, p, eps, max_iterations);
        bound = bound.max(r.bound);
        iterations = iterations.max(r.iterations);
    }
    Ok(BoundResult {
        bound,
        iterations,
        converged: bound <= eps,
        history: vec![bound],
    })
}
