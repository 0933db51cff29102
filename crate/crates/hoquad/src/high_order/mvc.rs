//! Mean value coordinates on polygons and the composite interior
//! deformation built from them.

use crate::error::{Error, Result};
use crate::geom::{winding_number, BBox, Point2};
use crate::scalar::{real, Real};

/// Mean value coordinates of `x` with respect to the polygon vertices,
/// normalized to sum to one. Tangent-half-angle weights:
/// `lambda_i = (tan(a_{i-1}/2) + tan(a_i/2)) / |x - P_i|`.
///
/// `x` within 1e-12 of the polygon bounding-box diagonal of a vertex
/// returns that vertex's indicator weights.
pub fn mvc_weights<R: Real>(polygon: &[Point2<R>], x: Point2<R>) -> Result<Vec<R>> {
    let m = polygon.len();
    if m < 3 {
        return Err(Error::InvalidArgument(
            "mean value coordinates need at least 3 vertices".into(),
        ));
    }
    let scale = BBox::from_points(polygon.iter())
        .diag()
        .max(R::min_positive_value());
    let near = real::<R>(1e-12) * scale;

    let mut radii = Vec::with_capacity(m);
    for (i, p) in polygon.iter().enumerate() {
        let r = x.dist(*p);
        if r <= near {
            let mut w = vec![R::zero(); m];
            w[i] = R::one();
            return Ok(w);
        }
        radii.push(r);
    }
    let units: Vec<Point2<R>> = polygon
        .iter()
        .zip(&radii)
        .map(|(p, &r)| (*p - x) / r)
        .collect();
    // Signed tangent half-angles between consecutive spokes.
    let mut tans = Vec::with_capacity(m);
    for i in 0..m {
        let u = units[i];
        let v = units[(i + 1) % m];
        let denom = R::one() + u.dot(v);
        if denom.abs() <= real::<R>(1e-12) {
            // x sits on the edge P_i P_{i+1}: blend its endpoints linearly.
            let a = polygon[i];
            let b = polygon[(i + 1) % m];
            let ab = b - a;
            let t = ((x - a).dot(ab) / ab.norm_sq())
                .max(R::zero())
                .min(R::one());
            let mut w = vec![R::zero(); m];
            w[i] = R::one() - t;
            w[(i + 1) % m] = t;
            return Ok(w);
        }
        tans.push(u.cross(v) / denom);
    }
    let mut weights = Vec::with_capacity(m);
    let mut sum = R::zero();
    for i in 0..m {
        let w = (tans[(i + m - 1) % m] + tans[i]) / radii[i];
        weights.push(w);
        sum += w;
    }
    if sum == R::zero() {
        return Err(Error::Degenerate("mean value weights sum to zero".into()));
    }
    for w in &mut weights {
        *w = *w / sum;
    }
    Ok(weights)
}

/// Applies the weights to a (possibly different) polygon.
pub fn apply_weights<R: Real>(weights: &[R], polygon: &[Point2<R>]) -> Point2<R> {
    let mut p = Point2::zero();
    for (w, v) in weights.iter().zip(polygon) {
        p += *v * *w;
    }
    p
}

fn strictly_inside<R: Real>(polygon: &[Point2<R>], x: Point2<R>) -> bool {
    winding_number(polygon, x) != 0
}

/// Composite mean-value deformation: moves `interior` points defined
/// relative to `source` so they follow `target`, through a sequence of
/// intermediate polygons whose per-step displacement stays small.
///
/// `initial_steps` comes from the displacement heuristic; a point escaping
/// an intermediate polygon doubles the step count (up to 3 retries).
pub fn composite_deform<R: Real>(
    source: &[Point2<R>],
    target: &[Point2<R>],
    interior: &[Point2<R>],
    initial_steps: usize,
) -> Result<Vec<Point2<R>>> {
    if source.len() != target.len() {
        return Err(Error::InvalidArgument(
            "source and target polygons differ in size".into(),
        ));
    }
    let mut steps = initial_steps.max(1);
    'retry: for attempt in 0..4 {
        let mut points = interior.to_vec();
        let mut prev: Vec<Point2<R>> = source.to_vec();
        for k in 1..=steps {
            let t = real::<R>(k as f64 / steps as f64);
            let next: Vec<Point2<R>> = source
                .iter()
                .zip(target)
                .map(|(s, g)| s.lerp(*g, t))
                .collect();
            for p in &mut points {
                let w = mvc_weights(&prev, *p)?;
                let moved = apply_weights(&w, &next);
                if !strictly_inside(&next, moved) {
                    if attempt == 3 {
                        return Err(Error::NonConvergence(
                            "interior node left the intermediate polygon".into(),
                        ));
                    }
                    steps *= 2;
                    continue 'retry;
                }
                *p = moved;
            }
            prev = next;
        }
        return Ok(points);
    }
    unreachable!("retry loop always returns")
}
