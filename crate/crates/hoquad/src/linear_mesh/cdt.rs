//! Constrained Delaunay triangulation with size-driven interior refinement.
//!
//! Bowyer-Watson insertion with cavities that never cross constrained edges,
//! Sloan-style flip recovery for constraint edges, and Ruppert-style
//! circumcenter refinement toward a target edge length. Constrained edges are
//! never split: chord edges must survive verbatim for the downstream
//! piece-to-edge correspondence, so encroaching circumcenters are rejected
//! instead.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geom::{orient2d, winding_number, Point2};
use crate::scalar::{real, Real};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [usize; 3],
    nbr: [usize; 3],
    constrained: [bool; 3],
    alive: bool,
}

impl Tri {
    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        (0..3).find(|&i| self.v[i] == a && self.v[(i + 1) % 3] == b)
    }
}

#[derive(Debug)]
pub(crate) struct Cdt<R> {
    pub pts: Vec<Point2<R>>,
    tris: Vec<Tri>,
    super_verts: [usize; 3],
}

impl<R: Real> Cdt<R> {
    /// Builds a Delaunay triangulation of the given points (no constraints yet).
    pub fn new(points: &[Point2<R>]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArgument(
                "triangulation needs at least 3 points".into(),
            ));
        }
        let bbox = crate::geom::BBox::from_points(points.iter());
        let c = bbox.min.midpoint(bbox.max);
        let span = bbox.diag().max(R::min_positive_value()) * real::<R>(8.0);
        let mut pts = points.to_vec();
        let s0 = pts.len();
        pts.push(Point2::new(c.x - span, c.y - span));
        pts.push(Point2::new(c.x + span, c.y - span));
        pts.push(Point2::new(c.x, c.y + span));
        let mut cdt = Self {
            pts,
            tris: vec![Tri {
                v: [s0, s0 + 1, s0 + 2],
                nbr: [NONE; 3],
                constrained: [false; 3],
                alive: true,
            }],
            super_verts: [s0, s0 + 1, s0 + 2],
        };
        for i in 0..s0 {
            cdt.insert_existing_vertex(i)?;
        }
        Ok(cdt)
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.iter().filter(|t| t.alive).count()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.tris.iter().filter(|t| t.alive).map(|t| t.v)
    }

    pub fn triangles_with_flags(&self) -> impl Iterator<Item = ([usize; 3], [bool; 3])> + '_ {
        self.tris
            .iter()
            .filter(|t| t.alive)
            .map(|t| (t.v, t.constrained))
    }

    fn centroid(&self, t: usize) -> Point2<R> {
        let v = self.tris[t].v;
        (self.pts[v[0]] + self.pts[v[1]] + self.pts[v[2]]) / real(3.0)
    }

    fn is_super(&self, v: usize) -> bool {
        self.super_verts.contains(&v)
    }

    /// Walks from `start` to the triangle containing `p`. Returns `None` if
    /// the walk leaves the alive mesh or would cross a constrained edge when
    /// `stop_at_constraints` is set.
    fn locate(&self, p: Point2<R>, start: usize, stop_at_constraints: bool) -> Option<usize> {
        let mut t = start;
        let mut steps = 0usize;
        let cap = 4 * self.tris.len() + 16;
        loop {
            steps += 1;
            if steps > cap {
                return None;
            }
            if !self.tris[t].alive {
                return None;
            }
            let v = self.tris[t].v;
            let mut worst: Option<(R, usize)> = None;
            for i in 0..3 {
                let o = orient2d(self.pts[v[i]], self.pts[v[(i + 1) % 3]], p);
                if o < R::zero() && worst.map_or(true, |(w, _)| o < w) {
                    worst = Some((o, i));
                }
            }
            match worst {
                None => return Some(t),
                Some((_, i)) => {
                    if stop_at_constraints && self.tris[t].constrained[i] {
                        return None;
                    }
                    let n = self.tris[t].nbr[i];
                    if n == NONE || !self.tris[n].alive {
                        return None;
                    }
                    t = n;
                }
            }
        }
    }

    fn incircle(&self, t: usize, p: Point2<R>) -> bool {
        let v = self.tris[t].v;
        let a = self.pts[v[0]] - p;
        let b = self.pts[v[1]] - p;
        let c = self.pts[v[2]] - p;
        let det = a.norm_sq() * b.cross(c) - b.norm_sq() * a.cross(c) + c.norm_sq() * a.cross(b);
        det > R::zero()
    }

    fn any_alive(&self) -> usize {
        self.tris
            .iter()
            .rposition(|t| t.alive)
            .expect("no alive triangles")
    }

    fn insert_existing_vertex(&mut self, vid: usize) -> Result<()> {
        let p = self.pts[vid];
        let start = self.any_alive();
        let t = self
            .locate(p, start, false)
            .ok_or_else(|| Error::Internal("point location failed during build".into()))?;
        self.insert_into_cavity(vid, t)
            .ok_or_else(|| Error::Internal("degenerate cavity during build".into()))?;
        Ok(())
    }

    /// Bowyer-Watson insertion of vertex `vid` with the cavity seeded at
    /// triangle `seed`. Returns `None` when the cavity would violate a
    /// constrained edge (caller skips the insertion).
    fn insert_into_cavity(&mut self, vid: usize, seed: usize) -> Option<()> {
        let p = self.pts[vid];
        let mut cavity: BTreeSet<usize> = BTreeSet::new();
        cavity.insert(seed);
        let mut stack = vec![seed];
        while let Some(t) = stack.pop() {
            for i in 0..3 {
                if self.tris[t].constrained[i] {
                    continue;
                }
                let n = self.tris[t].nbr[i];
                if n == NONE || cavity.contains(&n) || !self.tris[n].alive {
                    continue;
                }
                if self.incircle(n, p) {
                    cavity.insert(n);
                    stack.push(n);
                }
            }
        }
        // A constrained edge strictly inside the cavity would be destroyed.
        for &t in &cavity {
            for i in 0..3 {
                if self.tris[t].constrained[i] {
                    let n = self.tris[t].nbr[i];
                    if n != NONE && cavity.contains(&n) {
                        return None;
                    }
                }
            }
        }
        // Collect the boundary loop: directed edges whose neighbor is
        // outside the cavity.
        let mut boundary: Vec<(usize, usize, usize, bool)> = Vec::new(); // (a, b, outer, constrained)
        for &t in &cavity {
            for i in 0..3 {
                let n = self.tris[t].nbr[i];
                if n == NONE || !cavity.contains(&n) {
                    boundary.push((
                        self.tris[t].v[i],
                        self.tris[t].v[(i + 1) % 3],
                        n,
                        self.tris[t].constrained[i],
                    ));
                }
            }
        }
        if boundary.len() < 3 {
            return None;
        }
        // The new vertex must see every boundary edge (star-shaped cavity);
        // otherwise inserted triangles would be inverted.
        for &(a, b, _, _) in &boundary {
            if orient2d(self.pts[a], self.pts[b], p) <= R::zero() {
                return None;
            }
        }
        // Chain the boundary into a loop.
        let mut next_of: std::collections::BTreeMap<usize, usize> = Default::default();
        for (idx, &(a, _, _, _)) in boundary.iter().enumerate() {
            next_of.insert(a, idx);
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }
        // Create the fan.
        let base = self.tris.len();
        let m = boundary.len();
        let mut order = Vec::with_capacity(m);
        let mut cur = boundary[0].0;
        for _ in 0..m {
            let idx = *next_of.get(&cur)?;
            order.push(idx);
            cur = boundary[idx].1;
        }
        for (k, &bidx) in order.iter().enumerate() {
            let (a, b, outer, cons) = boundary[bidx];
            let tid = base + k;
            let prev = base + (k + m - 1) % m;
            let next = base + (k + 1) % m;
            self.tris.push(Tri {
                v: [a, b, vid],
                nbr: [outer, next, prev],
                constrained: [cons, false, false],
                alive: true,
            });
            if outer != NONE {
                let oi = self.tris[outer]
                    .edge_index(b, a)
                    .expect("mutual adjacency");
                self.tris[outer].nbr[oi] = tid;
            }
            let _ = tid;
        }
        Some(())
    }

    fn find_edge(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        for (ti, t) in self.tris.iter().enumerate() {
            if !t.alive {
                continue;
            }
            if let Some(i) = t.edge_index(a, b) {
                return Some((ti, i));
            }
        }
        None
    }

    /// Flips the edge `i1` of triangle `t1`. Returns the new diagonal.
    fn flip(&mut self, t1: usize, i1: usize) -> (usize, usize) {
        let a = self.tris[t1].v[i1];
        let b = self.tris[t1].v[(i1 + 1) % 3];
        let c = self.tris[t1].v[(i1 + 2) % 3];
        let t2 = self.tris[t1].nbr[i1];
        let i2 = self.tris[t2].edge_index(b, a).expect("mutual edge");
        let d = self.tris[t2].v[(i2 + 2) % 3];

        let n_bc = self.tris[t1].nbr[(i1 + 1) % 3];
        let n_ca = self.tris[t1].nbr[(i1 + 2) % 3];
        let n_ad = self.tris[t2].nbr[(i2 + 1) % 3];
        let n_db = self.tris[t2].nbr[(i2 + 2) % 3];
        let c_bc = self.tris[t1].constrained[(i1 + 1) % 3];
        let c_ca = self.tris[t1].constrained[(i1 + 2) % 3];
        let c_ad = self.tris[t2].constrained[(i2 + 1) % 3];
        let c_db = self.tris[t2].constrained[(i2 + 2) % 3];

        // t1 becomes (a, d, c), t2 becomes (d, b, c).
        self.tris[t1] = Tri {
            v: [a, d, c],
            nbr: [n_ad, t2, n_ca],
            constrained: [c_ad, false, c_ca],
            alive: true,
        };
        self.tris[t2] = Tri {
            v: [d, b, c],
            nbr: [n_db, n_bc, t1],
            constrained: [c_db, c_bc, false],
            alive: true,
        };
        for (outer, edge, into) in [
            (n_ad, (d, a), t1),
            (n_ca, (a, c), t1),
            (n_db, (b, d), t2),
            (n_bc, (c, b), t2),
        ] {
            if outer != NONE {
                if let Some(oi) = self.tris[outer].edge_index(edge.0, edge.1) {
                    self.tris[outer].nbr[oi] = into;
                }
            }
        }
        (c, d)
    }

    fn segments_properly_cross(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        crate::geom::segments_cross(self.pts[a], self.pts[b], self.pts[c], self.pts[d])
    }

    /// Recovers the edge (a, b) by flipping crossing edges, then marks it
    /// constrained. Errors if a crossing edge is itself constrained (the
    /// input chords intersect).
    pub fn insert_constraint(&mut self, a: usize, b: usize) -> Result<()> {
        let cap = 6 * self.tris.len() + 64;
        for _ in 0..cap {
            if let Some((t, i)) = self.find_edge(a, b) {
                self.tris[t].constrained[i] = true;
                let n = self.tris[t].nbr[i];
                if n != NONE {
                    let oi = self.tris[n].edge_index(b, a).expect("mutual edge");
                    self.tris[n].constrained[oi] = true;
                }
                return Ok(());
            }
            // Find a crossing, flippable edge.
            let mut flipped = false;
            'scan: for ti in 0..self.tris.len() {
                if !self.tris[ti].alive {
                    continue;
                }
                for i in 0..3 {
                    let c = self.tris[ti].v[i];
                    let d = self.tris[ti].v[(i + 1) % 3];
                    if c == a || c == b || d == a || d == b {
                        continue;
                    }
                    if !self.segments_properly_cross(a, b, c, d) {
                        continue;
                    }
                    if self.tris[ti].constrained[i] {
                        return Err(Error::GeometryMismatch(
                            "input chords intersect: constrained edges cross".into(),
                        ));
                    }
                    let t2 = self.tris[ti].nbr[i];
                    if t2 == NONE {
                        continue;
                    }
                    // Flippable only if the surrounding quad is strictly convex.
                    let va = self.tris[ti].v[(i + 2) % 3];
                    let i2 = self.tris[t2].edge_index(d, c).expect("mutual edge");
                    let vb = self.tris[t2].v[(i2 + 2) % 3];
                    let p_c = self.pts[c];
                    let p_d = self.pts[d];
                    let p_va = self.pts[va];
                    let p_vb = self.pts[vb];
                    if orient2d(p_c, p_vb, p_va) > R::zero()
                        && orient2d(p_vb, p_d, p_va) > R::zero()
                    {
                        self.flip(ti, i);
                        flipped = true;
                        break 'scan;
                    }
                }
            }
            if !flipped {
                return Err(Error::Internal(format!(
                    "constraint recovery stalled for edge ({a}, {b})"
                )));
            }
        }
        Err(Error::Internal(format!(
            "constraint recovery did not terminate for edge ({a}, {b})"
        )))
    }

    /// Removes super-triangle fans and triangles whose centroid falls
    /// outside the region described by `loops` (nonzero winding).
    pub fn classify_region(&mut self, loops: &[Vec<Point2<R>>]) {
        for ti in 0..self.tris.len() {
            if !self.tris[ti].alive {
                continue;
            }
            if self.tris[ti].v.iter().any(|&v| self.is_super(v)) {
                self.tris[ti].alive = false;
                continue;
            }
            let c = self.centroid(ti);
            let wn: i32 = loops.iter().map(|lp| winding_number(lp, c)).sum();
            if wn == 0 {
                self.tris[ti].alive = false;
            }
        }
    }

    fn circumcenter(&self, t: usize) -> Option<Point2<R>> {
        let v = self.tris[t].v;
        let a = self.pts[v[0]];
        let b = self.pts[v[1]];
        let c = self.pts[v[2]];
        let ab = b - a;
        let ac = c - a;
        let d = ab.cross(ac) * real::<R>(2.0);
        if d == R::zero() {
            return None;
        }
        let ab2 = ab.norm_sq();
        let ac2 = ac.norm_sq();
        let ux = (ac.y * ab2 - ab.y * ac2) / d;
        let uy = (ab.x * ac2 - ac.x * ab2) / d;
        Some(Point2::new(a.x + ux, a.y + uy))
    }

    fn tri_metrics(&self, t: usize) -> Option<(R, R)> {
        // (circumradius^2, shortest edge^2)
        let cc = self.circumcenter(t)?;
        let v = self.tris[t].v;
        let r2 = cc.dist_sq(self.pts[v[0]]);
        let mut s2 = R::infinity();
        for i in 0..3 {
            s2 = s2.min(self.pts[v[i]].dist_sq(self.pts[v[(i + 1) % 3]]));
        }
        Some((r2, s2))
    }

    fn has_constrained_edge(&self, t: usize) -> bool {
        self.tris[t].constrained.iter().any(|&c| c)
    }

    /// A point in the protection band of a constrained edge would act like
    /// an encroaching Ruppert vertex; constrained edges cannot be split, so
    /// such insertions are rejected.
    fn encroaches_constraint(&self, p: Point2<R>, seed: usize, band: R) -> bool {
        // Check the seed triangle and its ring.
        let mut check = vec![seed];
        for i in 0..3 {
            let n = self.tris[seed].nbr[i];
            if n != NONE && self.tris[n].alive {
                check.push(n);
            }
        }
        let band2 = band * band;
        for t in check {
            for i in 0..3 {
                if !self.tris[t].constrained[i] {
                    continue;
                }
                let a = self.pts[self.tris[t].v[i]];
                let b = self.pts[self.tris[t].v[(i + 1) % 3]];
                let ab = b - a;
                let len2 = ab.norm_sq();
                let u = if len2 > R::zero() {
                    ((p - a).dot(ab) / len2).max(R::zero()).min(R::one())
                } else {
                    R::zero()
                };
                if (a + ab * u).dist_sq(p) < band2 {
                    return true;
                }
            }
        }
        false
    }

    /// Ruppert-style refinement: inserts circumcenters of triangles that are
    /// too large for `target_edge` or too skinny, never touching constrained
    /// edges.
    pub fn refine(&mut self, target_edge: R) -> Result<()> {
        let size_cap = target_edge * real::<R>(0.72);
        let size_cap2 = size_cap * size_cap;
        let ratio2 = real::<R>(2.0); // (r/s)^2 cap of sqrt(2)
        let mut rejected: BTreeSet<usize> = BTreeSet::new();
        let mut pending: BTreeSet<usize> =
            (0..self.tris.len()).filter(|&t| self.tris[t].alive).collect();
        let mut inserted = 0usize;
        while let Some(&t) = pending.iter().next() {
            pending.remove(&t);
            if !self.tris[t].alive || rejected.contains(&t) {
                continue;
            }
            let Some((r2, s2)) = self.tri_metrics(t) else {
                continue;
            };
            let mut too_big = r2 > size_cap2;
            if too_big {
                // A constrained edge far above the target makes the size
                // goal unreachable (chords are never split); keep the
                // chord-scale element instead of churning around it.
                let v = self.tris[t].v;
                for i in 0..3 {
                    if self.tris[t].constrained[i]
                        && self.pts[v[i]].dist_sq(self.pts[v[(i + 1) % 3]])
                            >= size_cap2 * real::<R>(4.0)
                    {
                        too_big = false;
                    }
                }
            }
            // Skip shape-driven splits for triangles pinned by two
            // constrained edges (sharp input corners).
            let cons_edges = self.tris[t].constrained.iter().filter(|&&c| c).count();
            let too_skinny = r2 > ratio2 * s2 && cons_edges < 2;
            if !(too_big || too_skinny) {
                continue;
            }
            // Preferred insertion point is the circumcenter; when it is
            // unreachable or sits in the protection band of a constrained
            // edge, an oversized triangle falls back to the midpoint of its
            // longest unconstrained edge, which halves that edge.
            let band = target_edge * real::<R>(0.35);
            let near = target_edge * real::<R>(1e-3);
            let mut candidates = vec![self.circumcenter(t)];
            if too_big {
                let v = self.tris[t].v;
                let mut best_edge: Option<(R, usize)> = None;
                for i in 0..3 {
                    if self.tris[t].constrained[i] {
                        continue;
                    }
                    let l2 = self.pts[v[i]].dist_sq(self.pts[v[(i + 1) % 3]]);
                    if best_edge.map_or(true, |(bl, _)| l2 > bl) {
                        best_edge = Some((l2, i));
                    }
                }
                if let Some((_, i)) = best_edge {
                    candidates
                        .push(Some(self.pts[v[i]].midpoint(self.pts[v[(i + 1) % 3]])));
                }
            }
            let mut done = false;
            for cand in candidates.into_iter().flatten() {
                if !cand.x.is_finite() || !cand.y.is_finite() {
                    continue;
                }
                let Some(seed) = self.locate(cand, t, true) else {
                    continue;
                };
                if self.tris[seed]
                    .v
                    .iter()
                    .any(|&v| self.pts[v].dist_sq(cand) < near * near)
                {
                    continue;
                }
                if self.encroaches_constraint(cand, seed, band) {
                    continue;
                }
                let vid = self.pts.len();
                self.pts.push(cand);
                let before = self.tris.len();
                if self.insert_into_cavity(vid, seed).is_none() {
                    self.pts.pop();
                    continue;
                }
                for nt in before..self.tris.len() {
                    pending.insert(nt);
                }
                done = true;
                break;
            }
            if !done {
                rejected.insert(t);
                continue;
            }
            inserted += 1;
            if inserted > 50_000 {
                return Err(Error::NonConvergence(
                    "refinement exceeded the insertion budget".into(),
                ));
            }
        }
        Ok(())
    }

    /// Alive triangles with any super-triangle remnants filtered out.
    pub fn export(&self) -> Vec<([usize; 3], [bool; 3])> {
        self.tris
            .iter()
            .filter(|t| t.alive && !t.v.iter().any(|&v| self.is_super(v)))
            .map(|t| (t.v, t.constrained))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    fn pt(x: f64, y: f64) -> P {
        P::new(x, y)
    }

    fn square_pts() -> Vec<P> {
        vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]
    }

    fn area(pts: &[P], v: [usize; 3]) -> f64 {
        orient2d(pts[v[0]], pts[v[1]], pts[v[2]]) / 2.0
    }

    #[test]
    fn square_triangulates_into_two_ccw_triangles() {
        let mut cdt = Cdt::new(&square_pts()).unwrap();
        for i in 0..4 {
            cdt.insert_constraint(i, (i + 1) % 4).unwrap();
        }
        let loops = vec![square_pts()];
        cdt.classify_region(&loops);
        let tris = cdt.export();
        assert_eq!(tris.len(), 2);
        for (v, _) in &tris {
            assert!(area(&cdt.pts, *v) > 0.0);
        }
    }

    #[test]
    fn constraint_forces_a_diagonal() {
        // Points whose Delaunay diagonal is (0,2); constrain (1,3) instead.
        let pts = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(0.0, 1.0)];
        let mut cdt = Cdt::new(&pts).unwrap();
        for i in 0..4 {
            cdt.insert_constraint(i, (i + 1) % 4).unwrap();
        }
        cdt.insert_constraint(1, 3).unwrap();
        cdt.classify_region(&[pts.clone()]);
        let tris = cdt.export();
        assert_eq!(tris.len(), 2);
        let has_diag = tris.iter().any(|(v, _)| {
            v.contains(&1) && v.contains(&3)
        });
        assert!(has_diag);
    }

    #[test]
    fn crossing_constraints_error() {
        let pts = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(0.0, 1.0)];
        let mut cdt = Cdt::new(&pts).unwrap();
        cdt.insert_constraint(0, 2).unwrap();
        assert!(cdt.insert_constraint(1, 3).is_err());
    }

    /// Square with boundary chords already at the target length, matching
    /// what reconstruction guarantees (chord length below the target).
    fn chunked_square(n_per_side: usize) -> Vec<P> {
        let mut pts = Vec::new();
        for side in 0..4 {
            for k in 0..n_per_side {
                let t = k as f64 / n_per_side as f64;
                pts.push(match side {
                    0 => pt(t, 0.0),
                    1 => pt(1.0, t),
                    2 => pt(1.0 - t, 1.0),
                    _ => pt(0.0, 1.0 - t),
                });
            }
        }
        pts
    }

    #[test]
    fn refinement_reaches_target_size() {
        let pts = chunked_square(5);
        let n = pts.len();
        let mut cdt = Cdt::new(&pts).unwrap();
        for i in 0..n {
            cdt.insert_constraint(i, (i + 1) % n).unwrap();
        }
        cdt.classify_region(&[pts.clone()]);
        cdt.refine(0.2).unwrap();
        let tris = cdt.export();
        assert!(tris.len() > 30, "got {}", tris.len());
        for (v, _) in &tris {
            assert!(area(&cdt.pts, *v) > 0.0);
            for i in 0..3 {
                let l = cdt.pts[v[i]].dist(cdt.pts[v[(i + 1) % 3]]);
                assert!(l < 0.45, "edge of length {l}");
            }
        }
    }

    #[test]
    fn constrained_edges_survive_refinement() {
        let pts = chunked_square(4);
        let n = pts.len();
        let mut cdt = Cdt::new(&pts).unwrap();
        for i in 0..n {
            cdt.insert_constraint(i, (i + 1) % n).unwrap();
        }
        cdt.classify_region(&[pts.clone()]);
        cdt.refine(0.25).unwrap();
        // All boundary chords must still exist as edges.
        for i in 0..n {
            let (a, b) = (i, (i + 1) % n);
            let found = cdt.export().iter().any(|(v, _)| {
                (0..3).any(|k| {
                    (v[k] == a && v[(k + 1) % 3] == b) || (v[k] == b && v[(k + 1) % 3] == a)
                })
            });
            assert!(found, "chord ({a},{b}) lost");
        }
    }

}
